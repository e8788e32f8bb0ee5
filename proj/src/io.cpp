#include "tullock/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tullock::io {

json vec_to_json(const Vec& v) {
    json j = json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw SpecError("schema: expected an array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json j = json::array();
    for (int r = 0; r < m.rows(); ++r) j.push_back(vec_to_json(m.row(r).transpose()));
    return j;
}

Mat mat_from_json(const json& j, int expected_cols) {
    if (!j.is_array()) throw SpecError("schema: expected an array of rows");
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Mat(0, std::max(expected_cols, 0));
    const int cols = static_cast<int>(j[0].size());
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw SpecError("schema: ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

namespace {

json cost_to_json(const CostModel& cost) {
    json j;
    if (const auto* lin = std::get_if<LinearCost>(&cost)) {
        j["type"] = "linear";
        j["betas"] = vec_to_json(lin->betas);
    } else {
        const auto& dyn = std::get<DynamicPriceCost>(cost);
        j["type"] = "dynamic";
        j["alphas"] = vec_to_json(dyn.alphas);
        j["r"] = mat_to_json(dyn.r);
        if (dyn.mask.size() > 0) j["mask"] = vec_to_json(dyn.mask);
    }
    return j;
}

CostModel cost_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "linear") return LinearCost{vec_from_json(j.at("betas"))};
    if (type == "dynamic") {
        DynamicPriceCost dyn;
        dyn.alphas = vec_from_json(j.at("alphas"));
        dyn.r = mat_from_json(j.at("r"));
        if (j.contains("mask")) dyn.mask = vec_from_json(j.at("mask"));
        return dyn;
    }
    throw SpecError("schema: unknown cost type '" + type + "'");
}

PlayerConstraints constraints_from_json(const json& j, int dim) {
    PlayerConstraints c;
    c.ineq_A = Mat(0, dim);
    c.ineq_b = Vec(0);
    c.eq_A = Mat(0, dim);
    c.eq_b = Vec(0);
    if (j.contains("ineq")) {
        c.ineq_A = mat_from_json(j["ineq"].at("A"), dim);
        c.ineq_b = vec_from_json(j["ineq"].at("b"));
    }
    if (j.contains("eq")) {
        c.eq_A = mat_from_json(j["eq"].at("A"), dim);
        c.eq_b = vec_from_json(j["eq"].at("b"));
    }
    return c;
}

json constraints_to_json(const PlayerConstraints& c) {
    json j;
    j["ineq"] = {{"A", mat_to_json(c.ineq_A)}, {"b", vec_to_json(c.ineq_b)}};
    j["eq"] = {{"A", mat_to_json(c.eq_A)}, {"b", vec_to_json(c.eq_b)}};
    return j;
}

RhgPlayerSpec rhg_player_from_json(const json& j) {
    RhgPlayerSpec p;
    p.A = mat_from_json(j.at("A"));
    p.B = mat_from_json(j.at("B"));
    p.G = mat_from_json(j.at("G"));
    p.H = mat_from_json(j.at("H"));
    p.d = mat_from_json(j.at("d"));
    p.y0 = vec_from_json(j.at("y0"));
    p.p_y = vec_from_json(j.at("p_y"));
    p.p_u = vec_from_json(j.at("p_u"));
    return p;
}

json rhg_player_to_json(const RhgPlayerSpec& p) {
    json j;
    j["A"] = mat_to_json(p.A);
    j["B"] = mat_to_json(p.B);
    j["G"] = mat_to_json(p.G);
    j["H"] = mat_to_json(p.H);
    j["d"] = mat_to_json(p.d);
    j["y0"] = vec_to_json(p.y0);
    j["p_y"] = vec_to_json(p.p_y);
    j["p_u"] = vec_to_json(p.p_u);
    return j;
}

} // namespace

json spec_to_json(const SpecFile& f) {
    json j;
    j["version"] = f.version;
    json g;
    g["n_players"] = f.game.n_players;
    g["n_stages"] = f.game.n_stages;
    g["n_categories"] = f.game.n_categories;
    g["prizes"] = vec_to_json(f.game.stage_prizes);
    g["epsilons"] = vec_to_json(f.game.fictitious_participations);
    g["weights"] = vec_to_json(f.game.participation_weights);
    g["cost"] = cost_to_json(f.game.cost);
    j["game"] = g;
    json cons = json::array();
    for (const auto& c : f.game.constraints) cons.push_back(constraints_to_json(c));
    j["constraints"] = cons;
    if (f.blotto) {
        j["blotto"] = {{"budgets", vec_to_json(f.blotto->budgets)},
                       {"betas", vec_to_json(f.blotto->unit_costs)}};
    }
    if (f.rhg_players) {
        json r;
        r["horizon"] = f.rhg_horizon;
        json players = json::array();
        for (const auto& p : *f.rhg_players) players.push_back(rhg_player_to_json(p));
        r["players"] = players;
        r["market"] = {{"prizes", vec_to_json(f.rhg_market->prizes)},
                       {"epsilons", vec_to_json(f.rhg_market->epsilons)},
                       {"alphas", vec_to_json(f.rhg_market->alphas)},
                       {"r", mat_to_json(f.rhg_market->r)}};
        j["rhg"] = r;
    }
    return j;
}

SpecFile spec_from_json(const json& j) {
    SpecFile f;
    if (!j.contains("version")) throw SpecError("schema: missing version field");
    f.version = j["version"].get<int>();
    if (f.version != 1) throw SpecError("schema: unsupported version");

    const json& g = j.at("game");
    f.game.n_players = g.at("n_players").get<int>();
    f.game.n_stages = g.at("n_stages").get<int>();
    f.game.n_categories = g.at("n_categories").get<int>();
    f.game.stage_prizes = vec_from_json(g.at("prizes"));
    f.game.fictitious_participations = vec_from_json(g.at("epsilons"));
    const json& wj = g.at("weights");
    if (wj.is_array() && !wj.empty() && wj[0].is_array())
        throw SpecError("game: participation weights are shared across players; "
                        "per-player weight lists are not supported");
    f.game.participation_weights = vec_from_json(wj);
    f.game.cost = cost_from_json(g.at("cost"));

    if (j.contains("constraints") && !j["constraints"].empty()) {
        for (const auto& cj : j["constraints"])
            f.game.constraints.push_back(constraints_from_json(cj, f.game.dim()));
    } else if (j.contains("blotto")) {
        // budget rows follow from the blotto block
        const Vec budgets = vec_from_json(j["blotto"].at("budgets"));
        for (int i = 0; i < budgets.size(); ++i) {
            PlayerConstraints c;
            c.ineq_A = Mat(0, f.game.dim());
            c.ineq_b = Vec(0);
            c.eq_A = Mat::Ones(1, f.game.dim());
            c.eq_b = Vec::Constant(1, budgets[i]);
            f.game.constraints.push_back(std::move(c));
        }
    }
    // horizon-game files carry their feasible sets implicitly (they are
    // lifted from the dynamics); everything else needs explicit constraints
    if (!f.game.constraints.empty()) f.game.validate();
    else if (!j.contains("rhg"))
        throw SpecError("schema: constraints are required unless an rhg section is present");

    if (j.contains("blotto")) {
        BlottoSpec b;
        b.budgets = vec_from_json(j["blotto"].at("budgets"));
        b.unit_costs = vec_from_json(j["blotto"].at("betas"));
        b.prizes = f.game.stage_prizes;
        b.fictitious = f.game.fictitious_participations;
        b.validate();
        f.blotto = std::move(b);
    }
    if (j.contains("rhg")) {
        const json& r = j["rhg"];
        std::vector<RhgPlayerSpec> players;
        for (const auto& pj : r.at("players")) players.push_back(rhg_player_from_json(pj));
        StageMarket mk;
        mk.prizes = vec_from_json(r.at("market").at("prizes"));
        mk.epsilons = vec_from_json(r.at("market").at("epsilons"));
        mk.alphas = vec_from_json(r.at("market").at("alphas"));
        mk.r = mat_from_json(r.at("market").at("r"));
        f.rhg_horizon = r.at("horizon").get<int>();
        f.rhg_players = std::move(players);
        f.rhg_market = std::move(mk);
    }
    return f;
}

SpecFile load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("spec file not found: " + path);
    json j;
    try {
        in >> j;
        return spec_from_json(j);
    } catch (const json::exception& e) {
        throw SpecError("spec file " + path + ": " + e.what());
    }
}

void save_spec_file(const SpecFile& f, const std::string& path) {
    write_text(path, spec_to_json(f).dump(2) + "\n");
}

json strategy_to_json(const JointStrategy& x) {
    json j = json::array();
    for (const auto& xi : x.per_player) j.push_back(vec_to_json(xi));
    return j;
}

JointStrategy strategy_from_json(const json& j) {
    JointStrategy x;
    for (const auto& row : j) x.per_player.push_back(vec_from_json(row));
    return x;
}

json certificate_to_json(const OptimalityCertificate& c) {
    json players = json::array();
    for (const auto& p : c.players) {
        players.push_back({{"delta_star", p.delta_star},
                           {"lambda_ineq", vec_to_json(p.lambda_ineq)},
                           {"lambda_nonneg", vec_to_json(p.lambda_nonneg)},
                           {"nu", vec_to_json(p.nu)}});
    }
    return {{"players", players}, {"max_delta", c.max_delta}};
}

json solve_report_to_json(const SolveReport& r) {
    return {{"type", "equilibrium"},
            {"converged", r.converged},
            {"strategy", strategy_to_json(r.strategy)},
            {"certificate", certificate_to_json(r.certificate)},
            {"outer_iterations", r.outer_iterations},
            {"inner_iterations", r.inner_iterations_total},
            {"final_step", r.final_step}};
}

json blotto_solution_to_json(const BlottoSolution& s) {
    json zero_set = json::array();
    for (auto [i, k] : s.configuration.zero_set) zero_set.push_back({i, k});
    return {{"type", "blotto_equilibrium"},
            {"strategy", mat_to_json(s.strategy)},
            {"t_bar", vec_to_json(s.t_bar)},
            {"nu", vec_to_json(s.nu)},
            {"t_nu_root", s.t_nu_root},
            {"zero_set", zero_set},
            {"verified", s.verified},
            {"configurations_tried", s.configurations_tried}};
}

JointStrategy load_and_verify_solution(const std::string& path, const GameSpec& spec,
                                       double tol) {
    std::ifstream in(path);
    if (!in) throw SpecError("solution file not found: " + path);
    json j;
    in >> j;
    JointStrategy x;
    if (j.at("type") == "blotto_equilibrium") {
        Mat s = mat_from_json(j.at("strategy"));
        for (int i = 0; i < s.rows(); ++i) x.per_player.push_back(s.row(i).transpose());
    } else {
        x = strategy_from_json(j.at("strategy"));
    }
    OptimalityCertificate cert = optimality_test(spec, x); // throws if infeasible
    if (cert.max_delta > tol)
        throw NumericalError("solution file failed re-verification: max delta = " +
                             std::to_string(cert.max_delta));
    return x;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& s) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

void write_manifest(const std::string& out_dir, const std::string& config_dump,
                    unsigned long seed, const std::vector<std::string>& files,
                    const std::vector<std::pair<std::string, double>>& wall_times) {
    json j;
    j["tool_version"] = "0.1.0";
    j["config_hash"] = fnv1a_hex(config_dump);
    j["seed"] = seed;
    j["files"] = files;
    json wt;
    for (const auto& [name, t] : wall_times) wt[name] = t;
    j["wall_times_seconds"] = wt;
    write_text(out_dir + "/manifest.json", j.dump(2) + "\n");
}

} // namespace tullock::io
