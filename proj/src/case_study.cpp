#include "tullock/case_study.hpp"

#include "tullock/io.hpp"

#include <cmath>

namespace tullock {

BlottoSpec upper_level_spec(const CaseStudyConfig& cfg, double theta) {
    BlottoSpec spec;
    spec.budgets = cfg.fleet_budgets;
    spec.prizes = cfg.region_prizes;
    spec.unit_costs = cfg.beta_template * theta;
    spec.fictitious = Vec::Constant(cfg.region_prizes.size(), cfg.blotto_epsilon);
    spec.validate();
    return spec;
}

RhgPlayerSpec battery_player(double fleet, const Vec& shares, int total_steps,
                             double keep_green, double keep_yellow) {
    if (shares.size() != 3) throw SpecError("case study: expected three battery categories");
    RhgPlayerSpec p;
    // drain shift: per step a fraction of each category falls one level,
    // green -> yellow -> red, red stays parked; column sums of one keep 1'y
    // equal to the fleet size
    p.A = (Mat(3, 3) << 1, 1 - keep_yellow, 0,
                         0, keep_yellow, 1 - keep_green,
                         0, 0, keep_green).finished();
    // charging removes a vehicle from its drain path and lands it in green
    p.B = Mat::Zero(3, 3);
    p.B(0, 0) = -1;
    p.B(2, 0) = 1;
    p.B(0, 1) = -(1 - keep_yellow);
    p.B(1, 1) = -keep_yellow;
    p.B(2, 1) = 1;
    p.B(1, 2) = -(1 - keep_green);
    p.B(2, 2) = 1 - keep_green;
    p.G = -Mat::Identity(3, 3); // u_j <= y_j
    p.H = Mat::Identity(3, 3);
    p.d = Mat::Zero(total_steps, 3);
    p.y0 = fleet * shares;
    p.p_y = (Vec(3) << 0, 1, 1).finished(); // red vehicles cannot serve
    p.p_u = (Vec(3) << 0, -1, -1).finished();
    return p;
}

StageMarket synthetic_market(const CaseStudyConfig& cfg) {
    // synthetic daily profiles (not measured data): demand ramps to a peak in
    // the second half of the horizon and falls off; the charging price
    // pi = alpha * (total charging) is load-driven, so charging is cheap in
    // the off-peak steps where little charging happens
    if (cfg.total_steps != 9)
        throw SpecError("case study: the shipped profiles cover 9 steps");
    StageMarket mk;
    mk.prizes = (Vec(9) << 6000, 7000, 9000, 12000, 18000, 28000, 40000, 30000, 14000).finished();
    mk.epsilons = Vec::Constant(9, 100.0);
    mk.alphas = Vec::Constant(9, 0.001);
    mk.r = Mat::Zero(9, 3);
    return mk;
}

std::vector<PoaRow> run_poa_sweep(const CaseStudyConfig& cfg) {
    std::vector<PoaRow> rows;
    for (int g = 0; g < cfg.theta_grid; ++g) {
        const double theta =
            cfg.theta_grid == 1
                ? cfg.theta_min
                : cfg.theta_min + g * (cfg.theta_max - cfg.theta_min) / (cfg.theta_grid - 1);
        BlottoSpec spec = upper_level_spec(cfg, theta);
        GameSpec game = to_game_spec(spec);

        JointStrategy x_ne;
        try {
            BlottoSolution ne = solve_semi_analytical(spec);
            for (int i = 0; i < spec.n_players(); ++i)
                x_ne.per_player.push_back(ne.strategy.row(i).transpose());
        } catch (const NumericalError&) {
            // boundary equilibria with uneven battlefield participation fall
            // back to the iterative path
            SolveReport rep = solve_ne(game, cfg.solver);
            if (!rep.converged)
                throw NumericalError("case study: no solver certified theta = " +
                                     std::to_string(theta));
            x_ne = rep.strategy;
        }

        CentralizedConfig cc;
        cc.tol = 1e-9;
        CentralizedSolution so = solve_system_optimum(game, cc);

        PoaRow row;
        row.theta = theta;
        row.welf_ne = welfare(game, x_ne);
        row.welf_so = welfare(game, so.strategy);
        row.poa = price_of_anarchy(game, so.strategy, x_ne);
        row.profits_ne.resize(spec.n_players());
        row.profits_so.resize(spec.n_players());
        for (int i = 0; i < spec.n_players(); ++i) {
            row.profits_ne[i] = total_profit(game, x_ne, i);
            row.profits_so[i] = total_profit(game, so.strategy, i);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

FleetResult run_fleet(const CaseStudyConfig& cfg) {
    BlottoSpec spec = upper_level_spec(cfg, cfg.theta);
    GameSpec game = to_game_spec(spec);

    FleetResult res;
    res.theta = cfg.theta;
    BlottoSolution semi = solve_semi_analytical(spec);
    res.alloc_semi = semi.strategy;

    SolveReport rep = solve_ne(game, cfg.solver);
    res.alloc_iterative = Mat(spec.n_players(), spec.n_battlefields());
    for (int i = 0; i < spec.n_players(); ++i)
        res.alloc_iterative.row(i) = rep.strategy.per_player[i].transpose();

    res.disagreement = (res.alloc_iterative - res.alloc_semi).cwiseAbs().maxCoeff();
    res.max_delta_iterative = rep.certificate.max_delta;
    JointStrategy x_semi;
    for (int i = 0; i < spec.n_players(); ++i)
        x_semi.per_player.push_back(semi.strategy.row(i).transpose());
    res.max_delta_semi = optimality_test(game, x_semi).max_delta;
    res.profits.resize(spec.n_players());
    for (int i = 0; i < spec.n_players(); ++i) res.profits[i] = total_profit(game, x_semi, i);
    return res;
}

HorizonResult run_horizon(const CaseStudyConfig& cfg) {
    // region-1 sub-fleets from the upper level at the configured theta
    BlottoSolution upper = solve_semi_analytical(upper_level_spec(cfg, cfg.theta));
    HorizonResult res;
    res.fleets = upper.strategy.col(0);
    res.horizons = cfg.horizons;

    StageMarket mk = synthetic_market(cfg);
    std::vector<RhgPlayerSpec> players;
    for (int i = 0; i < res.fleets.size(); ++i)
        players.push_back(battery_player(res.fleets[i], cfg.initial_shares, cfg.total_steps));

    for (int T : cfg.horizons) {
        SolverConfig sc = cfg.solver;
        res.traces.push_back(run_receding_horizon(players, mk, T, sc));
    }
    return res;
}

namespace {

std::string config_dump(const CaseStudyConfig& cfg) {
    io::json j;
    j["fleet_budgets"] = io::vec_to_json(cfg.fleet_budgets);
    j["region_prizes"] = io::vec_to_json(cfg.region_prizes);
    j["beta_template"] = io::vec_to_json(cfg.beta_template);
    j["blotto_epsilon"] = cfg.blotto_epsilon;
    j["theta"] = cfg.theta;
    j["theta_range"] = {cfg.theta_min, cfg.theta_max, cfg.theta_grid};
    j["total_steps"] = cfg.total_steps;
    j["horizons"] = cfg.horizons;
    j["initial_shares"] = io::vec_to_json(cfg.initial_shares);
    j["seed"] = cfg.seed;
    j["tol"] = cfg.solver.tol;
    return j.dump();
}

} // namespace

std::vector<std::string> emit_poa(const std::vector<PoaRow>& rows, const CaseStudyConfig& cfg,
                                  const std::string& out_dir, const WallTimes& times) {
    std::vector<std::vector<double>> poa_rows, profit_rows;
    for (const auto& r : rows) {
        poa_rows.push_back({r.theta, r.welf_so, r.welf_ne, r.poa});
        for (int i = 0; i < r.profits_ne.size(); ++i)
            profit_rows.push_back(
                {r.theta, static_cast<double>(i + 1), r.profits_ne[i], r.profits_so[i]});
    }
    const std::string f1 = out_dir + "/poa.csv";
    const std::string f2 = out_dir + "/company_profits.csv";
    io::write_csv(f1, "theta,welf_so,welf_ne,poa", poa_rows);
    io::write_csv(f2, "theta,company,profit_ne,profit_so", profit_rows);
    std::vector<std::string> files = {f1, f2};
    io::write_manifest(out_dir, config_dump(cfg), cfg.seed, files, times);
    return files;
}

std::vector<std::string> emit_fleet(const FleetResult& res, const CaseStudyConfig& cfg,
                                    const std::string& out_dir, const WallTimes& times) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < res.alloc_semi.rows(); ++i)
        for (int k = 0; k < res.alloc_semi.cols(); ++k)
            rows.push_back({static_cast<double>(k + 1), static_cast<double>(i + 1),
                            res.alloc_iterative(i, k), res.alloc_semi(i, k)});
    const std::string f1 = out_dir + "/fleet_allocations.csv";
    io::write_csv(f1, "region,company,allocation_iterative,allocation_semi_analytical", rows);

    std::vector<std::vector<double>> prow;
    for (int i = 0; i < res.profits.size(); ++i)
        prow.push_back({static_cast<double>(i + 1), res.profits[i]});
    const std::string f2 = out_dir + "/fleet_profits.csv";
    io::write_csv(f2, "company,profit", prow);
    std::vector<std::string> files = {f1, f2};
    io::write_manifest(out_dir, config_dump(cfg), cfg.seed, files, times);
    return files;
}

std::vector<std::string> emit_horizon(const HorizonResult& res, const CaseStudyConfig& cfg,
                                      const std::string& out_dir, const WallTimes& times) {
    std::vector<std::vector<double>> loss_rows, control_rows, totals_rows;
    for (size_t h = 0; h < res.horizons.size(); ++h) {
        const RhgTrace& tr = res.traces[h];
        const double T = res.horizons[h];
        for (int s = 0; s < static_cast<int>(tr.steps.size()); ++s) {
            loss_rows.push_back({T, static_cast<double>(s), tr.per_step_loss[s]});
            const auto& rec = tr.steps[s];
            for (size_t i = 0; i < rec.inputs.size(); ++i) {
                const Vec& u = rec.inputs[i];
                const double phi = rec.evaluation.participations[i];
                for (int c = 0; c < u.size(); ++c)
                    control_rows.push_back({T, static_cast<double>(s),
                                            static_cast<double>(i + 1),
                                            static_cast<double>(c), u[c], phi});
            }
        }
        for (int i = 0; i < tr.realized_profit.size(); ++i)
            totals_rows.push_back({T, static_cast<double>(i + 1), tr.realized_profit[i],
                                   tr.per_step_loss.sum()});
    }
    const std::string f1 = out_dir + "/stage_loss.csv";
    const std::string f2 = out_dir + "/controls.csv";
    const std::string f3 = out_dir + "/horizon_totals.csv";
    io::write_csv(f1, "horizon,step,loss", loss_rows);
    io::write_csv(f2, "horizon,step,company,category,u,participation", control_rows);
    io::write_csv(f3, "horizon,company,total_profit,total_lost_profit", totals_rows);
    std::vector<std::string> files = {f1, f2, f3};
    io::write_manifest(out_dir, config_dump(cfg), cfg.seed, files, times);
    return files;
}

} // namespace tullock
