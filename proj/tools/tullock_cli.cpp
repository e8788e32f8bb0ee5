#include "tullock/analysis.hpp"
#include "tullock/case_study.hpp"
#include "tullock/centralized.hpp"
#include "tullock/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

namespace {

using namespace tullock;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;  // bad arguments, unreadable or invalid spec
constexpr int kExitSolver = 3; // numerical failure or non-convergence
constexpr int kExitIo = 4;     // output write failure

struct CommonOpts {
    std::string spec_path;
    std::string out_dir = "out";
    unsigned long seed = 20240u;
    SolverConfig solver;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_spec) {
    if (needs_spec) cmd->add_option("--spec", o.spec_path, "input spec file")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--tol", o.solver.tol, "solver tolerance");
    cmd->add_option("--gamma-bar", o.solver.gamma_bar, "initial step size");
    cmd->add_option("--eta", o.solver.eta, "step shrink factor");
    cmd->add_option("--t-out", o.solver.t_out, "inner-loop iteration cap");
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

int cmd_solve_ne(const CommonOpts& o) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    f.game.validate();
    SolveReport rep = solve_ne(f.game, o.solver);
    ensure_dir(o.out_dir);
    const std::string sol_path = o.out_dir + "/solution.json";
    io::write_text(sol_path, io::solve_report_to_json(rep).dump(2) + "\n");
    io::write_manifest(o.out_dir, io::read_text(o.spec_path), o.seed, {sol_path},
                       {{"solve", rep.wall_time}});
    std::cout << (rep.converged ? "converged" : "NOT converged") << ", max delta* = "
              << rep.certificate.max_delta << ", inner iterations = "
              << rep.inner_iterations_total << "\n";
    return rep.converged ? kExitOk : kExitSolver;
}

int cmd_solve_blotto(const CommonOpts& o, double theta) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    if (!f.blotto) throw SpecError("spec file has no blotto section: " + o.spec_path);
    BlottoSpec spec = *f.blotto;
    spec.unit_costs *= theta;
    BlottoSolution sol = solve_semi_analytical(spec);
    ensure_dir(o.out_dir);
    const std::string sol_path = o.out_dir + "/solution.json";
    io::write_text(sol_path, io::blotto_solution_to_json(sol).dump(2) + "\n");
    io::write_manifest(o.out_dir, io::read_text(o.spec_path) + std::to_string(theta), o.seed,
                       {sol_path}, {});
    std::cout << "certified equilibrium after " << sol.configurations_tried
              << " configuration(s)\n";
    return kExitOk;
}

int cmd_centralized(const CommonOpts& o, bool fair) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    f.game.validate();
    CentralizedConfig cc;
    cc.tol = o.solver.tol;
    cc.seed = o.seed;
    CentralizedSolution sol =
        fair ? solve_proportional_fair(f.game, cc) : solve_system_optimum(f.game, cc);
    ensure_dir(o.out_dir);
    io::json j = {{"type", fair ? "proportional_fair" : "system_optimum"},
                  {"converged", sol.converged},
                  {"objective", sol.objective_value},
                  {"kkt_residual", sol.kkt_residual},
                  {"strategy", io::strategy_to_json(sol.strategy)},
                  {"welfare", welfare(f.game, sol.strategy)}};
    const std::string sol_path = o.out_dir + "/solution.json";
    io::write_text(sol_path, j.dump(2) + "\n");
    io::write_manifest(o.out_dir, io::read_text(o.spec_path), o.seed, {sol_path}, {});
    std::cout << "objective = " << sol.objective_value
              << ", residual = " << sol.kkt_residual << "\n";
    return sol.converged ? kExitOk : kExitSolver;
}

int cmd_check_unique(const CommonOpts& o, int samples) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    f.game.validate();
    UniquenessReport rep = uniqueness_test(f.game, samples, o.seed);
    const char* verdict = rep.verdict == UniquenessVerdict::AnalyticallyUnique
                              ? "analytically-unique"
                          : rep.verdict == UniquenessVerdict::SampledPass ? "sampled-pass"
                                                                          : "falsified";
    ensure_dir(o.out_dir);
    io::json j = {{"verdict", verdict},
                  {"samples_checked", rep.samples_checked},
                  {"min_eigenvalue_seen", rep.min_eigenvalue_seen}};
    if (rep.witness) j["witness"] = io::strategy_to_json(*rep.witness);
    io::write_text(o.out_dir + "/uniqueness.json", j.dump(2) + "\n");
    std::cout << verdict << "\n";
    return kExitOk;
}

int cmd_run_rhg(const CommonOpts& o, int horizon_override) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    if (!f.rhg_players) throw SpecError("spec file has no rhg section: " + o.spec_path);
    const int T = horizon_override > 0 ? horizon_override : f.rhg_horizon;
    RhgTrace tr = run_receding_horizon(*f.rhg_players, *f.rhg_market, T, o.solver);
    ensure_dir(o.out_dir);
    std::vector<std::vector<double>> rows;
    for (size_t s = 0; s < tr.steps.size(); ++s) {
        for (size_t i = 0; i < tr.steps[s].inputs.size(); ++i) {
            const auto& rec = tr.steps[s];
            rows.push_back({static_cast<double>(s), static_cast<double>(i + 1),
                            rec.evaluation.participations[i], rec.evaluation.payoffs[i],
                            rec.evaluation.costs[i], tr.per_step_loss[s]});
        }
    }
    const std::string f1 = o.out_dir + "/trace.csv";
    io::write_csv(f1, "step,company,participation,payoff,cost,stage_loss", rows);
    io::write_manifest(o.out_dir, io::read_text(o.spec_path), o.seed, {f1}, {});
    if (tr.aborted) {
        std::cerr << "trace aborted: " << tr.abort_reason << "\n";
        return kExitSolver;
    }
    std::cout << "rollout complete, total lost profit = " << tr.per_step_loss.sum() << "\n";
    return kExitOk;
}

int cmd_benchmark(const CommonOpts& o) {
    io::SpecFile f = io::load_spec_file(o.spec_path);
    if (!f.blotto) throw SpecError("spec file has no blotto section: " + o.spec_path);
    BenchmarkReport rep = benchmark_methods(*f.blotto, o.solver);
    ensure_dir(o.out_dir);
    io::json j = {{"semi_seconds", rep.semi_seconds},
                  {"iterative_seconds", rep.iterative_seconds},
                  {"semi_evaluations", rep.semi_evaluations},
                  {"iterative_inner_steps", rep.iterative_inner_steps},
                  {"agreement_inf_norm", rep.agreement_inf_norm},
                  {"iterative_converged", rep.iterative_converged}};
    io::write_text(o.out_dir + "/benchmark.json", j.dump(2) + "\n");
    std::cout << "semi: " << rep.semi_seconds << " s (" << rep.semi_evaluations
              << " evals), iterative: " << rep.iterative_seconds << " s ("
              << rep.iterative_inner_steps << " inner steps), disagreement = "
              << rep.agreement_inf_norm << "\n";
    return kExitOk;
}

int cmd_case_study(const std::string& which, const CaseStudyConfig& cfg,
                   const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (which == "poa") {
        auto rows = run_poa_sweep(cfg);
        emit_poa(rows, cfg, out_dir, {{"sweep", elapsed()}});
    } else if (which == "fleet") {
        FleetResult res = run_fleet(cfg);
        emit_fleet(res, cfg, out_dir, {{"fleet", elapsed()}});
        std::cout << "region-1 allocations: ";
        for (int i = 0; i < res.alloc_semi.rows(); ++i)
            std::cout << res.alloc_semi(i, 0) << (i + 1 < res.alloc_semi.rows() ? ", " : "\n");
    } else if (which == "horizon") {
        HorizonResult res = run_horizon(cfg);
        emit_horizon(res, cfg, out_dir, {{"horizon", elapsed()}});
        for (size_t h = 0; h < res.horizons.size(); ++h)
            std::cout << "T=" << res.horizons[h]
                      << ": total lost profit = " << res.traces[h].per_step_loss.sum() << "\n";
    } else {
        throw SpecError("unknown case-study variant: " + which);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-stage lossy Tullock market games: equilibrium and welfare toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    double theta = 1.0;
    int samples = 50;
    int horizon = 0;
    std::string variant;
    CaseStudyConfig cs;

    auto* ne = app.add_subcommand("solve-ne", "iterative equilibrium of a general spec");
    add_common(ne, o, true);
    auto* bl = app.add_subcommand("solve-blotto", "semi-analytical budget-split equilibrium");
    add_common(bl, o, true);
    bl->add_option("--theta", theta, "unit-cost scaling factor");
    auto* so = app.add_subcommand("solve-so", "system-optimal joint strategy");
    add_common(so, o, true);
    auto* pf = app.add_subcommand("solve-pf", "proportionally fair joint strategy");
    add_common(pf, o, true);
    auto* cu = app.add_subcommand("check-unique", "equilibrium uniqueness verdict");
    add_common(cu, o, true);
    cu->add_option("--samples", samples, "sample count for the matrix test");
    auto* rh = app.add_subcommand("run-rhg", "receding-horizon rollout");
    add_common(rh, o, true);
    rh->add_option("--horizon", horizon, "override the planning horizon");
    auto* bm = app.add_subcommand("benchmark", "compare both equilibrium methods");
    add_common(bm, o, true);
    auto* csc = app.add_subcommand("case-study", "built-in two-level ride-hailing study");
    csc->add_option("variant", variant, "poa | fleet | horizon")->required();
    csc->add_option("--out", o.out_dir, "output directory");
    csc->add_option("--seed", o.seed, "random seed");
    csc->add_option("--theta", cs.theta, "unit-cost scaling factor");
    csc->add_option("--theta-grid", cs.theta_grid, "number of theta grid points");
    csc->add_option("--epsilon", cs.blotto_epsilon, "upper-level fictitious participation");
    csc->add_option("--tol", cs.solver.tol, "solver tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ne->parsed()) return cmd_solve_ne(o);
        if (bl->parsed()) return cmd_solve_blotto(o, theta);
        if (so->parsed()) return cmd_centralized(o, false);
        if (pf->parsed()) return cmd_centralized(o, true);
        if (cu->parsed()) return cmd_check_unique(o, samples);
        if (rh->parsed()) return cmd_run_rhg(o, horizon);
        if (bm->parsed()) return cmd_benchmark(o);
        if (csc->parsed()) {
            cs.seed = o.seed;
            return cmd_case_study(variant, cs, o.out_dir);
        }
    } catch (const tullock::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tullock::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tullock::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const tullock::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
