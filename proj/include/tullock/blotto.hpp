#pragma once

#include "tullock/game.hpp"
#include "tullock/ne_solver.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tullock {

/// Budget-split game: each player spreads a fixed budget across K
/// battlefields with lossy Tullock payoffs and linear unit costs.
struct BlottoSpec {
    Vec budgets;    // N, > 0
    Vec prizes;     // K, >= 0
    Vec unit_costs; // K (real)
    Vec fictitious; // K, > 0

    int n_players() const { return static_cast<int>(budgets.size()); }
    int n_battlefields() const { return static_cast<int>(prizes.size()); }
    void validate() const;
};

/// Set of (player, battlefield) pairs pinned to zero. Feasible iff no
/// player has every battlefield zeroed.
struct Configuration {
    std::vector<std::pair<int, int>> zero_set; // sorted lexicographically
    std::vector<int> participants;             // n_k per battlefield
    std::vector<std::vector<int>> zeroed_per_player;

    static std::optional<Configuration> make(std::vector<std::pair<int, int>> pairs, int n_players,
                                             int n_battlefields);
    bool contains(int player, int battlefield) const;
};

struct BlottoSolution {
    Mat strategy; // N x K
    Configuration configuration;
    Vec t_bar;          // K, participation totals shifted by epsilon
    Vec nu;             // N, budget multipliers
    double t_nu_root = 0.0;
    bool verified = false;
    long f_evaluations = 0;     // root-function evaluations spent
    int configurations_tried = 0;
};

/// Aggregated stationarity function whose unique zero on the positive
/// bracket pins down the equilibrium totals; battlefields with no
/// participants contribute nothing.
double f_tilde(double t, const Configuration& cfg, const BlottoSpec& spec);

/// Deterministic safeguarded secant/bisection root of f_tilde on
/// (max_k -n_k beta_k, infinity); residual tolerance 1e-12 relative to the
/// budget scale.
double find_root(const Configuration& cfg, const BlottoSpec& spec, long* eval_count = nullptr);

/// Candidate equilibrium for one configuration by back-substitution.
/// Returns nothing when the candidate violates nonnegativity, budget sums,
/// or the stationarity certificate (max delta* < 1e-6). Root-function
/// evaluations are added to *eval_count when given, also on rejection.
std::optional<BlottoSolution> solve_configuration(const Configuration& cfg,
                                                  const BlottoSpec& spec, const GameSpec& bridge,
                                                  long* eval_count = nullptr);

/// Enumerates configurations by |zero set| ascending then lexicographically,
/// returning the first certified candidate (unique by the equilibrium
/// uniqueness of this game class).
BlottoSolution solve_semi_analytical(const BlottoSpec& spec, long max_configurations = 1000000);

/// Equivalent general-form game (m = 1, unit weight, linear costs, one
/// budget equality row per player).
GameSpec to_game_spec(const BlottoSpec& spec);

struct BenchmarkReport {
    double semi_seconds = 0.0;
    double iterative_seconds = 0.0;
    long semi_evaluations = 0;
    long iterative_inner_steps = 0;
    double agreement_inf_norm = 0.0;
    bool iterative_converged = false;
};

/// Runs both solvers on the same spec and reports wall times, work counters
/// and the disagreement norm.
BenchmarkReport benchmark_methods(const BlottoSpec& spec, const SolverConfig& config);

} // namespace tullock
