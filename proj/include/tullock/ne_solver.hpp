#pragma once

#include "tullock/game.hpp"

#include <optional>

namespace tullock {

struct SolverConfig {
    double gamma_bar = 1.0;  // initial step
    double eta = 0.5;        // step shrink per outer round, in (0,1)
    double tol = 1e-5;       // inner-loop and certificate tolerance
    int t_out = 20000;       // inner-loop iteration cap
    int max_outer = 40;      // outer-round safety cap
    double active_tol = 1e-7;
    bool warm_start = false; // optional mode: continue from the previous
                             // round's iterate instead of restarting at x0
    std::optional<unsigned long> random_init_seed; // random feasible x0

    void validate() const;
};

struct PlayerCertificate {
    Vec lambda_ineq;   // multipliers of the explicit inequality rows
    Vec lambda_nonneg; // multipliers of the implied nonnegativity rows
    Vec nu;            // equality multipliers
    double delta_star = 0.0;
};

struct OptimalityCertificate {
    std::vector<PlayerCertificate> players;
    double max_delta = 0.0;
};

struct SolveReport {
    JointStrategy strategy;
    OptimalityCertificate certificate;
    int outer_iterations = 0;
    long inner_iterations_total = 0;
    double final_step = 0.0;
    bool converged = false;
    double wall_time = 0.0;
};

/// Minimal stationarity residual over feasible KKT multipliers for the
/// quadratic/concave program whose minimization gradient at x is g:
/// min ||g + A_act' lambda - I_act mu + E' nu||^2 with lambda, mu >= 0 on
/// the active rows and nu free. Returns the exact minimum of this convex
/// program (nonnegative least squares underneath).
PlayerCertificate kkt_stationarity(const PlayerConstraints& c, const Vec& x, const Vec& g,
                                   double active_tol);

/// Best-response optimality test: delta*_i = 0 for every player iff x is a
/// Nash equilibrium. Throws SpecError when x violates a constraint row by
/// more than active_tol, naming the row.
OptimalityCertificate optimality_test(const GameSpec& spec, const JointStrategy& x,
                                      double active_tol = 1e-7);

/// Two-loop projected pseudo-gradient scheme: the outer loop shrinks the
/// step gamma = eta^l * gamma_bar and restarts, the inner loop applies the
/// synchronous per-player update x_i <- P_i[x_i + gamma grad u_i] until the
/// successive-iterate distance drops below tol or t_out is hit, after which
/// the optimality test decides termination.
SolveReport solve_ne(const GameSpec& spec, const SolverConfig& config = {},
                     const std::optional<JointStrategy>& x0 = std::nullopt);

} // namespace tullock
