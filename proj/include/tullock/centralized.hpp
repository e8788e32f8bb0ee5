#pragma once

#include "tullock/game.hpp"

#include <optional>

namespace tullock {

enum class CentralizedKind { SystemOptimum, ProportionalFair };

struct CentralizedSolution {
    JointStrategy strategy;
    double objective_value = 0.0;
    CentralizedKind kind = CentralizedKind::SystemOptimum;
    double kkt_residual = 0.0; // projected-gradient norm at the returned point
    bool converged = false;
    long iterations = 0;
};

struct CentralizedConfig {
    double step = 1.0;
    double tol = 1e-8; // relative projected-gradient residual target
    long max_iterations = 200000;
    double shrink = 0.5;
    int max_restarts = 8;        // seeded restarts when profits start nonpositive
    unsigned long seed = 20240u; // restart seed
};

/// Maximizes -(total loss) - (total participation cost) over the product of
/// the players' feasible sets by backtracking projected-gradient ascent.
CentralizedSolution solve_system_optimum(const GameSpec& spec, const CentralizedConfig& = {});

/// Maximizes the sum of log-profits; steps that drive any profit below the
/// positivity floor are rejected by the backtracking rule. Throws DomainError
/// when no starting point with positive profits can be found.
CentralizedSolution solve_proportional_fair(const GameSpec& spec, const CentralizedConfig& = {},
                                            const std::optional<JointStrategy>& init = {});

/// Sum of the players' total profits.
double welfare(const GameSpec& spec, const JointStrategy& x);

/// Welfare ratio of the system optimum over the equilibrium; requires
/// positive equilibrium welfare.
double price_of_anarchy(const GameSpec& spec, const JointStrategy& so, const JointStrategy& ne);

} // namespace tullock
