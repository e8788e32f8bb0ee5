#pragma once

#include "tullock/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace tullock {

/// Per-stage linear participation cost beta_k * 1'x_{i,k}.
struct LinearCost {
    Vec betas; // length K
};

/// Per-stage dynamic-price cost x'(alpha_k * sum_j x_j + r_k). The optional
/// 0/1 mask restricts the price-coupled part to a subset of categories
/// (the horizon-game reduction prices only the control slots); an empty
/// mask means all categories.
struct DynamicPriceCost {
    Vec alphas; // length K, > 0
    Mat r;      // K x m
    Vec mask;   // length m, entries in {0,1}; empty = all ones
};

using CostModel = std::variant<LinearCost, DynamicPriceCost>;

/// Polytopic feasible set {x in R^d_+ | ineq_A x <= ineq_b, eq_A x = eq_b}.
/// Nonnegativity is always implied and not part of the rows.
struct PlayerConstraints {
    Mat ineq_A;
    Vec ineq_b;
    Mat eq_A;
    Vec eq_b;

    int n_ineq() const { return static_cast<int>(ineq_A.rows()); }
    int n_eq() const { return static_cast<int>(eq_A.rows()); }
};

/// Load-time geometry of a feasible set: coordinate bounds, the best
/// uniform interior margin, and a deep feasible point.
struct ConstraintGeometry {
    Vec lower;
    Vec upper;
    double slater_slack = 0.0; // max-min slack over the inequality rows
    Vec interior_point;        // max-min slack point over all rows
};

/// Full description of a K-stage, N-player game with lossy Tullock stage
/// payoffs: shared affine participations phi = w'x, prizes W_k, fictitious
/// participations eps_k and one of the two cost models.
struct GameSpec {
    int n_players = 0;
    int n_stages = 0;
    int n_categories = 0;
    Vec stage_prizes;               // K, >= 0
    Vec fictitious_participations;  // K, > 0
    Vec participation_weights;      // m, >= 0, ||w|| > 0
    CostModel cost;
    std::vector<PlayerConstraints> constraints; // N entries

    int dim() const { return n_stages * n_categories; }

    /// Structural validation (dimensions, parameter signs). Throws SpecError.
    void validate() const;

    /// Effective mask vector for the dynamic-price model (all ones when unset).
    Vec cost_mask() const;
};

/// Concatenated per-player allocations.
struct JointStrategy {
    std::vector<Vec> per_player;

    static JointStrategy zeros(int n_players, int dim);
    double at(int player, int stage, int category, int m) const {
        return per_player[player][stage * m + category];
    }
    Vec stacked() const;
    static JointStrategy from_stacked(const Vec& v, int n_players, int dim);
    int n_players() const { return static_cast<int>(per_player.size()); }
};

/// All stage-k quantities in one pass: participations, payoffs, the
/// forfeited loss and participation costs.
struct StageEvaluation {
    Vec participations;         // N
    double total_participation; // Phi
    Vec payoffs;                // N
    double loss;                // Psi_k
    Vec costs;                  // N
};

StageEvaluation evaluate_stage(const GameSpec& spec, const JointStrategy& x, int k);

double total_profit(const GameSpec& spec, const JointStrategy& x, int player);

/// Analytic gradient of player i's total profit with respect to x_i.
Vec profit_gradient(const GameSpec& spec, const JointStrategy& x, int player);

/// Gradient of player i's profit with respect to opponent q's block
/// (needed by the centralized log-utility objective).
Vec profit_cross_gradient(const GameSpec& spec, const JointStrategy& x, int player, int other);

/// Stacked negated profit gradients col(-grad u_i)_i.
Vec pseudo_gradient(const GameSpec& spec, const JointStrategy& x);

/// Solves the bounding/feasibility/Slater programs for one player's set.
/// Throws InfeasibleError when the set is empty, unbounded, or (when
/// require_strict_slack is set and inequality rows exist) admits no strictly
/// feasible point. Lifted horizon-game polytopes legitimately contain rows
/// pinned at zero slack, so that path skips the strictness requirement.
ConstraintGeometry analyze_constraints(const PlayerConstraints& c, int dim,
                                       bool require_strict_slack = true);

} // namespace tullock
