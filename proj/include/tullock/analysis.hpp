#pragma once

#include "tullock/game.hpp"

#include <optional>

namespace tullock {

enum class UniquenessVerdict { AnalyticallyUnique, SampledPass, Falsified };

struct UniquenessReport {
    UniquenessVerdict verdict = UniquenessVerdict::Falsified;
    std::optional<JointStrategy> witness; // point where the matrix test fails
    double min_eigenvalue_seen = 0.0;     // smallest eigenvalue of the negated
                                          // test matrix across all samples
    int samples_checked = 0;
};

/// True iff the spec belongs to the class with a unique equilibrium by
/// construction: shared affine participations together with either a
/// dynamic-price cost (alpha_k > 0, every category touched by the weights
/// or the price mask) or the single-category unit-weight linear-cost form
/// used by the budget-split reduction.
bool check_prop3_class(const GameSpec& spec);

struct ConcavityResult {
    Mat matrix; // m x m stage curvature block of player i's profit
    bool negative_semidefinite = false;
};

/// Stage concavity block f2 * ww' - d2c/dx2 (the affine participation has no
/// second derivative); NSD is decided by the largest eigenvalue against 1e-10.
ConcavityResult concavity_condition(const GameSpec& spec, const JointStrategy& x, int player,
                                    int k);

/// Symmetry of the mixed second derivatives of player p's profit against
/// player q at stage k, elementwise within 1e-12.
bool commutativity_check(const GameSpec& spec, const JointStrategy& x, int p, int q, int k);

/// Variant with explicit per-player participation weights; lets tests probe
/// configurations the spec type itself cannot represent.
bool commutativity_check_weights(const GameSpec& spec, const JointStrategy& x, int p, int q,
                                 int k, const Vec& w_p, const Vec& w_q);

/// Assembled sufficient-condition matrix M - sum_i H^i - Hess(C + sum Psi).
Mat assemble_uniqueness_matrix(const GameSpec& spec, const JointStrategy& x);

/// The same matrix assembled independently blockwise as G + G'.
Mat assemble_game_jacobian_sym(const GameSpec& spec, const JointStrategy& x);

/// Extended Hessian of u_i in the opponents' variables, embedded at full
/// dimension with zero blocks in player i's row/column.
Mat extended_hessian(const GameSpec& spec, const JointStrategy& x, int player);

/// Hessian of u_i with respect to x_{-i} at compact (N-1)Km dimension.
Mat opponent_hessian(const GameSpec& spec, const JointStrategy& x, int player);

/// Hessian of the aggregate stage loss sum_k Psi_k.
Mat loss_hessian(const GameSpec& spec, const JointStrategy& x);

/// Three-valued uniqueness verdict. The analytic class short-circuits;
/// otherwise sample_count feasible points are drawn (seeded box sampling
/// projected onto the feasible sets) and the matrix condition is checked at
/// each. A sampled pass is evidence, not a proof of the universal condition.
UniquenessReport uniqueness_test(const GameSpec& spec, int sample_count, unsigned long seed,
                                 bool force_sampling = false);

} // namespace tullock
