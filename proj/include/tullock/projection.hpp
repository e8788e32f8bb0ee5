#pragma once

#include "tullock/game.hpp"

namespace tullock {

/// Exact Euclidean projection onto the scaled probability simplex
/// {x >= 0, 1'x = budget} by the sort-and-threshold rule.
Vec project_simplex(const Vec& target, double budget);

/// Reusable projector onto one player's polytope. Construction factors the
/// equality rows once; each call then reduces to a least-distance problem in
/// the null-space coordinates. A budget-simplex pattern (single all-ones
/// equality row, no inequality rows) is detected and dispatched to the
/// closed-form path.
class PolytopeProjector {
public:
    PolytopeProjector(const PlayerConstraints& c, int dim);

    Vec operator()(const Vec& target) const;

    bool simplex_fast_path() const { return simplex_; }

private:
    int dim_;
    bool simplex_ = false;
    double budget_ = 0.0;
    Vec y_particular_; // one solution of the equality rows
    Mat Z_;            // orthonormal null-space basis of the equality rows
    Mat G_;            // reduced inequality system G q >= h_base - G q0
    Vec h_base_;
};

/// One-shot projection of target onto the set described by c.
Vec project(const PlayerConstraints& c, int dim, const Vec& target);

} // namespace tullock
