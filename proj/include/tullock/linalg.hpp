#pragma once

#include "tullock/types.hpp"

namespace tullock::linalg {

struct NnlsResult {
    Vec x;              // minimizer, x >= 0
    Vec residual;       // A*x - b
    double rss;         // squared residual norm
    int iterations;
};

/// Lawson-Hanson active-set solver for min ||A*x - b||^2 s.t. x >= 0.
/// Deterministic: ties in the dual selection go to the lowest column index.
NnlsResult nnls(const Mat& A, const Vec& b, double tol = -1.0, int max_iter = -1);

struct LdpResult {
    Vec z;          // minimizer of ||z|| s.t. G*z >= h
    bool feasible;
};

/// Least-distance problem min ||z|| s.t. G*z >= h, solved through the
/// classic NNLS reduction. Infeasibility is detected from a vanishing
/// NNLS residual.
LdpResult ldp(const Mat& G, const Vec& h);

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status;
    Vec x;
    double objective;
};

/// Two-phase dense simplex with Bland's rule for
///   max c'x  s.t.  A_iq x <= b_iq, A_eq x = b_eq, x >= 0.
/// Intended for the small load-time feasibility/boundedness checks;
/// Bland pivoting keeps it deterministic and cycle-free.
LpResult solve_lp(const Vec& c, const Mat& A_iq, const Vec& b_iq, const Mat& A_eq,
                  const Vec& b_eq);

/// Orthonormal basis of the null space of A (columns). Empty matrix when
/// A has full column rank.
Mat null_space_basis(const Mat& A);

} // namespace tullock::linalg
