#include "tullock/linalg.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace tullock::linalg {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
} // namespace

NnlsResult nnls(const Mat& A, const Vec& b, double tol, int max_iter) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m) throw SpecError("nnls: dimension mismatch");

    if (tol < 0.0) {
        const double scale_a = n > 0 ? A.cwiseAbs().maxCoeff() : 0.0;
        const double scale_b = m > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
        tol = 10.0 * kEps * std::max(m, n) * std::max(scale_a * std::max(1.0, scale_b), 1e-30);
    }
    if (max_iter < 0) max_iter = 3 * n + 30;

    NnlsResult out;
    out.x = Vec::Zero(n);
    out.iterations = 0;
    if (n == 0 || m == 0) {
        out.residual = -b;
        out.rss = b.squaredNorm();
        return out;
    }

    std::vector<bool> passive(n, false);
    std::vector<bool> banned(n, false);
    std::vector<int> pidx;

    Vec residual = b; // b - A*x with x = 0
    auto solve_passive = [&](Vec& z_full) {
        // least squares on the passive columns only
        Mat Ap(m, pidx.size());
        for (size_t c = 0; c < pidx.size(); ++c) Ap.col(c) = A.col(pidx[c]);
        Vec zp = Ap.colPivHouseholderQr().solve(b);
        z_full.setZero();
        for (size_t c = 0; c < pidx.size(); ++c) z_full[pidx[c]] = zp[c];
    };

    Vec z = Vec::Zero(n);
    while (out.iterations < max_iter) {
        Vec w = A.transpose() * residual;
        int j_new = -1;
        double w_best = tol;
        for (int j = 0; j < n; ++j) {
            if (!passive[j] && !banned[j] && w[j] > w_best) {
                w_best = w[j];
                j_new = j;
            }
        }
        if (j_new < 0) break; // dual feasible: optimal

        passive[j_new] = true;
        pidx.push_back(j_new);
        std::sort(pidx.begin(), pidx.end());

        bool first_solve = true;
        while (true) {
            ++out.iterations;
            solve_passive(z);
            if (first_solve && z[j_new] <= 0.0) {
                // rank-degenerate addition: retract and ban until the
                // passive set changes again
                passive[j_new] = false;
                pidx.erase(std::find(pidx.begin(), pidx.end(), j_new));
                banned[j_new] = true;
                break;
            }
            first_solve = false;

            double min_z = std::numeric_limits<double>::infinity();
            for (int j : pidx) min_z = std::min(min_z, z[j]);
            if (min_z > 0.0) {
                out.x = z;
                std::fill(banned.begin(), banned.end(), false);
                break;
            }

            double alpha = std::numeric_limits<double>::infinity();
            for (int j : pidx) {
                if (z[j] <= 0.0) {
                    double denom = out.x[j] - z[j];
                    double a = denom > 0.0 ? out.x[j] / denom : 0.0;
                    alpha = std::min(alpha, a);
                }
            }
            out.x += alpha * (z - out.x);
            for (auto it = pidx.begin(); it != pidx.end();) {
                int j = *it;
                if (out.x[j] <= 10.0 * kEps * std::abs(z[j]) + 1e-300) {
                    out.x[j] = 0.0;
                    passive[j] = false;
                    it = pidx.erase(it);
                } else {
                    ++it;
                }
            }
            if (out.iterations >= max_iter) break;
        }
        residual = b - A * out.x;
    }

    out.residual = A * out.x - b;
    out.rss = out.residual.squaredNorm();
    return out;
}

LdpResult ldp(const Mat& G, const Vec& h) {
    const int r = static_cast<int>(G.rows());
    const int n = static_cast<int>(G.cols());
    LdpResult out;
    if (r == 0) {
        out.z = Vec::Zero(n);
        out.feasible = true;
        return out;
    }

    // row equilibration keeps the feasibility decision scale-free
    Mat Gs = G;
    Vec hs = h;
    for (int i = 0; i < r; ++i) {
        double s = std::max(G.row(i).norm(), std::abs(h[i]));
        if (s > 0.0) {
            Gs.row(i) /= s;
            hs[i] /= s;
        }
    }

    Mat E(n + 1, r);
    E.topRows(n) = Gs.transpose();
    E.row(n) = hs.transpose();
    Vec f = Vec::Zero(n + 1);
    f[n] = 1.0;

    NnlsResult nn = nnls(E, f);
    const double rss = nn.rss;
    if (rss <= 1e-13) {
        out.z = Vec::Zero(n);
        out.feasible = false;
        return out;
    }
    out.feasible = true;
    out.z = Vec(n);
    const double denom = nn.residual[n];
    for (int j = 0; j < n; ++j) out.z[j] = -nn.residual[j] / denom;
    return out;
}

LpResult solve_lp(const Vec& c, const Mat& A_iq, const Vec& b_iq, const Mat& A_eq,
                  const Vec& b_eq) {
    const int n = static_cast<int>(c.size());
    const int miq = static_cast<int>(A_iq.rows());
    const int meq = static_cast<int>(A_eq.rows());
    const int m = miq + meq;

    // columns: n structural + miq slacks + m artificials
    const int n_slack = miq;
    const int n_art = m;
    const int ncols = n + n_slack + n_art;

    Mat T(m, ncols);
    Vec rhs(m);
    T.setZero();
    for (int i = 0; i < miq; ++i) {
        T.block(i, 0, 1, n) = A_iq.row(i);
        T(i, n + i) = 1.0;
        rhs[i] = b_iq[i];
    }
    for (int i = 0; i < meq; ++i) {
        T.block(miq + i, 0, 1, n) = A_eq.row(i);
        rhs[miq + i] = b_eq[i];
    }
    for (int i = 0; i < m; ++i) {
        if (rhs[i] < 0.0) {
            T.row(i) = -T.row(i);
            rhs[i] = -rhs[i];
        }
        T(i, n + n_slack + i) = 1.0;
    }

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + n_slack + i;

    const double piv_tol = 1e-11;
    auto run_simplex = [&](const Vec& obj, int allowed_cols) -> bool {
        // Bland's rule; returns false on unboundedness
        for (int guard = 0; guard < 20000; ++guard) {
            Vec y(m);
            for (int i = 0; i < m; ++i) y[i] = obj[basis[i]];
            Vec red = obj - T.transpose() * y; // reduced costs (maximization)
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                bool in_basis = std::find(basis.begin(), basis.end(), j) != basis.end();
                if (!in_basis && red[j] > 1e-9) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (T(i, enter) > piv_tol) {
                    double ratio = rhs[i] / T(i, enter);
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false; // unbounded direction
            double p = T(leave, enter);
            T.row(leave) /= p;
            rhs[leave] /= p;
            for (int i = 0; i < m; ++i) {
                if (i != leave && std::abs(T(i, enter)) > 0.0) {
                    double f = T(i, enter);
                    T.row(i) -= f * T.row(leave);
                    rhs[i] -= f * rhs[leave];
                }
            }
            basis[leave] = enter;
        }
        throw NumericalError("simplex: iteration guard exceeded");
    };

    // phase 1: drive artificials to zero
    Vec obj1 = Vec::Zero(ncols);
    for (int i = 0; i < n_art; ++i) obj1[n + n_slack + i] = -1.0;
    run_simplex(obj1, ncols);
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n + n_slack) art_sum += rhs[i];
    LpResult out;
    if (art_sum > 1e-8) {
        out.status = LpStatus::Infeasible;
        out.objective = 0.0;
        out.x = Vec::Zero(n);
        return out;
    }
    // pivot residual zero-level artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n + n_slack) {
            int enter = -1;
            for (int j = 0; j < n + n_slack; ++j) {
                if (std::abs(T(i, j)) > piv_tol &&
                    std::find(basis.begin(), basis.end(), j) == basis.end()) {
                    enter = j;
                    break;
                }
            }
            if (enter >= 0) {
                double p = T(i, enter);
                T.row(i) /= p;
                rhs[i] /= p;
                for (int k = 0; k < m; ++k) {
                    if (k != i) {
                        double f = T(k, enter);
                        T.row(k) -= f * T.row(i);
                        rhs[k] -= f * rhs[i];
                    }
                }
                basis[i] = enter;
            }
        }
    }

    // phase 2 on the true objective; artificial columns stay banned
    Vec obj2 = Vec::Zero(ncols);
    obj2.head(n) = c;
    bool bounded = run_simplex(obj2, n + n_slack);
    out.x = Vec::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) out.x[basis[i]] = rhs[i];
    out.objective = c.dot(out.x);
    out.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
    return out;
}

Mat null_space_basis(const Mat& A) {
    const int n = static_cast<int>(A.cols());
    if (A.rows() == 0) return Mat::Identity(n, n);
    Eigen::ColPivHouseholderQR<Mat> qr(A.transpose());
    const int rank = static_cast<int>(qr.rank());
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    return Q.rightCols(n - rank);
}

} // namespace tullock::linalg
