#include "tullock/projection.hpp"

#include "tullock/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace tullock {

Vec project_simplex(const Vec& target, double budget) {
    if (!(budget > 0.0)) throw DomainError("project_simplex: budget must be positive");
    const int n = static_cast<int>(target.size());
    std::vector<double> u(target.data(), target.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    int rho = 0;
    for (int j = 0; j < n; ++j) {
        cum += u[j];
        double t = (cum - budget) / (j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            tau = t;
        }
    }
    (void)rho;
    return (target.array() - tau).cwiseMax(0.0);
}

namespace {

bool is_budget_simplex(const PlayerConstraints& c, int dim, double* budget) {
    if (c.n_ineq() != 0 || c.n_eq() != 1) return false;
    for (int j = 0; j < dim; ++j)
        if (std::abs(c.eq_A(0, j) - 1.0) > 0.0) return false;
    if (!(c.eq_b[0] > 0.0)) return false;
    *budget = c.eq_b[0];
    return true;
}

} // namespace

PolytopeProjector::PolytopeProjector(const PlayerConstraints& c, int dim) : dim_(dim) {
    if (is_budget_simplex(c, dim, &budget_)) {
        simplex_ = true;
        return;
    }

    if (c.n_eq() > 0) {
        // minimum-norm solution of the equality rows; a large residual means
        // the rows are mutually inconsistent
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(c.eq_A);
        y_particular_ = cod.solve(c.eq_b);
        if ((c.eq_A * y_particular_ - c.eq_b).cwiseAbs().maxCoeff() >
            1e-9 * std::max(1.0, c.eq_b.cwiseAbs().maxCoeff()))
            throw InfeasibleError("projection: equality rows are inconsistent");
        Z_ = linalg::null_space_basis(c.eq_A);
    } else {
        y_particular_ = Vec::Zero(dim);
        Z_ = Mat::Identity(dim, dim);
    }

    const int nz = static_cast<int>(Z_.cols());
    const int miq = c.n_ineq();
    // rows: -A x >= -b  and  x >= 0, expressed in null-space coordinates
    G_.resize(miq + dim, nz);
    h_base_.resize(miq + dim);
    if (miq > 0) {
        G_.topRows(miq) = -c.ineq_A * Z_;
        h_base_.head(miq) = c.ineq_A * y_particular_ - c.ineq_b;
    }
    G_.bottomRows(dim) = Z_;
    h_base_.tail(dim) = -y_particular_;
}

Vec PolytopeProjector::operator()(const Vec& target) const {
    if (simplex_) return project_simplex(target, budget_);
    if (target.size() != dim_) throw SpecError("projection: target has wrong dimension");

    if (Z_.cols() == 0) {
        // singleton affine set
        Vec y = y_particular_;
        if ((y.array() < -1e-9).any())
            throw InfeasibleError("projection: equality rows force negative coordinates");
        return y;
    }

    const Vec q0 = Z_.transpose() * (target - y_particular_);
    linalg::LdpResult res = linalg::ldp(G_, h_base_ - G_ * q0);
    if (!res.feasible) throw InfeasibleError("projection: feasible set is empty");
    Vec y = y_particular_ + Z_ * (q0 + res.z);
    // rounding in the least-distance solve can leave coordinates a few ulp
    // below zero; snap those without disturbing genuine violations
    for (int j = 0; j < y.size(); ++j)
        if (y[j] < 0.0 && y[j] > -1e-12) y[j] = 0.0;
    return y;
}

Vec project(const PlayerConstraints& c, int dim, const Vec& target) {
    return PolytopeProjector(c, dim)(target);
}

} // namespace tullock
