#include "tullock/ne_solver.hpp"

#include "tullock/linalg.hpp"
#include "tullock/projection.hpp"

#include <chrono>
#include <random>

namespace tullock {

void SolverConfig::validate() const {
    if (!(eta > 0.0 && eta < 1.0)) throw SpecError("solver: eta must lie in (0,1)");
    if (!(tol > 0.0)) throw SpecError("solver: tol must be positive");
    if (t_out < 1) throw SpecError("solver: t_out must be >= 1");
    if (!(gamma_bar > 0.0)) throw SpecError("solver: gamma_bar must be positive");
    if (max_outer < 1) throw SpecError("solver: max_outer must be >= 1");
    if (!(active_tol > 0.0)) throw SpecError("solver: active_tol must be positive");
}

PlayerCertificate kkt_stationarity(const PlayerConstraints& c, const Vec& x, const Vec& g,
                                   double active_tol) {
    const int dim = static_cast<int>(x.size());
    std::vector<int> act_ineq, act_nonneg;
    for (int r = 0; r < c.n_ineq(); ++r)
        if (c.ineq_A.row(r).dot(x) - c.ineq_b[r] >= -active_tol) act_ineq.push_back(r);
    for (int j = 0; j < dim; ++j)
        if (x[j] <= active_tol) act_nonneg.push_back(j);

    const int n_nn = static_cast<int>(act_ineq.size() + act_nonneg.size());
    Mat M1(dim, n_nn);
    for (size_t k = 0; k < act_ineq.size(); ++k) M1.col(k) = c.ineq_A.row(act_ineq[k]).transpose();
    for (size_t k = 0; k < act_nonneg.size(); ++k) {
        Vec e = Vec::Zero(dim);
        e[act_nonneg[k]] = -1.0;
        M1.col(act_ineq.size() + k) = e;
    }

    PlayerCertificate cert;
    cert.lambda_ineq = Vec::Zero(c.n_ineq());
    cert.lambda_nonneg = Vec::Zero(dim);
    cert.nu = Vec::Zero(c.n_eq());

    Vec residual;
    Vec z = Vec::Zero(n_nn);
    if (c.n_eq() > 0) {
        const Mat M2 = c.eq_A.transpose(); // dim x m_eq
        Eigen::ColPivHouseholderQR<Mat> qr(M2);
        const int rank = static_cast<int>(qr.rank());
        Mat Q = qr.householderQ() * Mat::Identity(dim, dim);
        Mat Q1 = Q.leftCols(rank);
        auto perp = [&](const Vec& v) { return Vec(v - Q1 * (Q1.transpose() * v)); };

        Mat M1p(dim, n_nn);
        for (int k = 0; k < n_nn; ++k) M1p.col(k) = perp(M1.col(k));
        if (n_nn > 0) z = linalg::nnls(M1p, -perp(g)).x;
        Vec target = -g - (n_nn > 0 ? Vec(M1 * z) : Vec(Vec::Zero(dim)));
        cert.nu = M2.completeOrthogonalDecomposition().solve(target);
        residual = g + (n_nn > 0 ? Vec(M1 * z) : Vec(Vec::Zero(dim))) + M2 * cert.nu;
    } else {
        if (n_nn > 0) {
            z = linalg::nnls(M1, -g).x;
            residual = g + M1 * z;
        } else {
            residual = g;
        }
    }

    for (size_t k = 0; k < act_ineq.size(); ++k) cert.lambda_ineq[act_ineq[k]] = z[k];
    for (size_t k = 0; k < act_nonneg.size(); ++k)
        cert.lambda_nonneg[act_nonneg[k]] = z[act_ineq.size() + k];
    cert.delta_star = residual.squaredNorm();
    return cert;
}

namespace {

// first constraint row violated beyond tol, if any
std::optional<std::string> feasibility_violation(const PlayerConstraints& c, const Vec& x,
                                                 double tol, int player) {
    for (int r = 0; r < c.n_ineq(); ++r)
        if (c.ineq_A.row(r).dot(x) - c.ineq_b[r] > tol)
            return "player " + std::to_string(player) + ": inequality row " + std::to_string(r) +
                   " violated";
    for (int r = 0; r < c.n_eq(); ++r)
        if (std::abs(c.eq_A.row(r).dot(x) - c.eq_b[r]) > tol)
            return "player " + std::to_string(player) + ": equality row " + std::to_string(r) +
                   " violated";
    for (int j = 0; j < x.size(); ++j)
        if (x[j] < -tol)
            return "player " + std::to_string(player) + ": nonnegativity violated at coordinate " +
                   std::to_string(j);
    return std::nullopt;
}

} // namespace

OptimalityCertificate optimality_test(const GameSpec& spec, const JointStrategy& x,
                                      double active_tol) {
    OptimalityCertificate cert;
    cert.players.reserve(spec.n_players);
    for (int i = 0; i < spec.n_players; ++i) {
        if (auto bad = feasibility_violation(spec.constraints[i], x.per_player[i], active_tol, i))
            throw SpecError("optimality_test: infeasible strategy, " + *bad);
        Vec g = -profit_gradient(spec, x, i);
        cert.players.push_back(
            kkt_stationarity(spec.constraints[i], x.per_player[i], g, active_tol));
        cert.max_delta = std::max(cert.max_delta, cert.players.back().delta_star);
    }
    return cert;
}

SolveReport solve_ne(const GameSpec& spec, const SolverConfig& config,
                     const std::optional<JointStrategy>& x0) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const int d = spec.dim();

    std::vector<PolytopeProjector> proj;
    proj.reserve(spec.n_players);
    for (int i = 0; i < spec.n_players; ++i)
        proj.emplace_back(spec.constraints[i], d);

    JointStrategy start;
    if (x0) {
        start = *x0;
        for (int i = 0; i < spec.n_players; ++i)
            if (auto bad =
                    feasibility_violation(spec.constraints[i], start.per_player[i],
                                          config.active_tol, i))
                throw SpecError("solve_ne: infeasible x0, " + *bad);
    } else if (config.random_init_seed) {
        std::mt19937_64 rng(*config.random_init_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        start.per_player.resize(spec.n_players);
        for (int i = 0; i < spec.n_players; ++i) {
            Vec raw(d);
            for (int j = 0; j < d; ++j) raw[j] = unif(rng);
            start.per_player[i] = proj[i](raw);
        }
    } else {
        start.per_player.resize(spec.n_players);
        for (int i = 0; i < spec.n_players; ++i) start.per_player[i] = proj[i](Vec::Zero(d));
    }

    SolveReport report;
    report.strategy = start;
    double best_delta = std::numeric_limits<double>::infinity();

    JointStrategy x = start;
    for (int l = 0; l < config.max_outer; ++l) {
        const double gamma = std::pow(config.eta, l) * config.gamma_bar;
        if (!config.warm_start) x = start;

        for (int t = 0; t < config.t_out; ++t) {
            JointStrategy next = x;
            double diff = 0.0;
            for (int i = 0; i < spec.n_players; ++i) {
                Vec g = profit_gradient(spec, x, i);
                next.per_player[i] = proj[i](x.per_player[i] + gamma * g);
                diff = std::max(diff,
                                (next.per_player[i] - x.per_player[i]).cwiseAbs().maxCoeff());
            }
            x = next;
            ++report.inner_iterations_total;
            if (diff < config.tol) break;
        }

        OptimalityCertificate cert = optimality_test(spec, x, config.active_tol);
        report.outer_iterations = l + 1;
        report.final_step = gamma;
        if (cert.max_delta < best_delta) {
            best_delta = cert.max_delta;
            report.strategy = x;
            report.certificate = cert;
        }
        if (cert.max_delta < config.tol) {
            report.converged = true;
            break;
        }
    }

    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace tullock
