#include "tullock/analysis.hpp"

#include "tullock/projection.hpp"

#include <random>

namespace tullock {

namespace {

struct StagePhis {
    Vec phi;      // per player
    double total; // Phi
    double t;     // Phi + eps
};

StagePhis stage_phis(const GameSpec& spec, const JointStrategy& x, int k) {
    StagePhis s;
    const int m = spec.n_categories;
    s.phi.resize(spec.n_players);
    for (int i = 0; i < spec.n_players; ++i)
        s.phi[i] = spec.participation_weights.dot(x.per_player[i].segment(k * m, m));
    s.total = s.phi.sum();
    s.t = s.total + spec.fictitious_participations[k];
    return s;
}

Mat own_cost_hessian(const GameSpec& spec, int k) {
    const int m = spec.n_categories;
    if (const auto* dyn = std::get_if<DynamicPriceCost>(&spec.cost))
        return 2.0 * dyn->alphas[k] * Mat(spec.cost_mask().asDiagonal());
    (void)k;
    return Mat::Zero(m, m);
}

Mat cross_cost_hessian(const GameSpec& spec, int k) {
    const int m = spec.n_categories;
    if (const auto* dyn = std::get_if<DynamicPriceCost>(&spec.cost))
        return dyn->alphas[k] * Mat(spec.cost_mask().asDiagonal());
    (void)k;
    return Mat::Zero(m, m);
}

double max_eigenvalue(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
    return es.eigenvalues().maxCoeff();
}

} // namespace

bool check_prop3_class(const GameSpec& spec) {
    const Vec& w = spec.participation_weights;
    if (w.size() != spec.n_categories || w.minCoeff() < 0.0 || w.norm() <= 0.0) return false;
    if (const auto* dyn = std::get_if<DynamicPriceCost>(&spec.cost)) {
        if (dyn->alphas.size() != spec.n_stages || dyn->alphas.minCoeff() <= 0.0) return false;
        const Vec mask = spec.cost_mask();
        for (int j = 0; j < spec.n_categories; ++j)
            if (!(w[j] > 0.0) && !(mask[j] > 0.5)) return false; // direction with flat curvature
        return true;
    }
    // linear-cost reduction: single category with unit weight
    return spec.n_categories == 1 && std::abs(w[0] - 1.0) == 0.0;
}

ConcavityResult concavity_condition(const GameSpec& spec, const JointStrategy& x, int player,
                                    int k) {
    const Vec& w = spec.participation_weights;
    StagePhis s = stage_phis(spec, x, k);
    const double W = spec.stage_prizes[k];
    const double f1 = W * (s.total - s.phi[player] + spec.fictitious_participations[k]) /
                      (s.t * s.t);
    const double f2 = -2.0 * f1 / s.t;
    ConcavityResult res;
    res.matrix = f2 * (w * w.transpose()) - own_cost_hessian(spec, k);
    res.negative_semidefinite = max_eigenvalue(res.matrix) <= 1e-10;
    return res;
}

bool commutativity_check_weights(const GameSpec& spec, const JointStrategy& x, int p, int q,
                                 int k, const Vec& w_p, const Vec& w_q) {
    if (p == q) throw SpecError("commutativity_check: players must differ");
    StagePhis s = stage_phis(spec, x, k);
    const double W = spec.stage_prizes[k];
    const double f3 = -W * (s.t - 2.0 * s.phi[p]) / (s.t * s.t * s.t);
    const Mat cross = cross_cost_hessian(spec, k);
    Mat lhs = f3 * (w_q * w_p.transpose()) - cross;
    Mat rhs = f3 * (w_p * w_q.transpose()) - cross.transpose();
    return (lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12;
}

bool commutativity_check(const GameSpec& spec, const JointStrategy& x, int p, int q, int k) {
    return commutativity_check_weights(spec, x, p, q, k, spec.participation_weights,
                                       spec.participation_weights);
}

Mat extended_hessian(const GameSpec& spec, const JointStrategy& x, int player) {
    const int N = spec.n_players;
    const int d = spec.dim();
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;
    Mat H = Mat::Zero(N * d, N * d);
    for (int k = 0; k < spec.n_stages; ++k) {
        StagePhis s = stage_phis(spec, x, k);
        const double coef =
            2.0 * spec.stage_prizes[k] * s.phi[player] / (s.t * s.t * s.t);
        const Mat block = coef * (w * w.transpose());
        for (int p = 0; p < N; ++p) {
            if (p == player) continue;
            for (int q = 0; q < N; ++q) {
                if (q == player) continue;
                H.block(p * d + k * m, q * d + k * m, m, m) = block;
            }
        }
    }
    return H;
}

Mat opponent_hessian(const GameSpec& spec, const JointStrategy& x, int player) {
    const int N = spec.n_players;
    const int d = spec.dim();
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;
    Mat H = Mat::Zero((N - 1) * d, (N - 1) * d);
    std::vector<int> others;
    for (int p = 0; p < N; ++p)
        if (p != player) others.push_back(p);
    for (int k = 0; k < spec.n_stages; ++k) {
        StagePhis s = stage_phis(spec, x, k);
        const double coef =
            2.0 * spec.stage_prizes[k] * s.phi[player] / (s.t * s.t * s.t);
        const Mat block = coef * (w * w.transpose());
        for (size_t a = 0; a < others.size(); ++a)
            for (size_t b = 0; b < others.size(); ++b)
                H.block(a * d + k * m, b * d + k * m, m, m) = block;
    }
    return H;
}

Mat loss_hessian(const GameSpec& spec, const JointStrategy& x) {
    const int N = spec.n_players;
    const int d = spec.dim();
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;
    Mat H = Mat::Zero(N * d, N * d);
    for (int k = 0; k < spec.n_stages; ++k) {
        StagePhis s = stage_phis(spec, x, k);
        const double coef = 2.0 * spec.stage_prizes[k] * spec.fictitious_participations[k] /
                            (s.t * s.t * s.t);
        const Mat block = coef * (w * w.transpose());
        for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
                H.block(p * d + k * m, q * d + k * m, m, m) = block;
    }
    return H;
}

Mat assemble_uniqueness_matrix(const GameSpec& spec, const JointStrategy& x) {
    const int N = spec.n_players;
    const int d = spec.dim();
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;

    Mat M = Mat::Zero(N * d, N * d);
    for (int k = 0; k < spec.n_stages; ++k) {
        StagePhis s = stage_phis(spec, x, k);
        const double W = spec.stage_prizes[k];
        const double eps = spec.fictitious_participations[k];
        const Mat own_hess = own_cost_hessian(spec, k);
        const Mat cost_block = 2.0 * cross_cost_hessian(spec, k); // Hess of total cost
        const Mat loss_block = 2.0 * W * eps / (s.t * s.t * s.t) * (w * w.transpose());
        for (int p = 0; p < N; ++p) {
            const double f1 = W * (s.total - s.phi[p] + eps) / (s.t * s.t);
            const double f2 = -2.0 * f1 / s.t;
            M.block(p * d + k * m, p * d + k * m, m, m) +=
                f2 * (w * w.transpose()) - own_hess;
            for (int q = 0; q < N; ++q) {
                // -sum_i H^i contribution
                double sum_phi_others = 0.0;
                for (int i = 0; i < N; ++i)
                    if (i != p && i != q) sum_phi_others += s.phi[i];
                const Mat h_block =
                    2.0 * W * sum_phi_others / (s.t * s.t * s.t) * (w * w.transpose());
                M.block(p * d + k * m, q * d + k * m, m, m) -= h_block;
                M.block(p * d + k * m, q * d + k * m, m, m) -= cost_block + loss_block;
            }
        }
    }
    return M;
}

Mat assemble_game_jacobian_sym(const GameSpec& spec, const JointStrategy& x) {
    const int N = spec.n_players;
    const int d = spec.dim();
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;

    Mat G = Mat::Zero(N * d, N * d);
    for (int k = 0; k < spec.n_stages; ++k) {
        StagePhis s = stage_phis(spec, x, k);
        const double W = spec.stage_prizes[k];
        const Mat own_hess = own_cost_hessian(spec, k);
        const Mat cross_hess = cross_cost_hessian(spec, k);
        for (int p = 0; p < N; ++p) {
            const double f1 =
                W * (s.total - s.phi[p] + spec.fictitious_participations[k]) / (s.t * s.t);
            const double f2 = -2.0 * f1 / s.t;
            G.block(p * d + k * m, p * d + k * m, m, m) +=
                2.0 * (f2 * (w * w.transpose()) - own_hess);
            for (int q = 0; q < N; ++q) {
                if (q == p) continue;
                const double f3p = -W * (s.t - 2.0 * s.phi[p]) / (s.t * s.t * s.t);
                const double f3q = -W * (s.t - 2.0 * s.phi[q]) / (s.t * s.t * s.t);
                G.block(p * d + k * m, q * d + k * m, m, m) +=
                    (f3p + f3q) * (w * w.transpose()) - 2.0 * cross_hess;
            }
        }
    }
    return G;
}

UniquenessReport uniqueness_test(const GameSpec& spec, int sample_count, unsigned long seed,
                                 bool force_sampling) {
    UniquenessReport report;
    if (!force_sampling && check_prop3_class(spec)) {
        report.verdict = UniquenessVerdict::AnalyticallyUnique;
        report.min_eigenvalue_seen = std::numeric_limits<double>::infinity();
        return report;
    }

    const int d = spec.dim();
    std::vector<PolytopeProjector> proj;
    std::vector<ConstraintGeometry> geo;
    for (int i = 0; i < spec.n_players; ++i) {
        proj.emplace_back(spec.constraints[i], d);
        geo.push_back(analyze_constraints(spec.constraints[i], d));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    report.min_eigenvalue_seen = std::numeric_limits<double>::infinity();

    for (int s = 0; s < sample_count; ++s) {
        JointStrategy x;
        x.per_player.resize(spec.n_players);
        for (int i = 0; i < spec.n_players; ++i) {
            Vec raw(d);
            for (int j = 0; j < d; ++j)
                raw[j] = geo[i].lower[j] + unif(rng) * (geo[i].upper[j] - geo[i].lower[j]);
            x.per_player[i] = proj[i](raw);
        }
        for (int p = 0; p < spec.n_players; ++p)
            for (int q = p + 1; q < spec.n_players; ++q)
                for (int k = 0; k < spec.n_stages; ++k)
                    if (!commutativity_check(spec, x, p, q, k))
                        throw SpecError(
                            "uniqueness_test: mixed-derivative symmetry fails at a sample");

        ++report.samples_checked;
        const Mat A = assemble_uniqueness_matrix(spec, x);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
        const double margin = (-es.eigenvalues()).minCoeff(); // lambda_min of -A
        report.min_eigenvalue_seen = std::min(report.min_eigenvalue_seen, margin);
        if (margin < 1e-10) {
            report.verdict = UniquenessVerdict::Falsified;
            report.witness = x;
            return report;
        }
    }
    report.verdict = UniquenessVerdict::SampledPass;
    return report;
}

} // namespace tullock
