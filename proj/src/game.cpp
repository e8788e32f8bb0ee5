#include "tullock/game.hpp"

#include "tullock/linalg.hpp"

#include <cmath>
#include <sstream>

namespace tullock {

void GameSpec::validate() const {
    if (n_players < 1 || n_stages < 1 || n_categories < 1)
        throw SpecError("game: player/stage/category counts must be positive");
    if (stage_prizes.size() != n_stages) throw SpecError("game: prizes must have length K");
    if (fictitious_participations.size() != n_stages)
        throw SpecError("game: epsilons must have length K");
    if (participation_weights.size() != n_categories)
        throw SpecError("game: weights must have length m");
    for (int k = 0; k < n_stages; ++k) {
        if (!(fictitious_participations[k] > 0.0))
            throw SpecError("game: epsilon must be > 0 at stage " + std::to_string(k));
        if (stage_prizes[k] < 0.0)
            throw SpecError("game: prize must be >= 0 at stage " + std::to_string(k));
    }
    if (participation_weights.minCoeff() < 0.0)
        throw SpecError("game: participation weights must be nonnegative");
    if (participation_weights.norm() <= 0.0)
        throw SpecError("game: participation weights must have positive norm");

    if (const auto* lin = std::get_if<LinearCost>(&cost)) {
        if (lin->betas.size() != n_stages) throw SpecError("game: betas must have length K");
    } else {
        const auto& dyn = std::get<DynamicPriceCost>(cost);
        if (dyn.alphas.size() != n_stages) throw SpecError("game: alphas must have length K");
        if (dyn.r.rows() != n_stages || dyn.r.cols() != n_categories)
            throw SpecError("game: r must be K x m");
        if (dyn.alphas.minCoeff() <= 0.0)
            throw SpecError("game: dynamic-price alpha must be > 0 at every stage");
        if (dyn.mask.size() != 0 && dyn.mask.size() != n_categories)
            throw SpecError("game: cost mask must have length m");
    }

    if (static_cast<int>(constraints.size()) != n_players)
        throw SpecError("game: one constraint set per player required");
    for (const auto& c : constraints) {
        if (c.ineq_A.rows() != c.ineq_b.size() || c.eq_A.rows() != c.eq_b.size())
            throw SpecError("game: constraint rows and right-hand sides disagree");
        if ((c.ineq_A.rows() > 0 && c.ineq_A.cols() != dim()) ||
            (c.eq_A.rows() > 0 && c.eq_A.cols() != dim()))
            throw SpecError("game: constraint rows must have K*m columns");
    }
}

Vec GameSpec::cost_mask() const {
    if (const auto* dyn = std::get_if<DynamicPriceCost>(&cost)) {
        if (dyn->mask.size() > 0) return dyn->mask;
    }
    return Vec::Ones(n_categories);
}

JointStrategy JointStrategy::zeros(int n_players, int dim) {
    JointStrategy x;
    x.per_player.assign(n_players, Vec::Zero(dim));
    return x;
}

Vec JointStrategy::stacked() const {
    int d = per_player.empty() ? 0 : static_cast<int>(per_player[0].size());
    Vec v(static_cast<int>(per_player.size()) * d);
    for (size_t i = 0; i < per_player.size(); ++i) v.segment(i * d, d) = per_player[i];
    return v;
}

JointStrategy JointStrategy::from_stacked(const Vec& v, int n_players, int dim) {
    if (v.size() != n_players * dim) throw SpecError("joint strategy: stacked size mismatch");
    JointStrategy x;
    x.per_player.resize(n_players);
    for (int i = 0; i < n_players; ++i) x.per_player[i] = v.segment(i * dim, dim);
    return x;
}

namespace {

void check_dims(const GameSpec& spec, const JointStrategy& x) {
    if (x.n_players() != spec.n_players)
        throw SpecError("strategy: expected " + std::to_string(spec.n_players) + " players, got " +
                        std::to_string(x.n_players()));
    for (const auto& xi : x.per_player)
        if (xi.size() != spec.dim()) throw SpecError("strategy: per-player vector has wrong length");
}

} // namespace

StageEvaluation evaluate_stage(const GameSpec& spec, const JointStrategy& x, int k) {
    check_dims(spec, x);
    if (k < 0 || k >= spec.n_stages) throw SpecError("evaluate_stage: stage index out of range");
    const int m = spec.n_categories;
    const double eps = spec.fictitious_participations[k];
    if (!(eps > 0.0)) throw SpecError("evaluate_stage: epsilon must be positive");
    const double W = spec.stage_prizes[k];
    const Vec& w = spec.participation_weights;

    StageEvaluation ev;
    ev.participations.resize(spec.n_players);
    ev.payoffs.resize(spec.n_players);
    ev.costs.resize(spec.n_players);

    for (int i = 0; i < spec.n_players; ++i)
        ev.participations[i] = w.dot(x.per_player[i].segment(k * m, m));
    ev.total_participation = ev.participations.sum();
    const double t = ev.total_participation + eps;
    for (int i = 0; i < spec.n_players; ++i) ev.payoffs[i] = W * ev.participations[i] / t;
    ev.loss = W * eps / t;

    if (const auto* lin = std::get_if<LinearCost>(&spec.cost)) {
        for (int i = 0; i < spec.n_players; ++i)
            ev.costs[i] = lin->betas[k] * x.per_player[i].segment(k * m, m).sum();
    } else {
        const auto& dyn = std::get<DynamicPriceCost>(spec.cost);
        const Vec mask = spec.cost_mask();
        Vec masked_total = Vec::Zero(m);
        for (int i = 0; i < spec.n_players; ++i)
            masked_total += mask.cwiseProduct(x.per_player[i].segment(k * m, m));
        const Vec r_k = dyn.r.row(k).transpose();
        for (int i = 0; i < spec.n_players; ++i) {
            const Vec xi = x.per_player[i].segment(k * m, m);
            ev.costs[i] =
                mask.cwiseProduct(xi).dot(dyn.alphas[k] * masked_total) + xi.dot(r_k);
        }
    }
    return ev;
}

double total_profit(const GameSpec& spec, const JointStrategy& x, int player) {
    double u = 0.0;
    for (int k = 0; k < spec.n_stages; ++k) {
        StageEvaluation ev = evaluate_stage(spec, x, k);
        u += ev.payoffs[player] - ev.costs[player];
    }
    return u;
}

Vec profit_gradient(const GameSpec& spec, const JointStrategy& x, int player) {
    check_dims(spec, x);
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;
    Vec g(spec.dim());

    for (int k = 0; k < spec.n_stages; ++k) {
        const double eps = spec.fictitious_participations[k];
        const double W = spec.stage_prizes[k];
        double phi_i = 0.0, phi_total = 0.0;
        for (int j = 0; j < spec.n_players; ++j) {
            double p = w.dot(x.per_player[j].segment(k * m, m));
            phi_total += p;
            if (j == player) phi_i = p;
        }
        const double t = phi_total + eps;
        const double f1 = W * (phi_total - phi_i + eps) / (t * t);

        Vec block = f1 * w;
        if (const auto* lin = std::get_if<LinearCost>(&spec.cost)) {
            block.array() -= lin->betas[k];
        } else {
            const auto& dyn = std::get<DynamicPriceCost>(spec.cost);
            const Vec mask = spec.cost_mask();
            Vec total = Vec::Zero(m);
            for (int j = 0; j < spec.n_players; ++j) total += x.per_player[j].segment(k * m, m);
            block -= dyn.alphas[k] *
                         mask.cwiseProduct(total + x.per_player[player].segment(k * m, m)) +
                     dyn.r.row(k).transpose();
        }
        g.segment(k * m, m) = block;
    }
    return g;
}

Vec profit_cross_gradient(const GameSpec& spec, const JointStrategy& x, int player, int other) {
    check_dims(spec, x);
    if (player == other) return profit_gradient(spec, x, player);
    const int m = spec.n_categories;
    const Vec& w = spec.participation_weights;
    Vec g(spec.dim());

    for (int k = 0; k < spec.n_stages; ++k) {
        const double eps = spec.fictitious_participations[k];
        const double W = spec.stage_prizes[k];
        double phi_i = 0.0, phi_total = 0.0;
        for (int j = 0; j < spec.n_players; ++j) {
            double p = w.dot(x.per_player[j].segment(k * m, m));
            phi_total += p;
            if (j == player) phi_i = p;
        }
        const double t = phi_total + eps;
        Vec block = (-W * phi_i / (t * t)) * w;
        if (const auto* dyn = std::get_if<DynamicPriceCost>(&spec.cost)) {
            const Vec mask = spec.cost_mask();
            block -= dyn->alphas[k] *
                     mask.cwiseProduct(x.per_player[player].segment(k * m, m));
        }
        g.segment(k * m, m) = block;
    }
    return g;
}

Vec pseudo_gradient(const GameSpec& spec, const JointStrategy& x) {
    Vec F(spec.n_players * spec.dim());
    for (int i = 0; i < spec.n_players; ++i)
        F.segment(i * spec.dim(), spec.dim()) = -profit_gradient(spec, x, i);
    return F;
}

ConstraintGeometry analyze_constraints(const PlayerConstraints& c, int dim,
                                       bool require_strict_slack) {
    using namespace linalg;
    ConstraintGeometry geo;
    geo.lower.resize(dim);
    geo.upper.resize(dim);

    const Mat& Aiq = c.ineq_A;
    const Vec& biq = c.ineq_b;
    const Mat& Aeq = c.eq_A;
    const Vec& beq = c.eq_b;

    for (int j = 0; j < dim; ++j) {
        Vec e = Vec::Zero(dim);
        e[j] = 1.0;
        LpResult up = solve_lp(e, Aiq, biq, Aeq, beq);
        if (up.status == LpStatus::Infeasible)
            throw InfeasibleError("constraints: feasible set is empty");
        if (up.status == LpStatus::Unbounded)
            throw InfeasibleError("constraints: feasible set unbounded in coordinate " +
                                  std::to_string(j));
        LpResult lo = solve_lp(-e, Aiq, biq, Aeq, beq);
        if (lo.status != LpStatus::Optimal)
            throw InfeasibleError("constraints: lower bounding problem failed at coordinate " +
                                  std::to_string(j));
        geo.upper[j] = up.objective;
        geo.lower[j] = -lo.objective;
    }

    // max-min slack over the inequality rows (Slater margin); the slack
    // variable is split s = s+ - s- to keep the LP in nonnegative form
    auto max_min_slack = [&](bool include_nonneg) {
        const int miq = static_cast<int>(Aiq.rows());
        const int rows = miq + (include_nonneg ? dim : 0);
        Mat A(rows, dim + 2);
        Vec b(rows);
        A.setZero();
        for (int i = 0; i < miq; ++i) {
            A.block(i, 0, 1, dim) = Aiq.row(i);
            A(i, dim) = 1.0;
            A(i, dim + 1) = -1.0;
            b[i] = biq[i];
        }
        if (include_nonneg) {
            for (int j = 0; j < dim; ++j) {
                A(miq + j, j) = -1.0;
                A(miq + j, dim) = 1.0;
                A(miq + j, dim + 1) = -1.0;
                b[miq + j] = 0.0;
            }
        }
        Mat E(Aeq.rows(), dim + 2);
        if (Aeq.rows() > 0) {
            E.setZero();
            E.block(0, 0, Aeq.rows(), dim) = Aeq;
        }
        Vec obj = Vec::Zero(dim + 2);
        obj[dim] = 1.0;
        obj[dim + 1] = -1.0;
        LpResult res = solve_lp(obj, A, b, E, beq);
        if (res.status != LpStatus::Optimal)
            throw InfeasibleError("constraints: slack program failed");
        return std::make_pair(res.objective, Vec(res.x.head(dim)));
    };

    if (c.n_ineq() > 0) {
        auto [slack, pt] = max_min_slack(false);
        geo.slater_slack = slack;
        if (require_strict_slack && slack <= 1e-12)
            throw InfeasibleError(
                "constraints: no strictly feasible point for the inequality rows");
        geo.interior_point = pt;
    } else {
        geo.slater_slack = std::numeric_limits<double>::infinity();
    }
    auto [s_all, pt_all] = max_min_slack(true);
    (void)s_all;
    geo.interior_point = pt_all;
    return geo;
}

} // namespace tullock
