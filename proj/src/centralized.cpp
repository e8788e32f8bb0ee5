#include "tullock/centralized.hpp"

#include "tullock/projection.hpp"

#include <cmath>
#include <random>

namespace tullock {

namespace {

constexpr double kProfitFloor = 1e-12;

// gradient blocks of -(sum Psi) - (sum of all participation costs)
Vec so_gradient(const GameSpec& spec, const JointStrategy& x) {
    const int m = spec.n_categories;
    const int d = spec.dim();
    const Vec& w = spec.participation_weights;
    Vec g(spec.n_players * d);
    for (int k = 0; k < spec.n_stages; ++k) {
        double phi_total = 0.0;
        Vec x_bar = Vec::Zero(m);
        for (int j = 0; j < spec.n_players; ++j) {
            const Vec xk = x.per_player[j].segment(k * m, m);
            phi_total += w.dot(xk);
            x_bar += xk;
        }
        const double t = phi_total + spec.fictitious_participations[k];
        const double loss_slope = spec.stage_prizes[k] * spec.fictitious_participations[k] /
                                  (t * t); // -dPsi/dPhi
        Vec block = loss_slope * w;
        if (const auto* lin = std::get_if<LinearCost>(&spec.cost)) {
            block.array() -= lin->betas[k];
        } else {
            const auto& dyn = std::get<DynamicPriceCost>(spec.cost);
            const Vec mask = spec.cost_mask();
            block -= 2.0 * dyn.alphas[k] * mask.cwiseProduct(x_bar) + dyn.r.row(k).transpose();
        }
        for (int i = 0; i < spec.n_players; ++i) g.segment(i * d + k * m, m) = block;
    }
    return g;
}

double so_objective(const GameSpec& spec, const JointStrategy& x) {
    double obj = 0.0;
    for (int k = 0; k < spec.n_stages; ++k) {
        StageEvaluation ev = evaluate_stage(spec, x, k);
        obj -= ev.loss + ev.costs.sum();
    }
    return obj;
}

struct PfEval {
    double value;
    bool in_domain;
};

PfEval pf_objective(const GameSpec& spec, const JointStrategy& x) {
    double obj = 0.0;
    for (int i = 0; i < spec.n_players; ++i) {
        double u = total_profit(spec, x, i);
        if (u <= kProfitFloor) return {0.0, false};
        obj += std::log(u);
    }
    return {obj, true};
}

Vec pf_gradient(const GameSpec& spec, const JointStrategy& x) {
    const int d = spec.dim();
    Vec g = Vec::Zero(spec.n_players * d);
    for (int i = 0; i < spec.n_players; ++i) {
        const double u = total_profit(spec, x, i);
        for (int j = 0; j < spec.n_players; ++j)
            g.segment(j * d, d) += profit_cross_gradient(spec, x, i, j) / u;
    }
    return g;
}

template <typename Objective, typename Gradient>
CentralizedSolution ascend(const GameSpec& spec, const std::vector<PolytopeProjector>& proj,
                           JointStrategy x, Objective&& objective, Gradient&& gradient,
                           const CentralizedConfig& cfg) {
    const int d = spec.dim();
    CentralizedSolution sol;
    double gamma = cfg.step;
    double fx = objective(x);
    int stalled = 0;

    for (long it = 0; it < cfg.max_iterations; ++it) {
        ++sol.iterations;
        const Vec g = gradient(x);

        // residual at unit reference step decides convergence
        JointStrategy ref = x;
        double res2 = 0.0;
        for (int i = 0; i < spec.n_players; ++i) {
            ref.per_player[i] = proj[i](x.per_player[i] + g.segment(i * d, d));
            res2 += (ref.per_player[i] - x.per_player[i]).squaredNorm();
        }
        const double xnorm = x.stacked().norm();
        sol.kkt_residual = std::sqrt(res2);
        if (sol.kkt_residual < cfg.tol * (1.0 + xnorm)) {
            sol.converged = true;
            break;
        }

        bool accepted = false;
        double moved = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            JointStrategy cand = x;
            double gdx = 0.0;
            for (int i = 0; i < spec.n_players; ++i) {
                cand.per_player[i] = proj[i](x.per_player[i] + gamma * g.segment(i * d, d));
                gdx += g.segment(i * d, d).dot(cand.per_player[i] - x.per_player[i]);
            }
            const double fc = objective(cand);
            if (std::isfinite(fc) && fc >= fx + 1e-4 * gdx) {
                moved = (cand.stacked() - x.stacked()).norm();
                x = cand;
                fx = fc;
                accepted = true;
                gamma = std::min(gamma * 1.2, cfg.step);
                break;
            }
            gamma *= cfg.shrink;
        }
        // once steps no longer move the iterate at double precision, the
        // point is numerically stationary regardless of the residual target
        if (accepted && moved < 1e-14 * (1.0 + xnorm)) ++stalled;
        else if (accepted) stalled = 0;
        if (!accepted || stalled > 20) break;
    }
    sol.strategy = x;
    sol.objective_value = fx;
    return sol;
}

} // namespace

CentralizedSolution solve_system_optimum(const GameSpec& spec, const CentralizedConfig& cfg) {
    const int d = spec.dim();
    std::vector<PolytopeProjector> proj;
    for (int i = 0; i < spec.n_players; ++i) proj.emplace_back(spec.constraints[i], d);

    JointStrategy x0;
    x0.per_player.resize(spec.n_players);
    for (int i = 0; i < spec.n_players; ++i) x0.per_player[i] = proj[i](Vec::Zero(d));

    CentralizedSolution sol = ascend(
        spec, proj, x0, [&](const JointStrategy& x) { return so_objective(spec, x); },
        [&](const JointStrategy& x) { return so_gradient(spec, x); }, cfg);
    sol.kind = CentralizedKind::SystemOptimum;
    return sol;
}

CentralizedSolution solve_proportional_fair(const GameSpec& spec, const CentralizedConfig& cfg,
                                            const std::optional<JointStrategy>& init) {
    const int d = spec.dim();
    std::vector<PolytopeProjector> proj;
    for (int i = 0; i < spec.n_players; ++i) proj.emplace_back(spec.constraints[i], d);

    std::vector<JointStrategy> starts;
    if (init) starts.push_back(*init);
    {
        JointStrategy x;
        x.per_player.resize(spec.n_players);
        for (int i = 0; i < spec.n_players; ++i)
            x.per_player[i] = analyze_constraints(spec.constraints[i], d).interior_point;
        starts.push_back(std::move(x));
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int r = 0; r < cfg.max_restarts; ++r) {
        JointStrategy x;
        x.per_player.resize(spec.n_players);
        for (int i = 0; i < spec.n_players; ++i) {
            Vec raw(d);
            for (int j = 0; j < d; ++j) raw[j] = unif(rng);
            x.per_player[i] = proj[i](raw * (1.0 + r));
        }
        starts.push_back(std::move(x));
    }

    for (const auto& x0 : starts) {
        if (!pf_objective(spec, x0).in_domain) continue;
        CentralizedSolution sol = ascend(
            spec, proj, x0,
            [&](const JointStrategy& x) {
                PfEval e = pf_objective(spec, x);
                return e.in_domain ? e.value : -std::numeric_limits<double>::infinity();
            },
            [&](const JointStrategy& x) { return pf_gradient(spec, x); }, cfg);
        sol.kind = CentralizedKind::ProportionalFair;
        return sol;
    }
    throw DomainError("proportional fairness: no feasible point with strictly positive "
                      "profits for every player was found");
}

double welfare(const GameSpec& spec, const JointStrategy& x) {
    double w = 0.0;
    for (int i = 0; i < spec.n_players; ++i) w += total_profit(spec, x, i);
    return w;
}

double price_of_anarchy(const GameSpec& spec, const JointStrategy& so, const JointStrategy& ne) {
    const double w_ne = welfare(spec, ne);
    if (w_ne <= 0.0)
        throw DomainError("price of anarchy: undefined, equilibrium welfare is nonpositive");
    return welfare(spec, so) / w_ne;
}

} // namespace tullock
