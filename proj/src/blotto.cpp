#include "tullock/blotto.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tullock {

void BlottoSpec::validate() const {
    if (n_players() < 1 || n_battlefields() < 1)
        throw SpecError("blotto: needs at least one player and one battlefield");
    if (unit_costs.size() != n_battlefields() || fictitious.size() != n_battlefields())
        throw SpecError("blotto: per-battlefield vectors must have length K");
    if (budgets.minCoeff() <= 0.0) throw SpecError("blotto: budgets must be positive");
    if (fictitious.minCoeff() <= 0.0) throw SpecError("blotto: epsilons must be positive");
    if (prizes.minCoeff() < 0.0) throw SpecError("blotto: prizes must be nonnegative");
}

std::optional<Configuration> Configuration::make(std::vector<std::pair<int, int>> pairs,
                                                 int n_players, int n_battlefields) {
    Configuration cfg;
    std::sort(pairs.begin(), pairs.end());
    cfg.zero_set = std::move(pairs);
    cfg.participants.assign(n_battlefields, n_players);
    cfg.zeroed_per_player.assign(n_players, {});
    for (auto [i, k] : cfg.zero_set) {
        if (i < 0 || i >= n_players || k < 0 || k >= n_battlefields) return std::nullopt;
        cfg.participants[k] -= 1;
        cfg.zeroed_per_player[i].push_back(k);
    }
    for (const auto& zk : cfg.zeroed_per_player)
        if (static_cast<int>(zk.size()) >= n_battlefields) return std::nullopt;
    return cfg;
}

bool Configuration::contains(int player, int battlefield) const {
    return std::binary_search(zero_set.begin(), zero_set.end(),
                              std::make_pair(player, battlefield));
}

namespace {

double t_bar_of(double t_nu, int k, const Configuration& cfg, const BlottoSpec& spec) {
    const double W = spec.prizes[k];
    const double beta = spec.unit_costs[k];
    const double eps = spec.fictitious[k];
    const int n_k = cfg.participants[k];
    const double denom = t_nu + n_k * beta;
    const double w_tilde = W * (n_k - 1);
    return (w_tilde + std::sqrt(w_tilde * w_tilde + 4.0 * W * eps * denom)) / (2.0 * denom);
}

double budget_scale(const BlottoSpec& spec) {
    return spec.budgets.sum() + spec.fictitious.sum();
}

} // namespace

double f_tilde(double t, const Configuration& cfg, const BlottoSpec& spec) {
    double acc = 0.0;
    for (int k = 0; k < spec.n_battlefields(); ++k) {
        const int n_k = cfg.participants[k];
        if (n_k == 0) continue;
        if (!(t + n_k * spec.unit_costs[k] > 0.0))
            throw DomainError("f_tilde: t + n_k*beta_k must be positive");
        acc += t_bar_of(t, k, cfg, spec) - spec.fictitious[k];
    }
    return acc - spec.budgets.sum();
}

double find_root(const Configuration& cfg, const BlottoSpec& spec, long* eval_count) {
    long evals = 0;
    auto f = [&](double t) {
        ++evals;
        return f_tilde(t, cfg, spec);
    };

    double asymptote = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < spec.n_battlefields(); ++k)
        if (cfg.participants[k] > 0)
            asymptote = std::max(asymptote, -cfg.participants[k] * spec.unit_costs[k]);
    if (!std::isfinite(asymptote))
        throw NumericalError("find_root: configuration has no participating battlefield");

    const double scale = std::max(1.0, std::abs(asymptote));
    double a = asymptote + 1e-12 * scale;
    double fa = f(a);
    for (int tries = 0; fa <= 0.0 && tries < 60; ++tries) {
        // cannot happen for a valid spec: the pole forces f -> +inf; retried
        // with a shrinking offset to guard against rounding of the offset
        a = asymptote + (a - asymptote) * 0.5;
        fa = f(a);
    }
    if (fa <= 0.0) throw NumericalError("find_root: no positive value near the lower bracket");

    double b = std::max(asymptote + 1.0, 1.0);
    double fb = f(b);
    for (int tries = 0; fb > 0.0 && tries < 200; ++tries) {
        b = asymptote + 2.0 * (b - asymptote);
        fb = f(b);
    }
    if (fb > 0.0) throw NumericalError("find_root: upper bracket expansion failed");

    const double ftol = 1e-12 * budget_scale(spec);
    double best = std::abs(fa) < std::abs(fb) ? a : b;
    for (int iter = 0; iter < 300; ++iter) {
        double c;
        if (std::abs(fb - fa) > 0.0) {
            c = b - fb * (b - a) / (fb - fa); // secant through the bracket
            const double lo = a + 1e-3 * (b - a);
            const double hi = b - 1e-3 * (b - a);
            if (!(c > lo && c < hi)) c = 0.5 * (a + b);
        } else {
            c = 0.5 * (a + b);
        }
        double fc = f(c);
        if (std::abs(fc) < ftol) {
            if (eval_count) *eval_count += evals;
            return c;
        }
        if (fc > 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
        best = std::abs(fa) < std::abs(fb) ? a : b;
        if (b - a < 1e-15 * std::max(1.0, std::abs(a) + std::abs(b))) break;
    }
    if (eval_count) *eval_count += evals;
    if (std::abs(f_tilde(best, cfg, spec)) < ftol) return best;
    throw NumericalError("find_root: residual tolerance not reached");
}

std::optional<BlottoSolution> solve_configuration(const Configuration& cfg,
                                                  const BlottoSpec& spec, const GameSpec& bridge,
                                                  long* eval_count) {
    const int N = spec.n_players();
    const int K = spec.n_battlefields();
    for (int k = 0; k < K; ++k)
        if (cfg.participants[k] > 0 && !(spec.prizes[k] > 0.0))
            return std::nullopt; // worthless battlefield cannot carry participation

    BlottoSolution sol;
    sol.configuration = cfg;
    sol.t_nu_root = find_root(cfg, spec, &sol.f_evaluations);
    if (eval_count) *eval_count += sol.f_evaluations;

    sol.t_bar.resize(K);
    for (int k = 0; k < K; ++k)
        sol.t_bar[k] =
            cfg.participants[k] > 0 ? t_bar_of(sol.t_nu_root, k, cfg, spec) : spec.fictitious[k];

    sol.nu.resize(N);
    sol.strategy = Mat::Zero(N, K);
    for (int i = 0; i < N; ++i) {
        double sum_t = 0.0, sum_bt2 = 0.0, sum_t2 = 0.0;
        for (int k = 0; k < K; ++k) {
            if (cfg.contains(i, k)) continue;
            const double t2 = sol.t_bar[k] * sol.t_bar[k] / spec.prizes[k];
            sum_t += sol.t_bar[k];
            sum_bt2 += spec.unit_costs[k] * t2;
            sum_t2 += t2;
        }
        sol.nu[i] = (sum_t - spec.budgets[i] - sum_bt2) / sum_t2;
        for (int k = 0; k < K; ++k) {
            if (cfg.contains(i, k)) continue;
            sol.strategy(i, k) =
                sol.t_bar[k] -
                (sol.nu[i] + spec.unit_costs[k]) * sol.t_bar[k] * sol.t_bar[k] / spec.prizes[k];
        }
    }

    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < K; ++k)
            if (!cfg.contains(i, k) && sol.strategy(i, k) < -1e-10) return std::nullopt;
        if (std::abs(sol.strategy.row(i).sum() - spec.budgets[i]) >
            1e-8 * std::max(1.0, spec.budgets[i]))
            return std::nullopt;
    }

    JointStrategy x;
    x.per_player.resize(N);
    for (int i = 0; i < N; ++i) x.per_player[i] = sol.strategy.row(i).transpose();
    try {
        OptimalityCertificate cert = optimality_test(bridge, x);
        if (cert.max_delta >= 1e-6) return std::nullopt;
    } catch (const SpecError&) {
        return std::nullopt; // candidate infeasible beyond certificate tolerance
    }
    sol.verified = true;
    return sol;
}

GameSpec to_game_spec(const BlottoSpec& spec) {
    GameSpec g;
    g.n_players = spec.n_players();
    g.n_stages = spec.n_battlefields();
    g.n_categories = 1;
    g.stage_prizes = spec.prizes;
    g.fictitious_participations = spec.fictitious;
    g.participation_weights = Vec::Ones(1);
    g.cost = LinearCost{spec.unit_costs};
    for (int i = 0; i < g.n_players; ++i) {
        PlayerConstraints c;
        c.ineq_A = Mat(0, g.dim());
        c.ineq_b = Vec(0);
        c.eq_A = Mat::Ones(1, g.dim());
        c.eq_b = Vec::Constant(1, spec.budgets[i]);
        g.constraints.push_back(std::move(c));
    }
    g.validate();
    return g;
}

BlottoSolution solve_semi_analytical(const BlottoSpec& spec, long max_configurations) {
    spec.validate();
    const int N = spec.n_players();
    const int K = spec.n_battlefields();
    if (N * K > 24)
        throw SpecError("blotto: configuration space too large (N*K > 24); "
                        "use the iterative solver instead");

    const GameSpec bridge = to_game_spec(spec);
    const int cells = N * K;
    long tried = 0;
    long total_evals = 0;

    const int max_size = N * (K - 1);
    for (int size = 0; size <= max_size; ++size) {
        // lexicographic combinations of `size` grid cells
        std::vector<int> idx(size);
        for (int j = 0; j < size; ++j) idx[j] = j;
        while (true) {
            std::vector<std::pair<int, int>> pairs;
            pairs.reserve(size);
            for (int p : idx) pairs.emplace_back(p / K, p % K);
            if (auto cfg = Configuration::make(std::move(pairs), N, K)) {
                if (++tried > max_configurations)
                    throw NumericalError(
                        "blotto: configuration budget exhausted without a certified "
                        "equilibrium; fall back to the iterative solver");
                auto sol = solve_configuration(*cfg, spec, bridge, &total_evals);
                if (sol) {
                    sol->f_evaluations = total_evals;
                    sol->configurations_tried = static_cast<int>(tried);
                    return *sol;
                }
            }
            if (size == 0) break;
            int j = size - 1;
            while (j >= 0 && idx[j] == cells - size + j) --j;
            if (j < 0) break;
            ++idx[j];
            for (int l = j + 1; l < size; ++l) idx[l] = idx[l - 1] + 1;
        }
    }
    throw NumericalError("blotto: no configuration produced a certified equilibrium; "
                         "likely a tolerance issue, fall back to the iterative solver");
}

BenchmarkReport benchmark_methods(const BlottoSpec& spec, const SolverConfig& config) {
    BenchmarkReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    BlottoSolution semi = solve_semi_analytical(spec);
    const auto t1 = std::chrono::steady_clock::now();
    SolveReport iter = solve_ne(to_game_spec(spec), config);
    const auto t2 = std::chrono::steady_clock::now();

    rep.semi_seconds = std::chrono::duration<double>(t1 - t0).count();
    rep.iterative_seconds = std::chrono::duration<double>(t2 - t1).count();
    rep.semi_evaluations = semi.f_evaluations;
    rep.iterative_inner_steps = iter.inner_iterations_total;
    rep.iterative_converged = iter.converged;

    double diff = 0.0;
    for (int i = 0; i < spec.n_players(); ++i)
        diff = std::max(diff, (semi.strategy.row(i).transpose() - iter.strategy.per_player[i])
                                  .cwiseAbs()
                                  .maxCoeff());
    rep.agreement_inf_norm = diff;
    return rep;
}

} // namespace tullock
