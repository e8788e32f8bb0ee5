#pragma once

#include "tullock/game.hpp"
#include "tullock/projection.hpp"

#include <random>

namespace tullock::testing {

// simple deterministic generators for randomized checks

inline Vec random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

inline PlayerConstraints box_constraints(const Vec& caps) {
    const int d = static_cast<int>(caps.size());
    PlayerConstraints c;
    c.ineq_A = Mat::Identity(d, d);
    c.ineq_b = caps;
    c.eq_A = Mat(0, d);
    c.eq_b = Vec(0);
    return c;
}

inline PlayerConstraints simplex_constraints(int d, double budget) {
    PlayerConstraints c;
    c.ineq_A = Mat(0, d);
    c.ineq_b = Vec(0);
    c.eq_A = Mat::Ones(1, d);
    c.eq_b = Vec::Constant(1, budget);
    return c;
}

struct RandomSpecOptions {
    int max_players = 4;
    int max_stages = 3;
    int max_categories = 3;
    bool force_dynamic_cost = false;
    bool force_linear_cost = false;
    bool positive_weights = true;
};

inline GameSpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& opt = {}) {
    std::uniform_int_distribution<int> dN(1, opt.max_players), dK(1, opt.max_stages),
        dM(1, opt.max_categories), coin(0, 1);
    GameSpec g;
    g.n_players = dN(rng);
    g.n_stages = dK(rng);
    g.n_categories = dM(rng);
    g.stage_prizes = random_vec(rng, g.n_stages, 1.0, 50.0);
    g.fictitious_participations = random_vec(rng, g.n_stages, 0.5, 2.0);
    g.participation_weights =
        random_vec(rng, g.n_categories, opt.positive_weights ? 0.2 : 0.0, 1.0);

    bool dynamic = opt.force_dynamic_cost || (!opt.force_linear_cost && coin(rng) == 1);
    if (dynamic) {
        DynamicPriceCost c;
        c.alphas = random_vec(rng, g.n_stages, 0.01, 0.3);
        c.r = Mat::Zero(g.n_stages, g.n_categories);
        for (int k = 0; k < g.n_stages; ++k)
            c.r.row(k) = random_vec(rng, g.n_categories, -0.05, 0.3).transpose();
        g.cost = c;
    } else {
        g.cost = LinearCost{random_vec(rng, g.n_stages, -0.1, 0.5)};
    }

    for (int i = 0; i < g.n_players; ++i) {
        if (coin(rng) == 0) {
            g.constraints.push_back(box_constraints(random_vec(rng, g.dim(), 0.5, 4.0)));
        } else {
            std::uniform_real_distribution<double> dB(1.0, 5.0);
            g.constraints.push_back(simplex_constraints(g.dim(), dB(rng)));
        }
    }
    g.validate();
    return g;
}

inline JointStrategy random_feasible(std::mt19937_64& rng, const GameSpec& g, double scale = 3.0) {
    JointStrategy x;
    x.per_player.resize(g.n_players);
    for (int i = 0; i < g.n_players; ++i) {
        Vec raw = random_vec(rng, g.dim(), -0.5 * scale, scale);
        x.per_player[i] = project(g.constraints[i], g.dim(), raw);
    }
    return x;
}

// central finite differences of player i's profit
inline Vec fd_gradient(const GameSpec& g, const JointStrategy& x, int i, double h = 1e-6) {
    Vec grad(g.dim());
    JointStrategy xp = x;
    for (int j = 0; j < g.dim(); ++j) {
        xp.per_player[i][j] = x.per_player[i][j] + h;
        const double up = total_profit(g, xp, i);
        xp.per_player[i][j] = x.per_player[i][j] - h;
        const double um = total_profit(g, xp, i);
        xp.per_player[i][j] = x.per_player[i][j];
        grad[j] = (up - um) / (2.0 * h);
    }
    return grad;
}

} // namespace tullock::testing
