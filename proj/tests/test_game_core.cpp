#include "tullock/game.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <random>

using namespace tullock;
using namespace tullock::testing;

namespace {

GameSpec single_stage_spec(int n_players, double W, double eps, double beta) {
    GameSpec g;
    g.n_players = n_players;
    g.n_stages = 1;
    g.n_categories = 1;
    g.stage_prizes = Vec::Constant(1, W);
    g.fictitious_participations = Vec::Constant(1, eps);
    g.participation_weights = Vec::Ones(1);
    g.cost = LinearCost{Vec::Constant(1, beta)};
    for (int i = 0; i < n_players; ++i) g.constraints.push_back(box_constraints(Vec::Constant(1, 1e6)));
    g.validate();
    return g;
}

JointStrategy scalar_strategy(std::initializer_list<double> vals) {
    JointStrategy x;
    for (double v : vals) x.per_player.push_back(Vec::Constant(1, v));
    return x;
}

// straight-line re-implementation of the stage sums used as an oracle
double brute_profit(const GameSpec& g, const JointStrategy& x, int i) {
    double total = 0.0;
    const int m = g.n_categories;
    for (int k = 0; k < g.n_stages; ++k) {
        double phi_i = 0.0, Phi = 0.0;
        for (int j = 0; j < g.n_players; ++j) {
            double p = 0.0;
            for (int c = 0; c < m; ++c) p += g.participation_weights[c] * x.per_player[j][k * m + c];
            Phi += p;
            if (j == i) phi_i = p;
        }
        double payoff = g.stage_prizes[k] * phi_i / (Phi + g.fictitious_participations[k]);
        double cost = 0.0;
        if (const auto* lin = std::get_if<LinearCost>(&g.cost)) {
            for (int c = 0; c < m; ++c) cost += lin->betas[k] * x.per_player[i][k * m + c];
        } else {
            const auto& dyn = std::get<DynamicPriceCost>(g.cost);
            const Vec mask = g.cost_mask();
            for (int c = 0; c < m; ++c) {
                double tot = 0.0;
                for (int j = 0; j < g.n_players; ++j) tot += mask[c] * x.per_player[j][k * m + c];
                cost += mask[c] * x.per_player[i][k * m + c] * dyn.alphas[k] * tot +
                        x.per_player[i][k * m + c] * dyn.r(k, c);
            }
        }
        total += payoff - cost;
    }
    return total;
}

} // namespace

TEST_SUITE("game_core") {

TEST_CASE("symmetric two players split two thirds of the prize") {
    GameSpec g = single_stage_spec(2, 10.0, 1.0, 0.0);
    StageEvaluation ev = evaluate_stage(g, scalar_strategy({1.0, 1.0}), 0);
    CHECK(ev.payoffs[0] == doctest::Approx(10.0 / 3.0));
    CHECK(ev.payoffs[1] == doctest::Approx(10.0 / 3.0));
    CHECK(ev.loss == doctest::Approx(10.0 / 3.0));
    CHECK(std::abs(10.0 - ev.loss - ev.payoffs.sum()) <= 1e-10 * 10.0);
}

TEST_CASE("zero participation forfeits the whole prize") {
    GameSpec g = single_stage_spec(2, 10.0, 1.0, 0.0);
    StageEvaluation ev = evaluate_stage(g, scalar_strategy({0.0, 0.0}), 0);
    CHECK(ev.payoffs[0] == 0.0);
    CHECK(ev.payoffs[1] == 0.0);
    CHECK(ev.loss == doctest::Approx(10.0));
}

TEST_CASE("three-fleet stage splits the prize proportionally") {
    GameSpec g = single_stage_spec(3, 220000.0, 1.0, 12.0);
    JointStrategy x = scalar_strategy({121.0, 275.0, 532.0});
    StageEvaluation ev = evaluate_stage(g, x, 0);
    const double t = 121.0 + 275.0 + 532.0 + 1.0;
    CHECK(ev.payoffs[0] == doctest::Approx(220000.0 * 121.0 / t));
    CHECK(ev.payoffs[1] == doctest::Approx(220000.0 * 275.0 / t));
    CHECK(ev.payoffs[2] == doctest::Approx(220000.0 * 532.0 / t));
    // independent summation oracle for the conservation identity
    double independent_sum = 0.0;
    for (int i = 0; i < 3; ++i) independent_sum += 220000.0 * x.per_player[i][0] / t;
    CHECK(std::abs(220000.0 - ev.loss - independent_sum) <= 1e-10 * 220000.0);
    CHECK(ev.costs[0] == doctest::Approx(12.0 * 121.0));
}

TEST_CASE("stage errors: bad stage index, bad dimensions, bad epsilon") {
    GameSpec g = single_stage_spec(2, 10.0, 1.0, 0.0);
    CHECK_THROWS_AS(evaluate_stage(g, scalar_strategy({1.0, 1.0}), 1), SpecError);
    CHECK_THROWS_AS(evaluate_stage(g, scalar_strategy({1.0}), 0), SpecError);
    GameSpec bad = g;
    bad.fictitious_participations[0] = 0.0;
    CHECK_THROWS_AS(evaluate_stage(bad, scalar_strategy({1.0, 1.0}), 0), SpecError);
    CHECK_THROWS_AS(bad.validate(), SpecError);
}

TEST_CASE("total profit: symmetric, zero, and brute-force random instances") {
    GameSpec g = single_stage_spec(2, 10.0, 1.0, 0.0);
    CHECK(total_profit(g, scalar_strategy({1.0, 1.0}), 0) == doctest::Approx(10.0 / 3.0));
    CHECK(total_profit(g, scalar_strategy({0.0, 5.0}), 0) == 0.0);

    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        GameSpec spec = random_spec(rng);
        JointStrategy x = random_feasible(rng, spec);
        for (int i = 0; i < spec.n_players; ++i)
            CHECK(total_profit(spec, x, i) ==
                  doctest::Approx(brute_profit(spec, x, i)).epsilon(1e-12));
    }
}

TEST_CASE("gradient at the origin equals W/eps for a single player") {
    GameSpec g = single_stage_spec(1, 10.0, 1.0, 0.0);
    Vec grad = profit_gradient(g, scalar_strategy({0.0}), 0);
    CHECK(grad[0] == doctest::Approx(10.0));
}

TEST_CASE("gradient matches central finite differences on random instances") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        GameSpec spec = random_spec(rng);
        JointStrategy x = random_feasible(rng, spec);
        for (int i = 0; i < spec.n_players; ++i) {
            Vec g = profit_gradient(spec, x, i);
            Vec fd = fd_gradient(spec, x, i);
            const double rel = (g - fd).norm() / std::max(1.0, g.norm());
            CHECK(rel <= 1e-6);
        }
    }
}

TEST_CASE("symmetric players have equal gradients") {
    GameSpec g = single_stage_spec(2, 10.0, 1.0, 0.3);
    JointStrategy x = scalar_strategy({1.5, 1.5});
    Vec g0 = profit_gradient(g, x, 0);
    Vec g1 = profit_gradient(g, x, 1);
    CHECK((g0 - g1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pseudo-gradient stacks negated gradients") {
    std::mt19937_64 rng(5);
    GameSpec spec = random_spec(rng);
    JointStrategy x = random_feasible(rng, spec);
    Vec F = pseudo_gradient(spec, x);
    for (int i = 0; i < spec.n_players; ++i) {
        Vec gi = profit_gradient(spec, x, i);
        CHECK((F.segment(i * spec.dim(), spec.dim()) + gi).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("pseudo-gradient is strongly monotone and Lipschitz on a price-coupled game") {
    std::mt19937_64 rng(17);
    RandomSpecOptions opt;
    opt.force_dynamic_cost = true;
    opt.max_players = 3;
    GameSpec spec = random_spec(rng, opt);

    // estimate a Lipschitz bound from one batch, verify on a fresh one
    double l_hat = 0.0;
    for (int t = 0; t < 200; ++t) {
        JointStrategy a = random_feasible(rng, spec), b = random_feasible(rng, spec);
        Vec da = a.stacked() - b.stacked();
        if (da.norm() < 1e-9) continue;
        Vec dF = pseudo_gradient(spec, a) - pseudo_gradient(spec, b);
        l_hat = std::max(l_hat, dF.norm() / da.norm());
    }
    l_hat *= 1.05;
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        JointStrategy a = random_feasible(rng, spec), b = random_feasible(rng, spec);
        Vec da = a.stacked() - b.stacked();
        if (da.norm() < 1e-9) continue;
        Vec dF = pseudo_gradient(spec, a) - pseudo_gradient(spec, b);
        CHECK(dF.norm() <= l_hat * da.norm());
        CHECK(dF.dot(da) > 0.0); // strong monotonicity probe
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("conservation holds on random feasible strategies") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        GameSpec spec = random_spec(rng);
        JointStrategy x = random_feasible(rng, spec);
        for (int k = 0; k < spec.n_stages; ++k) {
            StageEvaluation ev = evaluate_stage(spec, x, k);
            const double W = spec.stage_prizes[k];
            CHECK(std::abs(W - ev.loss - ev.payoffs.sum()) <= 1e-10 * std::max(1.0, W));
            CHECK(ev.loss >= 0.0);
            CHECK(ev.loss <= W + 1e-12);
            for (int i = 0; i < spec.n_players; ++i) {
                CHECK(ev.payoffs[i] >= 0.0);
                CHECK(ev.payoffs[i] <= W + 1e-12);
            }
        }
    }
}

TEST_CASE("raising any weighted coordinate strictly lowers the stage loss") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        GameSpec spec = random_spec(rng);
        JointStrategy x = random_feasible(rng, spec);
        const int k = 0;
        StageEvaluation before = evaluate_stage(spec, x, k);
        for (int j = 0; j < spec.n_categories; ++j) {
            if (spec.participation_weights[j] <= 0.0) continue;
            JointStrategy y = x;
            y.per_player[0][k * spec.n_categories + j] += 0.25;
            CHECK(evaluate_stage(spec, y, k).loss < before.loss);
        }
    }
}

TEST_CASE("linear cost with several categories charges the category sum") {
    GameSpec g;
    g.n_players = 1;
    g.n_stages = 1;
    g.n_categories = 3;
    g.stage_prizes = Vec::Constant(1, 5.0);
    g.fictitious_participations = Vec::Constant(1, 1.0);
    g.participation_weights = (Vec(3) << 1.0, 0.5, 0.25).finished();
    g.cost = LinearCost{Vec::Constant(1, 2.0)};
    g.constraints.push_back(box_constraints(Vec::Constant(3, 10.0)));
    g.validate();
    JointStrategy x;
    x.per_player.push_back((Vec(3) << 1.0, 2.0, 3.0).finished());
    CHECK(evaluate_stage(g, x, 0).costs[0] == doctest::Approx(2.0 * 6.0));
    Vec grad = profit_gradient(g, x, 0);
    // cost gradient contributes the constant beta in every category
    const double t = g.participation_weights.dot(x.per_player[0]) + 1.0;
    Vec expected = (5.0 * 1.0 / (t * t)) * g.participation_weights;
    expected.array() -= 2.0;
    CHECK((grad - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dynamic price cost matches its formula") {
    std::mt19937_64 rng(77);
    RandomSpecOptions opt;
    opt.force_dynamic_cost = true;
    GameSpec spec = random_spec(rng, opt);
    JointStrategy x = random_feasible(rng, spec);
    const auto& dyn = std::get<DynamicPriceCost>(spec.cost);
    const int m = spec.n_categories;
    for (int k = 0; k < spec.n_stages; ++k) {
        StageEvaluation ev = evaluate_stage(spec, x, k);
        Vec total = Vec::Zero(m);
        for (int j = 0; j < spec.n_players; ++j) total += x.per_player[j].segment(k * m, m);
        for (int i = 0; i < spec.n_players; ++i) {
            const Vec xi = x.per_player[i].segment(k * m, m);
            const double expected =
                xi.dot(dyn.alphas[k] * total + dyn.r.row(k).transpose());
            CHECK(ev.costs[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("spec validation rejects bad weights and alphas") {
    std::mt19937_64 rng(3);
    GameSpec g = random_spec(rng);
    GameSpec bad = g;
    bad.participation_weights = Vec::Zero(g.n_categories);
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = g;
    bad.participation_weights[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = g;
    DynamicPriceCost c;
    c.alphas = Vec::Constant(g.n_stages, -0.5);
    c.r = Mat::Zero(g.n_stages, g.n_categories);
    bad.cost = c;
    CHECK_THROWS_AS(bad.validate(), SpecError);
}

TEST_CASE("constraint geometry reports box bounds and rejects empty sets") {
    PlayerConstraints box = box_constraints((Vec(2) << 2.0, 3.0).finished());
    ConstraintGeometry geo = analyze_constraints(box, 2);
    CHECK(std::abs(geo.lower[0]) < 1e-9);
    CHECK(geo.upper[0] == doctest::Approx(2.0));
    CHECK(geo.upper[1] == doctest::Approx(3.0));
    CHECK(geo.slater_slack > 0.5);

    PlayerConstraints empty = box;
    empty.ineq_A = Mat(1, 2);
    empty.ineq_A << -1.0, 0.0;
    empty.ineq_b = Vec::Constant(1, -5.0); // x_1 >= 5 with nothing above
    CHECK_THROWS_AS(analyze_constraints(empty, 2), InfeasibleError);

    PlayerConstraints unbounded;
    unbounded.ineq_A = Mat(0, 2);
    unbounded.ineq_b = Vec(0);
    unbounded.eq_A = Mat(0, 2);
    unbounded.eq_b = Vec(0);
    CHECK_THROWS_AS(analyze_constraints(unbounded, 2), InfeasibleError);
}

} // TEST_SUITE
