#include "tullock/rhg.hpp"

#include "tullock/linalg.hpp"

#include <cmath>

namespace tullock {

void RhgPlayerSpec::validate() const {
    if (A.rows() != A.cols()) throw SpecError("rhg: A must be square");
    if (B.rows() != A.rows()) throw SpecError("rhg: B must have m_y rows");
    if (G.cols() != A.rows() || H.cols() != B.cols() || G.rows() != H.rows())
        throw SpecError("rhg: G/H dimensions inconsistent");
    if (d.cols() != G.rows()) throw SpecError("rhg: d must have m_d columns");
    if (y0.size() != A.rows()) throw SpecError("rhg: y0 must have length m_y");
    if (p_y.size() != A.rows() || p_u.size() != B.cols())
        throw SpecError("rhg: participation vectors have wrong length");
}

PlayerConstraints lift_constraints(const RhgPlayerSpec& p, int T) {
    p.validate();
    if (T < 1) throw SpecError("rhg: horizon must be >= 1");
    if (p.d.rows() < T) throw SpecError("rhg: not enough per-step constraint data for horizon");
    const int my = p.m_y();
    const int mu = p.m_u();
    const int md = p.m_d();
    const int m = mu + 1;  // decision slot layout [phi, u']
    const int dim = T * m;

    Mat Su = Mat::Zero(mu, m);
    Su.block(0, 1, mu, mu) = Mat::Identity(mu, mu);
    Vec w = Vec::Zero(m);
    w[0] = 1.0;

    // powers of A and the input-to-state maps Sigma_k
    std::vector<Mat> Apow(T + 1);
    Apow[0] = Mat::Identity(my, my);
    for (int k = 1; k <= T; ++k) Apow[k] = p.A * Apow[k - 1];

    PlayerConstraints c;
    c.eq_A = Mat::Zero(T, dim);
    c.eq_b = Vec::Zero(T);
    c.ineq_A = Mat::Zero(T * md, dim);
    c.ineq_b = Vec::Zero(T * md);

    for (int k = 0; k < T; ++k) {
        Mat sigma = Mat::Zero(my, k * m); // [A^{k-1} B Su | ... | A^0 B Su]
        for (int l = 0; l < k; ++l)
            sigma.block(0, l * m, my, m) = Apow[k - 1 - l] * p.B * Su;
        const Vec z = -(Apow[k] * p.y0);

        Eigen::RowVectorXd eq_row = Eigen::RowVectorXd::Zero(dim);
        if (k > 0) eq_row.head(k * m) = p.p_y.transpose() * sigma;
        eq_row.segment(k * m, m) = (p.p_u.transpose() * Su) - w.transpose();
        c.eq_A.row(k) = eq_row;
        c.eq_b[k] = p.p_y.dot(z);

        Mat iq_block = Mat::Zero(md, dim);
        if (k > 0) iq_block.leftCols(k * m) = p.G * sigma;
        iq_block.block(0, k * m, md, m) = p.H * Su;
        c.ineq_A.block(k * md, 0, md, dim) = iq_block;
        c.ineq_b.segment(k * md, md) = p.d.row(k).transpose() + p.G * z;
    }

    try {
        analyze_constraints(c, dim, /*require_strict_slack=*/false);
    } catch (const InfeasibleError& e) {
        // attribute the failure to the first offending step: emptiness via
        // prefix feasibility, unboundedness via per-step coordinate bounds
        auto feasible = [&](const PlayerConstraints& cc) {
            return linalg::solve_lp(Vec::Zero(dim), cc.ineq_A, cc.ineq_b, cc.eq_A, cc.eq_b)
                       .status != linalg::LpStatus::Infeasible;
        };
        if (!feasible(c)) {
            for (int k = 0; k < T; ++k) {
                PlayerConstraints prefix;
                prefix.eq_A = c.eq_A.topRows(k + 1);
                prefix.eq_b = c.eq_b.head(k + 1);
                prefix.ineq_A = c.ineq_A.topRows((k + 1) * md);
                prefix.ineq_b = c.ineq_b.head((k + 1) * md);
                if (!feasible(prefix))
                    throw InfeasibleError("rhg: lifted polytope invalid at step " +
                                          std::to_string(k) + " (" + e.what() + ")");
            }
        }
        for (int j = 0; j < dim; ++j) {
            Vec obj = Vec::Zero(dim);
            obj[j] = 1.0;
            if (linalg::solve_lp(obj, c.ineq_A, c.ineq_b, c.eq_A, c.eq_b).status ==
                linalg::LpStatus::Unbounded)
                throw InfeasibleError("rhg: lifted polytope unbounded at step " +
                                      std::to_string(j / m) + " (" + e.what() + ")");
        }
        throw;
    }
    return c;
}

GameSpec build_rhg_game(const std::vector<RhgPlayerSpec>& players, const StageMarket& market,
                        int T) {
    if (players.empty()) throw SpecError("rhg: at least one player required");
    if (market.steps() < T || market.epsilons.size() < T || market.alphas.size() < T ||
        market.r.rows() < T)
        throw SpecError("rhg: market profile shorter than the horizon");
    const int mu = players[0].m_u();
    for (const auto& p : players)
        if (p.m_u() != mu) throw SpecError("rhg: players must share the input dimension");
    if (market.r.cols() != mu) throw SpecError("rhg: market r must have m_u columns");

    GameSpec g;
    g.n_players = static_cast<int>(players.size());
    g.n_stages = T;
    g.n_categories = mu + 1;
    g.stage_prizes = market.prizes.head(T);
    g.fictitious_participations = market.epsilons.head(T);
    g.participation_weights = Vec::Zero(mu + 1);
    g.participation_weights[0] = 1.0;

    DynamicPriceCost cost;
    cost.alphas = market.alphas.head(T);
    cost.r = Mat::Zero(T, mu + 1);
    cost.r.rightCols(mu) = market.r.topRows(T);
    cost.mask = Vec::Ones(mu + 1);
    cost.mask[0] = 0.0; // prices act on the control slots only
    g.cost = cost;

    for (const auto& p : players) g.constraints.push_back(lift_constraints(p, T));
    g.validate();
    return g;
}

SolveReport solve_open_loop(const std::vector<RhgPlayerSpec>& players, const StageMarket& market,
                            int T, const SolverConfig& config) {
    return solve_ne(build_rhg_game(players, market, T), config);
}

namespace {

RhgPlayerSpec window(const RhgPlayerSpec& p, int start, int T, const Vec& state) {
    RhgPlayerSpec w = p;
    w.d = p.d.middleRows(start, T);
    w.y0 = state;
    return w;
}

StageMarket window(const StageMarket& mk, int start, int T) {
    StageMarket w;
    w.prizes = mk.prizes.segment(start, T);
    w.epsilons = mk.epsilons.segment(start, T);
    w.alphas = mk.alphas.segment(start, T);
    w.r = mk.r.middleRows(start, T);
    return w;
}

// realized one-step evaluation at absolute step `step`
StageEvaluation realize_step(const std::vector<RhgPlayerSpec>& players, const StageMarket& mk,
                             int step, const std::vector<Vec>& states,
                             const std::vector<Vec>& inputs) {
    const int N = static_cast<int>(players.size());
    const int mu = players[0].m_u();
    GameSpec g;
    g.n_players = N;
    g.n_stages = 1;
    g.n_categories = mu + 1;
    g.stage_prizes = Vec::Constant(1, mk.prizes[step]);
    g.fictitious_participations = Vec::Constant(1, mk.epsilons[step]);
    g.participation_weights = Vec::Zero(mu + 1);
    g.participation_weights[0] = 1.0;
    DynamicPriceCost cost;
    cost.alphas = Vec::Constant(1, mk.alphas[step]);
    cost.r = Mat::Zero(1, mu + 1);
    cost.r.rightCols(mu) = mk.r.row(step);
    cost.mask = Vec::Ones(mu + 1);
    cost.mask[0] = 0.0;
    g.cost = cost;

    JointStrategy x;
    x.per_player.resize(N);
    for (int i = 0; i < N; ++i) {
        Vec xi(mu + 1);
        xi[0] = players[i].p_y.dot(states[i]) + players[i].p_u.dot(inputs[i]);
        xi.tail(mu) = inputs[i];
        x.per_player[i] = xi;
    }
    return evaluate_stage(g, x, 0);
}

} // namespace

RhgTrace run_receding_horizon(const std::vector<RhgPlayerSpec>& players,
                              const StageMarket& market, int T, const SolverConfig& config) {
    const int N = static_cast<int>(players.size());
    const int T_total = market.steps();
    if (T < 1 || T > T_total) throw SpecError("rhg: horizon must satisfy 1 <= T <= T_total");
    for (const auto& p : players)
        if (p.d.rows() < T_total) throw SpecError("rhg: per-step data shorter than T_total");

    RhgTrace trace;
    trace.horizon = T;
    trace.total_steps = T_total;
    trace.realized_profit = Vec::Zero(N);
    trace.per_step_loss = Vec::Zero(T_total);

    std::vector<Vec> states;
    for (const auto& p : players) states.push_back(p.y0);

    const int n_total = T_total - T + 1;
    const int mu = players[0].m_u();
    const int m = mu + 1;

    for (int s = 0; s < n_total; ++s) {
        std::vector<RhgPlayerSpec> wp;
        for (int i = 0; i < N; ++i) wp.push_back(window(players[i], s, T, states[i]));
        SolveReport rep = solve_open_loop(wp, window(market, s, T), T, config);
        trace.solves.push_back(rep);
        if (!rep.converged) {
            trace.aborted = true;
            trace.abort_reason = "equilibrium solve did not converge at step " +
                                 std::to_string(s);
            return trace;
        }
        const int apply = (s == n_total - 1) ? T : 1;
        for (int tau = 0; tau < apply; ++tau) {
            RhgStepRecord rec;
            rec.states = states;
            rec.inputs.resize(N);
            for (int i = 0; i < N; ++i)
                rec.inputs[i] = rep.strategy.per_player[i].segment(tau * m + 1, mu);
            rec.evaluation = realize_step(players, market, s + tau, rec.states, rec.inputs);
            for (int i = 0; i < N; ++i)
                trace.realized_profit[i] += rec.evaluation.payoffs[i] - rec.evaluation.costs[i];
            trace.per_step_loss[s + tau] = rec.evaluation.loss;
            for (int i = 0; i < N; ++i)
                states[i] = players[i].A * states[i] + players[i].B * rec.inputs[i];
            trace.steps.push_back(std::move(rec));
        }
    }
    return trace;
}

} // namespace tullock
