#pragma once

#include "tullock/game.hpp"
#include "tullock/ne_solver.hpp"

#include <string>
#include <vector>

namespace tullock {

/// One player's linear dynamics, stage constraints and participation
/// functionals for the horizon-game reduction.
struct RhgPlayerSpec {
    Mat A; // m_y x m_y
    Mat B; // m_y x m_u
    Mat G; // m_d x m_y
    Mat H; // m_d x m_u
    Mat d; // steps x m_d, per-step right-hand sides
    Vec y0;
    Vec p_y;
    Vec p_u;

    int m_y() const { return static_cast<int>(A.rows()); }
    int m_u() const { return static_cast<int>(B.cols()); }
    int m_d() const { return static_cast<int>(G.rows()); }
    void validate() const;
};

/// Per-step market parameters (prizes, fictitious participations and the
/// dynamic charging prices acting on the control slots).
struct StageMarket {
    Vec prizes;
    Vec epsilons;
    Vec alphas;
    Mat r; // steps x m_u
    int steps() const { return static_cast<int>(prizes.size()); }
};

/// Encodes dynamics, stage constraints and the participation identity over a
/// horizon of T steps into one polytope on the stacked decision
/// x_{i,k} = [phi_k, u_k']. Build-time feasibility/boundedness failures name
/// the offending step.
PlayerConstraints lift_constraints(const RhgPlayerSpec& p, int T);

/// Assembles the T-stage game over the lifted polytopes: unit weight on the
/// phi slot, dynamic prices masked to the control slots.
GameSpec build_rhg_game(const std::vector<RhgPlayerSpec>& players, const StageMarket& market,
                        int T);

/// Open-loop equilibrium over a T-step horizon.
SolveReport solve_open_loop(const std::vector<RhgPlayerSpec>& players, const StageMarket& market,
                            int T, const SolverConfig& config = {});

struct RhgStepRecord {
    std::vector<Vec> states; // per player, before applying the input
    std::vector<Vec> inputs; // applied inputs
    StageEvaluation evaluation; // realized with realized-time parameters
};

struct RhgTrace {
    int horizon = 0;
    int total_steps = 0;
    std::vector<RhgStepRecord> steps;
    std::vector<SolveReport> solves;
    Vec realized_profit; // per player, summed over all steps
    Vec per_step_loss;
    bool aborted = false;
    std::string abort_reason;
};

/// Receding-horizon rollout: n_total = T_total - T + 1 solves; each applies
/// the first input and advances the state, except the final solve whose
/// whole remaining tail is applied open loop.
RhgTrace run_receding_horizon(const std::vector<RhgPlayerSpec>& players,
                              const StageMarket& market, int T,
                              const SolverConfig& config = {});

} // namespace tullock
