#pragma once

#include "tullock/blotto.hpp"
#include "tullock/centralized.hpp"
#include "tullock/rhg.hpp"

#include <string>
#include <vector>

namespace tullock {

/// Built-in two-level ride-hailing study: an upper-level fleet-split contest
/// across city regions and a lower-level charging-scheduling horizon game
/// inside the first region. The lower-level temporal profiles are synthetic
/// defaults (midday demand peak, cheap off-peak charging), not measured data.
struct CaseStudyConfig {
    Vec fleet_budgets = (Vec(3) << 200.0, 500.0, 1000.0).finished();
    Vec region_prizes = (Vec(4) << 220e3, 100e3, 50e3, 35e3).finished();
    Vec beta_template = (Vec(4) << 12.0, 9.0, 6.0, 3.0).finished();
    double blotto_epsilon = 1.0; // per-region fictitious participation
    double theta = 1.0;
    double theta_min = 0.1;
    double theta_max = 12.0;
    int theta_grid = 20;

    int total_steps = 9;
    std::vector<int> horizons = {3, 6, 9};
    Vec initial_shares = (Vec(3) << 0.05, 0.10, 0.85).finished(); // red, yellow, green

    unsigned long seed = 20240u;
    SolverConfig solver = []() {
        SolverConfig c;
        c.tol = 1e-8;
        return c;
    }();
};

BlottoSpec upper_level_spec(const CaseStudyConfig& cfg, double theta);

/// Battery-category shift dynamics: per step a fraction of every uncharged
/// category drains one level while charged vehicles reappear in the top
/// category, so 1'y is the fleet size at every step. States and inputs are
/// [red, yellow, green].
RhgPlayerSpec battery_player(double fleet, const Vec& shares, int total_steps,
                             double keep_green = 0.6, double keep_yellow = 0.5);

/// Shipped synthetic daily profiles for the lower level.
StageMarket synthetic_market(const CaseStudyConfig& cfg);

struct PoaRow {
    double theta = 0.0;
    double welf_so = 0.0;
    double welf_ne = 0.0;
    double poa = 0.0;
    Vec profits_ne;
    Vec profits_so;
};

std::vector<PoaRow> run_poa_sweep(const CaseStudyConfig& cfg);

struct FleetResult {
    double theta = 0.0;
    Mat alloc_iterative;      // N x K_r
    Mat alloc_semi;           // N x K_r
    double disagreement = 0.0;
    Vec profits;              // at the certified equilibrium
    double max_delta_iterative = 0.0;
    double max_delta_semi = 0.0;
};

FleetResult run_fleet(const CaseStudyConfig& cfg);

struct HorizonResult {
    Vec fleets; // region-1 sub-fleet sizes from the upper level
    std::vector<int> horizons;
    std::vector<RhgTrace> traces;
};

HorizonResult run_horizon(const CaseStudyConfig& cfg);

using WallTimes = std::vector<std::pair<std::string, double>>;

/// CSV + manifest emission; returns the list of files written.
std::vector<std::string> emit_poa(const std::vector<PoaRow>& rows, const CaseStudyConfig& cfg,
                                  const std::string& out_dir, const WallTimes& times = {});
std::vector<std::string> emit_fleet(const FleetResult& res, const CaseStudyConfig& cfg,
                                    const std::string& out_dir, const WallTimes& times = {});
std::vector<std::string> emit_horizon(const HorizonResult& res, const CaseStudyConfig& cfg,
                                      const std::string& out_dir, const WallTimes& times = {});

} // namespace tullock
