#pragma once

#include "tullock/blotto.hpp"
#include "tullock/game.hpp"
#include "tullock/ne_solver.hpp"
#include "tullock/rhg.hpp"

#include <optional>
#include <string>
#include <vector>

// single-header nlohmann/json lives in vendor/
#include "json.hpp"

namespace tullock::io {

using json = nlohmann::json;

/// Parsed spec file: the general game plus the optional budget-split and
/// horizon-game sections.
struct SpecFile {
    int version = 1;
    GameSpec game;
    std::optional<BlottoSpec> blotto;
    std::optional<std::vector<RhgPlayerSpec>> rhg_players;
    std::optional<StageMarket> rhg_market;
    int rhg_horizon = 0;
};

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j, int expected_cols = -1);

json spec_to_json(const SpecFile& f);
SpecFile spec_from_json(const json& j);

/// Reads and validates a spec file; throws SpecError with the path on any
/// parse or schema problem.
SpecFile load_spec_file(const std::string& path);
void save_spec_file(const SpecFile& f, const std::string& path);

json strategy_to_json(const JointStrategy& x);
JointStrategy strategy_from_json(const json& j);
json certificate_to_json(const OptimalityCertificate& c);
json solve_report_to_json(const SolveReport& r);
json blotto_solution_to_json(const BlottoSolution& s);

/// Loads an emitted equilibrium file and re-verifies feasibility and the
/// stored certificate against the spec; throws on any violation.
JointStrategy load_and_verify_solution(const std::string& path, const GameSpec& spec,
                                       double tol = 1e-6);

/// Writes rows of doubles under a header line with stable %.17g formatting.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// FNV-1a over a canonical string; used for the run manifest's config hash.
std::string fnv1a_hex(const std::string& s);

/// Run manifest referencing every emitted file.
void write_manifest(const std::string& out_dir, const std::string& config_dump,
                    unsigned long seed, const std::vector<std::string>& files,
                    const std::vector<std::pair<std::string, double>>& wall_times);

} // namespace tullock::io
