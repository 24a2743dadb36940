#pragma once

#include <optional>
#include <string>

#include "infc/config.hpp"

namespace infc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitSimulation = 4;

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> replications;
};

// Each command writes its tables under the scenario's output directory and
// returns a process exit code. Outputs are deterministic given config+seed;
// re-running overwrites them byte-identically.
int run_validate(const Scenario& sc);
int run_threshold(const Scenario& sc, const CliOverrides& ov = {});
int run_mincost(const Scenario& sc, const CliOverrides& ov = {});
int run_simulate(const Scenario& sc, const CliOverrides& ov = {});
int run_entropy(const Scenario& sc, const CliOverrides& ov = {});
// Direct entropy run on a function-table file (no scenario needed).
int run_entropy_table(const std::string& table_path, const CliOverrides& ov = {});

}  // namespace infc
