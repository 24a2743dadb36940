#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infc/graph_entropy.hpp"
#include "infc/model.hpp"

namespace infc {

enum class SweepKind { None, ThresholdVsM, MinCostVsK, MinCostVsSurjectivity, Custom };
std::string to_string(SweepKind s);

enum class SimPolicy { Relay, Surjectivity, MinCost };

struct SimSettings {
    double horizon = 1e4;
    double warmup = 0.1;
    int replications = 4;
    std::uint64_t seed = 1;
    SimPolicy policy = SimPolicy::Surjectivity;
    bool parallel = true;
    long long queue_cap = 1000000;
    bool trace = false;
    std::size_t trace_max = 10000;
    bool explicit_computation = false;
    Eigen::MatrixXd computation_rate;  // (node, class) when explicit
};

// Classes whose surjectivity was computed from a function table.
struct AutoEntropyInfo {
    int class_index = 0;
    std::string table_path;
    int target_variable = 0;
    EntropyResult entropy;
    double h_source = 0.0;
    CharacteristicGraph graph;
};

// One scenario: network + classes + experiment, as loaded from a config file.
struct Scenario {
    std::string name = "scenario";
    NetworkSpec spec;
    std::vector<CostModel> cost_models;  // per class
    std::vector<double> h_func;          // per class, bits; 0 when unknown
    SweepKind sweep = SweepKind::None;
    std::vector<double> m_grid;
    std::vector<double> k_grid;
    std::vector<double> gamma_grid;
    std::string out_dir = "out";
    SimSettings sim;
    std::vector<AutoEntropyInfo> auto_entropy;

    std::string config_path;
    std::uint64_t config_hash = 0;
};

// Parses a scenario config. Throws InvalidArgument with key-path (and, for
// syntax errors, line) context. Function tables referenced by
// surjectivity:"auto" classes are resolved relative to the config file and
// evaluated here.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& origin_path);

// NetworkSpec <-> JSON round trip used by the config format and tests.
std::string network_to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(const std::string& json_text);

}  // namespace infc
