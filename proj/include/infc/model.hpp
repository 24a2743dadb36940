#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace infc {

// Complexity family of a computational flow class: the growth of the time
// needed to process a backlog of m packets. All representatives pass through
// the origin so that thresholds are well defined at m -> 0.
enum class ComplexityFamily { Search, MapReduce, Classification, Custom };

// Per-node computation delay cost model used by the MinCost objective.
enum class CostModel { SearchConcave, MapReduceLinear, ClassificationConvex };

std::string to_string(ComplexityFamily f);
std::string to_string(CostModel m);
ComplexityFamily complexity_from_string(const std::string& s);
CostModel cost_model_from_string(const std::string& s);

// Default pairing between a complexity family and a cost model.
CostModel default_cost_model(ComplexityFamily f);

// A computational flow class c: what function is computed, how expensive it
// is, and how compressible its output is.
struct FunctionClass {
    std::string id;
    ComplexityFamily complexity = ComplexityFamily::MapReduce;
    double k = 1.0;             // cost scaling
    double surjectivity = 1.0;  // Gamma_c in [0,1]
    // Only for ComplexityFamily::Custom; must be nondecreasing with d(0)=0.
    std::function<double(double)> custom_complexity;
};

// d_f(m): effective processing complexity of a backlog of m packets.
// Search: log(1+m), MapReduce: m, Classification: exp(m)-1.
double effective_complexity(const FunctionClass& fc, double m);

// Network topology, routing and rates. Immutable after construction
// by convention; all entries are plain values.
//
// routing[c](v, w) is the probability that a class-c packet finishing
// service at node v is routed to node w; the row slack
// 1 - sum_w routing[c](v, w) is the departure probability of node v.
struct NetworkSpec {
    int node_count = 0;
    std::vector<FunctionClass> classes;
    std::vector<Eigen::MatrixXd> routing;        // per class, |V| x |V|
    std::vector<Eigen::VectorXd> arrival_split;  // per class, p_v^arr
    std::vector<double> external_rate;           // per class, beta^c
    Eigen::MatrixXd service_rate;                // (node, class), mu_v^c

    int class_count() const { return static_cast<int>(classes.size()); }
    // 1 - row sum of routing[c]; >= 0 in a valid spec.
    Eigen::VectorXd departure_prob(int c) const;
};

// One violated invariant, with coordinates where applicable.
struct Violation {
    std::string code;     // stable identifier, e.g. "arrival_split_not_stochastic"
    std::string message;  // human-readable detail
    int node = -1;        // -1 when not node-specific
    int cls = -1;         // -1 when not class-specific
};

// Checks every NetworkSpec invariant and returns the violations found
// (empty means valid). Pure: never throws, never mutates.
std::vector<Violation> validate_network(const NetworkSpec& spec);

// Per node x class operating point: arrival rate, processing factor,
// utilization and queue contents.
struct FlowAssignment {
    Eigen::MatrixXd lambda;   // arrival rates (node, class)
    Eigen::MatrixXd gamma;    // processing factors
    Eigen::MatrixXd rho;      // lambda / mu
    Eigen::MatrixXd m_queue;  // avg packets awaiting communication
    Eigen::MatrixXd l_total;  // avg packets in node
    Eigen::MatrixXd delay;    // W per node/class

    static FlowAssignment zeros(int nodes, int classes);
};

// Checks FlowAssignment invariants against a spec (rho < 1,
// Gamma*lambda <= gamma <= lambda, M = L(1-gamma/lambda)).
std::vector<Violation> validate_assignment(const NetworkSpec& spec,
                                           const FlowAssignment& a);

}  // namespace infc
