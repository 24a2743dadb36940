#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infc/model.hpp"

namespace infc {

// Discrete-event simulation of the open multi-class network: Poisson
// external arrivals split over nodes, a zero-time computation stage realized
// as probabilistic thinning with survival probability gamma/lambda, then an
// exponential FIFO communication server per (node, class), then Markov
// routing or departure.
struct SimConfig {
    NetworkSpec spec;
    FlowAssignment assignment;  // the gamma policy under test
    double horizon = 1e4;       // simulated time
    double warmup = 0.1;        // fraction of the horizon discarded, in [0, 0.9]
    std::uint64_t seed = 1;
    int replications = 1;
    bool parallel = false;      // replications across threads
    long long queue_cap = 1000000;  // divergence detector

    // Sensitivity variant: model computation as an explicit exponential
    // server (rate computation_rate) in front of the communication queue.
    // Not product-form; off by default.
    bool explicit_computation_stage = false;
    Eigen::MatrixXd computation_rate;

    // Bounded event-trace capture (replication 0 only).
    bool collect_trace = false;
    std::size_t trace_max_records = 10000;
};

struct TraceRecord {
    double time = 0.0;
    char kind = '?';  // a=arrival, k=thinned, s=service start, e=emit, d=depart
    int node = 0;
    int cls = 0;
    long long packet = 0;
};

struct NodeClassStats {
    double l_mean = 0.0, l_se = 0.0;            // avg packets in node
    double w_mean = 0.0, w_se = 0.0;            // sojourn of admitted packets
    double lambda_mean = 0.0, lambda_se = 0.0;  // arrival rate (pre-thinning)
    double gamma_mean = 0.0, gamma_se = 0.0;    // emission rate
    double p_dep_mean = 0.0, p_dep_se = 0.0;    // empirical departure fraction
    double littles_gap = 0.0;  // |L - gamma W| / max(L, eps)
    double traffic_gap = 0.0;  // relative residual of the traffic equation
};

struct SimReport {
    int nodes = 0;
    int classes = 0;
    int replications = 0;
    std::vector<NodeClassStats> stats;  // index node*classes + cls

    bool diverged = false;
    std::string divergence_info;
    long long events_processed = 0;
    bool conservation_ok = true;  // arrivals == kills + departures + in-system

    // Per-replication raw estimates (node x class), merged by index.
    std::vector<Eigen::MatrixXd> rep_l, rep_w, rep_lambda, rep_gamma, rep_pdep;
    std::vector<TraceRecord> trace;

    const NodeClassStats& at(int v, int c) const { return stats[v * classes + c]; }
};

// Runs `config.replications` independent replications (parallel when asked;
// identical results either way) and merges them by replication index.
SimReport run(const SimConfig& config);

struct AuditResult {
    std::vector<char> pass;  // per node*classes+cls
    bool all_pass = true;
};

// Little's-law audit: passes where |L - gamma W| / max(L, eps) <= tol.
AuditResult littles_law_audit(const SimReport& report, double tol);

// TSV export mirroring the mincost solution row format.
std::string format_sim_report(const SimConfig& config, const SimReport& report);

// Event trace as line-delimited records: time, kind, node, class, packet.
std::string format_trace(const SimReport& report);

// Assignment builders for simulation policies.
// Relay: gamma = lambda = (I-P^T)^-1 beta (no thinning).
FlowAssignment relay_assignment(const NetworkSpec& spec);
// Surjectivity floor: lambda from the Gamma-thinned traffic fixed point,
// gamma = Gamma * lambda.
FlowAssignment surjectivity_assignment(const NetworkSpec& spec);

}  // namespace infc
