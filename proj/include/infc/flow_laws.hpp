#pragma once

#include <optional>
#include <vector>

#include "infc/model.hpp"

namespace infc {

// Operating point of one (node, class) pair, as used by the closed-form
// stationary laws. Entropies are in bits.
struct NodeClassState {
    double lambda = 0.0;       // arrival rate, > 0
    double mu = 0.0;           // service rate, > 0
    double surjectivity = 0.0; // Gamma_c
    FunctionClass complexity;  // d_f family
    double h_func = 0.0;       // H_G(f_c(X_1^N)) >= 0
    double h_source = 1.0;     // H(X_1^N) > 0

    double rho() const { return lambda / mu; }
};

// Throws InvalidArgument when the state violates its invariants
// (rho in (0,1), h_func <= h_source, positive rates).
void check_state(const NodeClassState& s);

struct DelayComponents {
    double comp = 0.0;   // d_f(m) / lambda
    double comm = 0.0;   // 1 / (mu - gamma)
    double total = 0.0;  // W = comp + comm
};

// Delay split of one node/class at processing factor `gamma` and backlog m.
// Throws InstabilityError when gamma >= mu.
DelayComponents delay_components(const NodeClassState& s, double gamma, double m);

struct QueueLengths {
    double l_total = 0.0;  // L = gamma * W
    double m_comm = 0.0;   // M = L (1 - gamma/lambda)
};

// Little's law applied with the processing factor as effective rate.
QueueLengths little_queue_length(const NodeClassState& s, double gamma, double m);

// Self-consistent backlog: M = L(1 - gamma/lambda) with L from Little's law,
// resolved by damped fixed-point iteration (step 0.5, tol 1e-9, <= 1000
// iterations). Throws SolverError when the iteration does not settle.
double solve_backlog_fixed_point(const NodeClassState& s, double gamma,
                                 double damping = 0.5, double tol = 1e-9,
                                 int max_iterations = 1000);

struct FlowBounds {
    double lower = 0.0;  // h/2 + 1 - sqrt((h/2)^2 + 1)
    double upper = 0.0;  // M with no computation: lambda / (mu (1 - rho))
    // Mid-proof assumption d_f(M)/lambda >= 1/mu, reported but not enforced.
    bool comp_time_dominates = true;
};

// Bounds on the long-term average number of packets in the node.
FlowBounds flow_bounds(const NodeClassState& s);

// Entropy-driven floor on the processing factor:
// mu (h/2 + 1 - sqrt(h^2/4 + 1)); always in [0, mu).
double gamma_floor_from_entropy(const NodeClassState& s);

// True iff d_f(m) > m (strict), the stationarity requirement on computation.
bool stability_check(const NodeClassState& s, double m);

// One feasible-gamma interval [lo, hi); hi_open marks the exclusive end.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool hi_open = true;
};

struct ProcessingFactorRoots {
    double a = 0.0;  // (lambda + mu + lambda/d_f(m)) / 2
    bool has_real_roots = false;
    double gamma_low = 0.0;   // a - sqrt(a^2 - lambda mu), when real
    double gamma_high = 0.0;  // a + sqrt(a^2 - lambda mu)
    // Solution set of the quadratic inequality intersected with
    // [Gamma*lambda, min(lambda, mu)).
    std::vector<Interval> feasible;
};

// Roots of gamma^2 - 2 a gamma + lambda mu = 0 and the feasible set of the
// generated-flow inequality. A negative discriminant means the inequality
// holds everywhere; the full physical interval is returned.
ProcessingFactorRoots processing_factor_roots(const NodeClassState& s, double m);

// Relaxed load threshold rho_th(d) = sqrt((d/2)^2 + d) - d/2.
double rho_threshold(double d);

struct LoadThreshold {
    double rho_th = 0.0;  // relaxed threshold
    double d = 0.0;       // d_f(m) used
    double gamma = 0.0;   // Gamma_c used by the exact predicate
    // Exact admission predicate: rho^2/(1-rho) > d (1-rho Gamma)/(1-Gamma).
    bool admits(double rho) const;
};

// Relaxed threshold plus the exact admission predicate. Throws
// InstabilityError when Gamma_c = 1 (predicate undefined, no compression).
LoadThreshold load_threshold(const NodeClassState& s, double m);

}  // namespace infc
