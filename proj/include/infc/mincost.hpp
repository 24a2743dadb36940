#pragma once

#include <string>
#include <vector>

#include "infc/flow_laws.hpp"
#include "infc/model.hpp"

namespace infc {

// Network-wide delay minimization: min sum_{v,c} C_comp + 1/(mu - gamma)
// subject to the traffic coupling lambda = beta + routed gamma, the
// surjectivity floor gamma >= lambda Gamma and gamma <= lambda < mu.
struct MinCostProblem {
    NetworkSpec spec;
    std::vector<CostModel> cost_models;  // per class
    // Optional graph entropy H_G(f_c) in bits per class; adds the
    // entropy-driven floor mu(h/2+1-sqrt(h^2/4+1)) when present.
    std::vector<double> h_func;

    static MinCostProblem from_spec(NetworkSpec spec);
};

enum class ActiveConstraint { Interior, Floor, Ceiling, Pinned };
std::string to_string(ActiveConstraint a);

struct MinCostSolution {
    FlowAssignment assignment;
    double objective = 0.0;
    // Relay-point value of the same objective (gamma = lambda = (I-P^T)^-1 b).
    double no_computation_cost = 0.0;
    double normalized = 0.0;
    Eigen::MatrixXd gamma_floor;    // active lower bound at the solution
    Eigen::MatrixXd gamma_lb;  // (I - P^T Gamma)^-1 beta Gamma, per class
    Eigen::MatrixXd xi;             // duals of gamma <= lambda
    Eigen::MatrixXd zeta;           // duals of gamma >= floor
    Eigen::MatrixXd stationarity;   // per node/class KKT residual
    Eigen::MatrixXd comp_slack;     // complementary slackness residual
    std::vector<std::vector<ActiveConstraint>> active;  // [node][class]
    int iterations = 0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_outer = 2000;
    bool parallel = false;  // per-node inner minimizations within an outer pass
};

// Mandatory-output floor: fixed point of gamma = Gamma (beta + routed gamma),
// by direct linear solve cross-checked against fixed-point iteration
// (must agree within 1e-9). Routing entry (v',v) carries flow from v' to v.
Eigen::VectorXd gamma_lower_bound_vector(const NetworkSpec& spec, int c);

// Achievable arrival-rate range: [(I-P^T Gamma)^-1 beta, (I-P^T)^-1 beta).
struct LambdaInterval {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;  // exclusive
};
LambdaInterval lambda_interval(const NetworkSpec& spec, int c);

// Per-node computation delay under the selected cost model; equals 1/mu at
// gamma = lambda for every model. k is taken from the state's class.
double computation_cost(CostModel model, const NodeClassState& s, double gamma);

// Total per-node delay C_comp + 1/(mu-gamma) and its derivatives in gamma.
double node_delay(CostModel model, double k, double lambda, double mu, double gamma);
double node_delay_derivative(CostModel model, double k, double lambda, double mu,
                             double gamma);

struct ClosedFormOptimum {
    double unclipped = 0.0;
    double clipped = 0.0;
    ActiveConstraint active = ActiveConstraint::Interior;
};

// Stationary point mu(1 - 1/sqrt(k)) of the linear model, clipped into
// [Gamma lambda, lambda].
ClosedFormOptimum closed_form_linear_optimum(const NodeClassState& s, double k);

// Stationary point (mu(sqrt(k)-1) + k lambda)/(k + sqrt(k)) of the convex
// model (lambda/2 at k=1), clipped into [Gamma lambda, lambda].
ClosedFormOptimum closed_form_convex_optimum(const NodeClassState& s, double k);

// Block-coordinate solve: alternate the traffic-equation lambda update with per-node
// 1-D minimization of the delay over the feasible gamma box (coarse scan for
// sign changes of the stationarity residual, then safeguarded
// Newton/bisection). Runs from the relay and floor starts and keeps the
// better KKT point. Deterministic; `parallel` only distributes the
// independent per-node solves inside one outer pass.
MinCostSolution solve_mincost(const MinCostProblem& p, double tol = 1e-10,
                              const SolveOptions& opts = {});

// Relay-point cost sum_{v,c} (1/mu + 1/(mu - lambda_relay)) with
// lambda_relay = (I-P^T)^-1 beta. Throws InfeasibleError when some relay
// load is unstable.
double no_computation_cost(const NetworkSpec& spec);

// Necessary condition on the external arrival rate for computation to be
// effective at the operating point `lambda`:
// beta < (I - P^T Gamma) lambda / Gamma elementwise. Vacuously true at
// Gamma = 0; fails exactly in the relay-pinned regime.
bool external_rate_condition(const NetworkSpec& spec, int c,
                             const Eigen::VectorXd& lambda);

// Structured text export: one row per node/class with lambda, gamma, rho,
// M, L, W, active constraint and duals, plus metadata and the objective.
std::string format_solution(const MinCostProblem& p, const MinCostSolution& s);

}  // namespace infc
