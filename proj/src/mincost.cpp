#include "infc/mincost.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "infc/errors.hpp"
#include "infc/util.hpp"

namespace infc {

namespace {

constexpr double kMuGuard = 1e-9;       // ceiling mu(1 - kMuGuard)
constexpr double kActiveTol = 1e-8;     // active-set detection
constexpr double kCrossCheckTol = 1e-9; // linear solve vs fixed point

Eigen::VectorXd beta_vector(const NetworkSpec& spec, int c) {
    return spec.external_rate[c] * spec.arrival_split[c];
}

Eigen::VectorXd solve_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const std::string& what) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw InfeasibleError("singular routing system in " + what, what);
    return lu.solve(b);
}

}  // namespace

MinCostProblem MinCostProblem::from_spec(NetworkSpec spec) {
    MinCostProblem p;
    p.cost_models.reserve(spec.classes.size());
    for (const auto& fc : spec.classes)
        p.cost_models.push_back(default_cost_model(fc.complexity));
    p.spec = std::move(spec);
    return p;
}

std::string to_string(ActiveConstraint a) {
    switch (a) {
        case ActiveConstraint::Interior: return "interior";
        case ActiveConstraint::Floor: return "floor";
        case ActiveConstraint::Ceiling: return "gamma<=lambda";
        case ActiveConstraint::Pinned: return "pinned";
    }
    return "?";
}

Eigen::VectorXd gamma_lower_bound_vector(const NetworkSpec& spec, int c) {
    const int n = spec.node_count;
    const double g = spec.classes.at(c).surjectivity;
    const Eigen::MatrixXd rt = spec.routing.at(c).transpose();
    const Eigen::VectorXd beta = beta_vector(spec, c);

    const Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) - rt * g;
    Eigen::VectorXd direct = solve_system(sys, beta * g, "gamma_lower_bound_vector");

    // Independent route: iterate gamma <- Gamma (beta + routed gamma).
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd next = g * (beta + rt * x);
        const double delta = (next - x).lpNorm<Eigen::Infinity>();
        x = next;
        if (delta < 1e-14) break;
    }
    const double gap = (direct - x).lpNorm<Eigen::Infinity>();
    if (gap > kCrossCheckTol)
        throw SolverError("gamma_LB linear solve and fixed point disagree",
                          direct.lpNorm<Eigen::Infinity>(), gap);
    return direct;
}

LambdaInterval lambda_interval(const NetworkSpec& spec, int c) {
    const int n = spec.node_count;
    const double g = spec.classes.at(c).surjectivity;
    const Eigen::MatrixXd rt = spec.routing.at(c).transpose();
    const Eigen::VectorXd beta = beta_vector(spec, c);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    LambdaInterval out;
    out.lower = solve_system(eye - rt * g, beta, "lambda_interval lower");
    out.upper = solve_system(eye - rt, beta, "lambda_interval upper");
    return out;
}

double node_delay(CostModel model, double k, double lambda, double mu,
                  double gamma) {
    const double backlog = lambda - gamma;
    double comp = 0.0;
    switch (model) {
        case CostModel::SearchConcave:
            comp = (1.0 + k * std::log1p(backlog / mu)) / mu;
            break;
        case CostModel::MapReduceLinear:
            comp = (1.0 + k * backlog / mu) / mu;
            break;
        case CostModel::ClassificationConvex: {
            const double denom = mu - k * backlog;
            if (denom <= 0.0)
                throw InstabilityError("classification cost pole: mu <= k(lambda-gamma)");
            comp = 1.0 / denom;
            break;
        }
    }
    return comp + 1.0 / (mu - gamma);
}

// d C_comp / d (lambda - gamma): how fast the computation delay grows with
// the retained backlog. Nonnegative for every model.
double comp_backlog_derivative(CostModel model, double k, double lambda, double mu,
                               double gamma) {
    const double backlog = lambda - gamma;
    switch (model) {
        case CostModel::SearchConcave:
            return k / (mu * (mu + backlog));
        case CostModel::MapReduceLinear:
            return k / (mu * mu);
        case CostModel::ClassificationConvex: {
            const double denom = mu - k * backlog;
            if (denom <= 0.0)
                throw InstabilityError("classification cost pole: mu <= k(lambda-gamma)");
            return k / (denom * denom);
        }
    }
    return 0.0;
}

double node_delay_derivative(CostModel model, double k, double lambda, double mu,
                             double gamma) {
    const double comm = 1.0 / ((mu - gamma) * (mu - gamma));
    return -comp_backlog_derivative(model, k, lambda, mu, gamma) + comm;
}

double computation_cost(CostModel model, const NodeClassState& s, double gamma) {
    check_state(s);
    if (gamma < 0.0 || gamma > s.lambda)
        throw InvalidArgument("computation_cost: gamma must lie in [0, lambda]");
    return node_delay(model, s.complexity.k, s.lambda, s.mu, gamma) -
           1.0 / (s.mu - gamma);
}

namespace {

ClosedFormOptimum clip_optimum(double unclipped, double floor, double ceiling) {
    ClosedFormOptimum o;
    o.unclipped = unclipped;
    if (unclipped <= floor) {
        o.clipped = floor;
        o.active = ActiveConstraint::Floor;
    } else if (unclipped >= ceiling) {
        o.clipped = ceiling;
        o.active = ActiveConstraint::Ceiling;
    } else {
        o.clipped = unclipped;
        o.active = ActiveConstraint::Interior;
    }
    return o;
}

}  // namespace

ClosedFormOptimum closed_form_linear_optimum(const NodeClassState& s, double k) {
    check_state(s);
    if (!(k > 0.0)) throw InvalidArgument("k must be > 0");
    const double unclipped = s.mu * (1.0 - 1.0 / std::sqrt(k));
    return clip_optimum(unclipped, s.surjectivity * s.lambda, s.lambda);
}

ClosedFormOptimum closed_form_convex_optimum(const NodeClassState& s, double k) {
    check_state(s);
    if (!(k > 0.0)) throw InvalidArgument("k must be > 0");
    const double floor = s.surjectivity * s.lambda;
    const double rk = std::sqrt(k);
    const double unclipped = (s.mu * (rk - 1.0) + k * s.lambda) / (k + rk);
    ClosedFormOptimum o = clip_optimum(unclipped, floor, s.lambda);
    // The stationary point always sits above the cost pole; clipping can
    // only cross it if the interval itself is bad.
    if (s.mu - k * (s.lambda - o.clipped) <= 0.0)
        throw InstabilityError("classification cost pole inside the search interval");
    return o;
}

bool external_rate_condition(const NetworkSpec& spec, int c,
                             const Eigen::VectorXd& lambda) {
    const double g = spec.classes.at(c).surjectivity;
    if (g <= 0.0) return true;
    const int n = spec.node_count;
    const Eigen::VectorXd beta = beta_vector(spec, c);
    const Eigen::VectorXd rhs =
        (Eigen::MatrixXd::Identity(n, n) - spec.routing[c].transpose() * g) *
        lambda / g;
    return (beta.array() < rhs.array()).all();
}

double no_computation_cost(const NetworkSpec& spec) {
    double total = 0.0;
    for (int c = 0; c < spec.class_count(); ++c) {
        const LambdaInterval iv = lambda_interval(spec, c);
        for (int v = 0; v < spec.node_count; ++v) {
            const double mu = spec.service_rate(v, c);
            if (iv.upper(v) >= mu * (1.0 - kMuGuard))
                throw InfeasibleError(
                    "relay load unstable at node " + std::to_string(v) + " class " +
                        spec.classes[c].id,
                    "node " + std::to_string(v));
            total += 1.0 / mu + 1.0 / (mu - iv.upper(v));
        }
    }
    return total;
}

namespace {

// Per-class view of the MinCost problem in compression-ratio form. With
// r_v = gamma_v / lambda_v the traffic equation gives
// lambda(r) = (I - P^T diag(r))^{-1} beta, a smooth map, and the coupled
// constraints gamma >= Gamma lambda, gamma <= lambda collapse to the fixed
// box Gamma <= r_v <= 1. The relay-load precheck lambda_max < mu keeps the
// mu-guard from ever binding (lambda(r) <= lambda_max elementwise).
struct ClassContext {
    const NetworkSpec& spec;
    int c;
    CostModel model;
    double k;
    double surj;
    // h/2 + 1 - sqrt(h^2/4 + 1) for the class entropy h; per-node absolute
    // floor on gamma is mu_v times this bracket. 0 when H_G is unknown.
    double entropy_floor_bracket;
    Eigen::VectorXd beta;
    Eigen::MatrixXd rt;  // route^T; rt(u, w) = p from w to u

    int nodes() const { return spec.node_count; }
    double mu(int v) const { return spec.service_rate(v, c); }
    double entropy_floor(int v) const { return mu(v) * entropy_floor_bracket; }

    Eigen::VectorXd lambda_of(const Eigen::VectorXd& r) const {
        const int n = nodes();
        const Eigen::MatrixXd m =
            Eigen::MatrixXd::Identity(n, n) - rt * r.asDiagonal();
        return m.partialPivLu().solve(beta);
    }

    double objective_from(const Eigen::VectorXd& r,
                          const Eigen::VectorXd& lambda) const {
        double total = 0.0;
        for (int v = 0; v < nodes(); ++v)
            total += node_delay(model, k, lambda(v), mu(v), r(v) * lambda(v));
        return total;
    }

    double objective(const Eigen::VectorXd& r) const {
        return objective_from(r, lambda_of(r));
    }

    double objective_or_inf(const Eigen::VectorXd& r) const {
        try {
            return objective(r);
        } catch (const InstabilityError&) {
            return std::numeric_limits<double>::infinity();
        }
    }
};

// Closed form of lambda as one ratio varies, the others held fixed:
// lambda(r_v) = x + r_v x_v / (1 - r_v y_v) * y  (rank-1 update of the
// traffic inverse).
struct CoordinateSlice {
    int v = 0;
    Eigen::VectorXd x;  // lambda with r_v = 0
    Eigen::VectorXd y;  // response to node v's output

    CoordinateSlice(const ClassContext& ctx, int v_, const Eigen::VectorXd& r)
        : v(v_) {
        const int n = ctx.nodes();
        Eigen::VectorXd r0 = r;
        r0(v) = 0.0;
        const Eigen::MatrixXd m =
            Eigen::MatrixXd::Identity(n, n) - ctx.rt * r0.asDiagonal();
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        x = lu.solve(ctx.beta);
        y = lu.solve(ctx.rt.col(v));
    }

    Eigen::VectorXd lambda_at(double rv) const {
        return x + (rv * x(v) / (1.0 - rv * y(v))) * y;
    }
    Eigen::VectorXd dlambda_at(double rv) const {
        const double d = 1.0 - rv * y(v);
        return (x(v) / (d * d)) * y;
    }
};

// Objective and its derivative restricted to one ratio coordinate.
double slice_value(const ClassContext& ctx, const CoordinateSlice& s,
                   const Eigen::VectorXd& r, double rv) {
    const Eigen::VectorXd lambda = s.lambda_at(rv);
    double total = 0.0;
    for (int w = 0; w < ctx.nodes(); ++w) {
        const double ratio = (w == s.v) ? rv : r(w);
        total += node_delay(ctx.model, ctx.k, lambda(w), ctx.mu(w),
                            ratio * lambda(w));
    }
    return total;
}

double slice_derivative(const ClassContext& ctx, const CoordinateSlice& s,
                        const Eigen::VectorXd& r, double rv) {
    const Eigen::VectorXd lambda = s.lambda_at(rv);
    const Eigen::VectorXd dlambda = s.dlambda_at(rv);
    double total = 0.0;
    for (int w = 0; w < ctx.nodes(); ++w) {
        const double ratio = (w == s.v) ? rv : r(w);
        const double gamma = ratio * lambda(w);
        const double dgamma =
            ratio * dlambda(w) + ((w == s.v) ? lambda(w) : 0.0);
        const double comp =
            comp_backlog_derivative(ctx.model, ctx.k, lambda(w), ctx.mu(w), gamma);
        const double dcomm = dgamma / ((ctx.mu(w) - gamma) * (ctx.mu(w) - gamma));
        total += comp * (dlambda(w) - dgamma) + dcomm;
    }
    return total;
}

// Lower bound on r_v from the absolute entropy floor gamma_v >= c:
// r lambda_v(r) = c has a unique root since the left side is increasing.
double entropy_floor_ratio(const CoordinateSlice& s, double c, double lo,
                           double hi) {
    auto gamma_v = [&](double rv) { return rv * s.lambda_at(rv)(s.v); };
    if (gamma_v(hi) <= c)
        throw InfeasibleError(
            "entropy floor above the feasible processing factor at node " +
                std::to_string(s.v),
            "node " + std::to_string(s.v));
    if (gamma_v(lo) >= c) return lo;
    double a = lo, b = hi;
    for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        (gamma_v(m) < c ? a : b) = m;
    }
    return b;
}

// Exact minimization of the slice over [lo, hi]: scan the derivative for
// sign changes, refine each bracket by bisection, compare the stationary
// candidates against the endpoints. Cost-pole regions evaluate to +inf and
// lose the comparison.
double minimize_slice(const ClassContext& ctx, const CoordinateSlice& s,
                      const Eigen::VectorXd& r, double lo, double hi) {
    if (lo >= hi) return hi;
    auto value = [&](double rv) {
        try {
            return slice_value(ctx, s, r, rv);
        } catch (const InstabilityError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto deriv = [&](double rv) {
        try {
            return slice_derivative(ctx, s, r, rv);
        } catch (const InstabilityError&) {
            return -1.0;  // inside a pole region: push upward
        }
    };

    constexpr int kGrid = 33;
    std::vector<double> candidates{lo, hi};
    double prev_r = lo, prev_d = deriv(lo);
    for (int i = 1; i < kGrid; ++i) {
        const double rv = lo + (hi - lo) * i / (kGrid - 1);
        const double d = deriv(rv);
        if ((prev_d < 0.0 && d >= 0.0) || (prev_d > 0.0 && d <= 0.0)) {
            double a = prev_r, b = rv, fa = prev_d;
            for (int it = 0; it < 80 && (b - a) > 1e-16; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = deriv(mid);
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            candidates.push_back(0.5 * (a + b));
        }
        prev_r = rv;
        prev_d = d;
    }
    double best_r = candidates.front();
    double best_v = value(best_r);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double val = value(candidates[i]);
        if (val < best_v - 1e-15 ||
            (std::abs(val - best_v) <= 1e-15 && candidates[i] < best_r)) {
            best_v = val;
            best_r = candidates[i];
        }
    }
    return best_r;
}

struct ClassSolve {
    Eigen::VectorXd ratio;
    Eigen::VectorXd gamma;
    Eigen::VectorXd lambda;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Gauss-Seidel over the ratio coordinates: fixed box, exact 1-D minimum per
// visit, so the objective never increases. Sequential and deterministic.
ClassSolve run_class(const ClassContext& ctx, const Eigen::VectorXd& r0,
                     double tol, const SolveOptions& opts) {
    const int n = ctx.nodes();
    ClassSolve cs;
    cs.ratio = r0;
    for (int v = 0; v < n; ++v) cs.ratio(v) = std::clamp(cs.ratio(v), ctx.surj, 1.0);

    for (int sweep = 1; sweep <= opts.max_outer; ++sweep) {
        cs.iterations = sweep;
        double gap = 0.0;
        for (int v = 0; v < n; ++v) {
            const CoordinateSlice s(ctx, v, cs.ratio);
            double lo = ctx.surj;
            if (ctx.entropy_floor_bracket > 0.0)
                lo = std::max(lo, entropy_floor_ratio(s, ctx.entropy_floor(v), lo, 1.0));
            const double next = minimize_slice(ctx, s, cs.ratio, lo, 1.0);
            gap = std::max(gap, std::abs(next - cs.ratio(v)));
            cs.ratio(v) = next;
        }
        if (log_level() >= LogLevel::Debug && sweep % 100 == 0)
            log_msg(LogLevel::Debug,
                    "mincost class " + ctx.spec.classes[ctx.c].id + " sweep " +
                        std::to_string(sweep) + " gap=" + fmt_g(gap));
        if (gap < tol) {
            cs.converged = true;
            break;
        }
    }
    cs.lambda = ctx.lambda_of(cs.ratio);
    cs.gamma = cs.ratio.cwiseProduct(cs.lambda);
    cs.objective = ctx.objective_from(cs.ratio, cs.lambda);
    return cs;
}

// Coordinate descent can still stall on joint-direction saddles of the
// concave-cost model. Probe seeded multi-scale random perturbations and a
// few structured moves in ratio space; restart the descent from any
// improvement. Deterministic.
ClassSolve polish_class(const ClassContext& ctx, ClassSolve cs, double tol,
                        const SolveOptions& opts) {
    constexpr int kRounds = 40;
    constexpr int kProbes = 768;
    std::mt19937_64 rng(0xA11CEULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = ctx.nodes();

    for (int round = 0; round < kRounds; ++round) {
        bool improved = false;

        std::vector<Eigen::VectorXd> directions;
        directions.push_back(Eigen::VectorXd::Ones(n));
        directions.push_back(-Eigen::VectorXd::Ones(n));
        directions.push_back(Eigen::VectorXd::Constant(n, ctx.surj) - cs.ratio);
        directions.push_back(Eigen::VectorXd::Ones(n) - cs.ratio);
        for (const auto& d : directions) {
            const double norm = d.lpNorm<Eigen::Infinity>();
            if (norm < 1e-14) continue;
            for (double t : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003}) {
                Eigen::VectorXd trial = cs.ratio + (t / norm) * d;
                for (int v = 0; v < n; ++v)
                    trial(v) = std::clamp(trial(v), ctx.surj, 1.0);
                if (ctx.objective_or_inf(trial) < cs.objective - 1e-12) {
                    cs = run_class(ctx, trial, tol, opts);
                    improved = true;
                    break;
                }
            }
            if (improved) break;
        }
        if (!improved) {
            for (int probe = 0; probe < kProbes && !improved; ++probe) {
                const double scale = probe % 3 == 0   ? 0.3
                                     : probe % 3 == 1 ? 0.1
                                                      : 0.02;
                Eigen::VectorXd trial = cs.ratio;
                if (probe % 2 == 0) {
                    for (int v = 0; v < n; ++v)
                        trial(v) =
                            std::clamp(trial(v) + scale * u(rng), ctx.surj, 1.0);
                } else {
                    for (int v = 0; v < n; ++v)
                        trial(v) = std::clamp(trial(v) * (1.0 + scale * u(rng)),
                                              ctx.surj, 1.0);
                }
                if (ctx.objective_or_inf(trial) < cs.objective - 1e-12) {
                    cs = run_class(ctx, trial, tol, opts);
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return cs;
}

}  // namespace

MinCostSolution solve_mincost(const MinCostProblem& p, double tol,
                              const SolveOptions& opts) {
    const NetworkSpec& spec = p.spec;
    {
        const auto violations = validate_network(spec);
        if (!violations.empty())
            throw InvalidArgument("solve_mincost: invalid network: " +
                                  violations.front().message);
    }
    if (p.cost_models.size() != spec.classes.size())
        throw InvalidArgument("solve_mincost: one cost model per class required");

    const int n = spec.node_count;
    const int nc = spec.class_count();

    MinCostSolution sol;
    sol.assignment = FlowAssignment::zeros(n, nc);
    sol.gamma_floor = Eigen::MatrixXd::Zero(n, nc);
    sol.gamma_lb = Eigen::MatrixXd::Zero(n, nc);
    sol.xi = Eigen::MatrixXd::Zero(n, nc);
    sol.zeta = Eigen::MatrixXd::Zero(n, nc);
    sol.stationarity = Eigen::MatrixXd::Zero(n, nc);
    sol.comp_slack = Eigen::MatrixXd::Zero(n, nc);
    sol.active.assign(n, std::vector<ActiveConstraint>(nc, ActiveConstraint::Interior));
    sol.converged = true;

    std::vector<double> class_objective(nc, 0.0);
    std::vector<int> class_iterations(nc, 0);
    std::vector<char> class_converged(nc, 1);
    bool failed = false;
    std::string fail_what, fail_where;
    bool fail_feasibility = false;

    // Classes are independent; they may solve concurrently. Results land in
    // disjoint columns, merged deterministically below.
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (int c = 0; c < nc; ++c) {
        try {
        const LambdaInterval iv = lambda_interval(spec, c);
        for (int v = 0; v < n; ++v) {
            if (iv.upper(v) >= spec.service_rate(v, c) * (1.0 - kMuGuard))
                throw InfeasibleError("relay load unstable (rho >= 1) at node " +
                                          std::to_string(v) + " class " +
                                          spec.classes[c].id,
                                      "node " + std::to_string(v));
        }
        const Eigen::VectorXd lb17 = gamma_lower_bound_vector(spec, c);
        sol.gamma_lb.col(c) = lb17;

        const double h_floor = [&] {
            const double h =
                (c < static_cast<int>(p.h_func.size())) ? p.h_func[c] : 0.0;
            return h > 0.0 ? h / 2.0 + 1.0 - std::sqrt(h * h / 4.0 + 1.0) : 0.0;
        }();
        ClassContext ctx{spec,
                         c,
                         p.cost_models[c],
                         spec.classes[c].k,
                         spec.classes[c].surjectivity,
                         h_floor,
                         beta_vector(spec, c),
                         spec.routing[c].transpose()};

        // Two deterministic starts: relay (r = 1) and the mandatory-output floor
        // (r = Gamma); keep the better final point, then polish. A start
        // inside a cost-pole region (floor start under an expensive convex
        // model) is skipped; the relay start is always finite.
        ClassSolve best;
        bool have = false;
        for (double r0 : {1.0, spec.classes[c].surjectivity}) {
            const Eigen::VectorXd start = Eigen::VectorXd::Constant(n, r0);
            if (!std::isfinite(ctx.objective_or_inf(start))) continue;
            ClassSolve cs = run_class(ctx, start, tol, opts);
            if (!have || cs.objective < best.objective - 1e-14) {
                best = cs;
                have = true;
            }
        }
        if (!have)
            throw InfeasibleError("no finite starting point for class " +
                                  spec.classes[c].id);
        best = polish_class(ctx, best, tol, opts);
        class_iterations[c] = best.iterations;
        class_converged[c] = best.converged ? 1 : 0;

        const CostModel model = p.cost_models[c];
        const double k = spec.classes[c].k;
        for (int v = 0; v < n; ++v) {
            const double mu = spec.service_rate(v, c);
            const double lambda = best.lambda(v);
            const double gamma = best.gamma(v);

            const double w = node_delay(model, k, lambda, mu, gamma);
            sol.assignment.lambda(v, c) = lambda;
            sol.assignment.gamma(v, c) = gamma;
            sol.assignment.rho(v, c) = lambda / mu;
            sol.assignment.delay(v, c) = w;
            sol.assignment.l_total(v, c) = gamma * w;
            sol.assignment.m_queue(v, c) =
                lambda > 0.0 ? gamma * w * (1.0 - gamma / lambda) : 0.0;

            // Bound multipliers in ratio form: dF/dr_v + xi - zeta = 0 with
            // xi for r <= 1 (gamma <= lambda) and zeta for r >= floor
            // (gamma >= gamma_LB / entropy floor).
            const CoordinateSlice slice(ctx, v, best.ratio);
            double lo = ctx.surj;
            if (ctx.entropy_floor_bracket > 0.0)
                lo = std::max(lo, entropy_floor_ratio(slice, ctx.entropy_floor(v), lo, 1.0));
            sol.gamma_floor(v, c) = lo * lambda;
            const double grad = slice_derivative(ctx, slice, best.ratio, best.ratio(v));
            const bool lo_active = best.ratio(v) <= lo + kActiveTol;
            const bool hi_active = best.ratio(v) >= 1.0 - kActiveTol;
            double xi = 0.0, zeta = 0.0;
            if (lo_active && hi_active) {
                sol.active[v][c] = ActiveConstraint::Pinned;
                zeta = std::max(0.0, grad);
                xi = std::max(0.0, -grad);
            } else if (lo_active) {
                sol.active[v][c] = ActiveConstraint::Floor;
                zeta = std::max(0.0, grad);
            } else if (hi_active) {
                sol.active[v][c] = ActiveConstraint::Ceiling;
                xi = std::max(0.0, -grad);
            } else {
                sol.active[v][c] = ActiveConstraint::Interior;
            }
            sol.xi(v, c) = xi;
            sol.zeta(v, c) = zeta;
            sol.stationarity(v, c) = std::abs(grad + xi - zeta);
            sol.comp_slack(v, c) = std::max(std::abs(xi * (best.ratio(v) - 1.0)),
                                            std::abs(zeta * (lo - best.ratio(v))));
        }
        class_objective[c] = best.objective;
        } catch (const InfeasibleError& e) {
#pragma omp critical
            if (!failed) {
                failed = true;
                fail_feasibility = true;
                fail_what = e.what();
                fail_where = e.where;
            }
        } catch (const Error& e) {
#pragma omp critical
            if (!failed) {
                failed = true;
                fail_what = e.what();
            }
        }
    }
    if (failed) {
        if (fail_feasibility) throw InfeasibleError(fail_what, fail_where);
        throw SolverError(fail_what, 0.0, 0.0);
    }
    for (int c = 0; c < nc; ++c) {
        sol.objective += class_objective[c];
        sol.iterations = std::max(sol.iterations, class_iterations[c]);
        sol.converged = sol.converged && class_converged[c];
    }

    sol.no_computation_cost = no_computation_cost(spec);
    sol.normalized = sol.objective / sol.no_computation_cost;
    return sol;
}

std::string format_solution(const MinCostProblem& p, const MinCostSolution& s) {
    std::ostringstream os;
    os << "# mincost solution (infc " << kVersion << ")\n";
    os << "# objective=" << fmt_g(s.objective)
       << " no_computation_cost=" << fmt_g(s.no_computation_cost)
       << " normalized=" << fmt_g(s.normalized) << " iterations=" << s.iterations
       << " converged=" << (s.converged ? 1 : 0) << "\n";
    os << "node\tclass\tlambda\tgamma\trho\tM\tL\tW\tgamma_floor\tgamma_lb"
          "\tactive\txi\tzeta\tstationarity\tcomp_slack\n";
    for (int v = 0; v < p.spec.node_count; ++v)
        for (int c = 0; c < p.spec.class_count(); ++c) {
            os << v << "\t" << p.spec.classes[c].id << "\t"
               << fmt_g(s.assignment.lambda(v, c)) << "\t"
               << fmt_g(s.assignment.gamma(v, c)) << "\t"
               << fmt_g(s.assignment.rho(v, c)) << "\t"
               << fmt_g(s.assignment.m_queue(v, c)) << "\t"
               << fmt_g(s.assignment.l_total(v, c)) << "\t"
               << fmt_g(s.assignment.delay(v, c)) << "\t"
               << fmt_g(s.gamma_floor(v, c)) << "\t"
               << fmt_g(s.gamma_lb(v, c)) << "\t" << to_string(s.active[v][c])
               << "\t" << fmt_g(s.xi(v, c)) << "\t" << fmt_g(s.zeta(v, c)) << "\t"
               << fmt_g(s.stationarity(v, c)) << "\t" << fmt_g(s.comp_slack(v, c))
               << "\n";
        }
    return os.str();
}

}  // namespace infc
