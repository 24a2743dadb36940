#include "infc/flow_laws.hpp"

#include <cmath>

#include "infc/errors.hpp"

namespace infc {

void check_state(const NodeClassState& s) {
    if (!(s.lambda > 0.0)) throw InvalidArgument("state: lambda must be > 0");
    if (!(s.mu > 0.0)) throw InvalidArgument("state: mu must be > 0");
    if (!(s.rho() < 1.0)) throw InvalidArgument("state: rho must be < 1");
    if (s.surjectivity < 0.0 || s.surjectivity > 1.0)
        throw InvalidArgument("state: Gamma must lie in [0,1]");
    if (s.h_func < 0.0) throw InvalidArgument("state: h_func must be >= 0");
    if (s.h_func > s.h_source + 1e-12)
        throw InvalidArgument("state: h_func exceeds h_source");
}

DelayComponents delay_components(const NodeClassState& s, double gamma, double m) {
    check_state(s);
    if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
    if (m < 0.0) throw InvalidArgument("m must be >= 0");
    if (gamma >= s.mu)
        throw InstabilityError("communication queue diverges: gamma >= mu");
    DelayComponents d;
    d.comp = effective_complexity(s.complexity, m) / s.lambda;
    d.comm = 1.0 / (s.mu - gamma);
    d.total = d.comp + d.comm;
    return d;
}

QueueLengths little_queue_length(const NodeClassState& s, double gamma, double m) {
    const DelayComponents d = delay_components(s, gamma, m);
    QueueLengths q;
    q.l_total = gamma * d.total;
    q.m_comm = q.l_total * (1.0 - gamma / s.lambda);
    return q;
}

double solve_backlog_fixed_point(const NodeClassState& s, double gamma,
                                 double damping, double tol, int max_iterations) {
    check_state(s);
    if (gamma < 0.0 || gamma >= s.mu)
        throw InstabilityError("backlog fixed point needs 0 <= gamma < mu");
    double m = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        const QueueLengths q = little_queue_length(s, gamma, m);
        const double next = (1.0 - damping) * m + damping * q.m_comm;
        if (!std::isfinite(next))
            throw SolverError("backlog fixed point diverged", m, next - m);
        if (std::abs(next - m) < tol) return next;
        m = next;
    }
    throw SolverError("backlog fixed point did not converge", m, tol);
}

FlowBounds flow_bounds(const NodeClassState& s) {
    check_state(s);
    FlowBounds b;
    const double half = s.h_func / 2.0;
    b.lower = half + 1.0 - std::sqrt(half * half + 1.0);
    b.upper = s.lambda / (s.mu * (1.0 - s.rho()));
    b.comp_time_dominates =
        effective_complexity(s.complexity, b.upper) / s.lambda >= 1.0 / s.mu;
    return b;
}

double gamma_floor_from_entropy(const NodeClassState& s) {
    check_state(s);
    const double h = s.h_func;
    const double bracket = h / 2.0 + 1.0 - std::sqrt(h * h / 4.0 + 1.0);
    return s.mu * bracket;
}

bool stability_check(const NodeClassState& s, double m) {
    if (m < 0.0) throw InvalidArgument("m must be >= 0");
    return effective_complexity(s.complexity, m) > m;
}

ProcessingFactorRoots processing_factor_roots(const NodeClassState& s, double m) {
    check_state(s);
    const double d = effective_complexity(s.complexity, m);
    if (!(d > 0.0))
        throw InvalidArgument("degenerate complexity: d_f(m) must be > 0");

    ProcessingFactorRoots r;
    r.a = 0.5 * (s.lambda + s.mu + s.lambda / d);
    const double disc = r.a * r.a - s.lambda * s.mu;

    const double lo = s.surjectivity * s.lambda;
    const double hi = std::min(s.lambda, s.mu);  // exclusive
    if (disc < 0.0) {
        // Quadratic positive everywhere: every physical gamma qualifies.
        if (lo < hi) r.feasible.push_back({lo, hi, true});
        return r;
    }
    r.has_real_roots = true;
    const double root = std::sqrt(disc);
    r.gamma_low = r.a - root;
    r.gamma_high = r.a + root;
    // {gamma <= gamma_low} u {gamma >= gamma_high}, cut to [lo, hi).
    if (lo <= r.gamma_low) {
        const double upper = std::min(r.gamma_low, hi);
        if (lo < upper || (lo == upper && upper < hi))
            r.feasible.push_back({lo, upper, upper >= hi});
    }
    if (r.gamma_high < hi) {
        const double lower = std::max(r.gamma_high, lo);
        r.feasible.push_back({lower, hi, true});
    }
    return r;
}

double rho_threshold(double d) {
    if (d < 0.0) throw InvalidArgument("d_f must be >= 0");
    const double half = d / 2.0;
    return std::sqrt(half * half + d) - half;
}

bool LoadThreshold::admits(double rho) const {
    if (rho <= 0.0 || rho >= 1.0) return false;
    const double lhs = rho * rho / (1.0 - rho);
    const double rhs = d * (1.0 - rho * gamma) / (1.0 - gamma);
    return lhs > rhs;
}

LoadThreshold load_threshold(const NodeClassState& s, double m) {
    check_state(s);
    if (m < 0.0) throw InvalidArgument("m must be >= 0");
    if (s.surjectivity >= 1.0)
        throw InstabilityError(
            "surjective function (Gamma = 1): no compression possible, "
            "admission predicate undefined");
    LoadThreshold t;
    t.d = effective_complexity(s.complexity, m);
    t.gamma = s.surjectivity;
    t.rho_th = rho_threshold(t.d);
    return t;
}

}  // namespace infc
