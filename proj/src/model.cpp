#include "infc/model.hpp"

#include <cmath>
#include <deque>

#include "infc/errors.hpp"

namespace infc {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kSplitTol = 1e-9;
}  // namespace

std::string to_string(ComplexityFamily f) {
    switch (f) {
        case ComplexityFamily::Search: return "search";
        case ComplexityFamily::MapReduce: return "mapreduce";
        case ComplexityFamily::Classification: return "classification";
        case ComplexityFamily::Custom: return "custom";
    }
    return "?";
}

std::string to_string(CostModel m) {
    switch (m) {
        case CostModel::SearchConcave: return "search_concave";
        case CostModel::MapReduceLinear: return "mapreduce_linear";
        case CostModel::ClassificationConvex: return "classification_convex";
    }
    return "?";
}

ComplexityFamily complexity_from_string(const std::string& s) {
    if (s == "search") return ComplexityFamily::Search;
    if (s == "mapreduce") return ComplexityFamily::MapReduce;
    if (s == "classification") return ComplexityFamily::Classification;
    if (s == "custom") return ComplexityFamily::Custom;
    throw InvalidArgument("unknown complexity family: " + s);
}

CostModel cost_model_from_string(const std::string& s) {
    if (s == "search_concave" || s == "search") return CostModel::SearchConcave;
    if (s == "mapreduce_linear" || s == "linear") return CostModel::MapReduceLinear;
    if (s == "classification_convex" || s == "convex")
        return CostModel::ClassificationConvex;
    throw InvalidArgument("unknown cost model: " + s);
}

CostModel default_cost_model(ComplexityFamily f) {
    switch (f) {
        case ComplexityFamily::Search: return CostModel::SearchConcave;
        case ComplexityFamily::Classification: return CostModel::ClassificationConvex;
        default: return CostModel::MapReduceLinear;
    }
}

double effective_complexity(const FunctionClass& fc, double m) {
    if (m < 0.0) throw InvalidArgument("effective_complexity: m must be >= 0");
    switch (fc.complexity) {
        case ComplexityFamily::Search: return std::log1p(m);
        case ComplexityFamily::MapReduce: return m;
        case ComplexityFamily::Classification: return std::expm1(m);
        case ComplexityFamily::Custom:
            if (!fc.custom_complexity)
                throw InvalidArgument("custom complexity family without callback");
            return fc.custom_complexity(m);
    }
    throw InvalidArgument("unhandled complexity family");
}

Eigen::VectorXd NetworkSpec::departure_prob(int c) const {
    return Eigen::VectorXd::Ones(node_count) - routing.at(c).rowwise().sum();
}

FlowAssignment FlowAssignment::zeros(int nodes, int classes) {
    FlowAssignment a;
    a.lambda = Eigen::MatrixXd::Zero(nodes, classes);
    a.gamma = a.lambda;
    a.rho = a.lambda;
    a.m_queue = a.lambda;
    a.l_total = a.lambda;
    a.delay = a.lambda;
    return a;
}

namespace {

// A substochastic routing matrix has spectral radius < 1 iff every node can
// reach a node with positive departure probability. Checked by reverse BFS
// from the leaky nodes; exact, no numerics beyond the row-sum tolerance.
std::vector<int> trapped_nodes(const Eigen::MatrixXd& routing) {
    const int n = static_cast<int>(routing.rows());
    std::vector<char> reaches_leak(n, 0);
    std::deque<int> frontier;
    for (int v = 0; v < n; ++v) {
        if (routing.row(v).sum() < 1.0 - kRowSumTol) {
            reaches_leak[v] = 1;
            frontier.push_back(v);
        }
    }
    while (!frontier.empty()) {
        int w = frontier.front();
        frontier.pop_front();
        for (int v = 0; v < n; ++v) {
            if (!reaches_leak[v] && routing(v, w) > 0.0) {
                reaches_leak[v] = 1;
                frontier.push_back(v);
            }
        }
    }
    std::vector<int> trapped;
    for (int v = 0; v < n; ++v)
        if (!reaches_leak[v]) trapped.push_back(v);
    return trapped;
}

}  // namespace

std::vector<Violation> validate_network(const NetworkSpec& spec) {
    std::vector<Violation> out;
    auto add = [&out](std::string code, std::string msg, int node = -1, int cls = -1) {
        out.push_back({std::move(code), std::move(msg), node, cls});
    };

    const int n = spec.node_count;
    const int nc = spec.class_count();
    if (n <= 0) {
        add("bad_node_count", "node_count must be positive");
        return out;
    }
    if (nc == 0) add("no_classes", "at least one function class is required");

    if (static_cast<int>(spec.routing.size()) != nc)
        add("shape_mismatch", "routing must have one matrix per class");
    if (static_cast<int>(spec.arrival_split.size()) != nc)
        add("shape_mismatch", "arrival_split must have one vector per class");
    if (static_cast<int>(spec.external_rate.size()) != nc)
        add("shape_mismatch", "external_rate must have one entry per class");
    if (spec.service_rate.rows() != n || spec.service_rate.cols() != nc)
        add("shape_mismatch", "service_rate must be (node_count x class_count)");
    if (!out.empty() && out.back().code == "shape_mismatch") return out;

    for (int c = 0; c < nc; ++c) {
        const auto& fc = spec.classes[c];
        if (!(fc.k > 0.0))
            add("nonpositive_k", "class " + fc.id + ": k must be > 0", -1, c);
        if (fc.surjectivity < 0.0 || fc.surjectivity > 1.0)
            add("surjectivity_out_of_range",
                "class " + fc.id + ": Gamma must lie in [0,1]", -1, c);

        const auto& R = spec.routing[c];
        if (R.rows() != n || R.cols() != n) {
            add("shape_mismatch", "routing matrix for class " + fc.id +
                                      " must be node_count x node_count", -1, c);
            continue;
        }
        bool entries_ok = true;
        for (int v = 0; v < n; ++v) {
            for (int w = 0; w < n; ++w) {
                if (R(v, w) < 0.0 || R(v, w) > 1.0) {
                    add("routing_entry_out_of_range",
                        "p_rou out of [0,1] at (" + std::to_string(v) + "," +
                            std::to_string(w) + ")", v, c);
                    entries_ok = false;
                }
            }
            if (R.row(v).sum() > 1.0 + kRowSumTol) {
                add("negative_departure_probability",
                    "routing row sums above 1 at node " + std::to_string(v), v, c);
                entries_ok = false;
            }
        }
        if (entries_ok) {
            Eigen::VectorXd dep = spec.departure_prob(c);
            if (dep.maxCoeff() <= kRowSumTol) {
                add("closed_network",
                    "class " + fc.id + ": no node has positive departure probability",
                    -1, c);
            } else {
                for (int v : trapped_nodes(R))
                    add("trapped_flow",
                        "class " + fc.id + ": node " + std::to_string(v) +
                            " cannot reach any departing node (spectral radius >= 1)",
                        v, c);
            }
        }

        const auto& split = spec.arrival_split[c];
        if (split.size() != n) {
            add("shape_mismatch", "arrival_split for class " + fc.id, -1, c);
        } else {
            for (int v = 0; v < n; ++v)
                if (split(v) < 0.0 || split(v) > 1.0)
                    add("arrival_split_entry_out_of_range",
                        "p_arr out of [0,1] at node " + std::to_string(v), v, c);
            if (std::abs(split.sum() - 1.0) > kSplitTol)
                add("arrival_split_not_stochastic",
                    "class " + fc.id + ": arrival split sums to " +
                        std::to_string(split.sum()),
                    -1, c);
        }

        if (spec.external_rate[c] < 0.0)
            add("negative_external_rate", "class " + fc.id, -1, c);
        for (int v = 0; v < n; ++v)
            if (!(spec.service_rate(v, c) > 0.0))
                add("nonpositive_service_rate",
                    "mu must be > 0 at node " + std::to_string(v), v, c);
    }
    return out;
}

std::vector<Violation> validate_assignment(const NetworkSpec& spec,
                                           const FlowAssignment& a) {
    std::vector<Violation> out;
    const int n = spec.node_count;
    const int nc = spec.class_count();
    if (a.lambda.rows() != n || a.lambda.cols() != nc) {
        out.push_back({"shape_mismatch", "assignment shape", -1, -1});
        return out;
    }
    const double tol = 1e-9;
    for (int c = 0; c < nc; ++c) {
        const double g = spec.classes[c].surjectivity;
        for (int v = 0; v < n; ++v) {
            const double lam = a.lambda(v, c);
            const double gam = a.gamma(v, c);
            const double rho = lam / spec.service_rate(v, c);
            if (lam < 0.0 || gam < 0.0)
                out.push_back({"negative_rate", "lambda/gamma must be >= 0", v, c});
            if (rho >= 1.0)
                out.push_back({"unstable_load", "rho >= 1", v, c});
            if (gam > lam + tol)
                out.push_back({"gamma_above_lambda", "gamma exceeds lambda", v, c});
            if (gam < lam * g - tol)
                out.push_back(
                    {"gamma_below_surjectivity_floor", "gamma < Gamma*lambda", v, c});
            if (lam > 0.0) {
                const double m_expected = a.l_total(v, c) * (1.0 - gam / lam);
                if (std::abs(a.m_queue(v, c) - m_expected) > 1e-6 * (1.0 + m_expected))
                    out.push_back(
                        {"queue_decomposition", "M != L(1-gamma/lambda)", v, c});
            }
        }
    }
    return out;
}

}  // namespace infc
