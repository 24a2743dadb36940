#include "infc/graph_entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "infc/errors.hpp"
#include "infc/util.hpp"

namespace infc {

namespace {
constexpr double kLn2 = 0.6931471805599453;
constexpr double kPmfTol = 1e-12;

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }
}  // namespace

std::size_t FunctionTable::domain_size() const {
    std::size_t n = 1;
    for (int s : alphabet_sizes) n *= static_cast<std::size_t>(s);
    return n;
}

std::size_t FunctionTable::index_of(const std::vector<int>& assignment) const {
    std::size_t idx = 0;
    for (int i = 0; i < arity; ++i) idx = idx * alphabet_sizes[i] + assignment[i];
    return idx;
}

bool CharacteristicGraph::adjacent(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) != edges.end();
}

CharacteristicGraph CharacteristicGraph::from_edges(
    int n, std::vector<double> pmf, std::vector<std::pair<int, int>> edges) {
    CharacteristicGraph g;
    g.vertex_count = n;
    g.pmf = std::move(pmf);
    if (static_cast<int>(g.pmf.size()) != n)
        throw InvalidArgument("pmf size does not match vertex count");
    double sum = 0.0;
    for (double p : g.pmf) {
        if (p < 0.0) throw InvalidArgument("pmf entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfTol)
        throw InvalidArgument("pmf must sum to 1 within 1e-12");
    for (auto& [u, v] : edges) {
        if (u == v) throw InvalidArgument("self-loop in edge set");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw InvalidArgument("edge endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
}

double shannon_entropy(const std::vector<double>& pmf) {
    double h = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw InvalidArgument("pmf entries must be >= 0");
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

CharacteristicGraph build_characteristic_graph(const FunctionTable& f,
                                               const std::vector<double>& joint_pmf,
                                               int target_variable) {
    if (f.arity < 1 || static_cast<int>(f.alphabet_sizes.size()) != f.arity)
        throw InvalidArgument("malformed function table");
    if (joint_pmf.size() != f.domain_size() || f.outputs.size() != f.domain_size())
        throw InvalidArgument(
            "dimension mismatch between function table domain and joint pmf");
    if (target_variable < 0 || target_variable >= f.arity)
        throw InvalidArgument("target variable out of range");

    const int n = f.alphabet_sizes[target_variable];

    // Enumerate contexts = joint assignments of the other variables.
    std::vector<int> other_vars;
    for (int i = 0; i < f.arity; ++i)
        if (i != target_variable) other_vars.push_back(i);
    std::size_t context_count = 1;
    for (int i : other_vars) context_count *= f.alphabet_sizes[i];

    std::vector<int> assignment(f.arity, 0);
    auto set_context = [&](std::size_t ctx) {
        for (int i = static_cast<int>(other_vars.size()) - 1; i >= 0; --i) {
            const int var = other_vars[i];
            assignment[var] = static_cast<int>(ctx % f.alphabet_sizes[var]);
            ctx /= f.alphabet_sizes[var];
        }
    };

    std::vector<double> marginal(n, 0.0);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t ctx = 0; ctx < context_count; ++ctx) {
        set_context(ctx);
        for (int u = 0; u < n; ++u) {
            assignment[target_variable] = u;
            const std::size_t iu = f.index_of(assignment);
            marginal[u] += joint_pmf[iu];
            if (joint_pmf[iu] <= 0.0) continue;
            for (int v = u + 1; v < n; ++v) {
                assignment[target_variable] = v;
                const std::size_t iv = f.index_of(assignment);
                if (joint_pmf[iv] <= 0.0) continue;
                if (f.outputs[iu] != f.outputs[iv]) edges.emplace_back(u, v);
            }
        }
    }
    const double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidArgument("joint pmf must sum to 1");
    for (double& p : marginal) p /= total;

    CharacteristicGraph g = CharacteristicGraph::from_edges(n, marginal, edges);
    g.source_arity = f.arity;
    g.function_table = f;
    return g;
}

namespace {

std::vector<std::uint32_t> adjacency_masks(const CharacteristicGraph& g) {
    std::vector<std::uint32_t> adj(g.vertex_count, 0);
    for (auto [u, v] : g.edges) {
        adj[u] |= 1u << v;
        adj[v] |= 1u << u;
    }
    return adj;
}

// Bron-Kerbosch with pivoting; `adj` must be the adjacency of the graph in
// which we enumerate maximal cliques.
void bron_kerbosch(std::uint32_t r, std::uint32_t p, std::uint32_t x,
                   const std::vector<std::uint32_t>& adj,
                   std::vector<std::uint32_t>& out) {
    if (p == 0 && x == 0) {
        out.push_back(r);
        return;
    }
    const std::uint32_t px = p | x;
    int pivot = -1, best = -1;
    for (std::uint32_t m = px; m;) {
        const int v = std::countr_zero(m);
        m &= m - 1;
        const int cnt = std::popcount(p & adj[v]);
        if (cnt > best) {
            best = cnt;
            pivot = v;
        }
    }
    std::uint32_t cand = p & ~adj[pivot];
    while (cand) {
        const int v = std::countr_zero(cand);
        const std::uint32_t bit = 1u << v;
        cand &= cand - 1;
        bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
        p &= ~bit;
        x |= bit;
    }
}

}  // namespace

std::vector<std::uint32_t> maximal_independent_sets(const CharacteristicGraph& g,
                                                    int vertex_cap) {
    const int n = g.vertex_count;
    if (n > vertex_cap)
        throw SizeLimitError("maximal_independent_sets: " + std::to_string(n) +
                             " vertices exceeds cap " + std::to_string(vertex_cap));
    if (n == 0) return {};
    const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
    // Maximal independent sets of G = maximal cliques of the complement.
    std::vector<std::uint32_t> adj = adjacency_masks(g);
    std::vector<std::uint32_t> comp(n);
    for (int v = 0; v < n; ++v) comp[v] = all & ~adj[v] & ~(1u << v);
    std::vector<std::uint32_t> sets;
    bron_kerbosch(0, all, 0, comp, sets);
    std::sort(sets.begin(), sets.end());
    return sets;
}

namespace {

// Support structure for min I(Z;W): for each source symbol z, the indices of
// the admissible W values. Shared by the alternating-minimization solver,
// the projected-gradient oracle and the joint/conditional variants.
struct SupportProblem {
    std::vector<double> pz;
    std::vector<std::vector<int>> supports;
    int w_count = 0;
};

SupportProblem support_problem_for(const CharacteristicGraph& g,
                                   const std::vector<std::uint32_t>& sets) {
    SupportProblem sp;
    sp.pz = g.pmf;
    sp.w_count = static_cast<int>(sets.size());
    sp.supports.resize(g.vertex_count);
    for (int x = 0; x < g.vertex_count; ++x) {
        for (int i = 0; i < sp.w_count; ++i)
            if (sets[i] & (1u << x)) sp.supports[x].push_back(i);
        if (sp.supports[x].empty())
            throw InvalidArgument("vertex not covered by any maximal independent set");
    }
    return sp;
}

void w_marginal_into(const SupportProblem& sp,
                     const std::vector<std::vector<double>>& cond,
                     std::vector<double>& q) {
    q.assign(sp.w_count, 0.0);
    for (std::size_t z = 0; z < sp.pz.size(); ++z) {
        if (sp.pz[z] <= 0.0) continue;
        const auto& sup = sp.supports[z];
        for (std::size_t i = 0; i < sup.size(); ++i)
            q[sup[i]] += sp.pz[z] * cond[z][i];
    }
}

std::vector<double> w_marginal(const SupportProblem& sp,
                               const std::vector<std::vector<double>>& cond) {
    std::vector<double> q;
    w_marginal_into(sp, cond, q);
    return q;
}

double mutual_information_bits(const SupportProblem& sp,
                               const std::vector<std::vector<double>>& cond,
                               const std::vector<double>& q) {
    double nats = 0.0;
    for (std::size_t z = 0; z < sp.pz.size(); ++z) {
        if (sp.pz[z] <= 0.0) continue;
        const auto& sup = sp.supports[z];
        for (std::size_t i = 0; i < sup.size(); ++i) {
            const double p = cond[z][i];
            if (p > 0.0) nats += sp.pz[z] * p * (safe_log(p) - safe_log(q[sup[i]]));
        }
    }
    return nats / kLn2;
}

std::vector<std::vector<double>> uniform_conditionals(const SupportProblem& sp) {
    std::vector<std::vector<double>> cond(sp.pz.size());
    for (std::size_t z = 0; z < sp.pz.size(); ++z)
        cond[z].assign(sp.supports[z].size(), 1.0 / sp.supports[z].size());
    return cond;
}

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(0.0, x - theta);
}

struct AlternatingResult {
    double value = 0.0;
    std::vector<std::vector<double>> cond;
    int iterations = 0;
    double gap = 0.0;
};

AlternatingResult minimize_mi_alternating(const SupportProblem& sp, double tol,
                                          int max_iterations) {
    AlternatingResult res;
    res.cond = uniform_conditionals(sp);
    std::vector<double> q = w_marginal(sp, res.cond);
    double prev = mutual_information_bits(sp, res.cond, q);
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t z = 0; z < sp.pz.size(); ++z) {
            if (sp.pz[z] <= 0.0) continue;
            const auto& sup = sp.supports[z];
            double denom = 0.0;
            for (std::size_t i = 0; i < sup.size(); ++i) denom += q[sup[i]];
            if (denom <= 0.0) continue;
            for (std::size_t i = 0; i < sup.size(); ++i)
                res.cond[z][i] = q[sup[i]] / denom;
        }
        q = w_marginal(sp, res.cond);
        const double cur = mutual_information_bits(sp, res.cond, q);
        res.iterations = it;
        res.gap = prev - cur;
        if (std::abs(res.gap) < tol) {
            res.value = cur;
            return res;
        }
        prev = cur;
    }
    throw SolverError("graph entropy alternating minimization did not converge",
                      prev, res.gap);
}

// Backtracking gradient descent on softmax logits from one random start.
// The unconstrained parametrization keeps the iterates strictly inside the
// simplex blocks, away from the log singularities a projected method hits
// at the faces.
double minimize_mi_descent(const SupportProblem& sp, std::mt19937_64& rng,
                           int max_iterations = 2500) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> theta(sp.pz.size()), cond(sp.pz.size());
    for (std::size_t z = 0; z < sp.pz.size(); ++z) {
        theta[z].resize(sp.supports[z].size());
        for (double& t : theta[z]) t = gauss(rng);
        cond[z].resize(theta[z].size());
    }

    auto softmax_all = [&](const std::vector<std::vector<double>>& th,
                           std::vector<std::vector<double>>& out) {
        for (std::size_t z = 0; z < th.size(); ++z) {
            double mx = th[z].empty() ? 0.0 : th[z][0];
            for (double t : th[z]) mx = std::max(mx, t);
            double sum = 0.0;
            for (std::size_t i = 0; i < th[z].size(); ++i) {
                out[z][i] = std::exp(th[z][i] - mx);
                sum += out[z][i];
            }
            for (double& c : out[z]) c /= sum;
        }
    };

    softmax_all(theta, cond);
    std::vector<double> q = w_marginal(sp, cond);
    double value = mutual_information_bits(sp, cond, q);

    std::vector<std::vector<double>> grad(theta.size()), trial(theta.size()),
        trial_cond(theta.size());
    std::size_t max_support = 0;
    for (std::size_t z = 0; z < theta.size(); ++z) {
        trial[z].resize(theta[z].size());
        trial_cond[z].resize(theta[z].size());
        max_support = std::max(max_support, theta[z].size());
    }
    std::vector<double> g(max_support), q_trial;
    double step = 1.0;
    int stalled = 0;
    for (int it = 0; it < max_iterations; ++it) {
        // chain rule through the softmax: d/dtheta_i =
        // p_i (g_i - sum_j p_j g_j) with g = dI/dp
        for (std::size_t z = 0; z < sp.pz.size(); ++z) {
            grad[z].assign(theta[z].size(), 0.0);
            if (sp.pz[z] <= 0.0) continue;
            const auto& sup = sp.supports[z];
            double inner = 0.0;
            for (std::size_t i = 0; i < sup.size(); ++i) {
                g[i] = (safe_log(cond[z][i]) - safe_log(q[sup[i]])) / kLn2;
                inner += cond[z][i] * g[i];
            }
            for (std::size_t i = 0; i < sup.size(); ++i)
                grad[z][i] = cond[z][i] * (g[i] - inner);
        }
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t z = 0; z < theta.size(); ++z)
                for (std::size_t i = 0; i < theta[z].size(); ++i)
                    trial[z][i] = theta[z][i] - step * grad[z][i];
            softmax_all(trial, trial_cond);
            w_marginal_into(sp, trial_cond, q_trial);
            const double v_trial = mutual_information_bits(sp, trial_cond, q_trial);
            if (v_trial < value - 1e-15) {
                theta.swap(trial);
                cond.swap(trial_cond);
                q = q_trial;
                value = v_trial;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            if (++stalled > 4) break;
            step = 1.0;
        } else {
            stalled = 0;
        }
    }
    return value;
}

}  // namespace

EntropyResult graph_entropy(const CharacteristicGraph& g, double tol,
                            int max_iterations, int vertex_cap) {
    if (!(tol > 0.0)) throw InvalidArgument("graph_entropy: tol must be > 0");
    EntropyResult res;
    res.sets = maximal_independent_sets(g, vertex_cap);
    if (g.vertex_count == 0) return res;

    SupportProblem sp = support_problem_for(g, res.sets);

    // If every vertex lies in exactly one maximal set, the witness is forced
    // and H_G is the entropy of the induced partition. Covers complete and
    // empty graphs exactly.
    bool forced = true;
    for (const auto& sup : sp.supports)
        if (sup.size() != 1) {
            forced = false;
            break;
        }
    if (forced) {
        std::vector<double> q(sp.w_count, 0.0);
        for (int x = 0; x < g.vertex_count; ++x) q[sp.supports[x][0]] += g.pmf[x];
        res.value = shannon_entropy(q);
        res.witness = uniform_conditionals(sp);
        return res;
    }

    AlternatingResult am = minimize_mi_alternating(sp, tol, max_iterations);
    res.value = std::max(0.0, am.value);
    res.witness = std::move(am.cond);
    res.iterations = am.iterations;
    res.gap = am.gap;
    return res;
}

double graph_entropy_oracle(const CharacteristicGraph& g, int restarts,
                            std::uint64_t seed, bool parallel, int vertex_cap) {
    const auto sets = maximal_independent_sets(g, vertex_cap);
    if (g.vertex_count == 0) return 0.0;
    SupportProblem sp = support_problem_for(g, sets);

    std::vector<double> values(restarts);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < restarts; ++r) {
            std::mt19937_64 rng(split_seed(seed, r));
            values[r] = minimize_mi_descent(sp, rng);
        }
    } else {
        for (int r = 0; r < restarts; ++r) {
            std::mt19937_64 rng(split_seed(seed, r));
            values[r] = minimize_mi_descent(sp, rng);
        }
    }
    return std::max(0.0, *std::min_element(values.begin(), values.end()));
}

double entropic_surjectivity(const CharacteristicGraph& g, double tol) {
    const double h_source = shannon_entropy(g.pmf);
    if (h_source <= 0.0)
        throw DegenerateSourceError(
            "entropic surjectivity undefined for a zero-entropy source");
    const double h_graph = graph_entropy(g, tol).value;
    return std::clamp(h_graph / h_source, 0.0, 1.0);
}

DeficiencyResult deficiency(const std::vector<int>& f) {
    const int n = static_cast<int>(f.size());
    if (n < 2) throw InvalidArgument("deficiency requires |Z_n| >= 2");
    for (int y : f)
        if (y < 0 || y >= n)
            throw InvalidArgument(
                "deficiency: outputs must lie in Z_n (equal cardinalities)");
    DeficiencyResult res;
    res.n = n;
    res.lambda.assign(n - 1, std::vector<int>(n, 0));
    for (int a = 1; a < n; ++a)
        for (int x = 0; x < n; ++x) {
            const int d = ((f[(x + a) % n] - f[x]) % n + n) % n;
            ++res.lambda[a - 1][d];
        }
    for (int a = 1; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (res.lambda[a - 1][b] == 0) ++res.alpha0;
    return res;
}

std::string to_string(RegionVerdict v) {
    switch (v) {
        case RegionVerdict::Inside: return "inside";
        case RegionVerdict::Boundary: return "boundary";
        case RegionVerdict::Outside: return "outside";
    }
    return "?";
}

RegionVerdict rate_region_membership(double r1, double r2, const EntropyTriple& h,
                                     double tol) {
    if (h.h1 < -tol || h.h2 < -tol || h.h12 < -tol ||
        h.h1 > h.h12 + tol || h.h2 > h.h12 + tol)
        throw InvalidArgument("inconsistent entropy triple");
    const double s1 = r1 - h.h1;
    const double s2 = r2 - h.h2;
    const double s3 = (r1 + r2) - h.h12;
    if (s1 < -tol || s2 < -tol || s3 < -tol) return RegionVerdict::Outside;
    if (s1 <= tol || s2 <= tol || s3 <= tol) return RegionVerdict::Boundary;
    return RegionVerdict::Inside;
}

EntropyTriple shannon_triple(const std::vector<double>& joint_pmf, int n1, int n2) {
    if (static_cast<int>(joint_pmf.size()) != n1 * n2)
        throw InvalidArgument("joint pmf size mismatch");
    std::vector<double> p1(n1, 0.0), p2(n2, 0.0);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            p1[i] += joint_pmf[i * n2 + j];
            p2[j] += joint_pmf[i * n2 + j];
        }
    EntropyTriple t;
    t.h12 = shannon_entropy(joint_pmf);
    t.h1 = t.h12 - shannon_entropy(p2);  // H(X1|X2)
    t.h2 = t.h12 - shannon_entropy(p1);  // H(X2|X1)
    return t;
}

namespace {

// min I(X;W|Y) over p(w|x) with W - X - Y a Markov chain and the usual
// maximal-independent-set support. Nonconvex (difference of mutual
// informations), hence seeded random restarts of projected gradient descent.
double conditional_graph_entropy(const SupportProblem& sp_x,
                                 const std::vector<double>& joint_xy, int n1, int n2,
                                 int restarts, std::uint64_t seed) {
    std::vector<double> px(n1, 0.0), py(n2, 0.0);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            px[i] += joint_xy[i * n2 + j];
            py[j] += joint_xy[i * n2 + j];
        }

    const int w_count = sp_x.w_count;
    auto objective = [&](const std::vector<std::vector<double>>& cond,
                         std::vector<double>& rwy) {
        // rwy(w,y) = sum_x p(x,y) p(w|x)
        rwy.assign(static_cast<std::size_t>(w_count) * n2, 0.0);
        for (int x = 0; x < n1; ++x) {
            const auto& sup = sp_x.supports[x];
            for (std::size_t i = 0; i < sup.size(); ++i) {
                const double c = cond[x][i];
                if (c <= 0.0) continue;
                for (int y = 0; y < n2; ++y)
                    rwy[sup[i] * n2 + y] += joint_xy[x * n2 + y] * c;
            }
        }
        double h_w_given_y = 0.0;  // nats
        for (int w = 0; w < w_count; ++w)
            for (int y = 0; y < n2; ++y) {
                const double r = rwy[w * n2 + y];
                if (r > 0.0) h_w_given_y -= r * (safe_log(r) - safe_log(py[y]));
            }
        double h_w_given_x = 0.0;
        for (int x = 0; x < n1; ++x) {
            if (px[x] <= 0.0) continue;
            for (std::size_t i = 0; i < sp_x.supports[x].size(); ++i) {
                const double c = cond[x][i];
                if (c > 0.0) h_w_given_x -= px[x] * c * safe_log(c);
            }
        }
        return (h_w_given_y - h_w_given_x) / kLn2;
    };

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(split_seed(seed, r));
        std::exponential_distribution<double> expo(1.0);
        std::vector<std::vector<double>> cond(n1), grad(n1), trial(n1);
        for (int x = 0; x < n1; ++x) {
            cond[x].resize(sp_x.supports[x].size());
            double sum = 0.0;
            for (double& c : cond[x]) {
                c = expo(rng) + 1e-9;
                sum += c;
            }
            for (double& c : cond[x]) c /= sum;
        }
        std::vector<double> rwy;
        double value = objective(cond, rwy);
        double step = 1.0;
        for (int it = 0; it < 600; ++it) {
            for (int x = 0; x < n1; ++x) {
                grad[x].assign(cond[x].size(), 0.0);
                if (px[x] <= 0.0) continue;
                const auto& sup = sp_x.supports[x];
                for (std::size_t i = 0; i < sup.size(); ++i) {
                    double gsum = px[x] * safe_log(cond[x][i]);
                    for (int y = 0; y < n2; ++y) {
                        const double pxy = joint_xy[x * n2 + y];
                        if (pxy > 0.0) {
                            const double pwy = rwy[sup[i] * n2 + y] / py[y];
                            gsum -= pxy * safe_log(pwy);
                        }
                    }
                    grad[x][i] = gsum / kLn2;
                }
            }
            bool improved = false;
            for (int bt = 0; bt < 30; ++bt) {
                for (int x = 0; x < n1; ++x) {
                    trial[x] = cond[x];
                    for (std::size_t i = 0; i < trial[x].size(); ++i)
                        trial[x][i] -= step * grad[x][i];
                    project_simplex(trial[x]);
                }
                std::vector<double> rwy_trial;
                const double v_trial = objective(trial, rwy_trial);
                if (v_trial < value - 1e-15) {
                    cond.swap(trial);
                    rwy.swap(rwy_trial);
                    value = v_trial;
                    improved = true;
                    step *= 1.3;
                    break;
                }
                step *= 0.5;
            }
            if (!improved || step < 1e-14) break;
        }
        best = std::min(best, value);
    }
    return std::max(0.0, best);
}

}  // namespace

EntropyTriple graph_triple(const FunctionTable& f, const std::vector<double>& joint_pmf,
                           int restarts, std::uint64_t seed) {
    if (f.arity != 2)
        throw InvalidArgument("graph_triple is defined for two-source functions");
    const int n1 = f.alphabet_sizes[0];
    const int n2 = f.alphabet_sizes[1];
    if (n1 > 6 || n2 > 6)
        throw SizeLimitError("graph_triple: alphabets above brute-force cap");

    const CharacteristicGraph g1 = build_characteristic_graph(f, joint_pmf, 0);
    const CharacteristicGraph g2 = build_characteristic_graph(f, joint_pmf, 1);
    const auto sets1 = maximal_independent_sets(g1);
    const auto sets2 = maximal_independent_sets(g2);
    const SupportProblem sp1 = support_problem_for(g1, sets1);
    const SupportProblem sp2 = support_problem_for(g2, sets2);

    // Transposed joint for the X2-side conditional.
    std::vector<double> joint_t(joint_pmf.size());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) joint_t[j * n1 + i] = joint_pmf[i * n2 + j];

    EntropyTriple t;
    t.h1 = conditional_graph_entropy(sp1, joint_pmf, n1, n2, restarts, seed);
    t.h2 = conditional_graph_entropy(sp2, joint_t, n2, n1, restarts, seed + 1);

    // Joint graph entropy: min I(X1,X2; W1,W2) over the product support
    // structure; convex, so alternating minimization suffices.
    SupportProblem joint_sp;
    joint_sp.pz = joint_pmf;
    joint_sp.w_count = static_cast<int>(sets1.size() * sets2.size());
    joint_sp.supports.resize(joint_pmf.size());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            auto& sup = joint_sp.supports[i * n2 + j];
            for (int a : sp1.supports[i])
                for (int b : sp2.supports[j])
                    sup.push_back(a * static_cast<int>(sets2.size()) + b);
        }
    AlternatingResult am = minimize_mi_alternating(joint_sp, 1e-10, 20000);
    t.h12 = std::max(0.0, am.value);
    return t;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

}  // namespace

ParsedFunctionTable parse_function_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (header.empty())
            header = std::move(toks);
        else
            rows.push_back(std::move(toks));
    }
    if (header.size() < 3)
        throw InvalidArgument(
            "function table needs at least one source column, an output column "
            "and a pmf column");
    const int arity = static_cast<int>(header.size()) - 2;

    ParsedFunctionTable out;
    out.table.arity = arity;
    out.variable_names.assign(header.begin(), header.begin() + arity);
    out.output_name = header[arity];

    std::vector<std::vector<int>> sources(rows.size());
    std::vector<int> outputs(rows.size());
    std::vector<double> pmf(rows.size());
    std::vector<int> sizes(arity, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != arity + 2)
            throw InvalidArgument("function table row " + std::to_string(r + 1) +
                                  " has wrong column count");
        sources[r].resize(arity);
        for (int i = 0; i < arity; ++i) {
            sources[r][i] = std::stoi(rows[r][i]);
            if (sources[r][i] < 0)
                throw InvalidArgument("negative source symbol in function table");
            sizes[i] = std::max(sizes[i], sources[r][i] + 1);
        }
        outputs[r] = std::stoi(rows[r][arity]);
        pmf[r] = std::stod(rows[r][arity + 1]);
        if (pmf[r] < 0.0) throw InvalidArgument("negative pmf entry");
    }
    out.table.alphabet_sizes = sizes;

    const std::size_t domain = out.table.domain_size();
    if (rows.size() != domain)
        throw InvalidArgument("function table must cover every joint assignment "
                              "exactly once (expected " +
                              std::to_string(domain) + " rows, got " +
                              std::to_string(rows.size()) + ")");
    out.table.outputs.assign(domain, 0);
    out.joint_pmf.assign(domain, -1.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t idx = out.table.index_of(sources[r]);
        if (out.joint_pmf[idx] >= 0.0)
            throw InvalidArgument("duplicate joint assignment in function table");
        out.table.outputs[idx] = outputs[r];
        out.joint_pmf[idx] = pmf[r];
    }
    const double total =
        std::accumulate(out.joint_pmf.begin(), out.joint_pmf.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidArgument("function table pmf must sum to 1");
    return out;
}

ParsedFunctionTable load_function_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open function table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_function_table(ss.str());
}

std::string format_entropy_record(const EntropyResult& r,
                                  const CharacteristicGraph& g) {
    std::ostringstream os;
    os << "value_bits=" << fmt_g(r.value) << "\n";
    os << "source_entropy_bits=" << fmt_g(shannon_entropy(g.pmf)) << "\n";
    os << "iterations=" << r.iterations << "\n";
    os << "gap=" << fmt_g(r.gap) << "\n";
    os << "maximal_independent_sets=";
    for (std::size_t i = 0; i < r.sets.size(); ++i) {
        os << (i ? " " : "") << "{";
        bool first = true;
        for (int v = 0; v < g.vertex_count; ++v)
            if (r.sets[i] & (1u << v)) {
                os << (first ? "" : ",") << v;
                first = false;
            }
        os << "}";
    }
    os << "\n";
    for (int x = 0; x < g.vertex_count; ++x) {
        os << "witness x=" << x << ":";
        int si = 0;
        for (std::size_t i = 0; i < r.sets.size(); ++i) {
            if (!(r.sets[i] & (1u << x))) continue;
            const double p =
                (x < static_cast<int>(r.witness.size()) &&
                 si < static_cast<int>(r.witness[x].size()))
                    ? r.witness[x][si]
                    : 0.0;
            if (p > 1e-12) os << " " << i << ":" << fmt_g(p);
            ++si;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace infc
