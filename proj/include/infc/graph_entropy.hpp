#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace infc {

// A deterministic function of N finite-alphabet source variables, stored as
// a dense table in row-major order over joint assignments (the last variable
// varies fastest).
struct FunctionTable {
    int arity = 0;                    // number of source variables N
    std::vector<int> alphabet_sizes;  // per variable
    std::vector<int> outputs;         // one entry per joint assignment

    std::size_t domain_size() const;
    // Row-major index of a joint assignment.
    std::size_t index_of(const std::vector<int>& assignment) const;
};

// Characteristic graph of a function on one source variable: vertices are
// the variable's alphabet, and two symbols are adjacent iff some context of
// the other variables with positive joint probability makes the function
// distinguish them.
struct CharacteristicGraph {
    int vertex_count = 0;
    std::vector<double> pmf;                 // marginal p(x) of the target variable
    std::vector<std::pair<int, int>> edges;  // unordered, stored with u < v
    int source_arity = 1;                    // N of the originating function
    FunctionTable function_table;            // retained for audit

    bool adjacent(int u, int v) const;
    static CharacteristicGraph from_edges(int n, std::vector<double> pmf,
                                          std::vector<std::pair<int, int>> edges);
};

// Result of the graph-entropy minimization. `witness(x, w)` is the achieved
// conditional distribution p(w|x) over the maximal independent sets listed
// in `sets`; it is supported only on sets containing x.
struct EntropyResult {
    double value = 0.0;  // bits
    std::vector<std::uint32_t> sets;          // maximal independent sets (bitmasks)
    std::vector<std::vector<double>> witness; // witness[x][i] = p(sets[i] | x)
    int iterations = 0;
    double gap = 0.0;    // last objective decrease (0 for exact paths)
};

// Shannon entropy of a pmf in bits. Entries must be >= 0 and sum to ~1.
double shannon_entropy(const std::vector<double>& pmf);

// Builds the characteristic graph of `f` on `target_variable` under
// `joint_pmf` (row-major over the table's domain, same indexing).
CharacteristicGraph build_characteristic_graph(const FunctionTable& f,
                                               const std::vector<double>& joint_pmf,
                                               int target_variable);

// Exact enumeration of all maximal independent sets, as vertex bitmasks in
// ascending order. Exponential worst case; refuses graphs above `vertex_cap`.
std::vector<std::uint32_t> maximal_independent_sets(const CharacteristicGraph& g,
                                                    int vertex_cap = 20);

// Koerner graph entropy: min I(X;W) over p(w|x) supported on maximal
// independent sets containing x. Alternating minimization with closed-form
// marginal and multiplicative conditional updates; stops when the objective
// decrease drops below tol. Complete/empty graphs (and any graph whose
// vertices each lie in a single maximal set) are evaluated exactly.
EntropyResult graph_entropy(const CharacteristicGraph& g, double tol = 1e-9,
                            int max_iterations = 10000, int vertex_cap = 20);

// Independent check of graph_entropy: backtracking gradient descent on
// softmax logits from seeded random starts over the same support structure.
// Returns the best value found (bits). Restarts run in parallel when
// `parallel` is set; the result is identical either way.
double graph_entropy_oracle(const CharacteristicGraph& g, int restarts = 16,
                            std::uint64_t seed = 0x5eedULL, bool parallel = false,
                            int vertex_cap = 20);

// Entropic surjectivity Gamma_c = H_G(f(X)) / H(X), clamped to [0,1].
// Throws DegenerateSourceError when H(X) = 0.
double entropic_surjectivity(const CharacteristicGraph& g, double tol = 1e-9);

// Deficiency of f: Z_n -> Z_n. alpha0 counts the pairs (a,b), a != 0, for
// which f(x+a) - f(x) = b (mod n) has no solution.
struct DeficiencyResult {
    int n = 0;
    long long alpha0 = 0;
    // lambda[a-1][b] = #solutions of Delta_{f,a}(x) = b, for a in 1..n-1.
    std::vector<std::vector<int>> lambda;
};
DeficiencyResult deficiency(const std::vector<int>& f);

// Rate-region membership for a two-source region of the Slepian-Wolf shape:
// r1 >= h1, r2 >= h2, r1 + r2 >= h12. Works for both the joint-entropy
// triple and a graph-entropy triple.
struct EntropyTriple {
    double h1 = 0.0;   // H(X1|X2) (or graph-entropy analogue)
    double h2 = 0.0;   // H(X2|X1)
    double h12 = 0.0;  // H(X1,X2)
};
enum class RegionVerdict { Inside, Boundary, Outside };
std::string to_string(RegionVerdict v);
RegionVerdict rate_region_membership(double r1, double r2, const EntropyTriple& h,
                                     double tol = 1e-9);

// Shannon triple {H(X1|X2), H(X2|X1), H(X1,X2)} of a two-variable joint pmf
// (row-major, sizes n1 x n2).
EntropyTriple shannon_triple(const std::vector<double>& joint_pmf, int n1, int n2);

// Graph-entropy triple for a two-source function at tiny alphabets:
// conditional graph entropies by seeded random-restart minimization of
// I(X;W|Y), joint graph entropy by alternating minimization over the
// product maximal-independent-set structure.
EntropyTriple graph_triple(const FunctionTable& f, const std::vector<double>& joint_pmf,
                           int restarts = 16, std::uint64_t seed = 0x5eedULL);

// Function-table text format: whitespace-separated columns, a header row
// naming the source variables then the output, then the pmf column; one row
// per joint assignment. Parses alphabet sizes from the observed symbols.
struct ParsedFunctionTable {
    FunctionTable table;
    std::vector<double> joint_pmf;
    std::vector<std::string> variable_names;
    std::string output_name;
};
ParsedFunctionTable parse_function_table(const std::string& text);
ParsedFunctionTable load_function_table(const std::string& path);

// Structured text record for an entropy computation (value, witness
// support, iterations), as exported by the CLI.
std::string format_entropy_record(const EntropyResult& r,
                                  const CharacteristicGraph& g);

}  // namespace infc
