#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "infc/errors.hpp"
#include "infc/graph_entropy.hpp"
#include "oracles.hpp"

using namespace infc;

namespace {

FunctionTable single_variable_table(const std::vector<int>& outputs) {
    FunctionTable f;
    f.arity = 1;
    f.alphabet_sizes = {static_cast<int>(outputs.size())};
    f.outputs = outputs;
    return f;
}

FunctionTable xor_table() {
    FunctionTable f;
    f.arity = 2;
    f.alphabet_sizes = {2, 2};
    f.outputs = {0, 1, 1, 0};
    return f;
}

CharacteristicGraph cycle5(std::vector<double> pmf) {
    return CharacteristicGraph::from_edges(
        5, std::move(pmf), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
}

}  // namespace

TEST_CASE("identity function yields the complete graph") {
    const auto g = build_characteristic_graph(single_variable_table({0, 1, 2}),
                                              {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0);
    CHECK(g.edges.size() == 3);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(1, 2));
    CHECK(g.adjacent(0, 2));
}

TEST_CASE("constant function yields the empty graph") {
    const auto g = build_characteristic_graph(single_variable_table({7, 7, 7}),
                                              {0.2, 0.3, 0.5}, 0);
    CHECK(g.edges.empty());
}

TEST_CASE("xor on uniform bits distinguishes the target symbols") {
    const auto g =
        build_characteristic_graph(xor_table(), {0.25, 0.25, 0.25, 0.25}, 0);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0] == std::make_pair(0, 1));
    CHECK(g.pmf[0] == doctest::Approx(0.5));
}

TEST_CASE("zero-measure contexts do not create edges") {
    // f = x1 AND x2, but x2 = 1 never happens: nothing distinguishes x1.
    FunctionTable f;
    f.arity = 2;
    f.alphabet_sizes = {2, 2};
    f.outputs = {0, 0, 0, 1};
    const auto g = build_characteristic_graph(f, {0.5, 0.0, 0.5, 0.0}, 0);
    CHECK(g.edges.empty());
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(
        build_characteristic_graph(single_variable_table({0, 1, 2}), {0.5, 0.5}, 0),
        InvalidArgument);
}

TEST_CASE("maximal independent sets: canonical shapes") {
    const std::vector<double> u3(3, 1.0 / 3);
    const auto k3 = CharacteristicGraph::from_edges(3, u3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(maximal_independent_sets(k3) ==
          std::vector<std::uint32_t>{0b001, 0b010, 0b100});

    const auto empty3 = CharacteristicGraph::from_edges(3, u3, {});
    CHECK(maximal_independent_sets(empty3) == std::vector<std::uint32_t>{0b111});

    const auto c5 = cycle5(std::vector<double>(5, 0.2));
    const auto sets = maximal_independent_sets(c5);
    CHECK(sets == oracles::mis_bruteforce(c5));
    REQUIRE(sets.size() == 5);
    for (auto s : sets) CHECK(std::popcount(s) == 2);
}

TEST_CASE("maximal independent sets match brute force on random graphs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(u(rng) * 6);
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (u(rng) < 0.4) edges.emplace_back(a, b);
        const auto g = CharacteristicGraph::from_edges(
            n, std::vector<double>(n, 1.0 / n), edges);
        CHECK(maximal_independent_sets(g) == oracles::mis_bruteforce(g));
    }
}

TEST_CASE("vertex cap is enforced") {
    const int n = 21;
    const auto g =
        CharacteristicGraph::from_edges(n, std::vector<double>(n, 1.0 / n), {});
    CHECK_THROWS_AS(maximal_independent_sets(g), SizeLimitError);
    CHECK_NOTHROW(maximal_independent_sets(g, 21));
}

TEST_CASE("graph entropy of complete and empty graphs is exact") {
    const std::vector<double> u4(4, 0.25);
    const auto k4 = CharacteristicGraph::from_edges(
        4, u4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const EntropyResult complete = graph_entropy(k4);
    CHECK(complete.value == 2.0);  // H(X) exactly, forced witness
    CHECK(complete.iterations == 0);

    const auto e4 = CharacteristicGraph::from_edges(4, {0.1, 0.2, 0.3, 0.4}, {});
    CHECK(graph_entropy(e4).value == 0.0);
}

TEST_CASE("graph entropy of the 5-cycle matches the restart oracle") {
    const auto c5 = cycle5(std::vector<double>(5, 0.2));
    const EntropyResult am = graph_entropy(c5);
    const double oracle = graph_entropy_oracle(c5, 16, 0x5eed);
    CHECK(std::abs(am.value - oracle) < 1e-4);
    // C5 is vertex-transitive with independence number 2: H = log2(5/2).
    CHECK(am.value == doctest::Approx(std::log2(2.5)).epsilon(1e-6));
    CHECK(am.iterations > 0);
    CHECK(am.gap < 1e-9);
}

TEST_CASE("witness is supported only on sets containing the vertex") {
    std::mt19937_64 rng(7);
    const auto c5 = cycle5(oracles::random_pmf(5, rng));
    const EntropyResult r = graph_entropy(c5);
    for (int x = 0; x < 5; ++x) {
        int si = 0;
        double mass = 0.0;
        for (std::size_t i = 0; i < r.sets.size(); ++i) {
            if (!(r.sets[i] & (1u << x))) continue;
            mass += r.witness[x][si++];
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(static_cast<std::size_t>(si) == r.witness[x].size());
    }
}

TEST_CASE("entropic surjectivity endpoints") {
    const auto identity = build_characteristic_graph(
        single_variable_table({0, 1, 2, 3}), std::vector<double>(4, 0.25), 0);
    CHECK(entropic_surjectivity(identity) == 1.0);  // exact via forced witness

    const auto constant = build_characteristic_graph(
        single_variable_table({5, 5, 5, 5}), std::vector<double>(4, 0.25), 0);
    CHECK(entropic_surjectivity(constant) == 0.0);

    const auto c5 = cycle5(std::vector<double>(5, 0.2));
    CHECK(entropic_surjectivity(c5) ==
          doctest::Approx(std::log2(2.5) / std::log2(5.0)).epsilon(1e-6));

    const auto degenerate = build_characteristic_graph(
        single_variable_table({0, 1}), {1.0, 0.0}, 0);
    CHECK_THROWS_AS(entropic_surjectivity(degenerate), DegenerateSourceError);
}

TEST_CASE("deficiency of identity and constant on Z_3") {
    const DeficiencyResult id3 = deficiency({0, 1, 2});
    CHECK(id3.alpha0 == 4);  // (n-1)^2: Delta_{f,a} == a misses every b != a
    const DeficiencyResult c3 = deficiency({1, 1, 1});
    CHECK(c3.alpha0 == 4);  // Delta == 0 misses every b != 0
    for (int a = 1; a < 3; ++a) {
        CHECK(c3.lambda[a - 1][0] == 3);
        CHECK(id3.lambda[a - 1][a] == 3);
    }
}

TEST_CASE("deficiency of x^2 on Z_5 by exhaustive enumeration") {
    std::vector<int> f(5);
    for (int x = 0; x < 5; ++x) f[x] = (x * x) % 5;
    const DeficiencyResult r = deficiency(f);

    long long alpha0 = 0;
    for (int a = 1; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            int count = 0;
            for (int x = 0; x < 5; ++x)
                if ((f[(x + a) % 5] - f[x] + 25) % 5 == b) ++count;
            CHECK(r.lambda[a - 1][b] == count);
            if (count == 0) ++alpha0;
        }
    CHECK(r.alpha0 == alpha0);
    CHECK(r.alpha0 == 0);  // 2ax + a^2 is a bijection in x for every a != 0
}

TEST_CASE("deficiency counting identity: rows of lambda sum to n") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(trial % 5);
        std::vector<int> f(n);
        std::iota(f.begin(), f.end(), 0);
        std::shuffle(f.begin(), f.end(), rng);
        const DeficiencyResult r = deficiency(f);
        for (int a = 1; a < n; ++a) {
            int sum = 0;
            for (int b = 0; b < n; ++b) sum += r.lambda[a - 1][b];
            CHECK(sum == n);
        }
    }
    CHECK_THROWS_AS(deficiency({0, 5, 1}), InvalidArgument);  // 5 outside Z_3
}

TEST_CASE("rate region membership") {
    // Correlated bits: conditional corner lies strictly below the sum line.
    const std::vector<double> corr = {0.4, 0.1, 0.1, 0.4};
    const EntropyTriple sw = shannon_triple(corr, 2, 2);
    CHECK(sw.h1 == doctest::Approx(0.721928094887).epsilon(1e-9));
    CHECK(sw.h12 == doctest::Approx(1.721928094887).epsilon(1e-9));
    CHECK(rate_region_membership(sw.h1, sw.h2, sw) == RegionVerdict::Outside);

    // Slepian-Wolf corner point (H(X1), H(X2|X1)) achieves the sum bound.
    CHECK(rate_region_membership(sw.h12 - sw.h2 /* H(X1) */, sw.h2, sw) ==
          RegionVerdict::Boundary);
    CHECK(rate_region_membership(2.0, 2.0, sw) == RegionVerdict::Inside);

    CHECK_THROWS_AS(rate_region_membership(1.0, 1.0, {1.5, 0.5, 1.0}),
                    InvalidArgument);  // conditional above joint
}

TEST_CASE("xor: graph-entropy triple coincides with the Shannon triple") {
    const std::vector<double> uniform(4, 0.25);
    const EntropyTriple sw = shannon_triple(uniform, 2, 2);
    const EntropyTriple gt = graph_triple(xor_table(), uniform);
    CHECK(gt.h1 == doctest::Approx(sw.h1).epsilon(1e-6));
    CHECK(gt.h2 == doctest::Approx(sw.h2).epsilon(1e-6));
    CHECK(gt.h12 == doctest::Approx(sw.h12).epsilon(1e-6));
    // Every Slepian-Wolf point is admissible for the graph region.
    CHECK(rate_region_membership(sw.h1, sw.h2, gt) != RegionVerdict::Outside);
}

TEST_CASE("compressible function: graph region strictly contains SW points") {
    // f(x1, x2) = [x1 == 2] ignores x2; x1 uniform on 3 symbols, x2 on 2.
    FunctionTable f;
    f.arity = 2;
    f.alphabet_sizes = {3, 2};
    f.outputs = {0, 0, 0, 0, 1, 1};
    const std::vector<double> uniform(6, 1.0 / 6);

    const EntropyTriple sw = shannon_triple(uniform, 3, 2);
    const EntropyTriple gt = graph_triple(f, uniform);
    const double h23 = -std::log2(2.0 / 3.0) * 2.0 / 3.0 - std::log2(1.0 / 3.0) / 3.0;
    CHECK(gt.h1 == doctest::Approx(h23).epsilon(1e-5));
    CHECK(gt.h2 == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(gt.h12 == doctest::Approx(h23).epsilon(1e-5));

    // (1.0, 0.1) is feasible for computing f but not for full recovery.
    CHECK(rate_region_membership(1.0, 0.1, gt) == RegionVerdict::Inside);
    CHECK(rate_region_membership(1.0, 0.1, sw) == RegionVerdict::Outside);
}

TEST_CASE("alternating minimization matches the oracle on random graphs") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 4 + trial % 2;
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (u(rng) < 0.45) edges.emplace_back(a, b);
        const auto g =
            oracles::graph_from_edge_mask(n, 0, oracles::random_pmf(n, rng));
        auto gg = CharacteristicGraph::from_edges(n, g.pmf, edges);
        const double am = graph_entropy(gg).value;
        const double oracle = graph_entropy_oracle(gg, 16, 1000 + trial);
        CHECK(std::abs(am - oracle) < 1e-4);
    }
}

TEST_CASE("adding an edge never decreases graph entropy") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5;
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (u(rng) < 0.35) edges.emplace_back(a, b);
        const auto pmf = oracles::random_pmf(n, rng);
        const auto g = CharacteristicGraph::from_edges(n, pmf, edges);
        const double base = graph_entropy(g).value;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (g.adjacent(a, b)) continue;
                auto extended = edges;
                extended.emplace_back(a, b);
                const auto g2 = CharacteristicGraph::from_edges(n, pmf, extended);
                CHECK(graph_entropy(g2).value >= base - 1e-6);
            }
    }
}

TEST_CASE("oracle is deterministic and identical serial vs parallel") {
    const auto c5 = cycle5(std::vector<double>(5, 0.2));
    const double a = graph_entropy_oracle(c5, 16, 2024, false);
    const double b = graph_entropy_oracle(c5, 16, 2024, false);
    const double c = graph_entropy_oracle(c5, 16, 2024, true);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("function table text format round trip") {
    const std::string text =
        "# xor on uniform bits\n"
        "x1 x2 f p\n"
        "0 0 0 0.25\n"
        "0 1 1 0.25\n"
        "1 0 1 0.25\n"
        "1 1 0 0.25\n";
    const ParsedFunctionTable pt = parse_function_table(text);
    CHECK(pt.table.arity == 2);
    CHECK(pt.variable_names == std::vector<std::string>{"x1", "x2"});
    CHECK(pt.output_name == "f");
    CHECK(pt.table.outputs == std::vector<int>{0, 1, 1, 0});

    const auto g = build_characteristic_graph(pt.table, pt.joint_pmf, 0);
    CHECK(g.edges.size() == 1);

    CHECK_THROWS_AS(parse_function_table("x f p\n0 0 0.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_function_table("x f p\n0 0 0.4\n1 1 0.4\n"),
                    InvalidArgument);  // pmf does not sum to 1
}

TEST_CASE("entropy record format mentions value and witness support") {
    const auto c5 = cycle5(std::vector<double>(5, 0.2));
    const EntropyResult r = graph_entropy(c5);
    const std::string rec = format_entropy_record(r, c5);
    CHECK(rec.find("value_bits=") != std::string::npos);
    CHECK(rec.find("maximal_independent_sets=") != std::string::npos);
    CHECK(rec.find("witness x=0:") != std::string::npos);
}
