// Timing harness for the OpenMP kernels against their serial reference
// paths: the restart oracle, simulation replications and a MinCost sweep.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "infc/graph_entropy.hpp"
#include "infc/mincost.hpp"
#include "infc/sim_queue.hpp"

using namespace infc;
namespace chrono = std::chrono;

namespace {

double now_ms() {
    return chrono::duration<double, std::milli>(
               chrono::steady_clock::now().time_since_epoch())
        .count();
}

CharacteristicGraph random_graph(int n, double edge_prob, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (u(rng) < edge_prob) edges.emplace_back(a, b);
    std::vector<double> pmf(n);
    double sum = 0.0;
    for (double& p : pmf) {
        p = u(rng) + 0.05;
        sum += p;
    }
    for (double& p : pmf) p /= sum;
    return CharacteristicGraph::from_edges(n, pmf, edges);
}

NetworkSpec two_node_spec(double gamma_c) {
    NetworkSpec spec;
    spec.node_count = 2;
    FunctionClass fc;
    fc.id = "c0";
    fc.complexity = ComplexityFamily::Classification;
    fc.k = 2.0;
    fc.surjectivity = gamma_c;
    spec.classes = {fc};
    Eigen::MatrixXd r(2, 2);
    r << 0.0, 0.5, 0.5, 0.0;
    spec.routing = {r};
    Eigen::VectorXd split(2);
    split << 0.5, 0.5;
    spec.arrival_split = {split};
    spec.external_rate = {2.0};
    spec.service_rate = Eigen::MatrixXd::Constant(2, 1, 3.0);
    return spec;
}

void bench_entropy() {
    std::mt19937_64 rng(7);
    std::vector<CharacteristicGraph> graphs;
    for (int i = 0; i < 24; ++i) graphs.push_back(random_graph(8, 0.4, rng));

    double serial_ms = 0.0, parallel_ms = 0.0, check = 0.0, check_par = 0.0;
    {
        const double t0 = now_ms();
        for (const auto& g : graphs) check += graph_entropy_oracle(g, 16, 11, false);
        serial_ms = now_ms() - t0;
    }
    {
        const double t0 = now_ms();
        for (const auto& g : graphs)
            check_par += graph_entropy_oracle(g, 16, 11, true);
        parallel_ms = now_ms() - t0;
    }
    std::printf("entropy oracle   serial %8.1f ms   openmp %8.1f ms   x%.2f   "
                "(values match: %s)\n",
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                check == check_par ? "yes" : "NO");
}

void bench_sim() {
    SimConfig cfg;
    cfg.spec = two_node_spec(0.5);
    cfg.assignment = surjectivity_assignment(cfg.spec);
    cfg.horizon = 4e4;
    cfg.warmup = 0.1;
    cfg.replications = 8;
    cfg.seed = 99;

    cfg.parallel = false;
    const double t0 = now_ms();
    const SimReport serial = run(cfg);
    const double serial_ms = now_ms() - t0;

    cfg.parallel = true;
    const double t1 = now_ms();
    const SimReport parallel = run(cfg);
    const double parallel_ms = now_ms() - t1;

    const bool match = serial.at(0, 0).l_mean == parallel.at(0, 0).l_mean &&
                       serial.events_processed == parallel.events_processed;
    std::printf("sim replications serial %8.1f ms   openmp %8.1f ms   x%.2f   "
                "(reports match: %s)\n",
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "yes" : "NO");
}

void bench_mincost() {
    MinCostProblem p = MinCostProblem::from_spec(two_node_spec(0.6));
    p.cost_models = {CostModel::ClassificationConvex};

    std::vector<double> grid;
    for (int i = 0; i < 48; ++i) grid.push_back(1.5 + 0.25 * i);

    auto sweep = [&](bool parallel) {
        double total = 0.0;
        std::vector<double> objectives(grid.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            MinCostProblem q = p;
            q.spec.classes[0].k = grid[i];
            objectives[i] = solve_mincost(q).objective;
        }
        for (double o : objectives) total += o;
        return total;
    };

    const double t0 = now_ms();
    const double a = sweep(false);
    const double serial_ms = now_ms() - t0;
    const double t1 = now_ms();
    const double b = sweep(true);
    const double parallel_ms = now_ms() - t1;
    std::printf("mincost sweep    serial %8.1f ms   openmp %8.1f ms   x%.2f   "
                "(objectives match: %s)\n",
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                a == b ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "all";
    std::printf("threads available: %d\n", omp_get_max_threads());
    if (mode == "all" || mode == "entropy") bench_entropy();
    if (mode == "all" || mode == "sim") bench_sim();
    if (mode == "all" || mode == "mincost") bench_mincost();
    return 0;
}
