#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infc/errors.hpp"
#include "infc/mincost.hpp"
#include "infc/sim_queue.hpp"

using namespace infc;

namespace {

NetworkSpec mm1_spec(double beta = 1.0, double mu = 2.0) {
    NetworkSpec spec;
    spec.node_count = 1;
    FunctionClass fc;
    fc.id = "c0";
    fc.complexity = ComplexityFamily::MapReduce;
    fc.k = 1.0;
    fc.surjectivity = 1.0;
    spec.classes = {fc};
    spec.routing = {Eigen::MatrixXd::Zero(1, 1)};
    spec.arrival_split = {Eigen::VectorXd::Ones(1)};
    spec.external_rate = {beta};
    spec.service_rate = Eigen::MatrixXd::Constant(1, 1, mu);
    return spec;
}

NetworkSpec two_node_spec(double surjectivity, double mu = 2.0) {
    NetworkSpec spec;
    spec.node_count = 2;
    FunctionClass fc;
    fc.id = "c0";
    fc.complexity = ComplexityFamily::MapReduce;
    fc.k = 1.0;
    fc.surjectivity = surjectivity;
    spec.classes = {fc};
    Eigen::MatrixXd r(2, 2);
    r << 0.0, 0.5, 0.5, 0.0;
    spec.routing = {r};
    Eigen::VectorXd split(2);
    split << 0.5, 0.5;
    spec.arrival_split = {split};
    spec.external_rate = {2.0};
    spec.service_rate = Eigen::MatrixXd::Constant(2, 1, mu);
    return spec;
}

}  // namespace

TEST_CASE("m/m/1 baseline matches the closed form within 3 standard errors") {
    SimConfig cfg;
    cfg.spec = mm1_spec();
    cfg.assignment = relay_assignment(cfg.spec);  // gamma = lambda: no thinning
    cfg.horizon = 3e4;
    cfg.warmup = 0.1;
    cfg.replications = 8;
    cfg.seed = 2024;

    const SimReport rep = run(cfg);
    CHECK_FALSE(rep.diverged);
    CHECK(rep.conservation_ok);
    const auto& s = rep.at(0, 0);
    // L = rho/(1-rho) = 1 at rho = 0.5
    CHECK(std::abs(s.l_mean - 1.0) <= 3.0 * s.l_se);
    CHECK(std::abs(s.lambda_mean - 1.0) <= 4.0 * s.lambda_se);
    CHECK(s.p_dep_mean == 1.0);  // no routing: everything departs
}

TEST_CASE("thinning realizes the configured survival ratio") {
    SimConfig cfg;
    cfg.spec = mm1_spec();
    cfg.spec.classes[0].surjectivity = 0.5;
    cfg.assignment = surjectivity_assignment(cfg.spec);  // gamma = 0.5 lambda
    cfg.horizon = 3e4;
    cfg.warmup = 0.1;
    cfg.replications = 8;
    cfg.seed = 7;

    const SimReport rep = run(cfg);
    const auto& s = rep.at(0, 0);
    const double ratio = s.gamma_mean / s.lambda_mean;
    const double se = s.gamma_se / s.lambda_mean;
    CHECK(std::abs(ratio - 0.5) <= 3.0 * std::max(se, 1e-4));
}

TEST_CASE("same seed reproduces the report and trace exactly") {
    SimConfig cfg;
    cfg.spec = two_node_spec(0.5);
    cfg.assignment = surjectivity_assignment(cfg.spec);
    cfg.horizon = 5e3;
    cfg.warmup = 0.2;
    cfg.replications = 3;
    cfg.seed = 99;
    cfg.collect_trace = true;
    cfg.trace_max_records = 500;

    const SimReport a = run(cfg);
    const SimReport b = run(cfg);
    CHECK(format_sim_report(cfg, a) == format_sim_report(cfg, b));
    CHECK(format_trace(a) == format_trace(b));
    REQUIRE(a.trace.size() == 500);

    cfg.parallel = true;
    const SimReport c = run(cfg);
    CHECK(format_sim_report(cfg, a) == format_sim_report(cfg, c));
    CHECK(format_trace(a) == format_trace(c));
}

TEST_CASE("packet conservation holds exactly per replication") {
    SimConfig cfg;
    cfg.spec = two_node_spec(0.4);
    cfg.assignment = surjectivity_assignment(cfg.spec);
    cfg.horizon = 2e3;
    cfg.warmup = 0.0;
    cfg.replications = 5;
    cfg.seed = 5;
    CHECK(run(cfg).conservation_ok);
}

TEST_CASE("empirical departure probability matches the routing slack") {
    SimConfig cfg;
    cfg.spec = two_node_spec(1.0);  // relay network, p_dep = 0.5 per node
    cfg.assignment = relay_assignment(cfg.spec);
    cfg.horizon = 2e4;
    cfg.warmup = 0.1;
    cfg.replications = 6;
    cfg.seed = 31;
    const SimReport rep = run(cfg);
    for (int v = 0; v < 2; ++v) {
        const auto& s = rep.at(v, 0);
        CHECK(std::abs(s.p_dep_mean - 0.5) <= 3.0 * std::max(s.p_dep_se, 1e-4));
    }
}

TEST_CASE("jackson relay network matches rho/(1-rho) per node") {
    SimConfig cfg;
    cfg.spec = two_node_spec(1.0, 3.0);
    cfg.assignment = relay_assignment(cfg.spec);
    cfg.horizon = 4e4;
    cfg.warmup = 0.1;
    cfg.replications = 8;
    cfg.seed = 11;
    const SimReport rep = run(cfg);
    // lambda = (I-P^T)^{-1} beta = 2 per node, rho = 2/3, L = 2
    for (int v = 0; v < 2; ++v) {
        const auto& s = rep.at(v, 0);
        CHECK(std::abs(s.l_mean - 2.0) <= 3.0 * s.l_se);
        CHECK(s.traffic_gap < 0.05);
    }
}

TEST_CASE("littles law audit passes at stationarity and fails in transient") {
    SimConfig cfg;
    cfg.spec = mm1_spec();
    cfg.assignment = relay_assignment(cfg.spec);
    cfg.horizon = 3e4;
    cfg.warmup = 0.1;
    cfg.replications = 4;
    cfg.seed = 17;
    CHECK(littles_law_audit(run(cfg), 0.05).all_pass);

    // negative control: no warmup, short horizon, heavy load; the window
    // edge effects break the identity (gap ~0.5 at this seed)
    SimConfig bad;
    bad.spec = mm1_spec(1.95, 2.0);
    bad.assignment = relay_assignment(bad.spec);
    bad.horizon = 30.0;
    bad.warmup = 0.0;
    bad.replications = 1;
    bad.seed = 2;
    CHECK_FALSE(littles_law_audit(run(bad), 0.05).all_pass);
}

TEST_CASE("overloaded configuration aborts with a divergence diagnostic") {
    SimConfig cfg;
    cfg.spec = mm1_spec(3.0, 2.0);  // rho = 1.5
    cfg.assignment = relay_assignment(cfg.spec);  // unstable relay
    cfg.assignment.lambda.setConstant(3.0);
    cfg.assignment.gamma.setConstant(3.0);
    cfg.horizon = 1e5;
    cfg.warmup = 0.0;
    cfg.replications = 1;
    cfg.seed = 1;
    cfg.queue_cap = 500;
    const SimReport rep = run(cfg);
    CHECK(rep.diverged);
    CHECK(rep.divergence_info.find("queue cap") != std::string::npos);
}

TEST_CASE("explicit computation stage variant runs and conserves packets") {
    SimConfig cfg;
    cfg.spec = mm1_spec();
    cfg.spec.classes[0].surjectivity = 0.6;
    cfg.assignment = surjectivity_assignment(cfg.spec);
    cfg.explicit_computation_stage = true;
    cfg.computation_rate = Eigen::MatrixXd::Constant(1, 1, 8.0);
    cfg.horizon = 5e3;
    cfg.warmup = 0.1;
    cfg.replications = 3;
    cfg.seed = 23;
    const SimReport rep = run(cfg);
    CHECK_FALSE(rep.diverged);
    CHECK(rep.conservation_ok);
    const double ratio = rep.at(0, 0).gamma_mean / rep.at(0, 0).lambda_mean;
    CHECK(std::abs(ratio - 0.6) < 0.05);
}

TEST_CASE("config validation rejects bad settings") {
    SimConfig cfg;
    cfg.spec = mm1_spec();
    cfg.assignment = relay_assignment(cfg.spec);
    cfg.warmup = 0.95;
    CHECK_THROWS_AS(run(cfg), InvalidArgument);
    cfg.warmup = 0.1;
    cfg.replications = 0;
    CHECK_THROWS_AS(run(cfg), InvalidArgument);
    cfg.replications = 1;
    cfg.horizon = -1.0;
    CHECK_THROWS_AS(run(cfg), InvalidArgument);
}

TEST_CASE("report export carries the row format and audit columns") {
    SimConfig cfg;
    cfg.spec = two_node_spec(0.5);
    cfg.assignment = surjectivity_assignment(cfg.spec);
    cfg.horizon = 2e3;
    cfg.replications = 2;
    cfg.seed = 41;
    const SimReport rep = run(cfg);
    const std::string text = format_sim_report(cfg, rep);
    CHECK(text.find("node\tclass\tlambda_hat") != std::string::npos);
    CHECK(text.find("littles_gap") != std::string::npos);
    CHECK(text.find("c0") != std::string::npos);
}
