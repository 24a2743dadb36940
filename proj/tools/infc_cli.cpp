#include <CLI11.hpp>
#include <cstdio>

#include "infc/cli.hpp"
#include "infc/errors.hpp"
#include "infc/util.hpp"

namespace {

struct GlobalFlags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 0.0;
    bool tol_set = false;
    int replications = 0;
    bool reps_set = false;

    infc::CliOverrides overrides() const {
        infc::CliOverrides ov;
        if (!out.empty()) ov.out_dir = out;
        if (seed_set) ov.seed = seed;
        if (tol_set) ov.tol = tol;
        if (reps_set) ov.replications = replications;
        return ov;
    }
};

void add_common(CLI::App* cmd, GlobalFlags& g, bool config_required) {
    auto* c = cmd->add_option("--config", g.config, "scenario config file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", g.out, "output directory (overrides the config)");
    cmd->add_option("--seed", g.seed, "RNG seed override")
        ->each([&g](const std::string&) { g.seed_set = true; });
    cmd->add_option("--tol", g.tol,
                    "tolerance (solver tolerance for mincost, audit tolerance "
                    "for simulate)")
        ->each([&g](const std::string&) { g.tol_set = true; });
    cmd->add_option("--replications", g.replications, "simulation replications")
        ->each([&g](const std::string&) { g.reps_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"in-network computation planner and validator"};
    app.require_subcommand(1);

    GlobalFlags g;
    std::string table_arg;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario config");
    add_common(validate, g, true);
    CLI::App* threshold =
        app.add_subcommand("threshold", "load-threshold sweep over M");
    add_common(threshold, g, true);
    CLI::App* mincost =
        app.add_subcommand("mincost", "solve MinCost (and configured sweeps)");
    add_common(mincost, g, true);
    CLI::App* simulate =
        app.add_subcommand("simulate", "discrete-event validation run");
    add_common(simulate, g, true);
    CLI::App* entropy = app.add_subcommand(
        "entropy", "graph entropy of function tables (config classes or a file)");
    add_common(entropy, g, false);
    entropy->add_option("table", table_arg, "function-table file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (entropy->parsed() && !table_arg.empty())
            return infc::run_entropy_table(table_arg, g.overrides());
        if (entropy->parsed() && g.config.empty()) {
            std::fprintf(stderr, "entropy: need --config or a table file\n");
            return infc::kExitConfig;
        }

        const infc::Scenario sc = infc::load_scenario(g.config);
        if (validate->parsed()) return infc::run_validate(sc);
        if (threshold->parsed()) return infc::run_threshold(sc, g.overrides());
        if (mincost->parsed()) return infc::run_mincost(sc, g.overrides());
        if (simulate->parsed()) return infc::run_simulate(sc, g.overrides());
        if (entropy->parsed()) return infc::run_entropy(sc, g.overrides());
    } catch (const infc::InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return infc::kExitConfig;
    } catch (const infc::SolverError& e) {
        std::fprintf(stderr, "solver error: %s (best=%g gap=%g)\n", e.what(),
                     e.best_value, e.gap);
        return infc::kExitSolver;
    } catch (const infc::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return infc::kExitSolver;
    } catch (const infc::InstabilityError& e) {
        std::fprintf(stderr, "unstable: %s\n", e.what());
        return simulate->parsed() ? infc::kExitSimulation : infc::kExitSolver;
    } catch (const infc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return simulate->parsed() ? infc::kExitSimulation : infc::kExitSolver;
    }
    return infc::kExitOk;
}
