#include "infc/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "infc/errors.hpp"
#include "infc/util.hpp"

namespace infc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InvalidArgument("config " + path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& path, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        fail(path, "expected an array of length " + std::to_string(n));
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = get_number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& path, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        fail(path, "expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        m.row(r) = get_vector(j[r], path + "[" + std::to_string(r) + "]", cols);
    return m;
}

std::vector<double> get_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "grid must be a nonempty array");
    std::vector<double> g;
    for (std::size_t i = 0; i < j.size(); ++i)
        g.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) fail(path, "grid must be strictly increasing");
    return g;
}

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

std::string to_string(SweepKind s) {
    switch (s) {
        case SweepKind::None: return "none";
        case SweepKind::ThresholdVsM: return "threshold_vs_M";
        case SweepKind::MinCostVsK: return "mincost_vs_k";
        case SweepKind::MinCostVsSurjectivity: return "mincost_vs_surjectivity";
        case SweepKind::Custom: return "custom";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text, const std::string& origin_path) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config " + origin_path + ":" +
                              std::to_string(line_of_offset(text, e.byte)) + ": " +
                              e.what());
    }

    Scenario sc;
    sc.config_path = origin_path;
    sc.config_hash = fnv1a64(text);

    if (!root.contains("network")) fail("network", "missing section");
    if (!root.contains("classes") || !root["classes"].is_array() ||
        root["classes"].empty())
        fail("classes", "missing or empty class list");

    const json& net = root["network"];
    if (!net.contains("node_count")) fail("network.node_count", "missing");
    const int n = net["node_count"].get<int>();
    if (n <= 0) fail("network.node_count", "must be positive");
    sc.spec.node_count = n;

    // classes first: their ids key the per-class network sections
    const std::filesystem::path base =
        origin_path.empty() ? std::filesystem::path(".")
                            : std::filesystem::path(origin_path).parent_path();
    for (std::size_t i = 0; i < root["classes"].size(); ++i) {
        const json& jc = root["classes"][i];
        const std::string cpath = "classes[" + std::to_string(i) + "]";
        FunctionClass fc;
        if (!jc.contains("id") || !jc["id"].is_string()) fail(cpath + ".id", "missing");
        fc.id = jc["id"].get<std::string>();
        if (!jc.contains("complexity")) fail(cpath + ".complexity", "missing");
        fc.complexity = complexity_from_string(jc["complexity"].get<std::string>());
        if (fc.complexity == ComplexityFamily::Custom)
            fail(cpath + ".complexity", "custom families are API-only");
        fc.k = jc.contains("k") ? get_number(jc["k"], cpath + ".k") : 1.0;

        if (!jc.contains("surjectivity")) fail(cpath + ".surjectivity", "missing");
        if (jc["surjectivity"].is_string()) {
            if (jc["surjectivity"].get<std::string>() != "auto")
                fail(cpath + ".surjectivity", "expected a number or \"auto\"");
            if (!jc.contains("function_table"))
                fail(cpath + ".function_table",
                     "required when surjectivity is \"auto\"");
            AutoEntropyInfo info;
            info.class_index = static_cast<int>(i);
            info.table_path =
                (base / jc["function_table"].get<std::string>()).string();
            info.target_variable =
                jc.contains("target_variable") ? jc["target_variable"].get<int>() : 0;
            const ParsedFunctionTable pt = load_function_table(info.table_path);
            info.graph = build_characteristic_graph(pt.table, pt.joint_pmf,
                                                    info.target_variable);
            info.entropy = graph_entropy(info.graph);
            info.h_source = shannon_entropy(info.graph.pmf);
            if (info.h_source <= 0.0)
                fail(cpath + ".function_table", "degenerate source (H(X)=0)");
            fc.surjectivity =
                std::clamp(info.entropy.value / info.h_source, 0.0, 1.0);
            sc.auto_entropy.push_back(std::move(info));
        } else {
            fc.surjectivity = get_number(jc["surjectivity"], cpath + ".surjectivity");
        }
        sc.cost_models.push_back(
            jc.contains("cost_model")
                ? cost_model_from_string(jc["cost_model"].get<std::string>())
                : default_cost_model(fc.complexity));
        sc.spec.classes.push_back(std::move(fc));
    }
    sc.h_func.assign(sc.spec.classes.size(), 0.0);
    for (const auto& info : sc.auto_entropy)
        sc.h_func[info.class_index] = info.entropy.value;

    auto per_class = [&](const char* key) -> const json& {
        if (!net.contains(key)) fail(std::string("network.") + key, "missing");
        return net[key];
    };
    const json& routing = per_class("routing");
    const json& split = per_class("arrival_split");
    const json& ext = per_class("external_rate");
    const json& service = per_class("service_rate");
    sc.spec.service_rate = Eigen::MatrixXd::Zero(n, sc.spec.class_count());
    for (int c = 0; c < sc.spec.class_count(); ++c) {
        const std::string& id = sc.spec.classes[c].id;
        if (!routing.contains(id)) fail("network.routing." + id, "missing");
        sc.spec.routing.push_back(
            get_matrix(routing[id], "network.routing." + id, n, n));
        if (!split.contains(id)) fail("network.arrival_split." + id, "missing");
        sc.spec.arrival_split.push_back(
            get_vector(split[id], "network.arrival_split." + id, n));
        if (!ext.contains(id)) fail("network.external_rate." + id, "missing");
        sc.spec.external_rate.push_back(
            get_number(ext[id], "network.external_rate." + id));
        if (!service.contains(id)) fail("network.service_rate." + id, "missing");
        sc.spec.service_rate.col(c) =
            get_vector(service[id], "network.service_rate." + id, n);
    }

    if (root.contains("experiment")) {
        const json& ex = root["experiment"];
        if (ex.contains("name")) sc.name = ex["name"].get<std::string>();
        if (ex.contains("output")) sc.out_dir = ex["output"].get<std::string>();
        if (ex.contains("sweep")) {
            const std::string s = ex["sweep"].get<std::string>();
            if (s == "none") sc.sweep = SweepKind::None;
            else if (s == "threshold_vs_M") sc.sweep = SweepKind::ThresholdVsM;
            else if (s == "mincost_vs_k") sc.sweep = SweepKind::MinCostVsK;
            else if (s == "mincost_vs_surjectivity")
                sc.sweep = SweepKind::MinCostVsSurjectivity;
            else if (s == "custom") sc.sweep = SweepKind::Custom;
            else fail("experiment.sweep", "unknown sweep kind: " + s);
        }
        if (ex.contains("m_grid")) sc.m_grid = get_grid(ex["m_grid"], "experiment.m_grid");
        if (ex.contains("k_grid")) sc.k_grid = get_grid(ex["k_grid"], "experiment.k_grid");
        if (ex.contains("surjectivity_grid"))
            sc.gamma_grid = get_grid(ex["surjectivity_grid"],
                                     "experiment.surjectivity_grid");
        if (sc.sweep == SweepKind::ThresholdVsM && sc.m_grid.empty())
            fail("experiment.m_grid", "required by threshold_vs_M");
        if (sc.sweep == SweepKind::MinCostVsK && sc.k_grid.empty())
            fail("experiment.k_grid", "required by mincost_vs_k");
        if (sc.sweep == SweepKind::MinCostVsSurjectivity && sc.gamma_grid.empty())
            fail("experiment.surjectivity_grid", "required by mincost_vs_surjectivity");
        for (double g : sc.gamma_grid)
            if (g < 0.0 || g > 1.0)
                fail("experiment.surjectivity_grid", "entries must lie in [0,1]");

        if (ex.contains("sim")) {
            const json& sim = ex["sim"];
            if (sim.contains("horizon"))
                sc.sim.horizon = get_number(sim["horizon"], "experiment.sim.horizon");
            if (sim.contains("warmup"))
                sc.sim.warmup = get_number(sim["warmup"], "experiment.sim.warmup");
            if (sim.contains("replications"))
                sc.sim.replications = sim["replications"].get<int>();
            if (sim.contains("seed")) sc.sim.seed = sim["seed"].get<std::uint64_t>();
            if (sim.contains("parallel")) sc.sim.parallel = sim["parallel"].get<bool>();
            if (sim.contains("queue_cap"))
                sc.sim.queue_cap = sim["queue_cap"].get<long long>();
            if (sim.contains("trace")) sc.sim.trace = sim["trace"].get<bool>();
            if (sim.contains("trace_max"))
                sc.sim.trace_max = sim["trace_max"].get<std::size_t>();
            if (sim.contains("policy")) {
                const std::string p = sim["policy"].get<std::string>();
                if (p == "relay") sc.sim.policy = SimPolicy::Relay;
                else if (p == "surjectivity") sc.sim.policy = SimPolicy::Surjectivity;
                else if (p == "mincost") sc.sim.policy = SimPolicy::MinCost;
                else fail("experiment.sim.policy", "unknown policy: " + p);
            }
            if (sim.contains("computation_rate")) {
                sc.sim.explicit_computation = true;
                sc.sim.computation_rate =
                    Eigen::MatrixXd::Zero(n, sc.spec.class_count());
                for (int c = 0; c < sc.spec.class_count(); ++c) {
                    const std::string& id = sc.spec.classes[c].id;
                    if (!sim["computation_rate"].contains(id))
                        fail("experiment.sim.computation_rate." + id, "missing");
                    sc.sim.computation_rate.col(c) =
                        get_vector(sim["computation_rate"][id],
                                   "experiment.sim.computation_rate." + id, n);
                }
            }
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string network_to_json(const NetworkSpec& spec) {
    json net;
    net["node_count"] = spec.node_count;
    json classes = json::array();
    for (int c = 0; c < spec.class_count(); ++c) {
        const auto& fc = spec.classes[c];
        json jc;
        jc["id"] = fc.id;
        jc["complexity"] = to_string(fc.complexity);
        jc["k"] = fc.k;
        jc["surjectivity"] = fc.surjectivity;
        classes.push_back(jc);

        json rows = json::array();
        for (int v = 0; v < spec.node_count; ++v) {
            json row = json::array();
            for (int w = 0; w < spec.node_count; ++w)
                row.push_back(spec.routing[c](v, w));
            rows.push_back(row);
        }
        net["routing"][fc.id] = rows;
        json split = json::array();
        for (int v = 0; v < spec.node_count; ++v)
            split.push_back(spec.arrival_split[c](v));
        net["arrival_split"][fc.id] = split;
        net["external_rate"][fc.id] = spec.external_rate[c];
        json mu = json::array();
        for (int v = 0; v < spec.node_count; ++v)
            mu.push_back(spec.service_rate(v, c));
        net["service_rate"][fc.id] = mu;
    }
    json root;
    root["network"] = net;
    root["classes"] = classes;
    return root.dump(2) + "\n";
}

NetworkSpec network_from_json(const std::string& json_text) {
    return parse_scenario(json_text, "<inline>").spec;
}

}  // namespace infc
