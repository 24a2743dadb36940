#include "infc/sim_queue.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

#include "infc/errors.hpp"
#include "infc/mincost.hpp"
#include "infc/util.hpp"

namespace infc {

namespace {

enum class EventKind : int { ExternalArrival = 0, CompDone = 1, CommDone = 2 };

struct Event {
    double time;
    EventKind kind;
    int node;
    int cls;
    std::uint64_t seq;  // total order for deterministic tie-breaking

    bool operator>(const Event& other) const {
        if (time != other.time) return time > other.time;
        return seq > other.seq;
    }
};

struct QueueState {
    std::deque<std::pair<long long, double>> jobs;  // (packet id, admit time)
    bool busy = false;
    long long size = 0;        // waiting + in service
    double last_change = 0.0;  // time of last size change
    double area = 0.0;         // integral of size over the stats window

    // explicit computation stage (sensitivity variant)
    std::deque<long long> comp_jobs;
    bool comp_busy = false;
};

struct Tally {
    long long arrivals = 0;    // in window (pre-thinning)
    long long emissions = 0;   // in window
    long long departures = 0;  // in window (subset of emissions)
    double sojourn_sum = 0.0;  // over emissions in window
    // whole-horizon counters for exact conservation
    long long arrivals_total = 0;
    long long kills_total = 0;
    long long departures_total = 0;
};

struct RepResult {
    Eigen::MatrixXd l, w, lambda, gamma, pdep;
    bool diverged = false;
    std::string divergence_info;
    long long events = 0;
    bool conservation_ok = true;
    std::vector<TraceRecord> trace;
};

class Replication {
public:
    Replication(const SimConfig& cfg, int rep)
        : cfg_(cfg),
          rng_(split_seed(cfg.seed, static_cast<std::uint64_t>(rep))),
          n_(cfg.spec.node_count),
          nc_(cfg.spec.class_count()),
          queues_(static_cast<std::size_t>(n_) * nc_),
          tallies_(static_cast<std::size_t>(n_) * nc_),
          collect_trace_(cfg.collect_trace && rep == 0) {
        win_lo_ = cfg.warmup * cfg.horizon;
        win_hi_ = cfg.horizon;
        survive_ = Eigen::MatrixXd::Ones(n_, nc_);
        for (int v = 0; v < n_; ++v)
            for (int c = 0; c < nc_; ++c) {
                const double lam = cfg.assignment.lambda(v, c);
                if (lam > 0.0)
                    survive_(v, c) =
                        std::clamp(cfg.assignment.gamma(v, c) / lam, 0.0, 1.0);
            }
    }

    RepResult run() {
        for (int c = 0; c < nc_; ++c)
            if (cfg_.spec.external_rate[c] > 0.0)
                schedule(exp_sample(cfg_.spec.external_rate[c]),
                         EventKind::ExternalArrival, 0, c);

        RepResult out;
        while (!heap_.empty()) {
            const Event ev = heap_.top();
            if (ev.time > cfg_.horizon) break;
            heap_.pop();
            ++out.events;
            now_ = ev.time;
            switch (ev.kind) {
                case EventKind::ExternalArrival: handle_external(ev.cls); break;
                case EventKind::CompDone: handle_comp_done(ev.node, ev.cls); break;
                case EventKind::CommDone: handle_comm_done(ev.node, ev.cls); break;
            }
            if (diverged_) break;
        }
        const double end = diverged_ ? now_ : cfg_.horizon;
        for (auto& q : queues_) integrate(q, end);

        out.diverged = diverged_;
        out.divergence_info = divergence_info_;
        out.l = Eigen::MatrixXd::Zero(n_, nc_);
        out.w = out.l;
        out.lambda = out.l;
        out.gamma = out.l;
        out.pdep = out.l;
        const double window = std::max(end - win_lo_, 1e-12);
        long long in_system = 0, drains = 0;
        for (int v = 0; v < n_; ++v)
            for (int c = 0; c < nc_; ++c) {
                const auto& q = queues_[idx(v, c)];
                const auto& t = tallies_[idx(v, c)];
                out.l(v, c) = q.area / window;
                out.w(v, c) = t.emissions > 0 ? t.sojourn_sum / t.emissions : 0.0;
                out.lambda(v, c) = t.arrivals / window;
                out.gamma(v, c) = t.emissions / window;
                out.pdep(v, c) =
                    t.emissions > 0 ? static_cast<double>(t.departures) / t.emissions
                                    : 0.0;
                in_system += q.size + static_cast<long long>(q.comp_jobs.size());
                drains += t.kills_total + t.departures_total;
            }
        // every externally arrived packet is eventually thinned away,
        // departs, or is still in some queue
        out.conservation_ok = (external_arrivals_ == drains + in_system);
        out.trace = std::move(trace_);
        return out;
    }

private:
    std::size_t idx(int v, int c) const {
        return static_cast<std::size_t>(v) * nc_ + c;
    }

    double exp_sample(double rate) {
        const double u = uniform_(rng_);
        return -std::log1p(-u) / rate;
    }

    void schedule(double dt, EventKind kind, int node, int cls) {
        heap_.push({now_ + dt, kind, node, cls, seq_++});
    }

    void trace(char kind, int node, int cls, long long packet) {
        if (collect_trace_ && trace_.size() < cfg_.trace_max_records)
            trace_.push_back({now_, kind, node, cls, packet});
    }

    void integrate(QueueState& q, double t) {
        const double lo = std::max(q.last_change, win_lo_);
        const double hi = std::min(t, win_hi_);
        if (hi > lo) q.area += static_cast<double>(q.size) * (hi - lo);
        q.last_change = t;
    }

    bool in_window() const { return now_ >= win_lo_ && now_ <= win_hi_; }

    int pick_split_node(int c) {
        const auto& w = cfg_.spec.arrival_split[c];
        const double u = uniform_(rng_);
        double acc = 0.0;
        for (int i = 0; i < w.size(); ++i) {
            acc += w(i);
            if (u < acc) return i;
        }
        return static_cast<int>(w.size()) - 1;
    }

    void handle_external(int c) {
        schedule(exp_sample(cfg_.spec.external_rate[c]), EventKind::ExternalArrival,
                 0, c);
        const int v = pick_split_node(c);
        ++external_arrivals_;
        arrive(v, c, next_packet_++);
    }

    void arrive(int v, int c, long long packet) {
        auto& t = tallies_[idx(v, c)];
        ++t.arrivals_total;
        if (in_window()) ++t.arrivals;
        trace('a', v, c, packet);

        if (cfg_.explicit_computation_stage) {
            auto& q = queues_[idx(v, c)];
            q.comp_jobs.push_back(packet);
            if (!q.comp_busy) {
                q.comp_busy = true;
                schedule(exp_sample(cfg_.computation_rate(v, c)), EventKind::CompDone,
                         v, c);
            }
            return;
        }
        after_computation(v, c, packet);
    }

    // The computation stage emits the packet with probability gamma/lambda,
    // otherwise absorbs it (its content got compressed into the survivors).
    void after_computation(int v, int c, long long packet) {
        auto& t = tallies_[idx(v, c)];
        if (uniform_(rng_) >= survive_(v, c)) {
            ++t.kills_total;
            trace('k', v, c, packet);
            return;
        }
        auto& q = queues_[idx(v, c)];
        integrate(q, now_);
        q.jobs.emplace_back(packet, now_);
        ++q.size;
        if (q.size > cfg_.queue_cap) {
            diverged_ = true;
            divergence_info_ = "queue cap exceeded at node " + std::to_string(v) +
                               " class " + std::to_string(c) +
                               " (t=" + std::to_string(now_) + ")";
            return;
        }
        if (!q.busy) {
            q.busy = true;
            trace('s', v, c, packet);
            schedule(exp_sample(cfg_.spec.service_rate(v, c)), EventKind::CommDone,
                     v, c);
        }
    }

    void handle_comp_done(int v, int c) {
        auto& q = queues_[idx(v, c)];
        const long long packet = q.comp_jobs.front();
        q.comp_jobs.pop_front();
        if (!q.comp_jobs.empty())
            schedule(exp_sample(cfg_.computation_rate(v, c)), EventKind::CompDone, v,
                     c);
        else
            q.comp_busy = false;
        after_computation(v, c, packet);
    }

    void handle_comm_done(int v, int c) {
        auto& q = queues_[idx(v, c)];
        auto& t = tallies_[idx(v, c)];
        const auto [packet, admit] = q.jobs.front();
        q.jobs.pop_front();
        integrate(q, now_);
        --q.size;
        if (!q.jobs.empty())
            schedule(exp_sample(cfg_.spec.service_rate(v, c)), EventKind::CommDone,
                     v, c);
        else
            q.busy = false;

        if (in_window()) {
            ++t.emissions;
            t.sojourn_sum += now_ - admit;
        }
        trace('e', v, c, packet);

        // Markov routing: forward with p_rou, depart with the row slack.
        const auto& route = cfg_.spec.routing[c];
        const double u = uniform_(rng_);
        double acc = 0.0;
        for (int w = 0; w < n_; ++w) {
            acc += route(v, w);
            if (u < acc) {
                arrive(w, c, packet);
                return;
            }
        }
        ++t.departures_total;
        if (in_window()) ++t.departures;
        trace('d', v, c, packet);
    }

    const SimConfig& cfg_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    int n_, nc_;
    std::vector<QueueState> queues_;
    std::vector<Tally> tallies_;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;
    double now_ = 0.0;
    double win_lo_ = 0.0, win_hi_ = 0.0;
    std::uint64_t seq_ = 0;
    long long next_packet_ = 0;
    long long external_arrivals_ = 0;
    Eigen::MatrixXd survive_;
    bool diverged_ = false;
    std::string divergence_info_;
    bool collect_trace_ = false;
    std::vector<TraceRecord> trace_;
};

void validate_config(const SimConfig& cfg) {
    const auto violations = validate_network(cfg.spec);
    if (!violations.empty())
        throw InvalidArgument("sim: invalid network: " + violations.front().message);
    if (!(cfg.horizon > 0.0)) throw InvalidArgument("sim: horizon must be > 0");
    if (cfg.warmup < 0.0 || cfg.warmup > 0.9)
        throw InvalidArgument("sim: warmup fraction must lie in [0, 0.9]");
    if (cfg.replications < 1)
        throw InvalidArgument("sim: replications must be >= 1");
    if (cfg.assignment.lambda.rows() != cfg.spec.node_count ||
        cfg.assignment.lambda.cols() != cfg.spec.class_count())
        throw InvalidArgument("sim: assignment shape mismatch");
    if (cfg.explicit_computation_stage &&
        (cfg.computation_rate.rows() != cfg.spec.node_count ||
         cfg.computation_rate.cols() != cfg.spec.class_count() ||
         cfg.computation_rate.minCoeff() <= 0.0))
        throw InvalidArgument("sim: explicit computation stage needs positive rates");
}

}  // namespace

SimReport run(const SimConfig& config) {
    validate_config(config);
    const int reps = config.replications;
    std::vector<RepResult> results(reps);

    if (config.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < reps; ++r) results[r] = Replication(config, r).run();
    } else {
        for (int r = 0; r < reps; ++r) results[r] = Replication(config, r).run();
    }

    SimReport rep;
    rep.nodes = config.spec.node_count;
    rep.classes = config.spec.class_count();
    rep.replications = reps;
    rep.stats.resize(static_cast<std::size_t>(rep.nodes) * rep.classes);
    for (int r = 0; r < reps; ++r) {
        rep.events_processed += results[r].events;
        rep.conservation_ok = rep.conservation_ok && results[r].conservation_ok;
        if (results[r].diverged && !rep.diverged) {
            rep.diverged = true;
            rep.divergence_info =
                "replication " + std::to_string(r) + ": " + results[r].divergence_info;
        }
        rep.rep_l.push_back(results[r].l);
        rep.rep_w.push_back(results[r].w);
        rep.rep_lambda.push_back(results[r].lambda);
        rep.rep_gamma.push_back(results[r].gamma);
        rep.rep_pdep.push_back(results[r].pdep);
    }
    rep.trace = std::move(results[0].trace);

    auto mean_se = [reps](const std::vector<Eigen::MatrixXd>& xs, int v, int c,
                          double& mean, double& se) {
        mean = 0.0;
        for (const auto& x : xs) mean += x(v, c);
        mean /= reps;
        if (reps >= 2) {
            double ss = 0.0;
            for (const auto& x : xs) ss += (x(v, c) - mean) * (x(v, c) - mean);
            se = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
        } else {
            se = std::numeric_limits<double>::quiet_NaN();
        }
    };

    for (int v = 0; v < rep.nodes; ++v)
        for (int c = 0; c < rep.classes; ++c) {
            auto& s = rep.stats[static_cast<std::size_t>(v) * rep.classes + c];
            mean_se(rep.rep_l, v, c, s.l_mean, s.l_se);
            mean_se(rep.rep_w, v, c, s.w_mean, s.w_se);
            mean_se(rep.rep_lambda, v, c, s.lambda_mean, s.lambda_se);
            mean_se(rep.rep_gamma, v, c, s.gamma_mean, s.gamma_se);
            mean_se(rep.rep_pdep, v, c, s.p_dep_mean, s.p_dep_se);
            s.littles_gap = std::abs(s.l_mean - s.gamma_mean * s.w_mean) /
                            std::max(s.l_mean, 1e-12);
        }
    // Traffic-equation residual from the empirical rates.
    for (int c = 0; c < rep.classes; ++c) {
        const auto& route = config.spec.routing[c];
        for (int v = 0; v < rep.nodes; ++v) {
            double expected = config.spec.external_rate[c] *
                              config.spec.arrival_split[c](v);
            for (int u = 0; u < rep.nodes; ++u)
                expected +=
                    rep.stats[static_cast<std::size_t>(u) * rep.classes + c].gamma_mean *
                    route(u, v);
            auto& s = rep.stats[static_cast<std::size_t>(v) * rep.classes + c];
            s.traffic_gap =
                std::abs(s.lambda_mean - expected) / std::max(s.lambda_mean, 1e-12);
        }
    }
    return rep;
}

AuditResult littles_law_audit(const SimReport& report, double tol) {
    AuditResult a;
    a.pass.resize(report.stats.size());
    for (std::size_t i = 0; i < report.stats.size(); ++i) {
        a.pass[i] = report.stats[i].littles_gap <= tol ? 1 : 0;
        a.all_pass = a.all_pass && a.pass[i];
    }
    return a;
}

std::string format_sim_report(const SimConfig& config, const SimReport& report) {
    std::ostringstream os;
    os << "# sim report (infc " << kVersion << ")\n";
    os << "# horizon=" << fmt_g(config.horizon) << " warmup=" << fmt_g(config.warmup)
       << " replications=" << report.replications << " seed=" << config.seed
       << " events=" << report.events_processed
       << " conservation_ok=" << (report.conservation_ok ? 1 : 0)
       << " diverged=" << (report.diverged ? 1 : 0) << "\n";
    if (report.diverged) os << "# divergence: " << report.divergence_info << "\n";
    os << "node\tclass\tlambda_hat\tlambda_se\tgamma_hat\tgamma_se\tL_hat\tL_se"
          "\tW_hat\tW_se\tp_dep_hat\tlittles_gap\ttraffic_gap\n";
    for (int v = 0; v < report.nodes; ++v)
        for (int c = 0; c < report.classes; ++c) {
            const auto& s = report.at(v, c);
            os << v << "\t" << config.spec.classes[c].id << "\t"
               << fmt_g(s.lambda_mean) << "\t" << fmt_g(s.lambda_se) << "\t"
               << fmt_g(s.gamma_mean) << "\t" << fmt_g(s.gamma_se) << "\t"
               << fmt_g(s.l_mean) << "\t" << fmt_g(s.l_se) << "\t" << fmt_g(s.w_mean)
               << "\t" << fmt_g(s.w_se) << "\t" << fmt_g(s.p_dep_mean) << "\t"
               << fmt_g(s.littles_gap) << "\t" << fmt_g(s.traffic_gap) << "\n";
        }
    return os.str();
}

std::string format_trace(const SimReport& report) {
    std::ostringstream os;
    for (const auto& t : report.trace)
        os << fmt_g(t.time) << "\t" << t.kind << "\t" << t.node << "\t" << t.cls
           << "\t" << t.packet << "\n";
    return os.str();
}

FlowAssignment relay_assignment(const NetworkSpec& spec) {
    FlowAssignment a = FlowAssignment::zeros(spec.node_count, spec.class_count());
    for (int c = 0; c < spec.class_count(); ++c) {
        const LambdaInterval iv = lambda_interval(spec, c);
        for (int v = 0; v < spec.node_count; ++v) {
            const double mu = spec.service_rate(v, c);
            a.lambda(v, c) = iv.upper(v);
            a.gamma(v, c) = iv.upper(v);
            a.rho(v, c) = iv.upper(v) / mu;
            a.delay(v, c) = mu > iv.upper(v)
                                ? 1.0 / (mu - iv.upper(v))
                                : std::numeric_limits<double>::infinity();
            a.l_total(v, c) = a.gamma(v, c) * a.delay(v, c);
            a.m_queue(v, c) = 0.0;
        }
    }
    return a;
}

FlowAssignment surjectivity_assignment(const NetworkSpec& spec) {
    FlowAssignment a = FlowAssignment::zeros(spec.node_count, spec.class_count());
    for (int c = 0; c < spec.class_count(); ++c) {
        const LambdaInterval iv = lambda_interval(spec, c);
        const double g = spec.classes[c].surjectivity;
        for (int v = 0; v < spec.node_count; ++v) {
            const double mu = spec.service_rate(v, c);
            const double lam = iv.lower(v);
            const double gam = g * lam;
            a.lambda(v, c) = lam;
            a.gamma(v, c) = gam;
            a.rho(v, c) = lam / mu;
            a.delay(v, c) = mu > gam ? 1.0 / (mu - gam)
                                     : std::numeric_limits<double>::infinity();
            a.l_total(v, c) = gam * a.delay(v, c);
            a.m_queue(v, c) = lam > 0.0 ? a.l_total(v, c) * (1.0 - gam / lam) : 0.0;
        }
    }
    return a;
}

}  // namespace infc
