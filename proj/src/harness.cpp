// Copyright 2026 The tnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tnsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "tnsim/cluster_tebd.hpp"
#include "tnsim/error.hpp"
#include "tnsim/tebd.hpp"

namespace tnsim {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kClusterQMax = 14;
constexpr std::size_t kDmrgQMax = 20;
constexpr std::size_t kDmrgLMax = 4;

json cap_to_json(std::size_t v) {
    return v >= TruncationPolicy::kUnbounded ? json(nullptr) : json(v);
}

std::size_t cap_from_json(const json &v) {
    return v.is_null() ? TruncationPolicy::kUnbounded : v.get<std::size_t>();
}

template <typename T>
json optional_to_json(const std::optional<T> &v) {
    return v ? json(*v) : json(nullptr);
}

[[noreturn]] void bad_input(const std::string &what) {
    throw Error(ErrorCode::InvalidParams, what);
}

std::string csv_cap(std::size_t v) {
    return v >= TruncationPolicy::kUnbounded ? std::string() : std::to_string(v);
}

template <typename T>
std::string csv_optional(const std::optional<T> &v) {
    if (!v) {
        return {};
    }
    std::ostringstream s;
    s << *v;
    return s.str();
}

// Shortest text that reads back to the same double.
std::string csv_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json cluster_stats_json(const ClusterTebdStats &s) {
    json iters = json::array();
    for (const ClusterIterationStats &it : s.iterations) {
        json intervals = json::array();
        for (auto [a, b] : it.intervals) {
            intervals.push_back({a, b});
        }
        iters.push_back({{"start_layer", it.start_layer},
                         {"horizon_layer", it.horizon_layer},
                         {"fallback", it.fallback},
                         {"intervals", std::move(intervals)},
                         {"log2_sizes", it.log2_sizes},
                         {"flops", it.flops},
                         {"wall_time_seconds", it.wall_time_seconds}});
    }
    return {{"max_cluster_log2_size", s.max_cluster_log2_size},
            {"bound_violations", s.bound_violations},
            {"iterations", std::move(iters)}};
}

json dmrg_stats_json(const DmrgStats &s) {
    json steps = json::array();
    for (const DmrgStepStats &st : s.steps) {
        json groups = json::array();
        for (auto [a, b] : st.groups) {
            groups.push_back({a, b});
        }
        steps.push_back({{"first_layer", st.first_layer},
                         {"last_layer", st.last_layer},
                         {"groups", std::move(groups)},
                         {"chi_tilde", st.chi_tilde},
                         {"group_log2_sizes", st.group_log2_sizes},
                         {"f_history", st.f_history},
                         {"final_f", st.final_f},
                         {"wall_time_seconds", st.wall_time_seconds}});
    }
    return {{"monotonicity_violations", s.monotonicity_violations},
            {"max_group_log2_size", s.max_group_log2_size},
            {"steps", std::move(steps)}};
}

// Effective (algorithm, grouping) behind a bench label.
struct Variant {
    Algorithm algorithm;
    std::optional<GroupingMode> grouping;
};

Variant parse_label(const std::string &label) {
    if (label == "dmrg-adaptive") {
        return {Algorithm::Dmrg, GroupingMode::Adaptive};
    }
    if (label == "dmrg-fixed") {
        return {Algorithm::Dmrg, GroupingMode::Fixed};
    }
    return {algorithm_from_name(label), std::nullopt};
}

RunConfig cell_config(const BenchSuite &suite, std::size_t config_index, const std::string &label,
                      const RunConfig &base, std::uint64_t seed) {
    RunConfig cfg = run_config_from_json(suite.configs.at(config_index), base);
    if (auto g = parse_label(label).grouping) {
        cfg.grouping = *g;
    }
    cfg.seed = seed;
    return cfg;
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

Moments moments(const std::vector<double> &xs) {
    Moments m;
    if (xs.empty()) {
        return m;
    }
    for (double x : xs) {
        m.mean += x;
    }
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - m.mean) * (x - m.mean);
        }
        m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

}  // namespace

const char *algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Tebd:
            return "tebd";
        case Algorithm::ClusterTebd:
            return "cluster-tebd";
        case Algorithm::Dmrg:
            return "dmrg";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string &name) {
    for (Algorithm a : {Algorithm::Tebd, Algorithm::ClusterTebd, Algorithm::Dmrg}) {
        if (name == algorithm_name(a)) {
            return a;
        }
    }
    if (name == "cluster_tebd") {
        return Algorithm::ClusterTebd;
    }
    bad_input("unknown algorithm '" + name + "' (expected tebd, cluster-tebd or dmrg)");
}

TruncationPolicy RunConfig::policy() const {
    TruncationPolicy p = TruncationPolicy::capped(chi_max, cutoff);
    p.validate();
    return p;
}

ClusterConfig RunConfig::cluster() const {
    ClusterConfig c;
    c.q_max = q_max.value_or(kClusterQMax);
    c.l_max = l_max.value_or(ClusterConfig::kUnboundedLayers);
    c.policy = policy();
    c.parallel_clusters = parallel_clusters;
    c.validate();
    return c;
}

DmrgConfig RunConfig::dmrg() const {
    DmrgConfig d;
    d.l_max = l_max.value_or(kDmrgLMax);
    d.chi_max_dmrg = chi_max_dmrg;
    d.chi_max_svd = chi_max_svd;
    d.cutoff_eta = cutoff;
    d.q_max = q_max.value_or(kDmrgQMax);
    d.n_sweeps = sweeps;
    d.grouping_mode = grouping;
    d.seed = seed;
    d.validate();
    return d;
}

CircuitDescriptor CircuitDescriptor::of(const Circuit &c) {
    CircuitDescriptor d;
    d.num_qubits = c.num_qubits();
    d.num_layers = c.num_layers();
    d.num_gates = c.size();
    return d;
}

double to_milliseconds_resolution(double seconds) {
    return std::max(1.0, std::round(seconds * 1000.0)) / 1000.0;
}

RunOutput run_algorithm(const Circuit &circuit, Algorithm algorithm, const RunConfig &cfg,
                        const CircuitDescriptor &descriptor) {
    RunRecord rec;
    rec.algorithm = algorithm_name(algorithm);
    rec.circuit = descriptor;
    rec.config = cfg;
    const Mps zero = Mps::from_product_state(std::vector<int>(circuit.num_qubits(), 0));
    std::optional<Mps> state;
    double elapsed = 0.0;

    switch (algorithm) {
        case Algorithm::Tebd: {
            TebdConfig tc;
            tc.policy = cfg.policy();
            const auto t0 = Clock::now();
            TebdResult r = run_tebd(circuit, zero, tc);
            elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.fidelity_estimate = r.ledger.fidelity();
            rec.max_chi = r.stats.max_chi;
            rec.truncation_count = r.stats.truncation_count;
            rec.stats = {{"gates_applied", r.stats.gates_applied},
                         {"svd_count", r.ledger.svd_count},
                         {"layer_max_chi", r.stats.layer_max_chi}};
            state = std::move(r.state);
            break;
        }
        case Algorithm::ClusterTebd: {
            const ClusterConfig cc = cfg.cluster();
            const auto t0 = Clock::now();
            ClusterTebdResult r = run_cluster_tebd(circuit, zero, cc);
            elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.fidelity_estimate = r.ledger.fidelity();
            rec.max_chi = r.stats.max_chi;
            rec.truncation_count = r.stats.truncation_count;
            rec.stats = cluster_stats_json(r.stats);
            rec.stats["svd_count"] = r.ledger.svd_count;
            state = std::move(r.state);
            break;
        }
        case Algorithm::Dmrg: {
            const DmrgConfig dc = cfg.dmrg();
            const auto t0 = Clock::now();
            DmrgResult r = run_dmrg(circuit, zero, dc);
            elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.fidelity_estimate = r.fidelity;
            rec.max_chi = r.stats.max_chi;
            rec.truncation_count = r.stats.truncation_count;
            rec.stats = dmrg_stats_json(r.stats);
            state = std::move(r.state);
            break;
        }
    }
    rec.wall_time_seconds = to_milliseconds_resolution(elapsed);
    return RunOutput{std::move(rec), std::move(*state)};
}

json to_json(const RunConfig &cfg) {
    return {{"chi_max", cap_to_json(cfg.chi_max)},
            {"cutoff", cfg.cutoff},
            {"q_max", optional_to_json(cfg.q_max)},
            {"l_max", optional_to_json(cfg.l_max)},
            {"chi_max_dmrg", cap_to_json(cfg.chi_max_dmrg)},
            {"chi_max_svd", cap_to_json(cfg.chi_max_svd)},
            {"sweeps", cfg.sweeps},
            {"grouping", grouping_mode_name(cfg.grouping)},
            {"seed", cfg.seed},
            {"parallel_clusters", cfg.parallel_clusters}};
}

RunConfig run_config_from_json(const json &j, RunConfig base) {
    if (!j.is_object()) {
        bad_input("config must be an object");
    }
    try {
        for (const auto &[key, v] : j.items()) {
            if (key == "chi_max") {
                base.chi_max = cap_from_json(v);
            } else if (key == "cutoff") {
                base.cutoff = v.get<double>();
            } else if (key == "q_max") {
                base.q_max = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
            } else if (key == "l_max") {
                base.l_max = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
            } else if (key == "chi_max_dmrg") {
                base.chi_max_dmrg = cap_from_json(v);
            } else if (key == "chi_max_svd") {
                base.chi_max_svd = cap_from_json(v);
            } else if (key == "sweeps") {
                base.sweeps = v.get<std::size_t>();
            } else if (key == "grouping") {
                base.grouping = grouping_mode_from_name(v.get<std::string>());
            } else if (key == "seed") {
                base.seed = v.get<std::uint64_t>();
            } else if (key == "parallel_clusters") {
                base.parallel_clusters = v.get<bool>();
            } else {
                bad_input("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception &e) {
        bad_input(std::string("bad config value: ") + e.what());
    }
    return base;
}

json to_json(const CircuitDescriptor &d) {
    return {{"num_qubits", d.num_qubits},
            {"num_layers", d.num_layers},
            {"num_gates", d.num_gates},
            {"family", optional_to_json(d.family)},
            {"seed", optional_to_json(d.seed)}};
}

json to_json(const RunRecord &r) {
    return {{"algorithm", r.algorithm},
            {"circuit", to_json(r.circuit)},
            {"config", to_json(r.config)},
            {"wall_time_seconds", r.wall_time_seconds},
            {"fidelity_estimate", r.fidelity_estimate},
            {"max_chi", r.max_chi},
            {"truncation_count", r.truncation_count},
            {"compare", r.compare_reference ? json{{"reference", *r.compare_reference},
                                                   {"overlap", optional_to_json(r.compare_overlap)}}
                                            : json(nullptr)},
            {"samples", r.samples},
            {"stats", r.stats}};
}

std::string run_record_csv_header() {
    return "algorithm,num_qubits,num_layers,num_gates,family,circuit_seed,chi_max,cutoff,q_max,l_max,"
           "chi_max_dmrg,chi_max_svd,sweeps,grouping,seed,wall_time_seconds,fidelity_estimate,max_chi,"
           "truncation_count,compare_reference,compare_overlap";
}

std::string to_csv_row(const RunRecord &r) {
    const RunConfig &c = r.config;
    std::ostringstream s;
    s << r.algorithm << ',' << r.circuit.num_qubits << ',' << r.circuit.num_layers << ',' << r.circuit.num_gates << ','
      << csv_optional(r.circuit.family) << ',' << csv_optional(r.circuit.seed) << ',' << csv_cap(c.chi_max) << ','
      << csv_double(c.cutoff) << ',' << csv_optional(c.q_max) << ',' << csv_optional(c.l_max) << ','
      << csv_cap(c.chi_max_dmrg) << ',' << csv_cap(c.chi_max_svd) << ',' << c.sweeps << ','
      << grouping_mode_name(c.grouping) << ',' << c.seed << ',' << csv_double(r.wall_time_seconds) << ','
      << csv_double(r.fidelity_estimate) << ',' << r.max_chi << ',' << r.truncation_count << ','
      << csv_optional(r.compare_reference) << ',' << (r.compare_overlap ? csv_double(*r.compare_overlap) : "");
    return s.str();
}

BenchSuite bench_suite_from_json(const json &j) {
    BenchSuite suite;
    if (!j.is_object() || !j.contains("circuits") || !j["circuits"].is_array() || !j.contains("algorithms") ||
        !j["algorithms"].is_array()) {
        bad_input("bench suite needs 'circuits' and 'algorithms' arrays");
    }
    try {
        for (const json &c : j["circuits"]) {
            BenchCircuit bc;
            bc.num_qubits = c.at("num_qubits").get<std::size_t>();
            bc.num_layers = c.at("num_layers").get<std::size_t>();
            bc.family = family_from_name(c.value("family", std::string("nonclifford")));
            bc.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
            if (bc.seeds.empty()) {
                bad_input("every bench circuit needs at least one seed");
            }
            suite.circuits.push_back(std::move(bc));
        }
        for (const json &a : j["algorithms"]) {
            const std::string label = a.get<std::string>();
            parse_label(label);
            suite.algorithms.push_back(label);
        }
        if (j.contains("configs")) {
            for (const json &c : j["configs"]) {
                run_config_from_json(c);
                suite.configs.push_back(c);
            }
        }
    } catch (const json::exception &e) {
        bad_input(std::string("malformed bench suite: ") + e.what());
    }
    if (suite.configs.empty()) {
        suite.configs.push_back(json::object());
    }
    return suite;
}

bool BenchReport::complete() const {
    return std::all_of(runs.begin(), runs.end(), [](const BenchRun &r) { return r.record.has_value(); });
}

BenchReport run_bench(const BenchSuite &suite, const RunConfig &base, std::size_t jobs) {
    BenchReport report;
    for (std::size_t ci = 0; ci < suite.circuits.size(); ++ci) {
        for (std::uint64_t seed : suite.circuits[ci].seeds) {
            for (std::size_t k = 0; k < suite.configs.size(); ++k) {
                for (const std::string &label : suite.algorithms) {
                    report.runs.push_back(BenchRun{ci, k, label, seed, std::nullopt, {}});
                }
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < report.runs.size(); i = next++) {
            BenchRun &run = report.runs[i];
            const BenchCircuit &bc = suite.circuits[run.circuit_index];
            try {
                const Circuit circuit = generate_random_structured(bc.num_qubits, bc.num_layers, bc.family, run.seed);
                CircuitDescriptor d = CircuitDescriptor::of(circuit);
                d.family = std::string(family_name(bc.family));
                d.seed = run.seed;
                const RunConfig cfg = cell_config(suite, run.config_index, run.label, base, run.seed);
                run.record = run_algorithm(circuit, parse_label(run.label).algorithm, cfg, d).record;
            } catch (const std::exception &e) {
                run.error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, report.runs.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread &t : pool) {
        t.join();
    }
    report.aggregates = aggregate(suite, report.runs);
    return report;
}

std::vector<BenchAggregate> aggregate(const BenchSuite &suite, const std::vector<BenchRun> &runs) {
    std::vector<BenchAggregate> rows;
    for (std::size_t ci = 0; ci < suite.circuits.size(); ++ci) {
        for (std::size_t k = 0; k < suite.configs.size(); ++k) {
            const std::size_t first_row = rows.size();
            std::map<std::string, double> mean_by_variant;
            for (const std::string &label : suite.algorithms) {
                BenchAggregate row;
                row.circuit_index = ci;
                row.config_index = k;
                row.label = label;
                std::vector<double> times, fids;
                for (const BenchRun &r : runs) {
                    if (r.circuit_index != ci || r.config_index != k || r.label != label) {
                        continue;
                    }
                    if (!r.record) {
                        ++row.failures;
                        continue;
                    }
                    ++row.runs;
                    times.push_back(r.record->wall_time_seconds);
                    fids.push_back(r.record->fidelity_estimate);
                }
                const Moments t = moments(times), f = moments(fids);
                row.mean_wall_time = t.mean;
                row.stddev_wall_time = t.stddev;
                row.mean_fidelity = f.mean;
                row.stddev_fidelity = f.stddev;
                if (row.runs > 0) {
                    const Variant v = parse_label(label);
                    std::string key = algorithm_name(v.algorithm);
                    if (v.algorithm == Algorithm::Dmrg) {
                        const RunConfig cfg = run_config_from_json(suite.configs[k]);
                        key += std::string("-") + grouping_mode_name(v.grouping.value_or(cfg.grouping));
                    }
                    mean_by_variant.emplace(key, row.mean_wall_time);
                }
                rows.push_back(row);
            }
            const auto find = [&](const std::string &key) -> std::optional<double> {
                auto it = mean_by_variant.find(key);
                return it == mean_by_variant.end() ? std::nullopt : std::optional<double>(it->second);
            };
            const auto fixed = find("dmrg-fixed"), adaptive = find("dmrg-adaptive"), tebd = find("tebd");
            for (std::size_t i = first_row; i < rows.size(); ++i) {
                BenchAggregate &row = rows[i];
                if (row.runs == 0) {
                    continue;
                }
                if (fixed && adaptive && parse_label(row.label).algorithm == Algorithm::Dmrg) {
                    row.speedup = *fixed / *adaptive;
                }
                if (tebd) {
                    row.tebd_ratio = *tebd / row.mean_wall_time;
                }
            }
        }
    }
    return rows;
}

json to_json(const BenchReport &r, const BenchSuite &suite) {
    json records = json::array();
    json failures = json::array();
    for (const BenchRun &run : r.runs) {
        if (run.record) {
            json rec = to_json(*run.record);
            rec["label"] = run.label;
            rec["config_index"] = run.config_index;
            records.push_back(std::move(rec));
        } else {
            failures.push_back({{"circuit_index", run.circuit_index},
                                {"config_index", run.config_index},
                                {"algorithm", run.label},
                                {"seed", run.seed},
                                {"status", "error"},
                                {"message", run.error}});
        }
    }
    json rows = json::array();
    for (const BenchAggregate &a : r.aggregates) {
        const BenchCircuit &bc = suite.circuits[a.circuit_index];
        rows.push_back({{"num_qubits", bc.num_qubits},
                        {"num_layers", bc.num_layers},
                        {"family", family_name(bc.family)},
                        {"config_index", a.config_index},
                        {"config", suite.configs[a.config_index]},
                        {"algorithm", a.label},
                        {"runs", a.runs},
                        {"failures", a.failures},
                        {"mean_wall_time", a.mean_wall_time},
                        {"stddev_wall_time", a.stddev_wall_time},
                        {"mean_fidelity", a.mean_fidelity},
                        {"stddev_fidelity", a.stddev_fidelity},
                        {"speedup", optional_to_json(a.speedup)},
                        {"tebd_ratio", optional_to_json(a.tebd_ratio)}});
    }
    return {{"status", r.complete() ? "ok" : "partial"},
            {"records", std::move(records)},
            {"failures", std::move(failures)},
            {"aggregates", std::move(rows)}};
}

std::string bench_csv(const BenchReport &r, const BenchSuite &suite) {
    std::ostringstream s;
    s << "num_qubits,num_layers,family,config_index,algorithm,runs,failures,mean_wall_time,stddev_wall_time,"
         "mean_fidelity,stddev_fidelity,speedup,tebd_ratio\n";
    for (const BenchAggregate &a : r.aggregates) {
        const BenchCircuit &bc = suite.circuits[a.circuit_index];
        s << bc.num_qubits << ',' << bc.num_layers << ',' << family_name(bc.family) << ',' << a.config_index << ','
          << a.label << ',' << a.runs << ',' << a.failures << ',' << csv_double(a.mean_wall_time) << ','
          << csv_double(a.stddev_wall_time) << ',' << csv_double(a.mean_fidelity) << ','
          << csv_double(a.stddev_fidelity) << ',' << (a.speedup ? csv_double(*a.speedup) : "") << ','
          << (a.tebd_ratio ? csv_double(*a.tebd_ratio) : "") << '\n';
    }
    return s.str();
}

json to_json(const ShorResult &r) {
    json regs = {{"counting", r.report.registers.counting},
                 {"x", r.report.registers.x},
                 {"bus", r.report.registers.bus},
                 {"b", r.report.registers.b},
                 {"ancilla", r.report.registers.anc}};
    return {{"backend", r.backend},
            {"qubit_count", r.report.qubit_count},
            {"gate_count", r.report.gate_count},
            {"layer_count", r.report.layer_count},
            {"swap_count", r.report.swap_count},
            {"registers", std::move(regs)},
            {"factors", r.factors ? json{r.factors->first, r.factors->second} : json(nullptr)},
            {"attempts", r.attempts},
            {"measurements", r.measurements},
            {"notes", r.notes},
            {"build_seconds", to_milliseconds_resolution(r.build_seconds)},
            {"simulate_seconds", to_milliseconds_resolution(r.simulate_seconds)},
            {"fidelity_estimate", r.fidelity_estimate},
            {"max_chi", r.max_chi}};
}

}  // namespace tnsim
