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

// tnsim command-line front end: gen, run, bench, shor.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tnsim/error.hpp"
#include "tnsim/harness.hpp"
#include "tnsim/oracle.hpp"
#include "tnsim/rng.hpp"
#include "tnsim/shor.hpp"

namespace {

using nlohmann::json;
using namespace tnsim;

struct EngineFlags {
    std::optional<std::size_t> chi_max;
    double cutoff = 0.0;
    std::optional<std::size_t> q_max;
    std::optional<std::size_t> l_max;
    std::size_t chi_max_dmrg = 256;
    std::optional<std::size_t> chi_max_svd;
    std::size_t sweeps = 3;
    std::string grouping = "adaptive";
    std::uint64_t seed = 0;
    bool parallel_clusters = false;
    std::string output = "json";

    RunConfig config() const {
        RunConfig c;
        c.chi_max = chi_max.value_or(TruncationPolicy::kUnbounded);
        c.cutoff = cutoff;
        c.q_max = q_max;
        c.l_max = l_max;
        c.chi_max_dmrg = chi_max_dmrg;
        c.chi_max_svd = chi_max_svd.value_or(TruncationPolicy::kUnbounded);
        c.sweeps = sweeps;
        c.grouping = grouping_mode_from_name(grouping);
        c.seed = seed;
        c.parallel_clusters = parallel_clusters;
        return c;
    }
};

void add_engine_flags(CLI::App *cmd, EngineFlags &f) {
    cmd->add_option("--chi-max", f.chi_max, "Bond dimension cap for TEBD and cluster-TEBD (default: none)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cutoff", f.cutoff, "Relative singular value cutoff")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--q-max", f.q_max, "log2 element bound per cluster or grouped site")
        ->check(CLI::Range(1, 40));
    cmd->add_option("--l-max", f.l_max, "Layers per iteration (cluster horizon, DMRG window)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--chi-max-dmrg", f.chi_max_dmrg, "Grouped MPS bond cap during DMRG")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--chi-max-svd", f.chi_max_svd, "Bond cap when ungrouping after DMRG (default: none)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sweeps", f.sweeps, "DMRG sweeps per step")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--grouping", f.grouping, "DMRG grouping")->capture_default_str()
        ->check(CLI::IsMember({"adaptive", "fixed"}));
    cmd->add_option("--seed", f.seed, "Seed for DMRG initialization and sampling")->capture_default_str();
    cmd->add_flag("--parallel-clusters", f.parallel_clusters, "Contract independent clusters concurrently");
    cmd->add_option("--output", f.output, "Output format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
    std::size_t num_qubits = 0;
    std::size_t num_layers = 0;
    std::string family;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenArgs &a) {
    const GateFamily family = family_from_name(a.family);
    const Circuit c = generate_random_structured(a.num_qubits, a.num_layers, family, a.seed);
    json doc = json::parse(circuit_to_json(c));
    doc["generator"] = {{"family", family_name(family)}, {"num_layers", a.num_layers}, {"seed", a.seed}};
    const std::string text = doc.dump(1) + "\n";
    if (a.out.empty() || a.out == "-") {
        std::cout << text;
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!(out << text)) {
            throw Error(ErrorCode::Io, "failed writing " + a.out);
        }
    }
    return 0;
}

// ---- run ------------------------------------------------------------------

struct RunArgs {
    std::string algorithm;
    std::string circuit;
    std::optional<std::string> compare;
    std::string dump_state;
    std::size_t samples = 0;
};

CircuitDescriptor describe(const Circuit &c, const std::string &text) {
    CircuitDescriptor d = CircuitDescriptor::of(c);
    const json doc = json::parse(text);
    if (doc.contains("generator") && doc["generator"].is_object()) {
        const json &g = doc["generator"];
        if (g.contains("family") && g["family"].is_string()) {
            d.family = g["family"].get<std::string>();
        }
        if (g.contains("seed") && g["seed"].is_number_unsigned()) {
            d.seed = g["seed"].get<std::uint64_t>();
        }
    }
    return d;
}

int cmd_run(const RunArgs &a, const EngineFlags &f) {
    const std::string text = read_text(a.circuit);
    const Circuit circuit = circuit_from_json(text);
    const CircuitDescriptor d = describe(circuit, text);
    const RunConfig cfg = f.config();
    RunOutput out = run_algorithm(circuit, algorithm_from_name(a.algorithm), cfg, d);

    if (a.compare) {
        out.record.compare_reference = *a.compare;
        if (*a.compare == "oracle") {
            out.record.compare_overlap = exact_fidelity(out.state, simulate_dense(circuit));
        } else {
            const RunOutput ref = run_algorithm(circuit, algorithm_from_name(*a.compare), cfg, d);
            const double num = std::norm(overlap(ref.state, out.state));
            out.record.compare_overlap = num / (ref.state.norm() * ref.state.norm() * out.state.norm() *
                                                out.state.norm());
        }
    }
    if (a.samples > 0) {
        Rng rng(cfg.seed, Rng::kSampling);
        out.state.normalize();
        for (std::size_t s = 0; s < a.samples; ++s) {
            std::string bits;
            for (int b : out.state.sample_prefix(circuit.num_qubits(), rng)) {
                bits.push_back(b ? '1' : '0');
            }
            out.record.samples.push_back(std::move(bits));
        }
    }
    if (!a.dump_state.empty()) {
        out.state.write_snapshot(a.dump_state);
    }

    if (f.output == "csv") {
        std::cout << run_record_csv_header() << '\n' << to_csv_row(out.record) << '\n';
    } else {
        std::cout << to_json(out.record).dump(1) << '\n';
    }
    return 0;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string suite;
    std::size_t jobs = 1;
    std::string records;
};

int cmd_bench(const BenchArgs &a, const EngineFlags &f) {
    const BenchSuite suite = bench_suite_from_json(json::parse(read_text(a.suite)));
    const BenchReport report = run_bench(suite, f.config(), a.jobs);
    if (!a.records.empty()) {
        std::ofstream out(a.records, std::ios::binary);
        out << run_record_csv_header() << '\n';
        for (const BenchRun &r : report.runs) {
            if (r.record) {
                out << to_csv_row(*r.record) << '\n';
            }
        }
        if (!out) {
            throw Error(ErrorCode::Io, "failed writing " + a.records);
        }
    }
    if (f.output == "csv") {
        std::cout << bench_csv(report, suite);
    } else {
        std::cout << to_json(report, suite).dump(1) << '\n';
    }
    if (!report.complete()) {
        for (const BenchRun &r : report.runs) {
            if (!r.record) {
                std::cerr << "bench cell " << r.label << " (circuit " << r.circuit_index << ", seed " << r.seed
                          << ", config " << r.config_index << ") failed: " << r.error << '\n';
            }
        }
        return 3;
    }
    return 0;
}

// ---- shor -----------------------------------------------------------------

struct ShorArgs {
    std::uint64_t n = 15;
    std::optional<std::uint64_t> a;
    double epsilon = 1e-3;
    std::vector<std::string> backends;
    bool report_only = false;
    std::size_t attempts = 10;
};

std::uint64_t random_coprime(std::uint64_t n, std::uint64_t seed) {
    if (n < 3) {
        throw Error(ErrorCode::InvalidParams, "N must be at least 3");
    }
    Rng rng(seed, Rng::kCircuit);
    for (;;) {
        const std::uint64_t a = 2 + rng.uniform_int(n - 2);
        if (std::gcd(a, n) == 1) {
            return a;
        }
    }
}

int cmd_shor(const ShorArgs &s, EngineFlags f) {
    ShorParams p;
    p.n_to_factor = s.n;
    p.a = s.a ? *s.a : random_coprime(s.n, f.seed);
    p.epsilon = s.epsilon;
    p.seed = f.seed;
    p.validate();

    json doc = {{"n", p.n_to_factor}, {"a", p.a}, {"epsilon", p.epsilon}, {"seed", p.seed}};
    if (s.report_only) {
        const ShorCircuitReport r = build_order_finding_circuit(p).second;
        doc["qubit_count"] = r.qubit_count;
        doc["gate_count"] = r.gate_count;
        doc["layer_count"] = r.layer_count;
        doc["swap_count"] = r.swap_count;
        doc["counting_qubits"] = r.registers.counting.size();
        if (f.output == "csv") {
            std::cout << "n,a,epsilon,qubit_count,gate_count,layer_count,swap_count\n"
                      << p.n_to_factor << ',' << p.a << ',' << p.epsilon << ',' << r.qubit_count << ','
                      << r.gate_count << ',' << r.layer_count << ',' << r.swap_count << '\n';
        } else {
            std::cout << doc.dump(1) << '\n';
        }
        return 0;
    }

    if (!f.chi_max) {
        f.chi_max = 64;
    }
    const RunConfig rc = f.config();
    ShorRunConfig cfg;
    cfg.policy = rc.policy();
    cfg.cluster = rc.cluster();
    cfg.dmrg = rc.dmrg();
    cfg.max_attempts = s.attempts;

    json results = json::array();
    std::optional<double> tebd_time, cluster_time;
    bool all_factored = true;
    for (const std::string &name : s.backends) {
        cfg.backend = shor_backend_from_name(name);
        const ShorResult r = run_shor(p, cfg);
        all_factored = all_factored && r.factors.has_value();
        if (cfg.backend == ShorBackend::Tebd) {
            tebd_time = r.simulate_seconds;
        } else if (cfg.backend == ShorBackend::ClusterTebd) {
            cluster_time = r.simulate_seconds;
        }
        results.push_back(to_json(r));
    }
    doc["results"] = results;
    doc["speedup"] = tebd_time && cluster_time ? json(*tebd_time / *cluster_time) : json(nullptr);

    if (f.output == "csv") {
        std::cout << "n,a,epsilon,backend,qubit_count,gate_count,layer_count,factor_1,factor_2,attempts,"
                     "simulate_seconds,fidelity_estimate,max_chi\n";
        for (const json &r : results) {
            const bool ok = !r["factors"].is_null();
            std::cout << p.n_to_factor << ',' << p.a << ',' << p.epsilon << ',' << r["backend"].get<std::string>()
                      << ',' << r["qubit_count"] << ',' << r["gate_count"] << ',' << r["layer_count"] << ','
                      << (ok ? r["factors"][0].dump() : "") << ',' << (ok ? r["factors"][1].dump() : "") << ','
                      << r["attempts"] << ',' << r["simulate_seconds"] << ',' << r["fidelity_estimate"] << ','
                      << r["max_chi"] << '\n';
        }
    } else {
        std::cout << doc.dump(1) << '\n';
    }
    return all_factored ? 0 : 4;
}

void print_error(const std::string &code, const std::string &message) {
    std::cout << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Matrix product state simulator for quantum circuits"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App *gen_cmd = app.add_subcommand("gen", "Generate a random-structured circuit");
    gen_cmd->add_option("num_qubits", gen.num_qubits)->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("num_layers", gen.num_layers)->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("family", gen.family)->required()->check(CLI::IsMember({"clifford", "nonclifford"}));
    gen_cmd->add_option("seed", gen.seed)->required();
    gen_cmd->add_option("-o,--out", gen.out, "Output path (default: stdout)");

    RunArgs run;
    EngineFlags run_flags;
    CLI::App *run_cmd = app.add_subcommand("run", "Simulate a circuit file with one engine");
    run_cmd->add_option("algorithm", run.algorithm)
        ->required()
        ->check(CLI::IsMember({"tebd", "cluster-tebd", "dmrg"}));
    run_cmd->add_option("circuit", run.circuit)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--compare", run.compare, "Report the overlap with a reference: oracle or an algorithm")
        ->check(CLI::IsMember({"oracle", "tebd", "cluster-tebd", "dmrg"}));
    run_cmd->add_option("--dump-state", run.dump_state, "Write the final MPS snapshot to this path");
    run_cmd->add_option("--samples", run.samples, "Bitstrings to sample from the final state");
    add_engine_flags(run_cmd, run_flags);

    BenchArgs bench;
    EngineFlags bench_flags;
    CLI::App *bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
    bench_cmd->add_option("suite", bench.suite)->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--jobs", bench.jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--records", bench.records, "Write per-run records as CSV to this path");
    add_engine_flags(bench_cmd, bench_flags);

    ShorArgs shor;
    EngineFlags shor_flags;
    CLI::App *shor_cmd = app.add_subcommand("shor", "Build and simulate Shor order finding");
    shor_cmd->add_option("n", shor.n, "Number to factor")->required();
    shor_cmd->add_option("--a", shor.a, "Base coprime to N (default: random from --seed)");
    shor_cmd->add_option("--epsilon", shor.epsilon, "Phase precision")->capture_default_str();
    shor_cmd->add_option("--backend", shor.backends, "tebd, cluster-tebd, dmrg or statevector; repeatable")
        ->check(CLI::IsMember({"tebd", "cluster-tebd", "dmrg", "statevector"}));
    shor_cmd->add_flag("--report-only", shor.report_only, "Print circuit sizes without simulating");
    shor_cmd->add_option("--samples", shor.attempts, "Sampling attempts per backend")->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_engine_flags(shor_cmd, shor_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        print_error("Usage", e.what());
        return 2;
    }

    try {
        if (*gen_cmd) {
            return cmd_gen(gen);
        }
        if (*run_cmd) {
            return cmd_run(run, run_flags);
        }
        if (*bench_cmd) {
            return cmd_bench(bench, bench_flags);
        }
        if (shor.backends.empty()) {
            shor.backends.push_back("cluster-tebd");
        }
        return cmd_shor(shor, shor_flags);
    } catch (const Error &e) {
        print_error(std::string(to_string(e.code())), e.what());
    } catch (const json::exception &e) {
        print_error("ParseError", e.what());
    } catch (const std::exception &e) {
        print_error("Internal", e.what());
    }
    return 1;
}
