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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnsim/circuit.hpp"
#include "tnsim/dmrg.hpp"
#include "tnsim/mps.hpp"
#include "tnsim/shor.hpp"

namespace tnsim {

enum class Algorithm { Tebd, ClusterTebd, Dmrg };

const char *algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string &name);

/// Engine knobs shared by `run`, `bench` and `shor`. Unbounded caps are
/// TruncationPolicy::kUnbounded and serialize as null. Unset q_max and l_max
/// fall back to per-engine defaults (cluster-TEBD 14 and unbounded, DMRG 20
/// and 4).
struct RunConfig {
    std::size_t chi_max = TruncationPolicy::kUnbounded;
    double cutoff = 0.0;
    std::optional<std::size_t> q_max;
    std::optional<std::size_t> l_max;
    std::size_t chi_max_dmrg = 256;
    std::size_t chi_max_svd = TruncationPolicy::kUnbounded;
    std::size_t sweeps = 3;
    GroupingMode grouping = GroupingMode::Adaptive;
    std::uint64_t seed = 0;
    bool parallel_clusters = false;

    TruncationPolicy policy() const;
    ClusterConfig cluster() const;
    DmrgConfig dmrg() const;
};

struct CircuitDescriptor {
    std::size_t num_qubits = 0;
    std::size_t num_layers = 0;
    std::size_t num_gates = 0;
    std::optional<std::string> family;
    std::optional<std::uint64_t> seed;

    static CircuitDescriptor of(const Circuit &c);
};

struct RunRecord {
    std::string algorithm;
    CircuitDescriptor circuit;
    RunConfig config;
    double wall_time_seconds = 0.0;  // engine only, millisecond resolution
    double fidelity_estimate = 1.0;
    std::size_t max_chi = 1;
    std::size_t truncation_count = 0;
    nlohmann::json stats;  // per-iteration engine statistics
    std::optional<std::string> compare_reference;
    std::optional<double> compare_overlap;  // |<reference|final>|^2
    std::vector<std::string> samples;       // bitstrings, qubit 0 first
};

struct RunOutput {
    RunRecord record;
    Mps state;
};

/// Simulate `circuit` from |0...0> with one engine. Only the engine call is
/// timed.
RunOutput run_algorithm(const Circuit &circuit, Algorithm algorithm, const RunConfig &cfg,
                        const CircuitDescriptor &descriptor);

/// Round to whole milliseconds, never below one.
double to_milliseconds_resolution(double seconds);

nlohmann::json to_json(const RunConfig &cfg);
nlohmann::json to_json(const CircuitDescriptor &d);
nlohmann::json to_json(const RunRecord &r);
RunConfig run_config_from_json(const nlohmann::json &j, RunConfig base = {});

std::string run_record_csv_header();
std::string to_csv_row(const RunRecord &r);

/// A benchmark suite: every circuit x seed x algorithm x config combination.
struct BenchCircuit {
    std::size_t num_qubits = 0;
    std::size_t num_layers = 0;
    GateFamily family = GateFamily::NonClifford;
    std::vector<std::uint64_t> seeds;
};

/// Algorithm labels: "tebd", "cluster-tebd", "dmrg" (grouping from the
/// config), "dmrg-adaptive", "dmrg-fixed".
struct BenchSuite {
    std::vector<BenchCircuit> circuits;
    std::vector<std::string> algorithms;
    std::vector<nlohmann::json> configs;  // overrides applied to the base config
};

BenchSuite bench_suite_from_json(const nlohmann::json &j);

struct BenchRun {
    std::size_t circuit_index = 0;
    std::size_t config_index = 0;
    std::string label;
    std::uint64_t seed = 0;
    std::optional<RunRecord> record;
    std::string error;  // set when the run failed
};

struct BenchAggregate {
    std::size_t circuit_index = 0;
    std::size_t config_index = 0;
    std::string label;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double mean_wall_time = 0.0;
    double stddev_wall_time = 0.0;
    double mean_fidelity = 0.0;
    double stddev_fidelity = 0.0;
    std::optional<double> speedup;        // fixed / adaptive DMRG runtime, on DMRG rows
    std::optional<double> tebd_ratio;     // TEBD runtime / this runtime
};

struct BenchReport {
    std::vector<BenchRun> runs;
    std::vector<BenchAggregate> aggregates;
    bool complete() const;
};

/// Run every cell of the suite, up to `jobs` at a time.
BenchReport run_bench(const BenchSuite &suite, const RunConfig &base, std::size_t jobs);

/// Mean and sample standard deviation per cell, plus runtime ratios between
/// cells that share a circuit and a config.
std::vector<BenchAggregate> aggregate(const BenchSuite &suite, const std::vector<BenchRun> &runs);

nlohmann::json to_json(const BenchReport &r, const BenchSuite &suite);
std::string bench_csv(const BenchReport &r, const BenchSuite &suite);

nlohmann::json to_json(const ShorResult &r);

}  // namespace tnsim
