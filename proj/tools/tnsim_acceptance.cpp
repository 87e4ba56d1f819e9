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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "tnsim/cluster_tebd.hpp"
#include "tnsim/dmrg.hpp"
#include "tnsim/error.hpp"
#include "tnsim/oracle.hpp"
#include "tnsim/shor.hpp"
#include "tnsim/tebd.hpp"

namespace {

using namespace tnsim;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kSeeds = 20;
constexpr double kRounding = 1e-12;  // slack for comparing fidelities that are both ~1

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mps zero_state(std::size_t n) {
    return Mps::from_product_state(std::vector<int>(n, 0));
}

// Bound checks shared by every engine run (criterion 9).
struct BoundLedger {
    std::size_t cluster_runs = 0;
    std::size_t dmrg_runs = 0;
    std::size_t violations = 0;
    double worst_cluster = 0.0;
    double worst_group = 0.0;
    std::vector<std::string> notes;

    void cluster(const ClusterTebdStats &s, std::size_t q_max) {
        ++cluster_runs;
        worst_cluster = std::max(worst_cluster, s.max_cluster_log2_size);
        violations += s.bound_violations;
        for (const ClusterIterationStats &it : s.iterations) {
            for (double l : it.log2_sizes) {
                if (l > static_cast<double>(q_max) + 1e-9) {
                    ++violations;
                }
            }
        }
    }

    void dmrg(const DmrgStats &s, std::size_t num_qubits, std::size_t q_max) {
        ++dmrg_runs;
        worst_group = std::max(worst_group, s.max_group_log2_size);
        for (const DmrgStepStats &st : s.steps) {
            std::size_t next = 0;
            for (auto [first, last] : st.groups) {
                if (first != next || last < first) {
                    ++violations;
                    notes.push_back("grouping is not a contiguous cover");
                }
                next = last + 1;
            }
            if (next != num_qubits) {
                ++violations;
                notes.push_back("grouping does not cover the chain");
            }
            for (double l : st.group_log2_sizes) {
                if (l > static_cast<double>(q_max) + 1e-9) {
                    ++violations;
                }
            }
        }
    }
};

struct Report {
    int failures = 0;
    void line(int id, bool pass, const std::string &detail) {
        std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        failures += pass ? 0 : 1;
    }
};

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Circuit suite_circuit(std::size_t n, std::size_t layers, std::uint64_t seed) {
    return generate_random_structured(n, layers, GateFamily::NonClifford, seed);
}

// ---------------------------------------------------------------------------

struct ExactSuite {
    std::vector<double> tebd, cluster, dmrg, tebd_vs_cluster;
    std::size_t dmrg_violations = 0;
};

ExactSuite run_exact_suite(BoundLedger &bounds) {
    ExactSuite s;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Circuit c = suite_circuit(10, 20, seed);
        const Statevector exact = simulate_dense(c);

        TebdConfig tc;
        const TebdResult t = run_tebd(c, zero_state(10), tc);
        s.tebd.push_back(exact_fidelity(t.state, exact));

        ClusterConfig cc;
        cc.q_max = 14;
        const ClusterTebdResult k = run_cluster_tebd(c, zero_state(10), cc);
        bounds.cluster(k.stats, cc.q_max);
        s.cluster.push_back(exact_fidelity(k.state, exact));
        s.tebd_vs_cluster.push_back(std::norm(overlap(t.state, k.state)) /
                                    (t.state.norm() * t.state.norm() * k.state.norm() * k.state.norm()));

        DmrgConfig dc;
        dc.l_max = 4;
        dc.q_max = 8;  // 20 would hold the whole chain in one group
        dc.chi_max_dmrg = 1024;
        dc.chi_max_svd = 1024;
        dc.seed = seed;
        const DmrgResult d = run_dmrg(c, zero_state(10), dc);
        bounds.dmrg(d.stats, 10, dc.q_max);
        s.dmrg_violations += d.stats.monotonicity_violations;
        s.dmrg.push_back(exact_fidelity(d.state, exact));
    }
    return s;
}

void criterion_1(Report &r, const ExactSuite &s, double secs) {
    const double worst = std::min({*std::min_element(s.tebd.begin(), s.tebd.end()),
                                   *std::min_element(s.cluster.begin(), s.cluster.end()),
                                   *std::min_element(s.dmrg.begin(), s.dmrg.end())});
    r.line(1, worst >= 1.0 - 1e-6 && secs < 300.0,
           fmt("min oracle overlap %.12f over %zu circuits x 3 engines, %.1f s", worst, kSeeds, secs));
}

struct TruncSuite {
    double mean_abs_est_err = 0.0;
    double mean_tebd = 0.0;
    double mean_cluster = 0.0;
    std::size_t truncating_runs = 0;
};

TruncSuite run_truncating_suite(BoundLedger &bounds) {
    TruncSuite s;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Circuit c = suite_circuit(10, 20, seed);
        const Statevector exact = simulate_dense(c);

        TebdConfig tc;
        tc.policy = TruncationPolicy::capped(8);
        const TebdResult t = run_tebd(c, zero_state(10), tc);
        const double f_t = exact_fidelity(t.state, exact);
        s.mean_abs_est_err += std::abs(t.ledger.fidelity() - f_t);
        s.mean_tebd += f_t;
        s.truncating_runs += t.ledger.truncation_count > 0;

        ClusterConfig cc;
        cc.q_max = 14;
        cc.policy = TruncationPolicy::capped(8);
        const ClusterTebdResult k = run_cluster_tebd(c, zero_state(10), cc);
        bounds.cluster(k.stats, cc.q_max);
        s.mean_cluster += exact_fidelity(k.state, exact);
    }
    s.mean_abs_est_err /= kSeeds;
    s.mean_tebd /= kSeeds;
    s.mean_cluster /= kSeeds;
    return s;
}

struct LmaxSuite {
    double mean_f2 = 0.0, mean_f8 = 0.0;
    double est_f2 = 0.0, est_f8 = 0.0;
    std::size_t violations = 0;
};

LmaxSuite run_lmax_suite(BoundLedger &bounds) {
    LmaxSuite s;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Circuit c = suite_circuit(12, 20, seed);
        const Statevector exact = simulate_dense(c);
        for (std::size_t l_max : {std::size_t{2}, std::size_t{8}}) {
            DmrgConfig dc;
            dc.l_max = l_max;
            dc.chi_max_dmrg = 32;
            dc.chi_max_svd = 32;
            dc.q_max = 11;
            dc.seed = seed;
            const DmrgResult d = run_dmrg(c, zero_state(12), dc);
            bounds.dmrg(d.stats, 12, dc.q_max);
            s.violations += d.stats.monotonicity_violations;
            const double f = exact_fidelity(d.state, exact);
            (l_max == 2 ? s.mean_f2 : s.mean_f8) += f / kSeeds;
            (l_max == 2 ? s.est_f2 : s.est_f8) += d.fidelity / kSeeds;
        }
    }
    return s;
}

void criterion_6(Report &r) {
    struct Case {
        std::uint64_t n;
        double eps;
        std::size_t want;
    };
    const Case cases[] = {{15, 1e-3, 29}, {21, 1e-4, 37}, {35, 1e-5, 44}, {91, 1e-5, 48}, {221, 1e-9, 65}};
    bool ok = true;
    std::string got;
    for (const Case &c : cases) {
        ShorParams p;
        p.n_to_factor = c.n;
        p.a = 2;
        p.epsilon = c.eps;
        const auto [circuit, report] = build_order_finding_circuit(p);
        const std::size_t built = circuit.num_qubits();
        ok = ok && built == c.want && report.qubit_count == c.want && shor_qubit_count(c.n, c.eps) == c.want;
        got += (got.empty() ? "" : ", ") + std::to_string(built);
    }
    r.line(6, ok, "qubit counts (" + got + ")");
}

void criterion_7(Report &r) {
    const auto t0 = Clock::now();
    std::size_t success = 0, runs = 0;
    for (std::uint64_t a : {2ull, 7ull, 8ull, 13ull}) {
        for (std::uint64_t seed = 1; seed <= kSeeds / 4; ++seed) {
            ShorParams p;
            p.n_to_factor = 15;
            p.a = a;
            p.seed = seed;
            ShorRunConfig cfg;
            cfg.backend = ShorBackend::ClusterTebd;
            cfg.policy = TruncationPolicy::capped(64);
            cfg.cluster.q_max = 10;
            cfg.max_attempts = 10;
            const ShorResult res = run_shor(p, cfg);
            ++runs;
            success += res.factors && res.factors->first == 3 && res.factors->second == 5;
        }
    }
    const double secs = seconds_since(t0);
    r.line(7, success >= 18 && secs < 900.0,
           fmt("%zu/%zu runs factored 15 = 3 x 5 within 10 samples, %.1f s", success, runs, secs));
}

void criterion_8(Report &r, BoundLedger &bounds) {
    ShorParams p;
    p.n_to_factor = 15;
    p.a = 7;
    const Circuit c = build_order_finding_circuit(p).first;
    const Mps zero = zero_state(c.num_qubits());
    double best_tebd = 1e300, best_cluster = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        TebdConfig tc;
        tc.policy = TruncationPolicy::capped(64);
        auto t0 = Clock::now();
        run_tebd(c, zero, tc);
        best_tebd = std::min(best_tebd, seconds_since(t0));

        ClusterConfig cc;
        cc.q_max = 10;
        cc.policy = TruncationPolicy::capped(64);
        t0 = Clock::now();
        const ClusterTebdResult k = run_cluster_tebd(c, zero, cc);
        best_cluster = std::min(best_cluster, seconds_since(t0));
        bounds.cluster(k.stats, cc.q_max);
    }
    const double ratio = best_tebd / best_cluster;
    r.line(8, ratio >= 1.5,
           fmt("Shor-15 TEBD %.3f s / cluster-TEBD %.3f s = %.2fx (best of 3)", best_tebd, best_cluster, ratio));
}

// Criterion 10 helpers: qubit 0 is the most significant bit of a dense index.
int bit_of(std::uint64_t index, std::size_t n, std::size_t q) {
    return static_cast<int>((index >> (n - 1 - q)) & 1u);
}

std::uint64_t read_reg(std::uint64_t index, std::size_t n, const std::vector<std::size_t> &reg) {
    std::uint64_t v = 0;
    for (std::size_t m = 0; m < reg.size(); ++m) {
        v |= static_cast<std::uint64_t>(bit_of(index, n, reg[m])) << m;
    }
    return v;
}

void write_reg(std::vector<int> &bits, const std::vector<std::size_t> &reg, std::uint64_t v) {
    for (std::size_t m = 0; m < reg.size(); ++m) {
        bits[reg[m]] = static_cast<int>((v >> m) & 1u);
    }
}

std::optional<std::uint64_t> basis_output(const Statevector &s) {
    const auto &amps = s.amplitudes();
    std::size_t best = 0;
    for (std::size_t i = 1; i < amps.size(); ++i) {
        if (std::norm(amps[i]) > std::norm(amps[best])) {
            best = i;
        }
    }
    if (std::norm(amps[best]) < 1.0 - 1e-9) {
        return std::nullopt;
    }
    return best;
}

void criterion_10(Report &r) {
    std::size_t checked = 0, wrong = 0;

    // Draper adder on 4-bit a and 5-bit b: [a MSB first][b MSB first].
    const std::size_t w = 4;
    const Circuit adder = build_draper_adder(w);
    std::vector<std::size_t> a_reg(w), b_reg(w + 1);
    for (std::size_t m = 0; m < w; ++m) {
        a_reg[m] = w - 1 - m;
    }
    for (std::size_t m = 0; m <= w; ++m) {
        b_reg[m] = 2 * w - m;
    }
    const std::size_t total_adder = 2 * w + 1;
    for (std::uint64_t a = 0; a < 16; ++a) {
        for (std::uint64_t b = 0; b < 32; ++b) {
            std::vector<int> bits(total_adder, 0);
            write_reg(bits, a_reg, a);
            write_reg(bits, b_reg, b);
            const auto out = basis_output(simulate_dense(adder, bits));
            ++checked;
            if (!out || read_reg(*out, total_adder, a_reg) != a || read_reg(*out, total_adder, b_reg) != (a + b) % 32) {
                ++wrong;
            }
        }
    }

    // Controlled modular multiplier, both control values, every residue.
    const ShorRegisters regs = multiplier_block_registers(15);
    const std::size_t total = regs.anc + 1;
    for (std::uint64_t a : {2ull, 4ull, 7ull, 8ull, 11ull, 13ull}) {
        const Circuit block = build_multiplier_block(a, 15, true);
        for (std::uint64_t x = 0; x < 15; ++x) {
            for (int ctrl : {0, 1}) {
                std::vector<int> bits(total, 0);
                bits[0] = ctrl;
                write_reg(bits, regs.x, x);
                const auto out = basis_output(simulate_dense(block, bits));
                const std::uint64_t want = ctrl ? a * x % 15 : x;
                ++checked;
                if (!out || read_reg(*out, total, regs.x) != want || bit_of(*out, total, 0) != ctrl ||
                    read_reg(*out, total, regs.b) != 0 || bit_of(*out, total, regs.bus) != 0 ||
                    bit_of(*out, total, regs.anc) != 0) {
                    ++wrong;
                }
            }
        }
    }
    r.line(10, wrong == 0, fmt("%zu basis inputs checked against classical arithmetic, %zu mismatches", checked, wrong));
}

}  // namespace

int main() {
    Report r;
    BoundLedger bounds;
    const auto t_all = Clock::now();
    try {
        auto t0 = Clock::now();
        const ExactSuite exact = run_exact_suite(bounds);
        criterion_1(r, exact, seconds_since(t0));

        const TruncSuite trunc = run_truncating_suite(bounds);
        r.line(2, trunc.mean_abs_est_err <= 0.05,
               fmt("mean |F_est - F_exact| = %.3g at chi_max=8 (%zu/%zu runs truncated)", trunc.mean_abs_est_err,
                   trunc.truncating_runs, kSeeds));

        const double worst_pair = *std::min_element(exact.tebd_vs_cluster.begin(), exact.tebd_vs_cluster.end());
        r.line(3, worst_pair >= 1.0 - 1e-9 && trunc.mean_cluster >= trunc.mean_tebd - kRounding,
               fmt("exact-regime min overlap %.12f; chi_max=8 mean F cluster %.6f vs TEBD %.6f", worst_pair,
                   trunc.mean_cluster, trunc.mean_tebd));

        const LmaxSuite lmax = run_lmax_suite(bounds);
        const std::size_t mono = exact.dmrg_violations + lmax.violations;
        r.line(4, mono == 0, fmt("%zu monotonicity violations over %zu DMRG runs", mono, bounds.dmrg_runs));
        r.line(5, lmax.mean_f8 >= lmax.mean_f2 - kRounding,
               fmt("N=12 L=20 chi_dmrg=32: mean F(L_max=8) %.6f vs F(L_max=2) %.6f (estimates %.6f, %.6f)",
                   lmax.mean_f8, lmax.mean_f2, lmax.est_f8, lmax.est_f2));

        criterion_6(r);
        criterion_7(r);
        criterion_8(r, bounds);
        r.line(9, bounds.violations == 0,
               fmt("%zu bound violations; largest cluster 2^%.2f over %zu runs, largest group 2^%.2f over %zu runs",
                   bounds.violations, bounds.worst_cluster, bounds.cluster_runs, bounds.worst_group,
                   bounds.dmrg_runs));
        criterion_10(r);
    } catch (const std::exception &e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed, %.1f s total\n", r.failures, seconds_since(t_all));
    return r.failures == 0 ? 0 : 1;
}
