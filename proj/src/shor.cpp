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

#include "tnsim/shor.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "tnsim/error.hpp"
#include "tnsim/oracle.hpp"
#include "tnsim/rng.hpp"
#include "tnsim/tebd.hpp"

namespace tnsim {
namespace {

using Clock = std::chrono::steady_clock;
using Bits = std::vector<std::size_t>;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Gate inverse_gate(const Gate &g) {
    switch (g.kind) {
        case GateKind::P:
        case GateKind::CP:
        case GateKind::CCP:
            return make_gate(g.kind, g.qubits, {-g.params.at(0)});
        case GateKind::H:
        case GateKind::X:
        case GateKind::Z:
        case GateKind::CX:
        case GateKind::CZ:
        case GateKind::CCX:
        case GateKind::Swap:
            return make_gate(g.kind, g.qubits, g.params);
        default:
            throw Error(ErrorCode::InvalidParams, "no inverse rule for " + std::string(gate_name(g.kind)));
    }
}

// Logical (unrouted) gate emission for the arithmetic blocks.
class Emitter {
   public:
    explicit Emitter(double epsilon) : prune_(epsilon * kPi) {
    }

    std::vector<Gate> gates;

    Emitter fresh() const {
        Emitter e(0.0);
        e.prune_ = prune_;
        return e;
    }
    void append(const std::vector<Gate> &more) {
        gates.insert(gates.end(), more.begin(), more.end());
    }
    void append_inverse(const std::vector<Gate> &more) {
        for (auto it = more.rbegin(); it != more.rend(); ++it) gates.push_back(inverse_gate(*it));
    }

    void h(std::size_t q) {
        gates.push_back(make_gate(GateKind::H, {q}));
    }
    void x(std::size_t q) {
        gates.push_back(make_gate(GateKind::X, {q}));
    }
    void cx(std::size_t c, std::size_t t) {
        gates.push_back(make_gate(GateKind::CX, {c, t}));
    }
    void ccx(std::size_t c1, std::size_t c2, std::size_t t) {
        gates.push_back(make_gate(GateKind::CCX, {c1, c2, t}));
    }
    // Rotation by `angle` (reduced to [-pi, pi]); dropped below the pruning threshold.
    void phase(std::optional<std::size_t> control, std::size_t q, double angle) {
        angle = std::remainder(angle, 2.0 * kPi);
        if (std::abs(angle) < 1e-14 || std::abs(angle) < prune_) return;
        if (control) {
            gates.push_back(make_gate(GateKind::CP, {*control, q}, {angle}));
        } else {
            gates.push_back(make_gate(GateKind::P, {q}, {angle}));
        }
    }

    // |b> -> prod_m (|0> + e^{2 pi i b / 2^(m+1)} |1>) on the qubit of bit m.
    void qft(const Bits &bits) {
        for (std::size_t m = bits.size(); m-- > 0;) {
            h(bits[m]);
            for (std::size_t j = m; j-- > 0;) phase(bits[j], bits[m], kPi / std::ldexp(1.0, static_cast<int>(m - j)));
        }
    }
    void iqft(const Bits &bits) {
        Emitter e = fresh();
        e.qft(bits);
        append_inverse(e.gates);
    }

    // Fourier-space addition of the constant a (mod 2^w).
    void add_const(const Bits &bits, std::uint64_t a, std::optional<std::size_t> control) {
        for (std::size_t m = 0; m < bits.size(); ++m) {
            const std::uint64_t mod = std::uint64_t{1} << (m + 1);
            const double frac = static_cast<double>(a & (mod - 1)) / static_cast<double>(mod);
            phase(control, bits[m], 2.0 * kPi * frac);
        }
    }
    void sub_const(const Bits &bits, std::uint64_t a, std::optional<std::size_t> control) {
        Emitter e = fresh();
        e.add_const(bits, a, control);
        append_inverse(e.gates);
    }

    // Fourier-space (b + a) mod N controlled by ctrl, for b < N; anc returns to 0.
    void mod_add(std::uint64_t a, std::uint64_t n, std::size_t ctrl, const Bits &b, std::size_t anc) {
        const std::size_t msb = b.back();
        add_const(b, a, ctrl);
        sub_const(b, n, std::nullopt);
        iqft(b);
        cx(msb, anc);
        qft(b);
        add_const(b, n, anc);
        sub_const(b, a, ctrl);
        iqft(b);
        x(msb);
        cx(msb, anc);
        x(msb);
        qft(b);
        add_const(b, a, ctrl);
    }

    // |c>|x>|b> -> |c>|x>|(b + a x) mod N> when c is set; bus computes c AND x_i.
    void cmult(std::uint64_t a, std::uint64_t n, std::size_t c, const Bits &x, std::size_t bus, const Bits &b,
               std::size_t anc) {
        qft(b);
        std::uint64_t term = a % n;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ccx(c, x[i], bus);
            mod_add(term, n, bus, b, anc);
            ccx(c, x[i], bus);
            term = (term * 2) % n;
        }
        iqft(b);
    }

    // Controlled |x> -> |a x mod N> with b and anc restored to 0.
    void controlled_u(std::uint64_t a, std::uint64_t n, std::size_t c, const Bits &x, std::size_t bus, const Bits &b,
                      std::size_t anc) {
        cmult(a, n, c, x, bus, b, anc);
        for (std::size_t i = 0; i < x.size(); ++i) {
            cx(b[i], x[i]);
            ccx(c, x[i], b[i]);
            cx(b[i], x[i]);
        }
        Emitter e = fresh();
        e.cmult(modular_inverse(a, n), n, c, x, bus, b, anc);
        append_inverse(e.gates);
    }

   private:
    double prune_;
};

Circuit to_circuit(std::size_t num_qubits, const std::vector<Gate> &logical, std::size_t *swaps = nullptr) {
    Circuit c(num_qubits);
    for (Gate &g : route_adjacent(logical, swaps)) {
        if (g.qubits.size() > 1 && !g.is_adjacent()) throw std::logic_error("routing left a non-adjacent gate");
        c.add(std::move(g));
    }
    return c;
}

Bits range_bits(std::size_t first, std::size_t count, bool msb_first) {
    Bits out(count);
    for (std::size_t m = 0; m < count; ++m) out[m] = msb_first ? first + count - 1 - m : first + m;
    return out;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

bool is_prime_power(std::uint64_t n) {
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        return n == 1;
    }
    return false;
}

std::uint64_t read_register(std::uint64_t index, std::size_t num_qubits, const Bits &bits) {
    std::uint64_t v = 0;
    for (std::size_t m = 0; m < bits.size(); ++m) v |= ((index >> (num_qubits - 1 - bits[m])) & 1u) << m;
    return v;
}

}  // namespace

void ShorParams::validate() const {
    const std::uint64_t n = n_to_factor;
    if (n < 15 || n % 2 == 0) throw Error(ErrorCode::InvalidParams, "N must be an odd composite >= 15");
    if (n >= (std::uint64_t{1} << 24)) throw Error(ErrorCode::InvalidParams, "N is too large for this builder");
    if (is_prime(n)) throw Error(ErrorCode::InvalidParams, std::to_string(n) + " is prime");
    if (is_prime_power(n)) throw Error(ErrorCode::InvalidParams, std::to_string(n) + " is a prime power");
    if (a <= 1 || a >= n) throw Error(ErrorCode::InvalidParams, "a must satisfy 1 < a < N");
    if (std::gcd(a, n) != 1) throw Error(ErrorCode::InvalidParams, "gcd(a, N) != 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
    if (counting_qubits && (*counting_qubits < 1 || *counting_qubits > 64)) {
        throw Error(ErrorCode::InvalidParams, "counting register size must lie in 1..64");
    }
}

std::size_t bit_length(std::uint64_t v) {
    std::size_t n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

std::size_t precision_bits(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
    return static_cast<std::size_t>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * epsilon)) - 1e-12));
}

std::size_t counting_register_size(std::uint64_t n_to_factor, double epsilon) {
    return 2 * bit_length(n_to_factor) + precision_bits(epsilon);
}

std::size_t shor_qubit_count(std::uint64_t n_to_factor, double epsilon) {
    return 4 * bit_length(n_to_factor) + 4 + precision_bits(epsilon);
}

std::vector<Gate> route_adjacent(const std::vector<Gate> &gates, std::size_t *swap_count) {
    std::vector<Gate> out;
    out.reserve(gates.size());
    std::size_t swaps_total = 0;
    for (const Gate &g : gates) {
        const std::size_t k = g.qubits.size();
        if (k < 2 || g.max_qubit() - g.min_qubit() + 1 == k) {
            out.push_back(g);
            continue;
        }
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return g.qubits[i] > g.qubits[j]; });
        const std::size_t top = g.qubits[order[0]];
        std::vector<Gate> swaps;
        std::vector<std::size_t> moved = g.qubits;
        for (std::size_t r = 1; r < k; ++r) {
            const std::size_t target = top - r;
            for (std::size_t s = g.qubits[order[r]]; s < target; ++s) swaps.push_back(make_gate(GateKind::Swap, {s, s + 1}));
            moved[order[r]] = target;
        }
        out.insert(out.end(), swaps.begin(), swaps.end());
        out.push_back(make_gate(g.kind, moved, g.params));
        out.insert(out.end(), swaps.rbegin(), swaps.rend());
        swaps_total += 2 * swaps.size();
    }
    if (swap_count) *swap_count = swaps_total;
    return out;
}

std::pair<Circuit, ShorCircuitReport> build_order_finding_circuit(const ShorParams &p) {
    p.validate();
    const std::uint64_t n_val = p.n_to_factor;
    const std::size_t n = bit_length(n_val);
    const std::size_t t = p.counting_qubits.value_or(counting_register_size(n_val, p.epsilon));
    const std::size_t w = n + 2;

    ShorRegisters r;
    r.counting = range_bits(0, t, true);
    r.x = range_bits(t, n, true);
    r.bus = t + n;
    r.b = range_bits(t + n + 1, w, false);
    r.anc = t + n + 1 + w;
    const std::size_t total = r.anc + 1;

    Emitter e(p.epsilon);
    e.x(r.x[0]);
    for (std::size_t q : r.counting) e.h(q);
    std::uint64_t a_j = p.a % n_val;
    for (std::size_t j = 0; j < t; ++j) {
        // Qubit j holds counting bit t-1-j and controls U^(2^j).
        e.controlled_u(a_j, n_val, r.counting[t - 1 - j], r.x, r.bus, r.b, r.anc);
        a_j = mulmod(a_j, a_j, n_val);
    }
    e.iqft(r.counting);

    ShorCircuitReport report;
    Circuit c = to_circuit(total, e.gates, &report.swap_count);
    report.qubit_count = total;
    report.gate_count = c.size();
    report.layer_count = c.num_layers();
    report.registers = std::move(r);
    return {std::move(c), std::move(report)};
}

Circuit build_draper_adder(std::size_t bits, double epsilon) {
    if (bits == 0 || bits > 12) throw Error(ErrorCode::InvalidParams, "adder width must lie in 1..12");
    const Bits a = range_bits(0, bits, true);
    const Bits b = range_bits(bits, bits + 1, true);
    Emitter e(epsilon);
    e.qft(b);
    for (std::size_t m = 0; m < b.size(); ++m) {
        for (std::size_t j = 0; j < a.size() && j <= m; ++j) {
            e.phase(a[j], b[m], 2.0 * kPi * std::ldexp(1.0, static_cast<int>(j) - static_cast<int>(m) - 1));
        }
    }
    e.iqft(b);
    return to_circuit(2 * bits + 1, e.gates);
}

Circuit build_modular_adder_block(std::uint64_t a, std::uint64_t n_to_factor, double epsilon) {
    const std::size_t n = bit_length(n_to_factor);
    if (n < 2 || n > 16 || a >= n_to_factor) throw Error(ErrorCode::InvalidParams, "need a < N and N of 2..16 bits");
    const Bits b = range_bits(1, n + 2, false);
    Emitter e(epsilon);
    e.qft(b);
    e.mod_add(a, n_to_factor, 0, b, n + 3);
    e.iqft(b);
    return to_circuit(n + 4, e.gates);
}

ShorRegisters multiplier_block_registers(std::uint64_t n_to_factor) {
    const std::size_t n = bit_length(n_to_factor);
    ShorRegisters r;
    r.counting = {0};
    r.x = range_bits(1, n, true);
    r.bus = n + 1;
    r.b = range_bits(n + 2, n + 2, false);
    r.anc = 2 * n + 4;
    return r;
}

Circuit build_multiplier_block(std::uint64_t a, std::uint64_t n_to_factor, bool full, double epsilon) {
    const std::size_t n = bit_length(n_to_factor);
    if (n < 2 || n > 16 || std::gcd(a, n_to_factor) != 1) {
        throw Error(ErrorCode::InvalidParams, "need gcd(a, N) = 1 and N of 2..16 bits");
    }
    const ShorRegisters r = multiplier_block_registers(n_to_factor);
    Emitter e(epsilon);
    if (full) {
        e.controlled_u(a % n_to_factor, n_to_factor, 0, r.x, r.bus, r.b, r.anc);
    } else {
        e.cmult(a % n_to_factor, n_to_factor, 0, r.x, r.bus, r.b, r.anc);
    }
    return to_circuit(r.anc + 1, e.gates);
}

std::optional<std::uint64_t> modular_multiplier_check(std::uint64_t a, std::uint64_t n_to_factor, std::uint64_t x) {
    const ShorRegisters r = multiplier_block_registers(n_to_factor);
    const std::size_t total = r.anc + 1;
    if (total > oracle_qubit_cap()) {
        throw Error(ErrorCode::OracleTooLarge, "multiplier block needs " + std::to_string(total) + " qubits");
    }
    if (x >= (std::uint64_t{1} << r.x.size())) throw Error(ErrorCode::InvalidParams, "x does not fit the register");
    std::vector<int> bits(total, 0);
    bits[0] = 1;
    for (std::size_t i = 0; i < r.x.size(); ++i) bits[r.x[i]] = static_cast<int>((x >> i) & 1);
    const Statevector out = simulate_dense(build_multiplier_block(a, n_to_factor, true), bits);
    const auto &amps = out.amplitudes();
    std::size_t best = 0;
    for (std::size_t i = 1; i < amps.size(); ++i) {
        if (std::norm(amps[i]) > std::norm(amps[best])) best = i;
    }
    if (std::norm(amps[best]) < 1.0 - 1e-9) return std::nullopt;
    const bool clean = read_register(best, total, {0}) == 1 && read_register(best, total, r.b) == 0 &&
                       read_register(best, total, {r.bus}) == 0 && read_register(best, total, {r.anc}) == 0;
    if (!clean) return std::nullopt;
    return read_register(best, total, r.x);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    if (mod == 1) return 0;
    std::uint64_t result = 1;
    base %= mod;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, mod);
        base = mulmod(base, base, mod);
        exp >>= 1;
    }
    return result;
}

std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t n) {
    if (std::gcd(a, n) != 1) throw Error(ErrorCode::InvalidParams, "order needs gcd(a, N) = 1");
    std::uint64_t v = a % n;
    for (std::uint64_t r = 1; r <= n; ++r) {
        if (v == 1 % n) return r;
        v = mulmod(v, a, n);
    }
    throw Error(ErrorCode::InvalidParams, "order not found");
}

std::uint64_t modular_inverse(std::uint64_t a, std::uint64_t n) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(n), new_r = static_cast<std::int64_t>(a % n);
    while (new_r != 0) {
        const std::int64_t q = r / new_r;
        std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
        std::tie(r, new_r) = std::pair{new_r, r - q * new_r};
    }
    if (r != 1) throw Error(ErrorCode::InvalidParams, "a is not invertible mod N");
    if (t < 0) t += static_cast<std::int64_t>(n);
    return static_cast<std::uint64_t>(t);
}

PostprocessResult factors_from_order(std::uint64_t a, std::uint64_t n, std::uint64_t r) {
    PostprocessResult res;
    if (r == 0 || powmod(a, r, n) != 1) {
        res.note = "candidate is not the order";
        return res;
    }
    res.order = r;
    if (r % 2 != 0) {
        res.note = "odd order";
        return res;
    }
    const std::uint64_t y = powmod(a, r / 2, n);
    if (y == n - 1) {
        res.note = "a^(r/2) = -1 mod N";
        return res;
    }
    for (std::uint64_t f : {std::gcd(y + 1, n), std::gcd(y + n - 1, n)}) {
        if (f > 1 && f < n) {
            res.factors = std::minmax(f, n / f);
            return res;
        }
    }
    res.note = "trivial gcd";
    return res;
}

PostprocessResult postprocess(std::uint64_t measured, std::size_t bits, std::uint64_t a, std::uint64_t n) {
    if (bits == 0 || bits > 62) throw Error(ErrorCode::InvalidParams, "phase register must have 1..62 bits");
    PostprocessResult res;
    if (measured == 0) {
        res.note = "zero phase";
        return res;
    }
    std::uint64_t num = measured, den = std::uint64_t{1} << bits;
    std::uint64_t k_prev = 1, k_cur = 0;  // convergent denominators k_{i-2}, k_{i-1}
    while (den != 0) {
        const std::uint64_t q = num / den;
        std::tie(num, den) = std::pair{den, num - q * den};
        const std::uint64_t k_next = q * k_cur + k_prev;
        k_prev = k_cur;
        k_cur = k_next;
        if (k_cur > n) break;
        for (std::uint64_t r = k_cur; r <= n; r += k_cur) {
            if (powmod(a, r, n) == 1) return factors_from_order(a, n, r);
        }
    }
    res.note = "no convergent gives the order";
    return res;
}

const char *shor_backend_name(ShorBackend b) {
    switch (b) {
        case ShorBackend::Tebd:
            return "tebd";
        case ShorBackend::ClusterTebd:
            return "cluster-tebd";
        case ShorBackend::Dmrg:
            return "dmrg";
        case ShorBackend::Statevector:
            return "statevector";
    }
    return "?";
}

ShorBackend shor_backend_from_name(const std::string &name) {
    for (ShorBackend b : {ShorBackend::Tebd, ShorBackend::ClusterTebd, ShorBackend::Dmrg, ShorBackend::Statevector}) {
        if (name == shor_backend_name(b)) return b;
    }
    if (name == "cluster_tebd") return ShorBackend::ClusterTebd;
    throw Error(ErrorCode::InvalidParams, "unknown backend '" + name + "'");
}

ShorResult run_shor(const ShorParams &p, const ShorRunConfig &cfg) {
    ShorResult res;
    res.backend = shor_backend_name(cfg.backend);
    auto t0 = Clock::now();
    auto [circuit, report] = build_order_finding_circuit(p);
    res.build_seconds = seconds_since(t0);
    res.report = report;
    const std::size_t t = report.registers.counting.size();
    if (cfg.backend == ShorBackend::Statevector && report.qubit_count > oracle_qubit_cap()) {
        throw Error(ErrorCode::OracleTooLarge, std::to_string(report.qubit_count) + " qubits exceed the oracle cap of " +
                                                   std::to_string(oracle_qubit_cap()));
    }

    Rng rng(p.seed, Rng::kSampling);
    std::function<std::uint64_t()> sample;
    std::optional<Mps> state;
    std::vector<double> marginal;

    t0 = Clock::now();
    const Mps zero = Mps::from_product_state(std::vector<int>(report.qubit_count, 0));
    switch (cfg.backend) {
        case ShorBackend::Tebd: {
            TebdConfig tc;
            tc.policy = cfg.policy;
            TebdResult r = run_tebd(circuit, zero, tc);
            res.fidelity_estimate = r.ledger.fidelity();
            res.max_chi = r.stats.max_chi;
            state = std::move(r.state);
            break;
        }
        case ShorBackend::ClusterTebd: {
            ClusterConfig cc = cfg.cluster;
            cc.policy = cfg.policy;
            ClusterTebdResult r = run_cluster_tebd(circuit, zero, cc);
            res.fidelity_estimate = r.ledger.fidelity();
            res.max_chi = r.stats.max_chi;
            state = std::move(r.state);
            break;
        }
        case ShorBackend::Dmrg: {
            DmrgResult r = run_dmrg(circuit, zero, cfg.dmrg);
            res.fidelity_estimate = r.fidelity;
            res.max_chi = r.stats.max_chi;
            state = std::move(r.state);
            break;
        }
        case ShorBackend::Statevector: {
            const Statevector sv = simulate_dense(circuit);
            marginal.assign(std::size_t{1} << t, 0.0);
            const std::size_t shift = report.qubit_count - t;
            for (std::size_t i = 0; i < sv.amplitudes().size(); ++i) marginal[i >> shift] += std::norm(sv.amplitudes()[i]);
            break;
        }
    }
    res.simulate_seconds = seconds_since(t0);

    if (state) {
        state->normalize();
        sample = [&] {
            std::uint64_t y = 0;
            for (int bit : state->sample_prefix(t, rng)) y = (y << 1) | static_cast<std::uint64_t>(bit);
            return y;
        };
    } else {
        sample = [&] {
            double u = rng.uniform01(), acc = 0.0;
            for (std::size_t y = 0; y < marginal.size(); ++y) {
                acc += marginal[y];
                if (u < acc) return static_cast<std::uint64_t>(y);
            }
            return static_cast<std::uint64_t>(marginal.size() - 1);
        };
    }

    for (res.attempts = 0; res.attempts < cfg.max_attempts && !res.factors;) {
        ++res.attempts;
        const std::uint64_t y = sample();
        res.measurements.push_back(y);
        PostprocessResult pp = postprocess(y, t, p.a, p.n_to_factor);
        if (pp.factors) {
            res.factors = pp.factors;
        } else {
            res.notes.push_back(pp.note);
        }
    }
    return res;
}

}  // namespace tnsim
