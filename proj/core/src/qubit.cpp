#include "qsmpc/qubit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsmpc {

namespace {

const double kInvSqrt2 = std::sqrt(0.5);

bool near(std::complex<double> a, std::complex<double> b, double tol) {
    return std::abs(a - b) <= tol;
}

// Clamp sub-ulp rounding residue onto the canonical amplitude set
// {0, ±1, ±1/sqrt(2)} so gate chains are exact involutions on the protocol
// states (2*fl(1/sqrt(2))^2 misses 1.0 by one ulp otherwise).
double snap_component(double x) {
    for (double target : {0.0, 1.0, -1.0, kInvSqrt2, -kInvSqrt2}) {
        if (std::abs(x - target) < 1e-15) return target;
    }
    return x;
}

std::complex<double> snap(std::complex<double> v) {
    return {snap_component(v.real()), snap_component(v.imag())};
}

}  // namespace

QubitState QubitState::plus() { return {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}}; }
QubitState QubitState::minus() { return {{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}}; }

QubitState negated(const QubitState& q) { return {-q.amp0, -q.amp1}; }

bool approx_equal(const QubitState& a, const QubitState& b, double tol) {
    return near(a.amp0, b.amp0, tol) && near(a.amp1, b.amp1, tol);
}

bool equal_up_to_phase(const QubitState& a, const QubitState& b, double tol) {
    // Phase-free overlap test: |<a|b>| = 1 iff equal up to a global phase.
    const std::complex<double> inner = std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
    return std::abs(std::abs(inner) - 1.0) <= tol;
}

QubitState apply_pauli_x(const QubitState& q) { return {q.amp1, q.amp0}; }

QubitState apply_pauli_z(const QubitState& q) { return {q.amp0, -q.amp1}; }

QubitState apply_h(const QubitState& q) {
    return {snap(q.amp0 * kInvSqrt2 + q.amp1 * kInvSqrt2),
            snap(q.amp0 * kInvSqrt2 - q.amp1 * kInvSqrt2)};
}

Measurement measure(const QubitState& q, Basis basis, SeededRng& rng) {
    if (basis == Basis::Computational) {
        const double p1 = std::norm(q.amp1);
        const int bit = rng.unit() < p1 ? 1 : 0;
        return {bit, bit ? QubitState::ket1() : QubitState::ket0()};
    }
    const std::complex<double> amp_minus = q.amp0 * kInvSqrt2 - q.amp1 * kInvSqrt2;
    const double p_minus = std::norm(amp_minus);
    const int bit = rng.unit() < p_minus ? 1 : 0;
    return {bit, bit ? QubitState::minus() : QubitState::plus()};
}

std::vector<QubitState> encode_value(uint64_t v, unsigned width) {
    if (width == 0 || width > 63) throw std::invalid_argument("encode_value: width must be in [1, 63]");
    if (v >= (1ull << width)) throw std::invalid_argument("encode_value: value does not fit the qubit width");
    std::vector<QubitState> out;
    out.reserve(width);
    for (unsigned i = width; i-- > 0;) {
        out.push_back((v >> i) & 1u ? QubitState::ket1() : QubitState::ket0());
    }
    return out;
}

uint64_t decode_bits(std::span<const int> bits) {
    if (bits.size() > 63) throw std::invalid_argument("decode_bits: too many bits");
    uint64_t v = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("decode_bits: bits must be 0 or 1");
        v = (v << 1) | static_cast<uint64_t>(b);
    }
    return v;
}

std::string to_ket_string(const QubitState& q) {
    struct Named {
        QubitState state;
        const char* name;
    };
    const Named table[] = {
        {QubitState::ket0(), "|0>"},   {negated(QubitState::ket0()), "-|0>"},
        {QubitState::ket1(), "|1>"},   {negated(QubitState::ket1()), "-|1>"},
        {QubitState::plus(), "|+>"},   {negated(QubitState::plus()), "-|+>"},
        {QubitState::minus(), "|->"},  {negated(QubitState::minus()), "-|->"},
    };
    for (const auto& entry : table) {
        if (approx_equal(q, entry.state)) return entry.name;
    }
    std::ostringstream oss;
    oss.precision(17);
    oss << "(" << q.amp0.real();
    if (q.amp0.imag() != 0.0) oss << (q.amp0.imag() > 0 ? "+" : "") << q.amp0.imag() << "i";
    oss << ")|0>+(" << q.amp1.real();
    if (q.amp1.imag() != 0.0) oss << (q.amp1.imag() > 0 ? "+" : "") << q.amp1.imag() << "i";
    oss << ")|1>";
    return oss.str();
}

std::optional<QubitState> parse_ket_string(std::string_view text) {
    struct Named {
        std::string_view name;
        QubitState state;
    };
    const Named table[] = {
        {"|0>", QubitState::ket0()},   {"-|0>", negated(QubitState::ket0())},
        {"|1>", QubitState::ket1()},   {"-|1>", negated(QubitState::ket1())},
        {"|+>", QubitState::plus()},   {"-|+>", negated(QubitState::plus())},
        {"|->", QubitState::minus()},  {"-|->", negated(QubitState::minus())},
    };
    for (const auto& entry : table) {
        if (text == entry.name) return entry.state;
    }
    return std::nullopt;
}

}  // namespace qsmpc
