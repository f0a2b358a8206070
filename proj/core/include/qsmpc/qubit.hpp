#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/rng.hpp"

namespace qsmpc {

inline constexpr double kAmpTolerance = 1e-12;

// Single-qubit pure state amp0|0> + amp1|1>. The protocols only ever move
// states through {±|0>, ±|1>, ±|+>, ±|->}, so double precision holds them
// without drift; arbitrary normalized states are still accepted.
struct QubitState {
    std::complex<double> amp0{1.0, 0.0};
    std::complex<double> amp1{0.0, 0.0};

    static QubitState ket0() { return {{1.0, 0.0}, {0.0, 0.0}}; }
    static QubitState ket1() { return {{0.0, 0.0}, {1.0, 0.0}}; }
    static QubitState plus();
    static QubitState minus();

    double norm_sq() const { return std::norm(amp0) + std::norm(amp1); }
    bool normalized(double tol = kAmpTolerance) const {
        double d = norm_sq() - 1.0;
        return d < tol && d > -tol;
    }
};

QubitState negated(const QubitState& q);

// Amplitude-wise comparison.
bool approx_equal(const QubitState& a, const QubitState& b, double tol = kAmpTolerance);
// Comparison modulo a global phase factor.
bool equal_up_to_phase(const QubitState& a, const QubitState& b, double tol = kAmpTolerance);

enum class Basis { Computational, Hadamard };

QubitState apply_pauli_x(const QubitState& q);
QubitState apply_pauli_z(const QubitState& q);
QubitState apply_h(const QubitState& q);

struct Measurement {
    int bit;             // Computational: 0 -> |0>, 1 -> |1>. Hadamard: 0 -> |+>, 1 -> |->.
    QubitState collapsed;  // basis eigenstate; global phase is discarded
};

Measurement measure(const QubitState& q, Basis basis, SeededRng& rng);

// Big-endian width-bit encoding of v into |0>/|1> qubits. v must fit.
std::vector<QubitState> encode_value(uint64_t v, unsigned width);
uint64_t decode_bits(std::span<const int> bits);

// Canonical display form: |0>, -|1>, |+>, ... ; falls back to amplitudes.
std::string to_ket_string(const QubitState& q);
// Parses the eight canonical signed forms produced by to_ket_string.
std::optional<QubitState> parse_ket_string(std::string_view text);

}  // namespace qsmpc
