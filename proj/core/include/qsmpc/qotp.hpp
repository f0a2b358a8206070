#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsmpc/qubit.hpp"
#include "qsmpc/rng.hpp"

namespace qsmpc {

// 2n-bit Pauli key for an n-qubit message. For qubit i (0-based), bit 2i
// controls Z and bit 2i+1 controls X.
class PauliKey {
public:
    PauliKey() = default;
    explicit PauliKey(std::vector<uint8_t> bits);
    static PauliKey from_bit_string(std::string_view bits);

    size_t bit_length() const { return bits_.size(); }
    size_t qubit_capacity() const { return bits_.size() / 2; }
    bool empty() const { return bits_.empty(); }

    uint8_t z_bit(size_t qubit) const { return bits_.at(2 * qubit); }
    uint8_t x_bit(size_t qubit) const { return bits_.at(2 * qubit + 1); }
    const std::vector<uint8_t>& bits() const { return bits_; }

    // Sub-key covering the first `qubits` qubits.
    PauliKey prefix(size_t qubits) const;

    std::string to_bit_string() const;

    friend bool operator==(const PauliKey& a, const PauliKey& b) { return a.bits_ == b.bits_; }

private:
    std::vector<uint8_t> bits_;
};

// Uniform 2n-bit key. Key distribution is modeled as an ideal oracle: both
// endpoints are handed the same key.
PauliKey keygen(size_t n, SeededRng& rng);

// Per qubit: apply X if the X bit is set, then Z if the Z bit is set.
std::vector<QubitState> qotp_encrypt(std::span<const QubitState> qubits, const PauliKey& key);
// Per qubit: apply Z then X. Exact inverse of qotp_encrypt (X Z Z X = I),
// with no residual global phase.
std::vector<QubitState> qotp_decrypt(std::span<const QubitState> qubits, const PauliKey& key);

}  // namespace qsmpc
