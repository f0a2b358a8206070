#include "qsmpc/qotp.hpp"

#include <stdexcept>

namespace qsmpc {

PauliKey::PauliKey(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.size() % 2 != 0) throw std::invalid_argument("PauliKey: bit length must be even");
    for (uint8_t b : bits_) {
        if (b > 1) throw std::invalid_argument("PauliKey: bits must be 0 or 1");
    }
}

PauliKey PauliKey::from_bit_string(std::string_view bits) {
    std::vector<uint8_t> out;
    out.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("PauliKey: bit string must be 0/1");
        out.push_back(static_cast<uint8_t>(c - '0'));
    }
    return PauliKey(std::move(out));
}

PauliKey PauliKey::prefix(size_t qubits) const {
    if (2 * qubits > bits_.size()) throw std::invalid_argument("PauliKey::prefix: key too short");
    return PauliKey(std::vector<uint8_t>(bits_.begin(), bits_.begin() + static_cast<long>(2 * qubits)));
}

std::string PauliKey::to_bit_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
}

PauliKey keygen(size_t n, SeededRng& rng) {
    if (n == 0) throw std::invalid_argument("keygen: n must be >= 1");
    std::vector<uint8_t> bits(2 * n);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return PauliKey(std::move(bits));
}

std::vector<QubitState> qotp_encrypt(std::span<const QubitState> qubits, const PauliKey& key) {
    if (key.bit_length() != 2 * qubits.size()) {
        throw std::invalid_argument("qotp_encrypt: key length must be 2 * message length");
    }
    std::vector<QubitState> out;
    out.reserve(qubits.size());
    for (size_t i = 0; i < qubits.size(); ++i) {
        QubitState q = qubits[i];
        if (key.x_bit(i)) q = apply_pauli_x(q);
        if (key.z_bit(i)) q = apply_pauli_z(q);
        out.push_back(q);
    }
    return out;
}

std::vector<QubitState> qotp_decrypt(std::span<const QubitState> qubits, const PauliKey& key) {
    if (key.bit_length() != 2 * qubits.size()) {
        throw std::invalid_argument("qotp_decrypt: key length must be 2 * message length");
    }
    std::vector<QubitState> out;
    out.reserve(qubits.size());
    for (size_t i = 0; i < qubits.size(); ++i) {
        QubitState q = qubits[i];
        if (key.z_bit(i)) q = apply_pauli_z(q);
        if (key.x_bit(i)) q = apply_pauli_x(q);
        out.push_back(q);
    }
    return out;
}

}  // namespace qsmpc
