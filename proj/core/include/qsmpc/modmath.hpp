#pragma once

#include <cstdint>
#include <stdexcept>

namespace qsmpc {

// Deterministic Miller-Rabin, valid for all n < 2^64.
bool is_prime_u64(uint64_t n);

// A residue ring Z_p, p >= 2. Primality is established at construction so
// callers can gate field-only operations (interpolation, inverses) on it.
class Modulus {
public:
    explicit Modulus(uint64_t p);

    uint64_t value() const { return p_; }
    bool is_prime() const { return prime_; }
    bool is_odd() const { return (p_ & 1u) != 0; }

    uint64_t reduce(uint64_t v) const { return v % p_; }
    uint64_t add(uint64_t a, uint64_t b) const;
    uint64_t sub(uint64_t a, uint64_t b) const;
    uint64_t neg(uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    uint64_t mul(uint64_t a, uint64_t b) const {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    uint64_t pow(uint64_t base, uint64_t exp) const;
    // Multiplicative inverse via extended Euclid; throws std::domain_error
    // when gcd(a, p) != 1.
    uint64_t inv(uint64_t a) const;

    friend bool operator==(const Modulus& lhs, const Modulus& rhs) { return lhs.p_ == rhs.p_; }
    friend bool operator!=(const Modulus& lhs, const Modulus& rhs) { return lhs.p_ != rhs.p_; }

private:
    uint64_t p_;
    bool prime_;
};

// Number of qubits used to encode one Z_p value: ceil(log2 p).
unsigned qubit_width(const Modulus& m);

// Canonical residue: 0 <= value() < modulus. Inputs are reduced on entry and
// every operation keeps the representative canonical.
class ZpElement {
public:
    ZpElement(uint64_t v, const Modulus& m) : mod_(m), value_(m.reduce(v)) {}

    uint64_t value() const { return value_; }
    const Modulus& modulus() const { return mod_; }

    ZpElement operator+(const ZpElement& o) const { return {mod_.add(value_, same(o).value_), mod_}; }
    ZpElement operator-(const ZpElement& o) const { return {mod_.sub(value_, same(o).value_), mod_}; }
    ZpElement operator*(const ZpElement& o) const { return {mod_.mul(value_, same(o).value_), mod_}; }
    ZpElement operator-() const { return {mod_.neg(value_), mod_}; }
    ZpElement inverse() const { return {mod_.inv(value_), mod_}; }

    friend bool operator==(const ZpElement& a, const ZpElement& b) {
        return a.mod_ == b.mod_ && a.value_ == b.value_;
    }

private:
    const ZpElement& same(const ZpElement& o) const {
        if (mod_ != o.mod_) throw std::invalid_argument("ZpElement: modulus mismatch");
        return o;
    }

    Modulus mod_;
    uint64_t value_;
};

}  // namespace qsmpc
