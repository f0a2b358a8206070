#include "qsmpc/modmath.hpp"

#include <bit>

namespace qsmpc {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t n) {
    uint64_t result = 1 % n;
    base %= n;
    while (exp > 0) {
        if (exp & 1u) result = mulmod(result, base, n);
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    return result;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++r;
    }
    // This base set is a proven deterministic witness set below 2^64.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Modulus::Modulus(uint64_t p) : p_(p), prime_(false) {
    if (p < 2) throw std::invalid_argument("Modulus: p must be >= 2");
    prime_ = is_prime_u64(p);
}

uint64_t Modulus::add(uint64_t a, uint64_t b) const {
    // a, b < p < 2^64; avoid the wraparound when a + b overflows.
    uint64_t s = a + b;
    if (s < a || s >= p_) s -= p_;
    return s;
}

uint64_t Modulus::sub(uint64_t a, uint64_t b) const {
    return a >= b ? a - b : a + (p_ - b);
}

uint64_t Modulus::pow(uint64_t base, uint64_t exp) const {
    return powmod(base, exp, p_);
}

uint64_t Modulus::inv(uint64_t a) const {
    a %= p_;
    if (a == 0) throw std::domain_error("Modulus::inv: zero has no inverse");
    // Extended Euclid over signed 128-bit intermediates.
    __int128 t = 0, new_t = 1;
    __int128 r = static_cast<__int128>(p_), new_r = static_cast<__int128>(a);
    while (new_r != 0) {
        __int128 q = r / new_r;
        __int128 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::domain_error("Modulus::inv: element not invertible");
    if (t < 0) t += static_cast<__int128>(p_);
    return static_cast<uint64_t>(t);
}

unsigned qubit_width(const Modulus& m) {
    return static_cast<unsigned>(std::bit_width(m.value() - 1));
}

}  // namespace qsmpc
