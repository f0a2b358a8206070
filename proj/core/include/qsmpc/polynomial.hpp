#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qsmpc/modmath.hpp"
#include "qsmpc/rng.hpp"

namespace qsmpc {

// Polynomial over Z_p, coefficients in ascending degree order. Canonical
// form: no trailing zero coefficient; the zero polynomial is the empty
// vector and reports degree -1.
class Polynomial {
public:
    explicit Polynomial(const Modulus& m) : mod_(m) {}
    Polynomial(std::vector<uint64_t> coeffs, const Modulus& m);

    static Polynomial zero(const Modulus& m) { return Polynomial(m); }
    static Polynomial constant(uint64_t c, const Modulus& m) { return {{c}, m}; }
    // a*x + b
    static Polynomial linear(uint64_t a, uint64_t b, const Modulus& m) { return {{b, a}, m}; }
    // Monic product of (x - r) over the given roots; roots must be distinct mod p.
    static Polynomial from_roots(std::span<const uint64_t> roots, const Modulus& m);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const Modulus& modulus() const { return mod_; }
    const std::vector<uint64_t>& coefficients() const { return coeffs_; }
    uint64_t coeff(size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }

    uint64_t eval(uint64_t x) const;
    ZpElement operator()(const ZpElement& x) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scale(uint64_t c) const;
    // P(x + c)
    Polynomial shift(uint64_t c) const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.mod_ == b.mod_ && a.coeffs_ == b.coeffs_;
    }

private:
    void trim();
    const Polynomial& same(const Polynomial& o) const;

    Modulus mod_;
    std::vector<uint64_t> coeffs_;
};

struct EvalPoint {
    ZpElement x;
    ZpElement y;
};

// Unique polynomial of degree < points.size() through all points (Lagrange).
// Requires a prime modulus and pairwise distinct x coordinates.
Polynomial interpolate(std::span<const EvalPoint> points);
Polynomial interpolate(std::span<const std::pair<uint64_t, uint64_t>> points, const Modulus& m);

// A polynomial with no roots anywhere in Z_p: a nonzero constant times
// floor(max_degree/2) irreducible quadratics x^2 + b x + c, where b^2 - 4c
// is a quadratic non-residue (Euler's criterion). Requires p an odd prime.
Polynomial sample_rootfree(size_t max_degree, const Modulus& m, SeededRng& rng);

// Uniform coefficient vector of length degree_bound + 1 (degree <= bound).
Polynomial sample_uniform(size_t degree_bound, const Modulus& m, SeededRng& rng);

bool is_quadratic_nonresidue(uint64_t a, const Modulus& m);

}  // namespace qsmpc
