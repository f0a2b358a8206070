#include "qsmpc/polynomial.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace qsmpc {

Polynomial::Polynomial(std::vector<uint64_t> coeffs, const Modulus& m) : mod_(m), coeffs_(std::move(coeffs)) {
    for (auto& c : coeffs_) c = mod_.reduce(c);
    trim();
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Polynomial& Polynomial::same(const Polynomial& o) const {
    if (mod_ != o.mod_) throw std::invalid_argument("Polynomial: modulus mismatch");
    return o;
}

Polynomial Polynomial::from_roots(std::span<const uint64_t> roots, const Modulus& m) {
    std::unordered_set<uint64_t> seen;
    Polynomial acc = Polynomial::constant(1, m);
    for (uint64_t r : roots) {
        const uint64_t rr = m.reduce(r);
        if (!seen.insert(rr).second) throw std::invalid_argument("from_roots: duplicate root");
        acc = acc * Polynomial{{m.neg(rr), 1}, m};
    }
    return acc;
}

uint64_t Polynomial::eval(uint64_t x) const {
    const uint64_t xr = mod_.reduce(x);
    uint64_t acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = mod_.add(mod_.mul(acc, xr), *it);
    }
    return acc;
}

ZpElement Polynomial::operator()(const ZpElement& x) const {
    if (x.modulus() != mod_) throw std::invalid_argument("Polynomial::eval: modulus mismatch");
    return {eval(x.value()), mod_};
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    same(o);
    std::vector<uint64_t> out(std::max(coeffs_.size(), o.coeffs_.size()), 0);
    for (size_t i = 0; i < out.size(); ++i) out[i] = mod_.add(coeff(i), o.coeff(i));
    return {std::move(out), mod_};
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    same(o);
    std::vector<uint64_t> out(std::max(coeffs_.size(), o.coeffs_.size()), 0);
    for (size_t i = 0; i < out.size(); ++i) out[i] = mod_.sub(coeff(i), o.coeff(i));
    return {std::move(out), mod_};
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    same(o);
    if (is_zero() || o.is_zero()) return Polynomial(mod_);
    std::vector<uint64_t> out(coeffs_.size() + o.coeffs_.size() - 1, 0);
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (size_t j = 0; j < o.coeffs_.size(); ++j) {
            out[i + j] = mod_.add(out[i + j], mod_.mul(coeffs_[i], o.coeffs_[j]));
        }
    }
    return {std::move(out), mod_};
}

Polynomial Polynomial::scale(uint64_t c) const {
    std::vector<uint64_t> out(coeffs_);
    const uint64_t cr = mod_.reduce(c);
    for (auto& v : out) v = mod_.mul(v, cr);
    return {std::move(out), mod_};
}

Polynomial Polynomial::shift(uint64_t c) const {
    // Horner on the binomial (x + c): acc <- acc*(x+c) + coeff, high to low.
    const Polynomial binom{{mod_.reduce(c), 1}, mod_};
    Polynomial acc(mod_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * binom + Polynomial::constant(*it, mod_);
    }
    return acc;
}

Polynomial interpolate(std::span<const std::pair<uint64_t, uint64_t>> points, const Modulus& m) {
    if (points.empty()) throw std::invalid_argument("interpolate: need at least one point");
    if (!m.is_prime()) throw std::invalid_argument("interpolate: modulus must be prime");
    std::unordered_set<uint64_t> seen;
    for (const auto& [x, y] : points) {
        if (!seen.insert(m.reduce(x)).second) throw std::invalid_argument("interpolate: duplicate x coordinate");
    }
    // Full node polynomial N(x) = prod (x - x_i), then per-point synthetic
    // division N/(x - x_i) gives each Lagrange numerator in O(k) for O(k^2) total.
    std::vector<uint64_t> xs(points.size());
    for (size_t i = 0; i < points.size(); ++i) xs[i] = m.reduce(points[i].first);
    const Polynomial node = Polynomial::from_roots(xs, m);

    Polynomial acc(m);
    std::vector<uint64_t> q(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        // Synthetic division of node by (x - x_i): exact, remainder 0.
        const auto& n = node.coefficients();
        uint64_t carry = 0;
        for (size_t k = n.size(); k-- > 1;) {
            carry = m.add(n[k], m.mul(carry, xs[i]));
            q[k - 1] = carry;
        }
        Polynomial numer{q, m};
        // numer has degree k-1; its value at x_i is prod_{j != i}(x_i - x_j).
        const uint64_t denom = numer.eval(xs[i]);
        const uint64_t w = m.mul(m.reduce(points[i].second), m.inv(denom));
        acc = acc + numer.scale(w);
    }
    return acc;
}

Polynomial interpolate(std::span<const EvalPoint> points) {
    if (points.empty()) throw std::invalid_argument("interpolate: need at least one point");
    const Modulus m = points.front().x.modulus();
    std::vector<std::pair<uint64_t, uint64_t>> raw;
    raw.reserve(points.size());
    for (const auto& pt : points) {
        if (pt.x.modulus() != m || pt.y.modulus() != m) {
            throw std::invalid_argument("interpolate: modulus mismatch across points");
        }
        raw.emplace_back(pt.x.value(), pt.y.value());
    }
    return interpolate(std::span<const std::pair<uint64_t, uint64_t>>(raw), m);
}

bool is_quadratic_nonresidue(uint64_t a, const Modulus& m) {
    if (!m.is_prime() || !m.is_odd()) {
        throw std::invalid_argument("is_quadratic_nonresidue: requires an odd prime modulus");
    }
    const uint64_t ar = m.reduce(a);
    if (ar == 0) return false;
    return m.pow(ar, (m.value() - 1) / 2) == m.value() - 1;
}

Polynomial sample_rootfree(size_t max_degree, const Modulus& m, SeededRng& rng) {
    if (!m.is_prime() || !m.is_odd()) {
        throw std::invalid_argument("sample_rootfree: requires an odd prime modulus");
    }
    // Nonzero constant factor.
    Polynomial acc = Polynomial::constant(1 + rng.below(m.value() - 1), m);
    const size_t quads = max_degree / 2;
    for (size_t k = 0; k < quads; ++k) {
        for (;;) {
            const uint64_t b = rng.below(m.value());
            const uint64_t c = rng.below(m.value());
            // Discriminant b^2 - 4c must be a non-residue for x^2+bx+c to be
            // irreducible over Z_p.
            const uint64_t disc = m.sub(m.mul(b, b), m.mul(4 % m.value(), c));
            if (is_quadratic_nonresidue(disc, m)) {
                acc = acc * Polynomial{{c, b, 1}, m};
                break;
            }
        }
    }
    return acc;
}

Polynomial sample_uniform(size_t degree_bound, const Modulus& m, SeededRng& rng) {
    std::vector<uint64_t> coeffs(degree_bound + 1);
    for (auto& c : coeffs) c = rng.below(m.value());
    return {std::move(coeffs), m};
}

}  // namespace qsmpc
