#include "qsmpc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qsmpc {

BinomialBound binomial_3sigma(double prob, size_t trials) {
    if (trials == 0) throw std::invalid_argument("binomial_3sigma: trials must be positive");
    const double sigma = std::sqrt(prob * (1.0 - prob) / static_cast<double>(trials));
    BinomialBound b;
    b.expected = prob;
    b.lo = std::max(0.0, prob - 3.0 * sigma);
    b.hi = std::min(1.0, prob + 3.0 * sigma);
    return b;
}

double chi_square_stat(std::span<const uint64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("chi_square_stat: no bins");
    uint64_t total = 0;
    for (uint64_t c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    if (expected <= 0.0) throw std::invalid_argument("chi_square_stat: empty sample");
    double stat = 0.0;
    for (uint64_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

double chi_square_critical(size_t dof, double z) {
    if (dof == 0) throw std::invalid_argument("chi_square_critical: dof must be positive");
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

bool chi_square_uniform_ok(std::span<const uint64_t> counts) {
    return chi_square_stat(counts) <= chi_square_critical(counts.size() - 1);
}

}  // namespace qsmpc
