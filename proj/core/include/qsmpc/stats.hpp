#pragma once

#include <cstdint>
#include <span>

namespace qsmpc {

// Three-sigma binomial interval around expected probability prob at n trials.
struct BinomialBound {
    double expected = 0.0;
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double observed) const { return observed >= lo && observed <= hi; }
};

BinomialBound binomial_3sigma(double prob, size_t trials);

// Pearson statistic for uniform-expected bins.
double chi_square_stat(std::span<const uint64_t> counts);

// Upper critical value via the Wilson-Hilferty cube approximation; z defaults
// to the 0.999 normal quantile, i.e. a 3-sigma-style significance.
double chi_square_critical(size_t dof, double z = 3.0902);

// True when the bin counts are consistent with a uniform distribution.
bool chi_square_uniform_ok(std::span<const uint64_t> counts);

}  // namespace qsmpc
