#pragma once

// Goodness-of-fit statistics used by the Monte Carlo checks.

#include <cstdint>
#include <span>
#include <vector>

namespace ercomp {

double normal_cdf(double x) noexcept;

// sup_x |F_emp(x) - Phi(x)| by the sorted two-sided formula.
// Throws InvalidInput on an empty sample.
double ks_statistic(std::vector<double> samples);

struct ChiSquareResult {
  double statistic = 0.0;
  int bins = 0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson test of observed category counts against category probabilities.
// Adjacent categories are merged left to right until each bin expects at
// least min_expected observations; a short final bin joins its neighbour.
// Mass missing from probs (1 - sum) is added to the last bin.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double min_expected = 20.0);

// (1/2) sum |a_i - b_i|; the shorter input is padded with zeros.
double total_variation(std::span<const double> a, std::span<const double> b);

// Normalized histogram (counts / total).
std::vector<double> empirical_probs(std::span<const std::uint64_t> counts);

}  // namespace ercomp
