#include "ercomp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "ercomp/errors.hpp"

namespace ercomp {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("KS statistic needs a nonempty sample");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return std::min(d, 1.0);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size()) throw InvalidInput("chi-square needs matching category counts");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (total == 0.0) throw InvalidInput("chi-square needs at least one observation");

  std::vector<double> exp_bins, obs_bins;
  double e = 0.0, o = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    e += probs[i] * total;
    o += static_cast<double>(observed[i]);
    if (e >= min_expected) {
      exp_bins.push_back(e);
      obs_bins.push_back(o);
      e = o = 0.0;
    }
  }
  const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  e += std::max(0.0, 1.0 - mass) * total;
  if (e > 0.0 || o > 0.0) {
    if (exp_bins.empty() || e >= min_expected) {
      exp_bins.push_back(e);
      obs_bins.push_back(o);
    } else {
      exp_bins.back() += e;
      obs_bins.back() += o;
    }
  }

  ChiSquareResult r;
  r.bins = static_cast<int>(exp_bins.size());
  r.dof = r.bins - 1;
  for (std::size_t b = 0; b < exp_bins.size(); ++b) {
    if (exp_bins[b] > 0.0) {
      const double diff = obs_bins[b] - exp_bins[b];
      r.statistic += diff * diff / exp_bins[b];
    } else if (obs_bins[b] > 0.0) {
      r.statistic = INFINITY;
    }
  }
  if (r.dof < 1) {
    r.p_value = 1.0;
  } else if (!std::isfinite(r.statistic)) {
    r.p_value = 0.0;
  } else {
    r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  }
  return r;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  const std::size_t len = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    sum += std::fabs(x - y);
  }
  return 0.5 * sum;
}

std::vector<double> empirical_probs(std::span<const std::uint64_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0.0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / total;
  return out;
}

}  // namespace ercomp
