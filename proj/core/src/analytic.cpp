#include "ercomp/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ercomp/errors.hpp"

namespace ercomp {
namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr double kE = 2.71828182845904523536028747135266;

void require_supercritical(double t) {
  if (!(t > 1.0) || !std::isfinite(t)) {
    throw DomainError("supercritical constants need t > 1, got " + std::to_string(t));
  }
}

// phi(x) / x, increasing on (0, 1) from 1 - t to +inf; its root is theta.
double phi_over_x(double t, double x) {
  if (x == 0.0) return 1.0 - t;
  return -t - std::log1p(-x) / x;
}

}  // namespace

double phi(double t, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("phi needs 0 <= x < 1");
  return -x * t - std::log1p(-x);
}

double theta(double t) {
  require_supercritical(t);
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (phi_over_x(t, mid) < 0.0 ? lo : hi) = mid;
  }
  // Newton on phi, falling back to bisection whenever a step leaves the
  // bracket. phi is convex so the bracket invariant phi(lo) < 0 < phi(hi)
  // holds throughout (lo > 0 once bisection has moved it).
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = phi_over_x(t, x);
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = x;
    const double fx = -x * t - std::log1p(-x);
    const double dfx = -t + 1.0 / (1.0 - x);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi) || dfx == 0.0) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double theta_via_lambert(double t) {
  require_supercritical(t);
  return 1.0 + lambert_w0(-t * std::exp(-t)) / t;
}

double phi_prime_theta(double t) { return -t + 1.0 / (1.0 - theta(t)); }

double sigma(double t) {
  const double th = theta(t);
  const double dphi = -t + 1.0 / (1.0 - th);
  return std::sqrt(th) / (dphi * std::sqrt(1.0 - th));
}

SupercriticalConstants supercritical_constants(double t) {
  SupercriticalConstants c;
  c.t = t;
  c.theta = theta(t);
  c.phi_prime_theta = -t + 1.0 / (1.0 - c.theta);
  c.sigma = std::sqrt(c.theta) / (c.phi_prime_theta * std::sqrt(1.0 - c.theta));
  return c;
}

double lambert_w0(double x) {
  constexpr double kSlack = 4.0 * std::numeric_limits<double>::epsilon();
  if (!(x <= 0.0) || x < -kInvE - kSlack) {
    throw DomainError("lambert_w0 is implemented on [-1/e, 0] only");
  }
  if (x == 0.0) return 0.0;
  if (x <= -kInvE) return -1.0;

  const double branch = kE * x + 1.0;
  double w;
  if (branch < 0.3) {
    const double p = std::sqrt(2.0 * branch);
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else {
    w = std::log1p(x);
  }
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::fabs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(w))) {
      break;
    }
  }
  return w < -1.0 ? -1.0 : w;
}

double borel_pmf(double t, long k) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("borel_pmf needs 0 < t < 1");
  if (k < 1) throw DomainError("borel_pmf needs k >= 1");
  const double dk = static_cast<double>(k);
  return std::exp(-t * dk + (dk - 1.0) * std::log(t * dk) - std::lgamma(dk + 1.0));
}

double borel_gf(double t, double z) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("borel_gf needs 0 < t < 1");
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("borel_gf needs 0 <= z <= 1");
  if (z == 0.0) return 0.0;
  return -lambert_w0(-std::exp(-t) * t * z) / t;
}

double susceptibility_expansion(double t, long n, int order) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("susceptibility expansion needs 0 <= t < 1");
  if (n < 1) throw DomainError("susceptibility expansion needs n >= 1");
  if (order != 0 && order != 1) throw DomainError("susceptibility expansion order is 0 or 1");
  const double gap = 1.0 - t;
  double value = 1.0 / gap;
  if (order == 1) {
    value += ((0.5 * t * t - t) / (gap * gap * gap * gap)) / static_cast<double>(n);
  }
  return value;
}

double second_moment_leading(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("second moment expansion needs 0 <= t < 1");
  const double gap = 1.0 - t;
  return 1.0 / (gap * gap * gap);
}

}  // namespace ercomp
