#pragma once

// Closed-form and semianalytic quantities in machine precision: the
// supercritical constants of the giant component, Lambert W on [-1/e, 0],
// the Borel law, and the subcritical moment expansions.

namespace ercomp {

// Constants of the giant-component central limit theorem at intensity t > 1.
struct SupercriticalConstants {
  double t = 0.0;
  double theta = 0.0;            // root of exp(t x)(1 - x) = 1 in (0, 1)
  double phi_prime_theta = 0.0;  // -t + 1/(1 - theta)
  double sigma = 0.0;            // sqrt(theta) / (phi'(theta) sqrt(1 - theta))
};

// phi(x) = -x t - ln(1 - x), 0 <= x < 1.
double phi(double t, double x);

// Unique root of phi in (0, 1) for t > 1: bisection to a bracket of width
// 1e-3, then safeguarded Newton to residual 1e-14.
double theta(double t);

// 1 + W0(-t exp(-t)) / t; the second route to theta.
double theta_via_lambert(double t);

double phi_prime_theta(double t);
double sigma(double t);
SupercriticalConstants supercritical_constants(double t);

// Principal branch of Lambert W on [-1/e, 0]; Halley iteration from a
// branch-point series (near -1/e) or a rational seed.
double lambert_w0(double x);

// Borel law of the total progeny of a Poisson(t) Galton-Watson tree:
// exp(-t k) (t k)^{k-1} / k!, 0 < t < 1, k >= 1.
double borel_pmf(double t, long k);

// Probability generating function of the Borel law, -W0(-t exp(-t) z) / t.
double borel_gf(double t, double z);

// 1/(1-t) (order 0) plus ((t^2/2 - t)/(1-t)^4) / n (order 1).
double susceptibility_expansion(double t, long n, int order);

// 1/(1-t)^3.
double second_moment_leading(double t);

}  // namespace ercomp
