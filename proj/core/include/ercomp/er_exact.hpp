#pragma once

// Exact finite-n laws for the component of vertex 1 in G(n, p).
//
// Throughout, C denotes the component of vertex 1 and
//
//   g(n, p, j, k) = (1-p)^{jk} * prod_{i<k} (n - i + j) / (n - i)
//
// is the shift factor whose expectation under P_{n,p} equals
// ((n+j)/n) * (1 - P_{n+j,p}[|C| > n]).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ercomp/numeric.hpp"

namespace ercomp {

// Vertex count plus edge probability, the latter either given directly or
// derived from an intensity t through p = 1 - exp(-t/n). When t is present
// p is never stored; it is recomputed in whatever precision is active.
class GnpParams {
 public:
  static GnpParams from_p(int n, const Rational& p);
  static GnpParams from_t(int n, const Rational& t);
  // t wins when both are given.
  static GnpParams from_p_or_t(int n, const std::optional<Rational>& p,
                               const std::optional<Rational>& t);

  int n() const noexcept { return n_; }
  bool has_t() const noexcept { return t_.has_value(); }
  const std::optional<Rational>& t() const noexcept { return t_; }

  // p as an exact rational, when it is one (given directly, or t == 0).
  std::optional<Rational> exact_p() const;

  // Edge probability and its complement in the requested scalar type.
  // Throws DomainError for Rational when p is irrational.
  template <Scalar T>
  T p() const;
  template <Scalar T>
  T q() const;

  std::string describe() const;

 private:
  GnpParams(int n, std::optional<Rational> p, std::optional<Rational> t);

  int n_;
  std::optional<Rational> p_;
  std::optional<Rational> t_;
};

// Law of |C|: probs[k-1] = P[|C| = k], k = 1..n.
template <Scalar T>
struct ComponentDist {
  int n = 0;
  std::vector<T> probs;
  PrecisionCtx ctx;
  // Estimated absolute error of every entry (0 in rational mode).
  double error_estimate = 0.0;
  // Set when sum(probs) is off by more than n * tol or the error estimate
  // exceeds it.
  bool precision_warning = false;

  const T& at(int k) const { return probs.at(static_cast<std::size_t>(k - 1)); }
};

template <Scalar T>
struct IdentityCheck {
  T lhs;
  T rhs;
  T absdiff;
};

// (1-p)^{jk} * prod_{i=0}^{k-1} (n-i+j)/(n-i). Exactly zero when k > n + j.
template <Scalar T>
T g_factor(int n, const T& p, long j, int k);

// Same factor, parameterized by q = 1 - p.
template <Scalar T>
T g_factor_q(int n, const T& q, long j, int k);

// prod_{i=0}^{k-1} exp(-lambda t) (1 + lambda / (1 - i/n)).
// f_factor(n, t, j/n, k) == g_factor(n, 1 - exp(-t/n), j, k).
template <FloatScalar T>
T f_factor(int n, const T& t, const T& lambda, int k);

// floor(n * lambda) / n.
Rational lambda_star(const Rational& lambda, int n);
Rational lambda_star(double lambda, int n);

// Probability that G(k, p) is connected.
template <Scalar T>
T connectivity_prob(int k, const T& p, const PrecisionCtx& ctx);

// Probability that G(k, p) is connected for k = 1..kmax (entry k-1), from
// C(1) = 1, C(k) = 1 - sum_{j<k} binom(k-1, j-1) C(j) (1-p)^{j(k-j)}.
// Uses the active precision as is; see component_dist for guard bits.
template <Scalar T>
std::vector<T> connectivity_table(int kmax, const T& q);

// Law of |C| in G(n, p):
//   P[|C| = k] = binom(n-1, k-1) C(k) (1-p)^{k(n-k)}.
//
// The connectivity recursion cancels catastrophically, so in extended mode
// the computation runs with extra guard bits (see cancellation_bits) and is
// rounded to ctx.bits afterwards. In double mode the same estimate is
// reported through error_estimate / precision_warning.
template <Scalar T>
ComponentDist<T> component_dist(const GnpParams& params, const PrecisionCtx& ctx);

// Variant taking p directly in the scalar type; p is treated as exact.
template <Scalar T>
ComponentDist<T> component_dist_p(int n, const T& p, const PrecisionCtx& ctx);

// Estimated number of mantissa bits the connectivity recursion loses at
// (n, q): log2 of the largest output perturbation produced by unit-scale
// rounding errors propagated through the recursion (random signs, fixed seed).
// log_q is ln(1 - p) (<= 0; -inf for p = 1).
double cancellation_bits(int n, double log_q);

// sum_k k^i P[|C| = k].
template <Scalar T>
T moment(const ComponentDist<T>& dist, int i);

// E_{n,p}[g(n,p,j,|C|)] against ((n+j)/n)(1 - P_{n+j,p}[|C| > n]).
template <Scalar T>
IdentityCheck<T> verify_identity(int n, const T& p, long j, const PrecisionCtx& ctx);

// P_{M,p}[|C|=k] against P_{N,p}[|C|=k] (1-p)^{(M-N)k} prod_{i=1}^{k-1} (M-i)/(N-i).
template <Scalar T>
IdentityCheck<T> verify_change_of_measure(int m, int n, const T& p, int k,
                                          const PrecisionCtx& ctx);

// Recovers the law of |C| from the shift identities j = 0, -1, ..., -(n-1)
// alone by forward substitution in the triangular system
// sum_k g(n,p,j,k) x_k = (n+j)/n. Runs at exactly the context precision and
// throws ConditioningError when a recovered value leaves
// [-recovery_band, 1 + recovery_band].
template <Scalar T>
ComponentDist<T> recover_dist(int n, const T& p, const PrecisionCtx& ctx);

template <Scalar T>
ComponentDist<T> recover_dist(const GnpParams& params, const PrecisionCtx& ctx);

// CSV with header "k,prob".
template <Scalar T>
void write_csv(std::ostream& out, const ComponentDist<T>& dist);

}  // namespace ercomp
