#include "ercomp/er_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "ercomp/errors.hpp"
#include "ercomp/rng.hpp"

namespace ercomp {

// ---------------------------------------------------------------------------
// GnpParams

GnpParams::GnpParams(int n, std::optional<Rational> p, std::optional<Rational> t)
    : n_(n), p_(std::move(p)), t_(std::move(t)) {
  if (n_ < 1) throw InvalidInput("n must be >= 1, got " + std::to_string(n_));
  if (p_ && (*p_ < 0 || *p_ > 1)) {
    throw InvalidInput("p must lie in [0, 1], got " + p_->get_str());
  }
  if (t_ && *t_ < 0) throw InvalidInput("t must be >= 0, got " + t_->get_str());
}

GnpParams GnpParams::from_p(int n, const Rational& p) { return GnpParams(n, p, std::nullopt); }

GnpParams GnpParams::from_t(int n, const Rational& t) { return GnpParams(n, std::nullopt, t); }

GnpParams GnpParams::from_p_or_t(int n, const std::optional<Rational>& p,
                                 const std::optional<Rational>& t) {
  if (t) return from_t(n, *t);
  if (p) return from_p(n, *p);
  throw InvalidInput("one of p or t is required");
}

std::optional<Rational> GnpParams::exact_p() const {
  if (t_) {
    if (*t_ == 0) return Rational(0);
    return std::nullopt;
  }
  return p_;
}

template <Scalar T>
T GnpParams::p() const {
  if (!t_) return from_rational<T>(*p_);
  if constexpr (kIsExact<T>) {
    if (*t_ != 0) throw DomainError("p = 1 - exp(-t/n) is irrational for t > 0");
    return Rational(0);
  } else {
    using std::expm1;
    const T x = from_rational<T>(*t_) / T(n_);
    return -expm1(-x);
  }
}

template <Scalar T>
T GnpParams::q() const {
  if (!t_) return from_rational<T>(1 - *p_);
  if constexpr (kIsExact<T>) {
    if (*t_ != 0) throw DomainError("p = 1 - exp(-t/n) is irrational for t > 0");
    return Rational(1);
  } else {
    using std::exp;
    const T x = from_rational<T>(*t_) / T(n_);
    return exp(-x);
  }
}

std::string GnpParams::describe() const {
  std::ostringstream os;
  os << "n=" << n_;
  if (t_) {
    os << " t=" << t_->get_str();
  } else {
    os << " p=" << p_->get_str();
  }
  return os.str();
}

template double GnpParams::p<double>() const;
template BigFloat GnpParams::p<BigFloat>() const;
template Rational GnpParams::p<Rational>() const;
template double GnpParams::q<double>() const;
template BigFloat GnpParams::q<BigFloat>() const;
template Rational GnpParams::q<Rational>() const;

// ---------------------------------------------------------------------------
// Shift factors

namespace {

template <Scalar T>
bool is_zero(const T& v) {
  if constexpr (std::same_as<T, BigFloat>) {
    return v.is_zero();
  } else {
    return v == 0;
  }
}

template <Scalar T>
bool is_one(const T& v) {
  if constexpr (std::same_as<T, BigFloat>) {
    return v == BigFloat(1);
  } else {
    return v == 1;
  }
}

void check_n(int n) {
  if (n < 1) throw DomainError("n must be >= 1, got " + std::to_string(n));
}

template <Scalar T>
T descending_ratio(long top, long bottom, int k) {
  // prod_{i=0}^{k-1} (top - i) / (bottom - i)
  if constexpr (kIsExact<T>) {
    BigInt num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
      num *= top - i;
      den *= bottom - i;
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
  } else {
    T r = T(1);
    for (int i = 0; i < k; ++i) {
      r *= T(static_cast<double>(top - i));
      r /= T(static_cast<double>(bottom - i));
    }
    return r;
  }
}

}  // namespace

namespace {

void check_g_args(int n, long j, int k) {
  check_n(n);
  if (j <= -n) {
    throw DomainError("g factor needs j > -n (n=" + std::to_string(n) +
                      ", j=" + std::to_string(j) + ")");
  }
  if (k < 1 || k > n) {
    throw DomainError("g factor needs 1 <= k <= n (k=" + std::to_string(k) + ")");
  }
}

// prod_{i<k} c (n+j-i)/(n-i) with c = (1-p)^j. In float modes the product is
// taken step by step: the two halves of the factor can each overflow or
// underflow while their product is moderate.
template <Scalar T>
T g_from_step(int n, const T& c, long j, int k) {
  if constexpr (kIsExact<T>) {
    return ipow(c, k) * descending_ratio<T>(n + j, n, k);
  } else {
    T r = T(1);
    for (int i = 0; i < k; ++i) {
      r *= c * T(static_cast<double>(n + j - i)) / T(static_cast<double>(n - i));
    }
    return r;
  }
}

}  // namespace

template <Scalar T>
T g_factor_q(int n, const T& q, long j, int k) {
  check_g_args(n, j, k);
  if (j < 0 && is_zero(q)) throw DomainError("g factor with j < 0 is undefined at p = 1");
  if (static_cast<long>(k) > n + j) return T(0);
  return g_from_step(n, ipow(q, j), j, k);
}

template <Scalar T>
T g_factor(int n, const T& p, long j, int k) {
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  if constexpr (kIsExact<T>) {
    return g_factor_q(n, T(1 - p), j, k);
  } else {
    // (1-p)^j as exp(j log1p(-p)): forming 1 - p first would cost up to
    // log2(1/p) bits that the power then amplifies by j k.
    check_g_args(n, j, k);
    if (j < 0 && is_one(p)) throw DomainError("g factor with j < 0 is undefined at p = 1");
    if (static_cast<long>(k) > n + j) return T(0);
    if (j == 0) return T(1);
    if (is_one(p)) return T(0);
    using std::exp;
    using std::log1p;
    return g_from_step(n, T(exp(T(static_cast<double>(j)) * log1p(T(-p)))), j, k);
  }
}

template <FloatScalar T>
T f_factor(int n, const T& t, const T& lambda, int k) {
  check_n(n);
  if (!(lambda > T(-1))) throw DomainError("f factor needs lambda > -1");
  if (k < 1 || k > n) throw DomainError("f factor needs 1 <= k <= n");
  using std::exp;
  const T step = exp(T(-(lambda * t)));
  T prod = T(1);
  for (int i = 0; i < k; ++i) {
    prod *= step * (T(1) + lambda * T(n) / T(n - i));
  }
  return prod;
}

Rational lambda_star(const Rational& lambda, int n) {
  check_n(n);
  if (lambda <= -1) throw DomainError("lambda_star needs lambda > -1");
  BigInt scaled = lambda.get_num() * n;
  BigInt floor_value;
  mpz_fdiv_q(floor_value.get_mpz_t(), scaled.get_mpz_t(), lambda.get_den_mpz_t());
  if (floor_value <= -n) {
    throw DomainError("floor(n * lambda) / n reaches -1; need lambda >= -1 + 1/n");
  }
  Rational r(floor_value, n);
  r.canonicalize();
  return r;
}

Rational lambda_star(double lambda, int n) {
  check_n(n);
  if (!(lambda > -1.0)) throw DomainError("lambda_star needs lambda > -1");
  const double f = std::floor(static_cast<double>(n) * lambda);
  if (f <= -n) throw DomainError("floor(n * lambda) / n reaches -1; need lambda >= -1 + 1/n");
  Rational r(BigInt(static_cast<long>(f)), BigInt(n));
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Connectivity recursion

namespace {

// Direct form; used for doubles and rationals.
template <Scalar T>
std::vector<T> direct_connectivity(int kmax, const T& q) {
  std::vector<T> conn(static_cast<std::size_t>(kmax));
  if (kmax == 0) return conn;
  conn[0] = T(1);
  std::unordered_map<long, T> powers;
  auto q_pow = [&](long e) -> const T& {
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, ipow(q, e)).first;
    return it->second;
  };
  // Row k-1 of Pascal's triangle.
  std::vector<T> row{T(1)};
  for (int k = 2; k <= kmax; ++k) {
    std::vector<T> next(static_cast<std::size_t>(k));
    next[0] = T(1);
    next[static_cast<std::size_t>(k - 1)] = T(1);
    for (int i = 1; i < k - 1; ++i) {
      next[static_cast<std::size_t>(i)] =
          row[static_cast<std::size_t>(i - 1)] + row[static_cast<std::size_t>(i)];
    }
    row = std::move(next);
    T sum = T(0);
    for (int j = 1; j < k; ++j) {
      sum += row[static_cast<std::size_t>(j - 1)] * conn[static_cast<std::size_t>(j - 1)] *
             q_pow(static_cast<long>(j) * (k - j));
    }
    conn[static_cast<std::size_t>(k - 1)] = T(1) - sum;
  }
  return conn;
}

// Convolution form of the same recursion. With s = sqrt(q),
//   q^{j(k-j)} = s^{k^2} s^{-j^2} s^{-(k-j)^2},
// so
//   C(k) = 1 - W_k sum_{j<k} U_j V_{k-j},
//   W_k = (k-1)! s^{k^2},  U_j = C(j) / W_j,  V_m = s^{-m^2} / m!,
// and P[|C| = k] = W_n U_k V_{n-k}. One multiply-add per term.
struct Convolution {
  std::vector<BigFloat> conn;
  std::vector<BigFloat> u;
  std::vector<BigFloat> v;
  std::vector<BigFloat> w;
};

// Requires 0 < q. rhs(k) is the inhomogeneous term (1 for the real
// recursion).
template <class Rhs>
Convolution convolution_recursion(int kmax, const BigFloat& q, Rhs rhs) {
  Convolution out;
  const auto n = static_cast<std::size_t>(kmax);
  out.conn.resize(n);
  out.u.resize(n);
  out.v.resize(n + 1);
  out.w.resize(n);

  const BigFloat s = sqrt(q);
  const BigFloat s_inv = BigFloat(1) / s;
  const BigFloat s_inv2 = s_inv * s_inv;
  const BigFloat s2 = s * s;

  // V_m = V_{m-1} s^{-(2m-1)} / m
  out.v[0] = BigFloat(1);
  BigFloat step = s_inv;
  for (std::size_t m = 1; m <= n; ++m) {
    out.v[m] = out.v[m - 1] * step;
    out.v[m] /= static_cast<long>(m);
    step *= s_inv2;
  }
  // W_k = W_{k-1} (k-1) s^{2k-1}
  BigFloat sw = s;
  out.w[0] = s;
  for (std::size_t k = 2; k <= n; ++k) {
    sw *= s2;
    out.w[k - 1] = out.w[k - 2] * sw;
    out.w[k - 1] *= static_cast<long>(k - 1);
  }

  BigFloat acc;
  BigFloat tmp;
  for (std::size_t k = 1; k <= n; ++k) {
    BigFloat& c = out.conn[k - 1];
    if (k == 1) {
      c = rhs(1);
    } else {
      mpfr_set_zero(acc.get(), 1);
      for (std::size_t j = 1; j < k; ++j) {
        mpfr_mul(tmp.get(), out.u[j - 1].get(), out.v[k - j].get(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
      }
      c = rhs(static_cast<int>(k)) - out.w[k - 1] * acc;
    }
    out.u[k - 1] = c / out.w[k - 1];
  }
  return out;
}

std::vector<BigFloat> bigfloat_connectivity(int kmax, const BigFloat& q) {
  if (q.is_zero()) return std::vector<BigFloat>(static_cast<std::size_t>(kmax), BigFloat(1));
  if (q == BigFloat(1)) {
    std::vector<BigFloat> conn(static_cast<std::size_t>(kmax), BigFloat(0));
    if (kmax > 0) conn[0] = BigFloat(1);
    return conn;
  }
  return convolution_recursion(kmax, q, [](int) { return BigFloat(1); }).conn;
}

}  // namespace

template <Scalar T>
std::vector<T> connectivity_table(int kmax, const T& q) {
  if (kmax < 0) throw DomainError("kmax must be >= 0");
  if (q < T(0) || q > T(1)) throw DomainError("1 - p must lie in [0, 1]");
  if constexpr (std::same_as<T, BigFloat>) {
    return bigfloat_connectivity(kmax, q);
  } else {
    return direct_connectivity(kmax, q);
  }
}

double cancellation_bits(int n, double log_q) {
  if (n <= 2 || !(log_q < 0.0) || std::isinf(log_q)) return 0.0;
  BigFloat::PrecisionScope scope(64);
  const double log_s = 0.5 * log_q;
  auto lfact = [](int m) { return std::lgamma(static_cast<double>(m) + 1.0); };

  std::vector<BigFloat> v(static_cast<std::size_t>(n) + 1);
  std::vector<BigFloat> w(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    const double dm = m;
    v[static_cast<std::size_t>(m)] = exp(BigFloat(-dm * dm * log_s - lfact(m)));
    if (m >= 1) w[static_cast<std::size_t>(m)] = exp(BigFloat(lfact(m - 1) + dm * dm * log_s));
  }

  // Propagate one rounding-sized perturbation per step (magnitude k, random
  // sign) through the linearized recursion delta_k = e_k - W_k sum U_j V_{k-j}.
  SplitMix64 signs(0x5eed);
  std::vector<BigFloat> u(static_cast<std::size_t>(n) + 1);
  BigFloat acc, tmp;
  double worst = 0.0;
  const double log_nfact = lfact(n - 1);
  for (int k = 1; k <= n; ++k) {
    const long e = (signs() & 1) ? k : -static_cast<long>(k);
    BigFloat delta(e);
    if (k > 1) {
      mpfr_set_zero(acc.get(), 1);
      for (int j = 1; j < k; ++j) {
        mpfr_mul(tmp.get(), u[static_cast<std::size_t>(j)].get(),
                 v[static_cast<std::size_t>(k - j)].get(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
      }
      delta -= w[static_cast<std::size_t>(k)] * acc;
    }
    u[static_cast<std::size_t>(k)] = delta / w[static_cast<std::size_t>(k)];
    // Output sensitivity binom(n-1, k-1) q^{k(n-k)}.
    const double log_a = log_nfact - lfact(k - 1) - lfact(n - k) +
                         static_cast<double>(k) * (n - k) * log_q;
    if (delta.is_zero()) continue;
    long exponent = 0;
    const double mant = mpfr_get_d_2exp(&exponent, delta.get(), MPFR_RNDN);
    const double bits = std::log2(std::fabs(mant)) + static_cast<double>(exponent) +
                        log_a / std::log(2.0);
    worst = std::max(worst, bits);
  }
  return worst;
}

namespace {

void check_exact_cap(int n, const PrecisionCtx& ctx) {
  if (n > ctx.exact_cap) {
    throw ResourceError("n = " + std::to_string(n) + " exceeds the exact-computation cap " +
                        std::to_string(ctx.exact_cap));
  }
  if (ctx.mode == Arithmetic::kDouble && n > ctx.double_cap) {
    throw ResourceError("n = " + std::to_string(n) + " exceeds the machine-double cap " +
                        std::to_string(ctx.double_cap) + "; use extended precision");
  }
}

constexpr unsigned kGuardMargin = 32;

template <Scalar T>
double log_of(const T& q) {
  if constexpr (std::same_as<T, BigFloat>) {
    if (q.is_zero()) return -std::numeric_limits<double>::infinity();
    return log(q.rounded(64)).to_double();
  } else {
    return std::log(to_double(q));
  }
}

template <Scalar T>
std::vector<T> probs_from_connectivity(int n, const T& q, const std::vector<T>& conn) {
  std::vector<T> probs(static_cast<std::size_t>(n));
  if constexpr (kIsExact<T>) {
    for (int k = 1; k <= n; ++k) {
      probs[static_cast<std::size_t>(k - 1)] =
          Rational(binomial(n - 1, k - 1)) * conn[static_cast<std::size_t>(k - 1)] *
          ipow(q, static_cast<long>(k) * (n - k));
    }
  } else {
    for (int k = 1; k <= n; ++k) {
      const double log_binom = std::lgamma(static_cast<double>(n)) -
                               std::lgamma(static_cast<double>(k)) -
                               std::lgamma(static_cast<double>(n - k + 1));
      probs[static_cast<std::size_t>(k - 1)] = std::round(std::exp(log_binom)) *
                                               conn[static_cast<std::size_t>(k - 1)] *
                                               ipow(q, static_cast<long>(k) * (n - k));
    }
  }
  return probs;
}

template <Scalar T>
void finish(ComponentDist<T>& dist) {
  if constexpr (kIsExact<T>) {
    Rational sum = 0;
    for (const auto& pr : dist.probs) sum += pr;
    dist.precision_warning = sum != 1;
  } else {
    T sum = T(0);
    for (const auto& pr : dist.probs) sum += pr;
    const double dev = std::fabs(to_double(sum) - 1.0);
    const double budget = dist.n * dist.ctx.tol;
    dist.precision_warning = dev > budget || dist.error_estimate > budget;
  }
}

// make_q() returns 1 - p in the active precision.
template <Scalar T, class MakeQ>
ComponentDist<T> component_dist_impl(int n, MakeQ make_q, const PrecisionCtx& ctx) {
  check_n(n);
  check_exact_cap(n, ctx);
  ComponentDist<T> dist;
  dist.n = n;
  dist.ctx = ctx;

  if constexpr (std::same_as<T, BigFloat>) {
    double lost = 0.0;
    {
      BigFloat::PrecisionScope probe(64);
      lost = cancellation_bits(n, log_of(make_q()));
    }
    const unsigned guard = static_cast<unsigned>(std::ceil(lost)) + kGuardMargin;
    const unsigned working = ctx.bits + guard;
    std::vector<BigFloat> probs(static_cast<std::size_t>(n));
    {
      BigFloat::PrecisionScope scope(working);
      const BigFloat q = make_q();
      if (q.is_zero() || q == BigFloat(1)) {
        for (auto& pr : probs) pr = BigFloat(0);
        probs[q.is_zero() ? static_cast<std::size_t>(n - 1) : 0] = BigFloat(1);
      } else {
        const Convolution conv = convolution_recursion(n, q, [](int) { return BigFloat(1); });
        const BigFloat& wn = conv.w[static_cast<std::size_t>(n - 1)];
        for (int k = 1; k <= n; ++k) {
          probs[static_cast<std::size_t>(k - 1)] =
              wn * conv.u[static_cast<std::size_t>(k - 1)] * conv.v[static_cast<std::size_t>(n - k)];
        }
      }
    }
    dist.probs.reserve(probs.size());
    for (const auto& pr : probs) dist.probs.push_back(pr.rounded(ctx.bits));
    dist.error_estimate = std::ldexp(1.0, static_cast<int>(std::ceil(lost)) -
                                              static_cast<int>(working)) +
                          std::ldexp(1.0, -static_cast<int>(ctx.bits));
  } else {
    const T q = make_q();
    dist.probs = probs_from_connectivity(n, q, direct_connectivity(n, q));
    if constexpr (!kIsExact<T>) {
      dist.error_estimate = std::ldexp(1.0, static_cast<int>(std::ceil(cancellation_bits(n, log_of(q)))) - 53);
    }
  }
  finish(dist);
  return dist;
}

}  // namespace

template <Scalar T>
T connectivity_prob(int k, const T& p, const PrecisionCtx& ctx) {
  if (k < 1) throw DomainError("connectivity_prob needs k >= 1");
  check_exact_cap(k, ctx);
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  if constexpr (std::same_as<T, BigFloat>) {
    const BigFloat q = BigFloat(1) - p;
    const unsigned working =
        ctx.bits + static_cast<unsigned>(std::ceil(cancellation_bits(k, log_of(q)))) + kGuardMargin;
    BigFloat::PrecisionScope scope(working);
    const BigFloat q_wide = BigFloat(1) - p;
    return connectivity_table(k, q_wide).back().rounded(ctx.bits);
  } else {
    const T q = T(1) - p;
    return connectivity_table(k, q).back();
  }
}

template <Scalar T>
ComponentDist<T> component_dist(const GnpParams& params, const PrecisionCtx& ctx) {
  return component_dist_impl<T>(params.n(), [&params] { return params.q<T>(); }, ctx);
}

template <Scalar T>
ComponentDist<T> component_dist_p(int n, const T& p, const PrecisionCtx& ctx) {
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  return component_dist_impl<T>(n, [&p]() -> T { return T(1) - p; }, ctx);
}

template <Scalar T>
T moment(const ComponentDist<T>& dist, int i) {
  if (i < 0) throw DomainError("moment order must be >= 0");
  T acc = T(0);
  for (int k = 1; k <= dist.n; ++k) {
    T term = dist.at(k);
    for (int r = 0; r < i; ++r) term *= T(k);
    acc += term;
  }
  return acc;
}

template <Scalar T>
IdentityCheck<T> verify_identity(int n, const T& p, long j, const PrecisionCtx& ctx) {
  check_n(n);
  if (j <= -n) throw DomainError("identity needs j > -n");
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  if (j < 0 && p == T(1)) throw DomainError("identity with j < 0 is undefined at p = 1");
  if (j > 0) check_exact_cap(static_cast<int>(n + j), ctx);

  const ComponentDist<T> dist = component_dist_p(n, p, ctx);
  T lhs = T(0);
  for (int k = 1; k <= n; ++k) lhs += g_factor(n, p, j, k) * dist.at(k);

  T rhs = from_rational<T>(ratio(n + j, n));
  if (j > 0) {
    const ComponentDist<T> shifted = component_dist_p(static_cast<int>(n + j), p, ctx);
    T tail = T(0);
    for (int k = n + 1; k <= shifted.n; ++k) tail += shifted.at(k);
    rhs *= T(1) - tail;
  }
  T diff = lhs - rhs;
  return {lhs, rhs, abs_value(diff)};
}

template <Scalar T>
IdentityCheck<T> verify_change_of_measure(int m, int n, const T& p, int k,
                                          const PrecisionCtx& ctx) {
  check_n(m);
  check_n(n);
  if (k < 1 || k > n) throw DomainError("change of measure needs 1 <= k <= N");
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  if (m < n && p == T(1)) {
    throw DomainError("change of measure with M < N is undefined at p = 1");
  }
  const T q = T(1) - p;
  const ComponentDist<T> small = component_dist_p(m, p, ctx);
  const ComponentDist<T> large = component_dist_p(n, p, ctx);

  T lhs = k <= m ? small.at(k) : T(0);
  T rhs = large.at(k) * ipow(q, static_cast<long>(m - n) * k);
  for (int i = 1; i < k; ++i) {
    rhs *= T(m - i);
    rhs /= T(n - i);
  }
  T diff = lhs - rhs;
  return {lhs, rhs, abs_value(diff)};
}

template <Scalar T>
ComponentDist<T> recover_dist(int n, const T& p, const PrecisionCtx& ctx) {
  check_n(n);
  if (n > ctx.recovery_cap) {
    throw ResourceError("n = " + std::to_string(n) + " exceeds the recovery cap " +
                        std::to_string(ctx.recovery_cap));
  }
  if (ctx.mode == Arithmetic::kDouble && n > ctx.double_cap) {
    throw ResourceError("recovery above n = " + std::to_string(ctx.double_cap) +
                        " requires extended precision");
  }
  if (p < T(0) || p > T(1)) throw DomainError("p must lie in [0, 1]");
  if (n > 1 && p == T(1)) throw DomainError("recovery needs negative shifts, undefined at p = 1");

  const T q = T(1) - p;
  ComponentDist<T> dist;
  dist.n = n;
  dist.ctx = ctx;
  dist.probs.resize(static_cast<std::size_t>(n));
  std::vector<T> row(static_cast<std::size_t>(n) + 1);

  // Row j = m - n has nonzero entries k = 1..m only.
  for (int m = 1; m <= n; ++m) {
    const long j = m - n;
    const T q_shift = ipow(q, j);
    row[0] = T(1);
    for (int k = 1; k <= m; ++k) {
      row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - 1)] * q_shift;
      row[static_cast<std::size_t>(k)] *= T(m - k + 1);
      row[static_cast<std::size_t>(k)] /= T(n - k + 1);
    }
    T residual = from_rational<T>(ratio(m, n));
    for (int k = 1; k < m; ++k) {
      residual -= row[static_cast<std::size_t>(k)] * dist.probs[static_cast<std::size_t>(k - 1)];
    }
    T x = residual / row[static_cast<std::size_t>(m)];
    const double xd = to_double(x);
    if constexpr (kIsExact<T>) {
      if (x < 0 || x > 1) {
        throw ConditioningError("recovered P[|C|=" + std::to_string(m) + "] = " +
                                format_scalar(x) + " lies outside [0, 1]");
      }
    } else {
      if (!(xd >= -ctx.recovery_band && xd <= 1.0 + ctx.recovery_band)) {
        throw ConditioningError("recovered P[|C|=" + std::to_string(m) + "] = " +
                                format_scalar(x) + " lies outside the admissible band; " +
                                "the triangular system is too ill-conditioned at " + ctx.name());
      }
    }
    dist.probs[static_cast<std::size_t>(m - 1)] = std::move(x);
  }
  finish(dist);
  return dist;
}

template <Scalar T>
ComponentDist<T> recover_dist(const GnpParams& params, const PrecisionCtx& ctx) {
  return recover_dist(params.n(), params.p<T>(), ctx);
}

template <Scalar T>
void write_csv(std::ostream& out, const ComponentDist<T>& dist) {
  out << "k,prob\n";
  for (int k = 1; k <= dist.n; ++k) out << k << ',' << format_scalar(dist.at(k)) << '\n';
}

#define ERCOMP_INSTANTIATE(T)                                                                \
  template T g_factor<T>(int, const T&, long, int);                                         \
  template T g_factor_q<T>(int, const T&, long, int);                                       \
  template T connectivity_prob<T>(int, const T&, const PrecisionCtx&);                      \
  template std::vector<T> connectivity_table<T>(int, const T&);                             \
  template ComponentDist<T> component_dist<T>(const GnpParams&, const PrecisionCtx&);       \
  template ComponentDist<T> component_dist_p<T>(int, const T&, const PrecisionCtx&);        \
  template T moment<T>(const ComponentDist<T>&, int);                                       \
  template IdentityCheck<T> verify_identity<T>(int, const T&, long, const PrecisionCtx&);   \
  template IdentityCheck<T> verify_change_of_measure<T>(int, int, const T&, int,            \
                                                        const PrecisionCtx&);               \
  template ComponentDist<T> recover_dist<T>(int, const T&, const PrecisionCtx&);            \
  template ComponentDist<T> recover_dist<T>(const GnpParams&, const PrecisionCtx&);         \
  template void write_csv<T>(std::ostream&, const ComponentDist<T>&);

ERCOMP_INSTANTIATE(double)
ERCOMP_INSTANTIATE(BigFloat)
ERCOMP_INSTANTIATE(Rational)

#undef ERCOMP_INSTANTIATE

template double f_factor<double>(int, const double&, const double&, int);
template BigFloat f_factor<BigFloat>(int, const BigFloat&, const BigFloat&, int);

}  // namespace ercomp
