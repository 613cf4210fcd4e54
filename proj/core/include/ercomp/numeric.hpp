#pragma once

// Scalar types used by the exact computations.
//
//   double    machine binary64
//   BigFloat  MPFR float whose mantissa width is chosen at run time
//   Rational  GMP rational, exact
//
// Generic code is written once against the small helper set below
// (from_rational, ipow, to_double, format_scalar) and instantiated for all
// three types.

#include <mpfr.h>
#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace ercomp {

using Rational = mpq_class;
using BigInt = mpz_class;

class BigFloat {
 public:
  // Mantissa width (bits) given to values constructed on this thread without
  // an explicit precision. Initially 256.
  static unsigned default_bits() noexcept;

  // Sets the thread's default mantissa width for its lifetime.
  class PrecisionScope {
   public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

   private:
    unsigned saved_;
  };

  BigFloat();
  BigFloat(int v);
  BigFloat(long v);
  BigFloat(unsigned long v);
  BigFloat(double v);
  explicit BigFloat(const Rational& v);
  explicit BigFloat(const BigInt& v);
  // Parses a decimal literal at the default precision.
  explicit BigFloat(std::string_view literal);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  static BigFloat with_bits(unsigned bits);

  unsigned bits() const noexcept;
  // Copy rounded (or exactly widened) to the given mantissa width.
  BigFloat rounded(unsigned bits) const;

  double to_double() const noexcept;
  // Scientific notation with `digits` significant digits.
  std::string to_string(int digits) const;

  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }

  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get() noexcept { return v_; }

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator*=(long rhs);
  BigFloat& operator/=(long rhs);

  BigFloat operator-() const;

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);

  friend int compare(const BigFloat& a, const BigFloat& b) noexcept {
    return mpfr_cmp(a.v_, b.v_);
  }
  friend bool operator==(const BigFloat& a, const BigFloat& b) noexcept {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend bool operator<(const BigFloat& a, const BigFloat& b) noexcept {
    return mpfr_less_p(a.v_, b.v_) != 0;
  }
  friend bool operator>(const BigFloat& a, const BigFloat& b) noexcept { return b < a; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) noexcept {
    return mpfr_lessequal_p(a.v_, b.v_) != 0;
  }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) noexcept { return b <= a; }

 private:
  struct NoInit {};
  BigFloat(NoInit, unsigned bits);

  mpfr_t v_;
};

BigFloat exp(const BigFloat& x);
BigFloat expm1(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat log1p(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat abs(const BigFloat& x);
BigFloat pow(const BigFloat& base, long exponent);
BigFloat pow(const BigFloat& base, const BigFloat& exponent);
BigFloat lgamma(const BigFloat& x);

// ---------------------------------------------------------------------------
// Precision context

enum class Arithmetic { kDouble, kExtended, kRational };

struct PrecisionCtx {
  Arithmetic mode = Arithmetic::kDouble;
  unsigned bits = 53;
  // Comparison tolerance; 0 in rational mode.
  double tol = 1e-12;
  // Largest n accepted by component_dist / connectivity_prob.
  int exact_cap = 5000;
  // Largest n accepted by recover_dist.
  int recovery_cap = 300;
  // Largest n for which machine doubles are accepted by exact computations.
  int double_cap = 50;
  // Band [-recovery_band, 1 + recovery_band] a recovered probability must
  // fall in (float modes).
  double recovery_band = 1e-6;

  static PrecisionCtx machine_double(double tol = 1e-12);
  static PrecisionCtx extended(unsigned bits = 256);
  static PrecisionCtx exact_rational();
  // "double" | "ext" | "ext:<bits>" | "rational"
  static PrecisionCtx parse(std::string_view spec);

  std::string name() const;
  bool exact() const noexcept { return mode == Arithmetic::kRational; }
};

// ---------------------------------------------------------------------------
// Generic scalar helpers

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, BigFloat> ||
                 std::same_as<T, Rational>;

template <class T>
concept FloatScalar = std::same_as<T, double> || std::same_as<T, BigFloat>;

template <Scalar T>
inline constexpr bool kIsExact = std::same_as<T, Rational>;

template <Scalar T>
T from_rational(const Rational& q) {
  if constexpr (std::same_as<T, double>) {
    return q.get_d();
  } else if constexpr (std::same_as<T, BigFloat>) {
    return BigFloat(q);
  } else {
    return q;
  }
}

template <Scalar T>
T from_double(double v) {
  if constexpr (std::same_as<T, Rational>) {
    return Rational(v);
  } else {
    return T(v);
  }
}

double to_double(double v) noexcept;
double to_double(const BigFloat& v) noexcept;
double to_double(const Rational& v);

Rational ipow(const Rational& base, long exponent);
BigFloat ipow(const BigFloat& base, long exponent);
double ipow(double base, long exponent);

inline double abs_value(double v) { return v < 0 ? -v : v; }
inline BigFloat abs_value(const BigFloat& v) { return abs(v); }
inline Rational abs_value(const Rational& v) { return abs(v); }

// Decimal/fraction rendering: doubles with 17 significant digits, BigFloat
// with the digits its mantissa carries, rationals as num/den.
std::string format_scalar(double v);
std::string format_scalar(const BigFloat& v);
std::string format_scalar(const Rational& v);

// num/den in canonical form (gmpxx leaves two-argument construction
// uncanonicalized). Throws DomainError for den == 0.
Rational ratio(const BigInt& num, const BigInt& den);

// Parses "3/10", "0.3", "-1.25e-2", "7" exactly.
Rational parse_rational(std::string_view text);

// Exact binomial coefficient; zero outside 0 <= k <= n.
BigInt binomial(long n, long k);

// Runs `f.template operator()<T>()` with T chosen by the context's mode.
// Extended mode installs the context's mantissa width for the call.
template <class F>
decltype(auto) dispatch(const PrecisionCtx& ctx, F&& f) {
  switch (ctx.mode) {
    case Arithmetic::kDouble:
      return f.template operator()<double>();
    case Arithmetic::kExtended: {
      BigFloat::PrecisionScope scope(ctx.bits);
      return f.template operator()<BigFloat>();
    }
    case Arithmetic::kRational:
    default:
      return f.template operator()<Rational>();
  }
}

}  // namespace ercomp
