#include "ercomp/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ercomp/errors.hpp"

namespace ercomp {
namespace {

thread_local unsigned t_default_bits = 256;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

unsigned wider(const BigFloat& a, const BigFloat& b) {
  return std::max(a.bits(), b.bits());
}

}  // namespace

unsigned BigFloat::default_bits() noexcept { return t_default_bits; }

BigFloat::PrecisionScope::PrecisionScope(unsigned bits) : saved_(t_default_bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) {
    throw InvalidInput("mantissa width out of range: " + std::to_string(bits));
  }
  t_default_bits = bits;
  // Products of shift factors overflow the default MPFR exponent range for
  // p close to 1 at large n.
  mpfr_set_emin(mpfr_get_emin_min());
  mpfr_set_emax(mpfr_get_emax_max());
}

BigFloat::PrecisionScope::~PrecisionScope() { t_default_bits = saved_; }

BigFloat::BigFloat(NoInit, unsigned bits) { mpfr_init2(v_, bits); }

BigFloat::BigFloat() : BigFloat(NoInit{}, t_default_bits) { mpfr_set_zero(v_, 1); }
BigFloat::BigFloat(int v) : BigFloat(NoInit{}, t_default_bits) { mpfr_set_si(v_, v, kRnd); }
BigFloat::BigFloat(long v) : BigFloat(NoInit{}, t_default_bits) { mpfr_set_si(v_, v, kRnd); }
BigFloat::BigFloat(unsigned long v) : BigFloat(NoInit{}, t_default_bits) {
  mpfr_set_ui(v_, v, kRnd);
}
BigFloat::BigFloat(double v) : BigFloat(NoInit{}, t_default_bits) { mpfr_set_d(v_, v, kRnd); }
BigFloat::BigFloat(const Rational& v) : BigFloat(NoInit{}, t_default_bits) {
  mpfr_set_q(v_, v.get_mpq_t(), kRnd);
}
BigFloat::BigFloat(const BigInt& v) : BigFloat(NoInit{}, t_default_bits) {
  mpfr_set_z(v_, v.get_mpz_t(), kRnd);
}
BigFloat::BigFloat(std::string_view literal) : BigFloat(NoInit{}, t_default_bits) {
  std::string s(literal);
  if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    throw InvalidInput("not a decimal number: '" + s + "'");
  }
}

BigFloat::BigFloat(const BigFloat& other) : BigFloat(NoInit{}, other.bits()) {
  mpfr_set(v_, other.v_, kRnd);
}

BigFloat::BigFloat(BigFloat&& other) noexcept : BigFloat(NoInit{}, MPFR_PREC_MIN) {
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    if (bits() != other.bits()) mpfr_set_prec(v_, other.bits());
    mpfr_set(v_, other.v_, kRnd);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::with_bits(unsigned bits) {
  BigFloat r(NoInit{}, bits);
  mpfr_set_zero(r.v_, 1);
  return r;
}

unsigned BigFloat::bits() const noexcept { return static_cast<unsigned>(mpfr_get_prec(v_)); }

BigFloat BigFloat::rounded(unsigned bits) const {
  BigFloat r(NoInit{}, bits);
  mpfr_set(r.v_, v_, kRnd);
  return r;
}

double BigFloat::to_double() const noexcept { return mpfr_get_d(v_, kRnd); }

std::string BigFloat::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return "0";
  std::string fmt = "%." + std::to_string(std::max(digits - 1, 0)) + "Re";
  char* out = nullptr;
  mpfr_asprintf(&out, fmt.c_str(), v_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), kRnd);
  mpfr_add(v_, v_, rhs.v_, kRnd);
  return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), kRnd);
  mpfr_sub(v_, v_, rhs.v_, kRnd);
  return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), kRnd);
  mpfr_mul(v_, v_, rhs.v_, kRnd);
  return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), kRnd);
  mpfr_div(v_, v_, rhs.v_, kRnd);
  return *this;
}
BigFloat& BigFloat::operator*=(long rhs) {
  mpfr_mul_si(v_, v_, rhs, kRnd);
  return *this;
}
BigFloat& BigFloat::operator/=(long rhs) {
  mpfr_div_si(v_, v_, rhs, kRnd);
  return *this;
}

BigFloat BigFloat::operator-() const {
  BigFloat r(NoInit{}, bits());
  mpfr_neg(r.v_, v_, kRnd);
  return r;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::NoInit{}, wider(a, b));
  mpfr_add(r.v_, a.v_, b.v_, kRnd);
  return r;
}
BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::NoInit{}, wider(a, b));
  mpfr_sub(r.v_, a.v_, b.v_, kRnd);
  return r;
}
BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::NoInit{}, wider(a, b));
  mpfr_mul(r.v_, a.v_, b.v_, kRnd);
  return r;
}
BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::NoInit{}, wider(a, b));
  mpfr_div(r.v_, a.v_, b.v_, kRnd);
  return r;
}

namespace {

template <class Fn>
BigFloat unary(const BigFloat& x, Fn fn) {
  BigFloat r = BigFloat::with_bits(x.bits());
  fn(r.get(), x.get(), kRnd);
  return r;
}

}  // namespace

BigFloat exp(const BigFloat& x) { return unary(x, mpfr_exp); }
BigFloat expm1(const BigFloat& x) { return unary(x, mpfr_expm1); }
BigFloat log(const BigFloat& x) { return unary(x, mpfr_log); }
BigFloat log1p(const BigFloat& x) { return unary(x, mpfr_log1p); }
BigFloat sqrt(const BigFloat& x) { return unary(x, mpfr_sqrt); }
BigFloat abs(const BigFloat& x) { return unary(x, mpfr_abs); }

BigFloat lgamma(const BigFloat& x) {
  BigFloat r = BigFloat::with_bits(x.bits());
  int sign = 0;
  mpfr_lgamma(r.get(), &sign, x.get(), kRnd);
  return r;
}

BigFloat pow(const BigFloat& base, long exponent) {
  BigFloat r = BigFloat::with_bits(base.bits());
  mpfr_pow_si(r.get(), base.get(), exponent, kRnd);
  return r;
}

BigFloat pow(const BigFloat& base, const BigFloat& exponent) {
  BigFloat r = BigFloat::with_bits(wider(base, exponent));
  mpfr_pow(r.get(), base.get(), exponent.get(), kRnd);
  return r;
}

// ---------------------------------------------------------------------------

PrecisionCtx PrecisionCtx::machine_double(double tol) {
  PrecisionCtx ctx;
  ctx.mode = Arithmetic::kDouble;
  ctx.bits = 53;
  ctx.tol = tol;
  return ctx;
}

PrecisionCtx PrecisionCtx::extended(unsigned bits) {
  if (bits < 64) {
    throw InvalidInput("extended precision needs at least 64 mantissa bits, got " +
                       std::to_string(bits));
  }
  PrecisionCtx ctx;
  ctx.mode = Arithmetic::kExtended;
  ctx.bits = bits;
  ctx.tol = std::ldexp(1.0, -static_cast<int>(std::min(bits - 16, 1000u)));
  ctx.recovery_band = 1e-9;
  return ctx;
}

PrecisionCtx PrecisionCtx::exact_rational() {
  PrecisionCtx ctx;
  ctx.mode = Arithmetic::kRational;
  ctx.bits = 0;
  ctx.tol = 0.0;
  ctx.recovery_band = 0.0;
  return ctx;
}

PrecisionCtx PrecisionCtx::parse(std::string_view spec) {
  if (spec == "double") return machine_double();
  if (spec == "rational") return exact_rational();
  if (spec == "ext") return extended();
  if (spec.starts_with("ext:")) {
    std::string digits(spec.substr(4));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](unsigned char c) { return std::isdigit(c); })) {
      throw InvalidInput("bad precision '" + std::string(spec) + "'");
    }
    return extended(static_cast<unsigned>(std::stoul(digits)));
  }
  throw InvalidInput("unknown precision '" + std::string(spec) +
                     "' (expected double | ext:<bits> | rational)");
}

std::string PrecisionCtx::name() const {
  switch (mode) {
    case Arithmetic::kDouble:
      return "double";
    case Arithmetic::kExtended:
      return "ext:" + std::to_string(bits);
    case Arithmetic::kRational:
      return "rational";
  }
  return "?";
}

// ---------------------------------------------------------------------------

double to_double(double v) noexcept { return v; }
double to_double(const BigFloat& v) noexcept { return v.to_double(); }
double to_double(const Rational& v) { return v.get_d(); }

Rational ipow(const Rational& base, long exponent) {
  const unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  if (exponent < 0 && base == 0) throw DomainError("zero raised to a negative power");
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r = exponent < 0 ? Rational(den, num) : Rational(num, den);
  r.canonicalize();
  return r;
}

BigFloat ipow(const BigFloat& base, long exponent) {
  if (exponent < 0 && base.is_zero()) throw DomainError("zero raised to a negative power");
  return pow(base, exponent);
}

double ipow(double base, long exponent) {
  if (exponent < 0 && base == 0.0) throw DomainError("zero raised to a negative power");
  return std::pow(base, static_cast<double>(exponent));
}

std::string format_scalar(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_scalar(const BigFloat& v) {
  // Digits carried by the mantissa, rounded down.
  const int digits = std::max(1, static_cast<int>(v.bits() * 0.30102999566398120));
  return v.to_string(digits);
}

std::string format_scalar(const Rational& v) { return v.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw InvalidInput("empty number");
  if (s.find('/') != std::string::npos) {
    const auto slash = s.find('/');
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
    Rational r = num / den;
    r.canonicalize();
    return r;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InvalidInput("not a number: '" + std::string(text) + "'");
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') {
      throw InvalidInput("not a number: '" + std::string(text) + "'");
    }
    const std::string rest = s.substr(pos + 1);
    std::size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad exponent in '" + std::string(text) + "'");
    }
    if (used != rest.size()) throw InvalidInput("bad exponent in '" + std::string(text) + "'");
  }
  BigInt mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long shift = exponent - scale;
  BigInt ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift < 0 ? Rational(mantissa, ten_pow) : Rational(mantissa * ten_pow, 1);
  r.canonicalize();
  return r;
}

Rational ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

BigInt binomial(long n, long k) {
  BigInt r;
  if (n < 0 || k < 0 || k > n) return r;  // zero
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

}  // namespace ercomp
