#include "ercomp/sbm_exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ercomp/errors.hpp"

namespace ercomp {

SbmParams::SbmParams(std::vector<int> label_counts, ProbMatrix p_matrix)
    : counts_(std::move(label_counts)), p_(std::move(p_matrix)) {
  if (counts_.empty()) throw InvalidInput("SBM needs at least one label");
  for (int c : counts_) {
    if (c < 0) throw InvalidInput("SBM label counts must be nonnegative");
    total_ += c;
  }
  if (total_ < 1) throw InvalidInput("SBM needs at least one vertex");
  const std::size_t l = counts_.size();
  if (p_.size() != l) throw InvalidInput("SBM probability matrix must be l x l");
  for (std::size_t i = 0; i < l; ++i) {
    if (p_[i].size() != l) throw InvalidInput("SBM probability matrix must be l x l");
    for (std::size_t j = 0; j < l; ++j) {
      if (p_[i][j] < 0 || p_[i][j] > 1) throw InvalidInput("SBM probabilities must lie in [0, 1]");
      if (p_[i][j] != p_[j][i]) throw InvalidInput("SBM probability matrix must be symmetric");
    }
  }
}

std::vector<std::vector<double>> SbmParams::p_double() const {
  std::vector<std::vector<double>> out(p_.size());
  for (std::size_t i = 0; i < p_.size(); ++i) {
    for (const auto& v : p_[i]) out[i].push_back(v.get_d());
  }
  return out;
}

SbmParams SbmParams::with_counts(std::vector<int> label_counts) const {
  return SbmParams(std::move(label_counts), p_);
}

std::string SbmParams::describe() const {
  std::ostringstream os;
  os << "n=(";
  for (std::size_t i = 0; i < counts_.size(); ++i) os << (i ? "," : "") << counts_[i];
  os << ") p=[";
  for (std::size_t i = 0; i < p_.size(); ++i) {
    os << (i ? ";" : "");
    for (std::size_t j = 0; j < p_.size(); ++j) os << (j ? "," : "") << p_[i][j].get_str();
  }
  os << "]";
  return os.str();
}

bool SbmShift::nonpositive() const noexcept {
  return std::all_of(J.begin(), J.end(), [](int v) { return v <= 0; });
}

long SbmShift::sum() const noexcept { return std::accumulate(J.begin(), J.end(), 0L); }

void validate_shift(const SbmParams& sbm, const SbmShift& shift) {
  if (shift.J.size() != sbm.counts().size()) throw DomainError("shift has the wrong length");
  for (std::size_t j = 0; j < shift.J.size(); ++j) {
    if (shift.J[j] < -sbm.counts()[j]) throw DomainError("shift needs J_j >= -n_j");
  }
  if (shift.sum() <= -sbm.total()) throw DomainError("shift needs sum J > -n");
}

template <Scalar T>
T SbmDist<T>::at(const LabelVector& k) const {
  const auto it = probs.find(k);
  return it == probs.end() ? T(0) : it->second;
}

namespace {

// All vectors with lo_j <= v_j <= hi_j in lexicographic order.
std::vector<LabelVector> box(const LabelVector& lo, const LabelVector& hi) {
  std::vector<LabelVector> out;
  LabelVector v = lo;
  const std::size_t l = lo.size();
  while (true) {
    out.push_back(v);
    std::size_t pos = l;
    while (pos > 0) {
      --pos;
      if (v[pos] < hi[pos]) {
        ++v[pos];
        for (std::size_t r = pos + 1; r < l; ++r) v[r] = lo[r];
        break;
      }
      if (pos == 0) return out;
    }
    if (l == 0) return out;
  }
}

void check_k(const std::vector<int>& counts, const LabelVector& k) {
  if (k.size() != counts.size()) throw DomainError("component vector has the wrong length");
  int total = 0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < 0 || k[j] > counts[j]) throw DomainError("component vector needs 0 <= k_j <= n_j");
    total += k[j];
  }
  if (total < 1) throw DomainError("component vector needs sum k >= 1");
}

template <Scalar T>
T q_power(const Rational& p, long exponent) {
  if (exponent == 0) return T(1);
  if (p == 1) {
    if (exponent < 0) throw DomainError("negative power of 1 - p at p = 1");
    return T(0);
  }
  return ipow(from_rational<T>(1 - p), exponent);
}

}  // namespace

std::vector<LabelVector> component_vectors(const std::vector<int>& counts) {
  const LabelVector lo(counts.size(), 0);
  auto all = box(lo, counts);
  all.erase(all.begin());  // the zero vector
  return all;
}

std::vector<LabelVector> nonpositive_shifts(const std::vector<int>& counts) {
  LabelVector lo(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) lo[j] = -counts[j];
  const LabelVector hi(counts.size(), 0);
  auto all = box(lo, hi);
  all.erase(all.begin());  // J = -n
  return all;
}

template <Scalar T>
T sbm_g_factor(const SbmParams& sbm, const SbmShift& shift, const LabelVector& k) {
  validate_shift(sbm, shift);
  check_k(sbm.counts(), k);
  const auto& n = sbm.counts();
  const int l = sbm.labels();
  for (int j = 0; j < l; ++j) {
    if (k[static_cast<std::size_t>(j)] > n[static_cast<std::size_t>(j)] + shift.J[static_cast<std::size_t>(j)]) {
      // Still reject the undefined p = 1 case before returning zero.
      for (int i = 0; i < l; ++i) {
        for (int jj = 0; jj < l; ++jj) {
          const long e = static_cast<long>(k[static_cast<std::size_t>(i)]) * shift.J[static_cast<std::size_t>(jj)];
          if (e < 0 && sbm.p(i, jj) == 1) throw DomainError("negative power of 1 - p at p = 1");
        }
      }
      return T(0);
    }
  }
  T value = T(1);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      const long e = static_cast<long>(k[static_cast<std::size_t>(i)]) * shift.J[static_cast<std::size_t>(j)];
      value *= q_power<T>(sbm.p(i, j), e);
    }
  }
  if constexpr (kIsExact<T>) {
    BigInt num = 1, den = 1;
    for (int j = 0; j < l; ++j) {
      const long nj = n[static_cast<std::size_t>(j)];
      const long jj = shift.J[static_cast<std::size_t>(j)];
      for (int i = 0; i < k[static_cast<std::size_t>(j)]; ++i) {
        num *= nj + jj - i;
        den *= nj - i;
      }
    }
    value *= ratio(num, den);
  } else {
    for (int j = 0; j < l; ++j) {
      const long nj = n[static_cast<std::size_t>(j)];
      const long jj = shift.J[static_cast<std::size_t>(j)];
      for (int i = 0; i < k[static_cast<std::size_t>(j)]; ++i) {
        value *= T(static_cast<double>(nj + jj - i));
        value /= T(static_cast<double>(nj - i));
      }
    }
  }
  return value;
}

template <Scalar T>
SbmDist<T> sbm_enumerate_dist(const SbmParams& sbm, const PrecisionCtx& /*ctx*/) {
  const int n = sbm.total();
  if (n > kSbmEnumerationCap) {
    throw ResourceError("SBM enumeration is capped at n = " + std::to_string(kSbmEnumerationCap) +
                        ", got " + std::to_string(n));
  }
  const int l = sbm.labels();
  const auto& counts = sbm.counts();

  // Pair types (a <= b) and their sizes, which do not depend on the labelling.
  std::vector<std::vector<int>> type_of(static_cast<std::size_t>(l), std::vector<int>(static_cast<std::size_t>(l)));
  std::vector<std::pair<int, int>> types;
  for (int a = 0; a < l; ++a) {
    for (int b = a; b < l; ++b) {
      type_of[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          type_of[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = static_cast<int>(types.size());
      types.emplace_back(a, b);
    }
  }
  std::vector<long> type_size(types.size());
  for (std::size_t t = 0; t < types.size(); ++t) {
    const long na = counts[static_cast<std::size_t>(types[t].first)];
    const long nb = counts[static_cast<std::size_t>(types[t].second)];
    type_size[t] = types[t].first == types[t].second ? na * (na - 1) / 2 : na * nb;
  }

  // Mixed-radix key: component vector digits (radix n_j + 1), then edge
  // counts per type (radix size + 1).
  std::vector<std::uint64_t> k_radix(static_cast<std::size_t>(l));
  std::uint64_t k_span = 1;
  for (int j = l - 1; j >= 0; --j) {
    k_radix[static_cast<std::size_t>(j)] = k_span;
    k_span *= static_cast<std::uint64_t>(counts[static_cast<std::size_t>(j)] + 1);
  }
  std::vector<std::uint64_t> e_radix(types.size());
  std::uint64_t e_span = 1;
  for (std::size_t t = types.size(); t-- > 0;) {
    e_radix[t] = e_span;
    e_span *= static_cast<std::uint64_t>(type_size[t] + 1);
  }
  std::unordered_map<std::uint64_t, std::uint64_t> tally;

  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  }
  const auto num_pairs = pairs.size();
  const std::uint64_t num_masks = std::uint64_t{1} << num_pairs;

  std::vector<int> labelling;
  for (int j = 0; j < l; ++j) labelling.insert(labelling.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), j);

  std::uint64_t num_labellings = 0;
  std::vector<std::uint32_t> type_masks(types.size());
  std::vector<std::uint32_t> label_masks(static_cast<std::size_t>(l));
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n));
  do {
    ++num_labellings;
    std::fill(type_masks.begin(), type_masks.end(), 0u);
    std::fill(label_masks.begin(), label_masks.end(), 0u);
    for (int v = 0; v < n; ++v) label_masks[static_cast<std::size_t>(labelling[static_cast<std::size_t>(v)])] |= 1u << v;
    for (std::size_t e = 0; e < num_pairs; ++e) {
      const int a = labelling[static_cast<std::size_t>(pairs[e].first)];
      const int b = labelling[static_cast<std::size_t>(pairs[e].second)];
      type_masks[static_cast<std::size_t>(type_of[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])] |= 1u << e;
    }
    for (std::uint64_t mask = 0; mask < num_masks; ++mask) {
      std::fill(adj.begin(), adj.end(), 0u);
      for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
        const auto e = static_cast<std::size_t>(std::countr_zero(bits));
        adj[static_cast<std::size_t>(pairs[e].first)] |= 1u << pairs[e].second;
        adj[static_cast<std::size_t>(pairs[e].second)] |= 1u << pairs[e].first;
      }
      std::uint32_t comp = 1u, frontier = 1u;
      while (frontier != 0) {
        std::uint32_t next = 0;
        for (std::uint32_t f = frontier; f != 0; f &= f - 1) next |= adj[static_cast<std::size_t>(std::countr_zero(f))];
        frontier = next & ~comp;
        comp |= next;
      }
      std::uint64_t key = 0;
      for (int j = 0; j < l; ++j) {
        key += static_cast<std::uint64_t>(std::popcount(comp & label_masks[static_cast<std::size_t>(j)])) *
               k_radix[static_cast<std::size_t>(j)];
      }
      key *= e_span;
      for (std::size_t t = 0; t < types.size(); ++t) {
        key += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint32_t>(mask) & type_masks[t])) * e_radix[t];
      }
      ++tally[key];
    }
  } while (std::next_permutation(labelling.begin(), labelling.end()));

  // Edge-pattern weights prod_t p_t^{e_t} (1 - p_t)^{m_t - e_t}, per type.
  std::vector<std::vector<T>> p_pow(types.size()), q_pow(types.size());
  for (std::size_t t = 0; t < types.size(); ++t) {
    const Rational& pr = sbm.p(types[t].first, types[t].second);
    const T pt = from_rational<T>(pr);
    const T qt = from_rational<T>(1 - pr);
    p_pow[t].assign(static_cast<std::size_t>(type_size[t] + 1), T(1));
    q_pow[t].assign(static_cast<std::size_t>(type_size[t] + 1), T(1));
    for (long e = 1; e <= type_size[t]; ++e) {
      p_pow[t][static_cast<std::size_t>(e)] = p_pow[t][static_cast<std::size_t>(e - 1)] * pt;
      q_pow[t][static_cast<std::size_t>(e)] = q_pow[t][static_cast<std::size_t>(e - 1)] * qt;
    }
  }

  SbmDist<T> dist;
  dist.counts = counts;
  for (const auto& k : component_vectors(counts)) dist.probs.emplace(k, T(0));
  for (const auto& [key, count] : tally) {
    const std::uint64_t k_index = key / e_span;
    std::uint64_t e_index = key % e_span;
    T weight = from_rational<T>(ratio(BigInt(std::to_string(count)), BigInt(std::to_string(num_labellings))));
    for (std::size_t t = 0; t < types.size(); ++t) {
      const auto e = static_cast<std::size_t>(e_index / e_radix[t]);
      e_index %= e_radix[t];
      weight *= p_pow[t][e] * q_pow[t][static_cast<std::size_t>(type_size[t]) - e];
    }
    LabelVector k(static_cast<std::size_t>(l));
    std::uint64_t rest = k_index;
    for (int j = 0; j < l; ++j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(rest / k_radix[static_cast<std::size_t>(j)]);
      rest %= k_radix[static_cast<std::size_t>(j)];
    }
    dist.probs[k] += weight;
  }
  return dist;
}

template <Scalar T>
IdentityCheck<T> sbm_verify_identity(const SbmParams& sbm, const SbmShift& shift,
                                     const PrecisionCtx& ctx) {
  validate_shift(sbm, shift);
  const SbmDist<T> dist = sbm_enumerate_dist<T>(sbm, ctx);
  T lhs = T(0);
  for (const auto& [k, pr] : dist.probs) lhs += sbm_g_factor<T>(sbm, shift, k) * pr;

  const long shifted_total = sbm.total() + shift.sum();
  T rhs = from_rational<T>(ratio(shifted_total, sbm.total()));
  if (!shift.nonpositive()) {
    std::vector<int> shifted(sbm.counts().size());
    for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] = sbm.counts()[j] + shift.J[j];
    const SbmDist<T> big = sbm_enumerate_dist<T>(sbm.with_counts(shifted), ctx);
    T inside = T(0);
    for (const auto& [k, pr] : big.probs) {
      bool fits = true;
      for (std::size_t j = 0; j < k.size(); ++j) fits = fits && k[j] <= sbm.counts()[j];
      if (fits) inside += pr;
    }
    rhs *= inside;
  }
  T diff = lhs - rhs;
  return {lhs, rhs, abs_value(diff)};
}

template <Scalar T>
IdentityCheck<T> sbm_verify_change_of_measure(const std::vector<int>& m_counts,
                                              const std::vector<int>& n_counts,
                                              const ProbMatrix& p, const LabelVector& k,
                                              const PrecisionCtx& ctx) {
  const SbmParams model_m(m_counts, p);
  const SbmParams model_n(n_counts, p);
  if (m_counts.size() != n_counts.size()) throw DomainError("label counts differ in length");
  check_k(n_counts, k);
  const int l = model_n.labels();

  bool k_fits_m = true;
  for (int j = 0; j < l; ++j) k_fits_m = k_fits_m && k[static_cast<std::size_t>(j)] <= m_counts[static_cast<std::size_t>(j)];
  T lhs = k_fits_m ? sbm_enumerate_dist<T>(model_m, ctx).at(k) : T(0);

  T rhs = sbm_enumerate_dist<T>(model_n, ctx).at(k);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      const long e = static_cast<long>(k[static_cast<std::size_t>(i)]) *
                     (m_counts[static_cast<std::size_t>(j)] - n_counts[static_cast<std::size_t>(j)]);
      rhs *= q_power<T>(model_n.p(i, j), e);
    }
  }
  rhs *= from_rational<T>(ratio(model_n.total(), model_m.total()));
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < k[static_cast<std::size_t>(j)]; ++i) {
      rhs *= from_rational<T>(ratio(m_counts[static_cast<std::size_t>(j)] - i,
                                       n_counts[static_cast<std::size_t>(j)] - i));
    }
  }
  T diff = lhs - rhs;
  return {lhs, rhs, abs_value(diff)};
}

SbmDist<Rational> sbm_recover_from_identities(const SbmParams& sbm) {
  const auto ks = component_vectors(sbm.counts());
  const auto js = nonpositive_shifts(sbm.counts());
  const std::size_t size = ks.size();
  if (js.size() != size) throw ConditioningError("shift system is not square");

  // Augmented matrix [A | b].
  std::vector<std::vector<Rational>> a(size, std::vector<Rational>(size + 1));
  for (std::size_t r = 0; r < size; ++r) {
    const SbmShift shift{js[r]};
    for (std::size_t c = 0; c < size; ++c) a[r][c] = sbm_g_factor<Rational>(sbm, shift, ks[c]);
    a[r][size] = ratio(sbm.total() + shift.sum(), sbm.total());
  }
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t pivot = col;
    while (pivot < size && a[pivot][col] == 0) ++pivot;
    if (pivot == size) throw ConditioningError("shift system is singular");
    std::swap(a[pivot], a[col]);
    for (std::size_t r = 0; r < size; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= size; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  SbmDist<Rational> dist;
  dist.counts = sbm.counts();
  for (std::size_t i = 0; i < size; ++i) dist.probs.emplace(ks[i], a[i][size] / a[i][i]);
  return dist;
}

template <Scalar T>
void write_csv(std::ostream& out, const SbmDist<T>& dist) {
  for (std::size_t j = 0; j < dist.counts.size(); ++j) out << "k_" << j + 1 << ',';
  out << "prob\n";
  for (const auto& [k, pr] : dist.probs) {
    for (int v : k) out << v << ',';
    out << format_scalar(pr) << '\n';
  }
}

#define ERCOMP_INSTANTIATE(T)                                                                 \
  template struct SbmDist<T>;                                                                \
  template T sbm_g_factor<T>(const SbmParams&, const SbmShift&, const LabelVector&);         \
  template SbmDist<T> sbm_enumerate_dist<T>(const SbmParams&, const PrecisionCtx&);          \
  template IdentityCheck<T> sbm_verify_identity<T>(const SbmParams&, const SbmShift&,        \
                                                   const PrecisionCtx&);                     \
  template IdentityCheck<T> sbm_verify_change_of_measure<T>(                                 \
      const std::vector<int>&, const std::vector<int>&, const ProbMatrix&, const LabelVector&, \
      const PrecisionCtx&);                                                                  \
  template void write_csv<T>(std::ostream&, const SbmDist<T>&);

ERCOMP_INSTANTIATE(double)
ERCOMP_INSTANTIATE(BigFloat)
ERCOMP_INSTANTIATE(Rational)

#undef ERCOMP_INSTANTIATE

}  // namespace ercomp
