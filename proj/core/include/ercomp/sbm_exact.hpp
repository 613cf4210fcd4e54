#pragma once

// Stochastic block model: vertices carry labels 1..l with prescribed label
// counts (n_1, ..., n_l), the labelling of [n] is uniform among those with
// these counts, and a label-i vertex is joined to a label-j vertex with
// probability p_ij. The object of interest is the label-wise size vector of
// the component of vertex 1.
//
// Label vectors (the set K(n) of component vectors and the set J<=0(n) of
// nonpositive shifts) are always listed in lexicographic order.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ercomp/er_exact.hpp"
#include "ercomp/numeric.hpp"

namespace ercomp {

using LabelVector = std::vector<int>;
using ProbMatrix = std::vector<std::vector<Rational>>;

class SbmParams {
 public:
  // Throws InvalidInput unless counts are nonnegative with a positive total
  // and p is a symmetric l x l matrix with entries in [0, 1].
  SbmParams(std::vector<int> label_counts, ProbMatrix p_matrix);

  int labels() const noexcept { return static_cast<int>(counts_.size()); }
  int total() const noexcept { return total_; }
  const std::vector<int>& counts() const noexcept { return counts_; }
  const ProbMatrix& p_matrix() const noexcept { return p_; }
  const Rational& p(int i, int j) const { return p_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)); }
  std::vector<std::vector<double>> p_double() const;

  // Same probabilities, different label counts.
  SbmParams with_counts(std::vector<int> label_counts) const;

  std::string describe() const;

 private:
  std::vector<int> counts_;
  ProbMatrix p_;
  int total_ = 0;
};

// Shift vector J with J_j >= -n_j and sum J > -n.
struct SbmShift {
  LabelVector J;

  bool nonpositive() const noexcept;
  long sum() const noexcept;
};

// Throws DomainError when the shift is not admissible for the counts.
void validate_shift(const SbmParams& sbm, const SbmShift& shift);

template <Scalar T>
struct SbmDist {
  std::vector<int> counts;
  // Every vector of K(counts), including impossible ones (probability 0).
  std::map<LabelVector, T> probs;

  T at(const LabelVector& k) const;
};

// K(n): 0 <= k_j <= n_j, sum k >= 1, lexicographic.
std::vector<LabelVector> component_vectors(const std::vector<int>& counts);
// J<=0(n): -n_j <= J_j <= 0, sum J > -n, lexicographic.
std::vector<LabelVector> nonpositive_shifts(const std::vector<int>& counts);

// prod_{i,j} (1 - p_ij)^{k_i J_j} * prod_j prod_{i<k_j} (n_j + J_j - i)/(n_j - i).
template <Scalar T>
T sbm_g_factor(const SbmParams& sbm, const SbmShift& shift, const LabelVector& k);

inline constexpr int kSbmEnumerationCap = 7;

// Exact joint law of the component vector of vertex 1 by exhaustive
// enumeration: every distinct labelling (uniform weight) times every edge
// subset. Edge subsets are tallied by (component vector, edges present per
// label pair) in integers, so the scalar type only enters at the end.
template <Scalar T>
SbmDist<T> sbm_enumerate_dist(const SbmParams& sbm, const PrecisionCtx& ctx);

// E[g(J, |C|)] under the model against
// (sum(n_j + J_j)/n) P_{n+J}[|C|_j <= n_j for all j].
template <Scalar T>
IdentityCheck<T> sbm_verify_identity(const SbmParams& sbm, const SbmShift& shift,
                                     const PrecisionCtx& ctx);

// P_M[|C| = k] against
//   P_N[|C| = k] prod_{i,j} (1 - p_ij)^{k_i (M_j - N_j)} (sum N / sum M)
//   prod_j prod_{i<k_j} (M_j - i)/(N_j - i),   k in K(N).
template <Scalar T>
IdentityCheck<T> sbm_verify_change_of_measure(const std::vector<int>& m_counts,
                                              const std::vector<int>& n_counts,
                                              const ProbMatrix& p, const LabelVector& k,
                                              const PrecisionCtx& ctx);

// Solves the square system indexed by J<=0(n) x K(n) for the joint law by
// exact Gaussian elimination. Throws ConditioningError if it is singular.
SbmDist<Rational> sbm_recover_from_identities(const SbmParams& sbm);

// CSV with header "k_1,...,k_l,prob".
template <Scalar T>
void write_csv(std::ostream& out, const SbmDist<T>& dist);

}  // namespace ercomp
