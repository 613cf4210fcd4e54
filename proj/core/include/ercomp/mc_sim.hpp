#pragma once

// Seeded Monte Carlo for G(n,p), the rigid representation of |C| and the
// stochastic block model. Replica i always draws from
// Xoshiro256pp::for_replica(master_seed, i), and summaries are built from
// integer tallies, so results do not depend on the thread count.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "ercomp/er_exact.hpp"
#include "ercomp/rng.hpp"
#include "ercomp/sbm_exact.hpp"
#include "ercomp/union_find.hpp"

namespace ercomp {

struct ComponentSample {
  int size_of_vertex1 = 0;
  int largest = 0;
  int second_largest = 0;  // 0 when there is a single component

  friend bool operator==(const ComponentSample&, const ComponentSample&) = default;
};

// Visits the present edges of G(n,p) in row-major upper-triangle order by
// geometric skipping. p = 1 visits every pair.
template <class F>
void for_each_gnp_edge(int n, double p, Xoshiro256pp& rng, F&& visit) {
  if (n < 2 || !(p > 0.0)) return;
  if (p >= 1.0) {
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) visit(u, v);
    }
    return;
  }
  const auto pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const double log_q = std::log1p(-p);
  std::int64_t pos = -1;
  int row = 0;
  std::int64_t row_start = 0;                // index of pair (row, row + 1)
  std::int64_t row_end = n - 1;              // one past the last pair of row
  while (true) {
    const double skip = std::floor(std::log1p(-rng.uniform()) / log_q);
    if (skip >= static_cast<double>(pairs - pos - 1)) return;
    pos += static_cast<std::int64_t>(skip) + 1;
    while (pos >= row_end) {
      ++row;
      row_start = row_end;
      row_end += n - 1 - row;
    }
    visit(row, row + 1 + static_cast<int>(pos - row_start));
  }
}

// Sizes from a finished union-find: vertex 0's component and the two
// largest components (ties reported as they are).
ComponentSample summarize_components(UnionFind& uf);

// Components of a fixed edge list on n vertices.
ComponentSample components_of(int n, std::span<const std::pair<int, int>> edges);

ComponentSample sample_components(int n, double p, Xoshiro256pp& rng, UnionFind& workspace);
ComponentSample sample_components(const GnpParams& params, Xoshiro256pp& rng);

// First k with sum_{i<=k} (t - X_i) < 0, X_i exponential with rate 1 - i/n.
// X_n has rate 0 (infinite), so the result is at most n.
int rigid_sample(int n, double t, Xoshiro256pp& rng);

struct SbmSample {
  LabelVector component_vector_of_vertex1;
  int largest = 0;
};

SbmSample sample_sbm(const SbmParams& sbm, Xoshiro256pp& rng);

struct RngSpec {
  std::uint64_t master_seed = 0;
  static constexpr const char* algorithm = kRngAlgorithm;
};

struct GnpTask {
  int n = 1;
  double p = 0.0;
};
struct RigidTask {
  int n = 1;
  double t = 0.0;
};
struct SbmTask {
  SbmParams sbm;
};
using SamplerTask = std::variant<GnpTask, RigidTask, SbmTask>;

// Exact integer moments of a nonnegative integer statistic.
struct Moments {
  std::uint64_t count = 0;
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;

  void add(std::uint64_t x) noexcept {
    ++count;
    sum += x;
    sum_sq += static_cast<unsigned __int128>(x) * x;
  }
  void merge(const Moments& o) noexcept {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const noexcept;
  // Unbiased sample variance (0 for fewer than two observations).
  double variance() const noexcept;

  friend bool operator==(const Moments&, const Moments&) = default;
};

struct ReplicaOptions {
  int threads = 1;
  bool keep_raw = false;
  std::size_t memory_budget_bytes = std::size_t{1} << 28;
};

// For G(n,p) tasks all three statistics are filled. Rigid tasks fill only
// size_of_vertex1 (raw samples carry 0 for the other two). SBM tasks put
// the total component size in size_of_vertex1, the largest component in
// largest, and tally the joint component vector in sbm_vectors.
struct EmpiricalSummary {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> size1_hist;    // index = size, length n + 1
  std::vector<std::uint64_t> largest_hist;
  std::vector<std::uint64_t> second_hist;
  Moments size1;
  Moments largest;
  Moments second;
  std::map<LabelVector, std::uint64_t> sbm_vectors;
  std::vector<ComponentSample> raw;          // indexed by replica when kept
  std::vector<LabelVector> raw_sbm;

  bool operator==(const EmpiricalSummary&) const = default;
};

// Throws InvalidInput for count < 1 or threads < 1, and ResourceError when
// keep_raw would exceed the memory budget.
EmpiricalSummary run_replicas(const SamplerTask& task, std::uint64_t count, const RngSpec& spec,
                              const ReplicaOptions& options = {});

// CSV with header "replica,size1,largest,second".
void write_raw_csv(std::ostream& out, std::span<const ComponentSample> raw);

}  // namespace ercomp
