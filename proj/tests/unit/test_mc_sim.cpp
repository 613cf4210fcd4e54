#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "ercomp/errors.hpp"
#include "ercomp/mc_sim.hpp"
#include "ercomp/stats.hpp"
#include "oracles.hpp"

using namespace ercomp;

namespace {

void expect_structure(const ComponentSample& s, int n) {
  EXPECT_GE(s.size_of_vertex1, 1);
  EXPECT_LE(s.size_of_vertex1, s.largest);
  EXPECT_LE(s.largest, n);
  EXPECT_LE(s.second_largest, s.largest);
  EXPECT_LE(s.largest + s.second_largest, n);
}

std::vector<double> exact_law(int n, const Rational& p) {
  const auto d = component_dist_p(n, p, PrecisionCtx::exact_rational());
  std::vector<double> out{0.0};
  for (const auto& x : d.probs) out.push_back(x.get_d());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator

TEST(Rng, ReplicaStreamsAreReproducible) {
  auto a = Xoshiro256pp::for_replica(99, 5);
  auto b = Xoshiro256pp(stream_seed(99, 5));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  auto c = Xoshiro256pp::for_replica(99, 6);
  auto d = Xoshiro256pp::for_replica(99, 5);
  EXPECT_NE(c(), d());
}

TEST(Rng, UniformAndBelowStayInRange) {
  Xoshiro256pp rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7U);
  }
}

TEST(Rng, ExponentialMean) {
  Xoshiro256pp rng(11);
  const int r = 200000;
  double sum = 0.0;
  for (int i = 0; i < r; ++i) sum += rng.exponential(4.0);
  // Mean 1/4, standard deviation 1/4.
  EXPECT_NEAR(sum / r, 0.25, 5 * 0.25 / std::sqrt(r));
}

// ---------------------------------------------------------------------------
// Union-find against breadth-first search

TEST(UnionFind, MatchesBfsOnRandomGraphs) {
  Xoshiro256pp rng(1234);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const double density = rng.uniform() * 4.0 / n;
    std::vector<oracle::Edge> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.uniform() < density) edges.emplace_back(u, v);
      }
    }
    const auto sizes = oracle::bfs_sizes(n, edges);
    const auto labels = oracle::bfs_labels(n, edges);
    const auto s = components_of(n, edges);
    EXPECT_EQ(s.largest, sizes[0]);
    EXPECT_EQ(s.second_largest, sizes.size() > 1 ? sizes[1] : 0);
    EXPECT_EQ(s.size_of_vertex1, std::count(labels.begin(), labels.end(), labels[0]));

    UnionFind uf(n);
    for (auto [u, v] : edges) uf.unite(u, v);
    for (int v = 0; v < n; ++v) {
      for (int w = v + 1; w < n; ++w) {
        EXPECT_EQ(uf.find(v) == uf.find(w), labels[static_cast<std::size_t>(v)] == labels[static_cast<std::size_t>(w)]);
      }
    }
  }
}

TEST(UnionFind, TiesAreReportedAsIs) {
  const std::vector<std::pair<int, int>> edges{{0, 1}, {2, 3}};
  const auto s = components_of(4, edges);
  EXPECT_EQ(s.largest, 2);
  EXPECT_EQ(s.second_largest, 2);
  EXPECT_THROW(components_of(3, std::vector<std::pair<int, int>>{{0, 3}}), InvalidInput);
}

// ---------------------------------------------------------------------------
// Edge sampling

TEST(GeometricSkip, VisitsDistinctOrderedPairs) {
  Xoshiro256pp rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::set<std::pair<int, int>> seen;
    std::pair<int, int> last{-1, -1};
    for_each_gnp_edge(20, 0.3, rng, [&](int u, int v) {
      EXPECT_LT(u, v);
      EXPECT_GE(u, 0);
      EXPECT_LT(v, 20);
      EXPECT_LT(last, std::make_pair(u, v));
      last = {u, v};
      EXPECT_TRUE(seen.insert({u, v}).second);
    });
  }
}

TEST(GeometricSkip, EdgeCountMean) {
  for (auto [n, p] : {std::pair{40, 0.1}, std::pair{300, 0.01}, std::pair{7, 0.9}}) {
    Xoshiro256pp rng(77);
    const int reps = 20000;
    const double pairs = n * (n - 1) / 2.0;
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
      long count = 0;
      for_each_gnp_edge(n, p, rng, [&](int, int) { ++count; });
      total += static_cast<double>(count);
    }
    const double se = std::sqrt(pairs * p * (1 - p) / reps);
    EXPECT_NEAR(total / reps, p * pairs, 5 * se) << n << ' ' << p;
  }
}

TEST(GeometricSkip, EveryPairHasTheRightMarginal) {
  const int n = 6;
  const double p = 0.35;
  const int reps = 100000;
  std::vector<int> hits(n * n, 0);
  Xoshiro256pp rng(8);
  for (int r = 0; r < reps; ++r) for_each_gnp_edge(n, p, rng, [&](int u, int v) { ++hits[u * n + v]; });
  const double se = std::sqrt(p * (1 - p) / reps);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) EXPECT_NEAR(hits[u * n + v] / static_cast<double>(reps), p, 5 * se);
  }
}

// ---------------------------------------------------------------------------
// G(n,p) sampler

TEST(SampleComponents, EmptyAndCompleteGraphs) {
  Xoshiro256pp rng(1);
  UnionFind ws;
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(sample_components(9, 0.0, rng, ws), (ComponentSample{1, 1, 1}));
    EXPECT_EQ(sample_components(9, 1.0, rng, ws), (ComponentSample{9, 9, 0}));
  }
  EXPECT_EQ(sample_components(1, 0.5, rng, ws), (ComponentSample{1, 1, 0}));
  EXPECT_THROW(sample_components(5, 1.5, rng, ws), InvalidInput);
}

TEST(SampleComponents, StructuralInvariants) {
  Xoshiro256pp rng(42);
  UnionFind ws;
  for (int i = 0; i < 2000; ++i) {
    const int n = 1 + static_cast<int>(rng.below(200));
    expect_structure(sample_components(n, std::min(1.0, 1.5 / n), rng, ws), n);
  }
}

TEST(SampleComponents, LawMatchesExactDistribution) {
  const int n = 30;
  const auto s = run_replicas(GnpTask{n, 0.05}, 100000, RngSpec{31});
  const auto emp = empirical_probs(s.size1_hist);
  EXPECT_LE(total_variation(emp, exact_law(n, ratio(1, 20))), 0.01);
}

// ---------------------------------------------------------------------------
// Rigid representation

TEST(Rigid, SingleVertexIsAlwaysOne) {
  Xoshiro256pp rng(4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rigid_sample(1, 3.0, rng), 1);
}

TEST(Rigid, NeverExceedsN) {
  Xoshiro256pp rng(4);
  for (int i = 0; i < 5000; ++i) {
    const int k = rigid_sample(10, 50.0, rng);
    EXPECT_GE(k, 1);
    EXPECT_LE(k, 10);
  }
}

TEST(Rigid, LawMatchesExactDistribution) {
  const int n = 40;
  const auto s = run_replicas(RigidTask{n, 0.5}, 100000, RngSpec{5});
  const auto ctx = PrecisionCtx::extended(128);
  BigFloat::PrecisionScope scope(ctx.bits);
  const auto d = component_dist<BigFloat>(GnpParams::from_t(n, ratio(1, 2)), ctx);
  std::vector<double> probs;
  for (const auto& x : d.probs) probs.push_back(x.to_double());
  const std::vector<std::uint64_t> obs(s.size1_hist.begin() + 1, s.size1_hist.end());
  EXPECT_GE(chi_square_gof(obs, probs).p_value, 1e-4);
}

TEST(Rigid, RejectsBadIntensity) {
  Xoshiro256pp rng(4);
  EXPECT_THROW(rigid_sample(5, 0.0, rng), InvalidInput);
  EXPECT_THROW(rigid_sample(0, 1.0, rng), InvalidInput);
}

// ---------------------------------------------------------------------------
// Block model sampler

TEST(SampleSbm, SingleLabelMatchesErdosRenyi) {
  const SbmParams sbm({6}, {{ratio(3, 10)}});
  const auto s = run_replicas(SbmTask{sbm}, 100000, RngSpec{9});
  const auto emp = empirical_probs(s.size1_hist);
  EXPECT_LE(total_variation(emp, exact_law(6, ratio(3, 10))), 0.02);
}

TEST(SampleSbm, HomogeneousMatrixMatchesErdosRenyi) {
  const Rational p = ratio(2, 5);
  const SbmParams sbm({3, 3}, {{p, p}, {p, p}});
  const auto s = run_replicas(SbmTask{sbm}, 100000, RngSpec{10});
  const auto emp = empirical_probs(s.size1_hist);
  EXPECT_LE(total_variation(emp, exact_law(6, p)), 0.02);
}

TEST(SampleSbm, JointLawMatchesEnumeration) {
  const ProbMatrix pm{{ratio(1, 2), ratio(1, 3)}, {ratio(1, 3), ratio(1, 4)}};
  const SbmParams sbm({3, 2}, pm);
  const auto s = run_replicas(SbmTask{sbm}, 100000, RngSpec{12});
  const auto law = oracle::enumerate_sbm({3, 2}, pm);
  double tv = 0.0;
  std::set<LabelVector> keys(law.vectors.begin(), law.vectors.end());
  for (const auto& [k, c] : s.sbm_vectors) keys.insert(k);
  for (const auto& k : keys) {
    const auto it = s.sbm_vectors.find(k);
    const double emp = it == s.sbm_vectors.end() ? 0.0 : static_cast<double>(it->second) / s.count;
    tv += std::fabs(emp - law.at(k).get_d());
  }
  EXPECT_LE(0.5 * tv, 0.02);
}

TEST(SampleSbm, VectorSumsToTotalSize) {
  const SbmParams sbm({2, 3, 1}, {{ratio(1, 2), ratio(1, 5), 0}, {ratio(1, 5), ratio(1, 3), 1}, {0, 1, 0}});
  Xoshiro256pp rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto s = sample_sbm(sbm, rng);
    ASSERT_EQ(s.component_vector_of_vertex1.size(), 3U);
    int total = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_LE(s.component_vector_of_vertex1[j], sbm.counts()[j]);
      total += s.component_vector_of_vertex1[j];
    }
    EXPECT_GE(total, 1);
    EXPECT_LE(total, s.largest);
  }
}

// ---------------------------------------------------------------------------
// Replica driver

TEST(Replicas, SingleReplicaUsesStreamZero) {
  ReplicaOptions opt;
  opt.keep_raw = true;
  const auto s = run_replicas(GnpTask{100, 0.02}, 1, RngSpec{555}, opt);
  auto rng = Xoshiro256pp::for_replica(555, 0);
  UnionFind ws;
  ASSERT_EQ(s.raw.size(), 1U);
  EXPECT_EQ(s.raw[0], sample_components(100, 0.02, rng, ws));
}

TEST(Replicas, ThreadCountDoesNotChangeResults) {
  ReplicaOptions one;
  one.keep_raw = true;
  ReplicaOptions many = one;
  many.threads = 3;
  for (const SamplerTask& task :
       {SamplerTask{GnpTask{200, 0.006}}, SamplerTask{RigidTask{80, 0.9}},
        SamplerTask{SbmTask{SbmParams({2, 2}, {{ratio(1, 2), ratio(1, 3)}, {ratio(1, 3), ratio(1, 4)}})}}}) {
    const auto a = run_replicas(task, 1001, RngSpec{77}, one);
    const auto b = run_replicas(task, 1001, RngSpec{77}, many);
    EXPECT_TRUE(a == b);
  }
}

TEST(Replicas, MomentsMatchHistogram) {
  const auto s = run_replicas(GnpTask{50, 0.03}, 5000, RngSpec{3});
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < s.size1_hist.size(); ++k) {
    sum += static_cast<double>(k * s.size1_hist[k]);
    sq += static_cast<double>(k * k * s.size1_hist[k]);
  }
  EXPECT_EQ(s.size1.count, 5000U);
  EXPECT_DOUBLE_EQ(s.size1.mean(), sum / 5000);
  EXPECT_NEAR(s.size1.variance(), (sq - sum * sum / 5000) / 4999, 1e-9);
}

TEST(Replicas, MemoryBudgetAndValidation) {
  ReplicaOptions opt;
  opt.keep_raw = true;
  opt.memory_budget_bytes = 1024;
  EXPECT_THROW(run_replicas(GnpTask{10, 0.1}, 100000, RngSpec{1}, opt), ResourceError);
  EXPECT_THROW(run_replicas(GnpTask{10, 0.1}, 0, RngSpec{1}), InvalidInput);
  ReplicaOptions bad;
  bad.threads = 0;
  EXPECT_THROW(run_replicas(GnpTask{10, 0.1}, 10, RngSpec{1}, bad), InvalidInput);
}

TEST(Replicas, RawCsvHeader) {
  std::ostringstream out;
  const std::vector<ComponentSample> raw{{3, 4, 1}};
  write_raw_csv(out, raw);
  EXPECT_EQ(out.str(), "replica,size1,largest,second\n0,3,4,1\n");
}
