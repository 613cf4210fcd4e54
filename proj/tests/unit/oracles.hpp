#pragma once

// Brute-force references shared by the unit tests. Nothing here calls into
// the library's recursions, so agreement is a genuine cross-check.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Rational = mpq_class;
using Edge = std::pair<int, int>;

inline Rational rpow(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// All unordered pairs of 0..n-1 in a fixed order.
inline std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> pairs;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  }
  return pairs;
}

// Component label of every vertex by breadth-first search.
inline std::vector<int> bfs_labels(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[static_cast<std::size_t>(s)] = next;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = next;
          q.push(w);
        }
      }
    }
    ++next;
  }
  return label;
}

// Component sizes sorted descending.
inline std::vector<int> bfs_sizes(int n, const std::vector<Edge>& edges) {
  const auto label = bfs_labels(n, edges);
  std::vector<int> sizes(static_cast<std::size_t>(n), 0);
  for (int l : label) ++sizes[static_cast<std::size_t>(l)];
  sizes.erase(std::remove(sizes.begin(), sizes.end(), 0), sizes.end());
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

// Law of the component size of vertex 0 in G(n, p) over all 2^(n choose 2)
// graphs; entry k-1 holds P[|C| = k].
inline std::vector<Rational> enumerate_component_law(int n, const Rational& p) {
  const auto pairs = all_pairs(n);
  const int m = static_cast<int>(pairs.size());
  const Rational q = 1 - p;
  std::vector<Rational> law(static_cast<std::size_t>(n), 0);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    std::vector<Edge> edges;
    for (int e = 0; e < m; ++e) {
      if (mask >> e & 1U) edges.push_back(pairs[static_cast<std::size_t>(e)]);
    }
    const auto label = bfs_labels(n, edges);
    const auto size = std::count(label.begin(), label.end(), label[0]);
    const int present = static_cast<int>(edges.size());
    law[static_cast<std::size_t>(size - 1)] += rpow(p, present) * rpow(q, m - present);
  }
  return law;
}

// Probability that G(k, p) is connected, by enumeration.
inline Rational enumerate_connected(int k, const Rational& p) {
  return enumerate_component_law(k, p).back();
}

// Joint law of the label-wise component vector of vertex 0 in a block
// model, averaging over all n! vertex orderings of the label multiset (each
// distinct labelling is hit equally often, so this is the uniform labelling).
struct SbmLaw {
  std::vector<std::vector<int>> vectors;
  std::vector<Rational> probs;

  Rational at(const std::vector<int>& k) const {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i] == k) return probs[i];
    }
    return 0;
  }
};

inline SbmLaw enumerate_sbm(const std::vector<int>& counts,
                            const std::vector<std::vector<Rational>>& p) {
  const int labels = static_cast<int>(counts.size());
  std::vector<int> base;
  for (int j = 0; j < labels; ++j) base.insert(base.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), j);
  const int n = static_cast<int>(base.size());
  const auto pairs = all_pairs(n);
  const int m = static_cast<int>(pairs.size());

  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  SbmLaw law;
  long orderings = 0;
  do {
    ++orderings;
    std::vector<int> lab(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) lab[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
      Rational w = 1;
      std::vector<Edge> edges;
      for (int e = 0; e < m; ++e) {
        auto [u, v] = pairs[static_cast<std::size_t>(e)];
        const Rational& puv = p[static_cast<std::size_t>(lab[static_cast<std::size_t>(u)])][static_cast<std::size_t>(lab[static_cast<std::size_t>(v)])];
        if (mask >> e & 1U) {
          w *= puv;
          edges.emplace_back(u, v);
        } else {
          w *= 1 - puv;
        }
      }
      if (w == 0) continue;
      const auto comp = bfs_labels(n, edges);
      std::vector<int> k(static_cast<std::size_t>(labels), 0);
      for (int v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] == comp[0]) ++k[static_cast<std::size_t>(lab[static_cast<std::size_t>(v)])];
      }
      bool found = false;
      for (std::size_t i = 0; i < law.vectors.size(); ++i) {
        if (law.vectors[i] == k) {
          law.probs[i] += w;
          found = true;
          break;
        }
      }
      if (!found) {
        law.vectors.push_back(k);
        law.probs.push_back(w);
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& pr : law.probs) pr /= orderings;
  return law;
}

}  // namespace oracle
