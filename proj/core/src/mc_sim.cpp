#include "ercomp/mc_sim.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <thread>

#include "ercomp/errors.hpp"

namespace ercomp {

ComponentSample summarize_components(UnionFind& uf) {
  ComponentSample s;
  if (uf.size() == 0) return s;
  s.size_of_vertex1 = uf.component_size(0);
  for (int v = 0; v < uf.size(); ++v) {
    if (!uf.is_root(v)) continue;
    const int size = uf.root_size(v);
    if (size > s.largest) {
      s.second_largest = s.largest;
      s.largest = size;
    } else if (size > s.second_largest) {
      s.second_largest = size;
    }
  }
  return s;
}

ComponentSample components_of(int n, std::span<const std::pair<int, int>> edges) {
  if (n < 1) throw InvalidInput("graph needs n >= 1");
  UnionFind uf(n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidInput("edge endpoint out of range");
    uf.unite(u, v);
  }
  return summarize_components(uf);
}

ComponentSample sample_components(int n, double p, Xoshiro256pp& rng, UnionFind& workspace) {
  if (n < 1) throw InvalidInput("G(n,p) needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("G(n,p) needs 0 <= p <= 1");
  if (p == 1.0) return {n, n, 0};
  workspace.reset(n);
  for_each_gnp_edge(n, p, rng, [&](int u, int v) { workspace.unite(u, v); });
  return summarize_components(workspace);
}

ComponentSample sample_components(const GnpParams& params, Xoshiro256pp& rng) {
  UnionFind uf;
  return sample_components(params.n(), params.p<double>(), rng, uf);
}

int rigid_sample(int n, double t, Xoshiro256pp& rng) {
  if (n < 1) throw InvalidInput("rigid sampler needs n >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("rigid sampler needs t > 0");
  double walk = 0.0;
  for (int k = 1; k < n; ++k) {
    const double rate = static_cast<double>(n - k) / static_cast<double>(n);
    walk += t - rng.exponential(rate);
    if (walk < 0.0) return k;
  }
  return n;
}

SbmSample sample_sbm(const SbmParams& sbm, Xoshiro256pp& rng) {
  const int n = sbm.total();
  std::vector<int> label;
  label.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < sbm.labels(); ++j) {
    label.insert(label.end(), static_cast<std::size_t>(sbm.counts()[static_cast<std::size_t>(j)]), j);
  }
  for (std::size_t i = label.size(); i > 1; --i) {
    std::swap(label[i - 1], label[rng.below(i)]);
  }
  const auto p = sbm.p_double();
  UnionFind uf(n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform() < p[static_cast<std::size_t>(label[static_cast<std::size_t>(u)])]
                           [static_cast<std::size_t>(label[static_cast<std::size_t>(v)])]) {
        uf.unite(u, v);
      }
    }
  }
  SbmSample s;
  s.component_vector_of_vertex1.assign(static_cast<std::size_t>(sbm.labels()), 0);
  const int root = uf.find(0);
  for (int v = 0; v < n; ++v) {
    if (uf.find(v) == root) ++s.component_vector_of_vertex1[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])];
  }
  s.largest = summarize_components(uf).largest;
  return s;
}

double Moments::mean() const noexcept {
  return count == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(count);
}

double Moments::variance() const noexcept {
  if (count < 2) return 0.0;
  // count * sum_sq - sum^2 is an exact nonnegative integer.
  const unsigned __int128 s = sum;
  const unsigned __int128 num = static_cast<unsigned __int128>(count) * sum_sq - s * s;
  const double c = static_cast<double>(count);
  return static_cast<double>(num) / (c * (c - 1.0));
}

namespace {

int task_size(const SamplerTask& task) {
  return std::visit(
      [](const auto& t) -> int {
        using Task = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<Task, SbmTask>) {
          return t.sbm.total();
        } else {
          return t.n;
        }
      },
      task);
}

void validate_task(const SamplerTask& task) {
  if (const auto* g = std::get_if<GnpTask>(&task)) {
    if (g->n < 1) throw InvalidInput("G(n,p) needs n >= 1");
    if (!(g->p >= 0.0 && g->p <= 1.0)) throw InvalidInput("G(n,p) needs 0 <= p <= 1");
  } else if (const auto* r = std::get_if<RigidTask>(&task)) {
    if (r->n < 1) throw InvalidInput("rigid sampler needs n >= 1");
    if (!(r->t > 0.0) || !std::isfinite(r->t)) throw InvalidInput("rigid sampler needs t > 0");
  }
}

EmpiricalSummary empty_summary(int n) {
  EmpiricalSummary s;
  const auto len = static_cast<std::size_t>(n) + 1;
  s.size1_hist.assign(len, 0);
  s.largest_hist.assign(len, 0);
  s.second_hist.assign(len, 0);
  return s;
}

void record(EmpiricalSummary& s, const ComponentSample& c, bool has_largest, bool has_second) {
  ++s.count;
  ++s.size1_hist[static_cast<std::size_t>(c.size_of_vertex1)];
  s.size1.add(static_cast<std::uint64_t>(c.size_of_vertex1));
  if (has_largest) {
    ++s.largest_hist[static_cast<std::size_t>(c.largest)];
    s.largest.add(static_cast<std::uint64_t>(c.largest));
  }
  if (has_second) {
    ++s.second_hist[static_cast<std::size_t>(c.second_largest)];
    s.second.add(static_cast<std::uint64_t>(c.second_largest));
  }
}

void merge_into(EmpiricalSummary& into, const EmpiricalSummary& part) {
  into.count += part.count;
  for (std::size_t i = 0; i < into.size1_hist.size(); ++i) {
    into.size1_hist[i] += part.size1_hist[i];
    into.largest_hist[i] += part.largest_hist[i];
    into.second_hist[i] += part.second_hist[i];
  }
  into.size1.merge(part.size1);
  into.largest.merge(part.largest);
  into.second.merge(part.second);
  for (const auto& [k, c] : part.sbm_vectors) into.sbm_vectors[k] += c;
}

// Replicas [begin, end) into a partial summary; raw samples go straight to
// their replica slot.
EmpiricalSummary run_block(const SamplerTask& task, std::uint64_t begin, std::uint64_t end,
                           std::uint64_t seed, EmpiricalSummary* raw_owner) {
  const int n = task_size(task);
  EmpiricalSummary part = empty_summary(n);
  UnionFind workspace;
  for (std::uint64_t i = begin; i < end; ++i) {
    Xoshiro256pp rng = Xoshiro256pp::for_replica(seed, i);
    ComponentSample c;
    if (const auto* g = std::get_if<GnpTask>(&task)) {
      c = sample_components(g->n, g->p, rng, workspace);
      record(part, c, true, true);
    } else if (const auto* r = std::get_if<RigidTask>(&task)) {
      c.size_of_vertex1 = rigid_sample(r->n, r->t, rng);
      record(part, c, false, false);
    } else {
      const auto& s = std::get<SbmTask>(task);
      SbmSample sample = sample_sbm(s.sbm, rng);
      int total = 0;
      for (int v : sample.component_vector_of_vertex1) total += v;
      c.size_of_vertex1 = total;
      c.largest = sample.largest;
      record(part, c, true, false);
      ++part.sbm_vectors[sample.component_vector_of_vertex1];
      if (raw_owner != nullptr) raw_owner->raw_sbm[i] = std::move(sample.component_vector_of_vertex1);
    }
    if (raw_owner != nullptr) raw_owner->raw[i] = c;
  }
  return part;
}

}  // namespace

EmpiricalSummary run_replicas(const SamplerTask& task, std::uint64_t count, const RngSpec& spec,
                              const ReplicaOptions& options) {
  if (count < 1) throw InvalidInput("run_replicas needs count >= 1");
  if (options.threads < 1) throw InvalidInput("run_replicas needs threads >= 1");
  validate_task(task);
  const int n = task_size(task);
  const bool sbm = std::holds_alternative<SbmTask>(task);

  EmpiricalSummary summary = empty_summary(n);
  if (options.keep_raw) {
    std::size_t per_replica = sizeof(ComponentSample);
    if (sbm) per_replica += sizeof(LabelVector) + sizeof(int) * static_cast<std::size_t>(std::get<SbmTask>(task).sbm.labels());
    if (count > options.memory_budget_bytes / per_replica) {
      throw ResourceError("retaining " + std::to_string(count) + " raw samples exceeds the memory budget of " +
                          std::to_string(options.memory_budget_bytes) + " bytes");
    }
    summary.raw.resize(count);
    if (sbm) summary.raw_sbm.resize(count);
  }
  EmpiricalSummary* raw_owner = options.keep_raw ? &summary : nullptr;

  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(
      static_cast<std::uint64_t>(options.threads), count));
  std::vector<EmpiricalSummary> parts(workers);
  auto bounds = [&](std::uint64_t w) { return count * w / workers; };
  if (workers == 1) {
    parts[0] = run_block(task, 0, count, spec.master_seed, raw_owner);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          parts[w] = run_block(task, bounds(w), bounds(w + 1), spec.master_seed, raw_owner);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const auto& part : parts) merge_into(summary, part);
  return summary;
}

void write_raw_csv(std::ostream& out, std::span<const ComponentSample> raw) {
  out << "replica,size1,largest,second\n";
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out << i << ',' << raw[i].size_of_vertex1 << ',' << raw[i].largest << ',' << raw[i].second_largest << '\n';
  }
}

}  // namespace ercomp
