#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "suskit/branching.hpp"
#include "suskit/kernel.hpp"
#include "suskit/rng.hpp"

namespace suskit {

enum class EdgeRule { clip, exponential };

inline const char* to_string(EdgeRule r) { return r == EdgeRule::clip ? "clip" : "exponential"; }

/// Distribution of vertex types for i.i.d. sampling; mirrors the
/// TypeSpace families but samples the continuum measure directly
/// rather than the quadrature mesh.
struct TypeDistribution {
  enum class Family { single_atom, finite, uniform01, powerlaw };
  Family family = Family::single_atom;
  std::vector<double> masses;  // finite case, atoms labeled 1..B
  double q = 0.0, x_max = 0.0; // powerlaw case

  static TypeDistribution single_atom() { return TypeDistribution{}; }
  static TypeDistribution uniform() {
    TypeDistribution d;
    d.family = Family::uniform01;
    return d;
  }
  static TypeDistribution finite(std::vector<double> m) {
    TypeDistribution d;
    d.family = Family::finite;
    d.masses = std::move(m);
    return d;
  }
  static TypeDistribution powerlaw(double q_, double x_max_) {
    TypeDistribution d;
    d.family = Family::powerlaw;
    d.q = q_;
    d.x_max = x_max_;
    return d;
  }

  double sample(Rng& rng) const {
    switch (family) {
      case Family::single_atom: return 1.0;
      case Family::uniform01: return rng.next_unit();
      case Family::powerlaw: {
        // Inverse CDF of q x^{-q-1} on [1, x_max], renormalized.
        const double deficit = std::pow(x_max, -q);
        const double u = rng.next_unit_half_open();
        return std::pow(1.0 - u * (1.0 - deficit), -1.0 / q);
      }
      case Family::finite: {
        double total = 0.0;
        for (double m : masses) total += m;
        double t = rng.next_unit() * total;
        for (std::size_t i = 0; i < masses.size(); ++i) {
          t -= masses[i];
          if (t <= 0.0) return static_cast<double>(i + 1);
        }
        return static_cast<double>(masses.size());
      }
    }
    return 1.0;
  }
};

enum class VertexMode { iid_from_measure, deterministic_grid, planted_atoms };

/// Rule producing the n vertex types: i.i.d. from a measure, the
/// deterministic grid x_i = i/n, or the pathological planted pair
/// (floor(n^{3/4}) copies each of two atoms, remainder i.i.d.).
struct VertexSpec {
  VertexMode mode = VertexMode::iid_from_measure;
  TypeDistribution dist;
  double atom_a = 0.0, atom_b = 0.0;  // planted_atoms only

  static VertexSpec iid(TypeDistribution d) {
    VertexSpec v;
    v.mode = VertexMode::iid_from_measure;
    v.dist = std::move(d);
    return v;
  }
  static VertexSpec grid() {
    VertexSpec v;
    v.mode = VertexMode::deterministic_grid;
    return v;
  }
  static VertexSpec planted(TypeDistribution base, double a, double b) {
    VertexSpec v;
    v.mode = VertexMode::planted_atoms;
    v.dist = std::move(base);
    v.atom_a = a;
    v.atom_b = b;
    return v;
  }
};

/// One realization of G(n, kappa): vertex types plus an edge list with
/// u < v, no self-loops, no duplicates. Vertex ids are 0-based here;
/// CSV output is 1-based.
struct GraphSample {
  std::uint64_t n = 0;
  std::vector<double> types;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::uint64_t seed = 0;
  EdgeRule edge_rule = EdgeRule::clip;
  std::string sampler;  // provenance: which sampling path ran
};

namespace detail {

inline double edge_probability(double intensity, EdgeRule rule) {
  if (intensity <= 0.0) return 0.0;
  return rule == EdgeRule::clip ? std::min(intensity, 1.0) : -std::expm1(-intensity);
}

/// Maps a linear pair-stream index t to the pair (i, j), i < j, in the
/// column-major order (0,1),(0,2),(1,2),(0,3),...
inline std::pair<std::uint32_t, std::uint32_t> pair_from_index(std::uint64_t t) {
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
  while (j * (j - 1) / 2 > t) --j;
  while ((j + 1) * j / 2 <= t) ++j;
  const std::uint64_t i = t - j * (j - 1) / 2;
  return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
}

/// Uniform-probability sampler: one geometric skip stream over all
/// C(n,2) pairs.
inline void sample_uniform_pairs(std::uint64_t n, double p, Rng& rng,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  if (p <= 0.0) return;
  const std::uint64_t total = n * (n - 1) / 2;
  std::uint64_t t = rng.geometric_skip(p);
  while (t < total) {
    out.push_back(pair_from_index(t));
    const std::uint64_t s = rng.geometric_skip(p);
    if (total - t - 1 <= s) break;
    t += 1 + s;
  }
}

/// Column-constant sampler for kernels kappa = phi(max(x,y)): sort
/// vertices by type; within column j (sorted) every pair (i,j), i<j,
/// has the same probability, so a geometric skip walks each column.
inline void sample_max_structure(const std::vector<double>& types, double lambda,
                                 const std::function<double(double)>& profile, EdgeRule rule,
                                 Rng& rng,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  const std::uint64_t n = types.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return types[a] < types[b]; });
  for (std::uint64_t j = 1; j < n; ++j) {
    const double p =
        edge_probability(lambda * profile(types[order[j]]) / static_cast<double>(n), rule);
    if (p <= 0.0) continue;
    std::uint64_t i = rng.geometric_skip(p);
    while (i < j) {
      std::uint32_t u = order[i], v = order[j];
      if (u > v) std::swap(u, v);
      out.emplace_back(u, v);
      const std::uint64_t s = rng.geometric_skip(p);
      if (j - i - 1 <= s) break;
      i += 1 + s;
    }
  }
}

/// Bucketed sampler for graphs whose vertices take few distinct type
/// values: pair probabilities are constant per bucket pair, giving
/// O(B^2 + edges).
inline void sample_bucketed(const std::vector<double>& types,
                            const std::vector<std::vector<std::uint32_t>>& buckets,
                            const Kernel& k, double lambda, EdgeRule rule, Rng& rng,
                            std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  const double n = static_cast<double>(types.size());
  const std::size_t B = buckets.size();
  for (std::size_t a = 0; a < B; ++a) {
    const std::vector<std::uint32_t>& A = buckets[a];
    if (A.empty()) continue;
    // within-bucket pairs
    {
      const double p = edge_probability(lambda * k(types[A[0]], types[A[0]]) / n, rule);
      if (p > 0.0 && A.size() >= 2) {
        const std::uint64_t total = static_cast<std::uint64_t>(A.size()) * (A.size() - 1) / 2;
        std::uint64_t t = rng.geometric_skip(p);
        while (t < total) {
          const auto [i, j] = pair_from_index(t);
          std::uint32_t u = A[i], v = A[j];
          if (u > v) std::swap(u, v);
          out.emplace_back(u, v);
          const std::uint64_t s = rng.geometric_skip(p);
          if (total - t - 1 <= s) break;
          t += 1 + s;
        }
      }
    }
    // cross-bucket grids
    for (std::size_t b = a + 1; b < B; ++b) {
      const std::vector<std::uint32_t>& Bb = buckets[b];
      if (Bb.empty()) continue;
      const double p = edge_probability(lambda * k(types[A[0]], types[Bb[0]]) / n, rule);
      if (p <= 0.0) continue;
      const std::uint64_t total = static_cast<std::uint64_t>(A.size()) * Bb.size();
      std::uint64_t t = rng.geometric_skip(p);
      while (t < total) {
        std::uint32_t u = A[t / Bb.size()], v = Bb[t % Bb.size()];
        if (u > v) std::swap(u, v);
        out.emplace_back(u, v);
        const std::uint64_t s = rng.geometric_skip(p);
        if (total - t - 1 <= s) break;
        t += 1 + s;
      }
    }
  }
}

/// Thinning sampler for bounded kernels: stream candidate pairs at the
/// uniform upper-bound probability, accept each with ratio p_ij/p_max.
inline void sample_bounded_thinning(const std::vector<double>& types, const Kernel& k,
                                    double lambda, double bound, EdgeRule rule, Rng& rng,
                                    std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  const std::uint64_t n = types.size();
  const double p_max = edge_probability(lambda * bound / static_cast<double>(n), rule);
  if (p_max <= 0.0) return;
  const std::uint64_t total = n * (n - 1) / 2;
  std::uint64_t t = rng.geometric_skip(p_max);
  while (t < total) {
    const auto [i, j] = pair_from_index(t);
    const double p = edge_probability(lambda * k(types[i], types[j]) / static_cast<double>(n), rule);
    if (p > 0.0 && rng.next_unit_half_open() < p / p_max) out.emplace_back(i, j);
    const std::uint64_t s = rng.geometric_skip(p_max);
    if (total - t - 1 <= s) break;
    t += 1 + s;
  }
}

inline void sample_naive(const std::vector<double>& types, const Kernel& k, double lambda,
                         EdgeRule rule, Rng& rng,
                         std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  const std::uint64_t n = types.size();
  for (std::uint64_t j = 1; j < n; ++j)
    for (std::uint64_t i = 0; i < j; ++i) {
      const double p = edge_probability(lambda * k(types[i], types[j]) / static_cast<double>(n), rule);
      if (p > 0.0 && rng.next_unit_half_open() < p)
        out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
}

constexpr std::uint64_t kNaiveCeiling = 20000;
constexpr std::size_t kMaxBuckets = 64;

}  // namespace detail

/// Samples one graph G(n, lambda*kappa) with independent edges under
/// the chosen rule. Sampler dispatch honors the performance contract:
/// constant-by-block kernels run in O(B^2 + edges), kernels of
/// max(x,y) shape in O(n log n + edges), other bounded kernels by
/// skip-plus-thinning, with the exact O(n^2) loop as fallback (guarded
/// at n <= 2e4 for unbounded unstructured kernels). `force_naive`
/// exists so tests can match the fast paths against the exact loop.
inline GraphSample sample_graph(const Kernel& k, const VertexSpec& vs, std::uint64_t n,
                                double lambda, EdgeRule rule, std::uint64_t seed,
                                bool force_naive = false) {
  if (n < 1) throw std::invalid_argument("sample_graph: n must be >= 1");
  GraphSample g;
  g.n = n;
  g.seed = seed;
  g.edge_rule = rule;
  Rng rng(seed, 0);

  g.types.resize(n);
  switch (vs.mode) {
    case VertexMode::iid_from_measure:
      for (auto& t : g.types) t = vs.dist.sample(rng);
      break;
    case VertexMode::deterministic_grid:
      for (std::uint64_t i = 0; i < n; ++i)
        g.types[i] = static_cast<double>(i + 1) / static_cast<double>(n);
      break;
    case VertexMode::planted_atoms: {
      const auto planted = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 0.75));
      if (2 * planted > n) throw std::invalid_argument("sample_graph: n too small for planting");
      if (!(k(vs.atom_a, vs.atom_b) * lambda > static_cast<double>(n)))
        throw std::invalid_argument(
            "sample_graph: planted atoms need lambda*kappa(a,b) > n");
      std::uint64_t i = 0;
      for (; i < planted; ++i) g.types[i] = vs.atom_a;
      for (; i < 2 * planted; ++i) g.types[i] = vs.atom_b;
      for (; i < n; ++i) g.types[i] = vs.dist.sample(rng);
      break;
    }
  }

  // Bucket detection: few distinct type values => block-constant.
  std::vector<std::vector<std::uint32_t>> buckets;
  {
    std::map<double, std::size_t> index;
    bool ok = true;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto [it, inserted] = index.try_emplace(g.types[i], index.size());
      if (inserted) {
        if (index.size() > detail::kMaxBuckets) {
          ok = false;
          break;
        }
        buckets.emplace_back();
      }
      buckets[it->second].push_back(i);
    }
    if (!ok) buckets.clear();
  }

  if (force_naive) {
    if (n > detail::kNaiveCeiling)
      throw std::invalid_argument("sample_graph: naive sampler capped at n <= 20000");
    detail::sample_naive(g.types, k, lambda, rule, rng, g.edges);
    g.sampler = "naive";
  } else if (!buckets.empty()) {
    detail::sample_bucketed(g.types, buckets, k, lambda, rule, rng, g.edges);
    g.sampler = "bucketed";
  } else if (k.max_profile) {
    detail::sample_max_structure(g.types, lambda, k.max_profile, rule, rng, g.edges);
    g.sampler = "max_structure";
  } else if (k.bound) {
    detail::sample_bounded_thinning(g.types, k, lambda, *k.bound, rule, rng, g.edges);
    g.sampler = "thinning";
  } else {
    if (n > detail::kNaiveCeiling)
      throw std::invalid_argument(
          "sample_graph: unbounded kernel without structure needs n <= 20000");
    detail::sample_naive(g.types, k, lambda, rule, rng, g.edges);
    g.sampler = "naive";
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

enum class ChknsVariant { I, II, III, growth };

inline const char* to_string(ChknsVariant v) {
  switch (v) {
    case ChknsVariant::I: return "I";
    case ChknsVariant::II: return "II";
    case ChknsVariant::III: return "III";
    default: return "growth";
  }
}

/// CHKNS family: Poissonized variants with per-pair intensities
///   I:   lambda (1/(j-1) - 1/n)      (pairs start at j = 2)
///   II:  lambda (1/j - 1/n)          (= the Poisson kernel graph on the grid)
///   III: lambda (1/j - 1/(n+1))
/// with multi-edges collapsed (p = 1 - exp(-intensity)), and the
/// original growth process: vertices arrive one at a time, each
/// arrival followed by one uniform-endpoint edge with probability
/// delta = lambda/2.
inline GraphSample sample_chkns_family(ChknsVariant variant, double lambda, std::uint64_t n,
                                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_chkns_family: n must be >= 1");
  if (variant == ChknsVariant::growth && !(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("sample_chkns_family: growth variant needs lambda in [0,1]");
  GraphSample g;
  g.n = n;
  g.seed = seed;
  g.edge_rule = EdgeRule::exponential;
  g.sampler = std::string("chkns_") + to_string(variant);
  g.types.resize(n);
  for (std::uint64_t i = 0; i < n; ++i)
    g.types[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  Rng rng(seed, 0);

  if (variant == ChknsVariant::growth) {
    const double delta = lambda / 2.0;
    for (std::uint64_t t = 2; t <= n; ++t) {
      if (delta > 0.0 && rng.bernoulli(delta)) {
        const auto u = static_cast<std::uint32_t>(rng.next_below(t));
        const auto v = static_cast<std::uint32_t>(rng.next_below(t));
        if (u != v) g.edges.emplace_back(std::min(u, v), std::max(u, v));
      }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
  }

  const double nd = static_cast<double>(n);
  for (std::uint64_t j = 2; j <= n; ++j) {  // 1-based labels
    double intensity = 0.0;
    switch (variant) {
      case ChknsVariant::I: intensity = lambda * (1.0 / static_cast<double>(j - 1) - 1.0 / nd); break;
      case ChknsVariant::II: intensity = lambda * (1.0 / static_cast<double>(j) - 1.0 / nd); break;
      case ChknsVariant::III:
        intensity = lambda * (1.0 / static_cast<double>(j) - 1.0 / (nd + 1.0));
        break;
      default: break;
    }
    const double p = detail::edge_probability(intensity, EdgeRule::exponential);
    if (p <= 0.0) continue;
    std::uint64_t i = rng.geometric_skip(p);
    while (i < j - 1) {  // 0-based partners 0..j-2
      g.edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j - 1));
      const std::uint64_t s = rng.geometric_skip(p);
      if (j - 1 - i - 1 <= s) break;
      i += 1 + s;
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

/// Component statistics of one sample. chi = sum |C_i|^2 / n; chi_hat
/// excludes the largest component (ties broken toward the component
/// with the smallest minimum vertex id, so the exclusion is
/// deterministic).
struct ComponentStats {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> sizes;       // descending
  std::map<std::uint64_t, std::uint64_t> n_k;  // size k -> vertices in size-k components
  double chi = 1.0;
  double chi_hat = 0.0;
  std::uint64_t largest_size = 0;
  std::uint32_t largest_root = 0;  // smallest vertex id in the largest component

  /// Contribution from components of size <= delta * n.
  double chi_trunc(double delta) const {
    const double cutoff = delta * static_cast<double>(n);
    double acc = 0.0;
    for (const auto s : sizes) {
      const double sd = static_cast<double>(s);
      if (sd <= cutoff) acc += sd * sd;
    }
    return acc / static_cast<double>(n);
  }
};

/// Union-find with path compression and union by size.
inline ComponentStats components(const GraphSample& g) {
  const std::uint64_t n = g.n;
  std::vector<std::uint32_t> parent(n);
  std::vector<std::uint32_t> sz(n, 1);
  std::iota(parent.begin(), parent.end(), 0u);
  const auto find = [&](std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const std::uint32_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  };
  for (const auto& [u, v] : g.edges) {
    std::uint32_t ru = find(u), rv = find(v);
    if (ru == rv) continue;
    if (sz[ru] < sz[rv]) std::swap(ru, rv);
    parent[rv] = ru;
    sz[ru] += sz[rv];
  }

  ComponentStats st;
  st.n = n;
  std::vector<std::uint32_t> min_id(n, 0);
  std::vector<bool> seen(n, false);
  for (std::uint32_t v = 0; v < n; ++v) {
    const std::uint32_t r = find(v);
    if (!seen[r]) {
      seen[r] = true;
      min_id[r] = v;  // v ascending: first visit is the minimum id
      st.sizes.push_back(sz[r]);
    }
  }
  std::sort(st.sizes.begin(), st.sizes.end(), std::greater<>());
  st.largest_size = st.sizes.empty() ? 0 : st.sizes.front();

  // Deterministic largest component: max size, then smallest min id.
  std::uint32_t best_root = 0;
  bool have = false;
  for (std::uint32_t r = 0; r < n; ++r) {
    if (!seen[r] || sz[r] != st.largest_size) continue;
    if (!have || min_id[r] < min_id[best_root]) {
      best_root = r;
      have = true;
    }
  }
  st.largest_root = have ? min_id[best_root] : 0;

  double sumsq = 0.0;
  for (const auto s : st.sizes) {
    const double sd = static_cast<double>(s);
    sumsq += sd * sd;
    st.n_k[s] += s;
  }
  st.chi = sumsq / static_cast<double>(n);
  const double lg = static_cast<double>(st.largest_size);
  st.chi_hat = (sumsq - lg * lg) / static_cast<double>(n);
  return st;
}

/// Self-avoiding ordered path counts P_0..P_{l_max} by subset DP;
/// exponential in n, so guarded at n <= 14.
inline std::vector<std::uint64_t> count_paths(const GraphSample& g, std::size_t l_max) {
  if (g.n > 14) throw std::invalid_argument("count_paths: n must be <= 14");
  const auto n = static_cast<std::uint32_t>(g.n);
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [u, v] : g.edges) {
    adj[u] |= 1u << v;
    adj[v] |= 1u << u;
  }
  // dp[S][v]: ordered simple paths covering exactly set S, ending at v.
  const std::uint32_t full = n ? (1u << n) : 1u;
  std::vector<std::uint64_t> dp(static_cast<std::size_t>(full) * n, 0);
  std::vector<std::uint64_t> counts(l_max + 1, 0);
  counts[0] = n;
  for (std::uint32_t v = 0; v < n; ++v) dp[(1u << v) * n + v] = 1;
  for (std::uint32_t S = 1; S < full; ++S) {
    const auto len = static_cast<std::size_t>(__builtin_popcount(S)) - 1;
    for (std::uint32_t v = 0; v < n; ++v) {
      const std::uint64_t c = dp[static_cast<std::size_t>(S) * n + v];
      if (c == 0 || !(S & (1u << v))) continue;
      if (len >= 1 && len <= l_max) counts[len] += c;
      std::uint32_t nbrs = adj[v] & ~S;
      while (nbrs) {
        const std::uint32_t w = static_cast<std::uint32_t>(__builtin_ctz(nbrs));
        nbrs &= nbrs - 1;
        dp[static_cast<std::size_t>(S | (1u << w)) * n + w] += c;
      }
    }
  }
  return counts;
}

inline unsigned default_thread_count() {
  if (const char* env = std::getenv("SUSKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1u;
}

/// Runs fn(i) for i in [0, count) across threads; each index owns its
/// output slot, so results are independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(default_thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += workers) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct NkRow {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double mean_nk_over_n = 0.0;
  double se = 0.0;
  double predicted_rho_k = 0.0;
  double gap = 0.0;
};

/// Empirical check of N_k(G_n)/n -> rho_k(kappa): per n, the mean and
/// SE over replicates next to the branching-process prediction taken
/// from `prediction` (rho_k totals normalized by total mass).
inline std::vector<NkRow> empirical_nk_convergence(const Kernel& k, const VertexSpec& vs,
                                                   double lambda, EdgeRule rule,
                                                   const std::vector<std::uint64_t>& n_list,
                                                   std::size_t reps, std::size_t k_max,
                                                   std::uint64_t seed,
                                                   const DiscreteOperator& prediction_op) {
  const RhoKTable table = rho_k_pointwise(prediction_op, k_max);
  std::vector<NkRow> rows;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::uint64_t n = n_list[ni];
    std::vector<std::vector<double>> frac(reps, std::vector<double>(k_max + 1, 0.0));
    parallel_for(reps, [&](std::size_t r) {
      const GraphSample g =
          sample_graph(k, vs, n, lambda, rule, seed + 1000003ULL * ni + r);
      const ComponentStats st = components(g);
      for (std::size_t kk = 1; kk <= k_max; ++kk) {
        const auto it = st.n_k.find(kk);
        frac[r][kk] = it == st.n_k.end()
                          ? 0.0
                          : static_cast<double>(it->second) / static_cast<double>(n);
      }
    });
    for (std::size_t kk = 1; kk <= k_max; ++kk) {
      double mean = 0.0;
      for (std::size_t r = 0; r < reps; ++r) mean += frac[r][kk];
      mean /= static_cast<double>(reps);
      double var = 0.0;
      for (std::size_t r = 0; r < reps; ++r) var += (frac[r][kk] - mean) * (frac[r][kk] - mean);
      const double se = reps > 1 ? std::sqrt(var / (static_cast<double>(reps) - 1.0) /
                                             static_cast<double>(reps))
                                 : 0.0;
      NkRow row;
      row.n = n;
      row.k = kk;
      row.mean_nk_over_n = mean;
      row.se = se;
      row.predicted_rho_k = table.totals[kk - 1] / prediction_op.total_mass();
      row.gap = mean - row.predicted_rho_k;
      rows.push_back(row);
    }
  }
  return rows;
}

struct PlantRow {
  std::uint64_t n = 0;
  std::size_t rep = 0;
  double chi = 0.0;
  std::uint64_t largest = 0;
};

/// Planted-atom stress test: floor(n^{3/4}) copies each of two atoms
/// with lambda*kappa(a,b) > n force a large clique, demonstrating that
/// unbounded kernels break susceptibility convergence without vertex
/// space control.
inline std::vector<PlantRow> plant_atoms_experiment(const Kernel& k, const TypeDistribution& base,
                                                    double a, double b, double lambda,
                                                    EdgeRule rule,
                                                    const std::vector<std::uint64_t>& n_list,
                                                    std::size_t reps, std::uint64_t seed) {
  for (const auto n : n_list)
    if (!(k(a, b) * lambda > static_cast<double>(n)))
      throw std::invalid_argument("plant_atoms_experiment: kernel cannot supply kappa(a,b) > n");
  std::vector<PlantRow> rows(n_list.size() * reps);
  const VertexSpec vs = VertexSpec::planted(base, a, b);
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    parallel_for(reps, [&](std::size_t r) {
      const GraphSample g =
          sample_graph(k, vs, n_list[ni], lambda, rule, seed + 7919ULL * ni + r);
      const ComponentStats st = components(g);
      PlantRow row;
      row.n = n_list[ni];
      row.rep = r;
      row.chi = st.chi;
      row.largest = st.largest_size;
      rows[ni * reps + r] = row;
    });
  }
  return rows;
}

}  // namespace suskit
