#pragma once

// Random valid trees, tree pairs with a shared shape, and random
// density-decreasing degeneration DAGs for property checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hypercone/cone_trees.hpp"
#include "hypercone/random.hpp"
#include "hypercone/scap.hpp"

namespace hypercone::sampling {

/// Three smooth models and four cone classes; C1 and C1b share a density.
inline TreeContext demo_context() {
  TreeContext ctx;
  SmoothModelMeta s0{"S0", 1.0, "plane", {}, 0.1};
  SmoothModelMeta s1{"S1", 1.47, "C1", {{Point8{0.3}, 0.1, "C1", 1}}, 0.1};
  SmoothModelMeta s2{"S2", 2.0, "plane", {{Point8{0.35}, 0.08, "C2", 1}, {Point8{-0.35}, 0.08, "C1", 1}}, 0.1};
  for (auto& m : {s0, s1, s2}) ctx.models.emplace(m.id, m);
  const std::vector<std::string> ids{"C1", "C1b", "C2", "C3"};
  const std::vector<double> pos{0.0, 0.001, 0.5, 0.8};
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) ctx.cones.set(ids[i], ids[j], std::abs(pos[i] - pos[j]));
  return ctx;
}

inline double demo_density(const std::string& cone) {
  if (cone == "C1" || cone == "C1b") return 1.4726215563702154;
  if (cone == "C2") return 1.6;
  return 2.0;
}

/// Shape decisions come from `shape`; each free continuous parameter is
/// multiplied by (1 + jitter_scale u), u ∈ [-1, 1] drawn from `jitter`.
class TreeGenerator {
 public:
  TreeGenerator(const TreeContext& ctx, std::uint64_t shape_seed, std::uint64_t jitter_seed, double jitter_scale,
                double beta = 0.01)
      : ctx_(ctx), shape_(shape_seed, 21), jitter_(jitter_seed, 22), scale_(jitter_scale), beta_(beta) {}

  TreeNode generate(int max_depth = 3) {
    Point8 x{};
    for (int i = 0; i < 8; ++i) x[static_cast<std::size_t>(i)] = jit(shape_.uniform(-0.5, 0.5));
    const double R = jit(shape_.uniform(0.5, 1.0));
    if (shape_.coin(0.5)) return type1(max_depth, pick_cone(), 1 + static_cast<int>(shape_.integer(0, 1)), x, R);
    return type2(max_depth, x, R);
  }

 private:
  double jit(double v) { return v * (1.0 + scale_ * jitter_.uniform(-1.0, 1.0)); }

  std::string pick_cone() {
    static const char* ids[] = {"C1", "C2", "C3"};
    return ids[shape_.integer(0, 2)];
  }

  std::string swap_twin(const std::string& cone) {
    const bool swap = jitter_.coin(scale_ > 0.0 ? 0.3 : 0.0);
    if (!swap) return cone;
    if (cone == "C1") return "C1b";
    if (cone == "C1b") return "C1";
    return cone;
  }

  TreeNode type1(int depth, const std::string& cone, int m, const Point8& x, double R, bool free_cone = true) {
    TypeI a;
    a.cone = free_cone ? swap_twin(cone) : cone;
    a.density = demo_density(cone);
    a.m = m;
    a.x = x;
    a.R = R;
    const bool leaf = depth <= 0 || shape_.coin(0.4);
    a.rho = leaf ? 0.0 : R * std::min(0.5, jit(shape_.uniform(0.05, 0.45)));
    TreeNode node{a, {}};
    if (!leaf) {
      if (shape_.coin(0.5)) {
        node.children.push_back(type1(depth - 1, pick_cone(), m, x, a.rho));
      } else {
        node.children.push_back(type2(depth - 1, x, a.rho));
      }
    }
    return node;
  }

  TreeNode type2(int depth, const Point8& x, double R) {
    static const char* models[] = {"S0", "S1", "S2"};
    const std::string id = depth <= 0 ? "S0" : models[shape_.integer(0, 2)];
    TreeNode node{TypeII{id, x, R}, {}};
    const SmoothModelMeta& meta = ctx_.models.at(id);
    for (const auto& ball : meta.inner_balls) {
      Point8 xc;
      for (std::size_t k = 0; k < 8; ++k) {
        const double off = shape_.uniform(-1.0, 1.0) / std::sqrt(8.0) * 0.9 * beta_ * R * ball.r;
        xc[k] = x[k] + R * ball.y[k] + off * (1.0 + 0.1 * scale_ * jitter_.uniform(-1.0, 1.0));
      }
      const double ratio = std::clamp(jit(shape_.uniform(0.55, 1.0)), 0.5, 1.0 + beta_);
      const double Rc = R * ball.r * ratio;
      if (depth > 1 && shape_.coin(0.3)) {
        node.children.push_back(type2(depth - 1, xc, Rc));
      } else {
        node.children.push_back(type1(depth - 1, ball.cone, ball.multiplicity, xc, Rc, false));
      }
    }
    return node;
  }

  const TreeContext& ctx_;
  CounterRng shape_;
  CounterRng jitter_;
  double scale_;
  double beta_;
};

/// Cones d0 < d1 < ... with densities increasing in the index; each
/// scenario of cone i draws its children among cones j < i.
inline DegenerationDag random_dag(CounterRng& rng, int cones = 8, int max_scenarios = 2, int max_children = 3) {
  std::vector<DagCone> cs;
  double d = 1.0;
  for (int i = 0; i < cones; ++i) {
    d += rng.uniform(0.05, 0.5);
    cs.push_back({"c" + std::to_string(i), d});
  }
  std::vector<Scenario> sc;
  for (int i = 1; i < cones; ++i) {
    const auto count = rng.integer(0, max_scenarios);
    for (std::int64_t s = 0; s < count; ++s) {
      Scenario scen{cs[static_cast<std::size_t>(i)].id, {}};
      const auto k = rng.integer(1, max_children);
      for (std::int64_t c = 0; c < k; ++c) scen.children.push_back(cs[static_cast<std::size_t>(rng.integer(0, i - 1))].id);
      sc.push_back(std::move(scen));
    }
  }
  return DegenerationDag(std::move(cs), std::move(sc));
}

/// A random density-decreasing scenario added to a random non-minimal cone.
inline Scenario random_scenario(CounterRng& rng, const DegenerationDag& dag, int max_children = 3) {
  const auto& cs = dag.cones();
  std::vector<std::size_t> order(cs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cs[a].density < cs[b].density; });
  const auto p = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(cs.size()) - 1));
  Scenario s{cs[order[p]].id, {}};
  const auto k = rng.integer(1, max_children);
  for (std::int64_t c = 0; c < k; ++c) s.children.push_back(cs[order[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(p) - 1))]].id);
  return s;
}

}  // namespace hypercone::sampling
