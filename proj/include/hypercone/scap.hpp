#pragma once

// Singular capacity over a declared degeneration DAG, and density ladders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypercone/error.hpp"

namespace hypercone {

struct DagCone {
  std::string id;
  double density = 1.0;
  bool operator==(const DagCone&) const = default;
};

/// One declared degeneration: `parent` degenerates into the multiset
/// `children` of lower-density cones.
struct Scenario {
  std::string parent;
  std::vector<std::string> children;
  bool operator==(const Scenario&) const = default;
};

class DegenerationDag {
 public:
  DegenerationDag() = default;

  /// Unknown ids and duplicate cones are rejected. Density ordering is
  /// checked unless `check_densities` is false.
  DegenerationDag(std::vector<DagCone> cones, std::vector<Scenario> scenarios, bool check_densities = true)
      : cones_(std::move(cones)), scenarios_(std::move(scenarios)) {
    for (std::size_t i = 0; i < cones_.size(); ++i) {
      if (!index_.emplace(cones_[i].id, i).second) throw Error("duplicate cone id '" + cones_[i].id + "'");
    }
    for (const auto& s : scenarios_) {
      const DagCone& p = cone(s.parent);
      for (const auto& c : s.children) {
        const DagCone& child = cone(c);
        if (check_densities && !(child.density < p.density)) {
          throw Error("scenario child '" + c + "' density must be below parent '" + s.parent + "'");
        }
      }
    }
  }

  const std::vector<DagCone>& cones() const { return cones_; }
  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  const DagCone& cone(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown cone id '" + id + "'");
    return cones_[it->second];
  }

  std::vector<const Scenario*> scenarios_of(const std::string& id) const {
    std::vector<const Scenario*> out;
    for (const auto& s : scenarios_)
      if (s.parent == id) out.push_back(&s);
    return out;
  }

  DegenerationDag with_scenario(Scenario s, bool check_densities = true) const {
    auto sc = scenarios_;
    sc.push_back(std::move(s));
    return DegenerationDag(cones_, std::move(sc), check_densities);
  }

  bool operator==(const DegenerationDag& o) const { return cones_ == o.cones_ && scenarios_ == o.scenarios_; }

 private:
  std::vector<DagCone> cones_;
  std::vector<Scenario> scenarios_;
  std::map<std::string, std::size_t> index_;
};

using ScapTable = std::map<std::string, std::uint64_t>;

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw Error("SCAP overflow");
  return a + b;
}

inline std::uint64_t scap_visit(const DegenerationDag& dag, const std::string& id, ScapTable& memo,
                                std::map<std::string, bool>& on_stack) {
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  if (on_stack[id]) throw Error("cycle detected at cone '" + id + "'");
  on_stack[id] = true;
  std::uint64_t best = 0;
  for (const Scenario* s : dag.scenarios_of(id)) {
    std::uint64_t sum = 0;
    for (const auto& c : s->children) sum = checked_add(sum, scap_visit(dag, c, memo, on_stack));
    best = std::max(best, sum);
  }
  on_stack[id] = false;
  const std::uint64_t value = checked_add(best, 1);
  memo.emplace(id, value);
  return value;
}

}  // namespace detail

/// SCAP of every cone in the DAG.
inline ScapTable scap_table(const DegenerationDag& dag) {
  ScapTable memo;
  std::map<std::string, bool> on_stack;
  for (const auto& c : dag.cones()) detail::scap_visit(dag, c.id, memo, on_stack);
  return memo;
}

/// 1 for a cone without scenarios, else 1 + max over scenarios of the
/// children's summed SCAP.
inline std::uint64_t scap_cone(const DegenerationDag& dag, const std::string& id) {
  dag.cone(id);
  ScapTable memo;
  std::map<std::string, bool> on_stack;
  return detail::scap_visit(dag, id, memo, on_stack);
}

/// Σ SCAP over singular points, doubled for one-sided surfaces.
inline std::uint64_t scap_surface(const std::vector<std::string>& singular_cones, bool one_sided,
                                  const DegenerationDag& dag) {
  const ScapTable table = scap_table(dag);
  std::uint64_t sum = 0;
  for (const auto& id : singular_cones) {
    dag.cone(id);
    sum = detail::checked_add(sum, table.at(id));
  }
  return one_sided ? detail::checked_add(sum, sum) : sum;
}

/// Every scenario of `parent` satisfies 1 + Σ scap(children) <= scap(parent)
/// in `table` (computed from the DAG when absent).
inline bool scap_usc_check(const DegenerationDag& dag, const std::string& parent,
                           const ScapTable* table = nullptr) {
  dag.cone(parent);
  const ScapTable own = table ? ScapTable{} : scap_table(dag);
  const ScapTable& t = table ? *table : own;
  auto lookup = [&](const std::string& id) -> std::uint64_t {
    auto it = t.find(id);
    if (it == t.end()) throw Error("SCAP table lacks cone '" + id + "'");
    return it->second;
  };
  const std::uint64_t top = lookup(parent);
  for (const Scenario* s : dag.scenarios_of(parent)) {
    std::uint64_t sum = 1;
    for (const auto& c : s->children) sum = detail::checked_add(sum, lookup(c));
    if (sum > top) return false;
  }
  return true;
}

struct DensityLadder {
  std::vector<double> base;
  std::vector<double> merged;
};

/// Sorted, deduplicated {m θ_i <= cutoff}.
inline DensityLadder density_ladder(const std::vector<double>& base, double cutoff) {
  if (base.empty() || std::abs(base.front() - 1.0) > 1e-12) throw Error("base densities must start at 1");
  for (std::size_t i = 1; i < base.size(); ++i) {
    if (!(base[i] > base[i - 1])) throw Error("base densities must increase strictly");
  }
  if (cutoff < 1.0) throw Error("empty ladder: cutoff below 1");
  constexpr double tol = 1e-9;
  std::vector<double> all;
  for (double theta : base) {
    for (long m = 1; m * theta <= cutoff + tol; ++m) all.push_back(static_cast<double>(m) * theta);
  }
  std::sort(all.begin(), all.end());
  DensityLadder out{base, {}};
  for (double v : all) {
    if (out.merged.empty() || v - out.merged.back() > tol) out.merged.push_back(v);
  }
  return out;
}

}  // namespace hypercone
