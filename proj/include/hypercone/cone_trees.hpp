#pragma once

// Tree representations of cone decompositions: structural validation,
// coarse projection and the gamma-closeness predicate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypercone/error.hpp"

namespace hypercone {

inline constexpr double kClosenessSlack = 1e-12;
inline constexpr double kDensityTolerance = 1e-9;

using Point8 = std::array<double, 8>;

inline double distance(const Point8& a, const Point8& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double norm(const Point8& a) { return distance(a, Point8{}); }

struct InnerBall {
  Point8 y{};
  double r = 0.0;
  std::string cone;
  int multiplicity = 1;
  bool operator==(const InnerBall&) const = default;
};

struct SmoothModelMeta {
  std::string id;
  double density_at_infinity = 1.0;
  std::string outer_cone;
  std::vector<InnerBall> inner_balls;
  double sigma = 0.1;

  /// min_α r_α, or 1 when the model has no inner balls.
  double min_inner_radius() const {
    if (inner_balls.empty()) return 1.0;
    double m = inner_balls.front().r;
    for (const auto& b : inner_balls) m = std::min(m, b.r);
    return m;
  }

  bool operator==(const SmoothModelMeta&) const = default;
};

/// Problems with a smooth model's metadata; empty when valid.
inline std::vector<std::string> validate_model_meta(const SmoothModelMeta& m) {
  std::vector<std::string> out;
  if (!(m.sigma > 0.0 && m.sigma < 1.0 / 3.0)) out.push_back("sigma must lie in (0, 1/3)");
  for (std::size_t i = 0; i < m.inner_balls.size(); ++i) {
    const auto& b = m.inner_balls[i];
    if (!(b.r > 0.0)) out.push_back("inner ball " + std::to_string(i) + " radius must be positive");
    if (b.multiplicity < 1) out.push_back("inner ball " + std::to_string(i) + " multiplicity must be positive");
    if (norm(b.y) + 2.0 * b.r > 1.0 - 3.0 * m.sigma + kClosenessSlack) {
      out.push_back("inner ball " + std::to_string(i) + " not inside B_{1-3σ}");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& c = m.inner_balls[j];
      if (distance(b.y, c.y) < 2.0 * (b.r + c.r) - kClosenessSlack) {
        out.push_back("inner balls " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
  return out;
}

struct TypeI {
  std::string cone;
  double density = 1.0;
  int m = 1;
  Point8 x{};
  double R = 1.0;
  double rho = 0.0;
  bool operator==(const TypeI&) const = default;
};

struct TypeII {
  std::string model;
  Point8 x{};
  double R = 1.0;
  bool operator==(const TypeII&) const = default;
};

struct TreeNode {
  std::variant<TypeI, TypeII> kind;
  std::vector<TreeNode> children;

  bool is_type1() const { return std::holds_alternative<TypeI>(kind); }
  const TypeI& type1() const { return std::get<TypeI>(kind); }
  const TypeII& type2() const { return std::get<TypeII>(kind); }
  Point8 x() const { return is_type1() ? type1().x : type2().x; }
  double R() const { return is_type1() ? type1().R : type2().R; }

  bool operator==(const TreeNode&) const = default;
};

/// Symmetric table of cross-section Hausdorff distances between cone classes.
class ConeMetric {
 public:
  void set(const std::string& a, const std::string& b, double d) {
    if (!(d >= 0.0)) throw Error("cone distance must be nonnegative");
    table_[key(a, b)] = d;
  }

  double operator()(const std::string& a, const std::string& b) const {
    if (a == b) return 0.0;
    auto it = table_.find(key(a, b));
    if (it == table_.end()) throw Error("no tabulated distance between cones '" + a + "' and '" + b + "'");
    return it->second;
  }

  const std::map<std::pair<std::string, std::string>, double>& entries() const { return table_; }
  bool operator==(const ConeMetric&) const = default;

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
  std::map<std::pair<std::string, std::string>, double> table_;
};

/// Smooth models and cone distances that trees refer to by id.
struct TreeContext {
  std::map<std::string, SmoothModelMeta> models;
  ConeMetric cones;

  const SmoothModelMeta* model(const std::string& id) const {
    auto it = models.find(id);
    return it == models.end() ? nullptr : &it->second;
  }

  bool operator==(const TreeContext&) const = default;
};

struct Violation {
  std::string path;  // "root", "root/0", "root/0/2", ...
  std::string message;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

inline void validate_node(const TreeNode& node, const std::string& path, double beta, const TreeContext& ctx,
                          std::vector<Violation>& out) {
  auto report = [&](std::string msg) { out.push_back({path, std::move(msg)}); };
  if (node.is_type1()) {
    const TypeI& a = node.type1();
    if (a.m < 1) report("multiplicity m must be positive");
    if (!(a.R > 0.0)) report("R must be positive");
    if (!(a.rho >= 0.0)) report("rho must be nonnegative");
    if (a.R < 2.0 * a.rho - kClosenessSlack) report("R ≥ 2ρ violated (R = " + fmt(a.R) + ", ρ = " + fmt(a.rho) + ")");
    if (a.rho == 0.0) {
      if (!(a.density > 1.0)) report("leaf density must exceed 1");
      if (!node.children.empty()) report("type-I node with ρ = 0 must be a leaf");
    } else if (node.children.size() != 1) {
      report("type-I node with ρ > 0 must have exactly one child");
    } else {
      const TreeNode& c = node.children.front();
      if (distance(c.x(), a.x) > kClosenessSlack) report("child x must equal parent x");
      if (std::abs(c.R() - a.rho) > kClosenessSlack) report("child R must equal parent ρ");
      if (c.is_type1() && c.type1().m != a.m) report("type-I child must keep multiplicity m");
    }
  } else {
    const TypeII& b = node.type2();
    if (!(b.R > 0.0)) report("R must be positive");
    const SmoothModelMeta* model = ctx.model(b.model);
    if (!model) {
      report("unknown smooth model '" + b.model + "'");
    } else {
      for (const auto& msg : validate_model_meta(*model)) report("model '" + b.model + "': " + msg);
      if (node.children.size() != model->inner_balls.size()) {
        report("type-II node needs one child per inner ball (" + std::to_string(model->inner_balls.size()) +
               "), found " + std::to_string(node.children.size()));
      } else {
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const auto& ball = model->inner_balls[i];
          const TreeNode& c = node.children[i];
          Point8 expect;
          for (std::size_t k = 0; k < 8; ++k) expect[k] = b.x[k] + b.R * ball.y[k];
          const std::string idx = std::to_string(i);
          if (distance(c.x(), expect) > beta * b.R * ball.r + kClosenessSlack) {
            report("child " + idx + ": |x_child − (x + R·y_α)| ≤ βRr_α violated");
          }
          const double ratio = c.R() / (b.R * ball.r);
          if (ratio < 0.5 - kClosenessSlack || ratio > 1.0 + beta + kClosenessSlack) {
            report("child " + idx + ": 1/2 ≤ R_child/(R·r_α) ≤ 1+β violated (ratio " + fmt(ratio) + ")");
          }
          if (c.is_type1()) {
            if (c.type1().cone != ball.cone) report("child " + idx + ": cone must match inner ball cone");
            if (c.type1().m != ball.multiplicity) report("child " + idx + ": multiplicity must match inner ball");
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    validate_node(node.children[i], path + "/" + std::to_string(i), beta, ctx, out);
  }
}

}  // namespace detail

/// Structural violations of a tree representation; empty when valid.
inline std::vector<Violation> validate_tree(const TreeNode& tree, double beta, const TreeContext& ctx = {}) {
  std::vector<Violation> out;
  if (!(beta > 0.0)) out.push_back({"root", "beta must be positive"});
  detail::validate_node(tree, "root", beta, ctx, out);
  return out;
}

/// Coarse label: (density, m) for type I, the model id for type II.
struct CoarseNode {
  std::variant<std::pair<double, int>, std::string> label;
  std::vector<CoarseNode> children;

  bool operator==(const CoarseNode& o) const {
    if (label.index() != o.label.index() || children.size() != o.children.size()) return false;
    if (const auto* p = std::get_if<0>(&label)) {
      const auto& q = std::get<0>(o.label);
      if (p->second != q.second || std::abs(p->first - q.first) > kDensityTolerance) return false;
    } else if (std::get<1>(label) != std::get<1>(o.label)) {
      return false;
    }
    for (std::size_t i = 0; i < children.size(); ++i)
      if (!(children[i] == o.children[i])) return false;
    return true;
  }
};

inline CoarseNode coarse_tree(const TreeNode& tree) {
  CoarseNode out;
  if (tree.is_type1()) {
    out.label = std::make_pair(tree.type1().density, tree.type1().m);
  } else {
    out.label = tree.type2().model;
  }
  for (const auto& c : tree.children) out.children.push_back(coarse_tree(c));
  return out;
}

enum class CloseFailure { None, CoarseMismatch, Inequality };

struct CloseResult {
  bool close = true;
  CloseFailure failure = CloseFailure::None;
  std::string path;
  std::string constraint;  // the first failing inequality
  explicit operator bool() const { return close; }
};

namespace detail {

inline bool within(double lhs, double rhs) { return lhs <= rhs + kClosenessSlack; }

inline std::optional<std::string> node_inequality(const TreeNode& a, const TreeNode& b, double gamma,
                                                  const TreeContext& ctx) {
  if (a.is_type1()) {
    const TypeI& p = a.type1();
    const TypeI& q = b.type1();
    if (!within(ctx.cones(p.cone, q.cone), gamma)) return "dist_H(C_a ∩ ∂B_1, C_a' ∩ ∂B_1) ≤ γ";
    const double dx = distance(p.x, q.x);
    const double dR = std::abs(p.R - q.R);
    if (p.rho > 0.0) {
      if (!(q.rho > 0.0)) return "ρ_a' > 0";
      const double m = gamma * std::min(p.rho, q.rho);
      if (!within(std::abs(p.rho - q.rho), m)) return "|ρ_a − ρ_a'| ≤ γ min(ρ)";
      if (!within(dx, m)) return "|x_a − x_a'| ≤ γ min(ρ)";
      if (!within(dR, m)) return "|R_a − R_a'| ≤ γ min(ρ)";
    } else {
      if (q.rho != 0.0) return "ρ_a' = 0";
      const double m = gamma * std::min(p.R, q.R);
      if (!within(dx, m)) return "|x_a − x_a'| ≤ γ min(R)";
      if (!within(dR, m)) return "|R_a − R_a'| ≤ γ min(R)";
    }
    return std::nullopt;
  }
  const TypeII& p = a.type2();
  const TypeII& q = b.type2();
  const SmoothModelMeta* model = ctx.model(p.model);
  const double rmin = model ? model->min_inner_radius() : 1.0;
  const double m = gamma * std::min(p.R, q.R) * rmin;
  if (!within(distance(p.x, q.x), m)) return "|x_b − x_b'| ≤ γ min(R) min r_α";
  if (!within(std::abs(p.R - q.R), m)) return "|R_b − R_b'| ≤ γ min(R) min r_α";
  return std::nullopt;
}

inline bool close_walk(const TreeNode& a, const TreeNode& b, double gamma, const TreeContext& ctx,
                       const std::string& path, CloseResult& res) {
  if (auto fail = node_inequality(a, b, gamma, ctx)) {
    res = {false, CloseFailure::Inequality, path, *fail};
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!close_walk(a.children[i], b.children[i], gamma, ctx, path + "/" + std::to_string(i), res)) return false;
  }
  return true;
}

}  // namespace detail

/// Same coarse tree, then the node-by-node inequality system.
inline CloseResult gamma_close(const TreeNode& a, const TreeNode& b, double gamma, const TreeContext& ctx = {}) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  if (!(coarse_tree(a) == coarse_tree(b))) return {false, CloseFailure::CoarseMismatch, "root", "coarse trees differ"};
  CloseResult res;
  detail::close_walk(a, b, gamma, ctx, "root", res);
  return res;
}

struct LargeScaleTree {
  std::string base_surface;
  std::string base_metric;
  std::vector<Point8> singular_points;
  std::vector<double> radii;
  std::vector<TreeNode> subtrees;

  bool operator==(const LargeScaleTree&) const = default;
};

inline std::vector<Violation> validate_large_scale(const LargeScaleTree& t, double beta, const TreeContext& ctx = {}) {
  std::vector<Violation> out;
  const std::size_t n = t.singular_points.size();
  if (t.radii.size() != n) out.push_back({"root", "one radius per singular point required"});
  if (t.subtrees.size() != n) out.push_back({"root", "one subtree per singular point required"});
  for (std::size_t i = 0; i < std::min(n, t.radii.size()); ++i) {
    if (!(t.radii[i] > 0.0)) out.push_back({"root", "radius " + std::to_string(i) + " must be positive"});
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(t.singular_points[i], t.singular_points[j]) < t.radii[i] + t.radii[j] - kClosenessSlack) {
        out.push_back({"root", "balls " + std::to_string(j) + " and " + std::to_string(i) + " intersect"});
      }
    }
  }
  for (std::size_t i = 0; i < t.subtrees.size(); ++i) {
    for (auto v : validate_tree(t.subtrees[i], beta, ctx)) {
      v.path = "root/" + std::to_string(i) + v.path.substr(4);
      out.push_back(std::move(v));
    }
  }
  return out;
}

/// Equal root labels and gamma-close subtrees at every singular point.
inline CloseResult gamma_close_large_scale(const LargeScaleTree& a, const LargeScaleTree& b, double gamma,
                                           const TreeContext& ctx = {}) {
  if (a.base_surface != b.base_surface || a.base_metric != b.base_metric ||
      a.singular_points != b.singular_points || a.radii != b.radii || a.subtrees.size() != b.subtrees.size()) {
    return {false, CloseFailure::CoarseMismatch, "root", "root labels differ"};
  }
  for (std::size_t i = 0; i < a.subtrees.size(); ++i) {
    CloseResult r = gamma_close(a.subtrees[i], b.subtrees[i], gamma, ctx);
    if (!r) {
      r.path = "root/" + std::to_string(i) + r.path.substr(4);
      return r;
    }
  }
  return {};
}

}  // namespace hypercone
