#pragma once

// JSON descriptors for cones, coefficients, trees, DAGs and grids, and an
// RFC-4180 CSV writer with locale-independent number formatting.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypercone/closed_forms.hpp"
#include "hypercone/cone_spectrum.hpp"
#include "hypercone/cone_trees.hpp"
#include "hypercone/error.hpp"
#include "hypercone/jacobi_growth.hpp"
#include "hypercone/scap.hpp"

namespace hypercone::io {

using nlohmann::json;

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(long long v) { return std::to_string(v); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  template <typename... Cells>
  CsvWriter& row(const Cells&... cells) {
    static_assert(sizeof...(Cells) > 0);
    std::vector<std::string> out;
    (out.push_back(cell(cells)), ...);
    if (out.size() != columns_) throw Error("CSV row width does not match header");
    row_strings(out);
    return *this;
  }

  const std::string& str() const { return text_; }

  void write(const std::string& path) const {
    if (path.empty() || path == "-") return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text_;
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(double d) { return format_number(d); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(unsigned long v) { return std::to_string(v); }
  static std::string cell(unsigned long long v) { return std::to_string(v); }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += quote(cells[i]);
    }
    text_ += "\r\n";
  }

  std::size_t columns_;
  std::string text_;
};

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(std::string("field '") + what + "' must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw Error(std::string("field '") + what + "' must be an integer");
  return j.get<int>();
}

inline std::string text(const json& j, const char* what) {
  if (!j.is_string()) throw Error(std::string("field '") + what + "' must be a string");
  return j.get<std::string>();
}

inline Point8 point(const json& j, const char* what) {
  if (!j.is_array() || j.size() > 8) throw Error(std::string("field '") + what + "' must be an array of at most 8 numbers");
  Point8 p{};
  for (std::size_t i = 0; i < j.size(); ++i) p[i] = number(j[i], what);
  return p;
}

inline json point_json(const Point8& p) { return json(std::vector<double>(p.begin(), p.end())); }

}  // namespace detail

// ---- cones -------------------------------------------------------------

inline ConeDescriptor cone_from_json(const json& j) {
  using namespace detail;
  ConeDescriptor c;
  c.label = j.contains("label") ? text(j.at("label"), "label") : std::string();
  const std::string kind = text(require(j, "kind"), "kind");
  if (kind == "product_sphere") {
    c.kind = ProductSphere{integer(require(j, "p"), "p"), integer(require(j, "q"), "q")};
  } else if (kind == "custom") {
    CustomSpectrum s;
    s.n = integer(require(j, "n"), "n");
    const json& entries = require(j, "entries");
    if (!entries.is_array()) throw Error("field 'entries' must be an array");
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 2) throw Error("spectrum entries must be [mu, mult] pairs");
      s.entries.push_back({number(e[0], "mu"), integer(e[1], "mult")});
    }
    if (j.contains("density") && !j.at("density").is_null()) s.density = number(j.at("density"), "density");
    c.kind = std::move(s);
  } else {
    throw Error("unknown cone kind '" + kind + "'");
  }
  return c;
}

inline json cone_to_json(const ConeDescriptor& c) {
  json j;
  j["label"] = c.label;
  if (const auto* ps = std::get_if<ProductSphere>(&c.kind)) {
    j["kind"] = "product_sphere";
    j["p"] = ps->p;
    j["q"] = ps->q;
  } else {
    const auto& s = std::get<CustomSpectrum>(c.kind);
    j["kind"] = "custom";
    j["n"] = s.n;
    json entries = json::array();
    for (const auto& e : s.entries) entries.push_back({e.mu, e.multiplicity});
    j["entries"] = entries;
    if (s.density) j["density"] = *s.density;
  }
  return j;
}

// ---- coefficients --------------------------------------------------------

inline std::vector<JacobiTerm> terms_from_json(const json& j) {
  if (!j.is_array()) throw Error("coefficients must be an array of [j, c_plus, c_minus]");
  std::vector<JacobiTerm> out;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) throw Error("coefficient entries must be [j, c_plus, c_minus]");
    if (!t[0].is_number_integer() || t[0].get<long long>() < 1) throw Error("coefficient index must be a positive integer");
    out.push_back({t[0].get<std::size_t>(), detail::number(t[1], "c_plus"), detail::number(t[2], "c_minus")});
  }
  return out;
}

inline json terms_to_json(const std::vector<JacobiTerm>& terms) {
  json j = json::array();
  for (const auto& t : terms) j.push_back({t.j, t.c_plus, t.c_minus});
  return j;
}

// ---- trees ---------------------------------------------------------------

inline TreeNode tree_from_json(const json& j) {
  using namespace detail;
  TreeNode node;
  const std::string kind = text(require(j, "kind"), "kind");
  if (kind == "I") {
    TypeI a;
    a.cone = j.contains("cone") ? text(j.at("cone"), "cone") : std::string();
    a.density = number(require(j, "density"), "density");
    a.m = integer(require(j, "m"), "m");
    a.x = point(require(j, "x"), "x");
    a.R = number(require(j, "R"), "R");
    a.rho = j.contains("rho") ? number(j.at("rho"), "rho") : 0.0;
    node.kind = a;
  } else if (kind == "II") {
    TypeII b;
    b.model = text(require(j, "model"), "model");
    b.x = point(require(j, "x"), "x");
    b.R = number(require(j, "R"), "R");
    node.kind = b;
  } else {
    throw Error("node kind must be \"I\" or \"II\"");
  }
  if (j.contains("children")) {
    if (!j.at("children").is_array()) throw Error("field 'children' must be an array");
    for (const auto& c : j.at("children")) node.children.push_back(tree_from_json(c));
  }
  return node;
}

inline json tree_to_json(const TreeNode& node) {
  json j;
  if (node.is_type1()) {
    const TypeI& a = node.type1();
    j["kind"] = "I";
    j["cone"] = a.cone;
    j["density"] = a.density;
    j["m"] = a.m;
    j["x"] = detail::point_json(a.x);
    j["R"] = a.R;
    j["rho"] = a.rho;
  } else {
    const TypeII& b = node.type2();
    j["kind"] = "II";
    j["model"] = b.model;
    j["x"] = detail::point_json(b.x);
    j["R"] = b.R;
  }
  json children = json::array();
  for (const auto& c : node.children) children.push_back(tree_to_json(c));
  j["children"] = children;
  return j;
}

inline SmoothModelMeta model_from_json(const json& j) {
  using namespace detail;
  SmoothModelMeta m;
  m.id = text(require(j, "id"), "id");
  m.density_at_infinity = j.contains("density_at_infinity") ? number(j.at("density_at_infinity"), "density_at_infinity") : 1.0;
  m.outer_cone = j.contains("outer_cone") ? text(j.at("outer_cone"), "outer_cone") : std::string();
  m.sigma = j.contains("sigma") ? number(j.at("sigma"), "sigma") : 0.1;
  if (j.contains("inner_balls")) {
    for (const auto& b : j.at("inner_balls")) {
      InnerBall ball;
      ball.y = point(require(b, "y"), "y");
      ball.r = number(require(b, "r"), "r");
      ball.cone = b.contains("cone") ? text(b.at("cone"), "cone") : std::string();
      ball.multiplicity = b.contains("multiplicity") ? integer(b.at("multiplicity"), "multiplicity") : 1;
      m.inner_balls.push_back(ball);
    }
  }
  return m;
}

inline json model_to_json(const SmoothModelMeta& m) {
  json balls = json::array();
  for (const auto& b : m.inner_balls) {
    balls.push_back({{"y", detail::point_json(b.y)}, {"r", b.r}, {"cone", b.cone}, {"multiplicity", b.multiplicity}});
  }
  return {{"id", m.id},
          {"density_at_infinity", m.density_at_infinity},
          {"outer_cone", m.outer_cone},
          {"inner_balls", balls},
          {"sigma", m.sigma}};
}

inline TreeContext context_from_json(const json& j) {
  TreeContext ctx;
  if (j.contains("models")) {
    for (const auto& m : j.at("models")) {
      SmoothModelMeta meta = model_from_json(m);
      const std::string id = meta.id;
      if (!ctx.models.emplace(id, std::move(meta)).second) throw Error("duplicate model id '" + id + "'");
    }
  }
  if (j.contains("cone_distances")) {
    for (const auto& d : j.at("cone_distances")) {
      if (!d.is_array() || d.size() != 3) throw Error("cone distances must be [a, b, d] triples");
      ctx.cones.set(detail::text(d[0], "cone"), detail::text(d[1], "cone"), detail::number(d[2], "distance"));
    }
  }
  return ctx;
}

inline json context_to_json(const TreeContext& ctx) {
  json models = json::array();
  for (const auto& [id, m] : ctx.models) models.push_back(model_to_json(m));
  json dists = json::array();
  for (const auto& [key, d] : ctx.cones.entries()) dists.push_back({key.first, key.second, d});
  return {{"models", models}, {"cone_distances", dists}};
}

inline LargeScaleTree large_scale_from_json(const json& j) {
  using namespace detail;
  LargeScaleTree t;
  t.base_surface = j.contains("base_surface") ? text(j.at("base_surface"), "base_surface") : std::string();
  t.base_metric = j.contains("base_metric") ? text(j.at("base_metric"), "base_metric") : std::string();
  for (const auto& p : require(j, "singular_points")) t.singular_points.push_back(point(p, "singular_points"));
  for (const auto& r : require(j, "radii")) t.radii.push_back(number(r, "radii"));
  for (const auto& s : require(j, "subtrees")) t.subtrees.push_back(tree_from_json(s));
  return t;
}

inline json large_scale_to_json(const LargeScaleTree& t) {
  json pts = json::array();
  for (const auto& p : t.singular_points) pts.push_back(detail::point_json(p));
  json subs = json::array();
  for (const auto& s : t.subtrees) subs.push_back(tree_to_json(s));
  return {{"base_surface", t.base_surface}, {"base_metric", t.base_metric}, {"singular_points", pts},
          {"radii", t.radii}, {"subtrees", subs}};
}

/// A tree file: either a bare node record, a large-scale tree, or an
/// envelope {"models", "cone_distances", "root" | "large_scale"}.
struct TreeDocument {
  TreeContext context;
  std::optional<TreeNode> root;
  std::optional<LargeScaleTree> large_scale;
};

inline TreeDocument tree_document_from_json(const json& j) {
  TreeDocument doc;
  if (j.contains("kind")) {
    doc.root = tree_from_json(j);
    return doc;
  }
  if (j.contains("subtrees")) {
    doc.large_scale = large_scale_from_json(j);
    return doc;
  }
  doc.context = context_from_json(j);
  if (j.contains("root")) doc.root = tree_from_json(j.at("root"));
  if (j.contains("large_scale")) doc.large_scale = large_scale_from_json(j.at("large_scale"));
  if (!doc.root.has_value() == !doc.large_scale.has_value()) {
    throw Error("tree file needs exactly one of 'root' or 'large_scale'");
  }
  return doc;
}

inline json tree_document_to_json(const TreeDocument& doc) {
  json j = context_to_json(doc.context);
  if (doc.root) j["root"] = tree_to_json(*doc.root);
  if (doc.large_scale) j["large_scale"] = large_scale_to_json(*doc.large_scale);
  return j;
}

// ---- DAG and surfaces ------------------------------------------------------

inline DegenerationDag dag_from_json(const json& j) {
  using namespace detail;
  std::vector<DagCone> cones;
  for (const auto& c : require(j, "cones")) cones.push_back({text(require(c, "id"), "id"), number(require(c, "density"), "density")});
  std::vector<Scenario> scenarios;
  if (j.contains("scenarios")) {
    for (const auto& s : j.at("scenarios")) {
      Scenario sc;
      sc.parent = text(require(s, "parent"), "parent");
      for (const auto& c : require(s, "children")) sc.children.push_back(text(c, "children"));
      scenarios.push_back(std::move(sc));
    }
  }
  return DegenerationDag(std::move(cones), std::move(scenarios));
}

inline json dag_to_json(const DegenerationDag& dag) {
  json cones = json::array();
  for (const auto& c : dag.cones()) cones.push_back({{"id", c.id}, {"density", c.density}});
  json scenarios = json::array();
  for (const auto& s : dag.scenarios()) scenarios.push_back({{"parent", s.parent}, {"children", s.children}});
  return {{"cones", cones}, {"scenarios", scenarios}};
}

struct SurfaceSpec {
  bool one_sided = false;
  std::vector<std::string> singular_points;  // tangent cone ids
};

inline SurfaceSpec surface_from_json(const json& j) {
  SurfaceSpec s;
  if (j.contains("one_sided")) {
    if (!j.at("one_sided").is_boolean()) throw Error("field 'one_sided' must be a boolean");
    s.one_sided = j.at("one_sided").get<bool>();
  }
  for (const auto& p : detail::require(j, "singular_points")) s.singular_points.push_back(detail::text(p, "singular_points"));
  return s;
}

// ---- grids -----------------------------------------------------------------

/// {alpha_min, alpha_max, step, "K": [...]} or {..., K_min, K_max, K_step}.
inline GridSpec grid_from_json(const json& j) {
  using namespace detail;
  GridSpec g;
  if (j.contains("alpha_min")) g.alpha_min = number(j.at("alpha_min"), "alpha_min");
  if (j.contains("alpha_max")) g.alpha_max = number(j.at("alpha_max"), "alpha_max");
  if (j.contains("step")) g.step = number(j.at("step"), "step");
  if (!(g.step > 0.0) || !(g.alpha_max >= g.alpha_min)) throw Error("grid exponent range is empty");
  if (j.contains("K")) {
    for (const auto& k : j.at("K")) g.K_ladder.push_back(number(k, "K"));
  } else {
    const double lo = j.contains("K_min") ? number(j.at("K_min"), "K_min") : 2.5;
    const double hi = j.contains("K_max") ? number(j.at("K_max"), "K_max") : 50.0;
    const double st = j.contains("K_step") ? number(j.at("K_step"), "K_step") : 0.5;
    if (!(st > 0.0)) throw Error("K_step must be positive");
    g.K_ladder = GridSpec::ladder(lo, hi, st);
  }
  return g;
}

inline GridSpec default_grid() {
  GridSpec g;
  g.K_ladder = GridSpec::ladder(2.5, 50.0, 0.5);
  return g;
}

}  // namespace hypercone::io
