#pragma once

// Convergence studies for the linearisation of the minimal surface
// operator on the flat model.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hypercone/error.hpp"
#include "hypercone/graph_geometry.hpp"

namespace hypercone {

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("slope fit needs positive data");
    const double a = std::log(x[i]);
    const double b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Π_a cos²(π x_a / 2): smooth, vanishing to second order on the box.
inline double box_cutoff(std::span<const double> x) {
  double c = 1.0;
  for (double xa : x) {
    const double t = std::cos(0.5 * M_PI * xa);
    c *= t * t;
  }
  return c;
}

/// Test direction χ(x)(1 + sin(π x_1)/2).
inline double study_direction(std::span<const double> x) {
  return box_cutoff(x) * (1.0 + 0.5 * std::sin(M_PI * x[0]));
}

struct LinearizationRow {
  std::string case_name;
  double eps = 0.0;
  double residual_norm = 0.0;
  double fitted_order = 0.0;
};

struct LinearizationStudy {
  int n = 7;
  double h = 1.0 / 16;
  int dims = 2;
  std::vector<double> eps = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> t = {1e-2, 5e-3, 2.5e-3};
  double background_strength = 1.0;  // f = c z^3 for the background case
};

/// Fitted coefficient of ∂_z f in M^{tf}(0) - M^0(0) with f = t z χ,
/// averaged over interior nodes where χ > 1/10.
inline double conformal_coefficient(const FlatModel& model, double t) {
  const GridField zero(model.grid, std::vector<double>(model.grid.size(), 0.0));
  const ZField f{[t](std::span<const double> x, double z) { return t * z * box_cutoff(x); },
                 [t](std::span<const double> x, double) { return t * box_cutoff(x); }};
  const GridField diff = minimal_surface_operator(model.with_conformal(f), zero) - minimal_surface_operator(model, zero);
  const double margin = 4.0 * model.grid.h();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < model.grid.size(); ++i) {
    if (!model.grid.interior(i, margin)) continue;
    const auto x = model.grid.point(i);
    const double chi = box_cutoff(x);
    if (chi <= 0.1) continue;
    sum += diff.values[i] / (t * chi);
    ++count;
  }
  if (count == 0) throw Error("no interior nodes for the conformal fit");
  return sum / static_cast<double>(count);
}

/// Rows for the cases
///   u_flat                 f± = 0, u+ = εv, u- = 0
///   u_background           f± = c z³, u+ = εv, u- = 0
///   conformal_first_order  f+ = tχ(1 + z), f- = 0, u± = 0
///   conformal_coefficient  fitted ∂_z f coefficient (in fitted_order), with
///                          |coefficient - n/2| in residual_norm; the last
///                          row holds the Richardson extrapolation to t = 0.
/// `on_field`, when set, receives each residual field of the first three cases.
using FieldSink = std::function<void(const std::string& case_name, double eps, const GridField& residual)>;

inline std::vector<LinearizationRow> linearization_study(const LinearizationStudy& s, const FieldSink& on_field = {}) {
  FlatModel model;
  model.n = s.n;
  model.grid = Grid::with_spacing(s.dims, s.h);
  validate_model(model);
  const GridField v = GridField::sample(model.grid, study_direction);
  const GridField zero(model.grid, std::vector<double>(model.grid.size(), 0.0));
  const ZField none = ZField::zero();
  const double c = s.background_strength;
  const ZField background{[c](std::span<const double>, double z) { return c * z * z * z; },
                          [c](std::span<const double>, double z) { return 3.0 * c * z * z; }};

  std::vector<LinearizationRow> rows;
  auto add_case = [&](const std::string& name, const std::vector<double>& params, auto&& residual) {
    std::vector<double> norms;
    for (double p : params) {
      const auto r = residual(p);
      if (on_field) on_field(name, p, r.residual);
      norms.push_back(r.norm);
    }
    const double order = loglog_slope(params, norms);
    for (std::size_t i = 0; i < params.size(); ++i) rows.push_back({name, params[i], norms[i], order});
  };

  add_case("u_flat", s.eps, [&](double e) {
    return linearization_residual(model, e * v, zero, none, none);
  });
  add_case("u_background", s.eps, [&](double e) {
    return linearization_residual(model, e * v, zero, background, background);
  });
  add_case("conformal_first_order", s.t, [&](double t) {
    const ZField f{[t](std::span<const double> x, double z) { return t * box_cutoff(x) * (1.0 + z); },
                   [t](std::span<const double> x, double) { return t * box_cutoff(x); }};
    return linearization_residual(model, zero, zero, f, none);
  });

  const double target = 0.5 * s.n;
  for (double t : s.t) {
    const double coef = conformal_coefficient(model, t);
    rows.push_back({"conformal_coefficient", t, std::abs(coef - target), coef});
  }
  if (s.t.size() >= 2) {
    const double t1 = s.t[s.t.size() - 2];
    const double t2 = s.t.back();
    const double c1 = conformal_coefficient(model, t1);
    const double c2 = conformal_coefficient(model, t2);
    // Linear extrapolation in t to t = 0.
    const double extrap = c2 - t2 * (c1 - c2) / (t1 - t2);
    rows.push_back({"conformal_coefficient", 0.0, std::abs(extrap - target), extrap});
  }
  return rows;
}

/// |F^f - 1| / (|z| + |ξ| + [f]) at one sample; the proximity bound holds
/// with C equal to the supremum of this ratio.
inline double proximity_ratio(const FlatModel& model, std::span<const double> x, double z,
                              std::span<const double> xi, double f_c2_star) {
  double xi2 = 0.0;
  for (double c : xi) xi2 += c * c;
  const double scale = std::abs(z) + std::sqrt(xi2) + f_c2_star;
  if (!(scale > 0.0)) return 0.0;
  return std::abs(area_density_F(model, x, z, xi) - 1.0) / scale;
}

}  // namespace hypercone
