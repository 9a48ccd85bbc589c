#pragma once

// Acceptance suites: one row per criterion with id, status, a measured
// summary and the tolerance it was held to. Output depends only on the
// seed; wall-clock limits are enforced but not printed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypercone/closed_forms.hpp"
#include "hypercone/cone_spectrum.hpp"
#include "hypercone/cone_trees.hpp"
#include "hypercone/covering.hpp"
#include "hypercone/graph_geometry.hpp"
#include "hypercone/io.hpp"
#include "hypercone/jacobi_growth.hpp"
#include "hypercone/linearization.hpp"
#include "hypercone/radial_ode.hpp"
#include "hypercone/random.hpp"
#include "hypercone/sampling.hpp"
#include "hypercone/scap.hpp"

namespace hypercone::acceptance {

/// Test-only fault switches.
struct Faults {
  bool flip_discriminant_sign = false;
};

struct Criterion {
  std::string id;
  bool pass = false;
  std::string measured;
  std::string tolerance;
};

namespace detail {

using io::format_number;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- spectrum --------------------------------------------------------------

inline Criterion sp1() {
  Stopwatch clock;
  double worst = 0.0;
  for (int p = 1; p <= 5; ++p) {
    const ConeDescriptor cone{"S" + std::to_string(p) + "xS" + std::to_string(6 - p), ProductSphere{p, 6 - p}};
    const auto ladder = cross_section_spectrum(cone, 10.0);
    const auto rep = stability_report(ladder);
    const auto& e1 = ladder.entries.front();
    const auto [g1, g2] = leading_gamma_plus(ladder);
    worst = std::max({worst, std::abs(rep.mu1 + 6.0), std::abs(rep.margin - 0.25), std::abs(e1.gamma_plus + 2.0),
                      std::abs(e1.gamma_minus + 3.0), std::abs(g2.value_or(1e9) - 0.0),
                      std::abs(rep.gamma_gap - 2.0)});
  }
  const bool fast = clock.seconds() < 1.0;
  return {"SP-1", worst <= 1e-10 && fast, "max_abs_err=" + format_number(worst), "1e-10; runtime<1s"};
}

inline Criterion sp2() {
  std::string mults;
  bool ok = true;
  for (int p = 1; p <= 5; ++p) {
    const auto ladder = cross_section_spectrum({"", ProductSphere{p, 6 - p}}, 1.0);
    int m = -1;
    for (const auto& e : ladder.entries)
      if (std::abs(e.mu) <= kMergeTolerance) m = e.multiplicity;
    ok = ok && m == 8;
    mults += (p > 1 ? "/" : "") + std::to_string(m);
  }
  return {"SP-2", ok, "mult(mu=0)=" + mults, "exact 8"};
}

inline Criterion sp3() {
  const double simons = cone_density(simons_cone());
  const double closed = 105.0 * M_PI / 224.0;
  const double err = std::abs(simons - closed);
  const double plane = density_from_cross_section_area(sphere_area(6), 7);
  return {"SP-3", err <= 1e-12 && plane == 1.0,
          "density_err=" + format_number(err) + ";hyperplane=" + format_number(plane), "1e-12; exact 1"};
}

// ---- growth -----------------------------------------------------------------

inline double quadrature_I(double a, double b, double c, double c2, double r, double K) {
  auto f = [&](double y) {
    const double v = c * std::exp(a * y) + c2 * std::exp(b * y);
    return v * v;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, std::log(r), std::log(K * r), 20, 1e-14);
}

inline Criterion gr1(std::uint64_t seed) {
  Stopwatch clock;
  CounterRng rng(seed, 1);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    double a, b;
    do {
      a = rng.uniform(-3.0, 3.0);
      b = rng.uniform(-3.0, 3.0);
    } while (std::abs(a) < 0.1 || std::abs(b) < 0.1 || std::abs(a + b) < 0.1);
    const double c = rng.uniform(-2.0, 2.0), c2 = rng.uniform(-2.0, 2.0);
    const double r = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
    const double K = rng.uniform(1.2, 30.0);
    worst = std::max(worst, rel(closed_form_I(a, b, c, c2, r, K), quadrature_I(a, b, c, c2, r, K)));
  }
  const bool fast = clock.seconds() < 5.0;
  return {"GR-1", worst <= 1e-8 && fast, "max_rel_err=" + format_number(worst), "1e-8; runtime<5s"};
}

inline Criterion gr2(std::uint64_t seed, const Faults& faults) {
  CounterRng rng(seed, 2);
  double sym = 0.0, scaling = 0.0;
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    double a, b;
    do {
      a = rng.uniform(-3.0, 3.0);
      b = rng.uniform(-3.0, 3.0);
    } while (std::abs(a) < 0.1 || std::abs(b) < 0.1 || std::abs(a + b) < 0.1 || std::abs(a - b) < 0.1);
    const double K = rng.uniform(1.5, 20.0);
    const double d = discriminant_power(K, a, b);
    const double sign_input = faults.flip_discriminant_sign ? -d : d;
    sym = std::max(sym, rel(discriminant_power(K, b, a), d));
    scaling = std::max(scaling, rel(std::pow(K, 6 * a + 6 * b) * discriminant_power(K, -a, -b), d));
    const QuadraticForm q = three_scale_form_power(a, b, 1.0, K);
    Eigen::Matrix2d m;
    m << q.a, q.b, q.b, q.c;
    const bool pd = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().minCoeff() > 0.0;
    if ((sign_input < 0.0 && q.a > 0.0) != pd) ++mismatches;
  }
  return {"GR-2", sym <= 1e-9 && scaling <= 1e-9 && mismatches == 0,
          "sym=" + format_number(sym) + ";scaling=" + format_number(scaling) +
              ";pd_mismatches=" + std::to_string(mismatches),
          "1e-9; 0 mismatches"};
}

inline Criterion gr3(std::uint64_t seed) {
  Stopwatch clock;
  double K = 0.0;
  try {
    K = find_threshold_K(1.0, Branch::Power, io::default_grid()).K_star;
  } catch (const Error& e) {
    return {"GR-3", false, e.what(), "K* on ladder <= 50"};
  }
  const auto ladder = cross_section_spectrum(simons_cone(), 30.0);
  CounterRng rng(seed, 3);
  int strict = 0;
  double least = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    std::vector<JacobiTerm> terms;
    for (std::size_t j = 1; j <= 5; ++j) {
      if (rng.coin(0.6)) terms.push_back({j, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    if (terms.empty()) terms.push_back({1, 1.0, 0.0});
    const JacobiCoefficients coeffs(ladder, terms);
    const auto res = three_scale_check(coeffs, -1.0, K, 1.0);
    strict += res.strict ? 1 : 0;
    least = std::min(least, res.lhs);
  }
  const bool fast = clock.seconds() < 30.0;
  return {"GR-3", strict == 100 && fast,
          "K*=" + format_number(K) + ";strict=" + std::to_string(strict) + "/100;min_lhs=" + format_number(least),
          "100/100 strict; runtime<30s"};
}

inline std::vector<AnnulusSample> annulus_samples(const RadialProfile& prof, int n) {
  std::vector<AnnulusSample> out;
  for (int k = 0; k < 6; ++k) {
    const double s = 0.5 * std::pow(2.0, -k);
    out.push_back({s, profile_annulus_l2(prof, n, s)});
  }
  return out;
}

inline Criterion gr4() {
  double fit = 0.0, rate_err = 0.0;
  for (double g : {-2.0, -3.0}) {
    const auto prof = solve_radial_jacobi({-6.0, 7, 0.0, 0.0, PerturbationProfile::Constant}, 1.0, g, 0.01);
    for (std::size_t i = 0; i < prof.v.size(); ++i) fit = std::max(fit, rel(prof.v[i], std::exp(g * prof.log_r[i])));
    rate_err = std::max(rate_err, std::abs(estimate_rate_from_samples(annulus_samples(prof, 7), 7) - g));
  }
  const double K = 6.0;
  const auto perturbed =
      solve_radial_jacobi({-6.0, 7, 0.02, 0.02, PerturbationProfile::Bump}, 1.0, -2.0, std::pow(K, -3.0));
  double lhs = 0.0;
  const bool convex = perturbed_convexity_check(perturbed, -1.0, K, 0.02, 7, &lhs);
  return {"GR-4", fit <= 1e-8 && rate_err <= 1e-3 && convex,
          "ode_rel_err=" + format_number(fit) + ";rate_err=" + format_number(rate_err) +
              ";perturbed_lhs=" + format_number(lhs),
          "1e-8; 1e-3; lhs>0"};
}

// ---- graph ------------------------------------------------------------------

inline Criterion gg1() {
  Stopwatch clock;
  std::string measured;
  bool ok = true;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    LinearizationStudy s;
    s.h = h;
    const auto rows = linearization_study(s);
    double order = 0.0, flat = 0.0, coef = 0.0;
    for (const auto& r : rows) {
      if (r.case_name == "u_background") order = r.fitted_order;
      if (r.case_name == "u_flat") flat = r.fitted_order;
      if (r.case_name == "conformal_coefficient" && r.eps == 0.0) coef = r.fitted_order;
    }
    ok = ok && std::abs(order - 2.0) <= 0.2 && flat >= 1.8 && std::abs(coef - 3.5) <= 0.035;
    measured += (measured.empty() ? "" : ";") + std::string("h=") + format_number(h) +
                ":order=" + format_number(std::round(order * 1e4) / 1e4) +
                ",flat_order=" + format_number(std::round(flat * 1e4) / 1e4) +
                ",coef=" + format_number(std::round(coef * 1e6) / 1e6);
  }
  ok = ok && clock.seconds() < 60.0;
  return {"GG-1", ok, measured, "order 2+-0.2; coef 3.5+-1%; runtime<60s"};
}

inline Criterion gg2() {
  double worst = 0.0;
  for (double lambda : {0.5, 2.0, 3.0, 7.0}) {
    for (int k = 0; k <= 2; ++k) {
      const Grid g(2, 33, 1.0);
      auto phi = [](std::span<const double> x) { return x[0] * x[0] * x[1] + 0.3 * x[1] * x[1] * x[1]; };
      const GridField base = GridField::sample(g, phi);
      const WeightedField wf(base, std::vector<double>(g.size(), 0.7));
      const Grid gl(2, 33, lambda);
      // λφ(x/λ) is again homogeneous data on the dilated grid.
      const GridField scaled = GridField::sample(gl, [&](std::span<const double> y) {
        const double x[2] = {y[0] / lambda, y[1] / lambda};
        return lambda * phi(x);
      });
      const WeightedField wl(scaled, std::vector<double>(gl.size(), 0.7 * lambda));
      worst = std::max(worst, rel(ck_star_norm(wl, k), ck_star_norm(wf, k)));
    }
  }
  return {"GG-2", worst <= 1e-12, "max_rel_err=" + format_number(worst), "1e-12"};
}

// ---- trees ------------------------------------------------------------------

inline Criterion ct1(std::uint64_t seed) {
  const TreeContext ctx = sampling::demo_context();
  CounterRng rng(seed, 11);
  int invalid = 0, reflex = 0, asym = 0, nonmono = 0, coarse = 0, close_pairs = 0;
  const std::vector<double> gammas{0.001, 0.002, 0.004, 0.006, 0.008, 0.0099};
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t shape = rng.next_u64();
    const double scale = rng.uniform(0.0, 0.01);
    sampling::TreeGenerator ga(ctx, shape, rng.next_u64(), scale);
    sampling::TreeGenerator gb(ctx, shape, rng.next_u64(), scale);
    const TreeNode a = ga.generate();
    const TreeNode b = gb.generate();
    if (!validate_tree(a, 0.01, ctx).empty() || !validate_tree(b, 0.01, ctx).empty()) ++invalid;
    bool was_close = false;
    for (double g : gammas) {
      if (!gamma_close(a, a, g, ctx)) ++reflex;
      const bool ab = static_cast<bool>(gamma_close(a, b, g, ctx));
      if (ab != static_cast<bool>(gamma_close(b, a, g, ctx))) ++asym;
      if (was_close && !ab) ++nonmono;
      was_close = was_close || ab;
    }
    close_pairs += was_close ? 1 : 0;
    sampling::TreeGenerator gc(ctx, rng.next_u64(), 0, 0.0);
    const TreeNode c = gc.generate();
    if (!(coarse_tree(a) == coarse_tree(c))) {
      const auto r = gamma_close(a, c, 1e9, ctx);
      if (r || r.failure != CloseFailure::CoarseMismatch) ++coarse;
    }
  }
  return {"CT-1", invalid + reflex + asym + nonmono + coarse == 0,
          "invalid=" + std::to_string(invalid) + ";reflexive_fail=" + std::to_string(reflex) +
              ";asymmetric=" + std::to_string(asym) + ";non_monotone=" + std::to_string(nonmono) +
              ";coarse_fail=" + std::to_string(coarse) + ";close_pairs=" + std::to_string(close_pairs),
          "all zero over 500 pairs"};
}

inline Point8 random_point(CounterRng& rng, double half_width) {
  Point8 x;
  for (auto& c : x) c = rng.uniform(-half_width, half_width);
  return x;
}

/// Uniform-ish point within distance `radius` of `center`.
inline Point8 jitter_in_ball(CounterRng& rng, const Point8& center, double radius) {
  Point8 d;
  double n2 = 0.0;
  for (auto& c : d) {
    c = rng.normal();
    n2 += c * c;
  }
  const double scale = radius * std::pow(rng.uniform(), 1.0 / 8.0) / std::sqrt(n2);
  Point8 out;
  for (std::size_t i = 0; i < 8; ++i) out[i] = center[i] + scale * d[i];
  return out;
}

inline double log_uniform(CounterRng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

inline Criterion ct2(std::uint64_t seed) {
  CounterRng rng(seed, 12);
  const CubeManifold base{1.0, 0.5};
  int defects = 0, unsound2 = 0, unsound1 = 0, pairs2 = 0, pairs1 = 0;
  const double gamma = 0.009;

  // Type-II: one smooth model whose least inner radius is r0.
  TreeContext ctx = sampling::demo_context();
  const double r0 = ctx.models.at("S2").min_inner_radius();
  int attempts = 0;
  while (pairs2 < 1000 && attempts < 200000) {
    ++attempts;
    const Point8 x = random_point(rng, 1.0);
    const double R = log_uniform(rng, 1e-3, 1.0);
    Type2Cell cell;
    try {
      cell = covering_cell_type2(x, R, gamma, r0, base);
    } catch (const Error&) {
      ++defects;
      continue;
    }
    const double b = 1.0 + gamma * r0 / 2.0;
    const double radius = type2_ball_radius(cell.k, gamma, r0, base);
    const LatticeBallCover cover(radius, base.half_width);
    const Point8 x2 = jitter_in_ball(rng, cover.center(cell.ball), radius);
    const double R2 = std::pow(b, static_cast<double>(cell.k)) * (1.0 + rng.uniform() * (b - 1.0));
    Type2Cell cell2;
    try {
      cell2 = covering_cell_type2(x2, R2, gamma, r0, base);
    } catch (const Error&) {
      continue;
    }
    if (!(cell2 == cell)) continue;
    ++pairs2;
    const TreeNode a{TypeII{"S2", x, R}, {}}, c{TypeII{"S2", x2, R2}, {}};
    if (!gamma_close(a, c, gamma, ctx)) ++unsound2;
  }

  // Type-I: thirty cones of one density on a line, under a γ/2 net.
  ConeMetric metric;
  std::vector<std::string> cones;
  std::vector<double> pos;
  for (int i = 0; i < 30; ++i) {
    cones.push_back("K" + std::to_string(i));
    pos.push_back(0.1 * i / 29.0);
  }
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = i + 1; j < cones.size(); ++j) metric.set(cones[i], cones[j], std::abs(pos[i] - pos[j]));
  const Type1Scheme scheme{greedy_cone_net(cones, metric, gamma), base};
  std::vector<std::size_t> net_of;
  for (const auto& c : cones) net_of.push_back(scheme.cones.index_of(c, gamma));
  TreeContext ctx1;
  ctx1.cones = metric;
  attempts = 0;
  while (pairs1 < 1000 && attempts < 200000) {
    ++attempts;
    const auto ci = static_cast<std::size_t>(rng.integer(0, 29));
    const std::string& cone = cones[ci];
    const Point8 x = random_point(rng, 1.0);
    const double R = log_uniform(rng, 1e-3, 1.0);
    const double rho = rng.coin(0.3) ? 0.0 : R * rng.uniform(0.01, 0.5);
    Type1Cell cell;
    try {
      cell = covering_cell_type1(cone, x, R, rho, gamma, scheme);
    } catch (const Error&) {
      ++defects;
      continue;
    }
    const double b0 = 1.0 + gamma / 2.0;
    double rho2 = 0.0, R2 = 0.0, radius = 0.0;
    if (cell.rho_k) {
      const double lo = std::pow(b0, static_cast<double>(*cell.rho_k));
      rho2 = lo * (1.0 + rng.uniform() * (b0 - 1.0));
      const double scale = std::min(1.0, lo);
      const double cb = 1.0 + gamma / 2.0 * scale;
      const double Rlo = std::pow(cb, static_cast<double>(cell.R_k));
      R2 = std::min(1.0, Rlo * (1.0 + rng.uniform() * (cb - 1.0)));
      radius = std::min(base.injrad, Rlo * gamma * scale / 10.0);
    } else {
      const double Rlo = std::pow(b0, static_cast<double>(cell.R_k));
      R2 = std::min(1.0, Rlo * (1.0 + rng.uniform() * (b0 - 1.0)));
      radius = std::min(base.injrad, Rlo * gamma / 10.0);
    }
    std::vector<std::string> same_net;
    for (std::size_t j = 0; j < cones.size(); ++j)
      if (net_of[j] == net_of[ci]) same_net.push_back(cones[j]);
    const std::string& cone2 = same_net[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(same_net.size()) - 1))];
    const LatticeBallCover cover(radius, base.half_width);
    const Point8 x2 = jitter_in_ball(rng, cover.center(cell.ball), radius);
    Type1Cell cell2;
    try {
      cell2 = covering_cell_type1(cone2, x2, R2, rho2, gamma, scheme);
    } catch (const Error&) {
      continue;
    }
    if (!(cell2 == cell)) continue;
    ++pairs1;
    const TreeNode a{TypeI{cone, 1.5, 1, x, R, rho}, {}}, c{TypeI{cone2, 1.5, 1, x2, R2, rho2}, {}};
    if (!gamma_close(a, c, gamma, ctx1)) ++unsound1;
  }
  const bool ok = pairs2 == 1000 && pairs1 == 1000 && unsound1 == 0 && unsound2 == 0 && defects == 0;
  return {"CT-2", ok,
          "type2_pairs=" + std::to_string(pairs2) + ";type2_unsound=" + std::to_string(unsound2) +
              ";type1_pairs=" + std::to_string(pairs1) + ";type1_unsound=" + std::to_string(unsound1) +
              ";defects=" + std::to_string(defects),
          "1000 pairs per kind; 0 unsound; 0 defects"};
}

inline Criterion ct3(std::uint64_t seed) {
  int failures = 0;
  // Hand-computed values.
  const DegenerationDag leaf({{"B", 1.2}}, {});
  failures += scap_cone(leaf, "B") == 1 ? 0 : 1;
  const DegenerationDag branch({{"A", 2.0}, {"B", 1.2}}, {{"A", {"B", "B"}}, {"A", {"B"}}});
  failures += scap_cone(branch, "A") == 3 ? 0 : 1;
  const DegenerationDag chain({{"A", 2.0}, {"B", 1.5}, {"C", 1.2}}, {{"A", {"B"}}, {"B", {"C"}}});
  failures += scap_cone(chain, "A") == 3 ? 0 : 1;
  failures += scap_surface({}, false, chain) == 0 ? 0 : 1;
  failures += scap_surface({"C", "A"}, false, chain) == 4 ? 0 : 1;
  failures += scap_surface({"C", "A"}, true, chain) == 8 ? 0 : 1;
  ScapTable corrupt = scap_table(branch);
  corrupt["A"] = 2;
  failures += scap_usc_check(branch, "A", &corrupt) ? 1 : 0;

  CounterRng rng(seed, 13);
  int usc_fail = 0, mono_fail = 0, bound_fail = 0;
  for (int i = 0; i < 100; ++i) {
    const DegenerationDag dag = sampling::random_dag(rng);
    const ScapTable table = scap_table(dag);
    for (const auto& c : dag.cones()) {
      if (!scap_usc_check(dag, c.id)) ++usc_fail;
      std::uint64_t widest = 0, lower = 0;
      for (const Scenario* s : dag.scenarios_of(c.id)) widest = std::max<std::uint64_t>(widest, s->children.size());
      for (const auto& d : dag.cones())
        if (d.density < c.density) lower = std::max(lower, table.at(d.id));
      if (table.at(c.id) > 1 + widest * lower) ++bound_fail;
    }
    const DegenerationDag grown = dag.with_scenario(sampling::random_scenario(rng, dag));
    const ScapTable after = scap_table(grown);
    for (const auto& [id, v] : table)
      if (after.at(id) < v) ++mono_fail;
  }
  return {"CT-3", failures + usc_fail + mono_fail + bound_fail == 0,
          "examples_fail=" + std::to_string(failures) + ";usc_fail=" + std::to_string(usc_fail) +
              ";monotone_fail=" + std::to_string(mono_fail) + ";bound_fail=" + std::to_string(bound_fail),
          "exact; 100 DAGs"};
}

}  // namespace detail

inline const std::vector<std::string>& suites() {
  static const std::vector<std::string> names{"spectrum", "growth", "graph", "trees", "all"};
  return names;
}

inline std::vector<Criterion> run_suite(const std::string& suite, std::uint64_t seed, const Faults& faults = {}) {
  if (std::find(suites().begin(), suites().end(), suite) == suites().end()) {
    throw Error("unknown suite '" + suite + "'");
  }
  const bool all = suite == "all";
  std::vector<Criterion> out;
  auto guarded = [&](const std::string& id, const std::function<Criterion()>& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({id, false, std::string("error: ") + e.what(), ""});
    }
  };
  if (all || suite == "spectrum") {
    guarded("SP-1", detail::sp1);
    guarded("SP-2", detail::sp2);
    guarded("SP-3", detail::sp3);
  }
  if (all || suite == "growth") {
    guarded("GR-1", [&] { return detail::gr1(seed); });
    guarded("GR-2", [&] { return detail::gr2(seed, faults); });
    guarded("GR-3", [&] { return detail::gr3(seed); });
    guarded("GR-4", detail::gr4);
  }
  if (all || suite == "graph") {
    guarded("GG-1", detail::gg1);
    guarded("GG-2", detail::gg2);
  }
  if (all || suite == "trees") {
    guarded("CT-1", [&] { return detail::ct1(seed); });
    guarded("CT-2", [&] { return detail::ct2(seed); });
    guarded("CT-3", [&] { return detail::ct3(seed); });
  }
  return out;
}

inline std::string to_csv(const std::vector<Criterion>& rows) {
  io::CsvWriter csv({"id", "status", "measured", "tolerance"});
  for (const auto& r : rows) csv.row(r.id, r.pass ? "PASS" : "FAIL", r.measured, r.tolerance);
  return csv.str();
}

}  // namespace hypercone::acceptance
