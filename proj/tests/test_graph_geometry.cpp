#include <catch_amalgamated.hpp>

#include <cmath>

#include "hypercone/field_io.hpp"
#include "hypercone/graph_geometry.hpp"
#include "hypercone/linearization.hpp"
#include "hypercone/random.hpp"

using namespace hypercone;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridField constant(const Grid& g, double c) { return GridField(g, std::vector<double>(g.size(), c)); }

ZField constant_f(double c) {
  return {[c](std::span<const double>, double) { return c; }, [](std::span<const double>, double) { return 0.0; }};
}

// Smooth bump supported in |x_a| < w.
double bump(std::span<const double> x, double w, double shift) {
  double v = 1.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double y = (x[a] - (a == 0 ? shift : 0.0)) / w;
    if (std::abs(y) >= 1.0) return 0.0;
    v *= std::exp(1.0 - 1.0 / (1.0 - y * y));
  }
  return v;
}

}  // namespace

TEST_CASE("C^k_* norm examples") {
  const Grid g = Grid::with_spacing(2, 1.0 / 8);
  CHECK_THAT(ck_star_norm(WeightedField(constant(g, -3.0), std::vector<double>(g.size(), 0.5)), 0), WithinRel(6.0, 1e-15));
  const GridField x1 = GridField::sample(g, [](std::span<const double> x) { return x[0]; });
  CHECK_THAT(ck_star_norm(WeightedField(x1, std::vector<double>(g.size(), 1.0)), 1), WithinAbs(2.0, 1e-14));
  CHECK_THAT(ck_star_norm(WeightedField(x1, std::vector<double>(g.size(), 1.0)), 2), WithinAbs(2.0, 1e-12));
  CHECK_THROWS(ck_star_norm(WeightedField(x1, std::vector<double>(g.size(), 1.0)), 3));
  CHECK_THROWS(WeightedField(x1, std::vector<double>(g.size(), 0.0)));
}

TEST_CASE("C^k_* norm: homogeneity and rescaling invariance") {
  CounterRng rng(31);
  const Grid g(2, 17, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(0.5, 2);
    auto phi = [&](std::span<const double> x) { return a * x[0] * x[0] + b * x[0] * x[1] + std::sin(c * x[1]); };
    const GridField f = GridField::sample(g, phi);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = 0.5 + 0.25 * std::abs(g.coordinate(i, 0));
    const double lambda = rng.uniform(0.2, 5.0);
    // λ²g: lengths scale by λ, so the grid extent, samples and weight all scale by λ.
    const Grid gl(2, 17, lambda);
    const GridField fl = GridField::sample(gl, [&](std::span<const double> y) {
      const double x[2] = {y[0] / lambda, y[1] / lambda};
      return lambda * phi(x);
    });
    std::vector<double> wl(w);
    for (auto& v : wl) v *= lambda;
    for (int k = 0; k <= 2; ++k) {
      const double base = ck_star_norm(WeightedField(f, w), k);
      CHECK_THAT(ck_star_norm(WeightedField(fl, wl), k), WithinRel(base, 1e-12));
      CHECK_THAT(ck_star_norm(WeightedField(-2.5 * f, w), k), WithinRel(2.5 * base, 1e-14));
    }
  }
}

TEST_CASE("area density examples") {
  const FlatModel m;
  const double x[2] = {0.1, -0.2};
  const double zero[2] = {0.0, 0.0};
  CHECK(area_density_F(m, x, 0.0, zero) == 1.0);
  const double xi[2] = {0.3, 0.4};
  CHECK_THAT(area_density_F(m, x, 0.2, xi), WithinRel(std::sqrt(1.25), 1e-15));
  const FlatModel mc = m.with_conformal(constant_f(0.05));
  CHECK_THAT(area_density_F(mc, x, 0.0, zero), WithinRel(std::pow(1.05, 3.5), 1e-15));
  CHECK_THROWS_AS(area_density_F(m, x, 1.0, zero), DomainError);
  FlatModel bad = m;
  bad.metric = MetricField{[](std::span<const double>, double) { return Eigen::MatrixXd(-Eigen::MatrixXd::Identity(7, 7)); },
                           [](std::span<const double>, double) { return Eigen::MatrixXd(Eigen::MatrixXd::Zero(7, 7)); }};
  CHECK_THROWS_WITH(area_density_F(bad, x, 0.0, zero), "degenerate graph metric");
}

TEST_CASE("metric perturbations enter through det_{g^0}") {
  FlatModel m;
  const double s = 0.01;
  m.metric = MetricField{[s](std::span<const double>, double z) { return Eigen::MatrixXd((1 + s * z) * Eigen::MatrixXd::Identity(7, 7)); },
                         [s](std::span<const double>, double) { return Eigen::MatrixXd(s * Eigen::MatrixXd::Identity(7, 7)); }};
  validate_model(m);
  const double x[2] = {0.0, 0.0}, zero[2] = {0.0, 0.0};
  CHECK_THAT(area_density_F(m, x, 0.5, zero), WithinRel(std::pow(1 + 0.5 * s, 3.5), 1e-14));
  const GridField M = minimal_surface_operator(m, constant(m.grid, 0.0));
  CHECK_THAT(interior_sup(M), WithinRel(3.5 * s, 1e-12));

  FlatModel wild = m;
  wild.metric = MetricField{[](std::span<const double> y, double) { return Eigen::MatrixXd((1.2 + 0.1 * y[0]) * Eigen::MatrixXd::Identity(7, 7)); },
                            [](std::span<const double>, double) { return Eigen::MatrixXd(Eigen::MatrixXd::Zero(7, 7)); }};
  CHECK_THROWS_WITH(validate_model(wild), ContainsSubstring("1/10"));
  FlatModel coarse;
  coarse.grid = Grid::with_spacing(2, 0.25);
  CHECK_THROWS_WITH(validate_model(coarse), ContainsSubstring("1/8"));
}

TEST_CASE("area functional examples") {
  const FlatModel m;
  CHECK_THAT(area_functional(m, constant(m.grid, 0.0)), WithinRel(4.0, 1e-14));
  const double eps = 0.05;
  const GridField tilt = GridField::sample(m.grid, [&](std::span<const double> x) { return eps * x[0] * 0.5; });
  CHECK_THAT(area_functional(m, tilt), WithinRel(4.0 * std::sqrt(1 + 0.25 * eps * eps), 1e-13));
  CHECK_THAT(area_functional(m.with_conformal(constant_f(0.02)), constant(m.grid, 0.0)),
             WithinRel(4.0 * std::pow(1.02, 3.5), 1e-13));
  const GridField steep = GridField::sample(m.grid, [](std::span<const double> x) { return 0.2 * x[0]; });
  CHECK_THROWS_WITH(area_functional(m, steep), ContainsSubstring("graph regime violated at ("));
}

TEST_CASE("minimal surface operator: hyperplane and small graphs") {
  const FlatModel m;
  CHECK(interior_sup(minimal_surface_operator(m, constant(m.grid, 0.0))) == 0.0);
  const double eps = 1e-3;
  const GridField u = GridField::sample(m.grid, [&](std::span<const double> x) {
    return eps * std::sin(M_PI * x[0] / 2) * box_cutoff(x);
  });
  const GridField M = minimal_surface_operator(m, u);
  const GridField lap = discrete_laplacian(u);
  const double margin = 4 * m.grid.h();
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    if (!u.grid.interior(i, margin)) continue;
    CHECK_THAT(M.values[i], WithinAbs(-lap.values[i], 1e-4 * std::abs(lap.values[i]) + 1e-15));
  }
}

TEST_CASE("variational consistency with the discrete area") {
  const FlatModel m;
  CounterRng rng(32);
  const GridField u = GridField::sample(m.grid, [](std::span<const double> x) {
    return 0.02 * std::sin(M_PI * x[0]) * box_cutoff(x) + 0.01 * x[1] * x[1];
  });
  const GridField M = minimal_surface_operator(m, u);
  for (int trial = 0; trial < 8; ++trial) {
    const double w = rng.uniform(0.3, 0.6), shift = rng.uniform(-0.2, 0.2), amp = rng.uniform(0.5, 1.5);
    const GridField phi = GridField::sample(m.grid, [&](std::span<const double> x) { return amp * bump(x, w, shift); });
    const double t = 1e-5;
    const double fd = (area_functional(m, u + t * phi) - area_functional(m, u - t * phi)) / (2 * t);
    const double h = m.grid.h();
    CHECK_THAT(grid_inner(M, phi), WithinAbs(fd, 1e-6 + h * h));
    CHECK_THAT(grid_inner(M, phi), WithinAbs(fd, 1e-8));
  }
}

TEST_CASE("linearisation residual") {
  const FlatModel m;
  const GridField v = GridField::sample(m.grid, study_direction);
  const ZField f{[](std::span<const double> x, double z) { return 0.01 * z * box_cutoff(x); },
                 [](std::span<const double> x, double) { return 0.01 * box_cutoff(x); }};
  const auto same = linearization_residual(m, 0.01 * v, 0.01 * v, f, f);
  for (double r : same.residual.values) CHECK(r == 0.0);

  LinearizationStudy s;
  const auto rows = linearization_study(s);
  std::map<std::string, double> order;
  std::vector<double> first_order;
  double extrapolated = 0.0;
  for (const auto& r : rows) {
    order[r.case_name] = r.fitted_order;
    if (r.case_name == "conformal_first_order") first_order.push_back(r.residual_norm / r.eps);
    if (r.case_name == "conformal_coefficient" && r.eps == 0.0) extrapolated = r.fitted_order;
  }
  CHECK_THAT(order["u_background"], WithinAbs(2.0, 0.2));
  CHECK(order["u_flat"] >= 1.8);
  CHECK_THAT(extrapolated, WithinRel(3.5, 0.01));
  // norm / t decreases towards 0.
  REQUIRE(first_order.size() == 3);
  CHECK(first_order[1] < first_order[0]);
  CHECK(first_order[2] < first_order[1]);
  CHECK_THAT(order["conformal_first_order"], WithinAbs(2.0, 0.1));
  // Richardson extrapolation of norm / t to t = 0.
  CHECK(std::abs(2 * first_order[2] - first_order[1]) < 1e-2 * first_order[0]);

  s.h = 1.0 / 32;
  for (const auto& r : linearization_study(s))
    if (r.case_name == "u_background") CHECK_THAT(r.fitted_order, WithinAbs(2.0, 0.2));
}

TEST_CASE("proximity bound has a finite empirical constant") {
  CounterRng rng(33);
  const FlatModel m;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double c = rng.uniform(-0.05, 0.05);
    const FlatModel mf = m.with_conformal(
        {[c](std::span<const double> x, double z) { return c * (1 + z) * box_cutoff(x); },
         [c](std::span<const double> x, double) { return c * box_cutoff(x); }});
    const double x[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double xi[2] = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    const double z = rng.uniform(-0.1, 0.1);
    // [f]_{C^2_*} bound for c(1 + z)χ on the unit box: |c| (1 + |z|)(1 + π + π²) + |c|.
    const double fc2 = std::abs(c) * (2 + M_PI + M_PI * M_PI);
    worst = std::max(worst, proximity_ratio(mf, x, z, xi, fc2));
  }
  CHECK(std::isfinite(worst));
  CHECK(worst < 5.0);
}

TEST_CASE("field files round-trip") {
  const FlatModel m;
  const GridField u = GridField::sample(m.grid, [](std::span<const double> x) { return 1e-3 * std::sin(x[0]) + x[1] / 3; });
  const auto dir = std::filesystem::temp_directory_path() / "hypercone_field_test";
  std::filesystem::create_directories(dir);
  const auto header = io::write_field(dir / "u", 7, u);
  const io::FieldFile back = io::read_field(header);
  CHECK(back.n == 7);
  CHECK(back.field.grid.points() == m.grid.points());
  CHECK(back.field.values == u.values);
  const auto meta = io::read_json_file(header.string());
  CHECK(meta.at("h").get<double>() == 1.0 / 16);
  CHECK(meta.at("extent").get<double>() == 1.0);

  std::vector<std::string> dumped;
  LinearizationStudy s;
  linearization_study(s, [&](const std::string& name, double, const GridField& f) {
    dumped.push_back(name);
    CHECK(f.values.size() == m.grid.size());
  });
  CHECK(dumped.size() == 9);
  std::filesystem::remove_all(dir);
}
