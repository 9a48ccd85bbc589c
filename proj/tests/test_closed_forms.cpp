#include <catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hypercone/closed_forms.hpp"
#include "hypercone/io.hpp"
#include "hypercone/random.hpp"

using namespace hypercone;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// ∫_lo^hi f(s) ds / s in the variable y = log s.
template <typename F>
double log_quad(F f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto g = [&](double y) { return f(std::exp(y)); };
  return gauss_kronrod<double, 61>::integrate(g, std::log(lo), std::log(hi), 15, 1e-14);
}

double quad_I(double a, double b, double c, double c2, double r, double K) {
  return log_quad([&](double s) { const double v = c * std::pow(s, a) + c2 * std::pow(s, b); return v * v; }, r, K * r);
}

double quad_I_log(double a, double c, double c2, double r, double K) {
  return log_quad([&](double s) { const double v = std::pow(s, a) * (c + c2 * std::log(s)); return v * v; }, r, K * r);
}

double second_difference_quad(double a, double b, double c, double c2, double r, double K) {
  return quad_I(a, b, c, c2, K * K * r, K) - 2 * quad_I(a, b, c, c2, K * r, K) + quad_I(a, b, c, c2, r, K);
}

bool positive_definite(const QuadraticForm& q) {
  Eigen::Matrix2d m;
  m << q.a, q.b, q.b, q.c;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST_CASE("closed_form_I examples") {
  CHECK_THAT(closed_form_I(1, 2, 1, 0, 1, 2), WithinAbs(1.5, 1e-14));
  const double second = closed_form_I(1, 2, 1, 0, 4, 2) - 2 * closed_form_I(1, 2, 1, 0, 2, 2) + closed_form_I(1, 2, 1, 0, 1, 2);
  CHECK_THAT(second, WithinAbs(13.5, 1e-12));
  CHECK_THAT(second, WithinAbs(std::pow(2 * 2 - 1.0, 3) / 2, 1e-12));
  CHECK(closed_form_I(0.7, -1.3, 0, 0, 0.3, 5) == 0.0);
}

TEST_CASE("closed_form_I against quadrature, including near-zero exponents") {
  CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    const double c = rng.uniform(-2, 2), c2 = rng.uniform(-2, 2);
    const double r = std::exp(rng.uniform(-2, 1));
    const double K = rng.uniform(1.2, 8);
    const double q = quad_I(a, b, c, c2, r, K);
    CHECK_THAT(closed_form_I(a, b, c, c2, r, K), WithinRel(q, 1e-10) || WithinAbs(q, 1e-14));
  }
  for (double a : {0.0, 1e-12, -1e-9, 1e-6}) {
    const double q = quad_I(a, -a, 1.0, 0.5, 0.5, 3.0);
    CHECK_THAT(closed_form_I(a, -a, 1.0, 0.5, 0.5, 3.0), WithinRel(q, 1e-10));
  }
}

TEST_CASE("closed_form_I_log against quadrature") {
  CounterRng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double ap = i < 5 ? std::pow(10.0, -3 - i) : rng.uniform(-2.5, 2.5);
    const double c = rng.uniform(-2, 2), c2 = rng.uniform(-2, 2);
    const double r = std::exp(rng.uniform(-2, 1));
    const double K = rng.uniform(1.5, 6);
    const double q = quad_I_log(ap, c, c2, r, K);
    CHECK_THAT(closed_form_I_log(ap, c, c2, r, K), WithinRel(q, 1e-9) || WithinAbs(q, 1e-14));
  }
}

TEST_CASE("three-scale quadratic form matches quadrature of the second difference") {
  CounterRng rng(13);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double K = rng.uniform(1.5, 3), r = rng.uniform(0.2, 1);
    const double c = rng.uniform(-1, 1), c2 = rng.uniform(-1, 1);
    const QuadraticForm q = three_scale_form_power(a, b, r, K);
    const double oracle = second_difference_quad(a, b, c, c2, r, K);
    CHECK_THAT(q.evaluate(c, c2), WithinRel(oracle, 1e-9) || WithinAbs(oracle, 1e-12));
  }
}

TEST_CASE("discriminant_power at K=10, alpha=2, beta=1 against 50-digit arithmetic") {
  using big = boost::multiprecision::cpp_bin_float_50;
  const big K = 10;
  const big cross = pow(pow(K, 3) - 1, 3) / 3;
  const big left = pow(pow(K, 4) - 1, 3) / 4;
  const big right = pow(pow(K, 2) - 1, 3) / 2;
  const double oracle = static_cast<double>(cross * cross - left * right);
  const double d = discriminant_power(10, 2, 1);
  CHECK(d < 0);
  CHECK(std::abs(d) > 1e16);
  CHECK(std::abs(d) < 1.2e16);
  CHECK_THAT(d, WithinRel(oracle, 1e-12));
}

TEST_CASE("discriminant identities") {
  CounterRng rng(14);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-1.5, 1.5), b = rng.uniform(-1.5, 1.5);
    if (std::abs(a) < 0.1 || std::abs(b) < 0.1 || std::abs(a + b) < 0.1 || a == b) continue;
    const double K = rng.uniform(1.5, 4);
    const double d = discriminant_power(K, a, b);
    CHECK_THAT(discriminant_power(K, b, a), WithinRel(d, 1e-12));
    CHECK_THAT(std::pow(K, 6 * a + 6 * b) * discriminant_power(K, -a, -b), WithinRel(d, 1e-9));
    // Negative discriminant and positive leading coefficient ⟺ positive definite.
    const QuadraticForm q = three_scale_form_power(a, b, 1.0, K);
    CHECK(q.a > 0);
    CHECK((d < 0 && q.a > 0) == positive_definite(q));
    CHECK((relative_discriminant_power(K, a, b) < 0) == (d < 0));
  }
  CHECK_THROWS_WITH(discriminant_power(3, 1, 1), "use log branch");
  CHECK_THROWS_AS(discriminant_power(3, 1, -1), DomainError);
}

TEST_CASE("discriminant_log") {
  CHECK(discriminant_log(100, 2) < 0);
  CHECK_THROWS_AS(discriminant_log(3, 0), DomainError);
  // The prefactor is positive, so the sign sits in the bracket.
  for (double a : {-3.0, -0.5, 0.5, 3.0}) {
    for (double K : {1.5, 3.0, 20.0}) {
      const double e = std::pow(K, a) - 1;
      const double bracket = 3 * std::pow(K, a) * std::log(K) * std::log(K) - e * e / (a * a);
      CHECK((discriminant_log(K, a) < 0) == (bracket < 0));
      CHECK((relative_discriminant_log(K, a) < 0) == (bracket < 0));
    }
  }
  // Small |α|: positive near K = 1, negative for large K, one sign change on a ladder.
  const double a = -0.5;
  int changes = 0;
  bool prev = discriminant_log(1.1, a) < 0;
  CHECK_FALSE(prev);
  for (double K = 1.2; K < 1e4; K *= 1.1) {
    const bool now = discriminant_log(K, a) < 0;
    changes += now != prev;
    prev = now;
  }
  CHECK(prev);
  CHECK(changes == 1);
  // Log-branch form positivity against eigen-signs.
  for (double ap : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    for (double K : {1.5, 3.0, 6.0, 20.0}) {
      const QuadraticForm q = three_scale_form_log(ap, 1.0, K);
      CHECK((discriminant_log(K, 2 * ap) < 0) == positive_definite(q));
    }
  }
}

TEST_CASE("grid threshold search") {
  const GridSpec grid = io::default_grid();
  const ThresholdResult power = find_threshold_K(1.0, Branch::Power, grid);
  const ThresholdResult log = find_threshold_K(1.0, Branch::Log, grid);
  CHECK(power.K_star == 6.0);
  CHECK(log.K_star == 7.0);
  CHECK(power.max_discriminant < 0);
  CHECK(std::isnan(log.witness_beta));

  // Every sampled pair is negative at K* and 2K*.
  const auto exps = grid.exponents();
  for (double K : {power.K_star, 2 * power.K_star}) {
    for (double a : exps) {
      for (double b : exps) {
        if (a == b || std::abs(a) < 1 || std::abs(b) < 1 || std::abs(a + b) < 1) continue;
        CHECK(relative_discriminant_power(K, a, b) < 0);
      }
    }
  }
  for (double K : {log.K_star, 2 * log.K_star}) {
    for (double a : exps) {
      if (std::abs(a) < 1) continue;
      CHECK(discriminant_log(K, 2 * a) < 0);
    }
  }
  // The ladder entry just below K* has a nonnegative witness.
  CHECK(worst_on_grid(5.5, 1.0, Branch::Power, exps).max_relative >= 0);

  // Larger σ excludes pairs, so the threshold can only drop.
  CHECK(find_threshold_K(2.0, Branch::Power, grid).K_star <= power.K_star);
  CHECK(find_threshold_K(2.0, Branch::Log, grid).K_star <= log.K_star);
}

TEST_CASE("threshold search errors") {
  GridSpec g;
  g.K_ladder = {2.5, 3.0};
  CHECK_THROWS_WITH(find_threshold_K(1.0, Branch::Power, g), "threshold beyond grid");
  CHECK_THROWS(find_threshold_K(0.0, Branch::Power, io::default_grid()));
  g.K_ladder = {3.0, 2.5};
  CHECK_THROWS(find_threshold_K(1.0, Branch::Power, g));
}
