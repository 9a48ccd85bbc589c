#include <catch_amalgamated.hpp>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypercone/closed_forms.hpp"
#include "hypercone/cone_spectrum.hpp"
#include "hypercone/io.hpp"
#include "hypercone/jacobi_growth.hpp"
#include "hypercone/random.hpp"

using namespace hypercone;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpectralLadder& simons() {
  static const SpectralLadder l = cross_section_spectrum(simons_cone(), 30.0);
  return l;
}

SpectralLadder resonant_ladder() {
  return cross_section_spectrum({"r", CustomSpectrum{7, {{-6.25, 1}, {0.0, 8}}, {}}}, 0.0);
}

// Σ_j ∫_{r/K}^{r} t^{-1-2γ} v_j(t)^2 dt by adaptive quadrature in log t.
double quad_J(const JacobiCoefficients& u, const GrowthWindow& w) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (const auto& t : u.terms()) {
    auto f = [&](double y) {
      const double s = std::exp(y);
      const double v = evaluate_radial(u, t.j, s);
      return std::pow(s, -2 * w.gamma) * v * v;
    };
    total += gauss_kronrod<double, 61>::integrate(f, std::log(w.r / w.K), std::log(w.r), 15, 1e-14);
  }
  return total;
}

JacobiCoefficients random_field(CounterRng& rng, const SpectralLadder& ladder, int modes) {
  std::vector<JacobiTerm> terms;
  std::vector<std::size_t> used;
  while (static_cast<int>(terms.size()) < modes) {
    const auto j = static_cast<std::size_t>(rng.integer(1, 5));
    if (std::find(used.begin(), used.end(), j) != used.end()) continue;
    used.push_back(j);
    terms.push_back({j, rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  return {ladder, terms};
}

}  // namespace

TEST_CASE("evaluate_radial") {
  const JacobiCoefficients u(simons(), {{1, 1.0, 0.0}});
  CHECK(evaluate_radial(u, 1, 2.0) == 0.25);
  const JacobiCoefficients res(resonant_ladder(), {{1, 0.0, 1.0}});
  CHECK(evaluate_radial(res, 1, 1.0) == 0.0);
  CHECK_THAT(evaluate_radial(res, 1, 2.0), WithinRel(std::pow(2.0, -2.5) * std::log(2.0), 1e-15));
  const JacobiCoefficients zero(simons(), {{1, 0.0, 0.0}, {2, 0.0, 0.0}});
  for (double r : {0.01, 0.5, 3.0}) CHECK(evaluate_radial(zero, 2, r) == 0.0);
  CHECK_THROWS_AS(evaluate_radial(u, 1, 0.0), DomainError);
}

TEST_CASE("coefficient validation") {
  CHECK_THROWS_WITH(JacobiCoefficients(simons(), {{1, 1, 0}, {1, 2, 0}}), ContainsSubstring("duplicate"));
  CHECK_THROWS_WITH(JacobiCoefficients(simons(), {{99, 1, 0}}), ContainsSubstring("not in ladder"));
  CHECK_THROWS_WITH(JacobiCoefficients(simons(), {{0, 1, 0}}), ContainsSubstring("not in ladder"));
}

TEST_CASE("growth functional examples") {
  // Mode exponent equal to γ: integrand t^{-1}.
  const JacobiCoefficients u(simons(), {{1, 1.0, 0.0}});
  CHECK_THAT(growth_functional(u, {5.0, -2.0, 0.7}), WithinRel(std::log(5.0), 1e-14));
  // γ_1^+ = -2, γ = -3, r = 1, K = 2: ∫_{1/2}^1 t dt.
  CHECK_THAT(growth_functional(u, {2.0, -3.0, 1.0}), WithinRel(0.375, 1e-14));
  // Orthogonal modes add.
  const JacobiCoefficients v(simons(), {{2, 0.3, -0.7}});
  const JacobiCoefficients uv(simons(), {{1, 1.0, 0.0}, {2, 0.3, -0.7}});
  const GrowthWindow w{3.0, -1.0, 0.4};
  CHECK_THAT(growth_functional(uv, w), WithinRel(growth_functional(u, w) + growth_functional(v, w), 1e-14));
  CHECK_THROWS_AS(growth_functional(u, {1.0, -1.0, 1.0}), DomainError);
}

TEST_CASE("growth functional against quadrature on random mode sets") {
  CounterRng rng(21);
  const SpectralLadder res = resonant_ladder();
  for (int i = 0; i < 200; ++i) {
    const bool log_case = i % 4 == 0;
    const JacobiCoefficients u = log_case ? JacobiCoefficients(res, {{1, rng.uniform(-1, 1), rng.uniform(-1, 1)}})
                                          : random_field(rng, simons(), 1 + static_cast<int>(rng.integer(0, 2)));
    const GrowthWindow w{rng.uniform(2.0, 8.0), rng.uniform(-4.0, 0.5), std::exp(rng.uniform(-1.5, 0.5))};
    const double closed = growth_functional(u, w);
    CHECK_THAT(closed, WithinAbs(quad_J(u, w), 1e-8 * (1 + std::abs(closed))));
  }
}

TEST_CASE("Cauchy-Schwarz across scales") {
  CounterRng rng(22);
  const double K = 3.0, gamma = -1.0;
  for (int i = 0; i < 50; ++i) {
    const auto j = static_cast<std::size_t>(rng.integer(1, 5));
    const JacobiCoefficients single(simons(), {{j, rng.uniform(0.1, 1), 0.0}});
    const double a = growth_functional(single, {K, gamma, 1 / (K * K)});
    const double b = growth_functional(single, {K, gamma, 1 / K});
    const double c = growth_functional(single, {K, gamma, 1.0});
    CHECK_THAT(a * c, WithinRel(b * b, 1e-12));
    const JacobiCoefficients sum = random_field(rng, simons(), 3);
    const double a2 = growth_functional(sum, {K, gamma, 1 / (K * K)});
    const double b2 = growth_functional(sum, {K, gamma, 1 / K});
    const double c2 = growth_functional(sum, {K, gamma, 1.0});
    CHECK(a2 * c2 >= b2 * b2 * (1 - 1e-12));
  }
}

TEST_CASE("gamma admissibility") {
  CHECK(gamma_admissible(-1.0, simons(), 0.5));
  CHECK(gamma_admissible(-1.0, simons(), 1.0));
  CHECK_FALSE(gamma_admissible(-2.5, simons(), 0.01));
  CHECK_FALSE(gamma_admissible(0.0, simons(), 0.1));
  const SpectralLadder narrow = cross_section_spectrum(simons_cone(), 1.0);
  CHECK_THROWS_WITH(gamma_admissible(3.0, narrow, 0.5), "widen gamma_window");
  CounterRng rng(23);
  for (int i = 0; i < 200; ++i) {
    const double g = rng.uniform(-4.0, 1.0);
    const double s1 = rng.uniform(0.01, 0.5), s2 = s1 + rng.uniform(0.0, 0.5);
    if (gamma_admissible(g, simons(), s2)) CHECK(gamma_admissible(g, simons(), s1));
  }
}

TEST_CASE("three-scale check") {
  const JacobiCoefficients zero(simons(), {{1, 0.0, 0.0}});
  const auto z = three_scale_check(zero, -1.0, 6.0, 1.0);
  CHECK(z.lhs == 0.0);
  CHECK_FALSE(z.strict);

  const double K_half = find_threshold_K(0.5, Branch::Power, io::default_grid()).K_star;
  const JacobiCoefficients u(simons(), {{1, 1.0, 0.0}});
  CHECK(three_scale_check(u, -1.0, K_half, 0.5).strict);

  const double K = find_threshold_K(1.0, Branch::Power, io::default_grid()).K_star;
  CounterRng rng(24);
  for (int i = 0; i < 100; ++i) {
    const auto r = three_scale_check(random_field(rng, simons(), 3), -1.0, K, 1.0);
    CHECK(r.strict);
  }
  // Equals the second difference of the growth functional.
  const JacobiCoefficients f = random_field(rng, simons(), 2);
  const double lhs = growth_functional(f, {K, -1.0, 1 / (K * K)}) - 2 * growth_functional(f, {K, -1.0, 1 / K}) +
                     growth_functional(f, {K, -1.0, 1.0});
  CHECK_THAT(three_scale_check(f, -1.0, K, 1.0).lhs, WithinRel(lhs, 1e-9));
  CHECK_THROWS_WITH(three_scale_check(u, -2.2, K, 0.5), ContainsSubstring("distance"));
}

TEST_CASE("asymptotic rate and slower growth") {
  CHECK(asymptotic_rate(JacobiCoefficients(simons(), {{2, 1.0, 0.0}})) == 0.0);
  CHECK(asymptotic_rate(JacobiCoefficients(simons(), {{1, 0.0, 1.0}, {2, 5.0, 0.0}})) == -3.0);
  const JacobiCoefficients zero(simons(), {});
  CHECK(std::isinf(asymptotic_rate(zero)));
  CHECK(asymptotic_rate(zero) > 0);
  CHECK(is_slower_growth(JacobiCoefficients(simons(), {{2, 1.0, 0.0}})));
  CHECK_FALSE(is_slower_growth(JacobiCoefficients(simons(), {{1, 1.0, 0.0}})));
  CHECK(is_slower_growth(zero));

  // Non-cancelling sums: rate of the sum is the min of the rates.
  CounterRng rng(25);
  for (int i = 0; i < 100; ++i) {
    const auto j1 = static_cast<std::size_t>(rng.integer(1, 3));
    const auto j2 = static_cast<std::size_t>(rng.integer(4, 6));
    const JacobiTerm t1{j1, rng.coin() ? 1.0 : 0.0, rng.uniform(0.1, 1)};
    const JacobiTerm t2{j2, rng.uniform(0.1, 1), rng.coin() ? 1.0 : 0.0};
    const double r1 = asymptotic_rate(JacobiCoefficients(simons(), {t1}));
    const double r2 = asymptotic_rate(JacobiCoefficients(simons(), {t2}));
    CHECK(asymptotic_rate(JacobiCoefficients(simons(), {t1, t2})) == std::min(r1, r2));
  }
}

TEST_CASE("rate estimation from synthetic annulus norms") {
  // ||r^{-2}||^2 on A(s, 2s) of a 7-cone with cross-section area A is A·7s³/3.
  const double A = 2.0;
  std::vector<AnnulusSample> pw, cst, wiggle;
  for (int k = 0; k < 8; ++k) {
    const double s = 0.5 * std::pow(0.5, k);
    pw.push_back({s, std::sqrt(A * 7 * s * s * s / 3)});
    cst.push_back({s, std::sqrt(A * 127 * std::pow(s, 7) / 7)});
    using boost::math::quadrature::gauss_kronrod;
    auto f = [](double t) {
      const double v = std::pow(t, -2.0) * (1 + 0.01 * std::sin(std::log(t)));
      return v * v * std::pow(t, 6);
    };
    wiggle.push_back({s, std::sqrt(A * gauss_kronrod<double, 31>::integrate(f, s, 2 * s, 10, 1e-14))});
  }
  CHECK_THAT(estimate_rate_from_samples(pw, 7), WithinAbs(-2.0, 1e-3));
  CHECK_THAT(estimate_rate_from_samples(cst, 7), WithinAbs(0.0, 1e-3));
  CHECK_THAT(estimate_rate_from_samples(wiggle, 7), WithinAbs(-2.0, 0.02));
  pw[3].l2 = 0.0;
  CHECK_THROWS(estimate_rate_from_samples(pw, 7));
  CHECK_THROWS(estimate_rate_from_samples({{0.5, 1.0}, {0.25, 1.0}}, 7));
}

TEST_CASE("rate snapping") {
  CHECK(snap_rate(-2.0004, simons()).value == -2.0);
  CHECK(snap_rate(1.7, simons()).value == 1.7);
  CHECK(snap_rate(0.93, simons()).value == 1.0);
  CHECK(std::isinf(snap_rate(-1e6, simons()).value));
}
