#include <catch_amalgamated.hpp>

#include "hypercone/cone_trees.hpp"
#include "hypercone/sampling.hpp"

using namespace hypercone;
using Catch::Matchers::ContainsSubstring;

namespace {

TreeNode leaf(double density, double R = 1.0, Point8 x = {}) { return {TypeI{"C1", density, 1, x, R, 0.0}, {}}; }

// Type-I node with ρ > 0 over a density-1.47 leaf.
TreeNode shrink(double rho, double R = 1.0, Point8 x = {}) {
  TreeNode n{TypeI{"C1", 1.47, 1, x, R, rho}, {}};
  n.children.push_back(leaf(1.47, rho, x));
  return n;
}

bool has(const std::vector<Violation>& v, const std::string& text) {
  for (const auto& e : v)
    if (e.message.find(text) != std::string::npos) return true;
  return false;
}

TreeContext one_ball_context() {
  TreeContext ctx;
  ctx.models.emplace("S1", SmoothModelMeta{"S1", 1.47, "C1", {{Point8{0.3}, 0.1, "C1", 1}}, 0.1});
  ctx.cones.set("C1", "C2", 0.5);
  return ctx;
}

}  // namespace

TEST_CASE("validate_tree examples") {
  CHECK(validate_tree(leaf(1.47), 0.01).empty());
  const auto flat = validate_tree(leaf(1.0), 0.01);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].message == "leaf density must exceed 1");
  CHECK(flat[0].path == "root");
  TreeNode wide{TypeI{"C1", 1.47, 1, {}, 0.5, 0.3}, {leaf(1.47, 0.3)}};
  const auto v = validate_tree(wide, 0.01);
  CHECK(has(v, "R ≥ 2ρ"));
  CHECK(validate_tree(shrink(0.4), 0.01).empty());
}

TEST_CASE("validate_tree structural rules") {
  TreeNode no_child{TypeI{"C1", 1.47, 1, {}, 1.0, 0.2}, {}};
  CHECK(has(validate_tree(no_child, 0.01), "exactly one child"));
  TreeNode leaf_with_child = leaf(1.47);
  leaf_with_child.children.push_back(leaf(1.47, 0.1));
  CHECK(has(validate_tree(leaf_with_child, 0.01), "must be a leaf"));

  TreeNode moved = shrink(0.2);
  std::get<TypeI>(moved.children[0].kind).x[0] = 0.01;
  CHECK(has(validate_tree(moved, 0.01), "child x must equal parent x"));
  TreeNode resized = shrink(0.2);
  std::get<TypeI>(resized.children[0].kind).R = 0.21;
  CHECK(has(validate_tree(resized, 0.01), "child R must equal parent ρ"));
  TreeNode remult = shrink(0.2);
  std::get<TypeI>(remult.children[0].kind).m = 2;
  CHECK(has(validate_tree(remult, 0.01), "keep multiplicity"));

  const TreeContext ctx = one_ball_context();
  auto model_tree = [](Point8 xc, double Rc) {
    TreeNode n{TypeII{"S1", {}, 1.0}, {}};
    n.children.push_back(leaf(1.47, Rc, xc));
    return n;
  };
  CHECK(validate_tree(model_tree(Point8{0.3}, 0.1), 0.01, ctx).empty());
  CHECK(validate_tree(model_tree(Point8{0.3005}, 0.05), 0.01, ctx).empty());
  CHECK(has(validate_tree(model_tree(Point8{0.302}, 0.1), 0.01, ctx), "βRr_α"));
  CHECK(has(validate_tree(model_tree(Point8{0.3}, 0.049), 0.01, ctx), "R_child/(R·r_α)"));
  CHECK(has(validate_tree(model_tree(Point8{0.3}, 0.102), 0.01, ctx), "R_child/(R·r_α)"));
  TreeNode missing{TypeII{"S1", {}, 1.0}, {}};
  CHECK(has(validate_tree(missing, 0.01, ctx), "one child per inner ball"));
  TreeNode unknown{TypeII{"S9", {}, 1.0}, {}};
  CHECK(has(validate_tree(unknown, 0.01, ctx), "unknown smooth model"));

  // Violations carry the node path.
  TreeNode deep = model_tree(Point8{0.3}, 0.1);
  std::get<TypeI>(deep.children[0].kind).density = 0.9;
  const auto v = validate_tree(deep, 0.01, ctx);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "root/0");
}

TEST_CASE("model metadata invariants") {
  SmoothModelMeta m{"S", 1.0, "plane", {{Point8{0.3}, 0.1, "C1", 1}, {Point8{-0.3}, 0.1, "C1", 1}}, 0.1};
  CHECK(validate_model_meta(m).empty());
  m.inner_balls[1].y = Point8{0.5};
  CHECK(!validate_model_meta(m).empty());
  m.inner_balls[1].y = Point8{-0.65};
  CHECK(!validate_model_meta(m).empty());
  m.inner_balls.pop_back();
  m.sigma = 0.4;
  CHECK(!validate_model_meta(m).empty());
}

TEST_CASE("coarse_tree examples") {
  const CoarseNode c = coarse_tree(leaf(1.47, 0.7, Point8{0.1}));
  CHECK(c.children.empty());
  CHECK(std::get<0>(c.label) == std::make_pair(1.47, 1));
  CHECK(coarse_tree(shrink(0.3, 1.0)) == coarse_tree(shrink(0.2, 0.9, Point8{0.05})));
  CHECK_FALSE(coarse_tree(shrink(0.3)) == coarse_tree(leaf(1.47)));
  CHECK_FALSE(coarse_tree(leaf(1.47)) == coarse_tree(leaf(1.6)));
}

TEST_CASE("gamma_close examples") {
  const TreeNode a = shrink(0.1);
  const TreeNode b = [] {
    TreeNode n = shrink(0.1005);
    std::get<TypeI>(n.children[0].kind).R = 0.1005;
    // Keep the leaf within γ min(R) of its partner so only ρ is probed.
    return n;
  }();
  for (double g : {1e-9, 1e-3, 0.5}) CHECK(gamma_close(a, a, g).close);
  CHECK(gamma_close(a, b, 0.01).close);
  const auto r = gamma_close(a, b, 0.004);
  CHECK_FALSE(r.close);
  CHECK(r.failure == CloseFailure::Inequality);
  CHECK(r.constraint == "|ρ_a − ρ_a'| ≤ γ min(ρ)");
  CHECK(r.path == "root");

  const auto mismatch = gamma_close(a, leaf(1.47), 0.5);
  CHECK(mismatch.failure == CloseFailure::CoarseMismatch);
  CHECK_THROWS(gamma_close(a, a, 0.0));
}

TEST_CASE("gamma_close consults the cone metric") {
  TreeContext ctx;
  ctx.cones.set("C1", "C1b", 0.003);
  TreeNode a = leaf(1.47), b = leaf(1.47);
  std::get<TypeI>(b.kind).cone = "C1b";
  CHECK(gamma_close(a, b, 0.005, ctx).close);
  CHECK(gamma_close(a, b, 0.002, ctx).constraint == "dist_H(C_a ∩ ∂B_1, C_a' ∩ ∂B_1) ≤ γ");
  std::get<TypeI>(b.kind).cone = "C9";
  CHECK_THROWS_WITH(gamma_close(a, b, 0.005, ctx), ContainsSubstring("no tabulated distance"));
}

TEST_CASE("gamma_close: reflexive, symmetric, monotone, coarse-necessary") {
  const TreeContext ctx = sampling::demo_context();
  int close_pairs = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    sampling::TreeGenerator ga(ctx, seed, 1000 + seed, 0.0);
    sampling::TreeGenerator gb(ctx, seed, 5000 + seed, 2e-3);
    const TreeNode a = ga.generate();
    const TreeNode b = gb.generate();
    REQUIRE(validate_tree(a, 0.01, ctx).empty());
    REQUIRE(validate_tree(b, 0.01, ctx).empty());
    REQUIRE(coarse_tree(a) == coarse_tree(b));
    const double gammas[] = {1e-4, 1e-3, 3e-3, 1e-2, 5e-2};
    bool seen = false;
    for (double g : gammas) {
      CHECK(gamma_close(a, a, g, ctx).close);
      const bool ab = gamma_close(a, b, g, ctx).close;
      CHECK(ab == gamma_close(b, a, g, ctx).close);
      if (seen) CHECK(ab);
      seen = seen || ab;
    }
    close_pairs += seen;
    // Different shapes never pass, at any γ.
    sampling::TreeGenerator gc(ctx, seed + 100000, 7, 0.0);
    const TreeNode c = gc.generate();
    if (!(coarse_tree(a) == coarse_tree(c))) {
      CHECK(gamma_close(a, c, 0.05, ctx).failure == CloseFailure::CoarseMismatch);
    }
  }
  CHECK(close_pairs > 0);
}

TEST_CASE("large-scale trees") {
  LargeScaleTree t{"Sigma0", "g0", {Point8{}, Point8{1.0}}, {0.3, 0.3}, {shrink(0.1), leaf(1.47)}};
  CHECK(validate_large_scale(t, 0.01).empty());
  CHECK(gamma_close_large_scale(t, t, 0.01).close);

  LargeScaleTree u = t;
  u.subtrees[0] = shrink(0.102);
  std::get<TypeI>(u.subtrees[0].children[0].kind).R = 0.102;
  const auto r = gamma_close_large_scale(t, u, 0.01);
  CHECK_FALSE(r.close);
  CHECK(r.path == "root/0");

  LargeScaleTree fewer = t;
  fewer.singular_points.pop_back();
  fewer.radii.pop_back();
  fewer.subtrees.pop_back();
  CHECK(gamma_close_large_scale(t, fewer, 0.5).failure == CloseFailure::CoarseMismatch);

  LargeScaleTree overlapping = t;
  overlapping.radii = {0.6, 0.6};
  CHECK(has(validate_large_scale(overlapping, 0.01), "intersect"));
  LargeScaleTree bad_leaf = t;
  bad_leaf.subtrees[1] = leaf(1.0);
  const auto v = validate_large_scale(bad_leaf, 0.01);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "root/1");
}
