// Command-line front end: one subcommand per library operation, CSV on
// stdout (and --out), optional SVG plots.
//
// Exit codes: 0 success, 2 validation findings or failed criteria,
// 1 errors (JSON report on stderr).

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hypercone/acceptance.hpp"
#include "hypercone/closed_forms.hpp"
#include "hypercone/cone_spectrum.hpp"
#include "hypercone/cone_trees.hpp"
#include "hypercone/covering.hpp"
#include "hypercone/field_io.hpp"
#include "hypercone/io.hpp"
#include "hypercone/jacobi_growth.hpp"
#include "hypercone/linearization.hpp"
#include "hypercone/radial_ode.hpp"
#include "hypercone/scap.hpp"
#include "hypercone/svg.hpp"

namespace {

using namespace hypercone;
using io::CsvWriter;
using io::json;

int emit(const CsvWriter& csv, const std::string& out) {
  std::cout << csv.str();
  csv.write(out);
  return 0;
}

void maybe_svg(const std::string& path, const svg::Plot& plot) {
  if (!path.empty()) svg::write(plot, path);
}

// ---- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  std::string cone;
  double mu_max = 10.0;
  std::string out, svg;
};

int run_spectrum(const SpectrumArgs& a) {
  const ConeDescriptor cone = io::cone_from_json(io::read_json_file(a.cone));
  const SpectralLadder ladder = cross_section_spectrum(cone, a.mu_max);
  CsvWriter csv({"j", "mu", "mult", "gamma_plus", "gamma_minus", "resonant"});
  svg::Series plus{"gamma+", {}, {}}, minus{"gamma-", {}, {}};
  for (std::size_t j = 0; j < ladder.entries.size(); ++j) {
    const auto& e = ladder.entries[j];
    csv.row(j + 1, e.mu, e.multiplicity, e.gamma_plus, e.gamma_minus, e.resonant);
    plus.x.push_back(e.mu);
    plus.y.push_back(e.gamma_plus);
    minus.x.push_back(e.mu);
    minus.y.push_back(e.gamma_minus);
  }
  maybe_svg(a.svg, {"indicial roots of " + cone.label, "mu", "gamma", false, false, {plus, minus}});
  return emit(csv, a.out);
}

// ---- growth ---------------------------------------------------------------

struct GrowthArgs {
  std::string cone, coeffs;
  double gamma = -1.0, K = 6.0, sigma = 1.0, mu_max = 30.0;
  std::string out;
};

int run_growth_check(const GrowthArgs& a) {
  const ConeDescriptor cone = io::cone_from_json(io::read_json_file(a.cone));
  const auto terms = io::terms_from_json(io::read_json_file(a.coeffs));
  const JacobiCoefficients coeffs(cross_section_spectrum(cone, a.mu_max), terms);
  const double j2 = growth_functional(coeffs, {a.K, a.gamma, 1.0 / (a.K * a.K)});
  const double j1 = growth_functional(coeffs, {a.K, a.gamma, 1.0 / a.K});
  const double j0 = growth_functional(coeffs, {a.K, a.gamma, 1.0});
  const ThreeScaleResult res = three_scale_check(coeffs, a.gamma, a.K, a.sigma);
  CsvWriter csv({"gamma", "K", "J_K^-2", "J_K^-1", "J_1", "lhs", "strict"});
  csv.row(a.gamma, a.K, j2, j1, j0, res.lhs, res.strict);
  return emit(csv, a.out);
}

struct KSearchArgs {
  double sigma = 1.0;
  std::string branch = "power";
  std::string grid, out, svg;
};

int run_k_search(const KSearchArgs& a) {
  const Branch branch = a.branch == "log" ? Branch::Log : Branch::Power;
  const GridSpec grid = a.grid.empty() ? io::default_grid() : io::grid_from_json(io::read_json_file(a.grid));
  const ThresholdResult res = find_threshold_K(a.sigma, branch, grid);
  CsvWriter csv({"sigma", "branch", "K_star", "witness_alpha", "witness_beta", "max_discriminant"});
  csv.row(res.sigma, to_string(res.branch), res.K_star, res.witness_alpha, res.witness_beta, res.max_discriminant);
  svg::Series s{"max relative discriminant", {}, {}};
  for (const auto& r : res.rows) {
    s.x.push_back(r.K);
    s.y.push_back(r.max_relative);
  }
  maybe_svg(a.svg, {std::string("discriminant vs K (") + to_string(branch) + ")", "K", "max relative discriminant",
                    false, false, {s}});
  return emit(csv, a.out);
}

struct RateArgs {
  std::string samples, cone;
  int n = 7;
  double mu_max = 30.0;
  std::string out, svg;
};

int run_rate_estimate(const RateArgs& a) {
  const json j = io::read_json_file(a.samples);
  if (!j.is_array()) throw Error("samples file must be an array of [s, l2] pairs");
  std::vector<AnnulusSample> samples;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error("each sample must be [s, l2]");
    }
    samples.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  const double rate = estimate_rate_from_samples(samples, a.n);
  std::optional<SnappedRate> snapped;
  if (!a.cone.empty()) {
    snapped = snap_rate(rate, cross_section_spectrum(io::cone_from_json(io::read_json_file(a.cone)), a.mu_max));
  }
  CsvWriter csv({"rate", "snapped", "residual"});
  if (snapped) {
    csv.row(rate, snapped->value, snapped->residual);
  } else {
    csv.row(rate, "", "");
  }
  svg::Series s{"annulus L2", {}, {}};
  for (const auto& smp : samples) {
    s.x.push_back(smp.s);
    s.y.push_back(smp.l2);
  }
  maybe_svg(a.svg, {"annulus norms", "s", "||v||", true, true, {s}});
  return emit(csv, a.out);
}

struct OdeArgs {
  double mu = -6.0;
  int n = 7;
  double v0 = 1.0, dv0 = -2.0, r_min = 0.01, b0 = 0.0, b1 = 0.0;
  std::string profile = "constant";
  std::size_t samples = 65;
  std::string out, svg;
};

int run_ode_solve(const OdeArgs& a) {
  PerturbedRadialProblem prob{a.mu, a.n, a.b0, a.b1, profile_from_string(a.profile)};
  const RadialProfile prof = solve_radial_jacobi(prob, a.v0, a.dv0, a.r_min, a.samples);
  CsvWriter csv({"r", "v", "r_dv"});
  svg::Series s{"|v|", {}, {}};
  for (std::size_t i = 0; i < prof.log_r.size(); ++i) {
    const double r = std::exp(prof.log_r[i]);
    csv.row(r, prof.v[i], prof.v_t[i]);
    s.x.push_back(r);
    s.y.push_back(std::abs(prof.v[i]));
  }
  maybe_svg(a.svg, {"radial Jacobi field", "r", "|v|", true, true, {s}});
  return emit(csv, a.out);
}

// ---- graph geometry ---------------------------------------------------------

struct LinearizeArgs {
  int n = 7;
  double res = 1.0 / 16;
  std::vector<double> eps;
  std::string report, svg, dump_dir;
};

int run_linearize(const LinearizeArgs& a) {
  LinearizationStudy s;
  s.n = a.n;
  s.h = a.res;
  if (!a.eps.empty()) s.eps = s.t = a.eps;
  FieldSink sink;
  if (!a.dump_dir.empty()) {
    std::filesystem::create_directories(a.dump_dir);
    sink = [&a, index = std::map<std::string, int>{}](const std::string& name, double, const GridField& f) mutable {
      const int k = index[name]++;
      io::write_field(std::filesystem::path(a.dump_dir) / (name + "_" + std::to_string(k)), a.n, f);
    };
  }
  const auto rows = linearization_study(s, sink);
  CsvWriter csv({"case", "eps", "residual_norm", "fitted_order"});
  std::map<std::string, svg::Series> series;
  for (const auto& r : rows) {
    csv.row(r.case_name, r.eps, r.residual_norm, r.fitted_order);
    if (r.case_name == "conformal_coefficient") continue;
    auto& ser = series[r.case_name];
    ser.label = r.case_name;
    ser.x.push_back(r.eps);
    ser.y.push_back(r.residual_norm);
  }
  svg::Plot plot{"linearisation residuals", "eps", "residual", true, true, {}};
  for (auto& [name, ser] : series) plot.series.push_back(ser);
  maybe_svg(a.svg, plot);
  return emit(csv, a.report);
}

// ---- trees -----------------------------------------------------------------

struct TreeValidateArgs {
  std::string file;
  double beta = 0.01;
  std::string out;
};

int run_tree_validate(const TreeValidateArgs& a) {
  const io::TreeDocument doc = io::tree_document_from_json(io::read_json_file(a.file));
  const auto found = doc.root ? validate_tree(*doc.root, a.beta, doc.context)
                              : validate_large_scale(*doc.large_scale, a.beta, doc.context);
  CsvWriter csv({"path", "message"});
  for (const auto& v : found) csv.row(v.path, v.message);
  emit(csv, a.out);
  return found.empty() ? 0 : 2;
}

struct TreeCloseArgs {
  std::string a, b;
  double gamma = 0.01;
  std::string out;
};

const char* failure_name(CloseFailure f) {
  switch (f) {
    case CloseFailure::None: return "";
    case CloseFailure::CoarseMismatch: return "coarse_mismatch";
    case CloseFailure::Inequality: return "inequality";
  }
  return "";
}

// Models and cone distances of both files; a conflicting entry is an error.
TreeContext merged_context(const TreeContext& a, const TreeContext& b) {
  TreeContext ctx = a;
  for (const auto& [id, m] : b.models) {
    auto [it, fresh] = ctx.models.emplace(id, m);
    if (!fresh && !(it->second == m)) throw Error("model '" + id + "' differs between the two tree files");
  }
  for (const auto& [key, d] : b.cones.entries()) {
    auto it = a.cones.entries().find(key);
    if (it != a.cones.entries().end() && it->second != d) {
      throw Error("cone distance '" + key.first + "'/'" + key.second + "' differs between the two tree files");
    }
    ctx.cones.set(key.first, key.second, d);
  }
  return ctx;
}

int run_tree_close(const TreeCloseArgs& a) {
  const io::TreeDocument da = io::tree_document_from_json(io::read_json_file(a.a));
  const io::TreeDocument db = io::tree_document_from_json(io::read_json_file(a.b));
  const TreeContext ctx = merged_context(da.context, db.context);
  if (da.root.has_value() != db.root.has_value()) throw Error("cannot compare a tree with a large-scale tree");
  const CloseResult res = da.root ? gamma_close(*da.root, *db.root, a.gamma, ctx)
                                  : gamma_close_large_scale(*da.large_scale, *db.large_scale, a.gamma, ctx);
  CsvWriter csv({"gamma", "close", "failure", "path", "constraint"});
  csv.row(a.gamma, res.close, failure_name(res.failure), res.path, res.constraint);
  return emit(csv, a.out);
}

struct CoverArgs {
  std::string file;
  double gamma = 0.01;
  double r0 = 0.0;
  std::string out;
};

std::string ball_string(const BallId& id) {
  std::string s;
  for (std::size_t i = 0; i < id.size(); ++i) s += (i ? " " : "") + std::to_string(id[i]);
  return s;
}

int run_cover_index(const CoverArgs& a) {
  const io::TreeDocument doc = io::tree_document_from_json(io::read_json_file(a.file));
  if (!doc.root) throw Error("cover-index needs a tree with a root node");
  std::set<std::string> cone_ids;
  for (const auto& [key, d] : doc.context.cones.entries()) {
    cone_ids.insert(key.first);
    cone_ids.insert(key.second);
  }
  std::function<void(const TreeNode&)> collect = [&](const TreeNode& n) {
    if (n.is_type1()) cone_ids.insert(n.type1().cone);
    for (const auto& c : n.children) collect(c);
  };
  collect(*doc.root);
  const std::vector<std::string> cones(cone_ids.begin(), cone_ids.end());
  const Type1Scheme scheme{greedy_cone_net(cones, doc.context.cones, a.gamma), CubeManifold{}};

  CsvWriter csv({"path", "kind", "net_index", "rho_k", "R_k", "ball"});
  std::function<void(const TreeNode&, const std::string&)> walk = [&](const TreeNode& n, const std::string& path) {
    if (n.is_type1()) {
      const TypeI& t = n.type1();
      const Type1Cell cell = covering_cell_type1(t.cone, t.x, t.R, t.rho, a.gamma, scheme);
      csv.row(path, "I", cell.net_index, cell.rho_k ? std::to_string(*cell.rho_k) : std::string("zero"), cell.R_k,
              ball_string(cell.ball));
    } else {
      const TypeII& t = n.type2();
      double r0 = a.r0;
      if (!(r0 > 0.0)) {
        const SmoothModelMeta* m = doc.context.model(t.model);
        if (!m) throw Error("unknown smooth model '" + t.model + "' (pass --r0)");
        r0 = m->min_inner_radius();
      }
      const Type2Cell cell = covering_cell_type2(t.x, t.R, a.gamma, r0, CubeManifold{});
      csv.row(path, "II", "", "", cell.k, ball_string(cell.ball));
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], path + "/" + std::to_string(i));
  };
  walk(*doc.root, "root");
  return emit(csv, a.out);
}

struct ScapArgs {
  std::string dag, surface;
  std::string out;
};

int run_scap(const ScapArgs& a) {
  const DegenerationDag dag = io::dag_from_json(io::read_json_file(a.dag));
  const ScapTable table = scap_table(dag);
  CsvWriter csv({"scope", "id", "scap", "usc_ok"});
  for (const auto& c : dag.cones()) csv.row("cone", c.id, table.at(c.id), scap_usc_check(dag, c.id, &table));
  if (!a.surface.empty()) {
    const io::SurfaceSpec s = io::surface_from_json(io::read_json_file(a.surface));
    csv.row("surface", "", scap_surface(s.singular_points, s.one_sided, dag), "");
  }
  return emit(csv, a.out);
}

// ---- acceptance -------------------------------------------------------------

struct AcceptArgs {
  std::string suite = "all";
  std::uint64_t seed = 7;
  std::string fault;
  std::string out;
};

int run_accept(const AcceptArgs& a) {
  acceptance::Faults faults;
  if (a.fault == "flip-discriminant-sign") {
    faults.flip_discriminant_sign = true;
  } else if (!a.fault.empty()) {
    throw Error("unknown fault '" + a.fault + "'");
  }
  const auto rows = acceptance::run_suite(a.suite, a.seed, faults);
  const std::string text = acceptance::to_csv(rows);
  std::cout << text;
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error("cannot open '" + a.out + "' for writing");
    f << text;
  }
  for (const auto& r : rows)
    if (!r.pass) return 2;
  return 0;
}

void report_error(const std::string& command, const std::string& message) {
  std::cerr << json{{"error", message}, {"command", command}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypercone: spectra, growth thresholds, graph operators and cone trees"};
  app.require_subcommand(1);

  SpectrumArgs sp;
  auto* c_sp = app.add_subcommand("spectrum", "cross-section spectrum and indicial roots");
  c_sp->add_option("--cone", sp.cone, "cone descriptor (JSON)")->required();
  c_sp->add_option("--mu-max", sp.mu_max, "largest eigenvalue to list");
  c_sp->add_option("--out", sp.out, "CSV output path");
  c_sp->add_option("--svg", sp.svg, "SVG plot path");

  GrowthArgs gr;
  auto* c_gr = app.add_subcommand("growth-check", "three-scale growth inequality for a truncated Jacobi field");
  c_gr->add_option("--cone", gr.cone)->required();
  c_gr->add_option("--coeffs", gr.coeffs, "[[j, c_plus, c_minus], ...]")->required();
  c_gr->add_option("--gamma", gr.gamma)->required();
  c_gr->add_option("--K", gr.K)->required();
  c_gr->add_option("--sigma", gr.sigma, "admissibility distance");
  c_gr->add_option("--mu-max", gr.mu_max, "spectrum cutoff for the ladder");
  c_gr->add_option("--out", gr.out);

  KSearchArgs ks;
  auto* c_ks = app.add_subcommand("k-search", "grid-certified scale ratio threshold");
  c_ks->add_option("--sigma", ks.sigma)->required();
  c_ks->add_option("--branch", ks.branch)->check(CLI::IsMember({"power", "log"}));
  c_ks->add_option("--grid", ks.grid, "grid JSON (default: [-4,4] step 0.25, K = 2.5..50 step 0.5)");
  c_ks->add_option("--out", ks.out);
  c_ks->add_option("--svg", ks.svg);

  RateArgs ra;
  auto* c_ra = app.add_subcommand("rate-estimate", "asymptotic rate from annulus L2 norms");
  c_ra->add_option("--samples", ra.samples, "[[s, l2], ...] with s decreasing")->required();
  c_ra->add_option("--n", ra.n);
  c_ra->add_option("--cone", ra.cone, "snap the estimate to this cone's admissible rates");
  c_ra->add_option("--mu-max", ra.mu_max);
  c_ra->add_option("--out", ra.out);
  c_ra->add_option("--svg", ra.svg);

  OdeArgs od;
  auto* c_od = app.add_subcommand("ode-solve", "radial Jacobi equation on [r_min, 1]");
  c_od->add_option("--mu", od.mu);
  c_od->add_option("--n", od.n);
  c_od->add_option("--v0", od.v0, "v(1)");
  c_od->add_option("--dv0", od.dv0, "v'(1)");
  c_od->add_option("--r-min", od.r_min);
  c_od->add_option("--b0", od.b0, "first-order perturbation scale");
  c_od->add_option("--b1", od.b1, "zeroth-order perturbation scale");
  c_od->add_option("--profile", od.profile)->check(CLI::IsMember({"constant", "bump", "oscillating"}));
  c_od->add_option("--samples", od.samples);
  c_od->add_option("--out", od.out);
  c_od->add_option("--svg", od.svg);

  LinearizeArgs li;
  auto* c_li = app.add_subcommand("linearize", "linearisation residuals of the minimal surface operator");
  c_li->add_option("--n", li.n);
  c_li->add_option("--res", li.res, "grid spacing h (2/h integer, h <= 1/8)");
  c_li->add_option("--eps", li.eps, "perturbation sizes")->expected(2, -1);
  c_li->add_option("--report", li.report, "CSV output path");
  c_li->add_option("--svg", li.svg);
  c_li->add_option("--dump-dir", li.dump_dir, "write residual fields as CSV plus JSON header");

  TreeValidateArgs tv;
  auto* c_tv = app.add_subcommand("tree-validate", "check tree constraints; exit 2 on findings");
  c_tv->add_option("file", tv.file)->required();
  c_tv->add_option("--beta", tv.beta);
  c_tv->add_option("--out", tv.out);

  TreeCloseArgs tc;
  auto* c_tc = app.add_subcommand("tree-close", "gamma-closeness of two trees");
  c_tc->add_option("--gamma", tc.gamma)->required();
  c_tc->add_option("a", tc.a)->required();
  c_tc->add_option("b", tc.b)->required();
  c_tc->add_option("--out", tc.out);

  CoverArgs cv;
  auto* c_cv = app.add_subcommand("cover-index", "covering cell of every node of a tree");
  c_cv->add_option("file", cv.file)->required();
  c_cv->add_option("--gamma", cv.gamma)->required();
  c_cv->add_option("--r0", cv.r0, "type-II inner radius (default: the model's smallest inner ball)");
  c_cv->add_option("--out", cv.out);

  ScapArgs sc;
  auto* c_sc = app.add_subcommand("scap", "singular capacity over a degeneration DAG");
  c_sc->add_option("--dag", sc.dag)->required();
  c_sc->add_option("--surface", sc.surface);
  c_sc->add_option("--out", sc.out);

  AcceptArgs ac;
  auto* c_ac = app.add_subcommand("accept", "run acceptance criteria; exit 2 on any FAIL");
  c_ac->add_option("--suite", ac.suite, "spectrum, growth, graph, trees or all");
  c_ac->add_option("--seed", ac.seed);
  c_ac->add_option("--out", ac.out);
  c_ac->add_option("--inject-fault", ac.fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("", e.what());
    return 1;
  }

  const std::vector<std::pair<CLI::App*, std::function<int()>>> table{
      {c_sp, [&] { return run_spectrum(sp); }},        {c_gr, [&] { return run_growth_check(gr); }},
      {c_ks, [&] { return run_k_search(ks); }},        {c_ra, [&] { return run_rate_estimate(ra); }},
      {c_od, [&] { return run_ode_solve(od); }},       {c_li, [&] { return run_linearize(li); }},
      {c_tv, [&] { return run_tree_validate(tv); }},   {c_tc, [&] { return run_tree_close(tc); }},
      {c_cv, [&] { return run_cover_index(cv); }},     {c_sc, [&] { return run_scap(sc); }},
      {c_ac, [&] { return run_accept(ac); }}};
  for (const auto& [cmd, fn] : table) {
    if (!cmd->parsed()) continue;
    try {
      return fn();
    } catch (const std::exception& e) {
      report_error(cmd->get_name(), e.what());
      return 1;
    }
  }
  return 1;
}
