#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "syztrop/syztrop.hpp"

using namespace syztrop;

namespace {

struct GlobalFlags {
  std::string out;
  std::string precision = "20";
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  bool no_timing = false;

  void attach(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--out", out, "write the report/data here instead of stdout");
    cmd->add_option("--precision", precision, "working precision (rational)");
    cmd->add_option("--tolerance", tolerance, "coefficient comparison tolerance");
    if (with_seed) cmd->add_option("--seed", seed, "sampling seed");
    cmd->add_flag("--no-timing", no_timing, "omit timing fields from the report");
  }

  Rational precision_rational() const { return parse_rational(precision); }
};

void emit(const GlobalFlags& flags, const std::string& text) {
  if (flags.out.empty())
    std::cout << text << "\n";
  else
    save_text(flags.out, text + "\n");
}

void emit(const GlobalFlags& flags, const Json& j) { emit(flags, j.dump(2)); }

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<Rational> rational_grid(const Rational& radius, const Rational& step) {
  std::vector<Rational> grid;
  for (Rational q = -radius; q <= radius; q += step) grid.push_back(q);
  return grid;
}

ValidatedToric load_toric_or_cn(const std::string& path, int n, std::string* digest) {
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (digest) *digest = fnv1a_hex(buf.str());
    return validate(toric_from_json(Json::parse(buf.str())));
  }
  if (digest) *digest = fnv1a_hex("cn:" + std::to_string(n));
  return validate(standard_cn(n));
}

// ---------------------------------------------------------------------------
// tropical: hypersurface samples and chamber map on a rational grid

int cmd_tropical(const GlobalFlags& flags, const std::string& h_path,
                 const Rational& radius, const Rational& step) {
  const LaurentPoly h = laurent_from_json(load_json(h_path), flags.precision_rational());
  if (h.size() < 2) throw DegenerateInput("h needs at least two terms");
  const Tropical ht = tropicalize(h);
  const int m = ht.nvars();

  std::string csv = "";
  for (int k = 1; k <= m; ++k) csv += "q" + std::to_string(k) + ",";
  csv += "value,argmin_count,argmin_terms,tag\n";

  const std::vector<Rational> grid = rational_grid(radius, step);
  std::vector<int> idx(m, 0);
  for (;;) {
    std::vector<Rational> qbar(m);
    for (int k = 0; k < m; ++k) qbar[k] = grid[idx[k]];
    const TropEval ev = trop_eval(ht, qbar);
    const ChamberTag tag = classify_base_point(ht, {qbar, Rational(0)});
    for (const auto& q : qbar) csv += to_string(q) + ",";
    csv += to_string(ev.value) + "," + std::to_string(ev.argmin.size()) + ",";
    for (std::size_t a = 0; a < ev.argmin.size(); ++a)
      csv += (a ? ";" : "") + std::to_string(ev.argmin[a] + 1);
    csv += ",";
    switch (tag.kind) {
      case ChamberKind::Wall: csv += "wall:" + std::to_string(tag.wall_index); break;
      case ChamberKind::Discriminant: csv += "discriminant"; break;
      case ChamberKind::Plus: csv += "plus"; break;
      case ChamberKind::Minus: csv += "minus"; break;
    }
    csv += "\n";
    int k = 0;
    while (k < m && ++idx[k] == static_cast<int>(grid.size())) idx[k++] = 0;
    if (k == m) break;
  }
  emit(flags, csv.substr(0, csv.size()));
  return 0;
}

// ---------------------------------------------------------------------------
// surface: broken-line surface mesh for figure export

int cmd_surface(const GlobalFlags& flags, const std::string& toric_path, int n,
                const std::string& model, const Rational& radius, const Rational& step,
                const std::vector<std::string>& fixed, const std::string& format) {
  std::string digest;
  const ValidatedToric data = load_toric_or_cn(toric_path, n, &digest);
  const Tropical ht = build_h_trop(data);
  const int m = ht.nvars();

  std::vector<Rational> fix;
  for (const auto& f : fixed) fix.push_back(parse_rational(f));
  if (static_cast<int>(fix.size()) > m - 1)
    throw DomainError("too many fixed coordinates for this base dimension");
  while (static_cast<int>(fix.size()) < m - 1) fix.push_back(Rational(0));

  const std::vector<Rational> qgrid = rational_grid(radius, step);
  std::vector<Rational> cgrid;
  for (Rational c = step / 2; c <= radius + 1; c += step / 2) cgrid.push_back(c);

  const bool exact = model == "exact";
  ExactPLPsi<Rational> psi_exact;
  SoftplusPsi psi_soft;

  Json slices = Json::array();
  std::string csv;
  for (int k = 1; k <= m; ++k) csv += "q" + std::to_string(k) + ",";
  csv += "c,u0,u1\n";
  for (const auto& q0 : qgrid) {
    std::vector<Rational> qbar{q0};
    qbar.insert(qbar.end(), fix.begin(), fix.end());
    Json pts = Json::array();
    for (const auto& c : cgrid) {
      std::string u0s, u1s;
      if (exact) {
        const auto [u0, u1] = broken_line(qbar, psi_exact, ht, c);
        u0s = to_string(u0);
        u1s = to_string(u1);
      } else {
        const auto [u0, u1] = broken_line(qbar, psi_soft, ht, to_double(c));
        u0s = fmt17(u0);
        u1s = fmt17(u1);
      }
      pts.push_back({to_string(c), u0s, u1s});
      for (const auto& q : qbar) csv += to_string(q) + ",";
      csv += to_string(c) + "," + u0s + "," + u1s + "\n";
    }
    Json qj = Json::array();
    for (const auto& q : qbar) qj.push_back(to_string(q));
    slices.push_back({{"qbar", qj}, {"points", pts}});
  }

  if (format == "csv") {
    emit(flags, csv);
  } else {
    Json j{{"command", "surface"}, {"inputs_digest", digest}, {"model", model},
           {"slices", slices}};
    emit(flags, j);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: commutation + singular-locus checks

int cmd_verify(const GlobalFlags& flags, const std::string& toric_path, int n,
               long samples, const std::string& model, const std::string& margin,
               bool inject_bug, int threads) {
  Stopwatch clock;
  std::string digest;
  const ValidatedToric data = load_toric_or_cn(toric_path, n, &digest);

  VerifyOptions opts;
  opts.margin = parse_rational(margin);
  opts.inject_bug = inject_bug;
  opts.threads = threads;

  CommutationReport commutation;
  if (model == "softplus") {
    opts.tol = flags.tolerance;
    commutation = verify_commutation<double>(data, std::make_shared<SoftplusPsi>(),
                                             samples, flags.seed, opts);
  } else {
    commutation = verify_commutation<Rational>(
        data, std::make_shared<ExactPLPsi<Rational>>(), samples, flags.seed, opts);
  }
  commutation.model = model;

  const SingularLocusReport locus = verify_singular_locus(
      data, std::make_shared<ExactPLPsi<Rational>>(), std::max(200L, samples / 5),
      flags.seed);

  const bool passed = commutation.passed() && locus.passed();
  Json j{{"command", "verify"},
         {"inputs_digest", digest},
         {"commutation", to_json(commutation)},
         {"singular_locus", to_json(locus)},
         {"passed", passed}};
  if (!flags.no_timing) j["timing_ms"] = clock.ms();
  emit(flags, j);
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// critical: LG critical points and the eigenvalue comparison

int cmd_critical(const GlobalFlags& flags, const std::string& family, int n, int m,
                 const std::string& E1, const std::string& E2, const std::string& chart,
                 const std::string& custom_w_path, const std::string& custom_chart) {
  Stopwatch clock;
  CompactificationSpec spec;
  spec.n = n;
  spec.m = m;
  spec.E1 = parse_rational(E1);
  spec.E2 = parse_rational(E2);
  std::string digest = fnv1a_hex(family + ":" + std::to_string(n) + ":" +
                                 std::to_string(m) + ":" + E1 + ":" + E2);
  if (family == "cpn") {
    spec.family = CompactificationSpec::Family::CPn;
  } else if (family == "cpm-x-cpnm") {
    spec.family = CompactificationSpec::Family::CPmxCPnm;
  } else if (family == "cn") {
    spec.family = CompactificationSpec::Family::Cn;
  } else if (family == "custom") {
    spec.family = CompactificationSpec::Family::Custom;
    if (custom_w_path.empty()) throw UnsupportedFamily("custom family needs --custom-w");
    std::ifstream in(custom_w_path);
    std::stringstream buf;
    buf << in.rdbuf();
    digest = fnv1a_hex(buf.str());
    spec.custom_w = laurent_from_json(Json::parse(buf.str()), flags.precision_rational());
    spec.custom_chart = custom_chart == "plus"  ? Chart::Plus
                        : custom_chart == "minus" ? Chart::Minus
                                                  : Chart::Y;
    if (spec.custom_chart == Chart::Y) {
      spec.n = spec.custom_w.nvars() - 1;
      spec.custom_h = detail::cn_h(spec.n);
    } else {
      spec.n = spec.custom_w.nvars();
    }
  } else {
    throw UnsupportedFamily("unknown family " + family);
  }

  const Chart solve_chart = chart == "plus"  ? Chart::Plus
                            : chart == "minus" ? Chart::Minus
                                               : Chart::Y;
  const Rational precision = flags.precision_rational();
  SolveDiagnostics diag;
  const auto points = solve_critical_points(spec, solve_chart, precision, {}, &diag);

  Json jpoints = Json::array();
  const ExactPLPsi<Rational> psi;
  std::vector<CriticalBasePoint> bases;
  if (solve_chart == Chart::Y && spec.family != CompactificationSpec::Family::Custom)
    bases = critical_base_points(points, psi, tropicalize(detail::cn_h(spec.n)));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    Json coords = Json::array();
    for (const auto& c : p.coords) coords.push_back(to_string(c));
    Json defects = Json::array();
    for (const auto& d : p.defect_history) defects.push_back(to_string(d));
    Json entry{{"chart", to_string(p.chart)},
               {"coords", coords},
               {"value", to_string(p.value)},
               {"residual_val", to_string(p.residual)},
               {"lift_defects", defects}};
    if (i < bases.size()) {
      Json base;
      Json qbar = Json::array();
      for (const auto& q : bases[i].qbar) qbar.push_back(to_string(q));
      base["qbar"] = qbar;
      if (bases[i].qn) base["qn"] = to_string(*bases[i].qn);
      base["on_wall"] = bases[i].on_wall;
      base["on_hypersurface"] = bases[i].on_hypersurface;
      base["x1_val"] = to_string(bases[i].x1_val);
      entry["base_point"] = base;
    }
    jpoints.push_back(std::move(entry));
  }

  // eigenvalue comparison plus cross-chart agreement for the closed families
  std::string verdict = "not-applicable";
  bool passed = true;
  if (spec.family == CompactificationSpec::Family::CPn ||
      spec.family == CompactificationSpec::Family::CPmxCPnm) {
    std::vector<Novikov> values;
    for (const auto& p : points) values.push_back(p.value);
    const bool match =
        values_match_multiset(values, c1_eigenvalues(spec), flags.tolerance);
    std::vector<Novikov> plus_vals, minus_vals;
    for (const auto& p : solve_critical_points(spec, Chart::Plus, precision))
      plus_vals.push_back(p.value);
    for (const auto& p : solve_critical_points(spec, Chart::Minus, precision))
      minus_vals.push_back(p.value);
    const bool charts_agree =
        values_match_multiset(plus_vals, minus_vals, flags.tolerance);
    passed = match && charts_agree;
    verdict = passed ? "values-match-c1-eigenvalues"
              : match ? "chart-multisets-disagree"
                      : "values-differ-from-c1-eigenvalues";
  }

  Json j{{"command", "critical"}, {"inputs_digest", digest},
         {"family", family},      {"chart", chart},
         {"points", jpoints},     {"eigenvalue_verdict", verdict},
         {"passed", passed}};
  if (!diag.notes.empty()) j["diagnostics"] = diag.notes;
  if (!flags.no_timing) j["timing_ms"] = clock.ms();
  emit(flags, j);
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// converse: fan and moment data from a Laurent polynomial

int cmd_converse(const GlobalFlags& flags, const std::string& h_path) {
  const LaurentPoly h = laurent_from_json(load_json(h_path), flags.precision_rational());
  const ConverseResult res = syz_converse(h);
  const ValidatedToric v = validate(res.data);

  // round trip sanity: rebuilding h from the fan reproduces the input
  const bool round_trip = approx_equal(build_h(v), h, flags.tolerance);

  Json j = to_json(res.data);
  Json polytope = Json::array();
  for (const auto& ineq : res.polytope.inequalities)
    polytope.push_back({{"normal", ineq.normal}, {"constant", to_string(ineq.constant)}});
  j["polytope"] = polytope;
  j["round_trip_ok"] = round_trip;
  Json compact = Json::array();
  for (int i : detect_compact_divisors(v)) compact.push_back(i);
  j["compact_divisors"] = compact;
  emit(flags, j);
  return round_trip ? 0 : 1;
}

// ---------------------------------------------------------------------------
// singular-fiber: classify explicit points or sample the n = 2 dual fiber

int cmd_singular_fiber(const GlobalFlags& flags, const std::string& x0,
                       const std::string& x1, const std::string& y, long samples,
                       const std::string& psi0) {
  Stopwatch clock;
  const Rational p0 = parse_rational(psi0);
  const auto psi = std::make_shared<ExactPLPsi<Rational>>(constant_psi0(p0));
  const VarietyFibration<Rational> fib(detail::cn_h(2), psi);

  if (!x0.empty() || !x1.empty() || !y.empty()) {
    const VarietyPoint z{parse_novikov(x0), parse_novikov(x1), {parse_novikov(y)}};
    const SingularFiberClass cls = fib.classify_singular_fiber_n2(z);
    Json j{{"command", "singular-fiber"},
           {"class", cls == SingularFiberClass::MaurerCartan ? "maurer-cartan" : "extra"},
           {"passed", true}};
    if (!flags.no_timing) j["timing_ms"] = clock.ms();
    emit(flags, j);
    return 0;
  }

  // generator mode: z0 z1 = 1 + y with val(z0), val(z1) >= 0 and val(y) = 0
  long mc = 0, extra = 0, mismatches = 0;
  Json witness_extra, witness_mc;
  for (long i = 0; i < samples; ++i) {
    Prng rng = Prng(flags.seed).fork(0x400000000ull + static_cast<std::uint64_t>(i));
    const bool make_extra = rng.below(2) == 0;
    Novikov z0, z1;
    if (make_extra) {
      z0 = detail::sampled_unit(rng, Rational(0), Rational(12));
      z1 = detail::sampled_unit(rng, Rational(0), Rational(12));
      const Complex prod = z0.leading_coeff() * z1.leading_coeff();
      if (std::abs(prod - Complex(1, 0)) < 1e-6) continue;  // reduction product 1
    } else {
      z0 = rng.below(4) == 0 ? Novikov::zero(Rational(12))
                             : detail::sampled_unit(rng, rational(rng.int_in(0, 4), 2),
                                                    Rational(12));
      z1 = detail::sampled_unit(rng, rational(rng.int_in(1, 6), 2), Rational(12));
      if (rng.below(2) == 0) std::swap(z0, z1);
    }
    const Novikov yv = -Novikov::one() + z0 * z1;
    if (yv.is_zero()) continue;
    const VarietyPoint z{z0.shifted(-p0), z1.shifted(p0), {yv}};

    const BasePoint base = fib.f(z);
    const bool at_origin = base.qn == 0 && base.qbar == std::vector<Rational>{Rational(0)};
    const SingularFiberClass cls = fib.classify_singular_fiber_n2(z);
    const Valuation vy = (Novikov::one() + yv).val();
    const bool expect_mc = vy.gt(Rational(0));
    if (!at_origin || (cls == SingularFiberClass::MaurerCartan) != expect_mc) {
      ++mismatches;
      continue;
    }
    if (cls == SingularFiberClass::MaurerCartan) {
      ++mc;
      if (witness_mc.empty())
        witness_mc = Json{{"x0", to_string(z.x0)}, {"x1", to_string(z.x1)},
                          {"y", to_string(yv)}};
    } else {
      ++extra;
      if (witness_extra.empty())
        witness_extra = Json{{"x0", to_string(z.x0)}, {"x1", to_string(z.x1)},
                             {"y", to_string(yv)}};
    }
  }
  const bool passed = mismatches == 0 && mc > 0 && extra > 0;
  Json j{{"command", "singular-fiber"},
         {"samples", mc + extra},
         {"maurer_cartan", mc},
         {"extra", extra},
         {"mismatches", mismatches},
         {"seed", flags.seed},
         {"extra_witness", witness_extra},
         {"maurer_cartan_witness", witness_mc},
         {"passed", passed}};
  if (!flags.no_timing) j["timing_ms"] = clock.ms();
  emit(flags, j);
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-archimedean SYZ fibration toolkit"};
  app.require_subcommand(1);

  GlobalFlags tropical_flags, surface_flags, verify_flags, critical_flags,
      converse_flags, fiber_flags;

  // tropical
  auto* tropical = app.add_subcommand(
      "tropical", "tropical hypersurface samples and chamber map on a grid");
  std::string trop_h;
  std::string trop_radius = "3", trop_step = "1/2";
  tropical->add_option("--h-file", trop_h, "Laurent polynomial JSON")->required();
  tropical->add_option("--range", trop_radius, "grid radius (rational)");
  tropical->add_option("--step", trop_step, "grid step (rational)");
  tropical_flags.attach(tropical, false);

  // surface
  auto* surface =
      app.add_subcommand("surface", "broken-line surface mesh of the fibration image");
  std::string surf_toric, surf_model = "exact", surf_format = "json";
  int surf_n = 2;
  std::string surf_radius = "3", surf_step = "1/2";
  std::vector<std::string> surf_fix;
  surface->add_option("--toric", surf_toric, "toric data JSON");
  surface->add_option("--n", surf_n, "use the standard fan in dimension n");
  surface->add_option("--model", surf_model, "exact|softplus")
      ->check(CLI::IsMember({"exact", "softplus"}));
  surface->add_option("--range", surf_radius, "grid radius");
  surface->add_option("--step", surf_step, "grid step");
  surface->add_option("--fix", surf_fix, "fixed trailing base coordinates for slices");
  surface->add_option("--format", surf_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  surface_flags.attach(surface, false);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "machine check of the fibration-preserving identity");
  verify->alias("verify-commutation");
  std::string ver_toric, ver_model = "exact", ver_margin = "1/10";
  int ver_n = 2, ver_threads = 0;
  long ver_samples = 1000;
  bool ver_bug = false;
  verify->add_option("--toric", ver_toric, "toric data JSON");
  verify->add_option("--n", ver_n, "use the standard fan in dimension n");
  verify->add_option("--samples", ver_samples, "samples per chamber");
  verify->add_option("--model", ver_model, "exact|softplus")
      ->check(CLI::IsMember({"exact", "softplus"}));
  verify->add_option("--margin", ver_margin, "wall-thickening margin (rational)");
  verify->add_option("--threads", ver_threads, "worker threads (0: SYZTROP_THREADS)");
  verify->add_flag("--inject-bug", ver_bug, "negative control: corrupt j on purpose");
  verify_flags.attach(verify);

  // critical
  auto* critical =
      app.add_subcommand("critical", "Landau-Ginzburg critical points and values");
  critical->alias("critical-points");
  std::string crit_family = "cpn", crit_chart = "y", crit_E1 = "1", crit_E2 = "1";
  std::string crit_custom, crit_custom_chart = "y";
  int crit_n = 2, crit_m = 1;
  critical->add_option("--family", crit_family, "cpn|cpm-x-cpnm|cn|custom");
  critical->add_option("--n", crit_n, "dimension");
  critical->add_option("--m", crit_m, "splitting for cpm-x-cpnm");
  critical->add_option("--E", crit_E1, "symplectic area (rational)");
  critical->add_option("--E2", crit_E2, "second symplectic area (rational)");
  critical->add_option("--chart", crit_chart, "plus|minus|y");
  critical->add_option("--custom-w", crit_custom, "custom potential JSON");
  critical->add_option("--custom-chart", crit_custom_chart, "chart of the custom potential");
  critical_flags.attach(critical, false);

  // converse
  auto* converse = app.add_subcommand(
      "converse", "reconstruct fan and moment data from a Laurent polynomial");
  std::string conv_h;
  converse->add_option("--h-file", conv_h, "Laurent polynomial JSON")->required();
  converse_flags.attach(converse, false);

  // singular-fiber
  auto* fiber = app.add_subcommand(
      "singular-fiber", "classify points of the n=2 dual singular fiber");
  std::string fx0, fx1, fy, fpsi0 = "1";
  long fiber_samples = 1000;
  fiber->add_option("--x0", fx0, "series literal");
  fiber->add_option("--x1", fx1, "series literal");
  fiber->add_option("--y", fy, "series literal");
  fiber->add_option("--samples", fiber_samples, "generator mode sample count");
  fiber->add_option("--psi0", fpsi0, "area of the vanishing disk (rational)");
  fiber_flags.attach(fiber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (tropical->parsed())
      return cmd_tropical(tropical_flags, trop_h, parse_rational(trop_radius),
                          parse_rational(trop_step));
    if (surface->parsed())
      return cmd_surface(surface_flags, surf_toric, surf_n, surf_model,
                         parse_rational(surf_radius), parse_rational(surf_step), surf_fix,
                         surf_format);
    if (verify->parsed())
      return cmd_verify(verify_flags, ver_toric, ver_n, ver_samples, ver_model,
                        ver_margin, ver_bug, ver_threads);
    if (critical->parsed())
      return cmd_critical(critical_flags, crit_family, crit_n, crit_m, crit_E1, crit_E2,
                          crit_chart, crit_custom, crit_custom_chart);
    if (converse->parsed()) return cmd_converse(converse_flags, conv_h);
    if (fiber->parsed())
      return cmd_singular_fiber(fiber_flags, fx0, fx1, fy, fiber_samples, fpsi0);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
