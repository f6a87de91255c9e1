#include "symcov/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace symcov {

namespace {

GroupElement parse_group_element(const DeckGroup& D, const json& j) {
  std::vector<long long> v;
  if (j.is_number_integer())
    v.push_back(j.get<long long>());
  else if (j.is_array())
    for (const auto& x : j) v.push_back(x.get<long long>());
  else
    throw std::invalid_argument("group element must be an integer or integer array");
  return D.make(std::move(v));
}

json group_element_json(const GroupElement& g) {
  if (g.v.size() == 1) return g.v[0];
  json arr = json::array();
  for (long long x : g.v) arr.push_back(x);
  return arr;
}

using CoeffFns = std::vector<std::function<double(const Vec&)>>;

CoeffFns bind_coeffs(const Atlas& atlas, const std::vector<std::string>& exprs,
                     const std::string& name) {
  if (static_cast<int>(exprs.size()) != atlas.dim)
    throw std::invalid_argument("form '" + name + "': need one coefficient per coordinate");
  CoeffFns fns;
  for (const auto& e : exprs) fns.push_back(expr_bind(parse_expression(e), atlas.coord_names));
  return fns;
}

// coeffs is either a flat expression array (all charts) or a map from chart
// index (or "*") to expression arrays.
OneForm form_from_config(const Atlas& atlas, const json& coeffs, bool closed,
                         const std::string& name) {
  if (coeffs.is_array()) {
    auto fns = bind_coeffs(atlas, coeffs.get<std::vector<std::string>>(), name);
    return OneForm{[fns](int, const Vec& y) {
                     Vec out(fns.size());
                     for (size_t i = 0; i < fns.size(); ++i) out[i] = fns[i](y);
                     return out;
                   },
                   closed, name};
  }
  if (!coeffs.is_object())
    throw std::invalid_argument("form '" + name + "': coeffs must be an array or a chart map");
  std::map<int, CoeffFns> per_chart;
  std::optional<CoeffFns> fallback;
  for (const auto& [key, val] : coeffs.items()) {
    auto fns = bind_coeffs(atlas, val.get<std::vector<std::string>>(), name);
    if (key == "*")
      fallback = std::move(fns);
    else
      per_chart[std::stoi(key)] = std::move(fns);
  }
  for (int a = 0; a < static_cast<int>(atlas.charts.size()); ++a)
    if (!per_chart.count(a) && !fallback)
      throw std::invalid_argument("form '" + name + "': no coefficients for chart " +
                                  std::to_string(a));
  return OneForm{[per_chart, fallback](int chart, const Vec& y) {
                   auto it = per_chart.find(chart);
                   const CoeffFns& fns = it != per_chart.end() ? it->second : *fallback;
                   Vec out(fns.size());
                   for (size_t i = 0; i < fns.size(); ++i) out[i] = fns[i](y);
                   return out;
                 },
                 closed, name};
}

/// A loop representing the deck element d (FreeAbelian deck): concatenated
/// powers of the atlas generators.
Loop loop_for_deck(const Atlas& atlas, const DeckGroup& D, const GroupElement& d) {
  if (D.kind() != GroupKind::FreeAbelian)
    throw std::invalid_argument("loop_for_deck: free abelian deck groups only");
  std::optional<Loop> acc;
  for (size_t i = 0; i < atlas.generators.size(); ++i) {
    if (d.v[i] == 0) continue;
    Loop p = atlas.loop_power(atlas.generators[i], d.v[i]);
    acc = acc ? atlas.loop_concat(*acc, p) : p;
  }
  if (!acc) {
    const Vec base = atlas.generators.empty() ? atlas.base_coords
                                              : atlas.generators[0].curve(0.0);
    acc = Loop{"const", [base](double) { return base; }, 2,
               std::vector<long long>(atlas.generators.size(), 0)};
  }
  return *acc;
}

std::mt19937_64 seeded_rng(const Scenario& s, uint64_t salt) {
  return std::mt19937_64(s.seed * 1000003 + salt);
}

Vec random_chart_point(const Atlas& atlas, int a, std::mt19937_64& rng, double margin = 0.1) {
  std::uniform_real_distribution<double> frac(margin, 1.0 - margin);
  const auto& ch = atlas.charts[static_cast<size_t>(a)];
  Vec y(static_cast<size_t>(atlas.dim));
  for (int i = 0; i < atlas.dim; ++i) {
    const double lo = std::isfinite(ch.lo[static_cast<size_t>(i)]) ? ch.lo[static_cast<size_t>(i)] : -2.5;
    const double hi = std::isfinite(ch.hi[static_cast<size_t>(i)]) ? ch.hi[static_cast<size_t>(i)] : 2.5;
    y[static_cast<size_t>(i)] = lo + (hi - lo) * frac(rng);
  }
  return y;
}

}  // namespace

LiftedAction Scenario::make_lift() const {
  if (!action) throw std::invalid_argument("scenario '" + name + "' has no action");
  return LiftedAction(*action, covering, component_lifts, path_samples);
}

LocalMomentMap Scenario::make_moment(MomentBuildReport* rep) const {
  if (!action || !omega)
    throw std::invalid_argument("scenario '" + name + "' has no symplectic action");
  return build_local_moment_map(*action, *omega, covering, rep);
}

std::vector<CoverPoint> Scenario::sample_cover_points(int n, int label_window) const {
  auto rng = std::mt19937_64(seed * 7919 + 11);
  const auto labels = deck_window(deck, label_window);
  std::vector<CoverPoint> pts;
  for (int i = 0; i < n; ++i) {
    const int a = static_cast<int>(rng() % atlas.charts.size());
    pts.push_back({a, labels[rng() % labels.size()], random_chart_point(atlas, a, rng)});
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Scenario catalog

namespace {

Scenario base_scenario(const std::string& name, const std::string& manifold, int charts = 3) {
  Scenario s;
  s.name = name;
  AtlasParams ap;
  ap.charts = charts;
  s.atlas = builtin_atlas(manifold, ap);
  s.covering = canonical_covering(s.atlas);
  s.deck = s.covering.deck;
  s.cocycle = s.covering.cocycle;
  return s;
}

OneForm form_dtheta(const Atlas& atlas) {
  const int dim = atlas.dim;
  return OneForm{[dim](int, const Vec&) {
                   Vec v(static_cast<size_t>(dim), 0.0);
                   v[0] = 1.0;
                   return v;
                 },
                 true, "dtheta"};
}

}  // namespace

Scenario builtin_scenario(const std::string& name) {
  if (name == "circle_universal") {
    Scenario s = base_scenario(name, "circle");
    s.forms.emplace("dtheta", form_dtheta(s.atlas));
    s.forms.emplace("exact", OneForm::global([](const Vec& y) { return Vec{std::cos(y[0])}; },
                                             true, "exact"));
    s.checks = {"cocycle", "transitions", "periods", "potential", "cohomology"};
    return s;
  }
  if (name == "circle_z4_table") {
    Scenario s = base_scenario(name, "circle");
    // Z_4 as an explicit multiplication table.
    std::vector<std::vector<int>> t(4, std::vector<int>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t[static_cast<size_t>(i)][static_cast<size_t>(j)] = (i + j) % 4;
    s.deck = DeckGroup::table(t, {"e", "g", "g2", "g3"});
    CechCocycle1 c{s.deck, {}};
    c.set(2, 0, s.deck.make({1}));
    s.cocycle = c;
    s.covering = covering_from_cocycle(s.atlas, s.deck, c);
    s.forms.emplace("exact", OneForm::global([](const Vec& y) { return Vec{std::cos(y[0])}; },
                                             true, "exact"));
    s.checks = {"cocycle", "periods"};
    return s;
  }
  if (name == "annulus_forms") {
    Scenario s = base_scenario(name, "annulus");
    s.forms.emplace("dtheta", form_dtheta(s.atlas));
    s.forms.emplace("rich", OneForm::global(
                                [](const Vec& y) {
                                  // dtheta + d(r^2 sin theta)
                                  return Vec{1.0 + y[1] * y[1] * std::cos(y[0]),
                                             2.0 * y[1] * std::sin(y[0])};
                                },
                                true, "rich"));
    s.checks = {"cocycle", "periods", "homotopy", "potential"};
    return s;
  }
  if (name == "torus_forms") {
    Scenario s = base_scenario(name, "torus");
    s.forms.emplace("mixed", OneForm::global([](const Vec&) { return Vec{3.0, 5.0}; }, true,
                                             "mixed"));
    s.checks = {"cocycle", "transitions", "periods", "potential"};
    return s;
  }
  if (name == "cylinder_rotation" || name == "cylinder_boost" || name == "cylinder_screw") {
    Scenario s = base_scenario(name, "cylinder");
    s.omega = TwoForm::constant(-1.0, "dp^dtheta");  // omega = dp ^ dtheta
    const std::string type = name == "cylinder_rotation" ? "rotation"
                             : name == "cylinder_boost"  ? "boost"
                                                         : "screw";
    s.action = catalog_action(type, s.atlas);
    s.checks = {"action", "lift_law", "moment", "equivariance", "transform", "states", "flow"};
    if (name == "cylinder_boost") s.checks.push_back("intermediate");
    return s;
  }
  if (name == "plane_translations") {
    Scenario s = base_scenario(name, "plane");
    s.omega = TwoForm::constant(1.0, "dx^dy");
    s.action = catalog_action("plane_translations", s.atlas);
    s.checks = {"action", "moment", "equivariance", "states"};
    return s;
  }
  if (name == "circle_halfturn_extension" || name == "circle_reflection_extension") {
    Scenario s = base_scenario(name, "circle");
    const bool reflect = name == "circle_reflection_extension";
    s.action = catalog_action(reflect ? "reflection" : "half_turn", s.atlas);
    s.component_lifts = {std::nullopt,
                         ComponentLift{reflect ? "reflection" : "half_turn", 0}};
    s.checks = {"extension", "cohomology"};
    return s;
  }
  if (name == "circle_rotation_obstruction") {
    Scenario s = base_scenario(name, "circle");
    s.action = catalog_action("rotation", s.atlas, /*circle_group=*/true);
    s.checks = {"obstruction"};
    return s;
  }
  throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
  return {"circle_universal",      "circle_z4_table",
          "annulus_forms",         "torus_forms",
          "cylinder_rotation",     "cylinder_boost",
          "cylinder_screw",        "plane_translations",
          "circle_halfturn_extension", "circle_reflection_extension",
          "circle_rotation_obstruction"};
}

// ---------------------------------------------------------------------------
// Config loading

Scenario load_scenario(const json& cfg) {
  if (!cfg.is_object()) throw std::invalid_argument("scenario config must be a JSON object");
  if (cfg.value("schema", 0) != 1) throw std::invalid_argument("unsupported schema (want 1)");

  if (cfg.contains("builtin")) {
    Scenario s = builtin_scenario(cfg["builtin"].get<std::string>());
    if (cfg.contains("checks")) s.checks = cfg["checks"].get<std::vector<std::string>>();
    if (cfg.contains("window")) s.window = cfg["window"].get<int>();
    if (cfg.contains("grid")) s.grid = cfg["grid"].get<double>();
    if (cfg.contains("seed")) s.seed = cfg["seed"].get<uint64_t>();
    if (cfg.contains("name")) s.name = cfg["name"].get<std::string>();
    return s;
  }

  Scenario s;
  s.name = cfg.value("name", std::string("scenario"));
  const auto& man = cfg.at("manifold");
  AtlasParams ap;
  ap.charts = man.value("charts", 3);
  ap.pad = man.value("pad", 0.25);
  ap.annulus_r0 = man.value("r0", 1.0);
  ap.annulus_r1 = man.value("r1", 2.0);
  s.atlas = builtin_atlas(man.at("type").get<std::string>(), ap);

  if (cfg.contains("group")) {
    const auto& g = cfg["group"];
    const std::string kind = g.at("kind").get<std::string>();
    if (kind == "Z")
      s.deck = DeckGroup::free_abelian(g.value("rank", 1));
    else if (kind == "Zn")
      s.deck = DeckGroup::cyclic(g.at("n").get<long long>());
    else if (kind == "table")
      s.deck = DeckGroup::table(g.at("table").get<std::vector<std::vector<int>>>(),
                                g.value("names", std::vector<std::string>{}));
    else
      throw std::invalid_argument("unknown group kind '" + kind + "'");
    CechCocycle1 c{s.deck, {}};
    if (cfg.contains("cocycle"))
      for (const auto& e : cfg["cocycle"].at("edges"))
        c.set(e.at("a").get<int>(), e.at("b").get<int>(), parse_group_element(s.deck, e.at("g")));
    s.cocycle = c;
    // An axiom-violating cocycle is a check failure, not a config error: keep
    // the raw data so `cocycle check` can report the violations, and back the
    // covering with the trivial cocycle.
    if (verify_cocycle(s.atlas, c).pass)
      s.covering = covering_from_cocycle(s.atlas, s.deck, c);
    else
      s.covering = covering_from_cocycle(s.atlas, s.deck, CechCocycle1::trivial(s.deck));
  } else {
    s.covering = canonical_covering(s.atlas);
    s.deck = s.covering.deck;
    s.cocycle = s.covering.cocycle;
  }

  if (cfg.contains("forms"))
    for (const auto& f : cfg["forms"]) {
      const std::string nm = f.at("name").get<std::string>();
      s.forms.emplace(nm, form_from_config(s.atlas, f.at("coeffs"), f.value("closed", true), nm));
    }
  if (cfg.contains("omega")) {
    const auto& om = cfg["omega"];
    if (om.is_number())
      s.omega = TwoForm::constant(om.get<double>());
    else {
      auto fn = expr_bind(parse_expression(om.at("coeff").get<std::string>()), s.atlas.coord_names);
      s.omega = TwoForm{[fn](int, const Vec& y) { return fn(y); }, "omega"};
    }
  }
  if (cfg.contains("action")) {
    const auto& a = cfg["action"];
    s.action = catalog_action(a.at("type").get<std::string>(), s.atlas,
                              a.value("circle_group", false));
    if (cfg.contains("lift")) {
      s.component_lifts.assign(static_cast<size_t>(s.action->model.components.size()),
                               std::nullopt);
      for (const auto& [cname, cl] : cfg["lift"].at("components").items()) {
        const int idx = s.action->model.components.index_of(cname);
        s.component_lifts[static_cast<size_t>(idx)] =
            ComponentLift{cl.at("map").get<std::string>(), cl.value("deck_offset", 0LL)};
      }
    }
  }
  if (cfg.contains("checks")) s.checks = cfg["checks"].get<std::vector<std::string>>();
  if (cfg.contains("tolerances")) {
    const auto& t = cfg["tolerances"];
    s.tol.geometry = t.value("geometry", s.tol.geometry);
    s.tol.quadrature = t.value("quadrature", s.tol.quadrature);
    s.tol.fd = t.value("fd", s.tol.fd);
  }
  s.window = cfg.value("window", 3);
  s.grid = cfg.value("grid", 0.2);
  s.seed = cfg.value("seed", static_cast<uint64_t>(0));
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  json cfg = json::parse(in);
  return load_scenario(cfg);
}

// ---------------------------------------------------------------------------
// Checks

namespace checks {

json cocycle(const Scenario& s) {
  const auto rep = verify_cocycle(s.atlas, s.cocycle);
  json out{{"name", "cocycle"}, {"pass", rep.pass}};
  json viol = json::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"axiom", v.axiom}, {"where", v.where}, {"detail", v.detail}});
  out["violations"] = viol;
  out["triple_overlaps"] = s.atlas.triples().size();
  return out;
}

json transitions(const Scenario& s) {
  double resid = 0;
  auto rng = seeded_rng(s, 1);
  for (const auto& o : s.atlas.overlaps()) {
    for (int it = 0; it < 10; ++it) {
      Vec y = o.sample_point();
      for (int i = 0; i < s.atlas.dim; ++i) {
        std::uniform_real_distribution<double> u(
            std::isfinite(o.lo[static_cast<size_t>(i)]) ? o.lo[static_cast<size_t>(i)] : -2.0,
            std::isfinite(o.hi[static_cast<size_t>(i)]) ? o.hi[static_cast<size_t>(i)] : 2.0);
        y[static_cast<size_t>(i)] = u(rng);
      }
      const Vec there = s.atlas.transition(o.a, o.b, y);
      const Vec back = s.atlas.transition(o.b, o.a, there);
      resid = std::max(resid, vdist(back, y));
    }
  }
  return {{"name", "transitions"}, {"pass", resid < s.tol.geometry}, {"roundtrip_residual", resid}};
}

json action_check(const Scenario& s) {
  const auto v = validate_action(s.atlas, *s.action, s.omega ? &*s.omega : nullptr, s.seed);
  return {{"name", "action"},
          {"pass", v.pass},
          {"identity_residual", v.identity_residual},
          {"composition_residual", v.composition_residual},
          {"pullback_residual", v.pullback_residual}};
}

json periods(const Scenario& s) {
  json out{{"name", "periods"}, {"pass", true}};
  json forms = json::array();
  for (const auto& [nm, alpha] : s.forms) {
    json f{{"form", nm}};
    const auto c = period_homomorphism(alpha, s.covering);
    f["generator_periods"] = c.generator_values;
    // homomorphism cross-check against quadrature for words of length <= 3
    double hom_resid = 0;
    if (s.deck.kind() == GroupKind::FreeAbelian) {
      auto rng = seeded_rng(s, 2);
      for (int it = 0; it < 6; ++it) {
        std::vector<long long> w(static_cast<size_t>(s.deck.rank()));
        long long len = 0;
        for (auto& x : w) {
          x = static_cast<long long>(rng() % 7) - 3;
          len += std::llabs(x);
        }
        if (len == 0 || len > 3) continue;
        const auto d = s.deck.make(w);
        const auto loop = s.atlas.subdivide(loop_for_deck(s.atlas, s.deck, d));
        hom_resid = std::max(hom_resid,
                             std::fabs(integrate_path(alpha, loop) - c.value(d)));
      }
    } else {
      // torsion kernel: c vanishes identically, exactly
      for (const auto& d : s.deck.elements())
        hom_resid = std::max(hom_resid, std::fabs(c.value(d)));
    }
    f["homomorphism_residual"] = hom_resid;
    f["pass"] = hom_resid < 1e-8;
    out["pass"] = out["pass"].get<bool>() && f["pass"].get<bool>();
    forms.push_back(f);
  }
  out["forms"] = forms;
  return out;
}

json homotopy(const Scenario& s) {
  // Loops with equal declared pi1 classes must integrate equally.
  json out{{"name", "homotopy"}, {"pass", true}};
  double resid = 0;
  std::vector<const Loop*> loops;
  for (const auto& l : s.atlas.generators) loops.push_back(&l);
  for (const auto& l : s.atlas.named_loops) loops.push_back(&l);
  int pairs = 0;
  for (const auto& [nm, alpha] : s.forms)
    for (size_t i = 0; i < loops.size(); ++i)
      for (size_t j = i + 1; j < loops.size(); ++j) {
        if (loops[i]->pi1_class != loops[j]->pi1_class) continue;
        const double Ii = integrate_path(alpha, s.atlas.subdivide(*loops[i]));
        const double Ij = integrate_path(alpha, s.atlas.subdivide(*loops[j]));
        resid = std::max(resid, std::fabs(Ii - Ij));
        ++pairs;
      }
  out["pairs"] = pairs;
  out["residual"] = resid;
  out["pass"] = pairs > 0 && resid < 1e-8;
  return out;
}

json potential(const Scenario& s) {
  json out{{"name", "potential"}, {"pass", true}};
  json forms = json::array();
  auto rng = seeded_rng(s, 3);
  for (const auto& [nm, alpha] : s.forms) {
    json f{{"form", nm}};
    const auto P = build_multivalued_potential(alpha, s.covering);

    double grad_resid = 0;
    for (int it = 0; it < 25; ++it) {
      const int a = static_cast<int>(rng() % s.atlas.charts.size());
      grad_resid = std::max(grad_resid,
                            potential_gradient_residual(P, a, random_chart_point(s.atlas, a, rng)));
    }
    double glue_resid = 0;
    int glue_samples = 0;
    for (const auto& o : s.atlas.overlaps()) {
      if (o.a >= o.b) continue;
      for (int it = 0; it < 100 / std::max<int>(1, static_cast<int>(s.atlas.overlaps().size() / 2));
           ++it) {
        Vec ya(static_cast<size_t>(s.atlas.dim));
        for (int i = 0; i < s.atlas.dim; ++i) {
          std::uniform_real_distribution<double> u(
              std::isfinite(o.lo[static_cast<size_t>(i)]) ? o.lo[static_cast<size_t>(i)] : -2.0,
              std::isfinite(o.hi[static_cast<size_t>(i)]) ? o.hi[static_cast<size_t>(i)] : 2.0);
          ya[static_cast<size_t>(i)] = u(rng);
        }
        const Vec yb = vadd(ya, o.shift);
        for (const auto& d : deck_window(s.deck, 1)) {
          const double fa = P.eval_branch(o.a, d, ya);
          const double fb = P.eval_branch(o.b, s.deck.compose(d, s.cocycle.at(o.a, o.b)), yb);
          glue_resid = std::max(glue_resid, std::fabs(fa - fb));
          ++glue_samples;
        }
      }
    }
    // Branch law against independent loop quadrature.
    double branch_resid = 0;
    if (s.deck.kind() == GroupKind::FreeAbelian) {
      for (const auto& d : deck_window(s.deck, 2)) {
        long long len = 0;
        for (long long x : d.v) len += std::llabs(x);
        if (len == 0 || len > 2) continue;
        const auto loop = s.atlas.subdivide(loop_for_deck(s.atlas, s.deck, d));
        const double I = integrate_path(alpha, loop);
        const int a0 = s.atlas.base_chart;
        const double diff =
            P.eval_branch(a0, d, s.atlas.base_coords) - P.eval_branch(a0, s.deck.identity(),
                                                                      s.atlas.base_coords);
        branch_resid = std::max(branch_resid, std::fabs(diff - I));
      }
    }
    f["gradient_residual"] = grad_resid;
    f["glueing_residual"] = glue_resid;
    f["glue_samples"] = glue_samples;
    f["branch_residual"] = branch_resid;
    f["tree_cycle_residual"] = P.tree_cycle_residual;
    f["base_normalization"] =
        P.eval_branch(s.atlas.base_chart, s.deck.identity(), s.atlas.base_coords);

    bool pass = grad_resid < s.tol.fd && glue_resid < 1e-9 && branch_resid < 1e-9 &&
                std::fabs(f["base_normalization"].get<double>()) < 1e-12;

    // Regauge round-trip: h = e except the deck generator on the last chart.
    if (s.deck.kind() == GroupKind::FreeAbelian) {
      auto h = CechCochain0::identity(s.deck, static_cast<int>(s.atlas.charts.size()));
      h.values.back() = s.deck.generators()[0];
      const auto rg = regauge_potential(P, h);
      double rg_grad = 0, rg_glue = 0;
      for (int it = 0; it < 10; ++it) {
        const int a = static_cast<int>(rng() % s.atlas.charts.size());
        rg_grad = std::max(rg_grad, potential_gradient_residual(rg.potential, a,
                                                                random_chart_point(s.atlas, a, rng)));
      }
      for (const auto& o : s.atlas.overlaps()) {
        if (o.a >= o.b) continue;
        const Vec ya = o.sample_point();
        const Vec yb = vadd(ya, o.shift);
        for (const auto& d : deck_window(s.deck, 1)) {
          const double fa = rg.potential.eval_branch(o.a, d, ya);
          const double fb = rg.potential.eval_branch(
              o.b, s.deck.compose(d, rg.regauged_cocycle.at(o.a, o.b)), yb);
          rg_glue = std::max(rg_glue, std::fabs(fa - fb));
        }
      }
      f["regauge_gradient_residual"] = rg_grad;
      f["regauge_glueing_residual"] = rg_glue;
      pass = pass && rg_grad < s.tol.fd && rg_glue < 1e-9;
    }
    f["pass"] = pass;
    out["pass"] = out["pass"].get<bool>() && pass;
    forms.push_back(f);
  }
  out["forms"] = forms;
  return out;
}

json obstruction(const Scenario& s) {
  json out{{"name", "obstruction"}};
  // Deck element of the orbit loop of the S^1 parameter loop.
  const auto d = action_obstruction(
      *s.action, s.covering, [](double t) { return Vec{kTwoPi * t}; }, s.atlas.base_point(),
      s.path_samples);
  out["orbit_deck_element"] = group_element_json(d);
  const bool obstructed = !(d == s.deck.identity());
  out["obstructed"] = obstructed;

  // Universal-covering-group reparametrization: the same map with an R
  // parameter lifts, and the lift preserves the group law.
  GroupAction creparam = catalog_action(s.action->name, s.atlas, /*circle_group=*/false);
  LiftedAction lift(creparam, s.covering, {}, s.path_samples);
  auto rng = seeded_rng(s, 4);
  std::uniform_real_distribution<double> par(-2.5, 2.5);
  double coord_resid = 0;
  bool labels_ok = true;
  for (int it = 0; it < 8; ++it) {
    const GElem g{0, {par(rng)}}, h{0, {par(rng)}};
    const auto x = s.covering.base;
    const auto lhs = s.covering.canonical(lift.apply(g, lift.apply(h, x)));
    const auto rhs = s.covering.canonical(lift.apply(g_compose(creparam.model, g, h), x));
    labels_ok = labels_ok && lhs.chart == rhs.chart && lhs.deck == rhs.deck;
    coord_resid = std::max(coord_resid, vdist(lhs.coords, rhs.coords));
  }
  out["cover_group_law_labels_exact"] = labels_ok;
  out["cover_group_law_coord_residual"] = coord_resid;
  out["pass"] = obstructed && labels_ok && coord_resid < 1e-9;
  return out;
}

json lift_law(const Scenario& s) {
  LiftedAction lift = s.make_lift();
  auto rng = seeded_rng(s, 5);
  std::uniform_real_distribution<double> par(-2.5, 2.5);
  double coord_resid = 0;
  bool labels_ok = true;
  const auto& model = s.action->model;
  for (int it = 0; it < 8; ++it) {
    GElem g{0, Vec(static_cast<size_t>(model.dim))}, h{0, Vec(static_cast<size_t>(model.dim))};
    for (auto& v : g.param) v = par(rng);
    for (auto& v : h.param) v = par(rng);
    for (const auto& x : s.sample_cover_points(3)) {
      const auto lhs = s.covering.canonical(lift.apply(g, lift.apply(h, x)));
      const auto rhs = s.covering.canonical(lift.apply(g_compose(model, g, h), x));
      labels_ok = labels_ok && lhs.chart == rhs.chart && lhs.deck == rhs.deck;
      coord_resid = std::max(coord_resid, vdist(lhs.coords, rhs.coords));
    }
  }
  return {{"name", "lift_law"},
          {"pass", labels_ok && coord_resid < 1e-9},
          {"labels_exact", labels_ok},
          {"coord_residual", coord_resid}};
}

json extension(const Scenario& s) {
  LiftedAction lift = s.make_lift();
  ExtensionContext ctx = make_extension_context(lift);
  const DeckGroup& D = s.deck;
  const auto& model = s.action->model;
  json out{{"name", "extension"}};

  const int sigma = model.components.size() > 1 ? 1 : 0;
  GElem sig{sigma, Vec(static_cast<size_t>(model.dim))};
  out["gamma_sigma_sigma"] = group_element_json(ctx.gamma_comp[static_cast<size_t>(sigma)]
                                                              [static_cast<size_t>(sigma)]);
  const auto& b_sigma = ctx.b_comp[static_cast<size_t>(sigma)];
  json b_images = json::array();
  for (const auto& im : b_sigma.images) b_images.push_back(group_element_json(im));
  out["b_sigma_generator_images"] = b_images;
  out["b_sigma_is_identity"] = hom_equal(D, D, b_sigma, identity_hom(D));

  // delta Gamma = 0 in the D-valued cohomology (abelian D).
  DValuedCochains dc{&ctx};
  auto gamma_fn = [&ctx](const GElem& g, const GElem& h) {
    return ctx.gamma_comp[static_cast<size_t>(g.comp)][static_cast<size_t>(h.comp)];
  };
  auto dGamma = dc.delta2(gamma_fn);
  bool dGamma_zero = true;
  for (int a = 0; a < model.components.size(); ++a)
    for (int b = 0; b < model.components.size(); ++b)
      for (int c = 0; c < model.components.size(); ++c) {
        GElem ga{a, Vec(static_cast<size_t>(model.dim))};
        GElem gb{b, Vec(static_cast<size_t>(model.dim))};
        GElem gc{c, Vec(static_cast<size_t>(model.dim))};
        dGamma_zero = dGamma_zero && (dGamma(ga, gb, gc) == D.identity());
      }
  out["delta_gamma_zero"] = dGamma_zero;

  // Alternate lift on the sigma component: Gamma' = Gamma + delta(eta).
  bool coboundary_ok = true;
  if (sigma > 0) {
    LiftedAction alt = with_alternate_component_lift(lift, sigma, 1);
    ExtensionContext ctx2 = make_extension_context(alt);
    auto eta = [&](const GElem& g) { return lift_difference(lift, alt, g); };
    auto deta = dc.delta1(eta);
    for (int a = 0; a < model.components.size(); ++a)
      for (int b = 0; b < model.components.size(); ++b) {
        GElem ga{a, Vec(static_cast<size_t>(model.dim))};
        GElem gb{b, Vec(static_cast<size_t>(model.dim))};
        const auto want = D.compose(ctx.gamma_comp[static_cast<size_t>(a)][static_cast<size_t>(b)],
                                    deta(ga, gb));
        coboundary_ok = coboundary_ok &&
                        (ctx2.gamma_comp[static_cast<size_t>(a)][static_cast<size_t>(b)] == want);
      }
    out["eta_sigma"] = group_element_json(eta(sig));
    out["eta_identity_component"] = group_element_json(eta(g_identity(model)));
  }
  out["gamma_prime_matches_coboundary"] = coboundary_ok;

  // Associativity of the extension on generator triples, and the quotient law.
  bool assoc = true, quotient_ok = true, inverse_ok = true;
  std::vector<ExtensionElement> gens;
  for (const auto& d : D.generators()) gens.push_back({d, g_identity(model)});
  for (int c = 0; c < model.components.size(); ++c)
    gens.push_back({D.identity(), GElem{c, Vec(static_cast<size_t>(model.dim))}});
  for (const auto& u : gens)
    for (const auto& v : gens)
      for (const auto& w : gens) {
        const auto l = extension_compose(ctx, extension_compose(ctx, u, v), w);
        const auto r = extension_compose(ctx, u, extension_compose(ctx, v, w));
        assoc = assoc && extension_equal(ctx, l, r);
      }
  for (const auto& u : gens) {
    const auto ui = extension_inverse(ctx, u);
    const auto prod = extension_compose(ctx, u, ui);
    inverse_ok = inverse_ok && prod.deck == D.identity() &&
                 g_equal(model, prod.g, g_identity(model));
  }
  for (const auto& u : gens)
    for (const auto& v : gens) {
      const auto prod = extension_compose(ctx, u, v);
      quotient_ok = quotient_ok && g_equal(model, prod.g, g_compose(model, u.g, v.g));
    }
  out["associativity_exact"] = assoc;
  out["inverses_exact"] = inverse_ok;
  out["quotient_reproduces_G"] = quotient_ok;

  // Equivariance of the covering map under extension elements:
  // p o Phi_hat_{(gamma,g)} = Phi_g o p.
  double equiv_resid = 0;
  for (const auto& u : gens)
    for (const auto& x : s.sample_cover_points(3)) {
      const auto up = extension_act(ctx, u, x);
      const auto down = s.covering.project(up);
      const auto want = s.action->act(s.atlas, u.g, s.covering.project(x));
      equiv_resid = std::max(equiv_resid, s.atlas.model_distance(down.coords, want.coords));
    }
  out["covering_equivariance_residual"] = equiv_resid;

  out["pass"] = dGamma_zero && coboundary_ok && assoc && inverse_ok && quotient_ok &&
                equiv_resid < tol::path;
  return out;
}

json cotangent(const Scenario& s) {
  // Built on the circle scenario: T*S^1 is the cylinder over the same chart
  // structure, and the cotangent covering *p: T*R -> T*S^1 is the canonical
  // cylinder covering.
  if (s.atlas.dim != 1) throw std::invalid_argument("cotangent check runs on 1d bases");
  json out{{"name", "cotangent"}};
  AtlasParams ap;
  ap.charts = static_cast<int>(s.atlas.charts.size());
  Atlas T = builtin_atlas("cylinder", ap);
  const Covering covT = canonical_covering(T);

  auto rng = seeded_rng(s, 6);
  std::uniform_real_distribution<double> u01(0.05, 0.95), up(-2.0, 2.0);

  // (*p)* theta = Theta: pair both canonical 1-forms against matched tangent
  // vectors; *p has unit jacobian in these charts, so the tangent map is the
  // identity on components.
  double pairing_resid = 0;
  double fibre_resid = 0;
  for (int it = 0; it < 100; ++it) {
    const double theta_tilde = (u01(rng) * 14.0 - 7.0);  // cover model coordinate
    const double p = up(rng);
    const Vec vbase{up(rng)};  // tangent components (d theta, d p)
    const Vec vcov{up(rng)};
    // downstairs: (*p)(x, p) as a cotangent point of T*S^1
    const CotangentPoint down = cotangent_project(s.covering, {theta_tilde}, {p});
    const double lhs = canonical_one_form_pairing(down, vbase, vcov);
    // upstairs: Theta at (theta_tilde, p)
    const CotangentPoint upstairs{{0, {theta_tilde}}, {p}};
    const double rhs = canonical_one_form_pairing(upstairs, vbase, vcov);
    pairing_resid = std::max(pairing_resid, std::fabs(lhs - rhs));
    // tau o (*p) = p o sigma: base of the projected point equals the
    // projection of the base.
    const auto pbase = s.covering.project(s.covering.from_model({theta_tilde}));
    fibre_resid = std::max(fibre_resid,
                           s.atlas.model_distance(down.base.coords, pbase.coords));
  }
  out["pairing_residual"] = pairing_resid;
  out["fibre_residual"] = fibre_resid;

  // Composition law *(fg) = (*f)(*g) for catalog diffeos on T*S^1.
  Diffeo rot{[](const Vec& y) { return Vec{y[0] + 0.7}; },
             [](const Vec& y) { return Vec{y[0] - 0.7}; }, Mat::identity(1)};
  Mat refl_j(1, 1);
  refl_j(0, 0) = -1.0;
  Diffeo refl{[](const Vec& y) { return Vec{-y[0]}; }, [](const Vec& y) { return Vec{-y[0]}; },
              refl_j};
  double comp_resid = 0;
  for (int it = 0; it < 50; ++it) {
    const double th = u01(rng) * kTwoPi;
    const CotangentPoint x{{0, {th}}, {up(rng)}};
    const auto fg = cotangent_map(s.atlas, compose_diffeo(rot, refl), x);
    const auto f_of_g = cotangent_map(s.atlas, rot, cotangent_map(s.atlas, refl, x));
    comp_resid = std::max(comp_resid, s.atlas.model_distance(fg.base.coords, f_of_g.base.coords));
    comp_resid = std::max(comp_resid, vdist(fg.covector, f_of_g.covector));
  }
  out["composition_residual"] = comp_resid;

  // Commuting square: lifting the cotangent-extended rotation action through
  // *p equals extending the lifted rotation.
  GroupAction rotT = catalog_action("rotation", T);
  LiftedAction liftT(rotT, covT, {}, s.path_samples);
  GroupAction rotS = catalog_action("rotation", s.atlas);
  LiftedAction liftS(rotS, s.covering, {}, s.path_samples);
  double square_resid = 0;
  for (int it = 0; it < 20; ++it) {
    const double th = u01(rng) * 10.0 - 5.0;
    const double p = up(rng);
    const GElem g{0, {up(rng)}};
    // lift of *phi on T*X = R^2:
    const auto lifted = covT.to_model(liftT.apply(g, covT.from_model({th, p})));
    // extension of the lifted phi: (*phi_hat)(th, p) = (phi_hat(th), p)
    const auto hat = s.covering.to_model(liftS.apply(g, s.covering.from_model({th})));
    square_resid = std::max(square_resid, std::fabs(lifted[0] - hat[0]));
    square_resid = std::max(square_resid, std::fabs(lifted[1] - p));
  }
  out["lift_extend_square_residual"] = square_resid;

  out["pass"] = pairing_resid < 1e-10 && fibre_resid < tol::path && comp_resid < 1e-10 &&
                square_resid < 1e-9;
  return out;
}

json moment(const Scenario& s) {
  MomentBuildReport rep;
  const LocalMomentMap J = s.make_moment(&rep);
  json out{{"name", "moment"}};
  out["closedness_residual"] = rep.closedness_residual;
  out["defining_residual"] = rep.defining_residual;
  out["glueing_residual"] = rep.glueing_residual;

  json periods = json::array();
  double max_period = 0;
  for (int i = 0; i < J.algebra_dim(); ++i) {
    periods.push_back(J.period(i).generator_values);
    for (double v : J.period(i).generator_values) max_period = std::max(max_period, std::fabs(v));
  }
  out["generator_periods"] = periods;
  out["max_generator_period"] = max_period;

  // Sheet law: <J_{a,d}> - <J_{a,e}> = c(d), with c(d) cross-checked against
  // the loop integral of the contraction form (with a minus sign).
  double sheet_struct = 0, sheet_quad = 0;
  auto rng = seeded_rng(s, 7);
  if (s.deck.kind() == GroupKind::FreeAbelian) {
    for (const auto& d : deck_window(s.deck, 1)) {
      const int a = static_cast<int>(rng() % s.atlas.charts.size());
      const Vec y = random_chart_point(s.atlas, a, rng);
      for (int i = 0; i < J.algebra_dim(); ++i) {
        const double diff = J.branch(a, d, y, i) - J.branch(a, s.deck.identity(), y, i);
        sheet_struct = std::max(sheet_struct, std::fabs(diff - J.period(i).value(d)));
      }
      long long len = 0;
      for (long long x : d.v) len += std::llabs(x);
      if (len >= 1 && len <= 2) {
        const auto loop = s.atlas.subdivide(loop_for_deck(s.atlas, s.deck, d));
        for (int i = 0; i < J.algebra_dim(); ++i) {
          const OneForm beta = induced_contraction_form(*s.action, *s.omega, i);
          sheet_quad = std::max(sheet_quad, std::fabs(J.period(i).value(d) +
                                                      integrate_path(beta, loop)));
        }
      }
    }
  }
  out["sheet_structural_residual"] = sheet_struct;
  out["sheet_quadrature_residual"] = sheet_quad;

  // Linearity in the algebra argument (construction is basis-linear).
  double lin_resid = 0;
  for (int it = 0; it < 5 && J.algebra_dim() >= 2; ++it) {
    const int a = static_cast<int>(rng() % s.atlas.charts.size());
    const Vec y = random_chart_point(s.atlas, a, rng);
    Vec A(static_cast<size_t>(J.algebra_dim()), 1.0);
    double sum = 0;
    for (int i = 0; i < J.algebra_dim(); ++i) sum += J.branch(a, s.deck.identity(), y, i);
    lin_resid = std::max(lin_resid,
                         std::fabs(J.branch_pair(a, s.deck.identity(), y, A) - sum));
  }
  out["linearity_residual"] = lin_resid;

  // Regauge (B): re-verify the defining equation and the glueing after the
  // k-propagation.
  double rg_resid = 0;
  if (s.deck.kind() == GroupKind::FreeAbelian) {
    auto h = CechCochain0::identity(s.deck, static_cast<int>(s.atlas.charts.size()));
    h.values.back() = s.deck.generators()[0];
    const auto rg = regauge_local_moment_map(J, h);
    for (const auto& o : s.atlas.overlaps()) {
      if (o.a >= o.b) continue;
      const Vec ya = o.sample_point();
      const Vec yb = vadd(ya, o.shift);
      for (const auto& d : deck_window(s.deck, 1)) {
        const Vec fa = rg.moment.branch_vec(o.a, d, ya);
        const Vec fb = rg.moment.branch_vec(
            o.b, s.deck.compose(d, rg.regauged_cocycle.at(o.a, o.b)), yb);
        rg_resid = std::max(rg_resid, vdist(fa, fb));
      }
    }
    out["regauge_glueing_residual"] = rg_resid;
    out["regauge_L_spread"] = rg.L_spread;
    out["regauge_L"] = rg.L;
  }

  out["pass"] = rep.defining_residual < s.tol.fd && rep.glueing_residual < 1e-9 &&
                sheet_struct < 1e-12 && sheet_quad < 1e-8 && lin_resid < 1e-9 &&
                rg_resid < 1e-9;
  return out;
}

json equivariance(const Scenario& s) {
  const LocalMomentMap J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  LiftedAction lift = s.make_lift();
  auto samples = s.sample_cover_points(8);
  EquivarianceCocycle al = equivariance_cocycle(G, lift, samples);

  json out{{"name", "equivariance"}};
  auto rng = seeded_rng(s, 8);
  std::uniform_real_distribution<double> par(-2.0, 2.0);
  const auto& model = s.action->model;
  double alpha_norm = 0, spread = 0;
  std::vector<std::pair<GElem, GElem>> pairs;
  json alpha_samples = json::array();
  for (int it = 0; it < 6; ++it) {
    GElem g{0, Vec(static_cast<size_t>(model.dim))}, h{0, Vec(static_cast<size_t>(model.dim))};
    for (auto& v : g.param) v = par(rng);
    for (auto& v : h.param) v = par(rng);
    const Vec a = al.alpha(g);
    spread = std::max(spread, al.last_spread);
    alpha_norm = std::max(alpha_norm, vmaxabs(a));
    if (it < 3) alpha_samples.push_back({{"param", g.param}, {"alpha", a}});
    pairs.emplace_back(g, h);
  }
  const double coc_resid = al.cocycle_residual(pairs);
  // additivity specialization when Ad* = id
  double add_resid = 0;
  for (const auto& [g, h] : pairs) {
    const Vec lhs = al.alpha(g_compose(model, g, h));
    const Vec rhs = vadd(al.alpha(g), al.alpha(h));
    add_resid = std::max(add_resid, vdist(lhs, rhs));
  }
  out["alpha_samples"] = alpha_samples;
  out["alpha_max_norm"] = alpha_norm;
  out["alpha_constancy_spread"] = spread;
  out["cocycle_residual"] = coc_resid;
  out["additivity_residual"] = add_resid;
  out["pass"] = spread < 1e-8 && coc_resid < 1e-9;
  return out;
}

json transform(const Scenario& s) {
  const LocalMomentMap J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  LiftedAction lift = s.make_lift();
  EquivarianceCocycle al = equivariance_cocycle(G, lift, s.sample_cover_points(6));

  json out{{"name", "transform"}};
  const auto& model = s.action->model;
  const auto samples = s.sample_cover_points(10);
  double max_resid = 0;
  bool crossed = false;

  std::vector<GElem> gs;
  {
    GElem small{0, Vec(static_cast<size_t>(model.dim), 0.0)};
    if (model.dim > 0) small.param[0] = 0.3;
    gs.push_back(small);
    // a cut-crossing element: full period in the angular direction when the
    // action moves it
    GElem cross{0, Vec(static_cast<size_t>(model.dim), 0.0)};
    if (model.dim > 0) cross.param[0] = kTwoPi;
    gs.push_back(cross);
    GElem e{0, Vec(static_cast<size_t>(model.dim), 0.0)};
    gs.push_back(e);
  }
  json per_g = json::array();
  for (const auto& g : gs) {
    const auto chk = local_transform_check(J, lift, al, g, samples);
    max_resid = std::max(max_resid, chk.max_residual);
    crossed = crossed || chk.crossed_cut;
    per_g.push_back({{"param", g.param}, {"residual", chk.max_residual},
                     {"crossed_cut", chk.crossed_cut}});
  }
  out["per_g"] = per_g;
  out["max_residual"] = max_resid;
  out["some_cut_crossing"] = crossed;
  out["pass"] = max_resid < 1e-8;
  return out;
}

json intermediate(const Scenario& s) {
  const LocalMomentMap J = s.make_moment();
  json out{{"name", "intermediate"}};
  // H = 3Z (first deck axis), and the trivial/full subgroups as degenerate
  // sanity cases.
  std::vector<long long> three(static_cast<size_t>(s.deck.rank()), 0);
  three[0] = 3;
  std::vector<GroupElement> gens{s.deck.make(three)};
  for (int i = 1; i < s.deck.rank(); ++i) {
    std::vector<long long> v(static_cast<size_t>(s.deck.rank()), 0);
    v[static_cast<size_t>(i)] = 1;
    gens.push_back(s.deck.make(v));
  }
  const auto ic = build_intermediate_cover(s.covering, gens, s.window);
  const auto rep = intermediate_moment_relation(J, ic, 50, s.seed);
  out["subgroup"] = "3Z x Z^(k-1)";
  out["coset_count"] = ic.coset_reps.size();
  out["built_from_scratch"] = rep.built_from_scratch;
  out["relation_residual"] = rep.max_residual;
  out["ghat_edges_checked"] = rep.ghat_cocycle_checked;

  const auto ic_full = build_intermediate_cover(s.covering, s.deck.generators(), s.window);
  const auto rep_full = intermediate_moment_relation(J, ic_full, 10, s.seed);
  const auto ic_triv = build_intermediate_cover(s.covering, {}, s.window);
  const auto rep_triv = intermediate_moment_relation(J, ic_triv, 10, s.seed);
  out["full_subgroup_residual"] = rep_full.max_residual;
  out["trivial_subgroup_residual"] = rep_triv.max_residual;
  out["pass"] = rep.max_residual < 1e-9 && rep_full.max_residual < 1e-9 &&
                rep_triv.max_residual < 1e-9;
  return out;
}

json states(const Scenario& s) {
  const LocalMomentMap J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  json out{{"name", "states"}};
  GridSpec spec;
  spec.window = s.window;
  spec.spacing = s.grid;
  const Vec level = G.eval(s.covering.base);
  const auto S = compute_state_space(G, s.covering, level, 0, spec);
  const auto Q = quotient_states(S);
  out["level"] = level;
  out["band"] = S.band;
  out["state_count"] = S.states.size();
  json iotas = json::array();
  std::vector<double> first_comp;
  for (const auto& st : S.states) {
    iotas.push_back(st.iota);
    first_comp.push_back(st.iota.empty() ? 0.0 : st.iota[0]);
  }
  out["iota"] = iotas;
  json quot = json::array();
  int max_mult = 0;
  for (const auto& q : Q.quotient) {
    quot.push_back({{"multiplicity", q.multiplicity},
                    {"window_truncated", q.window_truncated},
                    {"has_fixed_point", q.has_fixed_point}});
    max_mult = std::max(max_mult, q.multiplicity);
  }
  out["quotient"] = quot;
  out["quotient_count"] = Q.quotient.size();
  out["max_multiplicity"] = max_mult;

  // Splitting law: iota values within one quotient fibre differ by the
  // period homomorphism values (multiples of the generator periods).
  double spacing_resid = 0;
  for (const auto& q : Q.quotient)
    for (int m : q.members) {
      const auto& st = S.states[static_cast<size_t>(m)];
      const Vec want = vadd(level, J.period_vec(st.matched_deck));
      spacing_resid = std::max(spacing_resid, vdist(st.iota, want));
    }
  out["splitting_residual"] = spacing_resid;
  out["pass"] = !S.states.empty() && spacing_resid < 1e-8;
  return out;
}

json flow(const Scenario& s) {
  const LocalMomentMap J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  json out{{"name", "flow"}};
  // h = cos(theta): commutes with the boost moment; theta stays constant.
  const auto h_expr = parse_expression("cos(theta)");
  auto coords = s.atlas.coord_names;
  auto hfun = expr_bind(h_expr, coords);
  std::vector<ExprPtr> dh;
  for (const auto& c : coords) dh.push_back(expr_derivative(h_expr, c));
  std::vector<std::function<double(const Vec&)>> dfn;
  for (const auto& d : dh) dfn.push_back(expr_bind(d, coords));
  auto grad = [dfn](const Vec& u) {
    Vec g(dfn.size());
    for (size_t i = 0; i < dfn.size(); ++i) g[i] = dfn[i](u);
    return g;
  };

  GridSpec spec;
  spec.window = s.window;
  spec.nonperiodic_halfwidth = 50.0;  // let the fibre coordinate run for the full duration
  const Vec start{0.7, 0.4};
  const auto fr = hamiltonian_flow(hfun, grad, *s.omega, s.covering, start, 10.0, 1e-3, spec);
  out["energy_drift"] = fr.energy_drift;
  out["truncated"] = fr.truncated;

  // Flow invariance of the moment map along the trajectory.
  double jdrift = 0;
  const Vec j0 = G.eval(s.covering.from_model(fr.trajectory.front()));
  for (size_t i = 0; i < fr.trajectory.size(); i += 50)
    jdrift = std::max(jdrift, vdist(G.eval(s.covering.from_model(fr.trajectory[i])), j0));
  out["moment_drift"] = jdrift;

  // Premise: {h, <J,A>} = 0 on the grid.
  double pb = 0;
  for (int i = 0; i < J.algebra_dim(); ++i) {
    auto jf = [&](const Vec& u) { return G.eval(s.covering.from_model(u))[static_cast<size_t>(i)]; };
    pb = std::max(pb, poisson_bracket_sup(hfun, jf, *s.omega, s.covering, spec, 25, s.seed));
  }
  out["poisson_bracket_sup"] = pb;
  const bool commutes = pb < 1e-8;
  out["hamiltonian_commutes"] = commutes;
  out["pass"] = fr.energy_drift < 1e-8 * 10.0 && (!commutes || jdrift < 1e-6);
  return out;
}

json cohomology(const Scenario& s) {
  json out{{"name", "cohomology"}};
  auto rng = seeded_rng(s, 9);

  // (1) Cech delta on a nerve with triple and quadruple overlaps.
  Atlas torus = builtin_atlas("torus");
  DeckGroup Z2 = DeckGroup::free_abelian(2);
  auto rand_elem = [&rng, &Z2]() {
    return Z2.make({static_cast<long long>(rng() % 7) - 3, static_cast<long long>(rng() % 7) - 3});
  };
  bool cech_ok = true;
  for (int arity = 0; arity <= 1; ++arity) {
    CechCochainN f{arity, Z2, {}};
    for (const auto& t : nerve_tuples(torus, arity)) f.values[t] = rand_elem();
    const auto ddf = cech_delta(torus, cech_delta(torus, f));
    for (const auto& [t, v] : ddf.values) cech_ok = cech_ok && (v == Z2.identity());
  }
  out["cech_delta2_zero"] = cech_ok;

  // (2) D-valued cohomology on G, boost lift (b = id) and a half-turn lift.
  Scenario boost = builtin_scenario("cylinder_boost");
  LiftedAction lift_b = boost.make_lift();
  ExtensionContext ctx_b = make_extension_context(lift_b);
  DValuedCochains dcb{&ctx_b};
  const DeckGroup& Dz = boost.deck;
  auto rand_g = [&rng]() {
    return GElem{0, {static_cast<double>(rng() % 9) * 0.25 - 1.0}};
  };
  bool dvalued_ok = true;
  {
    std::map<long long, GroupElement> table;
    auto a1r = [&table, &rng, &Dz](const GElem& g) {
      const long long key = std::llround(g.param[0] * 4);
      auto it = table.find(key);
      if (it == table.end())
        it = table.emplace(key, Dz.make({static_cast<long long>(rng() % 7) - 3})).first;
      return it->second;
    };
    auto dd = dcb.delta2(dcb.delta1(a1r));
    for (int it = 0; it < 10; ++it)
      dvalued_ok = dvalued_ok && (dd(rand_g(), rand_g(), rand_g()) == Dz.identity());
    const auto d0 = Dz.make({2});
    auto dd0 = dcb.delta1(dcb.delta0(d0));
    for (int it = 0; it < 10; ++it)
      dvalued_ok = dvalued_ok && (dd0(rand_g(), rand_g()) == Dz.identity());
  }
  out["d_on_g_delta2_zero"] = dvalued_ok;

  // (3) g*-valued cohomology with a nontrivial exact coadjoint action
  // (Z_2 with Ad*(sigma) = diag(1, -1)).
  bool gstar_ok = true;
  {
    LieGroupModel m;
    m.dim = 2;
    m.components.mul = {{0, 1}, {1, 0}};
    m.components.names = {"e", "s"};
    Mat flip = Mat::identity(2);
    flip(1, 1) = -1.0;
    m.coadjoint = {Mat::identity(2), flip};
    m.comp_auto = {Mat::identity(2), Mat::identity(2)};
    m.finalize();
    GStarCochains gc{m};
    auto rand_gg = [&rng]() {
      return GElem{static_cast<int>(rng() % 2),
                   {static_cast<double>(rng() % 5) - 2.0, static_cast<double>(rng() % 5) - 2.0}};
    };
    std::map<std::pair<int, long long>, Vec> memo;
    auto a1 = [&memo, &rng](const GElem& g) {
      const std::pair<int, long long> key{g.comp, std::llround(g.param[0] * 2 + g.param[1] * 64)};
      auto it = memo.find(key);
      if (it == memo.end())
        it = memo.emplace(key, Vec{static_cast<double>(rng() % 9) - 4.0,
                                   static_cast<double>(rng() % 9) - 4.0}).first;
      return it->second;
    };
    auto dd = gc.delta2(gc.delta1(a1));
    for (int it = 0; it < 12; ++it)
      gstar_ok = gstar_ok && vmaxabs(dd(rand_gg(), rand_gg(), rand_gg())) == 0.0;
  }
  out["gstar_delta2_zero"] = gstar_ok;

  // (4) Form-valued cohomology on D over this scenario's covering: delta of
  // the potential function is the constant c(gamma), and delta o delta = 0.
  bool form_ok = true;
  double c_constancy = 0;
  {
    Covering cov = canonical_covering(builtin_atlas("circle"));
    const OneForm dtheta = form_dtheta(cov.atlas);
    const auto P = build_multivalued_potential(dtheta, cov);
    FormValuedCochains fc{&cov};
    FormValuedCochains::C0 F = [&P](const CoverPoint& x) { return P.cover_value(x); };
    auto dF = fc.delta0(F);
    auto pts = std::vector<CoverPoint>{};
    for (int a = 0; a < static_cast<int>(cov.atlas.charts.size()); ++a)
      for (long long d = -2; d <= 2; ++d)
        pts.push_back({a, cov.deck.make({d}),
                       cov.atlas.charts[static_cast<size_t>(a)].center()});
    for (long long n = -2; n <= 2; ++n) {
      const auto gamma = cov.deck.make({n});
      const double want = P.period.value(gamma);
      for (const auto& x : pts)
        c_constancy = std::max(c_constancy, std::fabs(dF(gamma)(x) - want));
    }
    // delta o delta on a random 1-cochain of potential-type functions
    std::map<long long, double> coefs;
    auto a1 = [&coefs, &rng, &P](const GroupElement& g) -> FormValuedCochains::XFunc {
      auto it = coefs.find(g.v[0]);
      if (it == coefs.end()) it = coefs.emplace(g.v[0], static_cast<double>(rng() % 9) - 4.0).first;
      const double c = it->second;
      return [c, &P](const CoverPoint& x) { return c * P.cover_value(x); };
    };
    auto dd = fc.delta2(fc.delta1(a1));
    for (int it = 0; it < 8; ++it) {
      const auto g1 = cov.deck.make({static_cast<long long>(rng() % 5) - 2});
      const auto g2 = cov.deck.make({static_cast<long long>(rng() % 5) - 2});
      const auto g3 = cov.deck.make({static_cast<long long>(rng() % 5) - 2});
      const auto fn = dd(g1, g2, g3);
      for (const auto& x : pts) form_ok = form_ok && std::fabs(fn(x)) < 1e-12;
    }
  }
  out["form_on_d_c_constancy"] = c_constancy;
  out["form_on_d_delta2_zero"] = form_ok;

  out["pass"] = cech_ok && dvalued_ok && gstar_ok && form_ok && c_constancy < 1e-9;
  return out;
}

}  // namespace checks

json run_check(const Scenario& s, const std::string& check) {
  if (check == "cocycle") return checks::cocycle(s);
  if (check == "transitions") return checks::transitions(s);
  if (check == "action") return checks::action_check(s);
  if (check == "periods") return checks::periods(s);
  if (check == "homotopy") return checks::homotopy(s);
  if (check == "potential") return checks::potential(s);
  if (check == "obstruction") return checks::obstruction(s);
  if (check == "lift_law") return checks::lift_law(s);
  if (check == "extension") return checks::extension(s);
  if (check == "cotangent") return checks::cotangent(s);
  if (check == "moment") return checks::moment(s);
  if (check == "equivariance") return checks::equivariance(s);
  if (check == "transform") return checks::transform(s);
  if (check == "intermediate") return checks::intermediate(s);
  if (check == "states") return checks::states(s);
  if (check == "flow") return checks::flow(s);
  if (check == "cohomology") return checks::cohomology(s);
  throw std::invalid_argument("unknown check '" + check + "'");
}

json run_scenario(const Scenario& s) {
  json rep;
  rep["schema"] = 1;
  rep["scenario"] = s.name;
  rep["seed"] = s.seed;
  json list = json::array();
  bool all = true;
  for (const auto& c : s.checks) {
    json r = run_check(s, c);
    all = all && r.value("pass", false);
    list.push_back(std::move(r));
  }
  rep["checks"] = list;
  rep["pass"] = all;
  return rep;
}

}  // namespace symcov
