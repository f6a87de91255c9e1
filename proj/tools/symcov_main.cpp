#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <functional>
#include <iostream>

#include "symcov/scenario.hpp"

namespace {

using symcov::json;

// Exit codes: 0 pass, 1 check failure, 2 usage/config error.
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    out << doc.dump(2) << "\n";
  }
}

symcov::Scenario load(const std::string& scenario_arg, int window, double grid, uint64_t seed,
                      double tol_quadrature) {
  symcov::Scenario s;
  std::ifstream probe(scenario_arg);
  if (probe.good())
    s = symcov::load_scenario_file(scenario_arg);
  else
    s = symcov::builtin_scenario(scenario_arg);
  if (window > 0) s.window = window;
  if (grid > 0) s.grid = grid;
  s.seed = seed;
  if (tol_quadrature > 0) s.tol.quadrature = tol_quadrature;
  return s;
}

symcov::CoverPoint parse_cover_point(const symcov::Scenario& s, const std::string& text) {
  // "chart,deck,coords..." with deck a single integer or d0:d1 for rank 2
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else
      cur += c;
  }
  if (parts.size() < 3) throw std::invalid_argument("cover point: want 'chart,deck,coords...'");
  const int chart = std::stoi(parts[0]);
  std::vector<long long> dv;
  {
    std::string d = parts[1];
    std::string tok;
    for (char c : d + ":") {
      if (c == ':') {
        dv.push_back(std::stoll(tok));
        tok.clear();
      } else
        tok += c;
    }
  }
  symcov::Vec y;
  for (size_t i = 2; i < parts.size(); ++i) y.push_back(std::stod(parts[i]));
  return s.covering.make_point(chart, s.deck.make(dv), y);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverings, Cech cocycles, multi-valued potentials, local moment maps"};
  app.require_subcommand(1);

  std::string scenario_arg, out_path, loop_name = "gen0", start_text, branch_text, at_text;
  std::string algebra_text, u_text, v_text, g_text, level_text, h_expr = "cos(theta)";
  int window = -1;
  double grid = -1, tol_quad = -1, flow_T = 10.0, flow_dt = 1e-3;
  uint64_t seed = 0;
  long long loop_power = 1;

  app.add_option("--out", out_path, "write the JSON report to this path");
  app.add_option("--window,-W", window, "deck label window");
  app.add_option("--grid", grid, "phase grid spacing");
  app.add_option("--seed", seed, "rng seed");
  app.add_option("--tol-quadrature", tol_quad, "quadrature tolerance override");

  auto add_scenario = [&](CLI::App* cmd) {
    cmd->add_option("--scenario,-s", scenario_arg, "scenario file or builtin name")->required();
  };

  // cocycle check
  auto* cmd_cocycle = app.add_subcommand("cocycle", "Cech cocycle operations");
  auto* cocycle_check = cmd_cocycle->add_subcommand("check", "verify the cocycle axioms");
  add_scenario(cocycle_check);

  // cover holonomy | lift
  auto* cmd_cover = app.add_subcommand("cover", "covering-space operations");
  auto* cover_hol = cmd_cover->add_subcommand("holonomy", "holonomy of a named loop");
  add_scenario(cover_hol);
  cover_hol->add_option("--loop", loop_name, "loop name (default gen0)");
  cover_hol->add_option("--pow", loop_power, "traverse the loop n times (may be negative)");
  auto* cover_lift = cmd_cover->add_subcommand("lift", "lift a named loop from a cover point");
  add_scenario(cover_lift);
  cover_lift->add_option("--loop", loop_name, "loop name");
  cover_lift->add_option("--start", start_text, "start cover point 'chart,deck,coords...'")
      ->required();

  // potential build | eval
  auto* cmd_pot = app.add_subcommand("potential", "multi-valued potentials");
  auto* pot_build = cmd_pot->add_subcommand("build", "build and verify potentials");
  add_scenario(pot_build);
  auto* pot_eval = cmd_pot->add_subcommand("eval", "evaluate a potential branch");
  add_scenario(pot_eval);
  std::string form_name;
  pot_eval->add_option("--form", form_name, "form name")->required();
  pot_eval->add_option("--branch", branch_text, "branch 'chart,deck'")->required();
  pot_eval->add_option("--at", at_text, "coordinates 'x0,x1'")->required();

  // moment build | eval | transform
  auto* cmd_mom = app.add_subcommand("moment", "local moment maps");
  auto* mom_build = cmd_mom->add_subcommand("build", "build and verify the moment map");
  add_scenario(mom_build);
  auto* mom_eval = cmd_mom->add_subcommand("eval", "evaluate a moment branch");
  add_scenario(mom_eval);
  mom_eval->add_option("--branch", branch_text, "branch 'chart,deck'")->required();
  mom_eval->add_option("--at", at_text, "coordinates 'x0,x1'")->required();
  mom_eval->add_option("--algebra", algebra_text, "algebra vector 'a0,a1'");
  auto* mom_trans = cmd_mom->add_subcommand("transform", "G-transformation law check");
  add_scenario(mom_trans);
  mom_trans->add_option("--g", g_text, "group parameter(s) 'p0[,p1]'");

  // extend compose | table
  auto* cmd_ext = app.add_subcommand("extend", "the extension of G by the deck group");
  auto* ext_table = cmd_ext->add_subcommand("table", "Gamma and b tables of the lift");
  add_scenario(ext_table);
  auto* ext_comp = cmd_ext->add_subcommand("compose", "compose two extension elements");
  add_scenario(ext_comp);
  ext_comp->add_option("--u", u_text, "element 'deck;comp[,params...]'")->required();
  ext_comp->add_option("--v", v_text, "element 'deck;comp[,params...]'")->required();

  // states split | flow
  auto* cmd_states = app.add_subcommand("states", "G-state spaces and flows");
  auto* st_split = cmd_states->add_subcommand("split", "multiplet splitting at a level");
  add_scenario(st_split);
  st_split->add_option("--level", level_text, "moment level 'v0[,v1]' (default: J at base)");
  std::string csv_path;
  st_split->add_option("--csv", csv_path, "write one row per state to this CSV file");
  auto* st_flow = cmd_states->add_subcommand("flow", "hamiltonian flow invariance");
  add_scenario(st_flow);
  st_flow->add_option("--hamiltonian", h_expr, "hamiltonian expression (default cos(theta))");
  st_flow->add_option("--start", start_text, "start point 'u0,u1' in cover model coordinates");
  st_flow->add_option("-T", flow_T, "duration");
  st_flow->add_option("--dt", flow_dt, "step size");

  // run
  auto* cmd_run = app.add_subcommand("run", "run a scenario's full check list");
  std::string run_file;
  cmd_run->add_option("file", run_file, "scenario JSON file or builtin name")->required();

  // global flags (--out, --window, ...) may follow a subcommand
  std::function<void(CLI::App*)> allow_fallthrough = [&](CLI::App* cmd) {
    cmd->fallthrough();
    for (auto* sub : cmd->get_subcommands({})) allow_fallthrough(sub);
  };
  for (auto* sub : app.get_subcommands({})) allow_fallthrough(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    auto parse_csv_doubles = [](const std::string& t) {
      symcov::Vec v;
      std::string tok;
      for (char c : t + ",") {
        if (c == ',') {
          if (!tok.empty()) v.push_back(std::stod(tok));
          tok.clear();
        } else
          tok += c;
      }
      return v;
    };

    if (*cocycle_check) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const json r = symcov::run_check(s, "cocycle");
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
    if (*cover_hol) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const symcov::Loop* l = s.atlas.find_loop(loop_name);
      if (!l) throw std::invalid_argument("unknown loop '" + loop_name + "'");
      const auto loop = s.atlas.subdivide(s.atlas.loop_power(*l, loop_power));
      const auto rho = symcov::holonomy(s.atlas, s.cocycle, loop);
      json r{{"loop", loop_name},
             {"power", loop_power},
             {"chart_sequence", loop.chart_sequence()},
             {"holonomy", s.deck.describe(rho)}};
      emit(r, out_path);
      return kPass;
    }
    if (*cover_lift) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const symcov::Loop* l = s.atlas.find_loop(loop_name);
      if (!l) throw std::invalid_argument("unknown loop '" + loop_name + "'");
      const auto start = parse_cover_point(s, start_text);
      const auto path = s.atlas.subdivide(*l);
      const auto lifted = symcov::lift_path(s.covering, path, start);
      json r{{"loop", loop_name},
             {"endpoint",
              {{"chart", lifted.endpoint.chart},
               {"deck", s.deck.describe(lifted.endpoint.deck)},
               {"coords", lifted.endpoint.coords}}},
             {"samples", lifted.samples.size()}};
      emit(r, out_path);
      return kPass;
    }
    if (*pot_build) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const json r = symcov::run_check(s, "potential");
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
    if (*pot_eval) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      auto it = s.forms.find(form_name);
      if (it == s.forms.end()) throw std::invalid_argument("unknown form '" + form_name + "'");
      const auto P = symcov::build_multivalued_potential(it->second, s.covering);
      const auto b = parse_csv_doubles(branch_text);
      const auto y = parse_csv_doubles(at_text);
      std::vector<long long> dv(b.begin() + 1, b.end());
      const double v = P.eval_branch(static_cast<int>(b.at(0)),
                                     s.deck.make(std::vector<long long>(dv)), y);
      emit(json{{"form", form_name}, {"value", v}}, out_path);
      return kPass;
    }
    if (*mom_build) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const json r = symcov::run_check(s, "moment");
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
    if (*mom_eval) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const auto J = s.make_moment();
      const auto b = parse_csv_doubles(branch_text);
      const auto y = parse_csv_doubles(at_text);
      std::vector<long long> dv(b.begin() + 1, b.end());
      const auto d = s.deck.make(std::vector<long long>(dv));
      json r{{"branch_chart", static_cast<int>(b.at(0))}, {"at", y}};
      if (algebra_text.empty())
        r["value"] = J.branch_vec(static_cast<int>(b.at(0)), d, y);
      else
        r["value"] = J.branch_pair(static_cast<int>(b.at(0)), d, y,
                                   parse_csv_doubles(algebra_text));
      emit(r, out_path);
      return kPass;
    }
    if (*mom_trans) {
      auto s = load(scenario_arg, window, grid, seed, tol_quad);
      json r = symcov::run_check(s, "transform");
      if (!g_text.empty()) {
        const auto p = parse_csv_doubles(g_text);
        const auto J = s.make_moment();
        symcov::GlobalMomentMap G{&J, {}};
        auto lift = s.make_lift();
        auto al = symcov::equivariance_cocycle(G, lift, s.sample_cover_points(6));
        const symcov::GElem g{0, p};
        const auto chk = symcov::local_transform_check(J, lift, al, g, s.sample_cover_points(10));
        r["requested_g"] = {{"param", p},
                            {"residual", chk.max_residual},
                            {"crossed_cut", chk.crossed_cut}};
      }
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
    if (*ext_table) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const json r = symcov::run_check(s, "extension");
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
    if (*ext_comp) {
      const auto s = load(scenario_arg, window, grid, seed, tol_quad);
      auto lift = s.make_lift();
      auto ctx = symcov::make_extension_context(lift);
      auto parse_ext = [&](const std::string& t) {
        const auto semi = t.find(';');
        if (semi == std::string::npos)
          throw std::invalid_argument("extension element: want 'deck;comp[,params]'");
        std::vector<long long> dv;
        {
          std::string tok;
          for (char c : t.substr(0, semi) + ":") {
            if (c == ':') {
              dv.push_back(std::stoll(tok));
              tok.clear();
            } else
              tok += c;
          }
        }
        const auto rest = parse_csv_doubles(t.substr(semi + 1));
        symcov::GElem g{static_cast<int>(rest.at(0)),
                        symcov::Vec(rest.begin() + 1, rest.end())};
        return symcov::ExtensionElement{s.deck.make(dv), g};
      };
      const auto u = parse_ext(u_text), v = parse_ext(v_text);
      const auto prod = symcov::extension_compose(ctx, u, v);
      const auto inv = symcov::extension_inverse(ctx, u);
      json r{{"product", {{"deck", s.deck.describe(prod.deck)},
                          {"comp", prod.g.comp},
                          {"param", prod.g.param}}},
             {"u_inverse", {{"deck", s.deck.describe(inv.deck)},
                            {"comp", inv.g.comp},
                            {"param", inv.g.param}}}};
      emit(r, out_path);
      return kPass;
    }
    if (*st_split) {
      auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const auto J = s.make_moment();
      symcov::GlobalMomentMap G{&J, {}};
      symcov::GridSpec spec;
      spec.window = s.window;
      spec.spacing = s.grid;
      const symcov::Vec level =
          level_text.empty() ? G.eval(s.covering.base) : parse_csv_doubles(level_text);
      const auto S = symcov::compute_state_space(G, s.covering, level, 0, spec);
      const auto Q = symcov::quotient_states(S);
      json r{{"level", level}, {"band", S.band}, {"state_count", S.states.size()}};
      json qs = json::array();
      std::vector<int> orbit_of(S.states.size(), -1);
      for (const auto& q : Q.quotient) {
        for (int m : q.members) orbit_of[static_cast<size_t>(m)] = q.id;
        qs.push_back({{"id", q.id},
                      {"multiplicity", q.multiplicity},
                      {"window_truncated", q.window_truncated}});
      }
      r["quotient"] = qs;
      emit(r, out_path);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        csv << "state_id,iota,deck_orbit_id,multiplicity\n";
        for (const auto& st : S.states) {
          csv << st.id << ",";
          for (size_t i = 0; i < st.iota.size(); ++i) csv << (i ? ";" : "") << st.iota[i];
          csv << "," << orbit_of[static_cast<size_t>(st.id)] << ","
              << Q.quotient[static_cast<size_t>(orbit_of[static_cast<size_t>(st.id)])].multiplicity
              << "\n";
        }
      }
      return kPass;
    }
    if (*st_flow) {
      auto s = load(scenario_arg, window, grid, seed, tol_quad);
      const auto J = s.make_moment();
      symcov::GlobalMomentMap G{&J, {}};
      const auto he = symcov::parse_expression(h_expr);
      auto hfun = symcov::expr_bind(he, s.atlas.coord_names);
      const symcov::Vec start =
          start_text.empty() ? symcov::Vec{0.7, 0.4} : parse_csv_doubles(start_text);
      symcov::GridSpec spec;
      spec.window = s.window;
      const auto fr = symcov::hamiltonian_flow(hfun, nullptr, *s.omega, s.covering, start,
                                               flow_T, flow_dt, spec);
      double jdrift = 0;
      const symcov::Vec j0 = G.eval(s.covering.from_model(fr.trajectory.front()));
      for (size_t i = 0; i < fr.trajectory.size(); i += 25)
        jdrift = std::max(jdrift,
                          symcov::vdist(G.eval(s.covering.from_model(fr.trajectory[i])), j0));
      json r{{"hamiltonian", h_expr},
             {"energy_drift", fr.energy_drift},
             {"moment_drift", jdrift},
             {"truncated", fr.truncated}};
      emit(r, out_path);
      return kPass;
    }
    if (*cmd_run) {
      auto s = load(run_file, window, grid, seed, tol_quad);
      const json r = symcov::run_scenario(s);
      emit(r, out_path);
      return r["pass"].get<bool>() ? kPass : kFail;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
