#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include <fstream>

#include "symcov/scenario.hpp"

namespace py = pybind11;
using namespace symcov;

namespace {

json py_to_json(const py::handle& obj) {  // dicts/lists/scalars -> json
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    json j = json::object();
    for (auto item : obj.cast<py::dict>())
      j[item.first.cast<std::string>()] = py_to_json(item.second);
    return j;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    json j = json::array();
    for (auto item : obj.cast<py::sequence>()) j.push_back(py_to_json(item));
    return j;
  }
  throw std::invalid_argument("unsupported config value type");
}

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(json_to_py(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

Scenario scenario_from_arg(const py::object& arg) {
  if (py::isinstance<py::str>(arg)) {
    const std::string s = arg.cast<std::string>();
    std::ifstream probe(s);
    return probe.good() ? load_scenario_file(s) : builtin_scenario(s);
  }
  return load_scenario(py_to_json(arg));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coverings, Cech cocycles, multi-valued potentials and local moment maps";

  py::class_<GroupElement>(m, "GroupElement")
      .def_readonly("payload", &GroupElement::v)
      .def("__eq__", [](const GroupElement& a, const GroupElement& b) { return a == b; })
      .def("__repr__", [](const GroupElement& g) {
        std::string s = "GroupElement([";
        for (size_t i = 0; i < g.v.size(); ++i) s += (i ? "," : "") + std::to_string(g.v[i]);
        return s + "])";
      });

  py::class_<DeckGroup>(m, "DeckGroup")
      .def_static("free_abelian", &DeckGroup::free_abelian, py::arg("rank"))
      .def_static("cyclic", &DeckGroup::cyclic, py::arg("modulus"))
      .def_static("table", [](std::vector<std::vector<int>> t) { return DeckGroup::table(t); })
      .def("identity", &DeckGroup::identity)
      .def("make", &DeckGroup::make)
      .def("compose", &DeckGroup::compose)
      .def("inverse", &DeckGroup::inverse)
      .def("element_order",
           [](const DeckGroup& g, const GroupElement& a) -> py::object {
             const auto o = g.element_order(a);
             return o ? py::cast(*o) : py::none();
           })
      .def("center", [](const DeckGroup& g) {
        const auto c = g.center();
        py::dict out;
        out["whole_group"] = c.whole_group;
        out["elements"] = py::cast(c.elements);
        return out;
      });

  py::class_<ManifoldPoint>(m, "ManifoldPoint")
      .def_readonly("chart", &ManifoldPoint::chart)
      .def_readonly("coords", &ManifoldPoint::coords);

  py::class_<Atlas>(m, "Atlas")
      .def_property_readonly("dim", [](const Atlas& a) { return a.dim; })
      .def_property_readonly("chart_count",
                             [](const Atlas& a) { return a.charts.size(); })
      .def("canonicalize",
           [](const Atlas& a, int chart, Vec coords) {
             return a.canonicalize({chart, std::move(coords)});
           })
      .def("subdivide_loop",
           [](const Atlas& a, const std::string& name, long long power) {
             const Loop* l = a.find_loop(name);
             if (!l) throw std::invalid_argument("unknown loop '" + name + "'");
             return a.subdivide(a.loop_power(*l, power)).chart_sequence();
           },
           py::arg("name"), py::arg("power") = 1);

  m.def("builtin_atlas",
        [](const std::string& name, int charts, double pad) {
          AtlasParams p;
          p.charts = charts;
          p.pad = pad;
          return builtin_atlas(name, p);
        },
        py::arg("name"), py::arg("charts") = 3, py::arg("pad") = 0.25);

  py::class_<CoverPoint>(m, "CoverPoint")
      .def_readonly("chart", &CoverPoint::chart)
      .def_readonly("deck", &CoverPoint::deck)
      .def_readonly("coords", &CoverPoint::coords);

  py::class_<Covering>(m, "Covering")
      .def("project", &Covering::project)
      .def("deck_act", &Covering::deck_act)
      .def("make_point", &Covering::make_point)
      .def("to_model", &Covering::to_model)
      .def("from_model", &Covering::from_model);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("name", [](const Scenario& s) { return s.name; })
      .def_property_readonly("atlas", [](const Scenario& s) { return s.atlas; })
      .def_property_readonly("covering", [](const Scenario& s) { return s.covering; })
      .def_property_readonly("deck", [](const Scenario& s) { return s.deck; })
      .def("holonomy",
           [](const Scenario& s, const std::string& loop, long long power) {
             const Loop* l = s.atlas.find_loop(loop);
             if (!l) throw std::invalid_argument("unknown loop '" + loop + "'");
             return holonomy(s.atlas, s.cocycle, s.atlas.subdivide(s.atlas.loop_power(*l, power)));
           },
           py::arg("loop") = "gen0", py::arg("power") = 1)
      .def("lift_loop",
           [](const Scenario& s, const std::string& loop, const CoverPoint& start) {
             const Loop* l = s.atlas.find_loop(loop);
             if (!l) throw std::invalid_argument("unknown loop '" + loop + "'");
             return lift_path(s.covering, s.atlas.subdivide(*l), start).endpoint;
           })
      .def("form_periods",
           [](const Scenario& s, const std::string& form) {
             auto it = s.forms.find(form);
             if (it == s.forms.end()) throw std::invalid_argument("unknown form '" + form + "'");
             return period_homomorphism(it->second, s.covering).generator_values;
           })
      .def("potential_branch",
           [](const Scenario& s, const std::string& form, int chart, std::vector<long long> d,
              Vec y) {
             auto it = s.forms.find(form);
             if (it == s.forms.end()) throw std::invalid_argument("unknown form '" + form + "'");
             const auto P = build_multivalued_potential(it->second, s.covering);
             return P.eval_branch(chart, s.deck.make(std::move(d)), y);
           })
      .def("moment_branch",
           [](const Scenario& s, int chart, std::vector<long long> d, Vec y) {
             const auto J = s.make_moment();
             return J.branch_vec(chart, s.deck.make(std::move(d)), y);
           })
      .def("moment_periods",
           [](const Scenario& s) {
             const auto J = s.make_moment();
             std::vector<std::vector<double>> out;
             for (int i = 0; i < J.algebra_dim(); ++i)
               out.push_back(J.period(i).generator_values);
             return out;
           })
      .def("gamma_table",
           [](const Scenario& s) {
             auto lift = s.make_lift();
             auto ctx = make_extension_context(lift);
             std::vector<std::vector<GroupElement>> out = ctx.gamma_comp;
             return out;
           })
      .def("split_states",
           [](const Scenario& s, int window, double grid) {
             const auto J = s.make_moment();
             GlobalMomentMap G{&J, {}};
             GridSpec spec;
             spec.window = window;
             spec.spacing = grid;
             const auto S = compute_state_space(G, s.covering, G.eval(s.covering.base), 0, spec);
             const auto Q = quotient_states(S);
             py::dict out;
             out["state_count"] = S.states.size();
             std::vector<Vec> iotas;
             for (const auto& st : S.states) iotas.push_back(st.iota);
             out["iota"] = py::cast(iotas);
             std::vector<int> mult;
             for (const auto& q : Q.quotient) mult.push_back(q.multiplicity);
             out["multiplicities"] = py::cast(mult);
             return out;
           },
           py::arg("window") = 3, py::arg("grid") = 0.2)
      .def("run", [](const Scenario& s) { return json_to_py(run_scenario(s)); })
      .def("run_check",
           [](const Scenario& s, const std::string& c) { return json_to_py(run_check(s, c)); });

  m.def("scenario", &scenario_from_arg,
        "Load a scenario from a builtin name, a JSON file path, or a config dict");
  m.def("builtin_scenario_names", &builtin_scenario_names);

  m.def("parse_expression", [](const std::string& text) {
    return expr_to_string(parse_expression(text));
  });
  m.def("eval_expression", [](const std::string& text, const std::map<std::string, double>& env) {
    return expr_eval(parse_expression(text), env);
  });

  m.def("product_loop_homotopy",
        [](const std::function<Vec(double)>& lam, const std::function<Vec(double)>& mu, double s,
           double t) { return product_loop_homotopy(lam, mu, s, t); });
}
