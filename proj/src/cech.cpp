#include "symcov/cech.hpp"

#include <algorithm>
#include <deque>

namespace symcov {

CechCochain0 CechCochain0::constant(const DeckGroup& g, int n_charts, const GroupElement& v) {
  g.require_member(v);
  CechCochain0 h{g, std::vector<GroupElement>(static_cast<size_t>(n_charts), v)};
  return h;
}

CechCochain0 CechCochain0::identity(const DeckGroup& g, int n_charts) {
  return constant(g, n_charts, g.identity());
}

CechCocycle1 CechCocycle1::trivial(const DeckGroup& g) { return CechCocycle1{g, {}}; }

void CechCocycle1::set(int a, int b, const GroupElement& v) {
  group.require_member(v);
  entries[{a, b}] = v;
}

GroupElement CechCocycle1::at(int a, int b) const {
  if (a == b) {
    auto it = entries.find({a, a});
    return it != entries.end() ? it->second : group.identity();
  }
  auto it = entries.find({a, b});
  if (it != entries.end()) return it->second;
  it = entries.find({b, a});
  if (it != entries.end()) return group.inverse(it->second);
  return group.identity();  // unlisted overlaps default to the identity
}

CocycleReport verify_cocycle(const Atlas& atlas, const CechCocycle1& c) {
  CocycleReport rep;
  const int n = static_cast<int>(atlas.charts.size());
  auto fail = [&](std::string axiom, std::vector<int> where, std::string detail) {
    rep.pass = false;
    rep.violations.push_back({std::move(axiom), std::move(where), std::move(detail)});
  };

  for (const auto& [key, val] : c.entries) {
    c.group.require_member(val);
    auto [a, b] = key;
    if (a < 0 || a >= n || b < 0 || b >= n) {
      fail("schema", {a, b}, "chart index out of range");
      continue;
    }
    if (a != b && !atlas.charts_overlap(a, b))
      fail("schema", {a, b}, "entry on a non-overlap");
  }

  for (int a = 0; a < n; ++a)
    if (!(c.at(a, a) == c.group.identity())) fail("Coc1", {a}, "g_aa != e");

  for (const auto& o : atlas.overlaps()) {
    if (o.a >= o.b) continue;
    if (!(c.at(o.b, o.a) == c.group.inverse(c.at(o.a, o.b))))
      fail("Coc2", {o.a, o.b}, "g_ba != g_ab^-1");
  }

  for (const auto& t : atlas.triples()) {
    const auto lhs = c.at(t.a, t.c);
    const auto rhs = c.group.compose(c.at(t.a, t.b), c.at(t.b, t.c));
    if (!(lhs == rhs)) fail("Coc3", {t.a, t.b, t.c}, "g_ac != g_ab * g_bc");
  }
  return rep;
}

CechCocycle1 apply_coboundary(const Atlas& atlas, const CechCocycle1& c, const CechCochain0& h) {
  if (h.group.id() != c.group.id())
    throw std::invalid_argument("apply_coboundary: cochain and cocycle use different groups");
  if (h.values.size() != atlas.charts.size())
    throw std::invalid_argument("apply_coboundary: cochain must be defined on every chart");
  CechCocycle1 out{c.group, {}};
  for (const auto& o : atlas.overlaps()) {
    if (o.a >= o.b) continue;
    const auto g = c.group.compose(c.group.compose(c.group.inverse(h.at(o.a)), c.at(o.a, o.b)),
                                   h.at(o.b));
    out.set(o.a, o.b, g);
  }
  auto rep = verify_cocycle(atlas, out);
  if (!rep.pass) throw std::logic_error("apply_coboundary: output failed the cocycle axioms");
  return out;
}

CohomologousResult are_cohomologous(const Atlas& atlas, const CechCocycle1& c1,
                                    const CechCocycle1& c2) {
  if (c1.group.id() != c2.group.id())
    throw std::invalid_argument("are_cohomologous: cocycles use different groups");
  const DeckGroup& G = c1.group;
  const auto parent = nerve_spanning_tree(atlas);
  const int n = static_cast<int>(atlas.charts.size());
  const int root = atlas.base_chart;

  // BFS order for propagation.
  std::vector<int> order;
  {
    std::deque<int> q{root};
    std::vector<char> seen(static_cast<size_t>(n), 0);
    seen[root] = 1;
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      order.push_back(a);
      for (int b = 0; b < n; ++b)
        if (!seen[b] && parent[b] == a) {
          seen[b] = 1;
          q.push_back(b);
        }
    }
  }

  auto try_root = [&](const GroupElement& h0) -> std::optional<std::vector<GroupElement>> {
    std::vector<GroupElement> h(static_cast<size_t>(n), G.identity());
    h[static_cast<size_t>(root)] = h0;
    for (int a : order) {
      if (a == root) continue;
      const int p = parent[a];
      // c2_pa = h_p^-1 c1_pa h_a  =>  h_a = c1_pa^-1 h_p c2_pa
      h[static_cast<size_t>(a)] = G.compose(
          G.compose(G.inverse(c1.at(p, a)), h[static_cast<size_t>(p)]), c2.at(p, a));
    }
    for (const auto& o : atlas.overlaps()) {
      if (o.a >= o.b) continue;
      const auto want = G.compose(
          G.compose(G.inverse(h[static_cast<size_t>(o.a)]), c1.at(o.a, o.b)),
          h[static_cast<size_t>(o.b)]);
      if (!(want == c2.at(o.a, o.b))) return std::nullopt;
    }
    return h;
  };

  CohomologousResult res;
  if (G.is_finite()) {
    for (const auto& h0 : G.elements()) {  // lexicographic order
      if (auto h = try_root(h0)) {
        res.cohomologous = true;
        res.witness = CechCochain0{G, std::move(*h)};
        return res;
      }
    }
    return res;
  }
  // Z^k: the tree solve determines h up to a global constant; normalize the
  // witness at the base chart.
  if (auto h = try_root(G.identity())) {
    res.cohomologous = true;
    res.witness = CechCochain0{G, std::move(*h)};
  }
  return res;
}

GroupElement holonomy_word(const CechCocycle1& c, const std::vector<int>& chart_sequence) {
  GroupElement acc = c.group.identity();
  for (size_t i = 0; i + 1 < chart_sequence.size(); ++i)
    acc = c.group.compose(acc, c.at(chart_sequence[i], chart_sequence[i + 1]));
  return acc;
}

GroupElement holonomy(const Atlas& atlas, const CechCocycle1& c, const ChartPath& loop) {
  if (!loop.closed) throw std::invalid_argument("holonomy: path is not a loop");
  const auto seq = loop.chart_sequence();
  for (size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq[i] != seq[i + 1] && !atlas.charts_overlap(seq[i], seq[i + 1]))
      throw std::invalid_argument("holonomy: chart sequence inconsistent with overlaps");
  return holonomy_word(c, seq);
}

const GroupElement& CechCochainN::at(const std::vector<int>& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw std::invalid_argument("cochain: value missing on a nerve tuple");
  return it->second;
}

namespace {
// Nonempty common intersection of a chart multiset, via pairwise shifts
// anchored at the first chart.
bool tuple_has_overlap(const Atlas& atlas, const std::vector<int>& t) {
  std::vector<int> distinct;
  for (int a : t)
    if (std::find(distinct.begin(), distinct.end(), a) == distinct.end()) distinct.push_back(a);
  if (distinct.size() == 1) return true;
  const int a0 = distinct[0];
  Vec lo = atlas.charts[static_cast<size_t>(a0)].lo;
  Vec hi = atlas.charts[static_cast<size_t>(a0)].hi;
  for (size_t j = 1; j < distinct.size(); ++j) {
    const Overlap* o = atlas.find_overlap(a0, distinct[j]);
    if (!o) return false;
    for (int i = 0; i < atlas.dim; ++i) {
      lo[i] = std::max(lo[i], o->lo[i]);
      hi[i] = std::min(hi[i], o->hi[i]);
      if (!(hi[i] - lo[i] > 1e-9)) return false;
    }
  }
  return true;
}
}  // namespace

std::vector<std::vector<int>> nerve_tuples(const Atlas& atlas, int arity) {
  if (arity < 0 || arity > 3) throw std::invalid_argument("nerve_tuples: arity must be 0..3");
  const int n = static_cast<int>(atlas.charts.size());
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<size_t>(arity) + 1, 0);
  while (true) {
    if (tuple_has_overlap(atlas, t)) out.push_back(t);
    int i = arity;
    while (i >= 0 && ++t[static_cast<size_t>(i)] == n) {
      t[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

CechCochainN cech_delta(const Atlas& atlas, const CechCochainN& f) {
  if (!f.group.is_abelian())
    throw std::domain_error("cech_delta: coefficient group must be abelian");
  CechCochainN out{f.arity + 1, f.group, {}};
  for (const auto& t : nerve_tuples(atlas, f.arity + 1)) {
    GroupElement acc = f.group.identity();
    for (size_t k = 0; k < t.size(); ++k) {
      std::vector<int> sub;
      for (size_t i = 0; i < t.size(); ++i)
        if (i != k) sub.push_back(t[i]);
      const auto& v = f.at(sub);
      acc = f.group.compose(acc, (k % 2 == 0) ? v : f.group.inverse(v));
    }
    out.values[t] = acc;
  }
  return out;
}

std::vector<int> nerve_spanning_tree(const Atlas& atlas) {
  const int n = static_cast<int>(atlas.charts.size());
  std::vector<int> parent(static_cast<size_t>(n), -2);
  std::deque<int> q{atlas.base_chart};
  parent[static_cast<size_t>(atlas.base_chart)] = -1;
  while (!q.empty()) {
    int a = q.front();
    q.pop_front();
    for (int b = 0; b < n; ++b)
      if (parent[static_cast<size_t>(b)] == -2 && atlas.charts_overlap(a, b)) {
        parent[static_cast<size_t>(b)] = a;
        q.push_back(b);
      }
  }
  for (int b = 0; b < n; ++b)
    if (parent[static_cast<size_t>(b)] == -2)
      throw std::invalid_argument("nerve: chart graph is not connected");
  return parent;
}

}  // namespace symcov
