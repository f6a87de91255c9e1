#include "symcov/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symcov {

namespace {
long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

Mat mat_inverse(const Mat& m) {
  if (m.rows == 1) {
    Mat r(1, 1);
    r(0, 0) = 1.0 / m(0, 0);
    return r;
  }
  if (m.rows == 2) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::fabs(det) < 1e-14) throw std::domain_error("diffeo: singular jacobian");
    Mat r(2, 2);
    r(0, 0) = m(1, 1) / det;
    r(0, 1) = -m(0, 1) / det;
    r(1, 0) = -m(1, 0) / det;
    r(1, 1) = m(0, 0) / det;
    return r;
  }
  throw std::domain_error("mat_inverse: dim > 2");
}
}  // namespace

CoverPoint Covering::make_point(int chart, const GroupElement& d, Vec coords) const {
  deck.require_member(d);
  if (!atlas.chart_contains(chart, coords))
    throw std::domain_error("cover point: coordinates outside the chart box");
  return {chart, d, std::move(coords)};
}

CoverPoint Covering::rechart(const CoverPoint& x, int b) const {
  if (x.chart == b) return x;
  const Overlap* o = atlas.find_overlap(x.chart, b);
  if (!o || !atlas.chart_contains(b, vadd(x.coords, o->shift)))
    throw std::domain_error("rechart: point does not lie in the target chart");
  return {b, deck.compose(x.deck, cocycle.at(x.chart, b)), vadd(x.coords, o->shift)};
}

CoverPoint Covering::canonical(const CoverPoint& x) const {
  const auto reps = atlas.locate(x.coords);
  if (reps.empty()) throw std::domain_error("cover point outside all charts");
  return rechart(x, reps.front().chart);
}

ManifoldPoint Covering::project(const CoverPoint& x) const {
  return atlas.canonicalize({x.chart, x.coords});
}

CoverPoint Covering::deck_act(const GroupElement& d, const CoverPoint& x) const {
  deck.require_member(d);
  return {x.chart, deck.compose(d, x.deck), x.coords};
}

bool Covering::same_point(const CoverPoint& x, const CoverPoint& y) const {
  const auto cx = canonical(x), cy = canonical(y);
  return cx.chart == cy.chart && cx.deck == cy.deck && vdist(cx.coords, cy.coords) < tol::path;
}

bool Covering::simply_connected_cover() const {
  if (atlas.generators.empty()) return !deck.is_finite() ? false : deck.order() == 1;
  if (deck.kind() != GroupKind::FreeAbelian) return false;
  if (deck.rank() != static_cast<int>(atlas.generators.size())) return false;
  const auto gens = deck.generators();
  for (size_t i = 0; i < atlas.generators.size(); ++i) {
    const auto loop = atlas.subdivide(atlas.generators[i]);
    if (!(holonomy(atlas, cocycle, loop) == gens[i])) return false;
  }
  return true;
}

bool Covering::canonical_unroll() const {
  int periodic = 0;
  for (double L : atlas.periods)
    if (L > 0) ++periodic;
  if (periodic == 0) return deck.is_finite() && deck.order() == 1;
  if (deck.kind() != GroupKind::FreeAbelian || deck.rank() != periodic) return false;
  for (const auto& o : atlas.overlaps()) {
    const auto g = cocycle.at(o.a, o.b);
    int j = 0;
    for (int i = 0; i < atlas.dim; ++i) {
      if (atlas.periods[i] <= 0) continue;
      const double want = -o.shift[i] / atlas.periods[i];
      if (std::fabs(want - std::round(want)) > 1e-9) return false;
      if (g.v[j] != static_cast<long long>(std::llround(want))) return false;
      ++j;
    }
  }
  return true;
}

Vec Covering::to_model(const CoverPoint& x) const {
  if (!canonical_unroll()) throw std::domain_error("to_model: covering has no canonical unroll");
  Vec u = x.coords;
  int j = 0;
  for (int i = 0; i < atlas.dim; ++i) {
    if (atlas.periods[i] <= 0) continue;
    if (deck.kind() == GroupKind::FreeAbelian) u[i] += atlas.periods[i] * x.deck.v[j];
    ++j;
  }
  return u;
}

CoverPoint Covering::from_model(const Vec& u) const {
  if (!canonical_unroll()) throw std::domain_error("from_model: covering has no canonical unroll");
  const auto reps = atlas.locate(u);
  if (reps.empty()) throw std::domain_error("from_model: point outside all charts");
  const auto& rep = reps.front();
  std::vector<long long> d;
  for (int i = 0; i < atlas.dim; ++i) {
    if (atlas.periods[i] <= 0) continue;
    d.push_back(std::llround((u[i] - rep.coords[i]) / atlas.periods[i]));
  }
  if (deck.kind() != GroupKind::FreeAbelian) return {rep.chart, deck.identity(), rep.coords};
  return {rep.chart, deck.make(std::move(d)), rep.coords};
}

Covering canonical_covering(const Atlas& atlas) {
  int periodic = 0;
  for (double L : atlas.periods)
    if (L > 0) ++periodic;
  DeckGroup D = periodic > 0 ? DeckGroup::free_abelian(periodic) : DeckGroup::cyclic(1);
  CechCocycle1 c{D, {}};
  for (const auto& o : atlas.overlaps()) {
    if (o.a >= o.b) continue;
    std::vector<long long> v;
    for (int i = 0; i < atlas.dim; ++i) {
      if (atlas.periods[i] <= 0) continue;
      const double k = -o.shift[i] / atlas.periods[i];
      if (std::fabs(k - std::round(k)) > 1e-9)
        throw std::logic_error("canonical_covering: shift is not a period multiple");
      v.push_back(std::llround(k));
    }
    if (periodic > 0) c.set(o.a, o.b, D.make(v));
  }
  return covering_from_cocycle(atlas, D, c);
}

Covering covering_from_cocycle(const Atlas& atlas, const DeckGroup& deck,
                               const CechCocycle1& cocycle) {
  if (cocycle.group.id() != deck.id())
    throw std::invalid_argument("covering: cocycle group mismatch");
  const auto rep = verify_cocycle(atlas, cocycle);
  if (!rep.pass) throw std::invalid_argument("covering: cocycle fails the cocycle axioms");
  Covering cov{atlas, deck, cocycle, {}};
  cov.base = {atlas.base_chart, deck.identity(), atlas.base_coords};
  return cov;
}

CoverPath lift_path(const Covering& cov, const ChartPath& path, const CoverPoint& start) {
  if (path.segments.empty()) throw std::invalid_argument("lift_path: empty path");
  // The start must sit in the fibre over the path's initial point.
  if (cov.atlas.model_distance(start.coords, path.front()) > tol::path)
    throw std::invalid_argument("lift_path: start does not project to the path start");
  CoverPoint cur = cov.rechart(start, path.front_chart());

  CoverPath out;
  GroupElement d = cur.deck;
  for (size_t k = 0; k < path.segments.size(); ++k) {
    const auto& seg = path.segments[k];
    if (k > 0) d = cov.deck.compose(d, cov.cocycle.at(path.segments[k - 1].chart, seg.chart));
    for (const auto& y : seg.samples) out.samples.push_back({seg.chart, d, y});
  }
  out.endpoint = out.samples.back();
  if (path.closed && path.back_chart() != path.front_chart()) {
    const auto& last = out.endpoint;
    out.endpoint = {path.front_chart(),
                    cov.deck.compose(last.deck, cov.cocycle.at(last.chart, path.front_chart())),
                    cov.atlas.transition(last.chart, path.front_chart(), last.coords)};
    out.samples.push_back(out.endpoint);
  }
  return out;
}

GroupElement loop_deck_element(const Covering& cov, const ChartPath& loop,
                               const CoverPoint& base) {
  if (!loop.closed) throw std::invalid_argument("loop_deck_element: path is not a loop");
  const auto lifted = lift_path(cov, loop, base);
  const CoverPoint start = cov.rechart(base, loop.front_chart());
  return cov.deck.compose(lifted.endpoint.deck, cov.deck.inverse(start.deck));
}

GroupElement deck_between(const Covering& cov, const CoverPoint& from, const CoverPoint& to) {
  const auto cf = cov.canonical(from), ct = cov.canonical(to);
  if (cf.chart != ct.chart || vdist(cf.coords, ct.coords) > tol::path)
    throw std::invalid_argument("deck_between: points lie over different base points");
  return cov.deck.compose(ct.deck, cov.deck.inverse(cf.deck));
}

std::vector<GroupElement> deck_window(const DeckGroup& deck, int W) {
  if (deck.is_finite()) return deck.elements();
  std::vector<GroupElement> out;
  const int k = deck.rank();
  std::vector<long long> v(static_cast<size_t>(k), -W);
  while (true) {
    out.push_back(deck.make(v));
    int i = k - 1;
    while (i >= 0 && ++v[static_cast<size_t>(i)] > W) {
      v[static_cast<size_t>(i)] = -W;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
// Hermite-style reduction of integer generator rows, rank <= 2.
struct LatticeBasis {
  std::vector<std::vector<long long>> rows;  // 0..2 basis vectors, leading entries positive
};

LatticeBasis hermite_rows(std::vector<std::vector<long long>> gens, int k) {
  LatticeBasis B;
  gens.erase(std::remove_if(gens.begin(), gens.end(),
                            [](const auto& g) {
                              return std::all_of(g.begin(), g.end(),
                                                 [](long long x) { return x == 0; });
                            }),
             gens.end());
  if (gens.empty()) return B;
  if (k == 1) {
    long long m = 0;
    for (const auto& g : gens) m = std::gcd(m, g[0]);
    B.rows.push_back({std::llabs(m)});
    return B;
  }
  // k == 2: reduce the first column to a single row via gcd steps.
  while (true) {
    std::sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) {
      return std::llabs(a[0]) != std::llabs(b[0]) ? std::llabs(a[0]) < std::llabs(b[0])
                                                  : std::llabs(a[1]) < std::llabs(b[1]);
    });
    // find smallest nonzero leading entry
    size_t piv = gens.size();
    for (size_t i = 0; i < gens.size(); ++i)
      if (gens[i][0] != 0) {
        piv = i;
        break;
      }
    if (piv == gens.size()) break;  // all leading entries zero
    bool changed = false;
    for (size_t i = 0; i < gens.size(); ++i) {
      if (i == piv || gens[i][0] == 0) continue;
      const long long q = floor_div(gens[i][0], gens[piv][0]);
      gens[i][0] -= q * gens[piv][0];
      gens[i][1] -= q * gens[piv][1];
      changed = true;
    }
    if (!changed) {
      // exactly one row with nonzero leading entry; reduce the rest mod gcd of
      // their second entries
      std::vector<long long> first = gens[piv];
      if (first[0] < 0) {
        first[0] = -first[0];
        first[1] = -first[1];
      }
      long long m2 = 0;
      for (size_t i = 0; i < gens.size(); ++i)
        if (i != piv) m2 = std::gcd(m2, gens[i][1]);
      B.rows.push_back(first);
      if (m2 != 0) B.rows.push_back({0, std::llabs(m2)});
      // normalize first[1] mod m2
      if (m2 != 0) {
        B.rows[0][1] -= floor_div(B.rows[0][1], std::llabs(m2)) * std::llabs(m2);
      }
      return B;
    }
  }
  // no rows with nonzero leading entry: lattice lives in the second axis
  long long m2 = 0;
  for (const auto& g : gens) m2 = std::gcd(m2, g[1]);
  if (m2 != 0) B.rows.push_back({0, std::llabs(m2)});
  return B;
}
}  // namespace

namespace {
std::vector<GroupElement> close_subgroup(const DeckGroup& G,
                                         const std::vector<GroupElement>& gens) {
  std::vector<GroupElement> elems = {G.identity()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& a : std::vector<GroupElement>(elems))
      for (const auto& g : gens) {
        for (const auto& x : {G.compose(a, g), G.compose(a, G.inverse(g))}) {
          if (std::find(elems.begin(), elems.end(), x) == elems.end()) {
            elems.push_back(x);
            grew = true;
          }
        }
      }
  }
  std::sort(elems.begin(), elems.end());
  return elems;
}
}  // namespace

bool IntermediateCovering::in_subgroup(const GroupElement& d) const {
  const DeckGroup& G = parent.deck;
  G.require_member(d);
  if (G.is_finite()) {
    const auto elems = close_subgroup(G, subgroup_gens);
    return std::binary_search(elems.begin(), elems.end(), d);
  }
  return coset_rep(d) == G.identity();
}

GroupElement IntermediateCovering::coset_rep(const GroupElement& d) const {
  const DeckGroup& G = parent.deck;
  G.require_member(d);
  if (G.is_finite()) {
    const auto elems = close_subgroup(G, subgroup_gens);
    GroupElement best = G.compose(elems.front(), d);
    for (const auto& h : elems) {
      const auto cand = G.compose(h, d);
      if (cand < best) best = cand;
    }
    return best;
  }
  // Z^k: reduce d modulo the lattice basis, leading entries into [0, lead).
  std::vector<std::vector<long long>> rows;
  for (const auto& g : subgroup_gens) rows.push_back(g.v);
  const auto B = hermite_rows(rows, G.rank());
  std::vector<long long> v = d.v;
  // reduce from the last basis row upward so earlier reductions stay valid
  for (auto it = B.rows.rbegin(); it != B.rows.rend(); ++it) {
    const auto& r = *it;
    int lead = 0;
    while (lead < G.rank() && r[static_cast<size_t>(lead)] == 0) ++lead;
    if (lead >= G.rank()) continue;
    const long long q = floor_div(v[static_cast<size_t>(lead)], r[static_cast<size_t>(lead)]);
    for (int i = 0; i < G.rank(); ++i) v[static_cast<size_t>(i)] -= q * r[static_cast<size_t>(i)];
  }
  // one more pass from the top for the 2d mixed term
  for (const auto& r : B.rows) {
    int lead = 0;
    while (lead < G.rank() && r[static_cast<size_t>(lead)] == 0) ++lead;
    if (lead >= G.rank()) continue;
    const long long q = floor_div(v[static_cast<size_t>(lead)], r[static_cast<size_t>(lead)]);
    for (int i = 0; i < G.rank(); ++i) v[static_cast<size_t>(i)] -= q * r[static_cast<size_t>(i)];
  }
  return G.make(std::move(v));
}

int IntermediateCovering::coset_index(const GroupElement& d) const {
  const auto rep = coset_rep(d);
  for (size_t i = 0; i < coset_reps.size(); ++i)
    if (coset_reps[i] == rep) return static_cast<int>(i);
  return -1;
}

GroupElement IntermediateCovering::subgroup_part(const GroupElement& d) const {
  // d = h * d0
  return parent.deck.compose(d, parent.deck.inverse(coset_rep(d)));
}

std::optional<GroupElement> IntermediateCovering::ghat(int a, const GroupElement& d0_a, int b,
                                                       const GroupElement& d0_b) const {
  const DeckGroup& G = parent.deck;
  const auto g = parent.cocycle.at(a, b);
  if (!(coset_rep(G.compose(d0_a, g)) == d0_b)) return std::nullopt;
  const auto h = G.compose(G.compose(d0_a, g), G.inverse(d0_b));
  if (!in_subgroup(h)) return std::nullopt;
  return h;
}

IntermediateCovering::ZPoint IntermediateCovering::r_project(const CoverPoint& x) const {
  return {x.chart, coset_rep(x.deck), x.coords};
}

ManifoldPoint IntermediateCovering::q_project(const ZPoint& z) const {
  return parent.atlas.canonicalize({z.chart, z.coords});
}

CoverPoint IntermediateCovering::j_trivialization(const GroupElement& h, const ZPoint& z) const {
  if (!in_subgroup(h)) throw std::invalid_argument("j_trivialization: label not in the subgroup");
  return {z.chart, parent.deck.compose(h, z.coset_rep), z.coords};
}

std::optional<std::vector<long long>> IntermediateCovering::axis_indices() const {
  const DeckGroup& G = parent.deck;
  if (G.kind() != GroupKind::FreeAbelian || !parent.canonical_unroll()) return std::nullopt;
  std::vector<std::vector<long long>> rows;
  for (const auto& g : subgroup_gens) rows.push_back(g.v);
  const auto B = hermite_rows(rows, G.rank());
  if (static_cast<int>(B.rows.size()) != G.rank()) return std::nullopt;  // not finite index
  std::vector<long long> diag(static_cast<size_t>(G.rank()), 0);
  for (const auto& r : B.rows) {
    int lead = 0;
    while (lead < G.rank() && r[static_cast<size_t>(lead)] == 0) ++lead;
    for (int i = 0; i < G.rank(); ++i)
      if (i != lead && r[static_cast<size_t>(i)] != 0) return std::nullopt;  // not axis-aligned
    diag[static_cast<size_t>(lead)] = r[static_cast<size_t>(lead)];
  }
  for (long long m : diag)
    if (m <= 0) return std::nullopt;
  return diag;
}

IntermediateCovering build_intermediate_cover(const Covering& cov,
                                              std::vector<GroupElement> subgroup_gens,
                                              int window) {
  for (const auto& g : subgroup_gens) cov.deck.require_member(g);
  IntermediateCovering ic{cov, std::move(subgroup_gens), true, {}};
  const DeckGroup& G = cov.deck;
  if (G.is_finite()) {
    std::vector<GroupElement> reps;
    for (const auto& d : G.elements()) {
      const auto r = ic.coset_rep(d);
      if (std::find(reps.begin(), reps.end(), r) == reps.end()) reps.push_back(r);
    }
    std::sort(reps.begin(), reps.end());
    ic.coset_reps = std::move(reps);
    return ic;
  }
  if (auto diag = ic.axis_indices()) {
    // finite index: representatives in the fundamental box
    std::vector<GroupElement> reps;
    std::vector<long long> v(diag->size(), 0);
    while (true) {
      reps.push_back(ic.coset_rep(G.make(v)));
      int i = static_cast<int>(v.size()) - 1;
      while (i >= 0 && ++v[static_cast<size_t>(i)] >= (*diag)[static_cast<size_t>(i)]) {
        v[static_cast<size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    ic.coset_reps = std::move(reps);
    return ic;
  }
  // infinite index: enumerate representatives within the deck window
  ic.finite_index = false;
  std::vector<GroupElement> reps;
  for (const auto& d : deck_window(G, window)) {
    const auto r = ic.coset_rep(d);
    if (std::find(reps.begin(), reps.end(), r) == reps.end()) reps.push_back(r);
  }
  std::sort(reps.begin(), reps.end());
  ic.coset_reps = std::move(reps);
  return ic;
}

// ---------------------------------------------------------------------------

Diffeo identity_diffeo(int dim) {
  return {[](const Vec& y) { return y; }, [](const Vec& y) { return y; }, Mat::identity(dim)};
}

Diffeo compose_diffeo(const Diffeo& f, const Diffeo& g) {
  auto fm = f.map, gm = g.map, fi = f.inverse, gi = g.inverse;
  return {[fm, gm](const Vec& y) { return fm(gm(y)); },
          [fi, gi](const Vec& y) { return gi(fi(y)); }, f.jacobian.mul(g.jacobian)};
}

CotangentPoint cotangent_map(const Atlas& atlas, const Diffeo& f, const CotangentPoint& x) {
  const Vec new_base = f.map(x.base.coords);
  const Mat jinv = mat_inverse(f.jacobian);
  // (f^-1)* p: components p -> (J^-1)^T p
  Vec p(x.covector.size(), 0.0);
  for (size_t j = 0; j < p.size(); ++j)
    for (size_t i = 0; i < p.size(); ++i)
      p[j] += jinv(static_cast<int>(i), static_cast<int>(j)) * x.covector[i];
  const auto reps = atlas.locate(new_base);
  if (reps.empty()) throw std::domain_error("cotangent_map: image outside all charts");
  return {reps.front(), std::move(p)};
}

CotangentPoint cotangent_project(const Covering& cov, const Vec& cover_model_base,
                                 const Vec& covector) {
  const auto reps = cov.atlas.locate(cover_model_base);
  if (reps.empty()) throw std::domain_error("cotangent_project: point outside all charts");
  return {reps.front(), covector};  // unit jacobian: covector components unchanged
}

double canonical_one_form_pairing(const CotangentPoint& x, const Vec& v_base, const Vec&) {
  return vdot(x.covector, v_base);
}

}  // namespace symcov
