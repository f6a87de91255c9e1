#include "symcov/states.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>

namespace symcov {

Vec PhaseGrid::model_point(const std::vector<long long>& m) const {
  Vec u(m.size());
  for (size_t i = 0; i < m.size(); ++i) u[i] = static_cast<double>(m[i]) * h[i];
  return u;
}

bool PhaseGrid::in_window(const std::vector<long long>& m) const {
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] < lat_lo[i] || m[i] > lat_hi[i]) return false;
  return true;
}

std::optional<CoverPoint> PhaseGrid::resolve(const std::vector<long long>& m) const {
  const Vec u = model_point(m);
  CoverPoint x = cov.from_model(u);
  if (cov.deck.kind() == GroupKind::FreeAbelian)
    for (long long c : x.deck.v)
      if (std::llabs(c) > spec.window) return std::nullopt;
  return x;
}

PhaseGrid make_phase_grid(const Covering& cov, const GridSpec& spec) {
  if (!cov.canonical_unroll())
    throw std::invalid_argument("phase grid: covering has no canonical unroll");
  PhaseGrid g{cov, spec, {}, {}, {}, {}};
  const auto& atlas = cov.atlas;
  g.h.resize(static_cast<size_t>(atlas.dim));
  g.lat_lo.resize(static_cast<size_t>(atlas.dim));
  g.lat_hi.resize(static_cast<size_t>(atlas.dim));
  g.period_steps.resize(static_cast<size_t>(atlas.dim));
  for (int i = 0; i < atlas.dim; ++i) {
    const double L = atlas.periods[static_cast<size_t>(i)];
    if (L > 0) {
      const long long steps = std::max<long long>(4, std::llround(L / spec.spacing));
      g.h[static_cast<size_t>(i)] = L / static_cast<double>(steps);
      g.period_steps[static_cast<size_t>(i)] = steps;
      const double center = atlas.base_coords[static_cast<size_t>(i)];
      const double halfwidth = (spec.window + 0.5) * L;
      g.lat_lo[static_cast<size_t>(i)] = static_cast<long long>(std::ceil((center - halfwidth) / g.h[static_cast<size_t>(i)]));
      g.lat_hi[static_cast<size_t>(i)] = static_cast<long long>(std::floor((center + halfwidth) / g.h[static_cast<size_t>(i)]));
    } else {
      g.h[static_cast<size_t>(i)] = spec.spacing;
      g.period_steps[static_cast<size_t>(i)] = 0;
      const double c = atlas.base_coords[static_cast<size_t>(i)];
      g.lat_lo[static_cast<size_t>(i)] = static_cast<long long>(std::ceil((c - spec.nonperiodic_halfwidth) / spec.spacing));
      g.lat_hi[static_cast<size_t>(i)] = static_cast<long long>(std::floor((c + spec.nonperiodic_halfwidth) / spec.spacing));
    }
  }
  return g;
}

int StateSpace::state_of_cell(const std::vector<long long>& m) const {
  for (const auto& s : states)
    if (std::binary_search(s.cells.begin(), s.cells.end(), m)) return s.id;
  return -1;
}

StateSpace compute_state_space(const GlobalMomentMap& J, const Covering& cov, const Vec& level,
                               double band, const GridSpec& spec) {
  StateSpace S{make_phase_grid(cov, spec), level, band, {}, {}};
  const PhaseGrid& grid = S.grid;
  const int dim = cov.atlas.dim;

  // Deck-orbit values of the level within the label window (plus margin one).
  struct OrbitValue {
    Vec value;
    GroupElement d;
  };
  std::vector<OrbitValue> orbit;
  for (const auto& d : deck_window(cov.deck, spec.window + 1))
    orbit.push_back({vadd(level, [&] {
                       Vec c(level.size());
                       for (size_t i = 0; i < level.size(); ++i)
                         c[i] = J.local->period(static_cast<int>(i)).value(d);
                       return c;
                     }()),
                     d});

  // Default band: 2 h max|grad J| estimated from finite differences.
  if (band <= 0) {
    double gmax = 0;
    std::mt19937_64 rng(3);
    for (int it = 0; it < 40; ++it) {
      std::vector<long long> m(static_cast<size_t>(dim));
      for (int i = 0; i < dim; ++i)
        m[static_cast<size_t>(i)] =
            grid.lat_lo[static_cast<size_t>(i)] +
            static_cast<long long>(rng() % static_cast<unsigned long long>(
                                              grid.lat_hi[static_cast<size_t>(i)] -
                                              grid.lat_lo[static_cast<size_t>(i)] + 1));
      auto x = grid.resolve(m);
      if (!x) continue;
      const Vec u = grid.model_point(m);
      for (int ax = 0; ax < dim; ++ax) {
        Vec up = u, um = u;
        up[static_cast<size_t>(ax)] += 1e-5;
        um[static_cast<size_t>(ax)] -= 1e-5;
        try {
          const Vec jp = J.eval(cov.from_model(up)), jm = J.eval(cov.from_model(um));
          gmax = std::max(gmax, vmaxabs(vsub(jp, jm)) / 2e-5);
        } catch (const std::exception&) {
        }
      }
    }
    band = 2.0 * vmaxabs(grid.h) * std::max(gmax, 1e-6);
    S.band = band;
  }

  // In-band cells and their matched orbit values.
  std::map<std::vector<long long>, std::pair<int, double>> in_band;  // cell -> (orbit idx, dev)
  std::vector<long long> m = grid.lat_lo;
  while (true) {
    if (auto x = grid.resolve(m)) {
      const Vec j = J.eval(*x);
      int best = -1;
      double bestd = band;
      for (size_t oi = 0; oi < orbit.size(); ++oi) {
        const double dev = vdist(j, orbit[oi].value);
        if (dev < bestd) {
          bestd = dev;
          best = static_cast<int>(oi);
        }
      }
      if (best >= 0) in_band[m] = {best, bestd};
    }
    int i = dim - 1;
    while (i >= 0 && ++m[static_cast<size_t>(i)] > grid.lat_hi[static_cast<size_t>(i)]) {
      m[static_cast<size_t>(i)] = grid.lat_lo[static_cast<size_t>(i)];
      --i;
    }
    if (i < 0) break;
  }

  // Flood fill with the 2n-neighbourhood.
  std::map<std::vector<long long>, int> assigned;
  for (const auto& [cell, info] : in_band) {
    if (assigned.count(cell)) continue;
    State st;
    st.id = static_cast<int>(S.states.size());
    st.matched_deck = orbit[static_cast<size_t>(info.first)].d;
    st.iota = orbit[static_cast<size_t>(info.first)].value;
    std::deque<std::vector<long long>> q{cell};
    assigned[cell] = st.id;
    while (!q.empty()) {
      auto c = q.front();
      q.pop_front();
      st.cells.push_back(c);
      st.max_band_deviation = std::max(st.max_band_deviation, in_band[c].second);
      for (int ax = 0; ax < dim; ++ax)
        for (int sgn : {-1, 1}) {
          auto nb = c;
          nb[static_cast<size_t>(ax)] += sgn;
          if (!grid.in_window(nb)) continue;
          auto it = in_band.find(nb);
          if (it == in_band.end() || assigned.count(nb)) continue;
          assigned[nb] = st.id;
          q.push_back(nb);
        }
    }
    std::sort(st.cells.begin(), st.cells.end());
    S.states.push_back(std::move(st));
  }

  // Deck action on states: shift cells by one period step per generator.
  const auto gens = cov.deck.kind() == GroupKind::FreeAbelian
                        ? cov.deck.generators()
                        : std::vector<GroupElement>{};
  std::vector<int> period_axes;
  for (int i = 0; i < dim; ++i)
    if (grid.period_steps[static_cast<size_t>(i)] > 0) period_axes.push_back(i);
  for (size_t gi = 0; gi < gens.size(); ++gi) {
    for (int sgn : {1, -1}) {
      std::vector<int> img(S.states.size(), -1);
      for (auto& st : S.states) {
        // Image state id from the cells that stay inside the window; a state
        // partially leaving is flagged non-interior but its visible image is
        // still reported (this is how deck fixed points stay detectable).
        int target = -2;  // -2 = unset, -1 = inconsistent
        bool leaves = false;
        for (const auto& c : st.cells) {
          auto cc = c;
          cc[static_cast<size_t>(period_axes[gi])] +=
              sgn * grid.period_steps[static_cast<size_t>(period_axes[gi])];
          if (!grid.in_window(cc)) {
            leaves = true;
            continue;
          }
          auto it = assigned.find(cc);
          const int t = (it == assigned.end()) ? -1 : it->second;
          if (target == -2)
            target = t;
          else if (target != t)
            target = -1;
        }
        img[static_cast<size_t>(st.id)] = target == -2 ? -1 : target;
        if (leaves) st.interior = false;
      }
      S.deck_image.push_back(std::move(img));
    }
  }
  return S;
}

QuotientReport quotient_states(const StateSpace& S) {
  QuotientReport rep;
  rep.deck_infinite = !S.grid.cov.deck.is_finite();
  const int n = static_cast<int>(S.states.size());
  std::vector<int> root(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) root[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int a) {
    while (root[static_cast<size_t>(a)] != a) a = root[static_cast<size_t>(a)] = root[static_cast<size_t>(root[static_cast<size_t>(a)])];
    return a;
  };
  std::vector<bool> truncated(static_cast<size_t>(n), false);
  std::vector<bool> fixed(static_cast<size_t>(n), false);
  for (const auto& img : S.deck_image)
    for (int i = 0; i < n; ++i) {
      const int t = img[static_cast<size_t>(i)];
      if (t < 0)
        truncated[static_cast<size_t>(i)] = true;
      else {
        if (t == i) fixed[static_cast<size_t>(i)] = true;
        root[static_cast<size_t>(find(i))] = find(t);
      }
    }
  std::map<int, QuotientState> orbits;
  for (int i = 0; i < n; ++i) {
    auto& q = orbits[find(i)];
    q.members.push_back(i);
    q.window_truncated = q.window_truncated || truncated[static_cast<size_t>(i)] || rep.deck_infinite;
    q.has_fixed_point = q.has_fixed_point || fixed[static_cast<size_t>(i)];
  }
  for (auto& [k, q] : orbits) {
    q.id = static_cast<int>(rep.quotient.size());
    q.multiplicity = static_cast<int>(q.members.size());
    rep.quotient.push_back(q);
  }
  return rep;
}

FlowResult hamiltonian_flow(const std::function<double(const Vec&)>& hamiltonian,
                            const std::function<Vec(const Vec&)>& grad, const TwoForm& omega,
                            const Covering& cov, const Vec& start_model, double T, double dt,
                            const GridSpec& window) {
  if (cov.atlas.dim != 2) throw std::invalid_argument("hamiltonian_flow: 2d phase space only");
  auto gradient = grad;
  if (!gradient) {
    auto hfun = hamiltonian;
    gradient = [hfun](const Vec& u) {
      const double s = 1e-6;
      Vec g(u.size());
      for (size_t i = 0; i < u.size(); ++i) {
        Vec up = u, um = u;
        up[i] += s;
        um[i] -= s;
        g[i] = (hfun(up) - hfun(um)) / (2 * s);
      }
      return g;
    };
  }
  auto field = [&](const Vec& u) -> Vec {
    const auto reps = cov.atlas.locate(u);
    const double f = omega.eval(reps.empty() ? 0 : reps.front().chart,
                                reps.empty() ? u : reps.front().coords);
    const Vec g = gradient(u);
    return {-g[1] / f, g[0] / f};
  };

  FlowResult out;
  Vec u = start_model;
  const double h0 = hamiltonian(u);
  const int steps = static_cast<int>(std::ceil(T / dt));
  out.trajectory.push_back(u);
  out.times.push_back(0.0);
  for (int s = 0; s < steps; ++s) {
    const Vec k1 = field(u);
    const Vec k2 = field(vadd(u, vscale(dt / 2, k1)));
    const Vec k3 = field(vadd(u, vscale(dt / 2, k2)));
    const Vec k4 = field(vadd(u, vscale(dt, k3)));
    Vec du = vadd(vadd(k1, vscale(2.0, k2)), vadd(vscale(2.0, k3), k4));
    u = vadd(u, vscale(dt / 6.0, du));
    out.trajectory.push_back(u);
    out.times.push_back((s + 1) * dt);
    out.energy_drift = std::max(out.energy_drift, std::fabs(hamiltonian(u) - h0));
    // window truncation on non-periodic axes
    for (int i = 0; i < cov.atlas.dim; ++i) {
      if (cov.atlas.periods[static_cast<size_t>(i)] > 0) continue;
      if (std::fabs(u[static_cast<size_t>(i)] - cov.atlas.base_coords[static_cast<size_t>(i)]) >
          window.nonperiodic_halfwidth) {
        out.truncated = true;
        return out;
      }
    }
  }
  return out;
}

double poisson_bracket_sup(const std::function<double(const Vec&)>& f,
                           const std::function<double(const Vec&)>& g, const TwoForm& omega,
                           const Covering& cov, const GridSpec& spec, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uf(-0.5, 0.5);
  double sup = 0;
  const double s = 1e-5;
  for (int it = 0; it < samples; ++it) {
    Vec u(static_cast<size_t>(cov.atlas.dim));
    for (int i = 0; i < cov.atlas.dim; ++i) {
      const double L = cov.atlas.periods[static_cast<size_t>(i)];
      const double extent = L > 0 ? (spec.window + 0.5) * L : spec.nonperiodic_halfwidth;
      u[static_cast<size_t>(i)] = cov.atlas.base_coords[static_cast<size_t>(i)] + 2 * extent * uf(rng);
    }
    auto d = [&](const std::function<double(const Vec&)>& fn, int ax) {
      Vec up = u, um = u;
      up[static_cast<size_t>(ax)] += s;
      um[static_cast<size_t>(ax)] -= s;
      return (fn(up) - fn(um)) / (2 * s);
    };
    const auto reps = cov.atlas.locate(u);
    const double w = omega.eval(reps.empty() ? 0 : reps.front().chart,
                                reps.empty() ? u : reps.front().coords);
    sup = std::max(sup, std::fabs((d(f, 0) * d(g, 1) - d(f, 1) * d(g, 0)) / w));
  }
  return sup;
}

}  // namespace symcov
