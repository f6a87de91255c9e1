#include "symcov/forms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace symcov {

namespace {
// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGLx[5] = {-0.906179845938663992797626878299, -0.538469310105683091036314420700,
                            0.0, 0.538469310105683091036314420700,
                            0.906179845938663992797626878299};
constexpr double kGLw[5] = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                            0.568888888888888888888888888889, 0.478628670499366468041291514836,
                            0.236926885056189087514264040720};

// Straight-segment integral of alpha in one chart, composite 5-point GL.
double segment_integral(const OneForm& alpha, int chart, const Vec& from, const Vec& to,
                        int panels) {
  const Vec d = vsub(to, from);
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double t0 = static_cast<double>(p) / panels, t1 = static_cast<double>(p + 1) / panels;
    const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    for (int q = 0; q < 5; ++q) {
      const double t = mid + half * kGLx[q];
      const Vec y = vadd(from, vscale(t, d));
      total += kGLw[q] * half * vdot(alpha.eval(chart, y), d);
    }
  }
  return total;
}

Vec clamp_box_sample(const Vec& lo, const Vec& hi, const Vec& frac, double fallback = 3.0) {
  Vec y(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    double a = std::isfinite(lo[i]) ? lo[i] : -fallback;
    double b = std::isfinite(hi[i]) ? hi[i] : fallback;
    y[i] = a + (b - a) * frac[i];
  }
  return y;
}
}  // namespace

OneForm OneForm::global(std::function<Vec(const Vec&)> fn, bool closed, std::string name) {
  return {[fn = std::move(fn)](int, const Vec& y) { return fn(y); }, closed, std::move(name)};
}

TwoForm TwoForm::constant(double f, std::string name) {
  return {[f](int, const Vec&) { return f; }, std::move(name)};
}

FormValidation validate_one_form(const Atlas& atlas, const OneForm& alpha, int samples_per_box) {
  FormValidation v;
  const int m = samples_per_box;
  // Overlap agreement under the shift transitions.
  for (const auto& o : atlas.overlaps()) {
    if (o.a >= o.b) continue;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < (atlas.dim == 2 ? m : 1); ++j) {
        Vec frac{(i + 0.5) / m};
        if (atlas.dim == 2) frac.push_back((j + 0.5) / m);
        const Vec ya = clamp_box_sample(o.lo, o.hi, frac);
        const Vec yb = vadd(ya, o.shift);
        v.overlap_residual =
            std::max(v.overlap_residual, vdist(alpha.eval(o.a, ya), alpha.eval(o.b, yb)));
      }
  }
  // Finite-difference curl in dimension 2.
  if (atlas.dim == 2 && alpha.declared_closed) {
    const double h = 1e-5;
    for (int a = 0; a < static_cast<int>(atlas.charts.size()); ++a) {
      const auto& ch = atlas.charts[static_cast<size_t>(a)];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const Vec y = clamp_box_sample(ch.lo, ch.hi, {(i + 0.5) / m, (j + 0.5) / m});
          const double d1dx = (alpha.eval(a, {y[0] + h, y[1]})[1] -
                               alpha.eval(a, {y[0] - h, y[1]})[1]) /
                              (2 * h);
          const double d0dy = (alpha.eval(a, {y[0], y[1] + h})[0] -
                               alpha.eval(a, {y[0], y[1] - h})[0]) /
                              (2 * h);
          v.closedness_residual = std::max(v.closedness_residual, std::fabs(d1dx - d0dy));
        }
    }
  }
  v.pass = v.overlap_residual < 1e-10 &&
           (!alpha.declared_closed || v.closedness_residual < tol::fd);
  return v;
}

FormValidation validate_two_form(const Atlas& atlas, const TwoForm& omega, int samples_per_box) {
  FormValidation v;
  if (atlas.dim != 2) throw std::invalid_argument("two-form requires a 2d atlas");
  const int m = samples_per_box;
  double min_abs = 1e300;
  for (const auto& o : atlas.overlaps()) {
    if (o.a >= o.b) continue;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Vec ya = clamp_box_sample(o.lo, o.hi, {(i + 0.5) / m, (j + 0.5) / m});
        const Vec yb = vadd(ya, o.shift);
        v.overlap_residual = std::max(
            v.overlap_residual, std::fabs(omega.eval(o.a, ya) - omega.eval(o.b, yb)));
      }
  }
  for (int a = 0; a < static_cast<int>(atlas.charts.size()); ++a) {
    const auto& ch = atlas.charts[static_cast<size_t>(a)];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Vec y = clamp_box_sample(ch.lo, ch.hi, {(i + 0.5) / m, (j + 0.5) / m});
        min_abs = std::min(min_abs, std::fabs(omega.eval(a, y)));
      }
  }
  v.pass = v.overlap_residual < 1e-10 && min_abs > 0;
  if (!(min_abs > 0)) v.closedness_residual = -1;  // flag degeneracy
  return v;
}

double integrate_path(const OneForm& alpha, const ChartPath& path, int min_panels) {
  double total = 0;
  for (const auto& seg : path.segments) {
    const int pieces = std::max<int>(1, static_cast<int>(seg.samples.size()) - 1);
    const int panels = std::max(1, (min_panels + pieces - 1) / pieces);
    for (int i = 0; i + 1 < static_cast<int>(seg.samples.size()); ++i)
      total += segment_integral(alpha, seg.chart, seg.samples[static_cast<size_t>(i)],
                                seg.samples[static_cast<size_t>(i) + 1], panels);
  }
  return total;
}

double PeriodMap::value(const GroupElement& d) const {
  group.require_member(d);
  if (group.kind() != GroupKind::FreeAbelian) return 0.0;  // all-torsion groups
  double c = 0;
  for (int i = 0; i < group.rank(); ++i)
    c += static_cast<double>(d.v[static_cast<size_t>(i)]) * generator_values[static_cast<size_t>(i)];
  return c;
}

PeriodMap period_homomorphism(const OneForm& alpha, const Covering& cov) {
  const auto val = validate_one_form(cov.atlas, alpha);
  if (!val.pass)
    throw std::domain_error("period_homomorphism: form is not closed (curl residual " +
                            std::to_string(val.closedness_residual) + ")");
  PeriodMap c{cov.deck, {}};
  if (cov.atlas.generators.empty()) return c;

  if (cov.deck.kind() == GroupKind::FreeAbelian) {
    if (!cov.simply_connected_cover())
      throw std::domain_error("no simply connected cover for this cocycle");
    c.generator_values.resize(static_cast<size_t>(cov.deck.rank()), 0.0);
    const auto gens = cov.deck.generators();
    for (size_t i = 0; i < cov.atlas.generators.size(); ++i) {
      const auto loop = cov.atlas.subdivide(cov.atlas.generators[i]);
      c.generator_values[i] = integrate_path(alpha, loop);
    }
    return c;
  }
  // All-torsion deck group: the only homomorphic extension is c = 0, and the
  // generator-loop integrals must vanish for the form to be compatible.
  for (const auto& gen : cov.atlas.generators) {
    const auto loop = cov.atlas.subdivide(gen);
    const double I = integrate_path(alpha, loop);
    const auto rho = holonomy(cov.atlas, cov.cocycle, loop);
    const auto ord = cov.deck.element_order(rho);
    if (ord && *ord > 0 && std::fabs(I) > tol::quadrature * 10)
      throw std::domain_error(
          "period_homomorphism: nonzero period on a torsion holonomy class");
  }
  return c;
}

double MultiValuedPotential::base_potential(int a, const Vec& y) const {
  return segment_integral(alpha, a, anchors[static_cast<size_t>(a)], y, 64) +
         chart_const[static_cast<size_t>(a)];
}

double MultiValuedPotential::eval_branch(int a, const GroupElement& d, const Vec& y) const {
  if (!cov.atlas.chart_contains(a, y))
    throw std::domain_error("eval_branch: coordinates outside the chart");
  return base_potential(a, y) + period.value(d);
}

double MultiValuedPotential::cover_value(const CoverPoint& x) const {
  return eval_branch(x.chart, x.deck, x.coords);
}

MultiValuedPotential build_multivalued_potential(const OneForm& alpha, const Covering& cov) {
  MultiValuedPotential P{cov, alpha, period_homomorphism(alpha, cov), {}, {}, 0.0};
  const int n = static_cast<int>(cov.atlas.charts.size());
  for (int a = 0; a < n; ++a) P.anchors.push_back(cov.atlas.charts[static_cast<size_t>(a)].center());
  P.chart_const.assign(static_cast<size_t>(n), 0.0);

  auto phi = [&](int a, const Vec& y) {
    return segment_integral(alpha, a, P.anchors[static_cast<size_t>(a)], y, 64);
  };

  // Propagate chart constants over a spanning tree so that on overlaps
  // f_{a,e} = f_{b,e} + c(g_ab).
  const auto parent = nerve_spanning_tree(cov.atlas);
  std::vector<char> done(static_cast<size_t>(n), 0);
  const int root = cov.atlas.base_chart;
  P.chart_const[static_cast<size_t>(root)] = -phi(root, cov.atlas.base_coords);
  done[static_cast<size_t>(root)] = 1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (int b = 0; b < n; ++b) {
      if (done[static_cast<size_t>(b)] || parent[static_cast<size_t>(b)] != a) continue;
      const Overlap* o = cov.atlas.find_overlap(a, b);
      const Vec ya = o->sample_point();
      const Vec yb = vadd(ya, o->shift);
      // f_{a,e}(y) = f_{b,e}(T_ab y) + c(g_ab)
      P.chart_const[static_cast<size_t>(b)] =
          phi(a, ya) + P.chart_const[static_cast<size_t>(a)] - phi(b, yb) -
          P.period.value(cov.cocycle.at(a, b));
      done[static_cast<size_t>(b)] = 1;
      queue.push_back(b);
    }
  }

  // Cycle-closure defect on the non-tree edges of the nerve.
  for (const auto& o : cov.atlas.overlaps()) {
    if (o.a >= o.b) continue;
    const Vec ya = o.sample_point();
    const Vec yb = vadd(ya, o.shift);
    const double lhs = phi(o.a, ya) + P.chart_const[static_cast<size_t>(o.a)];
    const double rhs = phi(o.b, yb) + P.chart_const[static_cast<size_t>(o.b)] +
                       P.period.value(cov.cocycle.at(o.a, o.b));
    P.tree_cycle_residual = std::max(P.tree_cycle_residual, std::fabs(lhs - rhs));
  }
  if (P.tree_cycle_residual > tol::quadrature * 100)
    throw std::logic_error("multi-valued potential: glueing constants failed to close");
  return P;
}

RegaugeResult regauge_potential(const MultiValuedPotential& P, const CechCochain0& h,
                                std::optional<GroupElement> k_base) {
  const Covering& cov = P.cov;
  const DeckGroup& G = cov.deck;
  if (h.group.id() != G.id()) throw std::invalid_argument("regauge: cochain group mismatch");
  const auto gprime = apply_coboundary(cov.atlas, cov.cocycle, h);

  const int n = static_cast<int>(cov.atlas.charts.size());
  const int root = cov.atlas.base_chart;
  GroupElement k0 = k_base.value_or(G.inverse(h.at(root)));
  // k is determined by the two cocycles once k_{a0} is chosen:
  // g'_ab k_b = k_a g_ab  =>  k_b = g'_ab^-1 k_a g_ab.
  const auto parent = nerve_spanning_tree(cov.atlas);
  std::vector<GroupElement> k(static_cast<size_t>(n), G.identity());
  std::vector<char> done(static_cast<size_t>(n), 0);
  k[static_cast<size_t>(root)] = k0;
  done[static_cast<size_t>(root)] = 1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (int b = 0; b < n; ++b) {
      if (done[static_cast<size_t>(b)] || parent[static_cast<size_t>(b)] != a) continue;
      k[static_cast<size_t>(b)] = G.compose(
          G.compose(G.inverse(gprime.at(a, b)), k[static_cast<size_t>(a)]), cov.cocycle.at(a, b));
      done[static_cast<size_t>(b)] = 1;
      queue.push_back(b);
    }
  }
  for (const auto& o : cov.atlas.overlaps()) {
    if (o.a >= o.b) continue;
    const auto lhs = G.compose(gprime.at(o.a, o.b), k[static_cast<size_t>(o.b)]);
    const auto rhs = G.compose(k[static_cast<size_t>(o.a)], cov.cocycle.at(o.a, o.b));
    if (!(lhs == rhs))
      throw std::logic_error("regauge: k-propagation inconsistent on the nerve");
  }

  RegaugeResult res{P, CechCochain0{G, k}, gprime, k0, G.center(), 0.0};
  res.potential.cov = covering_from_cocycle(cov.atlas, G, gprime);
  res.potential.period = period_homomorphism(P.alpha, res.potential.cov);
  for (int a = 0; a < n; ++a)
    res.potential.chart_const[static_cast<size_t>(a)] =
        P.chart_const[static_cast<size_t>(a)] + P.period.value(k[static_cast<size_t>(a)]);
  return res;
}

double potential_gradient_residual(const MultiValuedPotential& P, int a, const Vec& y,
                                   double step) {
  const Vec want = P.alpha.eval(a, y);
  double resid = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    Vec yp = y, ym = y;
    yp[i] += step;
    ym[i] -= step;
    const double g = (P.base_potential(a, yp) - P.base_potential(a, ym)) / (2 * step);
    resid = std::max(resid, std::fabs(g - want[i]));
  }
  return resid;
}

}  // namespace symcov
