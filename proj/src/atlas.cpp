#include "symcov/atlas.hpp"

#include <algorithm>
#include <cmath>

namespace symcov {

namespace {
bool finite(double x) { return std::isfinite(x); }

// Feasible integer lattice shifts k with [lo_a,hi_a] meeting [lo_b+kL, hi_b+kL].
std::vector<long long> shift_candidates(double lo_a, double hi_a, double lo_b, double hi_b,
                                        double period) {
  if (period <= 0) return {0};
  // k bounded by (lo_b - hi_a)/L .. (hi_b - lo_a)/L
  const double kmin = std::ceil((lo_a - hi_b) / period - 1e-9);
  const double kmax = std::floor((hi_a - lo_b) / period + 1e-9);
  std::vector<long long> out;
  for (long long k = static_cast<long long>(kmin); k <= static_cast<long long>(kmax); ++k)
    out.push_back(k);
  return out;
}
}  // namespace

bool Chart::contains(const Vec& y, double slack) const {
  if (y.size() != lo.size()) return false;
  for (size_t i = 0; i < lo.size(); ++i) {
    if (finite(lo[i]) && y[i] < lo[i] - slack) return false;
    if (finite(hi[i]) && y[i] > hi[i] + slack) return false;
  }
  return true;
}

Vec Chart::center(double fallback_halfwidth) const {
  Vec c(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    if (finite(lo[i]) && finite(hi[i]))
      c[i] = 0.5 * (lo[i] + hi[i]);
    else if (finite(lo[i]))
      c[i] = lo[i] + fallback_halfwidth;
    else if (finite(hi[i]))
      c[i] = hi[i] - fallback_halfwidth;
    else
      c[i] = 0.0;
  }
  return c;
}

Vec Overlap::sample_point() const {
  Vec c(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    if (finite(lo[i]) && finite(hi[i]))
      c[i] = 0.5 * (lo[i] + hi[i]);
    else if (finite(lo[i]))
      c[i] = lo[i] + 1.0;
    else if (finite(hi[i]))
      c[i] = hi[i] - 1.0;
    else
      c[i] = 0.0;
  }
  return c;
}

std::vector<int> ChartPath::chart_sequence() const {
  std::vector<int> seq;
  for (const auto& s : segments) seq.push_back(s.chart);
  if (closed && !seq.empty() && seq.back() != seq.front()) seq.push_back(seq.front());
  return seq;
}

std::vector<int> ChartPath::reduced_chart_sequence() const {
  std::vector<int> out;
  for (int c : chart_sequence())
    if (out.empty() || out.back() != c) out.push_back(c);
  return out;
}

void Atlas::finalize() {
  if (dim < 1 || dim > 2) throw std::invalid_argument("atlas: dimension must be 1 or 2");
  if (static_cast<int>(periods.size()) != dim) throw std::invalid_argument("atlas: periods size");
  if (charts.empty()) throw std::invalid_argument("atlas: no charts");
  for (const auto& ch : charts) {
    if (static_cast<int>(ch.lo.size()) != dim || static_cast<int>(ch.hi.size()) != dim)
      throw std::invalid_argument("atlas: chart box dimension mismatch");
    for (int i = 0; i < dim; ++i) {
      if (!(ch.lo[i] < ch.hi[i])) throw std::invalid_argument("atlas: empty chart box");
      if (periods[i] > 0) {
        if (!finite(ch.lo[i]) || !finite(ch.hi[i]))
          throw std::invalid_argument("atlas: infinite box on a periodic axis");
        if (ch.hi[i] - ch.lo[i] >= periods[i])
          throw std::invalid_argument("atlas: chart wider than the period");
      }
    }
  }

  overlaps_.clear();
  triples_.clear();
  const int n = static_cast<int>(charts.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      // Unique lattice shift s with box_a meeting box_b - s.
      std::vector<Vec> found_shifts;
      std::vector<std::pair<Vec, Vec>> found_boxes;
      std::vector<std::vector<long long>> axis_ks(dim);
      for (int i = 0; i < dim; ++i)
        axis_ks[i] = shift_candidates(charts[a].lo[i], charts[a].hi[i], charts[b].lo[i],
                                      charts[b].hi[i], periods[i]);
      // Cartesian product over axes (dim <= 2 keeps this tiny).
      std::vector<std::vector<long long>> combos{{}};
      for (int i = 0; i < dim; ++i) {
        std::vector<std::vector<long long>> next;
        for (const auto& c : combos)
          for (long long k : axis_ks[i]) {
            auto cc = c;
            cc.push_back(k);
            next.push_back(std::move(cc));
          }
        combos = std::move(next);
      }
      for (const auto& ks : combos) {
        Vec lo(dim), hi(dim), shift(dim);
        bool ok = true;
        for (int i = 0; i < dim; ++i) {
          const double s = periods[i] > 0 ? ks[i] * periods[i] : 0.0;
          shift[i] = -s;  // T_ab(y) = y + shift, y + shift in box_b
          lo[i] = std::max(charts[a].lo[i], charts[b].lo[i] + s);
          hi[i] = std::min(charts[a].hi[i], charts[b].hi[i] + s);
          if (!(hi[i] - lo[i] > 1e-9)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          found_shifts.push_back(shift);
          found_boxes.emplace_back(lo, hi);
        }
      }
      if (found_shifts.size() > 1)
        throw std::invalid_argument("atlas: disconnected overlap between charts " +
                                    std::to_string(a) + "," + std::to_string(b));
      if (found_shifts.size() == 1)
        overlaps_.push_back({a, b, found_shifts[0], found_boxes[0].first, found_boxes[0].second});
    }
  }

  // Triple overlaps (a < b < c), region in chart-a coordinates.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Overlap* oab = find_overlap(a, b);
      if (!oab) continue;
      for (int c = b + 1; c < n; ++c) {
        const Overlap* oac = find_overlap(a, c);
        const Overlap* obc = find_overlap(b, c);
        if (!oac || !obc) continue;
        Vec lo(dim), hi(dim);
        bool ok = true;
        for (int i = 0; i < dim; ++i) {
          lo[i] = std::max(oab->lo[i], oac->lo[i]);
          hi[i] = std::min(oab->hi[i], oac->hi[i]);
          if (!(hi[i] - lo[i] > 1e-9)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        // Shift composition must be consistent on a genuine triple overlap.
        for (int i = 0; i < dim; ++i)
          if (std::fabs(oab->shift[i] + obc->shift[i] - oac->shift[i]) > tol::geometry)
            throw std::logic_error("atlas: inconsistent shifts on a triple overlap");
        triples_.push_back({a, b, c, lo, hi});
      }
    }

  // Coverage check on a dense sample grid of the fundamental domain.
  std::vector<std::vector<double>> axis_samples(dim);
  for (int i = 0; i < dim; ++i) {
    double lo, hi;
    if (periods[i] > 0) {
      lo = 0;
      hi = periods[i];
    } else {
      lo = 1e300;
      hi = -1e300;
      for (const auto& ch : charts) {
        if (finite(ch.lo[i])) lo = std::min(lo, ch.lo[i]);
        if (finite(ch.hi[i])) hi = std::max(hi, ch.hi[i]);
      }
      if (lo > hi) {
        lo = -5;
        hi = 5;
      }
    }
    const int m = 41;
    for (int j = 0; j < m; ++j) axis_samples[i].push_back(lo + (hi - lo) * (j + 0.5) / m);
  }
  std::vector<Vec> grid{{}};
  for (int i = 0; i < dim; ++i) {
    std::vector<Vec> next;
    for (const auto& p : grid)
      for (double x : axis_samples[i]) {
        auto q = p;
        q.push_back(x);
        next.push_back(std::move(q));
      }
    grid = std::move(next);
  }
  for (const auto& u : grid)
    if (locate(u).empty()) throw std::invalid_argument("atlas: charts do not cover the manifold");

  if (!chart_contains(base_chart, base_coords))
    throw std::invalid_argument("atlas: base point outside its chart");
}

const Overlap* Atlas::find_overlap(int a, int b) const {
  for (const auto& o : overlaps_)
    if (o.a == a && o.b == b) return &o;
  return nullptr;
}

bool Atlas::charts_overlap(int a, int b) const { return find_overlap(a, b) != nullptr; }

bool Atlas::chart_contains(int chart, const Vec& y, double slack) const {
  if (chart < 0 || chart >= static_cast<int>(charts.size())) return false;
  return charts[chart].contains(y, slack);
}

std::vector<ManifoldPoint> Atlas::locate(const Vec& model_point) const {
  std::vector<ManifoldPoint> out;
  if (static_cast<int>(model_point.size()) != dim) return out;
  for (int b = 0; b < static_cast<int>(charts.size()); ++b) {
    Vec y = model_point;
    bool ok = true;
    for (int i = 0; i < dim && ok; ++i) {
      if (periods[i] > 0) {
        bool hit = false;
        const double L = periods[i];
        const long long kmin =
            static_cast<long long>(std::ceil((charts[b].lo[i] - tol::path - model_point[i]) / L));
        const long long kmax =
            static_cast<long long>(std::floor((charts[b].hi[i] + tol::path - model_point[i]) / L));
        for (long long k = kmin; k <= kmax && !hit; ++k) {
          const double v = model_point[i] + k * L;
          if (v >= charts[b].lo[i] - tol::path && v <= charts[b].hi[i] + tol::path) {
            y[i] = v;
            hit = true;
          }
        }
        ok = hit;
      } else {
        ok = (!finite(charts[b].lo[i]) || y[i] >= charts[b].lo[i] - tol::path) &&
             (!finite(charts[b].hi[i]) || y[i] <= charts[b].hi[i] + tol::path);
      }
    }
    if (ok) out.push_back({b, y});
  }
  return out;
}

ManifoldPoint Atlas::canonicalize(const ManifoldPoint& pt) const {
  if (pt.chart < 0 || pt.chart >= static_cast<int>(charts.size()))
    throw std::invalid_argument("canonicalize: bad chart index");
  auto reps = locate(pt.coords);
  if (reps.empty()) throw std::domain_error("canonicalize: point outside all charts");
  return reps.front();  // locate returns charts in ascending order
}

Vec Atlas::transition(int a, int b, const Vec& y) const {
  if (a == b) return y;
  const Overlap* o = find_overlap(a, b);
  if (!o) throw std::invalid_argument("transition: charts " + std::to_string(a) + "," +
                                      std::to_string(b) + " do not overlap");
  return vadd(y, o->shift);
}

double Atlas::model_distance(const Vec& u, const Vec& v) const {
  double m = 0;
  for (int i = 0; i < dim; ++i) {
    double d = u[i] - v[i];
    if (periods[i] > 0) {
      d = std::fmod(d, periods[i]);
      if (d > periods[i] / 2) d -= periods[i];
      if (d < -periods[i] / 2) d += periods[i];
    }
    m = std::max(m, std::fabs(d));
  }
  return m;
}

const Loop* Atlas::find_loop(const std::string& nm) const {
  for (const auto& l : generators)
    if (l.name == nm) return &l;
  for (const auto& l : named_loops)
    if (l.name == nm) return &l;
  return nullptr;
}

Loop Atlas::loop_power(const Loop& l, long long n) const {
  if (n == 0) {
    Vec p0 = l.curve(0.0);
    return {l.name + "^0", [p0](double) { return p0; }, 2,
            std::vector<long long>(l.pi1_class.size(), 0)};
  }
  const auto curve = l.curve;
  const Vec jump = vsub(curve(1.0), curve(0.0));  // lattice vector for loops
  const long long m = std::llabs(n);
  const bool rev = n < 0;
  auto fn = [curve, jump, m, rev](double t) {
    if (rev) t = 1.0 - t;
    double u = t * static_cast<double>(m);
    double fl = std::floor(u);
    if (fl >= static_cast<double>(m)) fl = static_cast<double>(m) - 1;  // t == 1 endpoint
    Vec p = curve(u - fl);
    for (size_t i = 0; i < p.size(); ++i) p[i] += fl * jump[i];
    if (rev) {
      // reversal in model coordinates, re-anchored at the original start
      for (size_t i = 0; i < p.size(); ++i)
        p[i] = p[i] - static_cast<double>(m) * jump[i];
    }
    return p;
  };
  std::vector<long long> cls(l.pi1_class.size());
  for (size_t i = 0; i < cls.size(); ++i) cls[i] = n * l.pi1_class[i];
  return {l.name + "^" + std::to_string(n), fn, static_cast<int>(m) * l.default_samples, cls};
}

Loop Atlas::loop_concat(const Loop& l1, const Loop& l2) const {
  const auto c1 = l1.curve, c2 = l2.curve;
  const Vec off = vsub(c1(1.0), c2(0.0));
  if (model_distance(c1(1.0), c2(0.0)) > tol::path)
    throw std::invalid_argument("loop_concat: loops not based at the same point");
  auto fn = [c1, c2, off](double t) {
    if (t <= 0.5) return c1(2.0 * t);
    Vec p = c2(2.0 * t - 1.0);
    return vadd(p, off);
  };
  std::vector<long long> cls(std::max(l1.pi1_class.size(), l2.pi1_class.size()), 0);
  for (size_t i = 0; i < l1.pi1_class.size(); ++i) cls[i] += l1.pi1_class[i];
  for (size_t i = 0; i < l2.pi1_class.size(); ++i) cls[i] += l2.pi1_class[i];
  return {l1.name + "*" + l2.name, fn, l1.default_samples + l2.default_samples, cls};
}

ChartPath Atlas::subdivide(const std::function<Vec(double)>& curve, int n_samples) const {
  if (n_samples < 2) throw std::invalid_argument("subdivide: need at least 2 samples");
  std::vector<Vec> u(n_samples);
  std::vector<double> ts(n_samples);
  for (int j = 0; j < n_samples; ++j) {
    ts[j] = static_cast<double>(j) / (n_samples - 1);
    u[j] = curve(ts[j]);
    if (static_cast<int>(u[j].size()) != dim)
      throw std::invalid_argument("subdivide: curve dimension mismatch");
  }

  auto reps0 = locate(u[0]);
  if (reps0.empty()) throw std::domain_error("subdivide: curve leaves the manifold charts");
  ChartPath path;
  int cur = reps0.front().chart;
  Vec offset = vsub(reps0.front().coords, u[0]);  // lattice offset into the chart box
  PathSegment seg{cur, {reps0.front().coords}, ts[0], ts[0]};

  for (int j = 0; j + 1 < n_samples; ++j) {
    Vec next_y = vadd(u[j + 1], offset);
    if (chart_contains(cur, next_y)) {
      seg.samples.push_back(next_y);
      seg.t1 = ts[j + 1];
      continue;
    }
    // Breakpoint: lowest chart containing both neighbouring samples with a
    // common lattice offset.
    bool placed = false;
    for (int b = 0; b < static_cast<int>(charts.size()) && !placed; ++b) {
      for (const auto& rep : locate(u[j])) {
        if (rep.chart != b) continue;
        Vec off2 = vsub(rep.coords, u[j]);
        Vec nxt = vadd(u[j + 1], off2);
        if (chart_contains(b, nxt)) {
          if (seg.samples.size() > 1) path.segments.push_back(seg);
          seg = PathSegment{b, {rep.coords, nxt}, ts[j], ts[j + 1]};
          cur = b;
          offset = off2;
          placed = true;
          break;
        }
      }
    }
    if (!placed)
      throw std::domain_error(
          "subdivide: adjacent samples share no chart; raise the sample count");
  }
  path.segments.push_back(seg);
  path.closed = model_distance(u.front(), u.back()) < tol::path;
  if (path.closed && path.back_chart() != path.front_chart() &&
      !charts_overlap(path.back_chart(), path.front_chart()))
    throw std::domain_error("subdivide: loop closure crosses non-overlapping charts");
  return path;
}

ChartPath Atlas::subdivide(const Loop& loop) const {
  return subdivide(loop.curve, loop.default_samples);
}

Atlas builtin_atlas(const std::string& name, const AtlasParams& params) {
  if (params.pad <= 0 || params.pad >= 0.5)
    throw std::invalid_argument("builtin_atlas: pad fraction must lie in (0, 1/2)");
  const int n = params.charts;
  const double inf = std::numeric_limits<double>::infinity();
  Atlas A;
  A.name = name;

  auto angular_boxes = [&](double period) {
    if (n < 3) throw std::invalid_argument("builtin_atlas: circle-like manifolds need >= 3 charts");
    const double d = period / n;
    std::vector<std::pair<double, double>> boxes;
    for (int a = 0; a < n; ++a) boxes.emplace_back(a * d, a * d + d * (1.0 + params.pad));
    return boxes;
  };

  if (name == "circle") {
    A.dim = 1;
    A.periods = {kTwoPi};
    A.coord_names = {"theta"};
    for (auto [lo, hi] : angular_boxes(kTwoPi)) A.charts.push_back({{lo}, {hi}});
    A.base_chart = 0;
    A.base_coords = {0.0};
    A.generators.push_back({"gen0", [](double t) { return Vec{kTwoPi * t}; }, 256, {1}});
  } else if (name == "cylinder") {
    A.dim = 2;
    A.periods = {kTwoPi, 0.0};
    A.coord_names = {"theta", "p"};
    for (auto [lo, hi] : angular_boxes(kTwoPi)) A.charts.push_back({{lo, -inf}, {hi, inf}});
    A.base_chart = 0;
    A.base_coords = {0.0, 0.0};
    A.generators.push_back({"gen0", [](double t) { return Vec{kTwoPi * t, 0.0}; }, 256, {1}});
  } else if (name == "torus") {
    A.dim = 2;
    A.periods = {kTwoPi, kTwoPi};
    A.coord_names = {"theta1", "theta2"};
    auto boxes = angular_boxes(kTwoPi);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        A.charts.push_back({{boxes[i].first, boxes[j].first}, {boxes[i].second, boxes[j].second}});
    A.base_chart = 0;
    A.base_coords = {0.0, 0.0};
    A.generators.push_back({"gen0", [](double t) { return Vec{kTwoPi * t, 0.0}; }, 256, {1, 0}});
    A.generators.push_back({"gen1", [](double t) { return Vec{0.0, kTwoPi * t}; }, 256, {0, 1}});
  } else if (name == "annulus") {
    A.dim = 2;
    A.periods = {kTwoPi, 0.0};
    A.coord_names = {"theta", "r"};
    const double r0 = params.annulus_r0, r1 = params.annulus_r1;
    if (!(r0 < r1)) throw std::invalid_argument("builtin_atlas: annulus needs r0 < r1");
    for (auto [lo, hi] : angular_boxes(kTwoPi)) A.charts.push_back({{lo, r0}, {hi, r1}});
    const double rmid = 0.5 * (r0 + r1);
    A.base_chart = 0;
    A.base_coords = {0.0, rmid};
    A.generators.push_back(
        {"gen0", [rmid](double t) { return Vec{kTwoPi * t, rmid}; }, 256, {1}});
    const double ra = r0 + 0.25 * (r1 - r0), rb = r0 + 0.75 * (r1 - r0);
    A.named_loops.push_back(
        {"gen0_inner", [ra](double t) { return Vec{kTwoPi * t, ra}; }, 256, {1}});
    A.named_loops.push_back(
        {"gen0_outer", [rb](double t) { return Vec{kTwoPi * t, rb}; }, 256, {1}});
    A.named_loops.push_back({"gen0_wavy",
                             [rmid, r1, r0](double t) {
                               return Vec{kTwoPi * t,
                                          rmid + 0.2 * (r1 - r0) * std::sin(kTwoPi * t)};
                             },
                             512,
                             {1}});
  } else if (name == "plane") {
    A.dim = 2;
    A.periods = {0.0, 0.0};
    A.coord_names = {"x", "y"};
    A.charts.push_back({{-inf, -inf}, {inf, inf}});
    A.base_chart = 0;
    A.base_coords = {0.0, 0.0};
  } else {
    throw std::invalid_argument("builtin_atlas: unknown manifold '" + name + "'");
  }
  A.finalize();
  return A;
}

std::pair<Vec, Vec> product_loop_homotopy(const std::function<Vec(double)>& lambda,
                                          const std::function<Vec(double)>& mu, double s,
                                          double t) {
  if (s < 0 || s > 1 || t < 0 || t > 1)
    throw std::invalid_argument("product_loop_homotopy: s,t must lie in [0,1]");
  const Vec x = lambda(0.0);
  const Vec y = mu(0.0);
  const double denom = 1.0 - s / 2.0;
  if (t < s / 2.0) return {x, mu(t / denom)};
  if (t < 1.0 - s / 2.0) return {lambda((t - s / 2.0) / denom), mu(t / denom)};
  return {lambda((t - s / 2.0) / denom), y};
}

}  // namespace symcov
