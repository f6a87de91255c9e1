#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symcov/common.hpp"

namespace symcov {

/// An open coordinate box. Bounds may be +-infinity on non-periodic axes.
/// Membership tests accept the closure within tol::path, so base points that
/// sit exactly on a cut (the circle's theta = 0) are valid chart points.
struct Chart {
  Vec lo, hi;
  bool contains(const Vec& y, double slack = tol::path) const;
  Vec center(double fallback_halfwidth = 1.0) const;
};

/// A declared chart overlap with its coordinate-shift transition
/// T_ab(y) = y + shift (chart-a coordinates -> chart-b coordinates).
/// Transitions are rigid lattice shifts, so Jacobians are identically one and
/// the Cech transition constants are well defined.
struct Overlap {
  int a = -1, b = -1;
  Vec shift;
  Vec lo, hi;  // overlap box in chart-a coordinates
  Vec sample_point() const;
};

struct ManifoldPoint {
  int chart = -1;
  Vec coords;
};

/// Piecewise-chart polyline path. Consecutive segment endpoints agree under
/// the declared transitions (within tol::path); a Loop additionally has equal
/// endpoints after canonicalization.
struct PathSegment {
  int chart = -1;
  std::vector<Vec> samples;  // chart-local coordinates
  double t0 = 0, t1 = 1;
};

struct ChartPath {
  std::vector<PathSegment> segments;
  bool closed = false;

  const Vec& front() const { return segments.front().samples.front(); }
  const Vec& back() const { return segments.back().samples.back(); }
  int front_chart() const { return segments.front().chart; }
  int back_chart() const { return segments.back().chart; }
  /// Segment charts; for loops the leading chart is repeated at the end, so
  /// the sequence matches the closed word a(0),...,a(n),a(0) of the holonomy
  /// product.
  std::vector<int> chart_sequence() const;
  std::vector<int> reduced_chart_sequence() const;  // immediate repeats removed
};

/// A named parametric loop on the manifold, given in model coordinates.
/// `pi1_class` declares its homotopy class as exponents of the atlas
/// generators (used by homotopy-invariance checks).
struct Loop {
  std::string name;
  std::function<Vec(double)> curve;  // t in [0,1] -> model coordinates
  int default_samples = 256;
  std::vector<long long> pi1_class;
};

/// Chart atlas for the built-in base manifolds. Charts are open boxes placed
/// in a global "model" coordinate space R^dim; periodic axes identify
/// coordinates modulo `periods[axis]` (0 marks a non-periodic axis). A chart
/// box may extend past one period (the circle's last arc), and transitions
/// between charts are the unique lattice shifts relating their placements.
class Atlas {
 public:
  int dim = 0;
  Vec periods;  // per axis; 0 = non-periodic
  std::vector<Chart> charts;
  int base_chart = 0;
  Vec base_coords;
  std::vector<Loop> generators;
  std::vector<Loop> named_loops;  // extra loops with declared classes
  std::string name;
  std::vector<std::string> coord_names;

  /// Computes overlaps/validates; call after filling the fields above.
  void finalize();

  const std::vector<Overlap>& overlaps() const { return overlaps_; }
  const Overlap* find_overlap(int a, int b) const;  // oriented
  bool charts_overlap(int a, int b) const;
  /// Triple overlaps (a < b < c) together with the region in chart-a coords.
  struct Triple {
    int a, b, c;
    Vec lo, hi;
  };
  const std::vector<Triple>& triples() const { return triples_; }

  bool chart_contains(int chart, const Vec& y, double slack = tol::path) const;
  /// All (chart, chart-local coords) representations of a model point.
  std::vector<ManifoldPoint> locate(const Vec& model_point) const;
  ManifoldPoint canonicalize(const ManifoldPoint& pt) const;
  Vec transition(int a, int b, const Vec& y) const;
  /// Wrap-aware distance between model points.
  double model_distance(const Vec& u, const Vec& v) const;
  ManifoldPoint base_point() const { return {base_chart, base_coords}; }

  const Loop* find_loop(const std::string& name) const;
  Loop loop_power(const Loop& l, long long n) const;          // n-fold traversal (n<0 reverses)
  Loop loop_concat(const Loop& l1, const Loop& l2) const;     // l1 then l2

  ChartPath subdivide(const std::function<Vec(double)>& curve, int n_samples) const;
  ChartPath subdivide(const Loop& loop) const;

 private:
  std::vector<Overlap> overlaps_;
  std::vector<Atlas::Triple> triples_;
};

struct AtlasParams {
  int charts = 3;         // per periodic axis
  double pad = 0.25;      // overlap fraction of the chart spacing
  double annulus_r0 = 1.0;
  double annulus_r1 = 2.0;
};

/// Built-in atlases: circle, cylinder, torus, annulus, plane.
Atlas builtin_atlas(const std::string& name, const AtlasParams& params = {});

/// The explicit product-loop homotopy h(s,t) between lambda x mu and
/// ({x} x mu) * (lambda x {y}): three-branch formula, evaluated exactly.
/// Returns the pair (X-factor point, Y-factor point).
std::pair<Vec, Vec> product_loop_homotopy(const std::function<Vec(double)>& lambda,
                                          const std::function<Vec(double)>& mu, double s, double t);

}  // namespace symcov
