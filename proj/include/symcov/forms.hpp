#pragma once

#include <functional>
#include <optional>
#include <string>

#include "symcov/covering.hpp"

namespace symcov {

/// Chart-local 1-form: one coefficient function per coordinate. Coefficients
/// take chart-local (= model) coordinates; they must agree across overlaps
/// under the shift transitions.
struct OneForm {
  std::function<Vec(int chart, const Vec& y)> coeff;
  bool declared_closed = true;
  std::string name;

  static OneForm global(std::function<Vec(const Vec&)> fn, bool closed = true,
                        std::string name = {});
  Vec eval(int chart, const Vec& y) const { return coeff(chart, y); }
};

/// 2-form f * dx0 ^ dx1 on a 2d atlas (closed automatically; nondegenerate
/// when |f| > 0).
struct TwoForm {
  std::function<double(int chart, const Vec& y)> coeff;
  std::string name;

  static TwoForm constant(double f, std::string name = {});
  double eval(int chart, const Vec& y) const { return coeff(chart, y); }
};

struct FormValidation {
  double overlap_residual = 0;     // sup |coef_a - coef_b o T_ab| over samples
  double closedness_residual = 0;  // sup finite-difference curl (2d)
  bool pass = true;
};

/// Samples overlap agreement (< 1e-10) and, when declared closed, the
/// finite-difference curl (< tol::fd). Declared-closed forms failing the curl
/// check are rejected by the constructors below.
FormValidation validate_one_form(const Atlas& atlas, const OneForm& alpha, int samples_per_box = 5);
FormValidation validate_two_form(const Atlas& atlas, const TwoForm& omega, int samples_per_box = 5);

/// Composite Gauss-Legendre line integral of alpha along the path (5-point
/// panels; at least `min_panels` panels per path segment).
double integrate_path(const OneForm& alpha, const ChartPath& path, int min_panels = 64);

/// The period homomorphism c: D -> R of a closed 1-form. Values on the free
/// generators come from generator-loop quadrature; torsion elements map to 0
/// (and their generator loops must integrate to 0, else the form is
/// incompatible with the cocycle).
struct PeriodMap {
  DeckGroup group;
  std::vector<double> generator_values;  // FreeAbelian only

  double value(const GroupElement& d) const;
};

PeriodMap period_homomorphism(const OneForm& alpha, const Covering& cov);

/// Multi-valued potential (g_ab; f_{a,d}) of a closed 1-form:
///   f_{a,d}(y) = phi_a(y) + K_a + c(d),
/// with phi_a the straight-segment integral from the chart anchor and the
/// chart constants K_a propagated over a spanning tree of the nerve so that
/// f_{a,e} = f_{b,e} + c(g_ab) on overlaps, normalized f_{a0,e}(y_base) = 0.
struct MultiValuedPotential {
  Covering cov;
  OneForm alpha;
  PeriodMap period;
  std::vector<Vec> anchors;
  std::vector<double> chart_const;
  double tree_cycle_residual = 0;  // closure defect on non-tree nerve edges

  double base_potential(int a, const Vec& y) const;  // f_{a,e}
  double eval_branch(int a, const GroupElement& d, const Vec& y) const;
  /// F(x) = f_{a,d}(y) for x = i_a(d, y): the potential on the cover.
  double cover_value(const CoverPoint& x) const;
};

MultiValuedPotential build_multivalued_potential(const OneForm& alpha, const Covering& cov);

struct RegaugeResult {
  MultiValuedPotential potential;   // satisfies (A1-A3) w.r.t. the regauged cocycle
  CechCochain0 k;                   // g'_ab * k_b = k_a * g_ab
  CechCocycle1 regauged_cocycle;    // h^-1 g h
  /// k_{a0} may range in the coset h_{a0}^-1 * center(D); the returned
  /// potential used `k_base_choice`.
  GroupElement k_base_choice;
  Center freedom_coset_center;
  double real_constant = 0;  // f'_{a,d} = f_{a,d*k_a} + const; fixed to 0 here
};

/// Re-expresses a potential with respect to the cohomologous cocycle
/// h^-1 g h. The 0-cochain k is propagated from its base-chart value over the
/// nerve via g'_ab k_b = k_a g_ab.
RegaugeResult regauge_potential(const MultiValuedPotential& P, const CechCochain0& h,
                                std::optional<GroupElement> k_base = std::nullopt);

/// Exterior-derivative residual |d f_{a,d} - alpha| by central differences.
double potential_gradient_residual(const MultiValuedPotential& P, int a, const Vec& y,
                                   double step = 1e-6);

}  // namespace symcov
