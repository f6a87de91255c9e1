#pragma once

#include <functional>
#include <optional>

#include "symcov/cech.hpp"

namespace symcov {

/// A point of the identification space X = sqcup_a (D x V_a) / ~ with
/// (a, d, y) ~ (b, d*g_ab, T_ab(y)). Canonical form uses the lowest chart
/// index containing the underlying base point.
struct CoverPoint {
  int chart = -1;
  GroupElement deck;
  Vec coords;
};

/// A D-covering of a base atlas built from a 1-Cech-cocycle.
struct Covering {
  Atlas atlas;
  DeckGroup deck;
  CechCocycle1 cocycle;
  CoverPoint base;

  CoverPoint make_point(int chart, const GroupElement& d, Vec coords) const;
  CoverPoint canonical(const CoverPoint& x) const;
  /// Re-express x in chart b (requires the underlying point to lie in b).
  CoverPoint rechart(const CoverPoint& x, int b) const;
  ManifoldPoint project(const CoverPoint& x) const;
  CoverPoint deck_act(const GroupElement& d, const CoverPoint& x) const;
  bool same_point(const CoverPoint& x, const CoverPoint& y) const;

  /// Holonomy of the cocycle along each atlas pi1 generator equals the
  /// matching standard generator of D (the executable form of "the associated
  /// homomorphism is inner"; for abelian D this is rho = id).
  bool simply_connected_cover() const;

  /// True when the cocycle is the canonical one induced by the chart
  /// placements in model space (g_ab = -shift_ab/L on periodic axes). Such
  /// coverings carry a global "unrolled" model coordinate system.
  bool canonical_unroll() const;
  Vec to_model(const CoverPoint& x) const;
  CoverPoint from_model(const Vec& u) const;
};

/// The covering whose cocycle is induced by the chart placement itself; for
/// the builtin atlases this is the universal covering (deck group Z^k with
/// one factor per periodic axis).
Covering canonical_covering(const Atlas& atlas);
/// Same atlas/deck with a caller-supplied cocycle; base point upstairs is
/// i_{a0}(e, y_base).
Covering covering_from_cocycle(const Atlas& atlas, const DeckGroup& deck,
                               const CechCocycle1& cocycle);

/// Unique path lift through the covering: deck labels update by right
/// multiplication with g_ab at every chart switch (and by the closing factor
/// g_{an a0} for loops, so a lifted loop ends in its starting chart).
struct CoverPath {
  std::vector<CoverPoint> samples;  // one per path sample, segment order
  CoverPoint endpoint;
};
CoverPath lift_path(const Covering& cov, const ChartPath& path, const CoverPoint& start);

/// The unique d with lift(loop) endpoint = d * base; equals the cocycle
/// holonomy of the loop.
GroupElement loop_deck_element(const Covering& cov, const ChartPath& loop, const CoverPoint& base);

/// Deck element delta with to = delta * from (both must project to the same
/// base point).
GroupElement deck_between(const Covering& cov, const CoverPoint& from, const CoverPoint& to);

/// Labels within the enumeration window |d_i| <= W (all labels for finite D).
std::vector<GroupElement> deck_window(const DeckGroup& deck, int W);

// ---------------------------------------------------------------------------
// Intermediate covers Z = X/H for subgroups H of D.

struct IntermediateCovering {
  Covering parent;
  std::vector<GroupElement> subgroup_gens;
  bool finite_index = true;
  /// Canonical (lexicographically smallest) representatives d0 of the cosets
  /// H*d; for infinite index (H = {e} in Z^k) representatives are produced on
  /// demand and this list covers the deck window only.
  std::vector<GroupElement> coset_reps;

  bool in_subgroup(const GroupElement& d) const;
  /// Canonical representative of the coset H*d.
  GroupElement coset_rep(const GroupElement& d) const;
  int coset_index(const GroupElement& d) const;  // index into coset_reps, -1 if absent
  /// h component of d = h * d0 relative to the canonical representative.
  GroupElement subgroup_part(const GroupElement& d) const;

  /// Induced H-valued cocycle on the Z-charts (a,[d0]):
  /// ghat_{a,[d0]; b,[d0']} = d0 * g_ab * d0'^-1, defined when the cosets
  /// match ([d0 * g_ab] = [d0']).
  std::optional<GroupElement> ghat(int a, const GroupElement& d0_a, int b,
                                   const GroupElement& d0_b) const;

  // Projections p = q o r: r: X -> Z forgets to the coset, q: Z -> Y.
  // Z-points are represented as (chart a, coset rep d0, base coords y).
  struct ZPoint {
    int chart;
    GroupElement coset_rep;
    Vec coords;
  };
  ZPoint r_project(const CoverPoint& x) const;
  ManifoldPoint q_project(const ZPoint& z) const;
  /// j_{a,[d0]}(h, k_a([d0], y)) = i_a(h*d0, y).
  CoverPoint j_trivialization(const GroupElement& h, const ZPoint& z) const;

  /// For axis-aligned finite-index subgroups m_1 Z x ... x m_k Z of Z^k over a
  /// canonical covering, the intermediate space is itself one of the builtin
  /// model manifolds: per-axis subgroup indices.
  std::optional<std::vector<long long>> axis_indices() const;
};

IntermediateCovering build_intermediate_cover(const Covering& cov,
                                              std::vector<GroupElement> subgroup_gens, int window = 3);

// ---------------------------------------------------------------------------
// Cotangent points and cotangent extensions of diffeomorphisms.

/// Point of T*Y: base point plus covector components in chart coordinates.
/// Chart transitions are rigid shifts, so covector components are unchanged
/// across charts (inverse-transpose of the identity Jacobian).
struct CotangentPoint {
  ManifoldPoint base;
  Vec covector;
};

/// A diffeomorphism given chart-locally as an affine map on model coordinates
/// with constant Jacobian: y -> jac*y + offset (catalog maps: rotations,
/// boosts, translations, reflections, covering projections).
struct Diffeo {
  std::function<Vec(const Vec&)> map;      // model coordinates -> model coordinates
  std::function<Vec(const Vec&)> inverse;  //
  Mat jacobian;                            // constant
};

Diffeo identity_diffeo(int dim);
Diffeo compose_diffeo(const Diffeo& f, const Diffeo& g);  // f after g

enum class CotangentMode { Extend, CoveringProjection };

/// mode Extend: (*f)(m, p) = (f(m), (f^-1)* p) for a base diffeomorphism f.
/// mode CoveringProjection: *p for the covering projection, taking cotangent
/// points over the cover (base given in cover-model coordinates) to T*Y.
CotangentPoint cotangent_map(const Atlas& atlas, const Diffeo& f, const CotangentPoint& x);
CotangentPoint cotangent_project(const Covering& cov, const Vec& cover_model_base,
                                 const Vec& covector);

/// Canonical 1-form pairing <theta, V> = <p, tau_* V> at a cotangent point,
/// where V is a tangent vector of T*Y with components (v_base, v_covector).
double canonical_one_form_pairing(const CotangentPoint& x, const Vec& v_base,
                                  const Vec& v_covector);

}  // namespace symcov
