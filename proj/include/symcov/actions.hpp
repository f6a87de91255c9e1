#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symcov/covering.hpp"
#include "symcov/forms.hpp"

namespace symcov {

/// Component group of a Lie group model: a small multiplication table with
/// named representatives. Index 0 is the identity component.
struct ComponentTable {
  std::vector<std::vector<int>> mul = {{0}};
  std::vector<std::string> names = {"e"};

  int size() const { return static_cast<int>(mul.size()); }
  int compose(int a, int b) const { return mul[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  int inverse(int a) const;
  int index_of(const std::string& name) const;
};

/// A Lie group as semidirect product G = G0 (.) Ds: an abelian identity
/// component (R^k, or the circle for k = 1) and a finite component group with
/// chosen representatives. Coadjoint matrices and the component automorphisms
/// a(kappa) of G0 default to the identity.
struct LieGroupModel {
  int dim = 0;            // algebra dimension
  bool circle = false;    // identity component is S^1 (dim == 1)
  ComponentTable components;
  std::vector<Mat> coadjoint;   // per component
  std::vector<Mat> comp_auto;   // a(kappa) acting on G0 parameters

  void finalize();  // fills defaults, validates shapes
  Mat coad(int comp) const { return coadjoint[static_cast<size_t>(comp)]; }
};

struct GElem {
  int comp = 0;
  Vec param;  // length = model dim
};

GElem g_identity(const LieGroupModel& G);
GElem g_compose(const LieGroupModel& G, const GElem& a, const GElem& b);
GElem g_inverse(const LieGroupModel& G, const GElem& a);
bool g_equal(const LieGroupModel& G, const GElem& a, const GElem& b, double eps = tol::geometry);

/// A (left) action of G on the base manifold, chart-local via model
/// coordinates. Catalog actions provide analytic induced vector fields; a
/// missing `induced` falls back to central finite differences in the group
/// parameter (step 1e-6).
struct GroupAction {
  LieGroupModel model;
  std::string name;
  std::function<Vec(const GElem&, const Vec&)> map_model;
  std::function<Vec(int basis, const Vec&)> induced;  // may be null
  std::function<Mat(const GElem&)> jacobian;          // constant per element; identity default

  Vec act_model(const GElem& g, const Vec& y) const { return map_model(g, y); }
  ManifoldPoint act(const Atlas& atlas, const GElem& g, const ManifoldPoint& pt) const;
  Vec induced_field(int basis, const Vec& y) const;
  Mat jac(const GElem& g) const;
};

/// Built-in action catalog: rotation | boost | screw | half_turn | reflection
/// | plane_translations. `screw` is the R^2 rotation+boost action on the
/// cylinder; rotation takes `circle_group = true` for the obstructed S^1
/// parametrization.
GroupAction catalog_action(const std::string& type, const Atlas& atlas,
                           bool circle_group = false);

struct ActionValidation {
  double identity_residual = 0;
  double composition_residual = 0;
  double pullback_residual = 0;  // |Phi_g^* omega - omega|, when omega given
  bool pass = true;
};
ActionValidation validate_action(const Atlas& atlas, const GroupAction& action,
                                 const TwoForm* omega, uint64_t seed = 0);

/// Deck element of the orbit loop t -> Phi(lambda(t), y) for a loop lambda at
/// e in G0; the lift for the corresponding generator exists iff this is e.
GroupElement action_obstruction(const GroupAction& action, const Covering& cov,
                                const std::function<Vec(double)>& loop_in_G,
                                const ManifoldPoint& y, int samples = 256);

/// Lift choice for one non-identity component: a named catalog cover map with
/// a deck offset (half_turn: u -> u + pi + 2*pi*offset; reflection:
/// u -> -u + 2*pi*offset).
struct ComponentLift {
  std::string map;       // catalog name
  long long deck_offset = 0;
};

/// A lift of a group action to a covering, satisfying (L1) p o Phi_hat =
/// Phi o (id x p) and (L2) Phi_hat_e = id. G0 elements lift by unique path
/// lifting of the orbit path; non-identity components use the configured
/// cover maps (the deck choice per component is explicit).
class LiftedAction {
 public:
  LiftedAction(GroupAction action, Covering cov,
               std::vector<std::optional<ComponentLift>> component_lifts = {},
               int path_samples = 256);

  const GroupAction& action() const { return action_; }
  const Covering& covering() const { return cov_; }

  CoverPoint apply(const GElem& g, const CoverPoint& x) const;
  CoverPoint apply_inverse(const GElem& g, const CoverPoint& x) const;
  /// Sheet shift psi_b(g, y): apply(g, i_a(e,y)) = i_b(psi_b, Phi_g(y)).
  GroupElement sheet_shift(const GElem& g, const ManifoldPoint& y, int* out_chart = nullptr) const;

 private:
  GroupAction action_;
  Covering cov_;
  std::vector<std::optional<ComponentLift>> comp_lifts_;
  int path_samples_;
  GroupElement norm_;  // (L2) normalization: post-composed deck correction

  CoverPoint apply_component_rep(int comp, const CoverPoint& x) const;
  friend LiftedAction with_alternate_component_lift(const LiftedAction&, int comp,
                                                    long long deck_offset);
};

/// Same lift with the deck offset of one component replaced (an "alternate
/// lift" differing by a deck transformation on that component).
LiftedAction with_alternate_component_lift(const LiftedAction& lift, int comp,
                                           long long deck_offset);

/// Gamma(g,h) = phi_hat_g o phi_hat_h o phi_hat_{gh}^-1, a deck element;
/// constant on component pairs (checked by re-evaluation at sample points).
GroupElement gamma_cocycle(const LiftedAction& lift, const GElem& g, const GElem& h,
                           int check_samples = 5);

/// b(g): gamma -> phi_hat_g o gamma o phi_hat_g^-1, a deck automorphism.
GroupHom b_conjugation(const LiftedAction& lift, const GElem& g, int check_samples = 5);

/// eta(g) = phi'_hat_g o phi_hat_g^-1 for two lifts of the same action.
GroupElement lift_difference(const LiftedAction& lift1, const LiftedAction& lift2,
                             const GElem& g);

// ---------------------------------------------------------------------------
// The extension G~ of G by the deck group.

/// Cached per-component b and Gamma tables of a lift (theorem: both descend
/// to the component group).
struct ExtensionContext {
  const LiftedAction* lift = nullptr;
  std::vector<GroupHom> b_comp;                      // per component
  std::vector<std::vector<GroupElement>> gamma_comp; // per component pair
};
ExtensionContext make_extension_context(const LiftedAction& lift);

struct ExtensionElement {
  GroupElement deck;
  GElem g;
};

/// (gamma, g)(gamma', g') = (gamma * b(g)gamma' * Gamma(g,g'), g g').
ExtensionElement extension_compose(const ExtensionContext& ctx, const ExtensionElement& u,
                                   const ExtensionElement& v);
/// (gamma, g)^-1 = (b(g)^-1[gamma^-1 * Gamma(g, g^-1)^-1], g^-1).
ExtensionElement extension_inverse(const ExtensionContext& ctx, const ExtensionElement& u);
bool extension_equal(const ExtensionContext& ctx, const ExtensionElement& u,
                     const ExtensionElement& v);
/// Action of (gamma, g) on the cover: gamma o phi_hat_g.
CoverPoint extension_act(const ExtensionContext& ctx, const ExtensionElement& u,
                         const CoverPoint& x);

// ---------------------------------------------------------------------------
// Group-cohomology coboundary operators (arity <= 2 cochains).

/// D-valued cohomology on G (requires abelian D); the G-action on D is b.
struct DValuedCochains {
  const ExtensionContext* ctx;
  GroupElement apply_b(const GElem& g, const GroupElement& d) const;

  using C0 = GroupElement;
  using C1 = std::function<GroupElement(const GElem&)>;
  using C2 = std::function<GroupElement(const GElem&, const GElem&)>;
  using C3 = std::function<GroupElement(const GElem&, const GElem&, const GElem&)>;
  C1 delta0(const C0& a0) const;
  C2 delta1(const C1& a1) const;
  C3 delta2(const C2& a2) const;
};

/// g*-valued cohomology on G; the action is the coadjoint representation.
struct GStarCochains {
  LieGroupModel model;

  using C0 = Vec;
  using C1 = std::function<Vec(const GElem&)>;
  using C2 = std::function<Vec(const GElem&, const GElem&)>;
  using C3 = std::function<Vec(const GElem&, const GElem&, const GElem&)>;
  C1 delta0(const C0& a0) const;
  C2 delta1(const C1& a1) const;
  C3 delta2(const C2& a2) const;
};

/// Function-valued (0-form) cohomology on D: cochains map deck tuples to
/// functions on the cover; D acts on the right by pullback (precomposition
/// with the deck action).
struct FormValuedCochains {
  const Covering* cov;

  using XFunc = std::function<double(const CoverPoint&)>;
  using C0 = XFunc;
  using C1 = std::function<XFunc(const GroupElement&)>;
  using C2 = std::function<XFunc(const GroupElement&, const GroupElement&)>;
  using C3 = std::function<XFunc(const GroupElement&, const GroupElement&, const GroupElement&)>;
  XFunc pullback(const GroupElement& gamma, const XFunc& f) const;
  C1 delta0(const C0& a0) const;
  C2 delta1(const C1& a1) const;
  C3 delta2(const C2& a2) const;
};

}  // namespace symcov
