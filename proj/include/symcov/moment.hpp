#pragma once

#include "symcov/actions.hpp"

namespace symcov {

/// Local moment map (g_ab; J_{a,d}) of a symplectic action: per algebra basis
/// element A_i a multi-valued potential of -(A~_i -| omega), sharing the
/// action's covering. Branch law: <J_{a,d}, A_i> = <J_{a,e}, A_i> + c_i(d)
/// with c_i(d) = -loop integral of A~_i -| omega.
struct LocalMomentMap {
  Covering cov;
  GroupAction action;
  TwoForm omega;
  std::vector<MultiValuedPotential> potentials;  // one per basis element

  int algebra_dim() const { return static_cast<int>(potentials.size()); }
  double branch(int a, const GroupElement& d, const Vec& y, int basis) const;
  Vec branch_vec(int a, const GroupElement& d, const Vec& y) const;
  double branch_pair(int a, const GroupElement& d, const Vec& y, const Vec& algebra) const;
  const PeriodMap& period(int basis) const { return potentials[static_cast<size_t>(basis)].period; }
  Vec period_vec(const GroupElement& d) const;
};

/// View of the same data as the global moment map on the cover,
/// <J_hat(x), A_i> = J_{a,d}(y) for x = i_a(d, y); normalized to 0 at the
/// cover base point shifted by `offset`.
struct GlobalMomentMap {
  const LocalMomentMap* local = nullptr;
  Vec offset;  // X-constant linear map L added to the raw branches

  Vec eval(const CoverPoint& x) const;
};

/// The 1-form beta_A = A~ -| omega for a basis element of the action algebra.
OneForm induced_contraction_form(const GroupAction& action, const TwoForm& omega, int basis);

struct MomentBuildReport {
  double closedness_residual = 0;   // max over basis elements
  double defining_residual = 0;     // |A~ -| omega + d<J,A>| by central differences
  double glueing_residual = 0;      // overlap samples
};

/// Builds the local moment map. Fails when the contraction forms are not
/// closed (action not symplectic) or the cocycle does not describe a simply
/// connected cover.
LocalMomentMap build_local_moment_map(const GroupAction& action, const TwoForm& omega,
                                      const Covering& cov, MomentBuildReport* report = nullptr,
                                      int residual_samples = 40);

/// alpha(g) = J_hat o Phi_hat_g - Ad*(g) J_hat, verified constant over the
/// sample set; delta(alpha) = 0 is the cocycle identity.
struct EquivarianceCocycle {
  const GlobalMomentMap* moment = nullptr;
  const LiftedAction* lift = nullptr;
  std::vector<CoverPoint> samples;
  mutable double last_spread = 0;

  Vec alpha(const GElem& g) const;
  /// |Ad*(g) alpha(h) - alpha(gh) + alpha(g)| on the given pairs.
  double cocycle_residual(const std::vector<std::pair<GElem, GElem>>& pairs) const;
};

EquivarianceCocycle equivariance_cocycle(const GlobalMomentMap& J, const LiftedAction& lift,
                                         std::vector<CoverPoint> samples,
                                         double spread_tol = 1e-8);

/// Verifies J_{b, d*psi_b} o Phi_g = Ad*(g) J_{a,d} + alpha(g) at the samples
/// ((a,d,y) triples); returns the max residual and the sheet shifts seen.
struct TransformCheck {
  double max_residual = 0;
  bool crossed_cut = false;  // some psi_b != e
};
TransformCheck local_transform_check(const LocalMomentMap& J, const LiftedAction& lift,
                                     const EquivarianceCocycle& alpha, const GElem& g,
                                     const std::vector<CoverPoint>& samples);

/// Intermediate-cover moment relation J~_{a,[d0],h} o k_{a,[d0]} = J_{a, h*d0}
/// (max residual over samples). For axis-aligned finite-index subgroups of
/// Z^k over a canonical covering, J~ is built from scratch on the
/// intermediate manifold Z (independent normalization and quadrature);
/// otherwise the relation is checked through the coset/branch arithmetic.
struct IntermediateMomentReport {
  double max_residual = 0;
  bool built_from_scratch = false;
  double ghat_cocycle_checked = 0;  // number of ghat edges validated
};
IntermediateMomentReport intermediate_moment_relation(const LocalMomentMap& J,
                                                      const IntermediateCovering& ic,
                                                      int n_samples = 50, uint64_t seed = 0);

/// Regauge under a cohomologous cocycle: J'_{a,d} = J_{a, d*k_a} + L with a
/// shared 0-cochain k and the Y-constant linear map L reported per basis.
struct MomentRegaugeResult {
  LocalMomentMap moment;
  CechCochain0 k;
  CechCocycle1 regauged_cocycle;
  Vec L;            // constant map (per basis element); 0 by this construction
  double L_spread;  // constancy of L over sample points
};
MomentRegaugeResult regauge_local_moment_map(const LocalMomentMap& J, const CechCochain0& h,
                                             std::optional<GroupElement> k_base = std::nullopt);

}  // namespace symcov
