#pragma once

#include "symcov/moment.hpp"

namespace symcov {

/// Lattice window over the cover: integer model-lattice cells (a, d, m) with
/// |d_i| <= W intersected with the model box |u - u_base| <= (W + 1/2) L per
/// periodic axis; non-periodic axes are clipped to explicit bounds. Needs a
/// covering with a canonical unroll.
struct GridSpec {
  int window = 3;
  double spacing = 0.05;        // snapped to period/N on periodic axes
  double nonperiodic_halfwidth = 3.0;
};

struct GridCell {
  std::vector<long long> lattice;  // integer model-lattice coordinates
  CoverPoint point;
};

struct PhaseGrid {
  Covering cov;
  GridSpec spec;
  Vec h;                            // spacing per axis
  std::vector<long long> lat_lo, lat_hi;
  std::vector<long long> period_steps;  // lattice steps per period (0 = non-periodic)

  Vec model_point(const std::vector<long long>& m) const;
  bool in_window(const std::vector<long long>& m) const;
  /// Resolve a lattice point to its canonical cover point; nullopt when the
  /// deck label falls outside the window.
  std::optional<CoverPoint> resolve(const std::vector<long long>& m) const;
};

PhaseGrid make_phase_grid(const Covering& cov, const GridSpec& spec);

/// A connected component of the in-band cell set: one G-state.
struct State {
  int id = -1;
  std::vector<std::vector<long long>> cells;
  Vec iota;              // the deck-orbit moment value this state matched
  GroupElement matched_deck;  // the d with iota = level + c(d)
  bool interior = true;  // deck generator images stay inside the window
  double max_band_deviation = 0;
};

struct StateSpace {
  PhaseGrid grid;
  Vec level;
  double band = 0;
  std::vector<State> states;
  /// deck_image[gen][state] = state id of the generator image, -1 when the
  /// image leaves the window (and +gen then -gen per generator pair).
  std::vector<std::vector<int>> deck_image;

  int state_of_cell(const std::vector<long long>& m) const;
};

/// Flood-fill connected components (2n-neighbourhood) of the cells whose
/// moment value lies within `band` of the deck orbit {level + c(d)} of the
/// requested level. Each state's iota is the orbit value it matched. An empty
/// level set yields an empty state space. `band <= 0` selects the default
/// 2 * h * max|grad J| estimated numerically.
StateSpace compute_state_space(const GlobalMomentMap& J, const Covering& cov, const Vec& level,
                               double band, const GridSpec& spec);

struct QuotientState {
  int id = -1;
  std::vector<int> members;  // state ids in the deck orbit
  int multiplicity = 0;      // #members within the window
  bool window_truncated = false;
  bool has_fixed_point = false;  // some deck generator maps a member to itself
};

struct QuotientReport {
  std::vector<QuotientState> quotient;
  bool deck_infinite = false;
};

/// Orbits of states under the deck action; multiplicities are window counts
/// (the fibre over a quotient state is countable for infinite deck groups,
/// which is flagged).
QuotientReport quotient_states(const StateSpace& S);

/// Hamiltonian flow of h with respect to omega = f dx0^dx1: classic 4th-order
/// Runge-Kutta on cover-model coordinates (x0' = -h_{x1}/f, x1' = h_{x0}/f).
struct FlowResult {
  std::vector<Vec> trajectory;  // cover-model coordinates, one per step
  std::vector<double> times;
  bool truncated = false;       // left the window box
  double energy_drift = 0;      // max |h - h(0)| along the trajectory
};

FlowResult hamiltonian_flow(const std::function<double(const Vec&)>& hamiltonian,
                            const std::function<Vec(const Vec&)>& grad,  // may be null -> FD
                            const TwoForm& omega, const Covering& cov, const Vec& start_model,
                            double T, double dt, const GridSpec& window = {});

/// Poisson bracket {f, g} = (f_x g_y - f_y g_x)/omega_coeff sampled on a grid;
/// returns the max absolute value (used to verify flow-invariance premises).
double poisson_bracket_sup(const std::function<double(const Vec&)>& f,
                           const std::function<double(const Vec&)>& g, const TwoForm& omega,
                           const Covering& cov, const GridSpec& spec, int samples = 50,
                           uint64_t seed = 0);

}  // namespace symcov
