#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symcov/atlas.hpp"
#include "symcov/groups.hpp"

namespace symcov {

/// Locally constant deck-group labels, one per chart.
struct CechCochain0 {
  DeckGroup group;
  std::vector<GroupElement> values;  // indexed by chart

  static CechCochain0 constant(const DeckGroup& g, int n_charts, const GroupElement& v);
  static CechCochain0 identity(const DeckGroup& g, int n_charts);
  const GroupElement& at(int a) const { return values.at(static_cast<size_t>(a)); }
};

/// Deck-group labels on chart overlaps. Entries may be given for either
/// orientation of a pair; the accessor supplies g_aa = e, g_ba = g_ab^-1, and
/// defaults unlisted overlaps to the identity.
struct CechCocycle1 {
  DeckGroup group;
  std::map<std::pair<int, int>, GroupElement> entries;

  static CechCocycle1 trivial(const DeckGroup& g);
  void set(int a, int b, const GroupElement& v);
  GroupElement at(int a, int b) const;
};

struct CocycleViolation {
  std::string axiom;  // Coc1 | Coc2 | Coc3 | schema
  std::vector<int> where;
  std::string detail;
};

struct CocycleReport {
  bool pass = true;
  std::vector<CocycleViolation> violations;
};

/// Exact verification of the cocycle axioms against an atlas nerve:
/// g_aa = e, g_ba = g_ab^-1, and g_ac = g_ab*g_bc on triple overlaps.
/// Entries on pairs that are not overlaps are schema errors.
CocycleReport verify_cocycle(const Atlas& atlas, const CechCocycle1& c);

/// g'_ab = h_a^-1 * g_ab * h_b.
CechCocycle1 apply_coboundary(const Atlas& atlas, const CechCocycle1& c, const CechCochain0& h);

struct CohomologousResult {
  bool cohomologous = false;
  CechCochain0 witness;
  /// The witness is determined up to global left multiplication by central
  /// elements; for abelian groups that is the whole group.
  bool witness_free_up_to_center = true;
};

/// Searches for h with c2 = h^-1 * c1 * h per overlap. Exhaustive over the
/// choices of h at the base chart for finite groups; integer tree solve with
/// cycle-consistency for Z^k.
CohomologousResult are_cohomologous(const Atlas& atlas, const CechCocycle1& c1,
                                    const CechCocycle1& c2);

/// rho[loop] = g_{a0 a1} * ... * g_{an a0} along the loop's chart sequence.
GroupElement holonomy(const Atlas& atlas, const CechCocycle1& c, const ChartPath& loop);
GroupElement holonomy_word(const CechCocycle1& c, const std::vector<int>& chart_sequence);

/// Abelian n-cochain on the nerve: values on ordered (n+1)-tuples of charts
/// with nonempty common intersection.
struct CechCochainN {
  int arity = 0;
  DeckGroup group;
  std::map<std::vector<int>, GroupElement> values;
  const GroupElement& at(const std::vector<int>& key) const;
};

/// Ordered tuples (all orderings of index sets) with nonempty common overlap,
/// for n = 0,1,2,3.
std::vector<std::vector<int>> nerve_tuples(const Atlas& atlas, int arity);

/// Alternating-sum coboundary with the k-th argument omitted; requires an
/// abelian coefficient group. delta(delta(f)) = 0 exactly.
CechCochainN cech_delta(const Atlas& atlas, const CechCochainN& f);

/// Spanning tree of the nerve, breadth-first from the base chart:
/// parent[a] = previous chart on the tree path, -1 at the root.
std::vector<int> nerve_spanning_tree(const Atlas& atlas);

}  // namespace symcov
