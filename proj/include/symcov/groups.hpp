#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symcov/common.hpp"

namespace symcov {

enum class GroupKind { FreeAbelian, Cyclic, Table };

/// An element of a deck group. Carries its parent group id so that operations
/// across distinct groups fail loudly instead of silently coercing.
/// Payload: integer vector (FreeAbelian rank k), {residue} (Cyclic), or
/// {table index} (Table).
struct GroupElement {
  int group_id = -1;
  std::vector<long long> v;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.group_id == b.group_id && a.v == b.v;
  }
  friend bool operator!=(const GroupElement& a, const GroupElement& b) { return !(a == b); }
  // Lexicographic; used wherever a canonical representative must be chosen.
  friend bool operator<(const GroupElement& a, const GroupElement& b) { return a.v < b.v; }
};

struct Center {
  bool whole_group = false;             // FreeAbelian / Cyclic
  std::vector<GroupElement> elements;   // populated for finite groups
};

/// Exact arithmetic for the deck transformation groups the artifact supports:
/// Z^k, Z_n, and explicit finite multiplication-table groups.
class DeckGroup {
 public:
  DeckGroup() = default;  // invalid placeholder; any use fails membership checks

  static DeckGroup free_abelian(int rank);
  static DeckGroup cyclic(long long modulus);
  // `table[i][j]` = index of the product of elements i and j. Validated:
  // closed, associative, has a two-sided identity, rows/columns permutations.
  static DeckGroup table(std::vector<std::vector<int>> table,
                         std::vector<std::string> names = {});

  GroupKind kind() const { return kind_; }
  int id() const { return id_; }
  int rank() const { return rank_; }
  long long modulus() const { return modulus_; }
  bool is_finite() const { return kind_ != GroupKind::FreeAbelian; }
  bool is_abelian() const { return abelian_; }
  long long order() const;  // finite groups only

  GroupElement identity() const;
  GroupElement make(std::vector<long long> payload) const;
  GroupElement compose(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement power(const GroupElement& a, long long n) const;

  /// Least k >= 1 with a^k = e, or nullopt for infinite order.
  std::optional<long long> element_order(const GroupElement& a) const;

  Center center() const;
  bool is_central(const GroupElement& a) const;

  std::vector<GroupElement> elements() const;   // finite groups only
  /// Standard generators: basis vectors (Z^k), {1} (Z_n), all elements (Table).
  std::vector<GroupElement> generators() const;
  std::string describe(const GroupElement& a) const;

  void require_member(const GroupElement& a) const;

 private:
  GroupKind kind_ = GroupKind::FreeAbelian;
  int id_ = -1;
  int rank_ = 0;
  long long modulus_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<std::string> names_;
  int table_identity_ = 0;
  bool abelian_ = true;
};

/// A homomorphism between deck groups, stored by generator images
/// (FreeAbelian: one image per basis vector; Cyclic: image of 1; Table: image
/// of every element). Construction validates well-definedness on the
/// defining relations.
struct GroupHom {
  int dom_id = -1;
  int cod_id = -1;
  std::vector<GroupElement> images;
};

GroupHom make_hom(const DeckGroup& dom, const DeckGroup& cod,
                  std::vector<GroupElement> generator_images);
GroupHom identity_hom(const DeckGroup& g);
GroupElement hom_apply(const DeckGroup& dom, const DeckGroup& cod, const GroupHom& f,
                       const GroupElement& a);
GroupHom hom_compose(const DeckGroup& dom, const DeckGroup& mid, const DeckGroup& cod,
                     const GroupHom& g, const GroupHom& f);  // g after f
bool hom_equal(const DeckGroup& dom, const DeckGroup& cod, const GroupHom& a, const GroupHom& b);
bool is_automorphism(const DeckGroup& g, const GroupHom& f);
/// Inverse of an automorphism; throws if f is not one.
GroupHom hom_inverse(const DeckGroup& g, const GroupHom& f);

struct InnerResult {
  enum class Status { Inner, NotInner, NotAutomorphism } status;
  GroupElement witness;  // valid when status == Inner
};

/// Decides whether an endomorphism f of G is conjugation by some witness d.
/// For abelian groups this reduces to f == id (witness e).
InnerResult is_inner_automorphism(const DeckGroup& g, const GroupHom& f);

}  // namespace symcov
