#include "symcov/groups.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

namespace symcov {

namespace {
std::atomic<int> g_next_group_id{0};

long long mod_pos(long long a, long long n) {
  long long r = a % n;
  return r < 0 ? r + n : r;
}
}  // namespace

DeckGroup DeckGroup::free_abelian(int rank) {
  if (rank < 1) throw std::invalid_argument("free_abelian: rank must be >= 1");
  DeckGroup g;
  g.kind_ = GroupKind::FreeAbelian;
  g.rank_ = rank;
  g.abelian_ = true;
  g.id_ = g_next_group_id++;
  return g;
}

DeckGroup DeckGroup::cyclic(long long modulus) {
  if (modulus < 1) throw std::invalid_argument("cyclic: modulus must be >= 1");
  DeckGroup g;
  g.kind_ = GroupKind::Cyclic;
  g.modulus_ = modulus;
  g.abelian_ = true;
  g.id_ = g_next_group_id++;
  return g;
}

DeckGroup DeckGroup::table(std::vector<std::vector<int>> table, std::vector<std::string> names) {
  const int m = static_cast<int>(table.size());
  if (m < 1) throw std::invalid_argument("table group: empty table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != m) throw std::invalid_argument("table group: not square");
    for (int x : row)
      if (x < 0 || x >= m) throw std::invalid_argument("table group: entry out of range");
  }
  // Rows and columns must be permutations.
  for (int i = 0; i < m; ++i) {
    std::vector<char> seen_row(m, 0), seen_col(m, 0);
    for (int j = 0; j < m; ++j) {
      if (seen_row[table[i][j]]++) throw std::invalid_argument("table group: row not a permutation");
      if (seen_col[table[j][i]]++) throw std::invalid_argument("table group: column not a permutation");
    }
  }
  // Two-sided identity.
  int e = -1;
  for (int i = 0; i < m; ++i) {
    bool ok = true;
    for (int j = 0; j < m; ++j) ok = ok && table[i][j] == j && table[j][i] == j;
    if (ok) {
      e = i;
      break;
    }
  }
  if (e < 0) throw std::invalid_argument("table group: no identity element");
  // Associativity (groups here are small; the cubic scan is fine).
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw std::invalid_argument("table group: not associative");

  DeckGroup g;
  g.kind_ = GroupKind::Table;
  g.table_ = std::move(table);
  g.names_ = std::move(names);
  g.table_identity_ = e;
  g.abelian_ = true;
  for (int a = 0; a < m && g.abelian_; ++a)
    for (int b = 0; b < m; ++b)
      if (g.table_[a][b] != g.table_[b][a]) {
        g.abelian_ = false;
        break;
      }
  g.id_ = g_next_group_id++;
  return g;
}

long long DeckGroup::order() const {
  switch (kind_) {
    case GroupKind::Cyclic: return modulus_;
    case GroupKind::Table: return static_cast<long long>(table_.size());
    default: throw std::domain_error("order: infinite group");
  }
}

GroupElement DeckGroup::identity() const {
  switch (kind_) {
    case GroupKind::FreeAbelian: return {id_, std::vector<long long>(rank_, 0)};
    case GroupKind::Cyclic: return {id_, {0}};
    case GroupKind::Table: return {id_, {table_identity_}};
  }
  throw std::logic_error("unreachable");
}

GroupElement DeckGroup::make(std::vector<long long> payload) const {
  switch (kind_) {
    case GroupKind::FreeAbelian:
      if (static_cast<int>(payload.size()) != rank_)
        throw std::invalid_argument("make: payload length != rank");
      return {id_, std::move(payload)};
    case GroupKind::Cyclic:
      if (payload.size() != 1) throw std::invalid_argument("make: cyclic payload must be a single residue");
      return {id_, {mod_pos(payload[0], modulus_)}};
    case GroupKind::Table:
      if (payload.size() != 1 || payload[0] < 0 || payload[0] >= static_cast<long long>(table_.size()))
        throw std::invalid_argument("make: table index out of range");
      return {id_, std::move(payload)};
  }
  throw std::logic_error("unreachable");
}

void DeckGroup::require_member(const GroupElement& a) const {
  if (a.group_id != id_)
    throw std::invalid_argument("group element belongs to a different group (id " +
                                std::to_string(a.group_id) + " vs " + std::to_string(id_) + ")");
}

GroupElement DeckGroup::compose(const GroupElement& a, const GroupElement& b) const {
  require_member(a);
  require_member(b);
  switch (kind_) {
    case GroupKind::FreeAbelian: {
      std::vector<long long> v(rank_);
      for (int i = 0; i < rank_; ++i) v[i] = a.v[i] + b.v[i];
      return {id_, std::move(v)};
    }
    case GroupKind::Cyclic: return {id_, {mod_pos(a.v[0] + b.v[0], modulus_)}};
    case GroupKind::Table: return {id_, {table_[a.v[0]][b.v[0]]}};
  }
  throw std::logic_error("unreachable");
}

GroupElement DeckGroup::inverse(const GroupElement& a) const {
  require_member(a);
  switch (kind_) {
    case GroupKind::FreeAbelian: {
      std::vector<long long> v(rank_);
      for (int i = 0; i < rank_; ++i) v[i] = -a.v[i];
      return {id_, std::move(v)};
    }
    case GroupKind::Cyclic: return {id_, {mod_pos(-a.v[0], modulus_)}};
    case GroupKind::Table: {
      const int m = static_cast<int>(table_.size());
      for (int j = 0; j < m; ++j)
        if (table_[a.v[0]][j] == table_identity_) return {id_, {j}};
      throw std::logic_error("table group: inverse missing");
    }
  }
  throw std::logic_error("unreachable");
}

GroupElement DeckGroup::power(const GroupElement& a, long long n) const {
  require_member(a);
  GroupElement base = n < 0 ? inverse(a) : a;
  long long k = n < 0 ? -n : n;
  GroupElement acc = identity();
  while (k > 0) {
    if (k & 1) acc = compose(acc, base);
    base = compose(base, base);
    k >>= 1;
  }
  return acc;
}

std::optional<long long> DeckGroup::element_order(const GroupElement& a) const {
  require_member(a);
  switch (kind_) {
    case GroupKind::FreeAbelian: {
      bool zero = std::all_of(a.v.begin(), a.v.end(), [](long long x) { return x == 0; });
      if (zero) return 1;
      return std::nullopt;  // torsion-free
    }
    case GroupKind::Cyclic: {
      if (a.v[0] == 0) return 1;
      return modulus_ / std::gcd(modulus_, a.v[0]);
    }
    case GroupKind::Table: {
      GroupElement x = a;
      long long k = 1;
      while (!(x == identity())) {
        x = compose(x, a);
        ++k;
      }
      return k;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<GroupElement> DeckGroup::elements() const {
  switch (kind_) {
    case GroupKind::Cyclic: {
      std::vector<GroupElement> out;
      for (long long i = 0; i < modulus_; ++i) out.push_back({id_, {i}});
      return out;
    }
    case GroupKind::Table: {
      std::vector<GroupElement> out;
      for (long long i = 0; i < static_cast<long long>(table_.size()); ++i) out.push_back({id_, {i}});
      return out;
    }
    default: throw std::domain_error("elements: infinite group");
  }
}

std::vector<GroupElement> DeckGroup::generators() const {
  switch (kind_) {
    case GroupKind::FreeAbelian: {
      std::vector<GroupElement> out;
      for (int i = 0; i < rank_; ++i) {
        std::vector<long long> v(rank_, 0);
        v[i] = 1;
        out.push_back({id_, std::move(v)});
      }
      return out;
    }
    case GroupKind::Cyclic: return {GroupElement{id_, {1 % modulus_}}};
    case GroupKind::Table: return elements();
  }
  throw std::logic_error("unreachable");
}

Center DeckGroup::center() const {
  Center c;
  if (abelian_) {
    c.whole_group = true;
    if (is_finite()) c.elements = elements();
    return c;
  }
  for (const auto& z : elements())
    if (is_central(z)) c.elements.push_back(z);
  return c;
}

bool DeckGroup::is_central(const GroupElement& a) const {
  require_member(a);
  if (abelian_) return true;
  for (const auto& x : elements())
    if (!(compose(a, x) == compose(x, a))) return false;
  return true;
}

std::string DeckGroup::describe(const GroupElement& a) const {
  require_member(a);
  if (kind_ == GroupKind::Table && !names_.empty()) return names_[a.v[0]];
  std::string s = "(";
  for (size_t i = 0; i < a.v.size(); ++i) s += (i ? "," : "") + std::to_string(a.v[i]);
  return s + ")";
}

// ---------------------------------------------------------------------------

GroupHom make_hom(const DeckGroup& dom, const DeckGroup& cod,
                  std::vector<GroupElement> generator_images) {
  for (const auto& im : generator_images) cod.require_member(im);
  GroupHom f{dom.id(), cod.id(), std::move(generator_images)};
  switch (dom.kind()) {
    case GroupKind::FreeAbelian: {
      if (static_cast<int>(f.images.size()) != dom.rank())
        throw std::invalid_argument("make_hom: need one image per basis generator");
      // Z^k is free abelian: images must commute pairwise in the codomain.
      for (size_t i = 0; i < f.images.size(); ++i)
        for (size_t j = i + 1; j < f.images.size(); ++j)
          if (!(cod.compose(f.images[i], f.images[j]) == cod.compose(f.images[j], f.images[i])))
            throw std::invalid_argument("make_hom: generator images do not commute");
      break;
    }
    case GroupKind::Cyclic: {
      if (f.images.size() != 1) throw std::invalid_argument("make_hom: cyclic domain needs one image");
      // Relation g^n = e must be respected.
      if (!(cod.power(f.images[0], dom.modulus()) == cod.identity()))
        throw std::invalid_argument("make_hom: image violates the cyclic relation");
      break;
    }
    case GroupKind::Table: {
      if (f.images.size() != static_cast<size_t>(dom.order()))
        throw std::invalid_argument("make_hom: table domain needs the image of every element");
      const auto elems = dom.elements();
      for (const auto& a : elems)
        for (const auto& b : elems) {
          const auto lhs = f.images[static_cast<size_t>(dom.compose(a, b).v[0])];
          const auto rhs = cod.compose(f.images[static_cast<size_t>(a.v[0])],
                                       f.images[static_cast<size_t>(b.v[0])]);
          if (!(lhs == rhs)) throw std::invalid_argument("make_hom: table consistency violated");
        }
      break;
    }
  }
  return f;
}

GroupHom identity_hom(const DeckGroup& g) { return make_hom(g, g, g.generators()); }

GroupElement hom_apply(const DeckGroup& dom, const DeckGroup& cod, const GroupHom& f,
                       const GroupElement& a) {
  dom.require_member(a);
  if (f.dom_id != dom.id() || f.cod_id != cod.id())
    throw std::invalid_argument("hom_apply: hom does not match the given groups");
  switch (dom.kind()) {
    case GroupKind::FreeAbelian: {
      GroupElement acc = cod.identity();
      for (int i = 0; i < dom.rank(); ++i) acc = cod.compose(acc, cod.power(f.images[i], a.v[i]));
      return acc;
    }
    case GroupKind::Cyclic: return cod.power(f.images[0], a.v[0]);
    case GroupKind::Table: return f.images[static_cast<size_t>(a.v[0])];
  }
  throw std::logic_error("unreachable");
}

GroupHom hom_compose(const DeckGroup& dom, const DeckGroup& mid, const DeckGroup& cod,
                     const GroupHom& g, const GroupHom& f) {
  std::vector<GroupElement> images;
  for (const auto& gen : dom.generators())
    images.push_back(hom_apply(mid, cod, g, hom_apply(dom, mid, f, gen)));
  return make_hom(dom, cod, std::move(images));
}

bool hom_equal(const DeckGroup& dom, const DeckGroup& cod, const GroupHom& a, const GroupHom& b) {
  for (const auto& gen : dom.generators())
    if (!(hom_apply(dom, cod, a, gen) == hom_apply(dom, cod, b, gen))) return false;
  return true;
}

bool is_automorphism(const DeckGroup& g, const GroupHom& f) {
  if (f.dom_id != g.id() || f.cod_id != g.id()) return false;
  switch (g.kind()) {
    case GroupKind::FreeAbelian: {
      // Integer matrix with determinant +-1 (rank <= 2 in this artifact, but
      // handle the general case by Bareiss elimination over rationals).
      const int k = g.rank();
      std::vector<std::vector<double>> m(k, std::vector<double>(k));
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) m[i][j] = static_cast<double>(f.images[j].v[i]);
      double det = 1.0;
      for (int c = 0; c < k; ++c) {
        int piv = -1;
        for (int r = c; r < k; ++r)
          if (std::fabs(m[r][c]) > 1e-12) {
            piv = r;
            break;
          }
        if (piv < 0) return false;
        if (piv != c) {
          std::swap(m[piv], m[c]);
          det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < k; ++r) {
          double t = m[r][c] / m[c][c];
          for (int cc = c; cc < k; ++cc) m[r][cc] -= t * m[c][cc];
        }
      }
      return std::fabs(std::fabs(det) - 1.0) < 1e-9;
    }
    case GroupKind::Cyclic:
      return std::gcd(f.images[0].v[0], g.modulus()) == 1 || g.modulus() == 1;
    case GroupKind::Table: {
      std::vector<char> hit(static_cast<size_t>(g.order()), 0);
      for (const auto& im : f.images) {
        if (hit[static_cast<size_t>(im.v[0])]) return false;
        hit[static_cast<size_t>(im.v[0])] = 1;
      }
      return true;
    }
  }
  return false;
}

GroupHom hom_inverse(const DeckGroup& g, const GroupHom& f) {
  if (!is_automorphism(g, f)) throw std::invalid_argument("hom_inverse: not an automorphism");
  switch (g.kind()) {
    case GroupKind::FreeAbelian: {
      const int k = g.rank();
      if (k == 1) {
        // image of the generator is +-1
        return make_hom(g, g, {g.make({f.images[0].v[0]})});
      }
      if (k == 2) {
        long long a = f.images[0].v[0], c = f.images[0].v[1];
        long long b = f.images[1].v[0], d = f.images[1].v[1];
        long long det = a * d - b * c;  // +-1
        std::vector<GroupElement> inv = {g.make({d / det, -c / det}), g.make({-b / det, a / det})};
        return make_hom(g, g, std::move(inv));
      }
      throw std::domain_error("hom_inverse: FreeAbelian rank > 2 unsupported");
    }
    case GroupKind::Cyclic: {
      const long long n = g.modulus();
      for (long long u = 0; u < n; ++u)
        if (mod_pos(u * f.images[0].v[0], n) == 1 % n) return make_hom(g, g, {g.make({u})});
      throw std::logic_error("hom_inverse: cyclic inverse missing");
    }
    case GroupKind::Table: {
      std::vector<GroupElement> inv(static_cast<size_t>(g.order()), g.identity());
      for (long long i = 0; i < g.order(); ++i) inv[static_cast<size_t>(f.images[i].v[0])] = g.make({i});
      return make_hom(g, g, std::move(inv));
    }
  }
  throw std::logic_error("unreachable");
}

InnerResult is_inner_automorphism(const DeckGroup& g, const GroupHom& f) {
  if (f.dom_id != g.id() || f.cod_id != g.id())
    throw std::invalid_argument("is_inner_automorphism: f must be an endomorphism of g");
  if (!is_automorphism(g, f)) return {InnerResult::Status::NotAutomorphism, g.identity()};
  if (g.is_abelian()) {
    // Conjugation is trivial, so inner <=> identity.
    if (hom_equal(g, g, f, identity_hom(g))) return {InnerResult::Status::Inner, g.identity()};
    return {InnerResult::Status::NotInner, g.identity()};
  }
  for (const auto& d : g.elements()) {
    bool ok = true;
    for (const auto& x : g.elements()) {
      const auto conj = g.compose(g.compose(d, x), g.inverse(d));
      if (!(hom_apply(g, g, f, x) == conj)) {
        ok = false;
        break;
      }
    }
    if (ok) return {InnerResult::Status::Inner, d};
  }
  return {InnerResult::Status::NotInner, g.identity()};
}

}  // namespace symcov
