#pragma once

// Finite Abelian groups presented as products of cyclic factors Z_n1 x ... x Z_nk,
// their elements, and their characters (charges).
//
// Elements and charges are both stored as residue vectors. A charge kappa acts as
//   g -> exp(2 pi i sum_j kappa_j g_j / n_j).
// Flat indices use mixed radix with the last cyclic factor varying fastest.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "sptent/error.hpp"

namespace sptent {

using Complex = std::complex<double>;

struct GroupElement {
  std::vector<int> residues;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

struct Charge {
  std::vector<int> dual_residues;
  friend bool operator==(const Charge&, const Charge&) = default;
  friend auto operator<=>(const Charge&, const Charge&) = default;
};

class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() : FiniteAbelianGroup(std::vector<int>{}) {}

  explicit FiniteAbelianGroup(std::vector<int> cyclic_orders) : orders_(std::move(cyclic_orders)) {
    order_ = 1;
    for (int n : orders_) {
      require(n >= 1, ErrorCode::ConfigError, "cyclic orders must be >= 1, got " + std::to_string(n));
      order_ *= static_cast<std::size_t>(n);
    }
    exponent_ = 1;
    for (int n : orders_) exponent_ = std::lcm(exponent_, n);
  }

  const std::vector<int>& cyclic_orders() const { return orders_; }
  std::size_t rank() const { return orders_.size(); }
  std::size_t order() const { return order_; }
  /// Least common multiple of the cyclic orders.
  int exponent() const { return exponent_; }

  GroupElement identity() const { return GroupElement{std::vector<int>(rank(), 0)}; }
  Charge trivial_charge() const { return Charge{std::vector<int>(rank(), 0)}; }

  std::vector<int> digits(std::size_t index) const {
    require(index < order_, ErrorCode::DimensionMismatch, "group index out of range");
    std::vector<int> r(rank(), 0);
    for (std::size_t j = rank(); j-- > 0;) {
      r[j] = static_cast<int>(index % static_cast<std::size_t>(orders_[j]));
      index /= static_cast<std::size_t>(orders_[j]);
    }
    return r;
  }

  std::size_t flat(const std::vector<int>& residues) const {
    check(residues);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < rank(); ++j) idx = idx * static_cast<std::size_t>(orders_[j]) + static_cast<std::size_t>(residues[j]);
    return idx;
  }

  GroupElement element(std::size_t index) const { return GroupElement{digits(index)}; }
  Charge charge(std::size_t index) const { return Charge{digits(index)}; }
  std::size_t index(const GroupElement& g) const { return flat(g.residues); }
  std::size_t index(const Charge& k) const { return flat(k.dual_residues); }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(element(i));
    return out;
  }

  std::vector<Charge> charges() const {
    std::vector<Charge> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(charge(i));
    return out;
  }

  /// Group law on flat indices.
  std::size_t compose_index(std::size_t a, std::size_t b) const {
    std::size_t out = 0, mult = 1;
    for (std::size_t j = rank(); j-- > 0;) {
      const auto n = static_cast<std::size_t>(orders_[j]);
      out += ((a % n + b % n) % n) * mult;
      a /= n;
      b /= n;
      mult *= n;
    }
    return out;
  }

  std::size_t inverse_index(std::size_t a) const {
    std::size_t out = 0, mult = 1;
    for (std::size_t j = rank(); j-- > 0;) {
      const auto n = static_cast<std::size_t>(orders_[j]);
      out += ((n - a % n) % n) * mult;
      a /= n;
      mult *= n;
    }
    return out;
  }

  /// exp(2 pi i kappa(g)) evaluated on flat indices. The phase is reduced as an exact
  /// integer fraction of the exponent before exponentiation.
  Complex character_index(std::size_t kappa, std::size_t g) const {
    long long num = 0;
    for (std::size_t j = rank(); j-- > 0;) {
      const auto n = static_cast<std::size_t>(orders_[j]);
      num += static_cast<long long>((kappa % n) * (g % n)) * (exponent_ / orders_[j]);
      kappa /= n;
      g /= n;
    }
    num %= exponent_;
    if (num == 0) return {1.0, 0.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(num) / exponent_);
  }

  void check(const std::vector<int>& residues) const {
    require(residues.size() == rank(), ErrorCode::DimensionMismatch,
            "expected " + std::to_string(rank()) + " residues, got " + std::to_string(residues.size()));
    for (std::size_t j = 0; j < rank(); ++j)
      require(residues[j] >= 0 && residues[j] < orders_[j], ErrorCode::DimensionMismatch,
              "residue " + std::to_string(residues[j]) + " out of range for Z_" + std::to_string(orders_[j]));
  }

  std::string to_string() const {
    if (orders_.empty()) return "Z1";
    std::string s;
    for (std::size_t j = 0; j < rank(); ++j) s += (j ? "xZ" : "Z") + std::to_string(orders_[j]);
    return s;
  }

  friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) { return a.orders_ == b.orders_; }

 private:
  std::vector<int> orders_;
  std::size_t order_ = 1;
  int exponent_ = 1;
};

inline GroupElement compose(const FiniteAbelianGroup& G, const GroupElement& g, const GroupElement& h) {
  return G.element(G.compose_index(G.index(g), G.index(h)));
}

inline GroupElement inverse(const FiniteAbelianGroup& G, const GroupElement& g) {
  return G.element(G.inverse_index(G.index(g)));
}

inline Complex character_value(const FiniteAbelianGroup& G, const Charge& kappa, const GroupElement& g) {
  return G.character_index(G.index(kappa), G.index(g));
}

/// Charges form the dual group; its law is the same componentwise sum.
inline Charge add_charges(const FiniteAbelianGroup& G, const Charge& k1, const Charge& k2) {
  return G.charge(G.compose_index(G.index(k1), G.index(k2)));
}

inline Charge negate_charge(const FiniteAbelianGroup& G, const Charge& k) { return G.charge(G.inverse_index(G.index(k))); }

inline std::string to_string(const std::vector<int>& residues) {
  std::string s = "(";
  for (std::size_t j = 0; j < residues.size(); ++j) s += (j ? "," : "") + std::to_string(residues[j]);
  return s + ")";
}

/// A group isomorphic to a subgroup of `parent`, with `image[i]` the parent index of the
/// subgroup element with flat index i.
struct SubgroupEmbedding {
  FiniteAbelianGroup parent;
  FiniteAbelianGroup subgroup;
  std::vector<std::size_t> image;

  GroupElement operator()(const GroupElement& h) const { return parent.element(image[subgroup.index(h)]); }
};

inline SubgroupEmbedding identity_embedding(const FiniteAbelianGroup& G) {
  std::vector<std::size_t> image(G.order());
  std::iota(image.begin(), image.end(), std::size_t{0});
  return {G, G, std::move(image)};
}

namespace detail {

inline std::size_t element_order(const FiniteAbelianGroup& G, std::size_t g) {
  std::size_t k = 1, x = g;
  while (x != 0) {
    x = G.compose_index(x, g);
    ++k;
  }
  return g == 0 ? 1 : k;
}

inline std::size_t multiple(const FiniteAbelianGroup& G, std::size_t g, std::size_t m) {
  std::size_t x = 0;
  for (std::size_t i = 0; i < m; ++i) x = G.compose_index(x, g);
  return x;
}

}  // namespace detail

/// Subgroup generated by `generators`, presented as a product of cyclic groups.
///
/// Basis elements are chosen greedily: at each step the element whose class has maximal
/// order in the quotient by the span of the current basis, shifted by a combination of
/// the basis so that its order in the full group equals that quotient order.
inline SubgroupEmbedding subgroup_embedding(const FiniteAbelianGroup& G, const std::vector<GroupElement>& generators) {
  std::vector<std::size_t> gens;
  for (const auto& g : generators) gens.push_back(G.index(g));

  std::vector<char> in_sub(G.order(), 0);
  std::vector<std::size_t> members{0};
  in_sub[0] = 1;
  for (std::size_t pos = 0; pos < members.size(); ++pos)
    for (auto s : gens) {
      auto y = G.compose_index(members[pos], s);
      if (!in_sub[y]) {
        in_sub[y] = 1;
        members.push_back(y);
      }
    }
  std::sort(members.begin(), members.end());

  if (members.size() == G.order()) return identity_embedding(G);

  std::vector<std::size_t> basis;
  std::vector<int> orders;
  std::vector<char> span(G.order(), 0);
  span[0] = 1;
  std::size_t span_size = 1;

  auto rebuild_span = [&] {
    std::fill(span.begin(), span.end(), 0);
    std::vector<std::size_t> pts{0};
    span[0] = 1;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      std::vector<std::size_t> next;
      for (auto p : pts) {
        std::size_t x = p;
        for (int k = 0; k < orders[b]; ++k) {
          if (!span[x] || k == 0) {
            span[x] = 1;
            next.push_back(x);
          }
          x = G.compose_index(x, basis[b]);
        }
      }
      pts = std::move(next);
    }
    span_size = static_cast<std::size_t>(std::count(span.begin(), span.end(), 1));
  };

  while (span_size < members.size()) {
    // Class order of x modulo the current span.
    std::size_t best = 0, best_order = 0;
    for (auto x : members) {
      std::size_t m = 1, y = x;
      while (!span[y]) {
        y = G.compose_index(y, x);
        ++m;
      }
      if (m > best_order) {
        best_order = m;
        best = x;
      }
    }
    // Shift best by an element of the span so its true order equals best_order.
    std::size_t chosen = best;
    bool found = false;
    for (std::size_t s = 0; s < G.order() && !found; ++s) {
      if (!span[s]) continue;
      auto y = G.compose_index(best, s);
      if (detail::element_order(G, y) == best_order) {
        chosen = y;
        found = true;
      }
    }
    require(found, ErrorCode::InvariantViolation, "subgroup basis construction failed");
    basis.push_back(chosen);
    orders.push_back(static_cast<int>(best_order));
    rebuild_span();
  }

  FiniteAbelianGroup H(orders);
  std::vector<std::size_t> image(H.order());
  for (std::size_t i = 0; i < H.order(); ++i) {
    auto r = H.digits(i);
    std::size_t x = 0;
    for (std::size_t b = 0; b < basis.size(); ++b) x = G.compose_index(x, detail::multiple(G, basis[b], static_cast<std::size_t>(r[b])));
    image[i] = x;
  }
  auto sorted = image;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() && sorted == members, ErrorCode::InvariantViolation,
          "subgroup embedding is not a bijection onto the generated subgroup");
  return {G, std::move(H), std::move(image)};
}

}  // namespace sptent
