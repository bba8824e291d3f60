#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orthomart/multi_index.hpp"

namespace orthomart {

/// Multilinear product of innovations xi_a xi_b with distinct, sorted sites.
/// Degree 0 is the constant monomial.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const MultiIndex& a);
  /// Throws std::invalid_argument when a == b (diagonal terms are not multilinear).
  Monomial(const MultiIndex& a, const MultiIndex& b);

  std::size_t degree() const { return degree_; }
  std::span<const MultiIndex> sites() const { return {sites_.data(), degree_}; }
  const MultiIndex& site(std::size_t i) const { return sites_[i]; }

  /// Componentwise maximum of the sites; nullopt for the constant monomial.
  std::optional<MultiIndex> top() const;
  /// True when every site is <= cutoff componentwise.
  bool measurable_at(const MultiIndex& cutoff) const;
  Monomial shifted(const MultiIndex& by) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return false;
    for (std::size_t i = 0; i < a.degree_; ++i) {
      if (!(a.sites_[i] == b.sites_[i])) return false;
    }
    return true;
  }
  /// Lexicographic order on the sorted site lists.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    const std::size_t n = std::min(a.degree_, b.degree_);
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a.sites_[i] <=> b.sites_[i]; c != 0) return c;
    }
    return a.degree_ <=> b.degree_;
  }

 private:
  std::array<MultiIndex, 2> sites_{};
  std::size_t degree_ = 0;
};

/// Finite real combination of multilinear monomials, kept in canonical form:
/// terms strictly sorted by monomial, no stored zero coefficients.
class Expansion {
 public:
  using Term = std::pair<Monomial, double>;

  Expansion() = default;
  /// Canonicalizes: sorts (stably), merges duplicates in input order, drops exact zeros.
  explicit Expansion(std::vector<Term> terms);

  static Expansion constant(double c);
  static Expansion site(const MultiIndex& a, double coef = 1.0);
  static Expansion product(const MultiIndex& a, const MultiIndex& b, double coef = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  /// Coefficient of m, zero when absent.
  double coefficient(const Monomial& m) const;
  double constant_term() const { return coefficient(Monomial{}); }
  /// Lattice dimension of the sites, nullopt when there are none.
  std::optional<std::size_t> dim() const;
  /// Sorted distinct sites appearing in any term.
  std::vector<MultiIndex> support_sites() const;

  Expansion& operator+=(const Expansion& other);
  Expansion& operator-=(const Expansion& other);
  Expansion& operator*=(double s);
  Expansion& operator/=(double s);
  friend Expansion operator+(Expansion a, const Expansion& b) { return a += b; }
  friend Expansion operator-(Expansion a, const Expansion& b) { return a -= b; }
  friend Expansion operator*(Expansion a, double s) { return a *= s; }
  friend Expansion operator*(double s, Expansion a) { return a *= s; }
  friend Expansion operator/(Expansion a, double s) { return a /= s; }

  friend bool operator==(const Expansion& a, const Expansion& b) { return a.terms_ == b.terms_; }

  /// Debug/report form, e.g. `2 * x[(1,1)] + -0.5 * x[(0,1)] * x[(1,0)]`; `0` when empty.
  std::string to_string() const;
  /// Inverse of to_string(). Throws std::invalid_argument on malformed text.
  static Expansion parse(std::string_view text);

  /// Builds from terms already strictly sorted with nonzero coefficients.
  static Expansion from_sorted(std::vector<Term> terms);

 private:
  std::vector<Term> terms_;
};

/// Translation by u: every site a becomes a + u.
Expansion shift(const Expansion& e, const MultiIndex& u);

/// E(e | F_c) for independent centered innovations: keeps the monomials measurable at c.
Expansion cond_expect(const Expansion& e, const MultiIndex& cutoff);

/// P_m via the 2^d-term inclusion-exclusion of conditional expectations.
Expansion project(const Expansion& e, const MultiIndex& m);

/// P_m via the componentwise-max rule: keeps monomials whose site maximum equals m.
Expansion project_max_rule(const Expansion& e, const MultiIndex& m);

/// One-coordinate difference E_m - E_{m - e_axis}.
Expansion project_axis(const Expansion& e, const MultiIndex& m, std::size_t axis);

/// P_m as the composition of the one-coordinate differences in the given axis order.
Expansion project_composed(const Expansion& e, const MultiIndex& m,
                           std::span<const std::size_t> axis_order);

/// L^2 inner product for i.i.d. centered innovations with variance sigma2.
double inner(const Expansion& a, const Expansion& b, double sigma2);
double norm2(const Expansion& e, double sigma2);

/// Largest absolute coefficient difference between two expansions.
double max_abs_difference(const Expansion& a, const Expansion& b);

}  // namespace orthomart
