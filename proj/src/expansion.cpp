#include "orthomart/expansion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "orthomart/number_format.hpp"

namespace orthomart {

Monomial::Monomial(const MultiIndex& a) : degree_(1) { sites_[0] = a; }

Monomial::Monomial(const MultiIndex& a, const MultiIndex& b) : degree_(2) {
  require_same_dim(a, b);
  if (a == b) {
    throw std::invalid_argument("repeated innovation site " + a.to_string() +
                                " is not multilinear");
  }
  sites_[0] = std::min(a, b);
  sites_[1] = std::max(a, b);
}

std::optional<MultiIndex> Monomial::top() const {
  if (degree_ == 0) return std::nullopt;
  return degree_ == 1 ? sites_[0] : join(sites_[0], sites_[1]);
}

bool Monomial::measurable_at(const MultiIndex& cutoff) const {
  for (std::size_t i = 0; i < degree_; ++i) {
    if (!leq(sites_[i], cutoff)) return false;
  }
  return true;
}

Monomial Monomial::shifted(const MultiIndex& by) const {
  Monomial out = *this;
  for (std::size_t i = 0; i < degree_; ++i) out.sites_[i] += by;
  return out;
}

Expansion::Expansion(std::vector<Term> terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.first < b.first; });
  terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().first == t.first) {
      terms_.back().second += t.second;
    } else {
      terms_.push_back(std::move(t));
    }
  }
  std::erase_if(terms_, [](const Term& t) { return t.second == 0.0; });
  if (const auto d = dim()) {
    for (const auto& [m, c] : terms_) {
      for (const auto& s : m.sites()) {
        if (s.dim() != *d) throw DimensionMismatch("expansion mixes lattice dimensions");
      }
    }
  }
}

Expansion Expansion::from_sorted(std::vector<Term> terms) {
  Expansion e;
  e.terms_ = std::move(terms);
  return e;
}

Expansion Expansion::constant(double c) {
  if (c == 0.0) return {};
  return from_sorted({{Monomial{}, c}});
}

Expansion Expansion::site(const MultiIndex& a, double coef) {
  if (coef == 0.0) return {};
  return from_sorted({{Monomial(a), coef}});
}

Expansion Expansion::product(const MultiIndex& a, const MultiIndex& b, double coef) {
  if (coef == 0.0) return {};
  return from_sorted({{Monomial(a, b), coef}});
}

double Expansion::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& key) { return t.first < key; });
  return (it != terms_.end() && it->first == m) ? it->second : 0.0;
}

std::optional<std::size_t> Expansion::dim() const {
  for (const auto& [m, c] : terms_) {
    if (m.degree() > 0) return m.site(0).dim();
  }
  return std::nullopt;
}

std::vector<MultiIndex> Expansion::support_sites() const {
  std::vector<MultiIndex> sites;
  for (const auto& [m, c] : terms_) {
    for (const auto& s : m.sites()) sites.push_back(s);
  }
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

namespace {

void check_compatible(const Expansion& a, const Expansion& b) {
  const auto da = a.dim();
  const auto db = b.dim();
  if (da && db && *da != *db) {
    throw DimensionMismatch("expansions of dimension " + std::to_string(*da) + " and " +
                            std::to_string(*db));
  }
}

void check_compatible(const Expansion& e, const MultiIndex& u) {
  if (const auto d = e.dim(); d && *d != u.dim()) {
    throw DimensionMismatch("expansion of dimension " + std::to_string(*d) +
                            " used with index " + u.to_string());
  }
}

std::vector<Expansion::Term> merge(const std::vector<Expansion::Term>& a,
                                   const std::vector<Expansion::Term>& b, double sign) {
  std::vector<Expansion::Term> out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.emplace_back(j->first, sign * j->second);
      ++j;
    } else {
      const double c = i->second + sign * j->second;
      if (c != 0.0) out.emplace_back(i->first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

template <class Pred>
Expansion filter(const Expansion& e, Pred keep) {
  std::vector<Expansion::Term> out;
  for (const auto& t : e.terms()) {
    if (keep(t.first)) out.push_back(t);
  }
  return Expansion::from_sorted(std::move(out));
}

}  // namespace

Expansion& Expansion::operator+=(const Expansion& other) {
  check_compatible(*this, other);
  terms_ = merge(terms_, other.terms_, 1.0);
  return *this;
}

Expansion& Expansion::operator-=(const Expansion& other) {
  check_compatible(*this, other);
  terms_ = merge(terms_, other.terms_, -1.0);
  return *this;
}

Expansion& Expansion::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  std::erase_if(terms_, [](const Term& t) { return t.second == 0.0; });
  return *this;
}

Expansion& Expansion::operator/=(double s) {
  for (auto& t : terms_) t.second /= s;
  std::erase_if(terms_, [](const Term& t) { return t.second == 0.0; });
  return *this;
}

std::string Expansion::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += format_double(c);
    for (const auto& site : m.sites()) {
      s += " * x[";
      s += site.to_string();
      s += ']';
    }
  }
  return s;
}

namespace {

class ExpansionParser {
 public:
  explicit ExpansionParser(std::string_view text) : text_(text) {}

  Expansion parse() {
    std::vector<Expansion::Term> terms;
    skip_ws();
    if (consume_word("0") && at_end()) return {};
    pos_ = 0;
    while (true) {
      terms.push_back(parse_term());
      skip_ws();
      if (at_end()) break;
      expect('+');
    }
    return Expansion(std::move(terms));
  }

 private:
  Expansion::Term parse_term() {
    const double coef = parse_number();
    std::vector<MultiIndex> sites;
    while (true) {
      skip_ws();
      if (at_end() || peek() != '*') break;
      ++pos_;
      skip_ws();
      expect('x');
      expect('[');
      sites.push_back(parse_index());
      expect(']');
    }
    switch (sites.size()) {
      case 0: return {Monomial{}, coef};
      case 1: return {Monomial(sites[0]), coef};
      case 2: return {Monomial(sites[0], sites[1]), coef};
      default: fail("monomials of degree > 2 are not supported");
    }
  }

  double parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end()) {
      const char ch = peek();
      const bool exp_sign = (ch == '+' || ch == '-') && pos_ > start &&
                            (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' || ch == 'E' ||
          (ch == '-' && pos_ == start) || exp_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a coefficient");
    return parse_double(text_.substr(start, pos_ - start));
  }

  MultiIndex parse_index() {
    expect('(');
    std::vector<std::int64_t> coords;
    while (true) {
      skip_ws();
      const std::size_t start = pos_;
      if (!at_end() && peek() == '-') ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (pos_ == start) fail("expected an integer coordinate");
      coords.push_back(std::stoll(std::string(text_.substr(start, pos_ - start))));
      skip_ws();
      if (!at_end() && peek() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    expect(')');
    return MultiIndex(std::span<const std::int64_t>(coords));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool consume_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      skip_ws();
      return true;
    }
    return false;
  }
  void expect(char ch) {
    skip_ws();
    if (at_end() || peek() != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expansion parse error at offset " + std::to_string(pos_) +
                                ": " + what);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expansion Expansion::parse(std::string_view text) { return ExpansionParser(text).parse(); }

Expansion shift(const Expansion& e, const MultiIndex& u) {
  check_compatible(e, u);
  std::vector<Expansion::Term> out;
  out.reserve(e.size());
  // Translation preserves the lexicographic order, so the result stays canonical.
  for (const auto& [m, c] : e.terms()) out.emplace_back(m.shifted(u), c);
  return Expansion::from_sorted(std::move(out));
}

Expansion cond_expect(const Expansion& e, const MultiIndex& cutoff) {
  check_compatible(e, cutoff);
  return filter(e, [&](const Monomial& m) { return m.measurable_at(cutoff); });
}

Expansion project(const Expansion& e, const MultiIndex& m) {
  check_compatible(e, m);
  const std::size_t d = m.dim();
  Expansion out;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    MultiIndex cutoff = m;
    int parity = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        cutoff[i] -= 1;
        parity ^= 1;
      }
    }
    if (parity) {
      out -= cond_expect(e, cutoff);
    } else {
      out += cond_expect(e, cutoff);
    }
  }
  return out;
}

Expansion project_max_rule(const Expansion& e, const MultiIndex& m) {
  check_compatible(e, m);
  return filter(e, [&](const Monomial& mono) {
    const auto top = mono.top();
    return top && *top == m;
  });
}

Expansion project_axis(const Expansion& e, const MultiIndex& m, std::size_t axis) {
  if (axis >= m.dim()) throw std::out_of_range("project_axis: axis out of range");
  return cond_expect(e, m) - cond_expect(e, m.with(axis, m[axis] - 1));
}

Expansion project_composed(const Expansion& e, const MultiIndex& m,
                           std::span<const std::size_t> axis_order) {
  Expansion out = e;
  for (auto axis : axis_order) out = project_axis(out, m, axis);
  return out;
}

double inner(const Expansion& a, const Expansion& b, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("inner: sigma2 must be positive");
  check_compatible(a, b);
  double sum = 0.0;
  auto i = a.terms().begin();
  auto j = b.terms().begin();
  while (i != a.terms().end() && j != b.terms().end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      double w = i->second * j->second;
      for (std::size_t k = 0; k < i->first.degree(); ++k) w *= sigma2;
      sum += w;
      ++i;
      ++j;
    }
  }
  return sum;
}

double norm2(const Expansion& e, double sigma2) { return inner(e, e, sigma2); }

double max_abs_difference(const Expansion& a, const Expansion& b) {
  double worst = 0.0;
  for (const auto& [m, c] : (a - b).terms()) worst = std::max(worst, std::abs(c));
  return worst;
}

}  // namespace orthomart
