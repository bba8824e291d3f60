#include "orthomart/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace orthomart::oracle {

namespace {

// Evaluation and averaging run in extended precision with compensated sums so the
// enumerated moments agree with the algebra far below 1e-12 on 2^16 assignments.

/// Neumaier summation.
class Accumulator {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + carry_; }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

struct CompiledTerm {
  long double weight;        // coefficient * sigma^degree
  std::uint32_t mask;   // window bits of the sites in the monomial
};

/// Expansion evaluated as a signed sum over window bit patterns; a set bit means
/// the innovation at that site is -sigma.
class Compiled {
 public:
  Compiled(const Expansion& e, std::span<const MultiIndex> window, long double sigma) {
    for (const auto& [mono, coef] : e.terms()) {
      std::uint32_t mask = 0;
      long double w = coef;
      for (const auto& s : mono.sites()) {
        auto it = std::lower_bound(window.begin(), window.end(), s);
        if (it == window.end() || !(*it == s)) {
          throw WindowError("window is missing site " + s.to_string());
        }
        mask |= 1u << static_cast<std::uint32_t>(it - window.begin());
        w *= sigma;
      }
      terms_.push_back({w, mask});
    }
  }

  long double operator()(std::uint32_t negative) const {
    long double v = 0.0L;
    for (const auto& t : terms_) {
      v += (std::popcount(t.mask & negative) & 1) ? -t.weight : t.weight;
    }
    return v;
  }

 private:
  std::vector<CompiledTerm> terms_;
};

std::vector<MultiIndex> sorted_window(std::span<const MultiIndex> window) {
  if (window.size() > kMaxWindow) {
    throw WindowError("window of " + std::to_string(window.size()) + " sites exceeds " +
                      std::to_string(kMaxWindow));
  }
  std::vector<MultiIndex> w(window.begin(), window.end());
  std::sort(w.begin(), w.end());
  if (std::adjacent_find(w.begin(), w.end()) != w.end()) {
    throw WindowError("window lists a site twice");
  }
  return w;
}

double checked_sigma(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("oracle: sigma2 must be positive");
  return std::sqrt(sigma2);
}

}  // namespace

double moment(std::span<const Expansion> factors, std::span<const MultiIndex> window,
              double sigma2) {
  const long double sigma = checked_sigma(sigma2);
  const auto w = sorted_window(window);
  std::vector<Compiled> compiled;
  compiled.reserve(factors.size());
  for (const auto& f : factors) compiled.emplace_back(f, w, sigma);

  const std::uint64_t count = std::uint64_t{1} << w.size();
  Accumulator sum;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    long double v = 1.0L;
    for (const auto& c : compiled) v *= c(static_cast<std::uint32_t>(bits));
    sum.add(v);
  }
  return static_cast<double>(sum.value() / static_cast<long double>(count));
}

double expectation(const Expansion& e, std::span<const MultiIndex> window, double sigma2) {
  return moment(std::span<const Expansion>(&e, 1), window, sigma2);
}

double inner(const Expansion& a, const Expansion& b, std::span<const MultiIndex> window,
             double sigma2) {
  const Expansion both[] = {a, b};
  return moment(both, window, sigma2);
}

double cond_deviation(const Expansion& e, const MultiIndex& cutoff, const Expansion& claimed,
                      std::span<const MultiIndex> window, double sigma2) {
  const long double sigma = checked_sigma(sigma2);
  const auto w = sorted_window(window);
  const Compiled value(e, w, sigma);
  const Compiled claim(claimed, w, sigma);

  // Measurable sites are the "outer" bits fixed by the conditioning.
  std::uint32_t outer_mask = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (leq(w[i], cutoff)) outer_mask |= 1u << i;
  }
  const std::uint32_t inner_mask = static_cast<std::uint32_t>((std::uint64_t{1} << w.size()) - 1) &
                                   ~outer_mask;
  const long double inner_count = std::ldexp(1.0L, std::popcount(inner_mask));

  long double worst = 0.0L;
  // Enumerate outer patterns as submasks of outer_mask, inner patterns as submasks of inner_mask.
  std::uint32_t outer = 0;
  while (true) {
    Accumulator sum;
    std::uint32_t in = 0;
    while (true) {
      sum.add(value(outer | in));
      if (in == inner_mask) break;
      in = (in - inner_mask) & inner_mask;
    }
    const long double average = sum.value() / inner_count;
    in = 0;
    while (true) {
      worst = std::max(worst, std::abs(claim(outer | in) - average));
      if (in == inner_mask) break;
      in = (in - inner_mask) & inner_mask;
    }
    if (outer == outer_mask) break;
    outer = (outer - outer_mask) & outer_mask;
  }
  return static_cast<double>(worst);
}

bool cond_check(const Expansion& e, const MultiIndex& cutoff, std::span<const MultiIndex> window,
                double tolerance) {
  const double scale = std::max(1.0, [&] {
    double s = 0.0;
    for (const auto& [m, c] : e.terms()) s += std::abs(c);
    return s;
  }());
  return cond_deviation(e, cutoff, cond_expect(e, cutoff), window) <= tolerance * scale;
}

std::vector<MultiIndex> window_of(std::span<const Expansion> es) {
  std::vector<MultiIndex> sites;
  for (const auto& e : es) {
    auto s = e.support_sites();
    sites.insert(sites.end(), s.begin(), s.end());
  }
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

}  // namespace orthomart::oracle
