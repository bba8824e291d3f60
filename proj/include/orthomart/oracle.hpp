#pragma once

// Brute-force enumeration oracle. Innovations are Rademacher (+-sigma, each with
// probability 1/2), so every expectation over a finite window is an exact finite
// average over all 2^|window| sign assignments. Independent of the algebra's
// filtering rules: expansions are only ever evaluated numerically here.

#include <cstddef>
#include <span>
#include <vector>

#include "orthomart/expansion.hpp"

namespace orthomart::oracle {

inline constexpr std::size_t kMaxWindow = 24;

class WindowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// E[f_1 * ... * f_k] by enumeration. Repeated sites across factors are allowed
/// (xi^2 = sigma2 under Rademacher), so products of expansions are fine here.
double moment(std::span<const Expansion> factors, std::span<const MultiIndex> window,
              double sigma2 = 1.0);

/// E[e]; must equal e.constant_term().
double expectation(const Expansion& e, std::span<const MultiIndex> window, double sigma2 = 1.0);

/// E[a * b]; must equal inner(a, b, sigma2).
double inner(const Expansion& a, const Expansion& b, std::span<const MultiIndex> window,
             double sigma2 = 1.0);

/// Largest deviation between `claimed` and the definitional conditional
/// expectation of e given the window sites <= cutoff, over every assignment.
/// `claimed` is evaluated on full assignments, so a non-measurable claim shows up
/// as a deviation.
double cond_deviation(const Expansion& e, const MultiIndex& cutoff, const Expansion& claimed,
                      std::span<const MultiIndex> window, double sigma2 = 1.0);

/// True iff cond_expect(e, cutoff) matches the enumerated conditional average.
bool cond_check(const Expansion& e, const MultiIndex& cutoff, std::span<const MultiIndex> window,
                double tolerance = 1e-12);

/// Union of the support sites of the given expansions, sorted.
std::vector<MultiIndex> window_of(std::span<const Expansion> es);

}  // namespace orthomart::oracle
