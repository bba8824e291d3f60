#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orthomart/expansion.hpp"
#include "orthomart/models.hpp"

namespace orthomart {

class WindowBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultWindowBudget = 50'000'000;

/// S_n and M_n evaluated on one innovation draw.
struct PairValue {
  double s = 0;
  double m = 0;
};

/// Draws innovations for replicate `stream` of `seed` on a window covering every
/// site used by S_n and by the shifted copies of D, then evaluates both. S comes
/// from the model's terms, M from the shifted D terms.
PairValue simulate_pair(const FieldModel& model, const Expansion& d, const Rectangle& rect,
                        std::uint64_t seed, std::uint64_t stream = 0);

/// simulate_pair for replicates 0..count-1, split over `threads` workers. The result
/// is indexed by replicate and does not depend on the thread count.
std::vector<PairValue> simulate_replicates(const FieldModel& model, const Expansion& d,
                                           const Rectangle& rect, std::size_t count,
                                           std::uint64_t seed, unsigned threads = 1);

struct ErrorEstimate {
  Rectangle rect;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double mc_error_per_cell = 0;  // mean of (S - M)^2 / |n|
  double standard_error = 0;
  std::optional<double> exact_value{};
};

ErrorEstimate summarize_error(const Rectangle& rect, std::span<const PairValue> draws,
                              std::uint64_t seed);

/// Monte Carlo estimate of ||S_n - M_n||^2 / |n|; replicates >= 2.
ErrorEstimate estimate_error(const FieldModel& model, const Expansion& d, const Rectangle& rect,
                             std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

struct CltReport {
  Rectangle rect;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double empirical_mean = 0;      // of S_n / sqrt(|n|)
  double empirical_variance = 0;  // unbiased
  double target_variance = 0;     // ||D||^2
  double exact_variance_ratio = 0;
  std::optional<double> ks_statistic{};  // empty when the target variance is zero
  bool degenerate_variance = false;
};

CltReport summarize_clt(const Rectangle& rect, std::span<const PairValue> draws,
                        std::uint64_t seed, double target_variance, double exact_variance_ratio);

/// Samples S_n / sqrt(|n|) and compares them with N(0, ||D||^2). D defaults to the
/// exact Cesaro limit of the model. replicates >= 100.
CltReport clt_experiment(const FieldModel& model, const Rectangle& rect, std::size_t replicates,
                         std::uint64_t seed, unsigned threads = 1,
                         const std::optional<Expansion>& d = std::nullopt);

/// Normal(0, variance) distribution function.
double normal_cdf(double x, double variance);

/// Two-sided Kolmogorov-Smirnov distance between the samples and N(0, variance).
double ks_statistic(std::span<const double> samples, double variance);

/// KS critical values used as acceptance thresholds.
inline double ks_critical_001(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }
inline double ks_critical_0001(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

}  // namespace orthomart
