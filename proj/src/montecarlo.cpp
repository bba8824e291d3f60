#include "orthomart/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "orthomart/criteria.hpp"

namespace orthomart {

namespace {

/// Window and compiled D terms shared by every replicate.
class PairSimulator {
 public:
  PairSimulator(const FieldModel& model, const Expansion& d, const Rectangle& rect)
      : model_(model), rect_(rect), one_(MultiIndex::ones(model.dim())) {
    require_same_dim(model.max_lag(), rect.upper());
    if (const auto dd = d.dim(); dd && *dd != model.dim()) {
      throw DimensionMismatch("D and model dimensions differ");
    }
    window_ = field_window(model, rect);
    for (const auto& [mono, c] : d.terms()) {
      if (mono.degree() == 0) {
        // Constant term of D contributes the same amount to every cell.
        d_constant_ += c;
        continue;
      }
      for (const auto& site : mono.sites()) {
        window_.lo = meet(window_.lo, site);
        window_.hi = join(window_.hi, site + (rect.upper() - one_));
      }
      d_terms_.push_back({c, mono});
    }
    if (window_.size() > kDefaultWindowBudget) {
      throw WindowBudgetExceeded("innovation window of " + std::to_string(window_.size()) +
                                 " sites exceeds the budget");
    }
  }

  PairValue run(std::uint64_t seed, std::uint64_t stream) const {
    const auto grid = draw_innovations(model_.law(), window_, seed, stream);
    PairValue out;
    for_each_in_box(one_, rect_.upper(), [&](const MultiIndex& u) {
      out.s += evaluate_term(model_, u, grid);
      const MultiIndex by = u - one_;
      double m = d_constant_;
      for (const auto& [c, mono] : d_terms_) {
        double v = c;
        for (const auto& site : mono.sites()) v *= grid.at(site + by);
        m += v;
      }
      out.m += m;
    });
    return out;
  }

 private:
  const FieldModel& model_;
  Rectangle rect_;
  MultiIndex one_;
  Box window_;
  double d_constant_ = 0.0;
  std::vector<std::pair<double, Monomial>> d_terms_;
};

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double unbiased_variance(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

PairValue simulate_pair(const FieldModel& model, const Expansion& d, const Rectangle& rect,
                        std::uint64_t seed, std::uint64_t stream) {
  return PairSimulator(model, d, rect).run(seed, stream);
}

std::vector<PairValue> simulate_replicates(const FieldModel& model, const Expansion& d,
                                           const Rectangle& rect, std::size_t count,
                                           std::uint64_t seed, unsigned threads) {
  const PairSimulator sim(model, d, rect);
  std::vector<PairValue> out(count);
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1)));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) out[r] = sim.run(seed, r);
    return out;
  }
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t r = t; r < count; r += threads) out[r] = sim.run(seed, r);
      });
    }
  }
  return out;
}

ErrorEstimate summarize_error(const Rectangle& rect, std::span<const PairValue> draws,
                              std::uint64_t seed) {
  if (draws.size() < 2) throw std::invalid_argument("error estimate needs at least 2 replicates");
  std::vector<double> err;
  err.reserve(draws.size());
  const double cells = static_cast<double>(rect.cells());
  for (const auto& p : draws) err.push_back((p.s - p.m) * (p.s - p.m) / cells);
  ErrorEstimate out{.rect = rect};
  out.replicates = draws.size();
  out.seed = seed;
  out.mc_error_per_cell = mean_of(err);
  out.standard_error =
      std::sqrt(unbiased_variance(err, out.mc_error_per_cell) / static_cast<double>(err.size()));
  return out;
}

ErrorEstimate estimate_error(const FieldModel& model, const Expansion& d, const Rectangle& rect,
                             std::size_t replicates, std::uint64_t seed, unsigned threads) {
  if (replicates < 2) throw std::invalid_argument("estimate_error needs replicates >= 2");
  const auto draws = simulate_replicates(model, d, rect, replicates, seed, threads);
  return summarize_error(rect, draws, seed);
}

CltReport summarize_clt(const Rectangle& rect, std::span<const PairValue> draws,
                        std::uint64_t seed, double target_variance, double exact_variance_ratio) {
  std::vector<double> z;
  z.reserve(draws.size());
  const double root = std::sqrt(static_cast<double>(rect.cells()));
  for (const auto& p : draws) z.push_back(p.s / root);
  CltReport out{.rect = rect};
  out.replicates = draws.size();
  out.seed = seed;
  out.empirical_mean = mean_of(z);
  out.empirical_variance = unbiased_variance(z, out.empirical_mean);
  out.target_variance = target_variance;
  out.exact_variance_ratio = exact_variance_ratio;
  if (target_variance > 0.0) {
    out.ks_statistic = ks_statistic(z, target_variance);
  } else {
    out.degenerate_variance = true;
  }
  return out;
}

CltReport clt_experiment(const FieldModel& model, const Rectangle& rect, std::size_t replicates,
                         std::uint64_t seed, unsigned threads, const std::optional<Expansion>& d) {
  if (replicates < 100) throw std::invalid_argument("clt_experiment needs replicates >= 100");
  const Expansion target = d ? *d : stabilized_limit(model);
  const auto draws = simulate_replicates(model, target, rect, replicates, seed, threads);
  return summarize_clt(rect, draws, seed, norm2(target, model.sigma2()),
                       exact_variance_ratio(model, rect));
}

double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double ks_statistic(std::span<const double> samples, double variance) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  if (!(variance > 0.0)) throw std::invalid_argument("ks_statistic: variance must be positive");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) throw std::invalid_argument("ks_statistic: non-finite sample");
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i], variance);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

}  // namespace orthomart
