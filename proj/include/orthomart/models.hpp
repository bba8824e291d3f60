#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "orthomart/expansion.hpp"
#include "orthomart/multi_index.hpp"
#include "orthomart/philox.hpp"

namespace orthomart {

enum class LawKind { rademacher, gaussian, uniform };

std::string to_string(LawKind kind);
LawKind law_kind_from_string(const std::string& name);

/// Centered i.i.d. innovation law with variance sigma2.
class InnovationLaw {
 public:
  InnovationLaw() = default;
  InnovationLaw(LawKind kind, double sigma2);

  LawKind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }
  /// E xi^4: sigma^4 (rademacher), 3 sigma^4 (gaussian), 1.8 sigma^4 (uniform).
  double fourth_moment() const;
  double draw(CounterRng& rng) const;

  friend bool operator==(const InnovationLaw&, const InnovationLaw&) = default;

 private:
  LawKind kind_ = LawKind::rademacher;
  double sigma2_ = 1.0;
};

/// Moving-average coefficients a_j, j >= 0 componentwise. Duplicate lags are summed
/// and zero coefficients dropped.
class LinearKernel {
 public:
  struct Entry {
    MultiIndex lag;
    double coef;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit LinearKernel(std::size_t dim, std::vector<Entry> entries = {});

  std::size_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  LinearKernel scaled(double s) const;

  friend bool operator==(const LinearKernel&, const LinearKernel&) = default;

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

/// Second-order Volterra coefficients a_{u,v}, u, v >= 0, u != v.
class VolterraKernel {
 public:
  struct Entry {
    MultiIndex u;
    MultiIndex v;
    double coef;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit VolterraKernel(std::size_t dim, std::vector<Entry> entries = {});

  std::size_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }

  friend bool operator==(const VolterraKernel&, const VolterraKernel&) = default;

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

using Kernel = std::variant<LinearKernel, VolterraKernel>;

class FieldModel {
 public:
  FieldModel(Kernel kernel, InnovationLaw law);

  std::size_t dim() const { return dim_; }
  const Kernel& kernel() const { return kernel_; }
  const InnovationLaw& law() const { return law_; }
  double sigma2() const { return law_.sigma2(); }
  bool is_linear() const { return std::holds_alternative<LinearKernel>(kernel_); }
  const LinearKernel& linear() const;
  const VolterraKernel& volterra() const;
  /// Componentwise maximum lag over all kernel entries (zero for an empty kernel).
  const MultiIndex& max_lag() const { return max_lag_; }

  friend bool operator==(const FieldModel&, const FieldModel&) = default;

 private:
  Kernel kernel_;
  InnovationLaw law_;
  std::size_t dim_;
  MultiIndex max_lag_;
};

/// Summation window 1 <= u <= upper.
class Rectangle {
 public:
  explicit Rectangle(MultiIndex upper);

  const MultiIndex& upper() const { return upper_; }
  std::size_t dim() const { return upper_.dim(); }
  std::int64_t cells() const { return upper_.volume(); }
  std::string to_string() const;  // e.g. "8x8"

  friend bool operator==(const Rectangle&, const Rectangle&) = default;

 private:
  MultiIndex upper_;
};

class TermBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTermBudget = 10'000'000;

/// X_k as an exact expansion.
Expansion term_expansion(const FieldModel& model, const MultiIndex& k);

/// S_n = sum over 1 <= u <= n of X_u. Throws TermBudgetExceeded when the number of
/// generated terms would exceed `budget`.
Expansion partial_sum(const FieldModel& model, const Rectangle& rect,
                      std::size_t budget = kDefaultTermBudget);

/// ||S_n||^2 / |n|.
double exact_variance_ratio(const FieldModel& model, const Rectangle& rect);

/// Innovation values on a box of sites.
struct InnovationGrid {
  Box box;
  std::vector<double> values;

  double at(const MultiIndex& u) const { return values[static_cast<std::size_t>(box.offset(u))]; }
};

/// Draws the law on every site of `box`, row-major, from stream `stream` of `seed`.
InnovationGrid draw_innovations(const InnovationLaw& law, const Box& box, std::uint64_t seed,
                                std::uint64_t stream);

/// Sites touched by X_u for 1 <= u <= n.
Box field_window(const FieldModel& model, const Rectangle& rect);

/// X_u evaluated on a drawn grid (the grid must cover u - lags).
double evaluate_term(const FieldModel& model, const MultiIndex& u, const InnovationGrid& grid);

struct FieldSample {
  Rectangle rect;
  std::vector<double> values;  // row-major over 1..n, last coordinate fastest
};

/// One realization of (X_u) on the rectangle; a pure function of (model, rect, seed, stream).
FieldSample sample(const FieldModel& model, const Rectangle& rect, std::uint64_t seed,
                   std::uint64_t stream = 0);

}  // namespace orthomart
