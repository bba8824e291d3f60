#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orthomart/expansion.hpp"
#include "orthomart/models.hpp"

namespace orthomart {

enum class Provenance { cesaro_limit, user_supplied };
std::string to_string(Provenance p);

/// Candidate martingale difference D at the base point 1 = (1, ..., 1).
struct MartingaleCandidate {
  Expansion d_expansion;
  Provenance provenance = Provenance::user_supplied;
  /// Rectangles the Cesaro candidate was evaluated on, and the L^2 distances between
  /// successive Cesaro averages along them.
  std::vector<Rectangle> ladder;
  std::vector<double> step_distances;
  /// Set when the step distances fail to decrease (no convergence evidence).
  bool no_convergence_evidence = false;
  /// Exact Cesaro limit P_1(S_L), L = 1 + max lag. For finite kernels the projected
  /// partial sums stop changing once j >= L, so the Cesaro averages converge to it.
  std::optional<Expansion> limit;
};

class NotMartingaleDifference : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Wraps a user expansion; throws NotMartingaleDifference unless project(d, 1) == d.
MartingaleCandidate user_candidate(const Expansion& d, std::size_t dim);

/// P_1(S_j) computed directly as project(partial_sum(model, j), 1).
Expansion projection_of_sums(const FieldModel& model, const MultiIndex& j);

/// Table of P_1(S_v) for 1 <= v <= L built by d-dimensional prefix sums of the
/// per-cell projections P_1(X_u). P_1(X_u) vanishes once some u_i exceeds L_i, so
/// P_1(S_j) = table(min(j, L)).
class ProjectionTable {
 public:
  explicit ProjectionTable(const FieldModel& model);

  const MultiIndex& saturation() const { return saturation_; }
  /// P_1(S_j) for any j >= 1.
  const Expansion& at(const MultiIndex& j) const;
  /// Calls fn(Q, weight) for the distinct values of P_1(S_j), 1 <= j <= n, with
  /// weight = number of j mapping to it. Weights sum to |n|.
  template <class Fn>
  void for_each_weighted(const Rectangle& n, Fn&& fn) const {
    MultiIndex top = meet(saturation_, n.upper());
    for_each_in_box(MultiIndex::ones(top.dim()), top, [&](const MultiIndex& v) {
      double w = 1.0;
      for (std::size_t i = 0; i < v.dim(); ++i) {
        if (v[i] == top[i]) w *= static_cast<double>(n.upper()[i] - top[i] + 1);
      }
      fn(at(v), w);
    });
  }

 private:
  Box box_;
  MultiIndex saturation_;
  std::vector<Expansion> values_;
};

/// (1/|n|) sum_{1<=j<=n} P_1(S_j).
Expansion cesaro_projection(const FieldModel& model, const Rectangle& n);
Expansion cesaro_projection(const ProjectionTable& table, const Rectangle& n);

/// Exact Cesaro limit P_1(S_L).
Expansion stabilized_limit(const FieldModel& model);

/// Cesaro candidate at the largest ladder rectangle. Ladder must be nonempty and
/// increasing.
MartingaleCandidate candidate_D(const FieldModel& model, std::span<const Rectangle> ladder);

/// (1/|n|) sum_{1<=j<=n} ||P_1(S_j) - D||^2.
double defdlim2_average(const FieldModel& model, const Expansion& d, const Rectangle& n);
double defdlim2_average(const ProjectionTable& table, const Expansion& d, const Rectangle& n,
                        double sigma2);

/// For each axis j: ||E_{n_j} S_n||^2 / |n| where n_j has coordinate j set to 0.
std::vector<double> regularity_norms(const FieldModel& model, const Rectangle& n);

struct VarianceComparison {
  double variance_ratio;  // ||S_n||^2 / |n|
  double d_norm2;         // ||D||^2
};
VarianceComparison variance_ratio_check(const FieldModel& model, const Expansion& d,
                                        const Rectangle& n);

/// M_n = sum_{1<=u<=n} shift(D, u - 1).
Expansion build_martingale(const Expansion& d, const Rectangle& n);

/// ||S_n - M_n||^2 / |n|.
double approx_error(const FieldModel& model, const Expansion& d, const Rectangle& n);

/// Pieces of the orthogonal decomposition of ||S_n - M_n||^2.
struct DecompositionCheck {
  double lhs = 0;                 // ||S - M||^2
  double projective = 0;          // sum_{i<=n} ||P_i(S) - D_i||^2
  double projective_stationary = 0;  // sum_{i<=n} ||P_1(S_i) - D||^2
  double remainder = 0;           // ||R||^2, R = S - sum_{i<=n} P_i(S)
  double remainder_formula = 0;   // inclusion-exclusion over ||E_{n_A} S||^2
  double e_corner_norm2 = 0;      // ||E_{0} S||^2
  std::vector<double> e_face_norm2;  // ||E_{n_j} S||^2 per axis

  /// |lhs - (projective + remainder)|.
  double residual() const;
  /// Largest of residual, |projective - projective_stationary|, |remainder - remainder_formula|.
  double max_discrepancy() const;
};
DecompositionCheck decomposition(const FieldModel& model, const Expansion& d, const Rectangle& n);
double decomposition_residual(const FieldModel& model, const Expansion& d, const Rectangle& n);

enum class BConvention {
  derived,        // b_j = sum_{0 <= k <= j-1} a_k, matches P_1(S_j) = b_j xi_1
  one_to_j,  // b_j = sum_{1 <= k <= j} a_k
};

double linear_b(const FieldModel& model, const MultiIndex& j,
                BConvention convention = BConvention::derived);
/// Cesaro means of b over each ladder rectangle.
std::vector<double> linear_cesaro(const FieldModel& model, std::span<const Rectangle> ladder,
                                  BConvention convention = BConvention::derived);

struct VolterraCoefficients {
  /// c_{n,w} from the closed-form case analysis (one factor sits at the base point).
  std::map<MultiIndex, double> literal_table;
  /// Same table as the expansion sum_w c_{n,w} xi_1 xi_{1+w}.
  Expansion literal;
  /// Coefficients of cesaro_projection(n) read off directly.
  Expansion projection_based;
  /// Monomials of projection_based with neither factor at the base point.
  std::vector<Monomial> cross_terms;
  /// True when the two tables differ.
  bool disagree = false;
};

VolterraCoefficients volterra_cnw(const FieldModel& model, const Rectangle& n);

/// sum_w (c_{n,w} - c_{m,w})^2 on the closed-form tables; requires m <= n.
double volterra_cauchy_gap(const FieldModel& model, const Rectangle& n, const Rectangle& m);
/// Same gap on the projection-based tables.
double volterra_cauchy_gap_projection(const FieldModel& model, const Rectangle& n,
                                      const Rectangle& m);

enum class Trend { exact, decreasing, plateau, fail, inconclusive };
std::string to_string(Trend t);

/// Finite-ladder limit policy. exact: all zero. decreasing: strictly decreasing over
/// the last three steps, with the final value or its Aitken extrapolation
/// <= tolerance * scale. plateau: final above
/// tolerance and the last three values within relative spread `tolerance`. fail:
/// final above tolerance and growing. inconclusive: anything else.
Trend classify_trend(std::span<const double> values, double tolerance, double scale);

struct CriterionRow {
  Rectangle grid;
  double defdlim2_avg = 0;
  std::vector<double> regularity{};
  double variance_ratio = 0;
  double d_norm2 = 0;
  double cesaro_distance = 0;  // ||C_n - D||
  double error_per_cell = 0;
  double remainder_per_cell = 0;
  double decomposition_residual = 0;
};

struct CriterionVerdicts {
  Trend defdlim2 = Trend::inconclusive;
  std::vector<Trend> regularity;
  Trend variance_gap = Trend::inconclusive;  // |variance_ratio - ||D||^2|
  Trend cesaro = Trend::inconclusive;
  Trend error = Trend::inconclusive;
  /// Combined verdict via defdlim2 + regularity.
  Trend regularity_route = Trend::inconclusive;
  /// Combined verdict via defdlim2 + variance limit.
  Trend variance_route = Trend::inconclusive;
  std::string summary;
};

struct CoefficientDiagnostics {
  // Linear models: running Cesaro means of b along the ladder.
  std::vector<double> linear_cesaro;
  // Volterra models: per-rectangle tables and gaps between successive rectangles.
  std::vector<VolterraCoefficients> volterra_tables;
  std::vector<double> volterra_gaps;
  bool volterra_disagreement = false;
};

struct CriterionReport {
  std::size_t dim = 0;
  double sigma2 = 1;
  double tolerance = 1e-2;
  MartingaleCandidate candidate;
  Expansion d_used;
  std::vector<CriterionRow> rows;
  CriterionVerdicts verdicts;
  CoefficientDiagnostics coefficients;
};

inline constexpr double kDefaultTolerance = 1e-2;

/// Evaluates every condition along the ladder. D is the user's candidate when given,
/// otherwise the exact Cesaro limit.
CriterionReport evaluate_criteria(const FieldModel& model, std::span<const Rectangle> ladder,
                                  double tolerance = kDefaultTolerance,
                                  const std::optional<Expansion>& user_d = std::nullopt);

/// Throws std::invalid_argument unless the ladder is nonempty, of the model's
/// dimension, and increasing (each step >= the previous componentwise, and distinct).
void validate_ladder(std::span<const Rectangle> ladder, std::size_t dim);

}  // namespace orthomart
