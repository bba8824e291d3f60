#include "orthomart/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orthomart {

std::string to_string(Provenance p) {
  return p == Provenance::cesaro_limit ? "cesaro-limit" : "user-supplied";
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::exact: return "exact";
    case Trend::decreasing: return "decreasing";
    case Trend::plateau: return "plateau";
    case Trend::fail: return "fail";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MartingaleCandidate user_candidate(const Expansion& d, std::size_t dim) {
  const MultiIndex base = MultiIndex::ones(dim);
  if (const auto dd = d.dim(); dd && *dd != dim) {
    throw DimensionMismatch("candidate D has dimension " + std::to_string(*dd));
  }
  if (!(project(d, base) == d)) {
    throw NotMartingaleDifference("D = " + d.to_string() +
                                  " is not a martingale difference at " + base.to_string());
  }
  MartingaleCandidate c;
  c.d_expansion = d;
  c.provenance = Provenance::user_supplied;
  return c;
}

Expansion projection_of_sums(const FieldModel& model, const MultiIndex& j) {
  return project(partial_sum(model, Rectangle(j)), MultiIndex::ones(model.dim()));
}

ProjectionTable::ProjectionTable(const FieldModel& model)
    : box_{MultiIndex::ones(model.dim()), MultiIndex::ones(model.dim()) + model.max_lag()},
      saturation_(box_.hi) {
  const MultiIndex base = MultiIndex::ones(model.dim());
  values_.resize(static_cast<std::size_t>(box_.size()));
  for_each_in_box(box_.lo, box_.hi, [&](const MultiIndex& u) {
    values_[static_cast<std::size_t>(box_.offset(u))] = project(term_expansion(model, u), base);
  });
  // Inclusive prefix sums along each axis in turn.
  for (std::size_t axis = 0; axis < model.dim(); ++axis) {
    for_each_in_box(box_.lo, box_.hi, [&](const MultiIndex& v) {
      if (v[axis] == box_.lo[axis]) return;
      const auto prev = box_.offset(v.with(axis, v[axis] - 1));
      values_[static_cast<std::size_t>(box_.offset(v))] += values_[static_cast<std::size_t>(prev)];
    });
  }
}

const Expansion& ProjectionTable::at(const MultiIndex& j) const {
  if (!leq(MultiIndex::ones(j.dim()), j)) {
    throw std::invalid_argument("P_1(S_j) needs j >= 1, got " + j.to_string());
  }
  return values_[static_cast<std::size_t>(box_.offset(meet(j, saturation_)))];
}

Expansion cesaro_projection(const ProjectionTable& table, const Rectangle& n) {
  std::vector<Expansion::Term> terms;
  table.for_each_weighted(n, [&](const Expansion& q, double w) {
    for (const auto& [m, c] : q.terms()) terms.emplace_back(m, c * w);
  });
  return Expansion(std::move(terms)) / static_cast<double>(n.cells());
}

Expansion cesaro_projection(const FieldModel& model, const Rectangle& n) {
  return cesaro_projection(ProjectionTable(model), n);
}

Expansion stabilized_limit(const FieldModel& model) {
  const ProjectionTable table(model);
  return table.at(table.saturation());
}

void validate_ladder(std::span<const Rectangle> ladder, std::size_t dim) {
  if (ladder.empty()) throw std::invalid_argument("ladder is empty");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k].dim() != dim) {
      throw DimensionMismatch("ladder rectangle " + ladder[k].to_string() + " has wrong dimension");
    }
    if (k > 0 && (!leq(ladder[k - 1].upper(), ladder[k].upper()) || ladder[k - 1] == ladder[k])) {
      throw std::invalid_argument("ladder is not increasing at " + ladder[k].to_string());
    }
  }
}

MartingaleCandidate candidate_D(const FieldModel& model, std::span<const Rectangle> ladder) {
  validate_ladder(ladder, model.dim());
  const ProjectionTable table(model);
  MartingaleCandidate out;
  out.provenance = Provenance::cesaro_limit;
  out.ladder.assign(ladder.begin(), ladder.end());
  Expansion previous;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    Expansion current = cesaro_projection(table, ladder[k]);
    if (k > 0) out.step_distances.push_back(std::sqrt(norm2(current - previous, model.sigma2())));
    previous = std::move(current);
  }
  const auto& dist = out.step_distances;
  if (dist.size() >= 2) {
    const double last = dist.back();
    const double before = dist[dist.size() - 2];
    out.no_convergence_evidence = last > 0.0 && last >= before;
  }
  out.d_expansion = std::move(previous);
  out.limit = table.at(table.saturation());
  const MultiIndex base = MultiIndex::ones(model.dim());
  if (!(project(out.d_expansion, base) == out.d_expansion)) {
    throw std::logic_error("Cesaro candidate is not a martingale difference");
  }
  return out;
}

double defdlim2_average(const ProjectionTable& table, const Expansion& d, const Rectangle& n,
                        double sigma2) {
  double sum = 0.0;
  table.for_each_weighted(n, [&](const Expansion& q, double w) { sum += w * norm2(q - d, sigma2); });
  return sum / static_cast<double>(n.cells());
}

double defdlim2_average(const FieldModel& model, const Expansion& d, const Rectangle& n) {
  return defdlim2_average(ProjectionTable(model), d, n, model.sigma2());
}

namespace {

std::vector<double> regularity_from_sum(const Expansion& s, const Rectangle& n, double sigma2) {
  std::vector<double> out;
  for (std::size_t axis = 0; axis < n.dim(); ++axis) {
    out.push_back(norm2(cond_expect(s, n.upper().with(axis, 0)), sigma2) /
                  static_cast<double>(n.cells()));
  }
  return out;
}

DecompositionCheck decomposition_from_sum(const ProjectionTable& table, const Expansion& s,
                                          const Expansion& d, const Rectangle& n, double sigma2) {
  DecompositionCheck out;
  const std::size_t dim = n.dim();
  const MultiIndex one = MultiIndex::ones(dim);
  const Expansion m = build_martingale(d, n);
  out.lhs = norm2(s - m, sigma2);

  // Group S by the componentwise max of each monomial; P_i(S) is the group at i.
  std::map<MultiIndex, std::vector<Expansion::Term>> groups;
  std::vector<Expansion::Term> remainder_terms;
  const Box window{one, n.upper()};
  for (const auto& t : s.terms()) {
    const auto top = t.first.top();
    if (top && window.contains(*top)) {
      groups[*top].push_back(t);
    } else {
      remainder_terms.push_back(t);
    }
  }
  for_each_in_box(one, n.upper(), [&](const MultiIndex& i) {
    const Expansion di = shift(d, i - one);
    auto it = groups.find(i);
    const Expansion pi = it == groups.end() ? Expansion{} : Expansion::from_sorted(it->second);
    out.projective += norm2(pi - di, sigma2);
  });
  out.remainder = norm2(Expansion::from_sorted(std::move(remainder_terms)), sigma2);
  out.projective_stationary =
      defdlim2_average(table, d, n, sigma2) * static_cast<double>(n.cells());

  // ||R||^2 = sum over nonempty axis sets A of (-1)^{|A|+1} ||E_{n_A} S||^2.
  for (std::uint32_t mask = 1; mask < (1u << dim); ++mask) {
    MultiIndex cutoff = n.upper();
    int bits = 0;
    for (std::size_t a = 0; a < dim; ++a) {
      if (mask & (1u << a)) {
        cutoff[a] = 0;
        ++bits;
      }
    }
    const double v = norm2(cond_expect(s, cutoff), sigma2);
    out.remainder_formula += (bits % 2 == 1) ? v : -v;
    if (bits == 1) out.e_face_norm2.push_back(v);
    if (mask == (1u << dim) - 1) out.e_corner_norm2 = v;
  }
  return out;
}

}  // namespace

std::vector<double> regularity_norms(const FieldModel& model, const Rectangle& n) {
  return regularity_from_sum(partial_sum(model, n), n, model.sigma2());
}

VarianceComparison variance_ratio_check(const FieldModel& model, const Expansion& d,
                                        const Rectangle& n) {
  return {exact_variance_ratio(model, n), norm2(d, model.sigma2())};
}

Expansion build_martingale(const Expansion& d, const Rectangle& n) {
  const MultiIndex one = MultiIndex::ones(n.dim());
  if (const auto dd = d.dim(); dd && *dd != n.dim()) {
    throw DimensionMismatch("D and rectangle dimensions differ");
  }
  std::vector<Expansion::Term> terms;
  terms.reserve(d.size() * static_cast<std::size_t>(n.cells()));
  for_each_in_box(one, n.upper(), [&](const MultiIndex& u) {
    const MultiIndex by = u - one;
    for (const auto& [m, c] : d.terms()) terms.emplace_back(m.shifted(by), c);
  });
  return Expansion(std::move(terms));
}

double approx_error(const FieldModel& model, const Expansion& d, const Rectangle& n) {
  return norm2(partial_sum(model, n) - build_martingale(d, n), model.sigma2()) /
         static_cast<double>(n.cells());
}

double DecompositionCheck::residual() const { return std::abs(lhs - (projective + remainder)); }

double DecompositionCheck::max_discrepancy() const {
  return std::max({residual(), std::abs(projective - projective_stationary),
                   std::abs(remainder - remainder_formula)});
}

DecompositionCheck decomposition(const FieldModel& model, const Expansion& d, const Rectangle& n) {
  return decomposition_from_sum(ProjectionTable(model), partial_sum(model, n), d, n,
                                model.sigma2());
}

double decomposition_residual(const FieldModel& model, const Expansion& d, const Rectangle& n) {
  return decomposition(model, d, n).residual();
}

double linear_b(const FieldModel& model, const MultiIndex& j, BConvention convention) {
  const MultiIndex one = MultiIndex::ones(model.dim());
  if (!leq(one, j)) throw std::invalid_argument("b_j needs j >= 1");
  double b = 0.0;
  for (const auto& e : model.linear().entries()) {
    const bool in_range = convention == BConvention::derived
                              ? leq(e.lag, j - one)
                              : (leq(one, e.lag) && leq(e.lag, j));
    if (in_range) b += e.coef;
  }
  return b;
}

namespace {

/// Number of j with lower <= j <= n (componentwise), as a double.
double count_above(const MultiIndex& lower, const Rectangle& n) {
  double count = 1.0;
  for (std::size_t i = 0; i < n.dim(); ++i) {
    const auto lo = std::max<std::int64_t>(lower[i], 1);
    const auto c = n.upper()[i] - lo + 1;
    if (c <= 0) return 0.0;
    count *= static_cast<double>(c);
  }
  return count;
}

}  // namespace

std::vector<double> linear_cesaro(const FieldModel& model, std::span<const Rectangle> ladder,
                                  BConvention convention) {
  const MultiIndex one = MultiIndex::ones(model.dim());
  std::vector<double> out;
  for (const auto& n : ladder) {
    // sum_j b_j = sum_k a_k * #{j in [1, n] : k in range of b_j}.
    double sum = 0.0;
    for (const auto& e : model.linear().entries()) {
      if (convention == BConvention::derived) {
        sum += e.coef * count_above(e.lag + one, n);
      } else if (leq(one, e.lag)) {
        sum += e.coef * count_above(e.lag, n);
      }
    }
    out.push_back(sum / static_cast<double>(n.cells()));
  }
  return out;
}

VolterraCoefficients volterra_cnw(const FieldModel& model, const Rectangle& n) {
  const auto& kernel = model.volterra();
  const MultiIndex one = MultiIndex::ones(model.dim());
  const MultiIndex zero(model.dim(), 0);
  VolterraCoefficients out;

  // X_k contributes a_{u,v} xi_{k-u} xi_{k-v}; one factor at the base point forces
  // k = 1 + u (other factor at 1 + u - v) or k = 1 + v. Each k is counted once for
  // every j with k <= j <= n.
  for (const auto& e : kernel.entries()) {
    const MultiIndex w_u = e.u - e.v;
    if (leq(w_u, zero)) out.literal_table[w_u] += e.coef * count_above(one + e.u, n);
    const MultiIndex w_v = e.v - e.u;
    if (leq(w_v, zero)) out.literal_table[w_v] += e.coef * count_above(one + e.v, n);
  }
  std::vector<Expansion::Term> terms;
  for (auto& [w, c] : out.literal_table) {
    c /= static_cast<double>(n.cells());
    terms.emplace_back(Monomial(one, one + w), c);
  }
  std::erase_if(out.literal_table, [](const auto& kv) { return kv.second == 0.0; });
  out.literal = Expansion(std::move(terms));

  out.projection_based = cesaro_projection(model, n);
  for (const auto& [m, c] : out.projection_based.terms()) {
    if (m.degree() == 2 && !(m.site(0) == one) && !(m.site(1) == one)) out.cross_terms.push_back(m);
  }
  const double scale = std::max(1.0, std::sqrt(norm2(out.projection_based, 1.0)));
  out.disagree = !out.cross_terms.empty() ||
                 max_abs_difference(out.literal, out.projection_based) > 1e-12 * scale;
  return out;
}

double volterra_cauchy_gap(const FieldModel& model, const Rectangle& n, const Rectangle& m) {
  if (!leq(m.upper(), n.upper())) throw std::invalid_argument("Cauchy gap needs m <= n");
  return norm2(volterra_cnw(model, n).literal - volterra_cnw(model, m).literal, 1.0);
}

double volterra_cauchy_gap_projection(const FieldModel& model, const Rectangle& n,
                                      const Rectangle& m) {
  if (!leq(m.upper(), n.upper())) throw std::invalid_argument("Cauchy gap needs m <= n");
  const ProjectionTable table(model);
  return norm2(cesaro_projection(table, n) - cesaro_projection(table, m), 1.0);
}

Trend classify_trend(std::span<const double> values, double tolerance, double scale) {
  if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    return Trend::exact;
  }
  if (values.size() < 3) return Trend::inconclusive;
  const double a = values[values.size() - 3];
  const double b = values[values.size() - 2];
  const double c = values.back();
  const double threshold = tolerance * scale;
  if (a > b && b > c) {
    if (c <= threshold) return Trend::decreasing;
    // Aitken extrapolation of the last three values. The tracked quantities are
    // nonnegative, so an extrapolated limit at or below zero also counts.
    const double d1 = b - a;
    const double d2 = c - b;
    if (d2 - d1 > 0.0 && c - d2 * d2 / (d2 - d1) <= threshold) return Trend::decreasing;
  }
  if (c > threshold) {
    const double hi = std::max({a, b, c});
    const double lo = std::min({a, b, c});
    if (hi - lo <= tolerance * hi) return Trend::plateau;
    if (c > a) return Trend::fail;
  }
  return Trend::inconclusive;
}

namespace {

Trend combine(std::initializer_list<Trend> parts, std::span<const Trend> more = {}) {
  std::vector<Trend> all(parts);
  all.insert(all.end(), more.begin(), more.end());
  auto any = [&](Trend t) { return std::find(all.begin(), all.end(), t) != all.end(); };
  if (std::all_of(all.begin(), all.end(), [](Trend t) { return t == Trend::exact; })) {
    return Trend::exact;
  }
  if (std::all_of(all.begin(), all.end(),
                  [](Trend t) { return t == Trend::exact || t == Trend::decreasing; })) {
    return Trend::decreasing;
  }
  if (any(Trend::fail)) return Trend::fail;
  if (any(Trend::plateau)) return Trend::plateau;
  return Trend::inconclusive;
}

std::string summary_of(Trend t) {
  switch (t) {
    case Trend::exact: return "approximation holds (exact)";
    case Trend::decreasing: return "approximation holds";
    case Trend::plateau:
    case Trend::fail: return "approximation fails";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace

CriterionReport evaluate_criteria(const FieldModel& model, std::span<const Rectangle> ladder,
                                  double tolerance, const std::optional<Expansion>& user_d) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  validate_ladder(ladder, model.dim());
  const double sigma2 = model.sigma2();
  CriterionReport report;
  report.dim = model.dim();
  report.sigma2 = sigma2;
  report.tolerance = tolerance;
  report.candidate = candidate_D(model, ladder);
  report.d_used = user_d ? user_candidate(*user_d, model.dim()).d_expansion : *report.candidate.limit;
  const Expansion& d = report.d_used;
  const double d2 = norm2(d, sigma2);

  const ProjectionTable table(model);
  for (const auto& n : ladder) {
    const Expansion s = partial_sum(model, n);
    const double cells = static_cast<double>(n.cells());
    CriterionRow row{n};
    const auto dec = decomposition_from_sum(table, s, d, n, sigma2);
    row.defdlim2_avg = dec.projective_stationary / cells;
    row.regularity = regularity_from_sum(s, n, sigma2);
    row.variance_ratio = norm2(s, sigma2) / cells;
    row.d_norm2 = d2;
    row.cesaro_distance = std::sqrt(norm2(cesaro_projection(table, n) - d, sigma2));
    row.error_per_cell = dec.lhs / cells;
    row.remainder_per_cell = dec.remainder / cells;
    row.decomposition_residual = dec.max_discrepancy();
    report.rows.push_back(std::move(row));
  }

  const double scale = [&] {
    const double s = std::max(report.rows.back().variance_ratio, d2);
    return s > 0.0 ? s : 1.0;
  }();
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : report.rows) v.push_back(get(r));
    return v;
  };
  auto& verdicts = report.verdicts;
  verdicts.defdlim2 = classify_trend(column([](const CriterionRow& r) { return r.defdlim2_avg; }),
                                     tolerance, scale);
  for (std::size_t axis = 0; axis < model.dim(); ++axis) {
    verdicts.regularity.push_back(classify_trend(
        column([axis](const CriterionRow& r) { return r.regularity[axis]; }), tolerance, scale));
  }
  verdicts.variance_gap = classify_trend(
      column([](const CriterionRow& r) { return std::abs(r.variance_ratio - r.d_norm2); }),
      tolerance, scale);
  verdicts.cesaro = classify_trend(
      column([](const CriterionRow& r) { return r.cesaro_distance * r.cesaro_distance; }),
      tolerance, scale);
  verdicts.error = classify_trend(column([](const CriterionRow& r) { return r.error_per_cell; }),
                                  tolerance, scale);
  verdicts.regularity_route = combine({verdicts.defdlim2}, verdicts.regularity);
  verdicts.variance_route = combine({verdicts.defdlim2, verdicts.variance_gap});
  verdicts.summary = summary_of(verdicts.regularity_route);

  auto& coeffs = report.coefficients;
  if (model.is_linear()) {
    coeffs.linear_cesaro = linear_cesaro(model, ladder);
  } else {
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      coeffs.volterra_tables.push_back(volterra_cnw(model, ladder[k]));
      coeffs.volterra_disagreement |= coeffs.volterra_tables.back().disagree;
      if (k > 0) {
        coeffs.volterra_gaps.push_back(
            norm2(coeffs.volterra_tables[k].literal - coeffs.volterra_tables[k - 1].literal, 1.0));
      }
    }
  }
  return report;
}

}  // namespace orthomart
