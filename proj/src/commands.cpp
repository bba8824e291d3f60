#include "orthomart/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "orthomart/number_format.hpp"
#include "orthomart/oracle.hpp"

namespace orthomart {

using nlohmann::json;

namespace {

std::string num(double x) { return format_double(x); }

json trend_list(const std::vector<Trend>& ts) {
  json out = json::array();
  for (Trend t : ts) out.push_back(to_string(t));
  return out;
}

json candidate_json(const MartingaleCandidate& c) {
  json ladder = json::array();
  for (const auto& r : c.ladder) ladder.push_back(r.to_string());
  json out = {{"d_expansion", c.d_expansion.to_string()},
              {"provenance", to_string(c.provenance)},
              {"ladder", ladder},
              {"step_distances", c.step_distances},
              {"no_convergence_evidence", c.no_convergence_evidence}};
  if (c.limit) out["limit"] = c.limit->to_string();
  return out;
}

std::string csv_check(const CriterionReport& report) {
  std::ostringstream os;
  os << "grid,defdlim2_avg";
  for (std::size_t i = 1; i <= report.dim; ++i) os << ",reg_" << i;
  os << ",variance_ratio,d_norm2,cesaro_distance,error_per_cell,remainder_per_cell,verdicts\n";
  for (const auto& r : report.rows) {
    os << r.grid.to_string() << ',' << num(r.defdlim2_avg);
    for (double g : r.regularity) os << ',' << num(g);
    os << ',' << num(r.variance_ratio) << ',' << num(r.d_norm2) << ',' << num(r.cesaro_distance)
       << ',' << num(r.error_per_cell) << ',' << num(r.remainder_per_cell) << ','
       << report.verdicts.summary << '\n';
  }
  return os.str();
}

std::string json_check(const CriterionReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"grid", r.grid.to_string()},
                    {"defdlim2_avg", r.defdlim2_avg},
                    {"regularity", r.regularity},
                    {"variance_ratio", r.variance_ratio},
                    {"d_norm2", r.d_norm2},
                    {"cesaro_distance", r.cesaro_distance},
                    {"error_per_cell", r.error_per_cell},
                    {"remainder_per_cell", r.remainder_per_cell},
                    {"decomposition_residual", r.decomposition_residual}});
  }
  const auto& v = report.verdicts;
  json verdicts = {{"defdlim2", to_string(v.defdlim2)},
                   {"regularity", trend_list(v.regularity)},
                   {"variance_gap", to_string(v.variance_gap)},
                   {"cesaro", to_string(v.cesaro)},
                   {"error", to_string(v.error)},
                   {"regularity_route", to_string(v.regularity_route)},
                   {"variance_route", to_string(v.variance_route)},
                   {"summary", v.summary}};
  const auto& c = report.coefficients;
  json coeffs = {{"linear_cesaro", c.linear_cesaro},
                 {"volterra_gaps", c.volterra_gaps},
                 {"volterra_disagreement", c.volterra_disagreement}};
  json tables = json::array();
  for (const auto& t : c.volterra_tables) {
    json cross = json::array();
    for (const auto& m : t.cross_terms) cross.push_back(Expansion({{m, 1.0}}).to_string());
    tables.push_back({{"literal", t.literal.to_string()},
                      {"projection_based", t.projection_based.to_string()},
                      {"cross_terms", cross},
                      {"disagree", t.disagree}});
  }
  coeffs["volterra_tables"] = tables;
  json root = {{"dim", report.dim},
               {"sigma2", report.sigma2},
               {"tolerance", report.tolerance},
               {"candidate", candidate_json(report.candidate)},
               {"d_used", report.d_used.to_string()},
               {"rows", rows},
               {"verdicts", verdicts},
               {"coefficients", coeffs}};
  return root.dump(2) + "\n";
}

/// Writes `text` to config.output, or to `out` when no path is configured.
void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.output, std::ios::binary);
  if (!file) throw ConfigError("cannot write output '" + config.output + "'");
  file << text;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const TermBudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::budget_exceeded;
  } catch (const WindowBudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::budget_exceeded;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
}

std::optional<Expansion> user_d(const RunConfig& config) {
  if (!config.d_expansion) return std::nullopt;
  return Expansion::parse(*config.d_expansion);
}

}  // namespace

std::string check_report_text(const CriterionReport& report, OutputFormat format) {
  return format == OutputFormat::csv ? csv_check(report) : json_check(report);
}

std::string clt_report_text(const std::vector<CltRow>& rows, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::ostringstream os;
    os << "grid,replicates,seed,emp_mean,emp_var,target_var,ks,mc_error,mc_stderr,exact_error,flags\n";
    for (const auto& r : rows) {
      const auto& c = r.clt;
      os << c.rect.to_string() << ',' << c.replicates << ',' << c.seed << ','
         << num(c.empirical_mean) << ',' << num(c.empirical_variance) << ','
         << num(c.target_variance) << ',' << (c.ks_statistic ? num(*c.ks_statistic) : "") << ','
         << num(r.error.mc_error_per_cell) << ',' << num(r.error.standard_error) << ','
         << num(r.exact_error) << ',' << (c.degenerate_variance ? "degenerate-variance" : "")
         << '\n';
    }
    return os.str();
  }
  json out = json::array();
  for (const auto& r : rows) {
    const auto& c = r.clt;
    json row = {{"rect", c.rect.to_string()},
                {"replicates", c.replicates},
                {"seed", c.seed},
                {"empirical_mean", c.empirical_mean},
                {"empirical_variance", c.empirical_variance},
                {"target_variance", c.target_variance},
                {"exact_variance_ratio", c.exact_variance_ratio},
                {"ks_statistic", c.ks_statistic ? json(*c.ks_statistic) : json(nullptr)},
                {"degenerate_variance", c.degenerate_variance},
                {"mc_error_per_cell", r.error.mc_error_per_cell},
                {"standard_error", r.error.standard_error},
                {"exact_value", r.exact_error}};
    out.push_back(row);
  }
  return out.dump(2) + "\n";
}

std::string construct_d_text(const MartingaleCandidate& candidate, OutputFormat format) {
  if (format == OutputFormat::structured) return candidate_json(candidate).dump(2) + "\n";
  std::ostringstream os;
  os << "D = " << candidate.d_expansion.to_string() << '\n';
  os << "provenance = " << to_string(candidate.provenance) << '\n';
  if (candidate.limit) os << "limit = " << candidate.limit->to_string() << '\n';
  if (candidate.no_convergence_evidence) os << "warning = no convergence evidence\n";
  os << "grid,step_distance\n";
  for (std::size_t k = 1; k < candidate.ladder.size(); ++k) {
    os << candidate.ladder[k].to_string() << ',' << num(candidate.step_distances[k - 1]) << '\n';
  }
  return os.str();
}

int run_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto report =
        evaluate_criteria(config.model(), config.ladder, config.tolerance, user_d(config));
    emit(config, check_report_text(report, config.format), out);
    return exit_code::ok;
  });
}

int run_clt(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.replicates < 100) throw ConfigError("clt needs at least 100 replicates");
    const FieldModel model = config.model();
    validate_ladder(config.ladder, model.dim());
    const auto given = user_d(config);
    const Expansion d = given ? user_candidate(*given, model.dim()).d_expansion
                              : stabilized_limit(model);
    const double target = norm2(d, model.sigma2());
    std::vector<CltRow> rows;
    for (const auto& rect : config.ladder) {
      const auto draws =
          simulate_replicates(model, d, rect, config.replicates, config.seed, config.threads);
      rows.push_back({summarize_clt(rect, draws, config.seed, target,
                                    exact_variance_ratio(model, rect)),
                      summarize_error(rect, draws, config.seed), approx_error(model, d, rect)});
    }
    emit(config, clt_report_text(rows, config.format), out);
    return exit_code::ok;
  });
}

int run_construct_d(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto candidate = candidate_D(config.model(), config.ladder);
    emit(config, construct_d_text(candidate, config.format), out);
    return exit_code::ok;
  });
}

namespace {

struct OracleFailure {
  std::string what;
  Expansion witness;
  std::optional<MultiIndex> cutoff;
  double value;
};

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, scale);
}

double abs_coef_sum(const Expansion& e) {
  double s = 0.0;
  for (const auto& [m, c] : e.terms()) s += std::abs(c);
  return s;
}

/// Returns the first failing check, if any.
std::optional<OracleFailure> oracle_rect(const FieldModel& model, const Expansion& d,
                                         const Rectangle& rect, const CondExpectFn& cond,
                                         std::ostream& out) {
  const double sigma2 = model.sigma2();
  const Expansion s = partial_sum(model, rect);
  const Expansion m = build_martingale(d, rect);
  const std::vector<Expansion> both{s, m};
  const auto window = oracle::window_of(both);
  if (window.size() > kOracleMaxSites) {
    out << rect.to_string() << ": skipped (" << window.size() << " sites)\n";
    return std::nullopt;
  }
  const double scale = abs_coef_sum(s) + abs_coef_sum(m);
  const double scale2 = scale * scale * std::max(1.0, sigma2 * sigma2);

  const double es = oracle::expectation(s, window, sigma2);
  if (!close(es, s.constant_term(), scale)) return OracleFailure{"E[S]", s, std::nullopt, es};
  const double ess = oracle::inner(s, s, window, sigma2);
  if (!close(ess, norm2(s, sigma2), scale2)) return OracleFailure{"E[S^2]", s, std::nullopt, ess};
  const double esm = oracle::inner(s, m, window, sigma2);
  if (!close(esm, inner(s, m, sigma2), scale2)) return OracleFailure{"E[S M]", s - m, std::nullopt, esm};
  const double emm = oracle::inner(m, m, window, sigma2);
  if (!close(emm, norm2(m, sigma2), scale2)) return OracleFailure{"E[M^2]", m, std::nullopt, emm};

  // Every cutoff that splits the window differently: one step beyond on each side.
  MultiIndex lo = window.front(), hi = window.front();
  for (const auto& w : window) {
    lo = meet(lo, w);
    hi = join(hi, w);
  }
  const MultiIndex one = MultiIndex::ones(lo.dim());
  std::size_t cutoffs = 0;
  std::optional<OracleFailure> failure;
  for_each_in_box(lo - one, hi, [&](const MultiIndex& c) {
    if (failure) return;
    ++cutoffs;
    for (const Expansion* e : {&s, &m}) {
      const double dev = oracle::cond_deviation(*e, c, cond(*e, c), window, sigma2);
      if (!(dev <= 1e-12 * std::max(1.0, abs_coef_sum(*e)))) {
        failure = OracleFailure{"E[. | F_c]", *e, c, dev};
        return;
      }
    }
  });
  if (failure) return failure;
  out << rect.to_string() << ": pass (" << window.size() << " sites, " << cutoffs
      << " cutoffs) E[S]=" << num(es) << " E[S^2]=" << num(ess) << " E[S M]=" << num(esm)
      << " E[M^2]=" << num(emm) << '\n';
  return std::nullopt;
}

}  // namespace

int run_oracle(const RunConfig& config, std::ostream& out, std::ostream& err,
               const CondExpectFn& cond) {
  return guarded(err, [&]() -> int {
    const FieldModel model = config.model();
    const auto given = user_d(config);
    const Expansion d = given ? *given : stabilized_limit(model);
    std::vector<Rectangle> rects{Rectangle(MultiIndex::ones(model.dim()))};
    for (const auto& r : config.ladder) {
      if (std::find(rects.begin(), rects.end(), r) == rects.end()) rects.push_back(r);
    }
    std::ostringstream log;
    for (const auto& rect : rects) {
      if (auto f = oracle_rect(model, d, rect, cond, log)) {
        emit(config, log.str(), out);
        err << "oracle mismatch on " << rect.to_string() << " in " << f->what << '\n'
            << "witness: " << f->witness.to_string() << '\n';
        if (f->cutoff) err << "cutoff: " << f->cutoff->to_string() << '\n';
        err << "value: " << num(f->value) << '\n';
        return exit_code::oracle_mismatch;
      }
    }
    emit(config, log.str() + "oracle: all checks passed\n", out);
    return exit_code::ok;
  });
}

}  // namespace orthomart
