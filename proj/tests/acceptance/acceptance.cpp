// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "orthomart/commands.hpp"
#include "orthomart/criteria.hpp"
#include "orthomart/montecarlo.hpp"
#include "orthomart/oracle.hpp"
#include "zoo.hpp"

namespace om = orthomart;
using om::Expansion;
using om::MultiIndex;
using om::Rectangle;
using om::testing::square;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct NamedModel {
  std::string name;
  om::FieldModel model;
};

std::vector<NamedModel> build_zoo() {
  std::vector<NamedModel> zoo{{"Z1", om::testing::z1()},
                              {"Z2", om::testing::z2()},
                              {"Z3", om::testing::z3()},
                              {"Z4", om::testing::z4()}};
  std::mt19937_64 rng(20240601);
  for (int k = 0; k < 50; ++k) {
    zoo.push_back({"linear#" + std::to_string(k), om::FieldModel(om::testing::random_linear_kernel(rng), {})});
  }
  for (int k = 0; k < 20; ++k) {
    zoo.push_back({"volterra#" + std::to_string(k), om::FieldModel(om::testing::random_volterra_kernel(rng), {})});
  }
  return zoo;
}

const std::vector<NamedModel>& zoo() {
  static const auto z = build_zoo();
  return z;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Outcome decomposition_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checks = 0;
  Outcome out;
  for (const auto& [name, model] : zoo()) {
    const Expansion d = om::stabilized_limit(model);
    om::for_each_in_box({1, 1}, {6, 6}, [&](const MultiIndex& n) {
      const Rectangle rect(n);
      const auto dec = om::decomposition(model, d, rect);
      const double error = dec.lhs / static_cast<double>(rect.cells());
      const double tol = 1e-9 * std::max(1.0, error);
      const double r = dec.residual();
      const double rf = std::abs(dec.remainder - dec.remainder_formula);
      const double st = std::abs(dec.projective - dec.projective_stationary);
      worst = std::max({worst, r / tol, rf / tol, st / tol});
      ++checks;
      if (r > tol || rf > tol || st > tol) {
        out.pass = false;
        out.detail = name + " at " + rect.to_string() + " residual " + fmt(r);
      }
    });
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) out.pass = false;
  if (out.pass) {
    out.detail = std::to_string(checks) + " model/rectangle pairs, worst residual/tolerance " + fmt(worst) +
                 ", " + fmt(elapsed) + " s";
  }
  return out;
}

Outcome closed_form_error() {
  const auto model = om::testing::z2();
  const Expansion d = Expansion::site({1, 1}, 2.0);
  double worst = 0.0;
  for (std::int64_t k = 2; k <= 32; ++k) {
    const double want = (4.0 * k - 2) / static_cast<double>(k * k);
    worst = std::max(worst, std::abs(om::approx_error(model, d, square(k)) - want) / want);
  }
  const Expansion diff = om::partial_sum(model, square(2)) - om::build_martingale(d, square(2));
  const std::vector<Expansion> es{diff};
  const double oracle = om::oracle::inner(diff, diff, om::oracle::window_of(es)) / 4.0;
  Outcome out;
  out.pass = worst <= 1e-9 && oracle == 1.5;
  out.detail = "max relative deviation " + fmt(worst) + ", oracle at k=2 gives " + fmt(oracle);
  return out;
}

Outcome exact_zero_cases() {
  std::vector<Rectangle> rects;
  om::for_each_in_box({1, 1}, {8, 8}, [&](const MultiIndex& n) { rects.emplace_back(n); });
  for (std::int64_t k : {16, 32}) rects.push_back(square(k));
  std::size_t checks = 0;
  for (const auto& model : {om::testing::z1(), om::testing::z3()}) {
    const Expansion d = om::stabilized_limit(model);
    for (const auto& n : rects) {
      ++checks;
      if (om::approx_error(model, d, n) != 0.0 || om::defdlim2_average(model, d, n) != 0.0) {
        return {false, "nonzero value at " + n.to_string()};
      }
      for (double r : om::regularity_norms(model, n)) {
        if (r != 0.0) return {false, "nonzero regularity at " + n.to_string()};
      }
    }
  }
  return {true, std::to_string(checks) + " model/rectangle pairs all exactly 0"};
}

Outcome cesaro_candidate() {
  const std::vector<double> want{5.0 / 4, 25.0 / 16, 113.0 / 64, 481.0 / 256};
  const std::vector<std::int64_t> ks{2, 4, 8, 16};
  Outcome out;
  std::ostringstream seq;
  double prev = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double c = om::cesaro_projection(om::testing::z2(), square(ks[i])).coefficient(om::Monomial(MultiIndex{1, 1}));
    seq << (i ? ", " : "") << fmt(c);
    if (std::abs(c - want[i]) > 1e-12 || !(c > prev) || !(c < 2.0)) out.pass = false;
    prev = c;
  }
  const Expansion limit = om::stabilized_limit(om::testing::z2());
  if (!(limit == Expansion::site({1, 1}, 2.0))) out.pass = false;
  out.detail = "coefficients " + seq.str() + ", limit " + limit.to_string();
  return out;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t windows = 0, cutoffs = 0;
  for (const auto& [name, model] : zoo()) {
    const Expansion d = om::stabilized_limit(model);
    om::for_each_in_box({1, 1}, {4, 4}, [&](const MultiIndex& n) {
      const Rectangle rect(n);
      const Expansion s = om::partial_sum(model, rect);
      const Expansion m = om::build_martingale(d, rect);
      const std::vector<Expansion> both{s, m};
      const auto window = om::oracle::window_of(both);
      if (window.size() > 16) return;
      ++windows;
      auto check = [&](double got, double want, const char* what) {
        if (std::abs(got - want) > 1e-12) {
          throw std::runtime_error(name + " " + rect.to_string() + " " + what + ": " + fmt(got) + " vs " + fmt(want));
        }
      };
      check(om::oracle::expectation(s, window), s.constant_term(), "E[S]");
      check(om::oracle::expectation(m, window), m.constant_term(), "E[M]");
      check(om::oracle::inner(s, s, window), om::norm2(s, 1.0), "E[S^2]");
      check(om::oracle::inner(s, m, window), om::inner(s, m, 1.0), "E[SM]");
      check(om::oracle::inner(m, m, window), om::norm2(m, 1.0), "E[M^2]");
      om::for_each_in_box({-2, -2}, {2, 2}, [&](const MultiIndex& c) {
        ++cutoffs;
        if (!om::oracle::cond_check(s, c, window) || !om::oracle::cond_check(m, c, window)) {
          throw std::runtime_error(name + " " + rect.to_string() + " cond_check at " + c.to_string());
        }
      });
    });
  }
  const double elapsed = seconds_since(t0);
  return {elapsed < 60.0 && windows > 0, std::to_string(windows) + " windows, " + std::to_string(cutoffs) +
                                             " cutoff checks, " + fmt(elapsed) + " s"};
}

Outcome commuting_filtration() {
  std::size_t checks = 0;
  for (std::size_t d : {2u, 3u}) {
    std::mt19937_64 rng(600 + d);
    for (int k = 0; k < 100; ++k) {
      const Expansion e = om::testing::random_expansion(rng, d, 16);
      for (int t = 0; t < 5; ++t) {
        const MultiIndex a = om::testing::random_site(rng, d, -2, 3);
        const MultiIndex b = om::testing::random_site(rng, d, -2, 3);
        ++checks;
        if (!(om::cond_expect(om::cond_expect(e, a), b) == om::cond_expect(e, om::meet(a, b)))) {
          return {false, "mismatch at " + a.to_string() + " " + b.to_string()};
        }
      }
    }
  }
  return {true, std::to_string(checks) + " exact term-table equalities"};
}

Outcome projection_rules() {
  std::size_t checks = 0;
  for (std::size_t d : {2u, 3u}) {
    std::mt19937_64 rng(700 + d);
    for (int k = 0; k < 1000; ++k) {
      const Expansion e({{om::testing::random_monomial(rng, d, -1, 2), 1.0}});
      const MultiIndex m = om::testing::random_site(rng, d, -1, 2);
      ++checks;
      if (!(om::project(e, m) == om::project_max_rule(e, m))) return {false, "mismatch on " + e.to_string()};
    }
  }
  const auto report = om::evaluate_criteria(om::testing::z4(), std::vector<Rectangle>{square(2), square(4), square(8)});
  const om::Monomial cross(MultiIndex{0, 1}, MultiIndex{1, 0});
  const auto& table = report.coefficients.volterra_tables.back();
  const bool witnessed = table.projection_based.coefficient(cross) != 0.0 && table.literal.coefficient(cross) == 0.0;
  return {report.coefficients.volterra_disagreement && witnessed,
          std::to_string(checks) + " monomials agree; Z4 disagreement flag " +
              (report.coefficients.volterra_disagreement ? "set" : "missing") + ", cross term " +
              Expansion({{cross, table.projection_based.coefficient(cross)}}).to_string()};
}

Outcome monte_carlo_consistency() {
  const Expansion d = Expansion::site({1, 1}, 2.0);
  int passing = 0;
  std::ostringstream z;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto est = om::estimate_error(om::testing::z2(), d, square(8), 20000, seed);
    const double score = (est.mc_error_per_cell - 30.0 / 64) / est.standard_error;
    passing += std::abs(score) <= 4.0;
    z << (seed > 1 ? " " : "") << fmt(score);
  }
  return {passing >= 9, std::to_string(passing) + "/10 seeds within 4 SE (z: " + z.str() + ")"};
}

Outcome clt() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t reps = 5000;
  const double band = 4 * std::sqrt(2.0 / reps);
  const auto r1 = om::clt_experiment(om::testing::z1(om::LawKind::gaussian), square(64), reps, 91);
  const auto r2 = om::clt_experiment(om::testing::z2(om::LawKind::gaussian), square(64), reps, 92);
  const double exact = (2.0 * 63 * 63 + 2.0 * 64 * 64) / (64.0 * 64.0);
  const double elapsed = seconds_since(t0);
  const bool ok = r1.ks_statistic && *r1.ks_statistic < om::ks_critical_0001(reps) &&
                  std::abs(r1.empirical_variance - 1.0) <= band &&
                  std::abs(r2.empirical_variance - exact) <= exact * band &&
                  r2.exact_variance_ratio == exact && elapsed < 60.0;
  return {ok, "Z1 ks " + fmt(r1.ks_statistic.value_or(-1)) + " < " + fmt(om::ks_critical_0001(reps)) +
                  ", var " + fmt(r1.empirical_variance) + "; Z2 var " + fmt(r2.empirical_variance) +
                  " vs " + fmt(exact) + " +- " + fmt(exact * band) + "; " + fmt(elapsed) + " s"};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "orthomart_acceptance";
  std::filesystem::create_directories(dir);
  om::RunConfig cfg;
  cfg.kernel = om::testing::z2().kernel();
  cfg.law = om::LawKind::gaussian;
  cfg.ladder = {square(8), square(16), square(32)};
  cfg.replicates = 1000;
  cfg.seed = 2718;
  std::ostringstream sink, err;
  auto run = [&](unsigned threads, const std::string& file) {
    cfg.threads = threads;
    cfg.output = (dir / file).string();
    if (om::run_clt(cfg, sink, err) != 0) throw std::runtime_error("run_clt failed: " + err.str());
    std::ifstream in(cfg.output, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string a = run(1, "threads1.csv");
  const std::string b = run(8, "threads8.csv");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

Outcome example_two_coefficients() {
  const auto single = om::testing::volterra_model({{{0, 0}, {1, 1}, 1.0}});
  const double g0 = om::volterra_cauchy_gap(single, square(4), square(2));
  const auto two = om::testing::volterra_model({{{0, 0}, {1, 1}, 1.0}, {{0, 0}, {2, 2}, 0.5}});
  const std::vector<std::int64_t> ks{2, 4, 8, 16};
  std::vector<double> gaps;
  for (std::size_t i = 1; i < ks.size(); ++i) gaps.push_back(om::volterra_cauchy_gap(two, square(ks[i]), square(ks[i - 1])));
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && gaps[i] <= gaps[i - 1];
  std::ostringstream s;
  for (std::size_t i = 0; i < gaps.size(); ++i) s << (i ? ", " : "") << fmt(gaps[i]);
  return {g0 == 0.0 && monotone, "single-entry gap " + fmt(g0) + "; two-entry gaps " + s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"decomposition identity", decomposition_identity},
      {"closed-form error", closed_form_error},
      {"exact-zero cases", exact_zero_cases},
      {"Cesaro candidate", cesaro_candidate},
      {"oracle equivalence", oracle_equivalence},
      {"commuting filtration", commuting_filtration},
      {"projection rules", projection_rules},
      {"Monte Carlo consistency", monte_carlo_consistency},
      {"CLT", clt},
      {"determinism", determinism},
      {"coefficient test", example_two_coefficients},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
