#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "orthomart/config.hpp"
#include "orthomart/criteria.hpp"
#include "orthomart/montecarlo.hpp"

namespace orthomart {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config_error = 2;
inline constexpr int budget_exceeded = 3;
inline constexpr int oracle_mismatch = 4;
}  // namespace exit_code

/// Report text in the requested format.
std::string check_report_text(const CriterionReport& report, OutputFormat format);

struct CltRow {
  CltReport clt;
  ErrorEstimate error;
  double exact_error = 0;
};
std::string clt_report_text(const std::vector<CltRow>& rows, OutputFormat format);

std::string construct_d_text(const MartingaleCandidate& candidate, OutputFormat format);

// Each command writes its report to config.output (or `out` when that is empty),
// diagnostics to `err`, and returns an exit code. Exceptions are mapped to codes
// 2 (config/kernel/input), 3 (term or window budget) and 1 (anything else).
int run_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_clt(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_construct_d(const RunConfig& config, std::ostream& out, std::ostream& err);

using CondExpectFn = std::function<Expansion(const Expansion&, const MultiIndex&)>;

inline constexpr std::size_t kOracleMaxSites = 16;

/// Enumeration cross-check of the algebra on every ladder rectangle whose window has
/// at most 16 sites (the unit rectangle is always tried). `cond` is the conditional
/// expectation under test. Exit 4 on the first mismatch, with the witness printed.
int run_oracle(const RunConfig& config, std::ostream& out, std::ostream& err,
               const CondExpectFn& cond = [](const Expansion& e, const MultiIndex& c) {
                 return cond_expect(e, c);
               });

}  // namespace orthomart
