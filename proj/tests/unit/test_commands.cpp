#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "orthomart/commands.hpp"
#include "orthomart/number_format.hpp"
#include "zoo.hpp"

namespace om = orthomart;

namespace {

om::RunConfig config_for(const om::FieldModel& model, const std::string& grid) {
  om::RunConfig c;
  c.kernel = model.kernel();
  c.model_type = model.is_linear() ? om::KernelKind::linear : om::KernelKind::volterra;
  c.law = model.law().kind();
  c.sigma2 = model.sigma2();
  c.ladder = om::parse_grid(grid);
  return c;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(RunCheck, IidIsExact) {
  std::ostringstream out, err;
  ASSERT_EQ(om::run_check(config_for(om::testing::z1(), "2x2,4x4,8x8"), out, err), 0) << err.str();
  const auto rows = csv(out.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].front(), "grid");
  EXPECT_EQ(rows[0][2], "reg_1");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (const std::size_t c : {1, 2, 3, 6, 7, 8}) EXPECT_EQ(rows[r][c], "0") << rows[0][c];
    EXPECT_EQ(rows[r].back(), "approximation holds (exact)");
  }
}

TEST(RunCheck, Z2ErrorColumn) {
  std::ostringstream out, err;
  ASSERT_EQ(om::run_check(config_for(om::testing::z2(), "2x2,4x4,8x8,16x16,32x32"), out, err), 0);
  const auto rows = csv(out.str());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double k = std::stod(rows[r][0]);
    EXPECT_EQ(om::parse_double(rows[r][7]), (4 * k - 2) / (k * k));
  }
}

TEST(RunCheck, StructuredReportAndBudget) {
  auto cfg = config_for(om::testing::z4(), "2x2,4x4,8x8");
  cfg.format = om::OutputFormat::structured;
  std::ostringstream out, err;
  ASSERT_EQ(om::run_check(cfg, out, err), 0);
  EXPECT_NE(out.str().find("\"volterra_disagreement\": true"), std::string::npos);
  EXPECT_NE(out.str().find("\"defdlim2_avg\""), std::string::npos);

  cfg.ladder = om::parse_grid("4000x4000");
  std::ostringstream out2, err2;
  EXPECT_EQ(om::run_check(cfg, out2, err2), om::exit_code::budget_exceeded);
  EXPECT_NE(err2.str().find("budget"), std::string::npos);
}

TEST(RunCheck, RejectsNonMartingaleCandidate) {
  auto cfg = config_for(om::testing::z2(), "2x2,4x4");
  cfg.d_expansion = "x[(0,1)]";
  std::ostringstream out, err;
  EXPECT_EQ(om::run_check(cfg, out, err), om::exit_code::config_error);
}

TEST(RunClt, DegenerateCandidate) {
  auto cfg = config_for(om::testing::z2(), "4x4");
  cfg.replicates = 100;
  cfg.d_expansion = "0";
  std::ostringstream out, err;
  ASSERT_EQ(om::run_clt(cfg, out, err), 0) << err.str();
  const auto rows = csv(out.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][6], "ks");
  EXPECT_EQ(rows[1][6], "");
  EXPECT_EQ(rows[1][10], "degenerate-variance");
  cfg.replicates = 99;
  EXPECT_EQ(om::run_clt(cfg, out, err), om::exit_code::config_error);
}

TEST(RunClt, OutputIsIndependentOfThreads) {
  const auto dir = std::filesystem::temp_directory_path() / "orthomart_clt_threads";
  std::filesystem::create_directories(dir);
  auto cfg = config_for(om::testing::z2(om::LawKind::gaussian), "4x4,8x8");
  cfg.replicates = 500;
  cfg.seed = 123;
  std::ostringstream out, err;
  cfg.threads = 1;
  cfg.output = (dir / "one.csv").string();
  ASSERT_EQ(om::run_clt(cfg, out, err), 0);
  cfg.threads = 8;
  cfg.output = (dir / "eight.csv").string();
  ASSERT_EQ(om::run_clt(cfg, out, err), 0);
  EXPECT_EQ(slurp(dir / "one.csv"), slurp(dir / "eight.csv"));
  EXPECT_TRUE(out.str().empty());
}

TEST(RunOracle, PassesOnTheZoo) {
  for (const auto& model : {om::testing::z1(), om::testing::z2(), om::testing::z3(), om::testing::z4()}) {
    std::ostringstream out, err;
    EXPECT_EQ(om::run_oracle(config_for(model, "2x2"), out, err), 0) << err.str();
  }
  std::ostringstream out, err;
  ASSERT_EQ(om::run_oracle(config_for(om::testing::z2(), "2x2"), out, err), 0);
  EXPECT_NE(out.str().find("2x2: pass"), std::string::npos);
  EXPECT_NE(out.str().find("E[S^2]=10 "), std::string::npos);
}

TEST(RunOracle, CorruptedConditionalExpectationIsCaught) {
  // Keeps the monomials that are measurable on the first axis only.
  const om::CondExpectFn corrupted = [](const om::Expansion& e, const om::MultiIndex& c) {
    std::vector<om::Expansion::Term> kept;
    for (const auto& [m, coef] : e.terms()) {
      bool ok = true;
      for (const auto& s : m.sites()) ok = ok && s[0] <= c[0];
      if (ok) kept.emplace_back(m, coef);
    }
    return om::Expansion(std::move(kept));
  };
  std::ostringstream out, err;
  EXPECT_EQ(om::run_oracle(config_for(om::testing::z2(), "2x2"), out, err, corrupted),
            om::exit_code::oracle_mismatch);
  EXPECT_NE(err.str().find("witness: "), std::string::npos);
  EXPECT_NE(err.str().find("cutoff: "), std::string::npos);
}

TEST(ConstructD, PrintsCandidateAndDistances) {
  std::ostringstream out, err;
  ASSERT_EQ(om::run_construct_d(config_for(om::testing::z2(), "2x2,4x4,8x8,16x16"), out, err), 0);
  EXPECT_NE(out.str().find("D = 1.87890625 * x[(1,1)]"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("limit = 2 * x[(1,1)]"), std::string::npos);
  EXPECT_NE(out.str().find("16x16,"), std::string::npos);
}
