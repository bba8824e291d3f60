// Command-line front end: check, clt, oracle, construct-d.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "orthomart/commands.hpp"

namespace om = orthomart;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  std::optional<std::string> output;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration")->required();
  sub->add_option("--format", o.format, "csv or structured");
  sub->add_option("--threads", o.threads, "worker threads for Monte Carlo")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "root seed override");
  sub->add_option("--grid", o.grid, "ladder override, e.g. 2x2,4x4,8x8");
  sub->add_option("--output", o.output, "output path; '-' for stdout");
}

om::RunConfig resolve(const Overrides& o) {
  om::RunConfig cfg = om::load_config(o.config_path);
  if (o.format) cfg.format = om::output_format_from_string(*o.format);
  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.grid) cfg.ladder = om::parse_grid(*o.grid);
  if (o.output) cfg.output = *o.output == "-" ? "" : *o.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Martingale approximation checks for random fields"};
  app.require_subcommand(1);
  Overrides o;
  auto* check = app.add_subcommand("check", "evaluate the approximation conditions along the ladder");
  auto* clt = app.add_subcommand("clt", "Monte Carlo CLT and error experiment");
  auto* oracle = app.add_subcommand("oracle", "enumeration cross-check of the exact algebra");
  auto* construct = app.add_subcommand("construct-d", "print the candidate martingale difference");
  for (auto* sub : {check, clt, oracle, construct}) add_common(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return om::exit_code::config_error;
  }

  om::RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return om::exit_code::config_error;
  }

  if (check->parsed()) return om::run_check(cfg, std::cout, std::cerr);
  if (clt->parsed()) return om::run_clt(cfg, std::cout, std::cerr);
  if (oracle->parsed()) return om::run_oracle(cfg, std::cout, std::cerr);
  return om::run_construct_d(cfg, std::cout, std::cerr);
}
