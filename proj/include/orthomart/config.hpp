#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthomart/kernel_io.hpp"
#include "orthomart/models.hpp"

namespace orthomart {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, structured };

struct RunConfig {
  KernelKind model_type = KernelKind::linear;
  std::size_t dimension = 2;
  Kernel kernel = LinearKernel(2);
  /// Set when the kernel was read from a file; serialization then refers to it.
  std::optional<std::string> kernel_file;
  LawKind law = LawKind::rademacher;
  double sigma2 = 1.0;
  std::vector<Rectangle> ladder;
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-2;
  unsigned threads = 1;
  /// Empty means standard output.
  std::string output;
  OutputFormat format = OutputFormat::csv;
  /// User-supplied martingale difference in Expansion text form.
  std::optional<std::string> d_expansion;

  FieldModel model() const { return FieldModel(kernel, InnovationLaw(law, sigma2)); }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the JSON config text. Relative kernel file paths resolve against `base_dir`.
/// Throws ConfigError (including kernel parse errors, with their line number).
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// "2x2,4x4,8x8" -> ladder. Throws ConfigError.
std::vector<Rectangle> parse_grid(const std::string& text);
std::string format_grid(const std::vector<Rectangle>& ladder);

std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& name);

}  // namespace orthomart
