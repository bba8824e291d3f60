#pragma once

// Kernel text format, one entry per line, whitespace separated, `#` starts a comment:
//
//   linear:    j1 j2 ... jd : coef
//   Volterra:  u1 ... ud | v1 ... vd : coef
//
// A file holds entries of one kind and one dimension. Numbers use `.` as the
// decimal point regardless of locale.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "orthomart/models.hpp"

namespace orthomart {

class KernelParseError : public std::invalid_argument {
 public:
  KernelParseError(std::size_t line, const std::string& what)
      : std::invalid_argument("kernel line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class KernelKind { linear, volterra };

/// Parses kernel text. `kind` and `dim` are inferred from the first entry when not
/// given; an empty text needs both.
Kernel parse_kernel(std::string_view text, std::optional<KernelKind> kind = std::nullopt,
                    std::optional<std::size_t> dim = std::nullopt);

Kernel read_kernel_file(const std::string& path, std::optional<KernelKind> kind = std::nullopt,
                        std::optional<std::size_t> dim = std::nullopt);

/// Canonical text form; parse_kernel(format_kernel(k)) == k.
std::string format_kernel(const Kernel& kernel);

}  // namespace orthomart
