#include "orthomart/kernel_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "orthomart/number_format.hpp"

namespace orthomart {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

MultiIndex parse_lags(std::string_view text, std::size_t line) {
  const auto tokens = split_ws(text);
  if (tokens.empty()) throw KernelParseError(line, "missing lag coordinates");
  if (tokens.size() > kMaxDim) throw KernelParseError(line, "too many coordinates");
  std::vector<std::int64_t> coords;
  for (auto t : tokens) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      throw KernelParseError(line, "bad integer '" + std::string(t) + "'");
    }
    coords.push_back(v);
  }
  return MultiIndex(std::span<const std::int64_t>(coords));
}

}  // namespace

Kernel parse_kernel(std::string_view text, std::optional<KernelKind> kind,
                    std::optional<std::size_t> dim) {
  std::vector<LinearKernel::Entry> linear;
  std::vector<VolterraKernel::Entry> volterra;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (split_ws(line).empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw KernelParseError(line_no, "missing ':' before coefficient");
    if (line.find(':', colon + 1) != std::string_view::npos) {
      throw KernelParseError(line_no, "more than one ':'");
    }
    const auto coef_tokens = split_ws(line.substr(colon + 1));
    if (coef_tokens.size() != 1) throw KernelParseError(line_no, "expected one coefficient after ':'");
    double coef = 0.0;
    try {
      coef = parse_double(coef_tokens[0]);
    } catch (const std::invalid_argument& e) {
      throw KernelParseError(line_no, e.what());
    }

    const std::string_view lhs = line.substr(0, colon);
    const auto bar = lhs.find('|');
    const KernelKind line_kind = bar == std::string_view::npos ? KernelKind::linear : KernelKind::volterra;
    if (!kind) kind = line_kind;
    if (*kind != line_kind) throw KernelParseError(line_no, "mixes linear and Volterra entries");

    try {
      if (line_kind == KernelKind::linear) {
        auto lag = parse_lags(lhs, line_no);
        if (!dim) dim = lag.dim();
        if (lag.dim() != *dim) throw KernelParseError(line_no, "dimension differs from earlier lines");
        linear.push_back({lag, coef});
      } else {
        if (lhs.find('|', bar + 1) != std::string_view::npos) {
          throw KernelParseError(line_no, "more than one '|'");
        }
        auto u = parse_lags(lhs.substr(0, bar), line_no);
        auto v = parse_lags(lhs.substr(bar + 1), line_no);
        if (!dim) dim = u.dim();
        if (u.dim() != *dim || v.dim() != *dim) {
          throw KernelParseError(line_no, "dimension differs from earlier lines");
        }
        if (u == v) throw KernelParseError(line_no, "diagonal Volterra entry (u == v)");
        volterra.push_back({u, v, coef});
      }
    } catch (const KernelParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw KernelParseError(line_no, e.what());
    }
  }
  if (!kind || !dim) throw KernelParseError(line_no, "empty kernel needs an explicit kind and dimension");
  try {
    if (*kind == KernelKind::linear) return LinearKernel(*dim, std::move(linear));
    return VolterraKernel(*dim, std::move(volterra));
  } catch (const std::exception& e) {
    throw KernelParseError(0, e.what());
  }
}

Kernel read_kernel_file(const std::string& path, std::optional<KernelKind> kind,
                        std::optional<std::size_t> dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kernel(buf.str(), kind, dim);
}

namespace {

std::string lags_text(const MultiIndex& u) {
  std::string s;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    if (i) s += ' ';
    s += std::to_string(u[i]);
  }
  return s;
}

}  // namespace

std::string format_kernel(const Kernel& kernel) {
  std::string out;
  if (const auto* lin = std::get_if<LinearKernel>(&kernel)) {
    for (const auto& e : lin->entries()) out += lags_text(e.lag) + " : " + format_double(e.coef) + "\n";
  } else {
    for (const auto& e : std::get<VolterraKernel>(kernel).entries()) {
      out += lags_text(e.u) + " | " + lags_text(e.v) + " : " + format_double(e.coef) + "\n";
    }
  }
  return out;
}

}  // namespace orthomart
