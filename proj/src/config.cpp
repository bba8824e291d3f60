#include "orthomart/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orthomart/expansion.hpp"

namespace orthomart {

using nlohmann::json;

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "structured"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "structured" || name == "json") return OutputFormat::structured;
  throw ConfigError("unknown output format '" + name + "'");
}

std::vector<Rectangle> parse_grid(const std::string& text) {
  std::vector<Rectangle> ladder;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty() || item.front() == 'x' || item.back() == 'x') {
      throw ConfigError("bad grid entry '" + item + "'");
    }
    std::vector<std::int64_t> coords;
    std::stringstream parts(item);
    std::string part;
    while (std::getline(parts, part, 'x')) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(part, &used);
      } catch (const std::exception&) {
        throw ConfigError("bad grid entry '" + item + "'");
      }
      if (used != part.size()) throw ConfigError("bad grid entry '" + item + "'");
      coords.push_back(v);
    }
    try {
      ladder.emplace_back(MultiIndex(std::span<const std::int64_t>(coords)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bad grid entry '" + item + "': " + e.what());
    }
  }
  if (ladder.empty()) throw ConfigError("empty grid");
  return ladder;
}

std::string format_grid(const std::vector<Rectangle>& ladder) {
  std::string s;
  for (const auto& r : ladder) {
    if (!s.empty()) s += ',';
    s += r.to_string();
  }
  return s;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::string kernel_kind_name(KernelKind k) { return k == KernelKind::linear ? "linear" : "volterra"; }

KernelKind kernel_kind_from(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "volterra") return KernelKind::volterra;
  throw ConfigError("unknown model type '" + name + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    const json& model = root.at("model");
    cfg.model_type = kernel_kind_from(model.at("type").get<std::string>());
    cfg.dimension = model.at("dimension").get<std::size_t>();
    if (cfg.dimension == 0 || cfg.dimension > kMaxDim) throw ConfigError("bad dimension");
    const bool has_inline = model.contains("kernel");
    const bool has_file = model.contains("kernel_file");
    if (has_inline == has_file) throw ConfigError("model needs exactly one of 'kernel' or 'kernel_file'");
    if (has_inline) {
      std::string lines;
      for (const auto& line : model.at("kernel")) lines += line.get<std::string>() + "\n";
      cfg.kernel = parse_kernel(lines, cfg.model_type, cfg.dimension);
    } else {
      cfg.kernel_file = model.at("kernel_file").get<std::string>();
      std::filesystem::path p(*cfg.kernel_file);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      cfg.kernel = read_kernel_file(p.string(), cfg.model_type, cfg.dimension);
    }

    const json innovation = root.value("innovation", json::object());
    cfg.law = law_kind_from_string(get_or<std::string>(innovation, "law", "rademacher"));
    cfg.sigma2 = get_or<double>(innovation, "sigma2", 1.0);
    if (!(cfg.sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");

    for (const auto& r : root.at("ladder")) {
      cfg.ladder.emplace_back(MultiIndex(std::span<const std::int64_t>(r.get<std::vector<std::int64_t>>())));
    }
    cfg.replicates = get_or<std::size_t>(root, "replicates", cfg.replicates);
    cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed);
    cfg.tolerance = get_or<double>(root, "tolerance", cfg.tolerance);
    cfg.threads = get_or<unsigned>(root, "threads", cfg.threads);
    cfg.output = get_or<std::string>(root, "output", cfg.output);
    cfg.format = output_format_from_string(get_or<std::string>(root, "format", "csv"));
    if (root.contains("d")) cfg.d_expansion = root.at("d").get<std::string>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (cfg.ladder.empty()) throw ConfigError("ladder is empty");
  for (std::size_t k = 0; k < cfg.ladder.size(); ++k) {
    if (cfg.ladder[k].dim() != cfg.dimension) throw ConfigError("ladder dimension mismatch");
    if (k > 0 && (!leq(cfg.ladder[k - 1].upper(), cfg.ladder[k].upper()) ||
                  cfg.ladder[k - 1] == cfg.ladder[k])) {
      throw ConfigError("ladder is not increasing at " + cfg.ladder[k].to_string());
    }
  }
  if (cfg.d_expansion) {
    try {
      (void)Expansion::parse(*cfg.d_expansion);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad 'd': ") + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const RunConfig& cfg) {
  json model = {{"type", kernel_kind_name(cfg.model_type)}, {"dimension", cfg.dimension}};
  if (cfg.kernel_file) {
    model["kernel_file"] = *cfg.kernel_file;
  } else {
    json lines = json::array();
    std::stringstream text(format_kernel(cfg.kernel));
    std::string line;
    while (std::getline(text, line)) lines.push_back(line);
    model["kernel"] = lines;
  }
  json ladder = json::array();
  for (const auto& r : cfg.ladder) {
    const auto c = r.upper().coords();
    ladder.push_back(std::vector<std::int64_t>(c.begin(), c.end()));
  }
  json root = {{"model", model},
               {"innovation", {{"law", to_string(cfg.law)}, {"sigma2", cfg.sigma2}}},
               {"ladder", ladder},
               {"replicates", cfg.replicates},
               {"seed", cfg.seed},
               {"tolerance", cfg.tolerance},
               {"threads", cfg.threads},
               {"output", cfg.output},
               {"format", to_string(cfg.format)}};
  if (cfg.d_expansion) root["d"] = *cfg.d_expansion;
  return root.dump(2) + "\n";
}

}  // namespace orthomart
