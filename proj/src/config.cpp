#include "catforge/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace catforge {

namespace pt = boost::property_tree;

struct RunConfig::Impl {
  pt::ptree tree;
  std::filesystem::path base_dir;
};

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "' must be a number, got '" +
                      text + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "' must be an integer, got '" +
                      text + "'");
  }
  return v;
}

}  // namespace

RunConfig::RunConfig() : impl_(std::make_unique<Impl>()) {}
RunConfig::~RunConfig() = default;
RunConfig::RunConfig(const RunConfig& other)
    : impl_(std::make_unique<Impl>(*other.impl_)) {}
RunConfig& RunConfig::operator=(const RunConfig& other) {
  if (this != &other) impl_ = std::make_unique<Impl>(*other.impl_);
  return *this;
}
RunConfig::RunConfig(RunConfig&&) noexcept = default;
RunConfig& RunConfig::operator=(RunConfig&&) noexcept = default;

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  try {
    pt::read_ini(in, cfg.impl_->tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  RunConfig cfg;
  try {
    pt::read_ini(path.string(), cfg.impl_->tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  cfg.impl_->base_dir = path.parent_path();
  return cfg;
}

bool RunConfig::has(const std::string& key) const {
  return impl_->tree.get_optional<std::string>(key).has_value();
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  if (auto v = impl_->tree.get_optional<std::string>(key)) {
    std::string t = trim(*v);
    if (!t.empty()) return t;
  }
  return std::nullopt;
}

std::string RunConfig::require_string(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing required config key '" + key + "'");
  return *v;
}

double RunConfig::require_double(const std::string& key) const {
  return to_double(key, require_string(key));
}

int RunConfig::require_int(const std::string& key) const {
  return to_integer<int>(key, require_string(key));
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto v = get(key);
  return v ? to_integer<int>(key, *v) : fallback;
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::uint64_t RunConfig::get_uint64(const std::string& key,
                                    std::uint64_t fallback) const {
  auto v = get(key);
  return v ? to_integer<std::uint64_t>(key, *v) : fallback;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  auto v = get(key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_double(key, item));
  }
  return out;
}

std::filesystem::path RunConfig::resolve_path(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_relative() && !impl_->base_dir.empty()) {
    return impl_->base_dir / p;
  }
  return p;
}

}  // namespace catforge
