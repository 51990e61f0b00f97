#include "mlmc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "mlmc/errors.hpp"

namespace mlmc {

namespace pt = boost::property_tree;

struct Config::Impl {
  pt::ptree tree;
  std::map<std::string, long> lines;
  std::filesystem::path base_dir;
};

Config::Config() : impl_(std::make_unique<Impl>()) {}
Config::~Config() = default;
Config::Config(const Config& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
Config& Config::operator=(const Config& o) {
  if (this != &o) *impl_ = *o.impl_;
  return *this;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse(std::istream& is, const std::filesystem::path& base_dir) {
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Config c;
  c.impl_->base_dir = base_dir;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, c.impl_->tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<long>(e.line()));
  }
  // property_tree forgets positions; recover them for later error reports.
  std::istringstream scan(text);
  std::string line, section;
  long no = 0;
  while (std::getline(scan, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      section = trim(t.substr(1, t.find(']') - 1));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(t.substr(0, eq));
    c.impl_->lines[section.empty() ? key : section + "." + key] = no;
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse(is, path.parent_path());
}

bool Config::has(const std::string& key) const { return impl_->tree.get_optional<std::string>(key).has_value(); }

std::optional<std::string> Config::raw(const std::string& key) const {
  auto v = impl_->tree.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return trim(*v);
}

long Config::line(const std::string& key) const {
  auto it = impl_->lines.find(key);
  return it == impl_->lines.end() ? 0 : it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + *v + "'", line(key));
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long d = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + *v + "'", line(key));
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + *v + "'", line(key));
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a list of numbers, got '" + item + "'", line(key));
    }
  }
  return out;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key,
                                           std::vector<std::int64_t> fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(*v)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a list of integers, got '" + item + "'", line(key));
    }
  }
  return out;
}

std::filesystem::path Config::get_path(const std::string& key,
                                       const std::filesystem::path& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::filesystem::path p(*v);
  if (p.is_relative() && !impl_->base_dir.empty() && line(key) > 0) p = impl_->base_dir / p;
  return p;
}

void Config::set(const std::string& key, const std::string& value) {
  impl_->tree.put(key, value);
  impl_->lines[key] = 0;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [section, sub] : impl_->tree) {
    if (sub.empty()) {
      out.push_back(section);
      continue;
    }
    for (const auto& [k, v] : sub) out.push_back(section + "." + k);
  }
  return out;
}

}  // namespace mlmc
