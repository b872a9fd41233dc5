#include "coopnet/experiment.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "coopnet/errors.hpp"

namespace coopnet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& what) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + what);
}

double parse_double(const std::string& key, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) bad_value(key, tok, "a number");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(key, tok, "a number");
  }
}

long parse_long(const std::string& key, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) bad_value(key, tok, "an integer");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(key, tok, "an integer");
  }
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

Config Config::from_text(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value': " +
                        line);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + " has no key");
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
  values_[key] = trim(assignment.substr(eq + 1));
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

long Config::get_long(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_long(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : split_ws(it->second);
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& tok : split_ws(it->second)) out.push_back(parse_double(key, tok));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const std::string& tok : split_ws(it->second))
    out.push_back(static_cast<int>(parse_long(key, tok)));
  return out;
}

std::vector<Position> Config::get_positions(const std::string& key,
                                            const std::vector<Position>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<Position> out;
  for (const std::string& tok : split_ws(it->second)) {
    const std::size_t comma = tok.find(',');
    if (comma == std::string::npos) bad_value(key, tok, "a position 'x,y'");
    out.push_back({parse_double(key, tok.substr(0, comma)), parse_double(key, tok.substr(comma + 1))});
  }
  return out;
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::uint64_t Config::hash() const {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : canonical_text()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace coopnet
