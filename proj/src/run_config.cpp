#include "bemspectra/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bemspectra {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    const std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) parts.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for " + std::string(key) + ": '" + t + "'");
  }
  return v;
}

long long parse_integer(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("invalid integer for " + std::string(key) + ": '" + t + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + t + "'");
}

template <typename F>
auto rethrow_as_config(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::GramConvergence: return "gram-convergence";
    case Command::Spectrum: return "spectrum";
    case Command::ErrorSweep: return "error-sweep";
    case Command::OracleCheck: return "oracle-check";
  }
  return "?";
}

Command parse_command(std::string_view text) {
  for (const Command c : {Command::GramConvergence, Command::Spectrum, Command::ErrorSweep, Command::OracleCheck}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown command: " + std::string(text));
}

void RunConfig::set(std::string_view key_view, std::string_view value) {
  const std::string key = trim(key_view);
  if (key == "command") {
    command = parse_command(trim(value));
  } else if (key == "kind") {
    kinds.clear();
    for (const auto& k : split_list(value)) kinds.push_back(rethrow_as_config([&] { return parse_operator_kind(k); }));
  } else if (key == "ka") {
    ka = parse_double(key, value);
  } else if (key == "ka_list") {
    ka_list.clear();
    for (const auto& k : split_list(value)) ka_list.push_back(parse_double(key, k));
  } else if (key == "V") {
    V = static_cast<int>(parse_integer(key, value));
  } else if (key == "cells_per_ka") {
    cells_per_ka = parse_double(key, value);
  } else if (key == "basis_test") {
    basis_test = rethrow_as_config([&] { return parse_basis_kind(trim(value)); });
  } else if (key == "basis_source") {
    basis_source = rethrow_as_config([&] { return parse_basis_kind(trim(value)); });
  } else if (key == "s_max") {
    overrides.s_max = static_cast<int>(parse_integer(key, value));
  } else if (key == "l_cap") {
    overrides.l_cap = static_cast<int>(parse_integer(key, value));
  } else if (key == "tail_tol") {
    overrides.tail_tol = parse_double(key, value);
  } else if (key == "tail_window") {
    overrides.tail_window = static_cast<int>(parse_integer(key, value));
  } else if (key == "out") {
    out = trim(value);
  } else if (key == "format") {
    formats = {false, false, false};
    for (const auto& f : split_list(value)) {
      if (f == "csv") formats.csv = true;
      else if (f == "json") formats.json = true;
      else if (f == "svg") formats.svg = true;
      else throw ConfigError("unknown output format: " + f);
    }
  } else if (key == "threshold") {
    threshold = parse_double(key, value);
  } else if (key == "residual_bound") {
    residual_bound = parse_double(key, value);
  } else if (key == "l_points") {
    l_points = static_cast<int>(parse_integer(key, value));
  } else if (key == "quadrature") {
    quadrature = parse_bool(key, value);
  } else if (key == "corrupt_self_test") {
    corrupt_self_test = parse_bool(key, value);
  } else if (key == "decompose") {
    decompose = parse_bool(key, value);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void RunConfig::resolve() {
  switch (command) {
    case Command::GramConvergence:
      kinds = {OperatorKind::Identity};
      if (!V) V = 15;
      if (!basis_test) basis_test = BasisKind::Patch;
      if (!threshold) threshold = 1e-2;
      break;
    case Command::Spectrum:
      if (kinds.empty()) kinds = {OperatorKind::SingleLayer, OperatorKind::Hypersingular};
      if (!ka) ka = 30.0;
      if (!V) V = 2 * static_cast<int>(std::ceil(*ka / 2.0)) + 1;
      if (!basis_test) basis_test = BasisKind::Pyramid;
      break;
    case Command::ErrorSweep:
      if (kinds.empty()) kinds = {OperatorKind::SingleLayer, OperatorKind::Hypersingular};
      if (ka_list.empty()) ka_list = {10, 15, 20, 30, 40};
      if (!basis_test) basis_test = BasisKind::Pyramid;
      break;
    case Command::OracleCheck:
      if (kinds.empty()) kinds = {OperatorKind::Identity, OperatorKind::SingleLayer, OperatorKind::Hypersingular};
      if (!ka) ka = 2.0;
      if (!basis_test) basis_test = BasisKind::Patch;
      break;
  }
  if (!basis_source) basis_source = basis_test;

  if (ka && !(*ka > 0.0)) throw ConfigError("ka must be > 0");
  if (V && (*V < 3 || *V % 2 == 0)) throw ConfigError("V must be odd and >= 3");
  if (!(cells_per_ka > 0.0)) throw ConfigError("cells_per_ka must be > 0");
  if (overrides.s_max && *overrides.s_max < 0) throw ConfigError("s_max must be >= 0");
  if (overrides.tail_tol && !(*overrides.tail_tol > 0.0)) throw ConfigError("tail_tol must be > 0");
  if (overrides.tail_window && *overrides.tail_window < 1) throw ConfigError("tail_window must be >= 1");
  if (l_points < 2) throw ConfigError("l_points must be >= 2");
  if (out.empty()) throw ConfigError("output directory must not be empty");
  if (command == Command::ErrorSweep) {
    if (ka_list.size() < 4) throw ConfigError("error-sweep needs at least 4 ka values");
    for (std::size_t i = 0; i < ka_list.size(); ++i) {
      if (!(ka_list[i] > 0.0)) throw ConfigError("ka values must be > 0");
      if (i > 0 && !(ka_list[i] > ka_list[i - 1])) throw ConfigError("ka values must be strictly increasing");
      if (2 * static_cast<int>(std::floor(cells_per_ka * ka_list[i] / 2.0)) + 1 < 5) {
        throw ConfigError("cells_per_ka * ka too small: need V >= 5");
      }
    }
  }
}

std::string RunConfig::serialize() const {
  std::ostringstream s;
  s << "command=" << to_string(command) << '\n';
  s << "kind=";
  for (std::size_t i = 0; i < kinds.size(); ++i) s << (i ? "," : "") << to_string(kinds[i]);
  s << '\n';
  if (ka) s << "ka=" << format_double(*ka) << '\n';
  if (!ka_list.empty()) s << "ka_list=" << join_doubles(ka_list) << '\n';
  if (V) s << "V=" << *V << '\n';
  s << "cells_per_ka=" << format_double(cells_per_ka) << '\n';
  if (basis_test) s << "basis_test=" << to_string(*basis_test) << '\n';
  if (basis_source) s << "basis_source=" << to_string(*basis_source) << '\n';
  if (overrides.s_max) s << "s_max=" << *overrides.s_max << '\n';
  if (overrides.l_cap) s << "l_cap=" << *overrides.l_cap << '\n';
  if (overrides.tail_tol) s << "tail_tol=" << format_double(*overrides.tail_tol) << '\n';
  if (overrides.tail_window) s << "tail_window=" << *overrides.tail_window << '\n';
  s << "out=" << out << '\n';
  std::string f;
  if (formats.csv) f += "csv,";
  if (formats.json) f += "json,";
  if (formats.svg) f += "svg,";
  if (!f.empty()) f.pop_back();
  s << "format=" << f << '\n';
  if (threshold) s << "threshold=" << format_double(*threshold) << '\n';
  if (residual_bound) s << "residual_bound=" << format_double(*residual_bound) << '\n';
  s << "l_points=" << l_points << '\n';
  s << "quadrature=" << (quadrature ? "true" : "false") << '\n';
  s << "corrupt_self_test=" << (corrupt_self_test ? "true" : "false") << '\n';
  s << "decompose=" << (decompose ? "true" : "false") << '\n';
  s << "seed=" << seed << '\n';
  return s.str();
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + " has no '='");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "kind" && value.empty()) {
      config.kinds.clear();
      continue;
    }
    config.set(key, value);
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig config;
  apply_config_text(config, text);
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return RunConfig::parse(buffer.str());
}

}  // namespace bemspectra
