#include "jcpackets/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "jcpackets/errors.hpp"
#include "jcpackets/io.hpp"

namespace jcp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<Entry> read_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<Entry> entries;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

[[noreturn]] void fail(const Entry& e, const std::string& msg) {
  throw ConfigError("line " + std::to_string(e.line) + " (" + e.section + "." +
                    e.key + "): " + msg);
}

double parse_double(const Entry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    fail(e, "not a number: '" + e.value + "'");
  }
  if (used != e.value.size()) fail(e, "trailing characters in '" + e.value + "'");
  return v;
}

int parse_int(const Entry& e) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(e.value, &used);
  } catch (const std::exception&) {
    fail(e, "not an integer: '" + e.value + "'");
  }
  if (used != e.value.size()) fail(e, "trailing characters in '" + e.value + "'");
  return static_cast<int>(v);
}

bool parse_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(e, "expected a boolean");
}

std::vector<double> parse_double_list(const Entry& e) {
  std::string s = e.value;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) fail(e, "malformed number list");
  return out;
}

}  // namespace

DriveProtocol RunConfig::make_protocol() const {
  if (protocol_file && !steps.empty()) {
    throw ConfigError("give either inline steps or protocol_file, not both");
  }
  if (protocol_file) return read_protocol_file(*protocol_file);
  if (steps.empty()) throw ConfigError("no drive specified");
  return DriveProtocol(steps);
}

RunConfig parse_run_config(const std::string& path) {
  RunConfig cfg;
  for (const Entry& e : read_entries(path)) {
    if (e.section == "system") {
      if (e.key == "g") cfg.g = parse_double(e);
      else if (e.key == "delta") cfg.delta = parse_double(e);
      else fail(e, "unknown key");
    } else if (e.section == "drive") {
      if (e.key == "step") {
        const auto pair = parse_double_list(e);
        if (pair.size() != 2) fail(e, "step needs 'tau f'");
        cfg.steps.push_back({pair[0], pair[1]});
      } else if (e.key == "protocol_file") {
        cfg.protocol_file = e.value;
      } else {
        fail(e, "unknown key");
      }
    } else if (e.section == "run") {
      if (e.key == "initial") cfg.initial = initial_state_from_name(e.value);
      else if (e.key == "t_end") cfg.t_end = parse_double(e);
      else if (e.key == "dt") cfg.dt = parse_double(e);
      else if (e.key == "n_max") cfg.n_max = parse_int(e);
      else if (e.key == "sample_interval") cfg.sample_interval = parse_double(e);
      else if (e.key == "snapshot_interval") cfg.snapshot_interval = parse_double(e);
      else if (e.key == "tail_threshold") cfg.tail_threshold = parse_double(e);
      else if (e.key == "norm_tolerance") cfg.norm_tolerance = parse_double(e);
      else fail(e, "unknown key");
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.out_dir = e.value;
      else fail(e, "unknown key");
    } else if (e.section == "analysis") {
      if (e.key == "wigner_times") cfg.wigner_times = parse_double_list(e);
      else if (e.key == "wigner_half_width") cfg.wigner_half_width = parse_double(e);
      else if (e.key == "wigner_points") cfg.wigner_points = parse_int(e);
      else if (e.key == "spectrum") cfg.spectrum = parse_bool(e);
      else if (e.key == "packet_times") cfg.packet_times = parse_double_list(e);
      else fail(e, "unknown key");
    } else {
      fail(e, "unknown section");
    }
  }
  if (cfg.t_end < 0.0) throw ConfigError("run.t_end is required");
  return cfg;
}

SynthConfig parse_synth_config(const std::string& path) {
  SynthConfig cfg;
  bool have_n = false;
  for (const Entry& e : read_entries(path)) {
    if (e.section == "system") {
      if (e.key == "g") cfg.g = parse_double(e);
      else if (e.key == "delta") cfg.delta = parse_double(e);
      else fail(e, "unknown key");
    } else if (e.section == "synthesis") {
      if (e.key == "strategy") cfg.target.strategy = strategy_from_name(e.value);
      else if (e.key == "n_packets") {
        cfg.target.n_packets = parse_int(e);
        have_n = true;
      } else if (e.key == "weights") cfg.target.weights = parse_double_list(e);
      else if (e.key == "f_levels") cfg.target.f_levels = parse_double_list(e);
      else if (e.key == "window") cfg.target.window = parse_double(e);
      else if (e.key == "guard_radius") cfg.options.guard_radius = parse_double(e);
      else if (e.key == "prune_threshold") cfg.options.prune_threshold = parse_double(e);
      else fail(e, "unknown key");
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.out_dir = e.value;
      else fail(e, "unknown key");
    } else {
      fail(e, "unknown section");
    }
  }
  if (!have_n) throw ConfigError("synthesis.n_packets is required");
  if (cfg.target.weights.empty() && cfg.target.n_packets >= 2) {
    // Equal masses in the split sector unless stated otherwise.
    const int n = cfg.target.n_packets - 1;
    cfg.target.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  }
  return cfg;
}

}  // namespace jcp
