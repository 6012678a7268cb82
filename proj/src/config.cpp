// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fluidmimo {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw std::runtime_error("config: bad integer for " + key + ": '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad unsigned integer for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw std::runtime_error("config: bad unsigned integer for " + key + ": '" + value + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad number for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw std::runtime_error("config: bad number for " + key + ": '" + value + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::string spaced = value;
  for (char& ch : spaced)
    if (ch == ',') ch = ' ';
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_real(key, tok));
  return out;
}

}  // namespace

AntennaMode parse_mode(const std::string& word) {
  if (word == "fpa") return AntennaMode::kFpa;
  if (word == "trfa") return AntennaMode::kTrfa;
  throw std::runtime_error("config: mode must be 'fpa' or 'trfa', got '" + word + "'");
}

const char* mode_name(AntennaMode mode) { return mode == AntennaMode::kFpa ? "fpa" : "trfa"; }

SystemConfig parse_config_text(const std::string& text) {
  SystemConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) + " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config: line " + std::to_string(line_no) + " is incomplete");

    if (key == "system.K") cfg.num_users = static_cast<int>(parse_int(key, value));
    else if (key == "system.N") cfg.rx_antennas = static_cast<int>(parse_int(key, value));
    else if (key == "system.M") cfg.tx_antennas = static_cast<int>(parse_int(key, value));
    else if (key == "system.C") cfg.clusters = static_cast<int>(parse_int(key, value));
    else if (key == "system.d") cfg.streams = static_cast<int>(parse_int(key, value));
    else if (key == "system.fc_hz") cfg.carrier_hz = parse_real(key, value);
    else if (key == "system.pmax_dbm") cfg.pmax_dbm = parse_real(key, value);
    else if (key == "system.noise_dbm") cfg.noise_dbm = parse_real(key, value);
    else if (key == "system.S") cfg.realizations = static_cast<int>(parse_int(key, value));
    else if (key == "system.seed") cfg.seed = parse_u64(key, value);
    else if (key == "system.mode") cfg.mode = parse_mode(value);
    else if (key == "channel.L_tx") cfg.paths_tx = static_cast<int>(parse_int(key, value));
    else if (key == "channel.L_rx") cfg.paths_rx = static_cast<int>(parse_int(key, value));
    else if (key == "channel.pathloss_exp") cfg.pathloss_exp = parse_real(key, value);
    else if (key == "channel.T0_db") cfg.ref_gain_db = parse_real(key, value);
    else if (key == "channel.d_min_m") cfg.dist_min_m = parse_real(key, value);
    else if (key == "channel.d_max_m") cfg.dist_max_m = parse_real(key, value);
    else if (key == "regions.side_m") cfg.region_side_m = parse_real(key, value);
    else if (key == "regions.gap_m") cfg.region_gap_m = parse_real(key, value);
    else if (key == "weights") cfg.weights = parse_list(key, value);
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  return cfg;
}

SystemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace fluidmimo
