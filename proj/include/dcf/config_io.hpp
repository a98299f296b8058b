#pragma once

#include <fstream>
#include <istream>
#include <string>

#include "dcf/errors.hpp"
#include "dcf/mac_model.hpp"

namespace dcf {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw InvalidArgumentError("config: bad numeric value for '" + key + "': " + value);
  }
  if (pos != value.size()) {
    throw InvalidArgumentError("config: trailing junk in value for '" + key + "': " + value);
  }
  return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw InvalidArgumentError("config: '" + key + "' must be an integer");
  }
  return i;
}

}  // namespace detail

// Flat key=value MAC/PHY profile. Keys match the MacPhyParams field names;
// durations are given in microseconds, data_rate in bits/s, sizes in bytes.
// Missing keys keep the stock profile defaults; '#' starts a comment.
inline MacPhyParams parse_mac_phy_config(std::istream& in) {
  MacPhyParams p = dot11b_1mbps();
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgumentError("config: line " + std::to_string(lineno) +
                                 " is not key=value: " + raw);
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key == "w_min") {
      p.w_min = detail::parse_int(key, value);
    } else if (key == "m_stages") {
      p.m_stages = detail::parse_int(key, value);
    } else if (key == "slot_time") {
      p.slot_time = detail::parse_number(key, value) * 1e-6;
    } else if (key == "sifs") {
      p.sifs = detail::parse_number(key, value) * 1e-6;
    } else if (key == "difs") {
      p.difs = detail::parse_number(key, value) * 1e-6;
    } else if (key == "phy_header_time") {
      p.phy_header_time = detail::parse_number(key, value) * 1e-6;
    } else if (key == "prop_delay") {
      p.prop_delay = detail::parse_number(key, value) * 1e-6;
    } else if (key == "mac_header_bytes") {
      p.mac_header_bytes = detail::parse_int(key, value);
    } else if (key == "ack_bytes") {
      p.ack_bytes = detail::parse_int(key, value);
    } else if (key == "payload_bytes") {
      p.payload_bytes = detail::parse_int(key, value);
    } else if (key == "data_rate") {
      p.data_rate = detail::parse_number(key, value);
    } else {
      throw InvalidArgumentError("config: unknown key '" + key + "' on line " +
                                 std::to_string(lineno));
    }
  }
  validate_mac_phy(p);
  return p;
}

inline MacPhyParams load_mac_phy_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgumentError("config: cannot open " + path);
  }
  return parse_mac_phy_config(in);
}

}  // namespace dcf
