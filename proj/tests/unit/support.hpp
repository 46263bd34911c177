#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace testing {

inline nlohmann::json golden() {
  std::ifstream in(std::string(VAPORDET_SOURCE_DIR) + "/tests/golden/worked_design.json");
  return nlohmann::json::parse(in);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
