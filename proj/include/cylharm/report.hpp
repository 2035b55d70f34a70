#pragma once

// Machine-readable run reports: manifest, result, execution and timing sections.
// Only `manifest.wall_clock`, `execution` and `timing` (plus per-certificate
// solve times) vary between identical runs; strip_volatile removes them.

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

using Json = nlohmann::ordered_json;

inline constexpr int report_format_version = 1;

inline std::string tool_version() {
#ifdef CYLHARM_VERSION
  return CYLHARM_VERSION;
#else
  return "unknown";
#endif
}

/// Lower-case hex SHA-256 of a byte string.
inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline Json make_manifest(const std::string& command, const std::vector<std::string>& argv, Json config,
                          std::vector<std::uint64_t> seeds = {}) {
  Json m;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = std::move(config);
  m["format_version"] = report_format_version;
  m["seeds"] = seeds;
  m["tool_version"] = tool_version();
  m["wall_clock"] = utc_timestamp();
  return m;
}

/// Copy of a report without the fields that legitimately differ between replays.
inline Json strip_volatile(Json report) {
  if (report.contains("manifest")) report["manifest"].erase("wall_clock");
  report.erase("execution");
  report.erase("timing");
  if (report.contains("result") && report["result"].contains("certificate"))
    report["result"]["certificate"].erase("solve_time_ms");
  return report;
}

/// Doubles as round-trippable JSON numbers; non-finite values become strings.
inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

/// Indented `key: value` rendering for the human-readable mode.
inline void render_text(std::ostream& out, const Json& j, const std::string& indent = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    out << indent << it.key() << ':';
    if (it->is_object()) {
      out << '\n';
      render_text(out, *it, indent + "  ");
    } else if (it->is_string()) {
      const auto& text = it->get_ref<const std::string&>();
      if (text.find('\n') == std::string::npos) {
        out << ' ' << text << '\n';
        continue;
      }
      out << '\n';
      std::istringstream lines(text);
      for (std::string line; std::getline(lines, line);) out << indent << "  | " << line << '\n';
    } else {
      out << ' ' << it->dump() << '\n';
    }
  }
}

}  // namespace cylharm
