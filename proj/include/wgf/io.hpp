#pragma once

// Plain-text exchange formats: comma-separated files with a header row,
// '\n' line endings and 17 significant digits, and small JSON documents.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "wgf/energetics.hpp"
#include "wgf/error.hpp"
#include "wgf/measures.hpp"
#include "wgf/steady.hpp"

namespace wgf::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest locale-independent text with 17 significant digits.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("cannot parse number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

inline json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// ---- InverseCDF ----

inline std::string inverse_cdf_csv(const InverseCDF& X) {
  std::string s = "z,x\n";
  for (std::size_t i = 0; i < X.size(); ++i) s += format_double(X.z(i)) + "," + format_double(X[i]) + "\n";
  return s;
}

inline void write_inverse_cdf(const fs::path& path, const InverseCDF& X) { write_text(path, inverse_cdf_csv(X)); }

/// Reads a `z,x` file; the z column must be the midpoint grid of its length.
inline InverseCDF read_inverse_cdf(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines.front() != "z,x") throw InputError(path.string() + ": expected header 'z,x'");
  const std::size_t n = lines.size() - 1;
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_fields(lines[i + 1]);
    if (fields.size() != 2) throw InputError(path.string() + ": line " + std::to_string(i + 2) + " needs two fields");
    const double z = parse_double(fields[0]);
    if (std::abs(z - InverseCDF::node(i, n)) > 1e-12)
      throw InputError(path.string() + ": z column is not the midpoint grid at line " + std::to_string(i + 2));
    x.push_back(parse_double(fields[1]));
  }
  return InverseCDF(std::move(x));
}

// ---- ReferenceProfile ----

/// {"breakpoints": [...], "densities": [...]}, or {"uniform": [a, b], "mass": m}.
inline ReferenceProfile profile_from_json(const json& doc) {
  try {
    if (doc.contains("uniform")) {
      const auto ab = doc.at("uniform").get<std::vector<double>>();
      if (ab.size() != 2) throw InputError("profile 'uniform' needs [a, b]");
      return ReferenceProfile::uniform(ab[0], ab[1], doc.value("mass", 1.0));
    }
    return ReferenceProfile(doc.at("breakpoints").get<std::vector<double>>(),
                            doc.at("densities").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InputError(std::string("profile: ") + e.what());
  }
}

inline json profile_to_json(const ReferenceProfile& profile) {
  const auto b = profile.breakpoints();
  const auto d = profile.densities();
  return json{{"breakpoints", std::vector<double>(b.begin(), b.end())},
              {"densities", std::vector<double>(d.begin(), d.end())}};
}

inline ReferenceProfile read_profile(const fs::path& path) { return profile_from_json(read_json(path)); }

// ---- energy reports ----

inline constexpr std::string_view kEnergyHeader = "t,E,D,E_hat,moment_qa,moment_r";

inline std::string energy_csv(std::span<const EnergyReport> reports) {
  std::string s(kEnergyHeader);
  s += "\n";
  for (const EnergyReport& r : reports) {
    s += format_double(r.t) + "," + format_double(r.E) + "," + format_double(r.D) + ",";
    if (r.E_hat) s += format_double(*r.E_hat);
    s += "," + format_double(r.moment_qa) + "," + format_double(r.moment_r) + "\n";
  }
  return s;
}

inline void write_energy(const fs::path& path, std::span<const EnergyReport> reports) {
  write_text(path, energy_csv(reports));
}

inline std::vector<EnergyReport> read_energy(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines.front() != kEnergyHeader)
    throw InputError(path.string() + ": expected header '" + std::string(kEnergyHeader) + "'");
  std::vector<EnergyReport> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split_fields(lines[k]);
    if (f.size() != 6) throw InputError(path.string() + ": line " + std::to_string(k + 1) + " needs six fields");
    EnergyReport r;
    r.t = parse_double(f[0]);
    r.E = parse_double(f[1]);
    r.D = parse_double(f[2]);
    if (!f[3].empty()) r.E_hat = parse_double(f[3]);
    r.moment_qa = parse_double(f[4]);
    r.moment_r = parse_double(f[5]);
    out.push_back(r);
  }
  return out;
}

// ---- trajectories ----

inline std::string snapshot_name(std::size_t k) {
  std::string digits = std::to_string(k);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "snap_" + digits + ".csv";
}

/// Writes one `z,x` file per snapshot and an index.json listing times and files.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create directory " + dir_.string() + ": " + ec.message());
  }

  void add(const FlowState& s) {
    const std::string name = snapshot_name(times_.size());
    write_inverse_cdf(dir_ / name, s.X);
    times_.push_back(s.t);
    slopes_.push_back(s.min_slope);
    files_.push_back(name);
  }

  void finish() const {
    json slopes = json::array();
    for (double v : slopes_) slopes.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    write_json(dir_ / "index.json", json{{"times", times_}, {"files", files_}, {"min_slope", slopes}});
  }

 private:
  fs::path dir_;
  std::vector<double> times_;
  std::vector<double> slopes_;
  std::vector<std::string> files_;
};

// ---- steady states ----

inline json steady_sidecar(const SteadyState& s) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"kind", to_string(s.kind)}, {"x_lo", num(s.x_lo)}, {"x_hi", num(s.x_hi)}, {"x_zero", num(s.x_zero)}};
}

/// steady.csv (when the state exists) and steady.json in dir.
inline void write_steady(const fs::path& dir, const SteadyState& s) {
  if (s.Xstar) write_inverse_cdf(dir / "steady.csv", *s.Xstar);
  write_json(dir / "steady.json", steady_sidecar(s));
}

}  // namespace wgf::io
