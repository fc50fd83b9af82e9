#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mir/errors.hpp"
#include "mir/sets.hpp"

namespace mir {

struct ReportRecord {
  std::string mechanism;
  std::string instance;
  std::uint64_t seed = 0;
  int k = 0;
  Value welfare = 0;
  bool has_opt = false;
  Value opt = 0;
  std::vector<Value> payments;
  std::vector<std::uint64_t> queries;
  int z = 0;
  bool has_wall = false;
  std::int64_t wall_ms = 0;

  bool operator==(const ReportRecord&) const = default;
};

namespace detail {

inline std::string ratio_string(Value opt, Value welfare) {
  if (welfare == 0) return opt == 0 ? "1.000000" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f",
                static_cast<double>(opt) / static_cast<double>(welfare));
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ";";
    out += std::to_string(xs[i]);
  }
  return out;
}

template <typename T>
std::vector<T> split_values(const std::string& s) {
  std::vector<T> out;
  std::istringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ';'))
    if (!cell.empty()) out.push_back(static_cast<T>(std::stoll(cell)));
  return out;
}

}  // namespace detail

inline const char* report_csv_header() {
  return "mechanism,instance,seed,k,welfare,opt,ratio,payments,queries,z,wall_ms";
}

inline void write_report_csv(std::ostream& os, const std::vector<ReportRecord>& records) {
  os << report_csv_header() << "\n";
  for (const auto& r : records) {
    os << r.mechanism << "," << r.instance << "," << r.seed << "," << r.k << ","
       << r.welfare << ",";
    if (r.has_opt) os << r.opt;
    os << ",";
    if (r.has_opt) os << detail::ratio_string(r.opt, r.welfare);
    os << "," << detail::join(r.payments) << "," << detail::join(r.queries) << ","
       << r.z << ",";
    if (r.has_wall) os << r.wall_ms;
    os << "\n";
  }
}

inline void write_report_jsonl(std::ostream& os, const std::vector<ReportRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j;
    j["mechanism"] = r.mechanism;
    j["instance"] = r.instance;
    j["seed"] = r.seed;
    j["k"] = r.k;
    j["welfare"] = r.welfare;
    if (r.has_opt) {
      j["opt"] = r.opt;
      j["ratio"] = detail::ratio_string(r.opt, r.welfare);
    }
    j["payments"] = r.payments;
    j["queries"] = r.queries;
    j["z"] = r.z;
    if (r.has_wall) j["wall_ms"] = r.wall_ms;
    os << j.dump() << "\n";
  }
}

inline std::vector<ReportRecord> read_report_csv(std::istream& is) {
  std::vector<ReportRecord> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != report_csv_header())
    throw MalformedInputError("report csv: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(11);
    ReportRecord r;
    r.mechanism = cells[0];
    r.instance = cells[1];
    r.seed = std::stoull(cells[2].empty() ? "0" : cells[2]);
    r.k = std::stoi(cells[3].empty() ? "0" : cells[3]);
    r.welfare = std::stoll(cells[4].empty() ? "0" : cells[4]);
    r.has_opt = !cells[5].empty();
    if (r.has_opt) r.opt = std::stoll(cells[5]);
    r.payments = detail::split_values<Value>(cells[7]);
    r.queries = detail::split_values<std::uint64_t>(cells[8]);
    r.z = std::stoi(cells[9].empty() ? "0" : cells[9]);
    r.has_wall = !cells[10].empty();
    if (r.has_wall) r.wall_ms = std::stoll(cells[10]);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ReportRecord> read_report_jsonl(std::istream& is) {
  std::vector<ReportRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ReportRecord r;
    r.mechanism = j.at("mechanism").get<std::string>();
    r.instance = j.at("instance").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.k = j.at("k").get<int>();
    r.welfare = j.at("welfare").get<Value>();
    r.has_opt = j.contains("opt");
    if (r.has_opt) r.opt = j.at("opt").get<Value>();
    r.payments = j.at("payments").get<std::vector<Value>>();
    r.queries = j.at("queries").get<std::vector<std::uint64_t>>();
    r.z = j.at("z").get<int>();
    r.has_wall = j.contains("wall_ms");
    if (r.has_wall) r.wall_ms = j.at("wall_ms").get<std::int64_t>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mir
