#pragma once

// CSV / JSON encodings for trajectories, function sets, and radius reports.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdo/analysis.hpp"
#include "rdo/convex.hpp"
#include "rdo/dynamics.hpp"

namespace rdo {

using Json = nlohmann::json;

// 17 significant digits: exact round trip, stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "k,eta,f_bar,f_min,f_max,consensus_diameter,max_dist_to_aux,filters_removed_total";

inline void write_records_csv(std::ostream& os, const std::vector<IterationRecord>& records) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : records) {
    os << r.k << ',' << format_double(r.eta) << ',' << format_double(r.f_bar) << ',' << format_double(r.f_min) << ','
       << format_double(r.f_max) << ',' << format_double(r.consensus_diameter) << ','
       << format_double(r.max_dist_to_aux) << ',' << r.filters_removed_total << '\n';
  }
}

inline std::vector<IterationRecord> read_records_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw DataError("trajectory CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) throw DataError("trajectory CSV header mismatch: '" + line + "'");
  std::vector<IterationRecord> out;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw DataError("trajectory CSV line " + std::to_string(line_no) + ": expected 8 columns");
    try {
      IterationRecord r;
      r.k = std::stoull(cells[0]);
      r.eta = std::stod(cells[1]);
      r.f_bar = std::stod(cells[2]);
      r.f_min = std::stod(cells[3]);
      r.f_max = std::stod(cells[4]);
      r.consensus_diameter = std::stod(cells[5]);
      r.max_dist_to_aux = std::stod(cells[6]);
      r.filters_removed_total = std::stoull(cells[7]);
      out.push_back(r);
    } catch (const std::exception&) {
      throw DataError("trajectory CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  for (std::size_t t = 1; t < out.size(); ++t)
    if (out[t].k <= out[t - 1].k) throw DataError("trajectory CSV: k must be strictly increasing");
  return out;
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

/// {"d": d, "functions": [{"Q": [row-major d*d], "b": [d], "L": L}, ...]}
inline Json functions_to_json(const std::vector<QuadraticFunction>& fs) {
  Json arr = Json::array();
  for (const auto& f : fs) {
    Json q = Json::array();
    for (Eigen::Index r = 0; r < f.q().rows(); ++r)
      for (Eigen::Index c = 0; c < f.q().cols(); ++c) q.push_back(f.q()(r, c));
    arr.push_back({{"Q", q}, {"b", to_json(f.b())}, {"L", f.saturation_bound()}});
  }
  return {{"d", fs.empty() ? 0 : fs.front().dim()}, {"functions", arr}};
}

inline std::vector<QuadraticFunction> functions_from_json(const Json& j) {
  try {
    const auto d = static_cast<Eigen::Index>(j.at("d").get<std::size_t>());
    std::vector<QuadraticFunction> out;
    for (const auto& e : j.at("functions")) {
      const auto& q = e.at("Q");
      if (q.size() != static_cast<std::size_t>(d * d)) throw DataError("Q must have d*d entries");
      Matrix m(d, d);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = q[static_cast<std::size_t>(r * d + c)].get<double>();
      Vector b = vector_from_json(e.at("b"));
      out.emplace_back(std::move(m), std::move(b), e.at("L").get<double>());
    }
    return out;
  } catch (const Json::exception& ex) {
    throw DataError(std::string("function set JSON: ") + ex.what());
  }
}

inline Json radius_report_to_json(const RadiusReport& r) {
  return {{"R_star", r.r_star},     {"argmin_eps", r.argmin_eps}, {"R_tilde", r.r_tilde},
          {"eps_grid", r.eps_grid}, {"s_star", r.s_star}};
}

}  // namespace rdo
