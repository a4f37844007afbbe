#pragma once

// JSON and CSV emission. Complex numbers are [re, im] pairs; CSV floats use %.17g.

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sptent/locc.hpp"
#include "sptent/spt_core.hpp"

namespace sptent {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline Complex complex_from_json(const Json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::ConfigError, "complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty() && j[0].is_array(), ErrorCode::ConfigError, "a matrix is a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols, ErrorCode::ConfigError, "ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

inline Json regions_json(const Regions& r) { return {{"A", r.A}, {"B", r.B}, {"C", r.C}, {"D", r.D}}; }

inline Json ensemble_json(const BlockEnsemble& omega) {
  Json blocks = Json::array();
  for (const auto& b : omega.blocks) blocks.push_back({{"kappa", b.kappa.dual_residues}, {"p", b.p}, {"rho", to_json(b.rho)}});
  return {{"group", omega.group.cyclic_orders()},
          {"regions", regions_json(omega.regions)},
          {"dim_a", omega.dim_a},
          {"dim_b", omega.dim_b},
          {"blocks", std::move(blocks)}};
}

inline Json transcript_json(const ProtocolTranscript& t) {
  Json branches = Json::array();
  for (const auto& b : t.branches) {
    Json labels = Json::array();
    for (const auto& l : b.labels) labels.push_back(l.dual_residues);
    branches.push_back({{"labels", std::move(labels)}, {"outcome", b.outcome.dual_residues}, {"probability", b.probability}, {"fidelity", b.fidelity}});
  }
  return {{"protocol", t.protocol},
          {"branches", std::move(branches)},
          {"outcome_distribution", t.outcome_distribution},
          {"sampled_branch", t.sampled_branch},
          {"min_fidelity", t.min_fidelity}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::ConfigError, "cannot write '" + path + "'");
  f << text;
  require(static_cast<bool>(f), ErrorCode::ConfigError, "write to '" + path + "' failed");
}

}  // namespace sptent
