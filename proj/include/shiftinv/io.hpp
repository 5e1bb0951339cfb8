#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include <json.hpp>

#include "shiftinv/classify.hpp"
#include "shiftinv/lattice.hpp"
#include "shiftinv/oracle.hpp"
#include "shiftinv/periodization.hpp"

namespace shiftinv {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so reports serialize byte-identically.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

inline Json number(double x) { return std::isfinite(x) ? Json(round12(x)) : Json(nullptr); }

inline Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Json ivec_json(const IVec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json to_json(const Classification& c) {
  Json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["lower"] = c.lower ? number(*c.lower) : Json(nullptr);
  j["upper"] = c.upper ? number(*c.upper) : Json(nullptr);
  j["zero_fraction"] = number(c.evidence.zero_fraction);
  j["grid_res"] = c.evidence.grid_res;
  j["trunc_radius"] = c.evidence.trunc_radius;
  j["tail"] = number(c.evidence.tail);
  j["eps_zero"] = number(c.evidence.eps_zero);
  j["class_tol"] = number(c.class_tol);
  return j;
}

inline Json to_json(const PeriodizationTable& t) {
  Json j;
  j["dim"] = t.dim();
  j["grid_res"] = t.grid_res;
  j["trunc_radius"] = t.trunc_radius;
  j["tail"] = number(t.tail);
  j["generator"] = t.generator_tag;
  j["lattice"] = matrix_json(t.lattice.basis());
  Json values = Json::array();
  for (double v : t.values) values.push_back(number(v));
  j["values"] = std::move(values);
  return j;
}

/// `gamma_1,...,gamma_d,phi`, one grid point per line, lexicographic.
inline void write_phi_csv(const PeriodizationTable& t, std::ostream& out) {
  for (int i = 0; i < t.dim(); ++i) out << "gamma_" << (i + 1) << ',';
  out << "phi\n";
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const Vec g = t.gamma(flat);
    for (Eigen::Index i = 0; i < g.size(); ++i) out << fmt12(g(i)) << ',';
    out << fmt12(t.values[flat]) << '\n';
  }
}

/// Dense row-major Gram matrix, each line holding re,im pairs for one row.
inline void write_gram_csv(const GramMatrix& gram, std::ostream& out) {
  for (std::size_t a = 0; a < gram.size(); ++a) {
    for (std::size_t b = 0; b < gram.size(); ++b) {
      const cplx v = gram(a, b);
      out << (b ? "," : "") << fmt12(v.real()) << ',' << fmt12(v.imag());
    }
    out << '\n';
  }
}

}  // namespace shiftinv
