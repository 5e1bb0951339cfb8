#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/io.hpp"
#include "shiftinv/lattice.hpp"

namespace shiftinv {

/// Everything a CLI run needs, after presets, config file and flag
/// overrides have been merged.
struct RunConfig {
  Json generator;  // generator spec, see generator_from_json
  Mat lattice;     // row-major matrix A
  int grid_res = 1024;
  std::optional<double> target_tail;
  std::optional<double> eps_zero;
  double class_tol = 1e-6;
  int oracle_m = 8;
  std::string out;

  Json to_json() const {
    Json j;
    j["generator"] = generator;
    j["lattice"] = matrix_json(lattice);
    j["grid_res"] = grid_res;
    j["target_tail"] = target_tail ? number(*target_tail) : Json(nullptr);
    j["eps_zero"] = eps_zero ? number(*eps_zero) : Json(nullptr);
    j["class_tol"] = number(class_tol);
    j["oracle_m"] = oracle_m;
    return j;
  }
};

namespace detail {

inline Vec json_vec(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a non-empty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace detail

inline Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidArgument, "matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorCode::InvalidArgument, "matrix must be square (row-major array of rows)");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

/// Builds a generator from its JSON spec. Recognized kinds: frequency_box
/// (lower, upper, optional shape: matrix or "dual" for (A^T)^{-1}), sinc,
/// bspline (order), gaussian (sigma), sampled (csv, band_limit). Optional
/// "amplitude" and "shift" rescale and translate the result.
inline Generator generator_from_json(const Json& spec, const LatticeSpec& lattice,
                                     const std::filesystem::path& base_dir = {}) {
  if (!spec.is_object() || !spec.contains("kind")) {
    throw Error(ErrorCode::InvalidArgument, "generator spec needs a \"kind\"");
  }
  const std::string kind = spec["kind"].get<std::string>();
  const int d = spec.value("dim", lattice.dim());
  auto make = [&]() -> Generator {
    if (kind == "frequency_box") {
      const Vec lo = detail::json_vec(spec.at("lower"), "lower");
      const Vec hi = detail::json_vec(spec.at("upper"), "upper");
      if (!spec.contains("shape")) return Generator::frequency_box(lo, hi);
      const Json& shape = spec["shape"];
      if (shape.is_string()) {
        if (shape.get<std::string>() != "dual") throw Error(ErrorCode::InvalidArgument, "shape must be a matrix or \"dual\"");
        return Generator::frequency_box(lo, hi, lattice.dual_basis());
      }
      return Generator::frequency_box(lo, hi, matrix_from_json(shape));
    }
    if (kind == "sinc") return Generator::sinc(d);
    if (kind == "bspline") return Generator::bspline(spec.value("order", 1), d);
    if (kind == "gaussian") return Generator::gaussian(spec.value("sigma", 1.0), d);
    if (kind == "sampled") {
      std::filesystem::path path = spec.at("csv").get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "sample file not found: " + path.string());
      std::optional<double> band;
      if (spec.contains("band_limit") && !spec["band_limit"].is_null()) band = spec["band_limit"].get<double>();
      return Generator::sampled(load_sampled_csv(path.string(), band));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown generator kind '" + kind + "'");
  };
  Generator g = make();
  if (spec.contains("amplitude")) g = g.scaled(spec["amplitude"].get<double>());
  if (spec.contains("shift")) g = g.translated(detail::json_vec(spec["shift"], "shift"));
  if (g.dim() != lattice.dim()) throw Error(ErrorCode::InvalidArgument, "generator and lattice dimensions differ");
  return g;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"example", "sinc", "bspline1", "bspline3", "gauss", "sinc2d"};
  return names;
}

/// Built-in configurations; none needs external files.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.lattice = Mat::Identity(1, 1);
  c.grid_res = 4096;
  if (name == "example") {
    // f̂ = indicator of (A^T)^{-1}[-1/3,1/3]^d
    c.generator = Json{{"kind", "frequency_box"}, {"lower", {-1.0 / 3.0}}, {"upper", {1.0 / 3.0}}, {"shape", "dual"}};
    c.grid_res = 1024;
  } else if (name == "sinc") {
    c.generator = Json{{"kind", "sinc"}};
  } else if (name == "bspline1") {
    c.generator = Json{{"kind", "bspline"}, {"order", 1}};
  } else if (name == "bspline3") {
    c.generator = Json{{"kind", "bspline"}, {"order", 3}};
  } else if (name == "gauss") {
    c.generator = Json{{"kind", "gaussian"}, {"sigma", 1.0}};
  } else if (name == "sinc2d") {
    c.generator = Json{{"kind", "sinc"}, {"dim", 2}};
    c.lattice = Mat(2, 2);
    c.lattice << 1.0, 1.0, 0.0, 1.0;
    c.grid_res = 256;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
  }
  return c;
}

/// Overlays a JSON config file onto `base`.
inline RunConfig merge_config_file(RunConfig base, const Json& j) {
  if (j.contains("generator")) base.generator = j["generator"];
  if (j.contains("lattice")) base.lattice = matrix_from_json(j["lattice"]);
  if (j.contains("grid_res")) base.grid_res = j["grid_res"].get<int>();
  if (j.contains("target_tail") && !j["target_tail"].is_null()) base.target_tail = j["target_tail"].get<double>();
  if (j.contains("eps_zero") && !j["eps_zero"].is_null()) base.eps_zero = j["eps_zero"].get<double>();
  if (j.contains("class_tol")) base.class_tol = j["class_tol"].get<double>();
  if (j.contains("oracle_m")) base.oracle_m = j["oracle_m"].get<int>();
  if (j.contains("out")) base.out = j["out"].get<std::string>();
  return base;
}

inline void validate(const RunConfig& c) {
  if (c.generator.is_null()) throw Error(ErrorCode::InvalidArgument, "no generator given (use --preset or --config)");
  if (c.lattice.size() == 0) throw Error(ErrorCode::InvalidArgument, "no lattice matrix given");
  if (c.grid_res < 16 || (c.grid_res & (c.grid_res - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be a power of two >= 16");
  }
  if (c.target_tail && !(*c.target_tail > 0.0)) throw Error(ErrorCode::InvalidArgument, "target_tail must be > 0");
  if (c.eps_zero && !(*c.eps_zero > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_zero must be > 0");
  if (!(c.class_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "class_tol must be > 0");
  if (c.oracle_m < 1) throw Error(ErrorCode::InvalidArgument, "oracle_m must be >= 1");
}

}  // namespace shiftinv
