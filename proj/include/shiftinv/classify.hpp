#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/periodization.hpp"

namespace shiftinv {

/// Grid estimates of the essential bounds of Φ.
struct SpectralBounds {
  double sup_all = 0.0;      // max over retained points, plus the tail
  double inf_all = 0.0;      // min over retained points
  double inf_offzero = 0.0;  // min over retained points with Φ >= eps_zero
  bool has_offzero = false;
  double zero_fraction = 0.0;  // over all grid points
  double eps_zero = 0.0;
  double tail = 0.0;
  int grid_res = 0;
  int trunc_radius = 0;
  std::size_t excluded = 0;  // points dropped as jump-adjacent
};

enum class Verdict {
  NotBessel,
  BesselNotFrameSeq,
  FrameSequence,
  RieszSequence,
  ParsevalFrameSequence,
  OrthonormalSequence,
};

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NotBessel: return "NotBessel";
    case Verdict::BesselNotFrameSeq: return "BesselNotFrameSeq";
    case Verdict::FrameSequence: return "FrameSequence";
    case Verdict::RieszSequence: return "RieszSequence";
    case Verdict::ParsevalFrameSequence: return "ParsevalFrameSequence";
    case Verdict::OrthonormalSequence: return "OrthonormalSequence";
  }
  return "Unknown";
}

/// Whether a verdict implies the frame-sequence inequalities.
constexpr bool is_frame_sequence(Verdict v) {
  return v == Verdict::FrameSequence || v == Verdict::RieszSequence || v == Verdict::ParsevalFrameSequence ||
         v == Verdict::OrthonormalSequence;
}

/// Whether a verdict implies the Riesz-sequence inequalities.
constexpr bool is_riesz(Verdict v) { return v == Verdict::RieszSequence || v == Verdict::OrthonormalSequence; }

struct ClassifyOptions {
  double class_tol = 1e-6;
  /// inf_offzero below eps_frame_rel·sup is treated as no positive lower bound.
  double eps_frame_rel = 1e-4;
  /// A grid sup above this is reported as NotBessel.
  double sup_ceiling = 1e12;
};

struct Classification {
  Verdict verdict = Verdict::NotBessel;
  std::optional<double> lower;
  std::optional<double> upper;
  SpectralBounds evidence;
  double class_tol = 0.0;
};

/// eps_zero default: 1e-8·max Φ, raised to 4·tail when truncation dominates.
inline double default_eps_zero(const PeriodizationTable& table) {
  return std::max(1e-8 * table.max(), 4.0 * table.tail);
}

/// Bound estimation on a periodic grid of N^d nonnegative samples. Points on
/// either side of a jump larger than half the grid max are left out of the
/// extrema (but still count toward zero_fraction).
inline SpectralBounds bounds_from_grid(std::span<const double> values, int grid_res, int dim, double tail,
                                       double eps_zero) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  if (!(eps_zero >= 4.0 * tail)) {
    throw Error(ErrorCode::EpsilonTooSmall, "eps_zero must be at least 4x the truncation tail");
  }
  const double peak = *std::max_element(values.begin(), values.end());
  const double jump = 0.5 * peak;
  std::vector<bool> excluded(values.size(), false);
  std::vector<int> j(dim, 0);
  std::vector<std::size_t> stride(dim, 1);
  for (int i = dim - 2; i >= 0; --i) stride[i] = stride[i + 1] * static_cast<std::size_t>(grid_res);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    for (int i = 0; i < dim; ++i) {
      const std::size_t nb = j[i] + 1 < grid_res ? flat + stride[i] : flat - stride[i] * (grid_res - 1);
      if (std::abs(values[nb] - values[flat]) > jump) {
        excluded[flat] = true;
        excluded[nb] = true;
      }
    }
    for (int i = dim - 1; i >= 0; --i) {
      if (++j[i] < grid_res) break;
      j[i] = 0;
    }
  }
  std::size_t n_excluded = std::count(excluded.begin(), excluded.end(), true);
  if (n_excluded == values.size()) {
    std::fill(excluded.begin(), excluded.end(), false);
    n_excluded = 0;
  }

  SpectralBounds b;
  b.eps_zero = eps_zero;
  b.tail = tail;
  b.grid_res = grid_res;
  b.excluded = n_excluded;
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  double inf_off = std::numeric_limits<double>::infinity();
  std::size_t zeros = 0;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const double v = values[flat];
    if (v < eps_zero) ++zeros;
    if (excluded[flat]) continue;
    sup = std::max(sup, v);
    inf = std::min(inf, v);
    if (v >= eps_zero) inf_off = std::min(inf_off, v);
  }
  b.sup_all = sup + tail;
  b.inf_all = inf;
  b.has_offzero = std::isfinite(inf_off);
  b.inf_offzero = b.has_offzero ? inf_off : inf;
  b.zero_fraction = static_cast<double>(zeros) / static_cast<double>(values.size());
  return b;
}

inline SpectralBounds spectral_bounds(const PeriodizationTable& table, double eps_zero) {
  SpectralBounds b = bounds_from_grid(table.values, table.grid_res, table.dim(), table.tail, eps_zero);
  b.trunc_radius = table.trunc_radius;
  return b;
}

inline Classification classify_translates(const SpectralBounds& bounds, const ClassifyOptions& options = {}) {
  Classification c;
  c.evidence = bounds;
  c.class_tol = options.class_tol;
  if (!std::isfinite(bounds.sup_all) || bounds.sup_all > options.sup_ceiling) {
    c.verdict = Verdict::NotBessel;
    return c;
  }
  c.upper = bounds.sup_all;
  if (!bounds.has_offzero || bounds.inf_offzero < options.eps_frame_rel * bounds.sup_all) {
    c.verdict = Verdict::BesselNotFrameSeq;
    return c;
  }
  c.lower = bounds.inf_offzero;
  const bool riesz = bounds.zero_fraction == 0.0;
  const bool tight = std::abs(*c.lower - 1.0) <= options.class_tol && std::abs(*c.upper - 1.0) <= options.class_tol;
  if (tight) {
    c.verdict = riesz ? Verdict::OrthonormalSequence : Verdict::ParsevalFrameSequence;
  } else {
    c.verdict = riesz ? Verdict::RieszSequence : Verdict::FrameSequence;
  }
  return c;
}

inline Classification classify_table(const PeriodizationTable& table, std::optional<double> eps_zero = std::nullopt,
                                     const ClassifyOptions& options = {}) {
  return classify_translates(spectral_bounds(table, eps_zero.value_or(default_eps_zero(table))), options);
}

/// The system {ψ(γ) e^{-2πik·γ}} on [0,1)^d, classified through |ψ|² with the
/// same decision tree. Samples lie on a uniform N^d grid, first axis slowest.
inline Classification classify_weighted_exponentials(std::span<const cplx> psi_samples, int dim, double eps_zero,
                                                     const ClassifyOptions& options = {}) {
  if (psi_samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples of the weight");
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::UnsupportedDimension, "dimension must be 1..3");
  const int n = static_cast<int>(std::llround(std::pow(static_cast<double>(psi_samples.size()), 1.0 / dim)));
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  if (total != psi_samples.size()) throw Error(ErrorCode::InvalidArgument, "sample count is not N^d");
  std::vector<double> weights(psi_samples.size());
  std::transform(psi_samples.begin(), psi_samples.end(), weights.begin(), [](cplx v) { return std::norm(v); });
  return classify_translates(bounds_from_grid(weights, n, dim, 0.0, eps_zero), options);
}

struct CompactSupportCheck {
  bool riesz = false;
  Vec witness;  // grid point attaining the minimum of Φ
  double min_value = 0.0;
};

/// For compactly supported f, Φ is continuous and τ_A(f) is a Riesz sequence
/// exactly when Φ has no zero; decided here on the grid.
inline CompactSupportCheck compact_support_riesz_check(const Generator& g, const LatticeSpec& lattice,
                                                       const PeriodizationTable& table, double eps_zero) {
  if (spatial_support(g).cls != SpatialSupport::Class::Compact) {
    throw Error(ErrorCode::NotCompactlySupported, "generator is not compactly supported in space");
  }
  if (g.dim() != lattice.dim() || table.dim() != lattice.dim()) {
    throw Error(ErrorCode::InvalidArgument, "generator, lattice and table dimensions differ");
  }
  const auto it = std::min_element(table.values.begin(), table.values.end());
  CompactSupportCheck out;
  out.min_value = *it;
  out.witness = table.gamma(static_cast<std::size_t>(it - table.values.begin()));
  out.riesz = out.min_value >= eps_zero;
  return out;
}

struct PerturbationCheck {
  Classification perturbed;
  bool frame_for_original_span = false;
  /// inf / sup of the perturbed Φ over the off-zero set of the original Φ.
  double lower_on_original = 0.0;
  double upper_on_original = 0.0;
};

/// Classifies {T_{Ak} f + T_{Ak+An} f} and decides whether it is still a
/// frame for the span of the original translates.
inline PerturbationCheck perturbation_frame_check(const PeriodizationTable& table, const IVec& n, double eps_zero,
                                                  const ClassifyOptions& options = {}) {
  const PeriodizationTable pert = perturbed_phi(table, n);
  PerturbationCheck out;
  out.perturbed = classify_translates(spectral_bounds(pert, eps_zero), options);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    if (table.values[flat] < eps_zero) continue;
    lo = std::min(lo, pert.values[flat]);
    hi = std::max(hi, pert.values[flat]);
  }
  if (!std::isfinite(lo)) throw Error(ErrorCode::DegenerateSpan, "original Φ vanishes on the whole grid");
  out.lower_on_original = lo;
  out.upper_on_original = hi + pert.tail;
  out.frame_for_original_span = lo > eps_zero;
  return out;
}

}  // namespace shiftinv
