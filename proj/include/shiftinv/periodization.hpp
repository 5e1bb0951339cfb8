#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/lattice.hpp"
#include "shiftinv/quadrature.hpp"

namespace shiftinv {

/// Samples of Φ on the grid γ_j = j/N, j ∈ {0..N-1}^d, stored
/// lexicographically with the first axis slowest.
struct PeriodizationTable {
  LatticeSpec lattice;
  int grid_res = 0;
  std::vector<double> values;
  int trunc_radius = 0;
  double tail = 0.0;
  std::string generator_tag;

  int dim() const { return lattice.dim(); }
  std::size_t size() const { return values.size(); }

  std::vector<int> multi_index(std::size_t flat) const {
    std::vector<int> j(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      j[i] = static_cast<int>(flat % static_cast<std::size_t>(grid_res));
      flat /= static_cast<std::size_t>(grid_res);
    }
    return j;
  }

  std::size_t flat_index(const std::vector<int>& j) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
      const int w = ((j[i] % grid_res) + grid_res) % grid_res;
      flat = flat * static_cast<std::size_t>(grid_res) + static_cast<std::size_t>(w);
    }
    return flat;
  }

  Vec gamma(std::size_t flat) const {
    const auto j = multi_index(flat);
    Vec g(dim());
    for (int i = 0; i < dim(); ++i) g(i) = static_cast<double>(j[i]) / grid_res;
    return g;
  }

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  double max() const { return *std::max_element(values.begin(), values.end()); }
  double min() const { return *std::min_element(values.begin(), values.end()); }
};

struct PhiOptions {
  /// Absolute tail target; when absent, 1e-10 times the grid max of a K=8 pilot pass.
  std::optional<double> target_tail;
  /// Largest truncation radius allowed; 0 selects the per-dimension default.
  int radius_cap = 0;
};

inline int default_radius_cap(int dim) { return dim == 1 ? 10000 : (dim == 2 ? 1000 : 100); }

/// Φ(γ) = (1/|det A|) Σ_{|k|_inf ≤ K} |f̂((A^T)^{-1}(γ+k))|², γ wrapped to [0,1)^d.
/// Summation is lexicographic in k.
inline double phi_at(const Generator& g, const LatticeSpec& lattice, const Vec& gamma, int radius) {
  const Vec w = wrap_to_unit_cell(gamma);
  const Mat& dual = lattice.dual_basis();
  double acc = 0.0;
  Vec shifted(w.size());
  for_each_index_in_box(lattice.dim(), radius, [&](const IVec& k) {
    shifted = w + k.cast<double>();
    acc += fourier_abs2(g, dual * shifted);
  });
  return acc / lattice.det_abs();
}

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline std::vector<double> phi_grid(const Generator& g, const LatticeSpec& lattice, int n, int radius) {
  const int d = lattice.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::vector<double> values(total);
  Vec gamma(d);
  std::vector<int> j(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (int i = 0; i < d; ++i) gamma(i) = static_cast<double>(j[i]) / n;
    values[flat] = phi_at(g, lattice, gamma, radius);
    for (int i = d - 1; i >= 0; --i) {
      if (++j[i] < n) break;
      j[i] = 0;
    }
  }
  return values;
}

// Smallest K >= 1 with tail_bound(K) <= target, or nullopt beyond cap.
inline std::optional<std::pair<int, double>> choose_radius(const Generator& g, const LatticeSpec& lattice,
                                                           double target, int cap) {
  int lo = 0;  // tail(lo) > target (lo = 0 is a sentinel)
  int hi = 1;
  double hi_tail = tail_bound(g, lattice, hi);
  while (hi_tail > target) {
    lo = hi;
    if (hi >= cap) return std::nullopt;
    hi = std::min(cap, hi * 2);
    hi_tail = tail_bound(g, lattice, hi);
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double t = tail_bound(g, lattice, mid);
    if (t <= target) {
      hi = mid;
      hi_tail = t;
    } else {
      lo = mid;
    }
  }
  return std::make_pair(hi, hi_tail);
}

}  // namespace detail

inline PeriodizationTable compute_phi(const Generator& g, const LatticeSpec& lattice, int grid_res,
                                      const PhiOptions& options = {}) {
  if (g.dim() != lattice.dim()) throw Error(ErrorCode::InvalidArgument, "generator and lattice dimensions differ");
  if (grid_res < 16 || !detail::is_power_of_two(grid_res)) {
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be a power of two >= 16");
  }
  const int cap = options.radius_cap > 0 ? options.radius_cap : default_radius_cap(lattice.dim());
  double target = 0.0;
  if (options.target_tail) {
    if (!(*options.target_tail > 0.0)) throw Error(ErrorCode::InvalidArgument, "target tail must be positive");
    target = *options.target_tail;
  } else {
    (void)decay_bound(g);  // surfaces NoDecayInfo before the pilot pass
    const auto pilot = detail::phi_grid(g, lattice, grid_res, 8);
    double peak = *std::max_element(pilot.begin(), pilot.end());
    if (!(peak > 0.0)) peak = l2_norm_squared(g);
    target = 1e-10 * peak;
  }
  const auto chosen = detail::choose_radius(g, lattice, target, cap);
  if (!chosen) {
    throw Error(ErrorCode::TailNotAchievable,
                "tail target not reached within truncation radius " + std::to_string(cap));
  }
  PeriodizationTable table{lattice, grid_res, {}, chosen->first, chosen->second, g.tag()};
  table.values = detail::phi_grid(g, lattice, grid_res, chosen->first);
  return table;
}

// ---------------------------------------------------------------------------
// Λ-periodization of L¹ functions
// ---------------------------------------------------------------------------

struct L1Periodization {
  std::vector<cplx> values;  // ψ(x_j) at the requested points
  cplx cell_integral;        // ∫_{Q_A} ψ
  cplx total_integral;       // ∫_{R^d} f
};

/// ψ(x) = Σ_{|k|_inf ≤ K} f(x + A·k)
inline cplx periodized_value(const Generator& g, const LatticeSpec& lattice, const Vec& x, int radius) {
  cplx acc = 0.0;
  for_each_index_in_box(lattice.dim(), radius, [&](const IVec& k) {
    acc += eval_spatial(g, x + lattice.to_spatial(k));
  });
  return acc;
}

inline L1Periodization periodize_l1(const Generator& g, const LatticeSpec& lattice, const std::vector<Vec>& points,
                                    int radius) {
  if (g.dim() != lattice.dim()) throw Error(ErrorCode::InvalidArgument, "generator and lattice dimensions differ");
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be nonnegative");
  if (spatial_support(g).cls == SpatialSupport::Class::Unbounded) {
    throw Error(ErrorCode::NoDecayInfo, "generator has no known spatial decay; it need not be integrable");
  }
  L1Periodization out;
  out.values.reserve(points.size());
  for (const auto& x : points) out.values.push_back(periodized_value(g, lattice, x, radius));

  // Q_A = A·[0,1)^d; even panel counts keep kinks at half-cells on panel edges.
  const int d = lattice.dim();
  const long panels = d == 1 ? 64 : (d == 2 ? 8 : 2);
  const TensorGrid grid = composite_gauss<16>(Vec::Zero(d), Vec::Ones(d), std::vector<long>(d, panels));
  const Mat& a = lattice.basis();
  out.cell_integral = lattice.det_abs() * integrate_tensor<cplx>(grid, [&](const Vec& u) {
                        return periodized_value(g, lattice, a * u, radius);
                      });
  out.total_integral = spatial_integral(g);
  return out;
}

// ---------------------------------------------------------------------------
// Fourier coefficients of Φ
// ---------------------------------------------------------------------------

/// c_n = ⟨f, T_{-An} f⟩ = ∫ f(x) conj(f(x + A·n)) dx
inline cplx autocorrelation(const Generator& g, const LatticeSpec& lattice, const IVec& n) {
  if (n.size() != lattice.dim()) throw Error(ErrorCode::InvalidArgument, "index has wrong dimension");
  return correlation(g, lattice.to_spatial(n));
}

/// Coefficients indexed by n with |n|_inf ≤ n_max, stored lexicographically.
struct CoefficientTable {
  int dim = 1;
  int n_max = 0;
  std::vector<IVec> indices;
  std::vector<cplx> values;

  cplx at(const IVec& n) const {
    if (n.size() != dim || n.cwiseAbs().maxCoeff() > n_max) {
      throw Error(ErrorCode::InvalidArgument, "coefficient index out of range");
    }
    std::size_t flat = 0;
    for (int i = 0; i < dim; ++i) flat = flat * (2 * n_max + 1) + static_cast<std::size_t>(n(i) + n_max);
    return values[flat];
  }
};

namespace detail {

// cos/sin of 2πr/N for r in [0,N); indexing by exact integer phase keeps
// the DFT and the perturbation factor free of argument-reduction error.
struct Twiddles {
  std::vector<double> cos_table;
  std::vector<double> sin_table;

  explicit Twiddles(int n) : cos_table(n), sin_table(n) {
    for (int r = 0; r < n; ++r) {
      // Quarter turns are set exactly.
      const double angle = 2.0 * kPi * r / n;
      if (4 * r == n) {
        cos_table[r] = 0.0, sin_table[r] = 1.0;
      } else if (2 * r == n) {
        cos_table[r] = -1.0, sin_table[r] = 0.0;
      } else if (4 * r == 3 * n) {
        cos_table[r] = 0.0, sin_table[r] = -1.0;
      } else {
        cos_table[r] = std::cos(angle), sin_table[r] = std::sin(angle);
      }
    }
  }
};

// (j·n) mod N in [0, N)
inline int phase_index(const std::vector<int>& j, const IVec& n, int grid_res) {
  long long acc = 0;
  for (std::size_t i = 0; i < j.size(); ++i) acc += static_cast<long long>(j[i]) * n(static_cast<Eigen::Index>(i));
  acc %= grid_res;
  if (acc < 0) acc += grid_res;
  return static_cast<int>(acc);
}

}  // namespace detail

inline CoefficientTable phi_fourier_coeffs(const PeriodizationTable& table, int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be nonnegative");
  if (4 * n_max > table.grid_res) {
    throw Error(ErrorCode::AliasRisk, "n_max exceeds N/4; coefficients would alias");
  }
  const detail::Twiddles tw(table.grid_res);
  CoefficientTable out;
  out.dim = table.dim();
  out.n_max = n_max;
  out.indices = indices_in_box(table.dim(), n_max);
  const double norm = 1.0 / static_cast<double>(table.size());
  for (const auto& n : out.indices) {
    cplx acc = 0.0;
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      const int r = detail::phase_index(table.multi_index(flat), n, table.grid_res);
      // e^{-2πiγ·n}
      acc += table.values[flat] * cplx(tw.cos_table[r], -tw.sin_table[r]);
    }
    out.values.push_back(acc * norm);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perturbation f + T_{An} f
// ---------------------------------------------------------------------------

/// Φ of f + T_{An} f from Φ of f: multiplies by |1 + e^{-2πiγ·n}|².
inline PeriodizationTable perturbed_phi(const PeriodizationTable& table, const IVec& n) {
  if (n.size() != table.dim()) throw Error(ErrorCode::InvalidArgument, "shift index has wrong dimension");
  const detail::Twiddles tw(table.grid_res);
  PeriodizationTable out = table;
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    const int r = detail::phase_index(table.multi_index(flat), n, table.grid_res);
    // |1 + e^{-iθ}|² = 2 + 2cos θ
    const double factor = 2.0 + 2.0 * tw.cos_table[r];
    out.values[flat] = factor * table.values[flat];
  }
  out.tail = 4.0 * table.tail;
  std::string shift;
  for (Eigen::Index i = 0; i < n.size(); ++i) shift += (i ? "," : "") + std::to_string(n(i));
  out.generator_tag = table.generator_tag + "+T_A(" + shift + ")";
  return out;
}

}  // namespace shiftinv
