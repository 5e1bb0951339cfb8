#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/lattice.hpp"
#include "shiftinv/periodization.hpp"
#include "shiftinv/quadrature.hpp"

namespace shiftinv {

inline constexpr std::size_t kMaxGramSize = 4096;

/// Finite section G[a,b] = ⟨T_{A j_a} f, T_{A j_b} f⟩ over |j|_inf ≤ M.
/// Only the (4M+1)^d lag values are stored; G[a,b] = c_{j_a − j_b}.
class GramMatrix {
 public:
  GramMatrix(int dim, int half_width, std::vector<cplx> lags)
      : dim_(dim), half_width_(half_width), indices_(indices_in_box(dim, half_width)), lags_(std::move(lags)) {}

  int dim() const { return dim_; }
  int half_width() const { return half_width_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<IVec>& indices() const { return indices_; }

  /// c_n for |n|_inf ≤ 2M
  cplx lag(const IVec& n) const {
    const int r = 2 * half_width_;
    std::size_t flat = 0;
    for (int i = 0; i < dim_; ++i) flat = flat * (2 * r + 1) + static_cast<std::size_t>(n(i) + r);
    return lags_[flat];
  }

  cplx operator()(std::size_t a, std::size_t b) const { return lag(indices_[a] - indices_[b]); }

  Eigen::MatrixXcd dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) m(a, b) = (*this)(a, b);
    }
    return m;
  }

 private:
  int dim_;
  int half_width_;
  std::vector<IVec> indices_;
  std::vector<cplx> lags_;
};

inline GramMatrix gram_matrix(const Generator& g, const LatticeSpec& lattice, int half_width) {
  if (g.dim() != lattice.dim()) throw Error(ErrorCode::InvalidArgument, "generator and lattice dimensions differ");
  if (half_width < 1) throw Error(ErrorCode::InvalidArgument, "Gram half-width must be >= 1");
  const double size = std::pow(2.0 * half_width + 1.0, lattice.dim());
  if (size > static_cast<double>(kMaxGramSize)) {
    throw Error(ErrorCode::TooLarge, "(2M+1)^d exceeds 4096");
  }
  std::vector<cplx> lags;
  for_each_index_in_box(lattice.dim(), 2 * half_width,
                        [&](const IVec& n) { lags.push_back(autocorrelation(g, lattice, n)); });
  return GramMatrix(lattice.dim(), half_width, std::move(lags));
}

struct EigenBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Extreme eigenvalues of the Hermitian finite section (dense solver).
inline EigenBounds gram_eigen_bounds(const GramMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigen-solver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

/// Finitely supported coefficients {c_k}.
struct CoefficientVector {
  std::vector<std::pair<IVec, cplx>> entries;

  int support_radius() const {
    int r = 0;
    for (const auto& [k, c] : entries) r = std::max(r, k.cwiseAbs().maxCoeff());
    return r;
  }
};

struct SynthesisNorms {
  double direct = 0.0;     // ∫ |Σ c_k e^{-2πiξ·Ak}|² |f̂(ξ)|² dξ
  double spectral = 0.0;   // ∫_{[0,1)^d} |ψ_c(γ)|² Φ(γ) dγ on the table grid
  double quadratic = 0.0;  // Σ_{j,k} c_j conj(c_k) G[j,k]
};

/// ‖Σ c_k T_{Ak} f‖² by three independent routes. `rel_tol` sets the
/// frequency cutoff of the direct route.
inline SynthesisNorms synthesis_norm(const Generator& g, const LatticeSpec& lattice, const CoefficientVector& c,
                                     const PeriodizationTable& table, double rel_tol = 1e-9) {
  if (c.entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient vector");
  if (table.dim() != g.dim() || lattice.dim() != g.dim()) {
    throw Error(ErrorCode::InvalidArgument, "generator, lattice and table dimensions differ");
  }
  SynthesisNorms out;

  // e^{-2πiξ·Ak} = Π_i w_i^{k_i} with w_i = e^{-2πiξ·A e_i}, built from per-axis power tables.
  const int d = lattice.dim();
  const int rad = c.support_radius();
  double reach = 0.0;
  for (const auto& [k, coef] : c.entries) reach = std::max(reach, lattice.to_spatial(k).cwiseAbs().maxCoeff());
  const FrequencyRegion region = frequency_region(g, rel_tol);
  std::vector<std::vector<cplx>> powers(d, std::vector<cplx>(2 * rad + 1));
  out.direct = integrate_frequency<double>(region, spectral_bandwidth(g) + 2.0 * reach, [&](const Vec& xi) {
    const double f2 = fourier_abs2(g, xi);
    if (f2 == 0.0) return 0.0;
    for (int i = 0; i < d; ++i) {
      const cplx w = std::polar(1.0, -2.0 * kPi * xi.dot(lattice.basis().col(i)));
      auto& p = powers[i];
      p[rad] = 1.0;
      for (int m = 1; m <= rad; ++m) {
        p[rad + m] = p[rad + m - 1] * w;
        p[rad - m] = std::conj(p[rad + m]);
      }
    }
    cplx s = 0.0;
    for (const auto& [k, coef] : c.entries) {
      cplx phase = 1.0;
      for (int i = 0; i < d; ++i) phase *= powers[i][rad + k(i)];
      s += coef * phase;
    }
    return std::norm(s) * f2;
  });

  const detail::Twiddles tw(table.grid_res);
  double acc = 0.0;
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    const auto j = table.multi_index(flat);
    cplx psi = 0.0;
    for (const auto& [k, coef] : c.entries) {
      const int r = detail::phase_index(j, k, table.grid_res);
      psi += coef * cplx(tw.cos_table[r], -tw.sin_table[r]);
    }
    acc += std::norm(psi) * table.values[flat];
  }
  out.spectral = acc / static_cast<double>(table.size());

  cplx quad = 0.0;
  for (const auto& [j, cj] : c.entries) {
    for (const auto& [k, ck] : c.entries) quad += cj * std::conj(ck) * autocorrelation(g, lattice, IVec(j - k));
  }
  out.quadratic = quad.real();
  return out;
}

/// ⟨h, T_{Ak} f⟩ = ∫ ĥ(ξ) conj(f̂(ξ)) e^{2πiξ·Ak} dξ for |k|_inf ≤ M, lexicographic in k.
inline std::vector<std::pair<IVec, cplx>> analysis_coefficients(const Generator& g, const LatticeSpec& lattice,
                                                                const Generator& h, int half_width) {
  if (g.dim() != h.dim() || g.dim() != lattice.dim()) {
    throw Error(ErrorCode::InvalidArgument, "generators and lattice must share a dimension");
  }
  if (half_width < 0) throw Error(ErrorCode::InvalidArgument, "half-width must be nonnegative");
  const FrequencyRegion region = joint_region(h, g);
  const double base_bw = 0.5 * (spectral_bandwidth(h) + spectral_bandwidth(g));
  std::vector<std::pair<IVec, cplx>> out;
  for_each_index_in_box(lattice.dim(), half_width, [&](const IVec& k) {
    const Vec shift = lattice.to_spatial(k);
    const cplx v = integrate_frequency<cplx>(region, base_bw + shift.cwiseAbs().maxCoeff(), [&](const Vec& xi) {
      const cplx fh = eval_fourier(h, xi);
      if (fh == cplx(0.0)) return cplx(0.0);
      const cplx ff = eval_fourier(g, xi);
      const double phase = 2.0 * kPi * xi.dot(shift);
      return fh * std::conj(ff) * cplx(std::cos(phase), std::sin(phase));
    });
    out.emplace_back(k, v);
  });
  return out;
}

struct ProjectionResult {
  double residual_norm_sq = 0.0;
  bool is_member = false;
  /// F(γ_j) = Φ_{f,ψ}(γ_j)/Φ_f(γ_j) on the off-zero grid, 0 elsewhere.
  std::vector<cplx> F_samples;
  std::vector<bool> offzero;
  double psi_norm_sq = 0.0;
};

/// Orthogonal projection of ψ onto the closed span of τ_A(f), computed
/// through the bracket Φ_{f,ψ}(γ) = (1/|det A|) Σ_k ψ̂·conj(f̂) at (A^T)^{-1}(γ+k).
/// The residual is the grid mean of Φ_ψ − |Φ_{f,ψ}|²/Φ_f (just Φ_ψ on the
/// zero set), which is pointwise nonnegative and vanishes for members.
inline ProjectionResult project_onto_span(const Generator& g, const LatticeSpec& lattice, const Generator& psi,
                                          const PeriodizationTable& table, double eps_zero,
                                          double member_tol = 1e-6) {
  if (psi.dim() != g.dim() || table.dim() != g.dim()) {
    throw Error(ErrorCode::InvalidArgument, "generator, psi and table dimensions differ");
  }
  const Mat& dual = lattice.dual_basis();
  ProjectionResult out;
  out.psi_norm_sq = l2_norm_squared(psi);

  // ψ may need a wider truncation than f; fall back to f's radius when ψ has no decay metadata.
  int radius = table.trunc_radius;
  try {
    const auto chosen = detail::choose_radius(psi, lattice, 1e-12 * out.psi_norm_sq, default_radius_cap(g.dim()));
    if (chosen) radius = std::max(radius, chosen->first);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoDecayInfo) throw;
  }

  out.F_samples.assign(table.size(), 0.0);
  out.offzero.assign(table.size(), false);
  double residual = 0.0;
  std::size_t n_off = 0;
  Vec shifted(g.dim());
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    const double phi = table.values[flat];
    const bool off = phi >= eps_zero;
    const Vec gamma = table.gamma(flat);
    cplx bracket = 0.0;
    double phi_psi = 0.0;
    for_each_index_in_box(lattice.dim(), radius, [&](const IVec& k) {
      shifted = gamma + k.cast<double>();
      const Vec xi = dual * shifted;
      const cplx fp = eval_fourier(psi, xi);
      if (fp == cplx(0.0)) return;
      phi_psi += std::norm(fp);
      if (off) bracket += fp * std::conj(eval_fourier(g, xi));
    });
    phi_psi /= lattice.det_abs();
    if (off) {
      ++n_off;
      bracket /= lattice.det_abs();
      out.F_samples[flat] = bracket / phi;
      out.offzero[flat] = true;
      residual += phi_psi - std::norm(bracket) / phi;
    } else {
      residual += phi_psi;
    }
  }
  if (n_off == 0) throw Error(ErrorCode::DegenerateSpan, "Φ_f is below eps_zero on the whole grid");
  out.residual_norm_sq = residual / static_cast<double>(table.size());
  out.is_member = out.residual_norm_sq <= member_tol * out.psi_norm_sq;
  return out;
}

/// Coefficients d_k with F(γ) = Σ d_k e^{-2πik·γ}, |k|_inf ≤ K, from grid samples of F.
inline std::vector<Generator::Term> span_coefficients(const ProjectionResult& proj, const PeriodizationTable& table,
                                                      const LatticeSpec& lattice, int radius) {
  const detail::Twiddles tw(table.grid_res);
  std::vector<Generator::Term> out;
  for_each_index_in_box(table.dim(), radius, [&](const IVec& k) {
    cplx acc = 0.0;
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      if (!proj.offzero[flat]) continue;
      const int r = detail::phase_index(table.multi_index(flat), k, table.grid_res);
      acc += proj.F_samples[flat] * cplx(tw.cos_table[r], tw.sin_table[r]);
    }
    out.push_back({acc / static_cast<double>(table.size()), lattice.to_spatial(k)});
  });
  return out;
}

}  // namespace shiftinv
