#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shiftinv/error.hpp"

namespace shiftinv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;
using cplx = std::complex<double>;

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMaxConditionNumber = 1e8;

enum class Side { Spatial, Frequency };

struct LatticePoint {
  IVec index;
  Vec coords;
};

/// The translation lattice A·Z^d together with its dual (A^T)^{-1}·Z^d.
///
/// Immutable once built; construct through make_lattice().
class LatticeSpec {
 public:
  int dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }
  const Mat& dual_basis() const { return dual_basis_; }
  double det_abs() const { return det_abs_; }

  Vec to_spatial(const IVec& k) const { return basis_ * k.cast<double>(); }
  Vec to_frequency(const IVec& k) const { return dual_basis_ * k.cast<double>(); }

  /// Operator infinity-norm of A^T (max absolute row sum).
  double transpose_inf_norm() const {
    return basis_.transpose().cwiseAbs().rowwise().sum().maxCoeff();
  }

 private:
  friend LatticeSpec make_lattice(const Mat& matrix);
  LatticeSpec(Mat basis, Mat dual, double det_abs)
      : basis_(std::move(basis)), dual_basis_(std::move(dual)), det_abs_(det_abs) {}

  Mat basis_;
  Mat dual_basis_;
  double det_abs_;
};

inline LatticeSpec make_lattice(const Mat& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "lattice matrix must be square and non-empty");
  }
  const int d = static_cast<int>(matrix.rows());
  if (d > kMaxDim) {
    throw Error(ErrorCode::UnsupportedDimension,
                "dimension " + std::to_string(d) + " exceeds the supported maximum of 3");
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorCode::NonFinite, "lattice matrix has non-finite entries");
  }
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double det = matrix.determinant();
  if (!(std::abs(det) >= 1e-10 * std::pow(scale, d))) {
    throw Error(ErrorCode::SingularMatrix, "|det A| is below 1e-10*(max|a_ij|)^d");
  }
  Eigen::JacobiSVD<Mat> svd(matrix);
  const Vec sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= kMaxConditionNumber)) {
    throw Error(ErrorCode::SingularMatrix,
                "condition number " + std::to_string(cond) + " exceeds 1e8");
  }
  Mat dual = matrix.transpose().inverse();
  return LatticeSpec(matrix, std::move(dual), std::abs(det));
}

/// Reduces each coordinate modulo 1 into [0,1).
inline Vec wrap_to_unit_cell(const Vec& gamma) {
  Vec out(gamma.size());
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    const double g = gamma(i);
    if (!std::isfinite(g)) throw Error(ErrorCode::NonFinite, "cannot wrap a non-finite coordinate");
    double w = g - std::floor(g);
    // g slightly below an integer can round up to exactly 1.
    if (w >= 1.0) w = 0.0;
    out(i) = w;
  }
  return out;
}

/// Calls fn(k) for every k in Z^d with |k|_inf <= radius, lexicographic
/// ascending with the first coordinate most significant.
template <typename Fn>
void for_each_index_in_box(int dim, int radius, Fn&& fn) {
  IVec k = IVec::Constant(dim, -radius);
  while (true) {
    fn(static_cast<const IVec&>(k));
    int axis = dim - 1;
    while (axis >= 0 && k(axis) == radius) {
      k(axis) = -radius;
      --axis;
    }
    if (axis < 0) return;
    ++k(axis);
  }
}

inline std::vector<IVec> indices_in_box(int dim, int radius) {
  std::vector<IVec> out;
  for_each_index_in_box(dim, radius, [&](const IVec& k) { out.push_back(k); });
  return out;
}

inline std::vector<LatticePoint> lattice_points_in_box(const LatticeSpec& lattice, int radius,
                                                       Side side) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be nonnegative");
  std::vector<LatticePoint> out;
  for_each_index_in_box(lattice.dim(), radius, [&](const IVec& k) {
    out.push_back({k, side == Side::Spatial ? lattice.to_spatial(k) : lattice.to_frequency(k)});
  });
  return out;
}

}  // namespace shiftinv
