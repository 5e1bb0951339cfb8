#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "shiftinv/lattice.hpp"

namespace shiftinv {

namespace detail {

// Full (symmetric) Gauss-Legendre rule on [-1,1] built from Boost's
// positive-half tables.
template <unsigned Points>
struct GaussRule {
  std::array<double, Points> nodes{};
  std::array<double, Points> weights{};

  GaussRule() {
    using Boost = boost::math::quadrature::gauss<double, Points>;
    const auto& absc = Boost::abscissa();
    const auto& wts = Boost::weights();
    unsigned n = 0;
    for (std::size_t i = absc.size(); i-- > 0;) {
      if (absc[i] == 0.0) continue;
      nodes[n] = -absc[i];
      weights[n] = wts[i];
      ++n;
    }
    for (std::size_t i = 0; i < absc.size(); ++i) {
      nodes[n] = absc[i];
      weights[n] = wts[i];
      ++n;
    }
  }
};

template <unsigned Points>
const GaussRule<Points>& gauss_rule() {
  static const GaussRule<Points> rule;
  return rule;
}

}  // namespace detail

/// Tensor-product composite Gauss-Legendre nodes on [lo,hi] with `panels[i]`
/// equal panels along axis i.
struct TensorGrid {
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& axis : nodes) n *= axis.size();
    return n;
  }
};

template <unsigned Points = 16>
TensorGrid composite_gauss(const Vec& lo, const Vec& hi, const std::vector<long>& panels) {
  const auto& rule = detail::gauss_rule<Points>();
  TensorGrid grid;
  const auto d = lo.size();
  grid.nodes.resize(d);
  grid.weights.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const long p = std::max(1L, panels[i]);
    const double width = (hi(i) - lo(i)) / static_cast<double>(p);
    auto& xs = grid.nodes[i];
    auto& ws = grid.weights[i];
    xs.reserve(p * Points);
    ws.reserve(p * Points);
    for (long q = 0; q < p; ++q) {
      const double a = lo(i) + width * static_cast<double>(q);
      for (unsigned n = 0; n < Points; ++n) {
        xs.push_back(a + 0.5 * width * (rule.nodes[n] + 1.0));
        ws.push_back(0.5 * width * rule.weights[n]);
      }
    }
  }
  return grid;
}

/// Sums w(x)·fn(x) over the tensor grid, first axis outermost.
template <typename T, typename Fn>
T integrate_tensor(const TensorGrid& grid, Fn&& fn) {
  const auto d = grid.nodes.size();
  Vec x(static_cast<Eigen::Index>(d));
  std::vector<std::size_t> idx(d, 0);
  T total{};
  if (grid.size() == 0) return total;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x(static_cast<Eigen::Index>(i)) = grid.nodes[i][idx[i]];
      w *= grid.weights[i][idx[i]];
    }
    total += w * fn(static_cast<const Vec&>(x));
    std::size_t axis = d;
    while (axis-- > 0) {
      if (++idx[axis] < grid.nodes[axis].size()) break;
      idx[axis] = 0;
      if (axis == 0) return total;
    }
  }
}

/// A parallelepiped map·[lo,hi] in frequency space.
struct FrequencyRegion {
  Mat map;
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double measure() const { return std::abs(map.determinant()) * (hi - lo).prod(); }
};

inline constexpr long kMaxPanels1d = 200000;
inline constexpr long kMaxPanels2d = 1500;
inline constexpr long kMaxPanels3d = 120;

/// Integrates fn over a frequency region whose integrand oscillates with
/// at most `bandwidth` cycles per unit frequency (the spatial extent of the
/// phases involved). Panels are sized to hold at most half a cycle.
template <typename T, typename Fn>
T integrate_frequency(const FrequencyRegion& region, double bandwidth, Fn&& fn) {
  const int d = region.dim();
  const long cap = d == 1 ? kMaxPanels1d : (d == 2 ? kMaxPanels2d : kMaxPanels3d);
  // Per-axis oscillation in the u coordinates of map·u.
  const Vec axis_scale = region.map.cwiseAbs().colwise().sum().transpose();
  std::vector<long> panels(d);
  for (int i = 0; i < d; ++i) {
    const double cycles = (region.hi(i) - region.lo(i)) * (bandwidth * axis_scale(i) + 0.5);
    panels[i] = std::min(cap, std::max(2L, static_cast<long>(std::ceil(2.0 * cycles))));
  }
  const TensorGrid grid = composite_gauss<16>(region.lo, region.hi, panels);
  const double jac = std::abs(region.map.determinant());
  const T inner = integrate_tensor<T>(grid, [&](const Vec& u) { return fn(Vec(region.map * u)); });
  return jac * inner;
}

}  // namespace shiftinv
