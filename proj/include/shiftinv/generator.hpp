#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "shiftinv/error.hpp"
#include "shiftinv/lattice.hpp"
#include "shiftinv/quadrature.hpp"

namespace shiftinv {

inline double sinc(double x) {
  const double px = kPi * x;
  if (std::abs(px) < 1e-5) return 1.0 - px * px / 6.0;
  return std::sin(px) / px;
}

/// Centered B-spline of the given degree: the (degree+1)-fold convolution of
/// the unit box, supported on [-(degree+1)/2, (degree+1)/2].
inline double centered_bspline(int degree, double x) {
  const double half = 0.5 * (degree + 1);
  if (std::abs(x) >= half) return 0.0;
  // Truncated-power form; evaluate on the nonnegative half to limit cancellation.
  const double y = -std::abs(x) + half;
  double total = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= degree + 1; ++k) {
    const double arg = y - k;
    if (arg <= 0.0) break;
    total += ((k % 2 == 0) ? 1.0 : -1.0) * binom * std::pow(arg, degree);
    binom = binom * (degree + 1 - k) / (k + 1);
  }
  return total / std::tgamma(degree + 1.0);
}

// ---------------------------------------------------------------------------
// Catalog kinds
// ---------------------------------------------------------------------------

/// f̂ = indicator of shape·[lower, upper) (half-open per axis).
struct FrequencyBox {
  Vec lower;
  Vec upper;
  Mat shape;
  Mat shape_inverse;
};

/// f̂ = indicator of [-1/2, 1/2)^d, f = product of sinc(x_i).
struct Sinc {
  int dim = 1;
};

/// Tensor-product centered B-spline of the given order; f̂ = Π sinc^{order+1}.
struct BSpline {
  int order = 1;
  int dim = 1;
};

/// f(x) = exp(-π|x|²/σ²), f̂(ξ) = σ^d exp(-πσ²|ξ|²).
struct Gaussian {
  double sigma = 1.0;
  int dim = 1;
};

/// Uniform spatial samples x_j = origin + step·j, j in the box [0, counts).
/// Values are stored lexicographically (first axis slowest). The transform
/// is the Riemann sum, optionally band-limited to [-band_limit, band_limit)^d.
struct SampledSpatial {
  Vec origin;
  double step = 0.0;
  std::vector<int> counts;
  std::vector<cplx> values;
  std::optional<double> band_limit;

  int dim() const { return static_cast<int>(counts.size()); }

  Vec point(std::size_t flat) const {
    const int d = dim();
    Vec x(d);
    for (int i = d - 1; i >= 0; --i) {
      const auto c = static_cast<std::size_t>(counts[i]);
      x(i) = origin(i) + step * static_cast<double>(flat % c);
      flat /= c;
    }
    return x;
  }

  cplx at(const std::vector<int>& j) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
      if (j[i] < 0 || j[i] >= counts[i]) return 0.0;
      flat = flat * static_cast<std::size_t>(counts[i]) + static_cast<std::size_t>(j[i]);
    }
    return values[flat];
  }
};

enum class GeneratorKind { FrequencyBox, Sinc, BSpline, Gaussian, SampledSpatial };

constexpr std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::FrequencyBox: return "FrequencyBox";
    case GeneratorKind::Sinc: return "Sinc";
    case GeneratorKind::BSpline: return "BSpline";
    case GeneratorKind::Gaussian: return "Gaussian";
    case GeneratorKind::SampledSpatial: return "SampledSpatial";
  }
  return "Unknown";
}

/// A generator f = Σ_i a_i · base(· − s_i). Plain catalog generators carry
/// the single term (1, 0); translates, rescalings and the f + T_{An} f
/// perturbation are expressed through the term list.
class Generator {
 public:
  using Base = std::variant<FrequencyBox, Sinc, BSpline, Gaussian, SampledSpatial>;

  struct Term {
    cplx coef;
    Vec shift;
  };

  static Generator frequency_box(const Vec& lower, const Vec& upper, const Mat& shape) {
    const auto d = lower.size();
    if (d == 0 || d > kMaxDim || upper.size() != d || shape.rows() != d || shape.cols() != d) {
      throw Error(ErrorCode::InvalidArgument, "frequency box corners and shape must agree in dimension 1..3");
    }
    if (!lower.allFinite() || !upper.allFinite() || !shape.allFinite()) {
      throw Error(ErrorCode::NonFinite, "frequency box parameters must be finite");
    }
    if (!(lower.array() < upper.array()).all()) {
      throw Error(ErrorCode::InvalidArgument, "frequency box needs lower < upper on every axis");
    }
    if (std::abs(shape.determinant()) < 1e-12) {
      throw Error(ErrorCode::SingularMatrix, "frequency box shape matrix is singular");
    }
    return Generator(FrequencyBox{lower, upper, shape, shape.inverse()}, static_cast<int>(d));
  }

  static Generator frequency_box(const Vec& lower, const Vec& upper) {
    return frequency_box(lower, upper, Mat::Identity(lower.size(), lower.size()));
  }

  static Generator sinc(int dim = 1) {
    check_dim(dim);
    return Generator(Sinc{dim}, dim);
  }

  static Generator bspline(int order, int dim = 1) {
    check_dim(dim);
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "B-spline order must be >= 1");
    return Generator(BSpline{order, dim}, dim);
  }

  static Generator gaussian(double sigma, int dim = 1) {
    check_dim(dim);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorCode::InvalidArgument, "Gaussian width must be positive");
    }
    return Generator(Gaussian{sigma, dim}, dim);
  }

  static Generator sampled(SampledSpatial samples) {
    const int d = samples.dim();
    check_dim(d);
    if (!(samples.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample step must be positive");
    if (samples.origin.size() != d) throw Error(ErrorCode::InvalidArgument, "sample origin has wrong dimension");
    std::size_t total = 1;
    for (int c : samples.counts) {
      if (c <= 0) throw Error(ErrorCode::InvalidArgument, "sample counts must be positive");
      total *= static_cast<std::size_t>(c);
    }
    if (samples.values.size() != total) {
      throw Error(ErrorCode::InvalidArgument, "sample value count does not match the grid");
    }
    if (std::none_of(samples.values.begin(), samples.values.end(),
                     [](cplx v) { return std::abs(v) > 0.0; })) {
      throw Error(ErrorCode::ZeroGenerator, "all samples are zero");
    }
    if (samples.band_limit) {
      const double nyquist = 0.5 / samples.step;
      if (!(*samples.band_limit > 0.0) || *samples.band_limit > nyquist * (1.0 + 1e-12)) {
        throw Error(ErrorCode::InvalidArgument, "band limit must lie in (0, 1/(2h)]");
      }
    }
    return Generator(std::move(samples), d);
  }

  /// c·f
  Generator scaled(cplx c) const {
    Generator out = *this;
    for (auto& t : out.terms_) t.coef *= c;
    return out;
  }

  /// f(· − shift)
  Generator translated(const Vec& shift) const {
    Generator out = *this;
    for (auto& t : out.terms_) t.shift += shift;
    return out;
  }

  /// f + coef·f(· − shift)
  Generator plus_translate(const Vec& shift, cplx coef = 1.0) const {
    Generator out = *this;
    for (const auto& t : terms_) out.terms_.push_back({t.coef * coef, t.shift + shift});
    return out;
  }

  /// Σ_o c_o · f(· − s_o) for the given outer terms.
  Generator combination(const std::vector<Term>& outer) const {
    if (outer.empty()) throw Error(ErrorCode::ZeroGenerator, "empty combination");
    Generator out = *this;
    out.terms_.clear();
    for (const auto& o : outer) {
      if (o.shift.size() != dim_) throw Error(ErrorCode::InvalidArgument, "shift has wrong dimension");
      for (const auto& t : terms_) out.terms_.push_back({o.coef * t.coef, o.shift + t.shift});
    }
    return out;
  }

  GeneratorKind kind() const { return static_cast<GeneratorKind>(base_.index()); }
  int dim() const { return dim_; }
  const Base& base() const { return base_; }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_plain() const {
    return terms_.size() == 1 && terms_[0].coef == cplx(1.0) && terms_[0].shift.isZero();
  }

  /// Σ|a_i|, the sup of the term-sum phase factor.
  double coef_l1() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coef);
    return s;
  }

  double max_shift() const {
    double s = 0.0;
    for (const auto& t : terms_) s = std::max(s, t.shift.cwiseAbs().maxCoeff());
    return s;
  }

  std::string tag() const;

 private:
  Generator(Base base, int dim) : base_(std::move(base)), dim_(dim) {
    terms_.push_back({1.0, Vec::Zero(dim)});
  }

  static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw Error(ErrorCode::UnsupportedDimension, "generator dimension must be 1..3");
    }
  }

  Base base_;
  int dim_;
  std::vector<Term> terms_;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os.precision(12);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ')';
  return os.str();
}

inline cplx riemann_transform(const SampledSpatial& s, const Vec& xi) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    if (s.values[j] == cplx(0.0)) continue;
    const double phase = -2.0 * kPi * xi.dot(s.point(j));
    acc += s.values[j] * cplx(std::cos(phase), std::sin(phase));
  }
  return std::pow(s.step, s.dim()) * acc;
}

inline bool in_band(const SampledSpatial& s, const Vec& xi) {
  if (!s.band_limit) return true;
  const double r = *s.band_limit;
  return ((xi.array() >= -r) && (xi.array() < r)).all();
}

inline cplx base_fourier(const Generator::Base& base, const Vec& xi) {
  return std::visit(
      overloaded{
          [&](const FrequencyBox& b) -> cplx {
            const Vec u = b.shape_inverse * xi;
            return ((u.array() >= b.lower.array()) && (u.array() < b.upper.array())).all() ? 1.0 : 0.0;
          },
          [&](const Sinc&) -> cplx {
            return ((xi.array() >= -0.5) && (xi.array() < 0.5)).all() ? 1.0 : 0.0;
          },
          [&](const BSpline& b) -> cplx {
            double v = 1.0;
            for (Eigen::Index i = 0; i < xi.size(); ++i) v *= std::pow(sinc(xi(i)), b.order + 1);
            return v;
          },
          [&](const Gaussian& g) -> cplx {
            return std::pow(g.sigma, g.dim) * std::exp(-kPi * g.sigma * g.sigma * xi.squaredNorm());
          },
          [&](const SampledSpatial& s) -> cplx {
            return in_band(s, xi) ? riemann_transform(s, xi) : cplx(0.0);
          },
      },
      base);
}

inline cplx interpolate(const SampledSpatial& s, const Vec& x) {
  const int d = s.dim();
  std::vector<int> lo(d);
  std::vector<double> frac(d);
  for (int i = 0; i < d; ++i) {
    const double t = (x(i) - s.origin(i)) / s.step;
    if (t < 0.0 || t > s.counts[i] - 1) return 0.0;
    const double fl = std::floor(t);
    lo[i] = static_cast<int>(fl);
    frac[i] = t - fl;
  }
  cplx acc = 0.0;
  std::vector<int> j(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      j[i] = lo[i] + (up ? 1 : 0);
      w *= up ? frac[i] : 1.0 - frac[i];
    }
    if (w != 0.0) acc += w * s.at(j);
  }
  return acc;
}

inline cplx base_spatial(const Generator::Base& base, const Vec& x) {
  return std::visit(
      overloaded{
          [&](const FrequencyBox& b) -> cplx {
            const Vec y = b.shape.transpose() * x;
            cplx v = std::abs(b.shape.determinant());
            for (Eigen::Index i = 0; i < y.size(); ++i) {
              const double w = b.upper(i) - b.lower(i);
              const double phase = kPi * (b.lower(i) + b.upper(i)) * y(i);
              v *= w * sinc(w * y(i)) * cplx(std::cos(phase), std::sin(phase));
            }
            return v;
          },
          [&](const Sinc&) -> cplx {
            double v = 1.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) v *= sinc(x(i));
            return v;
          },
          [&](const BSpline& b) -> cplx {
            double v = 1.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) v *= centered_bspline(b.order, x(i));
            return v;
          },
          [&](const Gaussian& g) -> cplx {
            return std::exp(-kPi * x.squaredNorm() / (g.sigma * g.sigma));
          },
          [&](const SampledSpatial& s) -> cplx { return interpolate(s, x); },
      },
      base);
}

}  // namespace detail

inline std::string Generator::tag() const {
  std::ostringstream os;
  os.precision(12);
  os << std::visit(detail::overloaded{
                       [](const FrequencyBox& b) {
                         return "FrequencyBox[" + detail::vec_str(b.lower) + "," + detail::vec_str(b.upper) + "]";
                       },
                       [](const Sinc& s) { return "Sinc[d=" + std::to_string(s.dim) + "]"; },
                       [](const BSpline& b) {
                         return "BSpline[m=" + std::to_string(b.order) + ",d=" + std::to_string(b.dim) + "]";
                       },
                       [](const Gaussian& g) {
                         std::ostringstream s;
                         s.precision(12);
                         s << "Gaussian[sigma=" << g.sigma << ",d=" << g.dim << "]";
                         return s.str();
                       },
                       [](const SampledSpatial& s) {
                         std::ostringstream o;
                         o.precision(12);
                         o << "SampledSpatial[h=" << s.step << ",n=" << s.values.size() << "]";
                         return o.str();
                       },
                   },
                   base_);
  if (!is_plain()) {
    os << '{';
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      os << (i ? ";" : "") << terms_[i].coef.real();
      if (terms_[i].coef.imag() != 0.0) os << (terms_[i].coef.imag() > 0 ? "+" : "") << terms_[i].coef.imag() << "i";
      os << "@" << detail::vec_str(terms_[i].shift);
    }
    os << '}';
  }
  return os.str();
}

/// Σ_i a_i e^{-2πiξ·s_i}
inline cplx term_phase(const Generator& g, const Vec& xi) {
  cplx acc = 0.0;
  for (const auto& t : g.terms()) {
    const double phase = -2.0 * kPi * xi.dot(t.shift);
    acc += t.coef * cplx(std::cos(phase), std::sin(phase));
  }
  return acc;
}

/// f̂(ξ) = ∫ f(x) e^{-2πiξ·x} dx
inline cplx eval_fourier(const Generator& g, const Vec& xi) {
  if (xi.size() != g.dim()) throw Error(ErrorCode::InvalidArgument, "frequency has wrong dimension");
  if (!xi.allFinite()) throw Error(ErrorCode::NonFinite, "frequency must be finite");
  const cplx base = detail::base_fourier(g.base(), xi);
  if (base == cplx(0.0)) return 0.0;
  return g.is_plain() ? base : base * term_phase(g, xi);
}

inline double fourier_abs2(const Generator& g, const Vec& xi) { return std::norm(eval_fourier(g, xi)); }

inline cplx eval_spatial(const Generator& g, const Vec& x) {
  if (x.size() != g.dim()) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "point must be finite");
  cplx acc = 0.0;
  for (const auto& t : g.terms()) acc += t.coef * detail::base_spatial(g.base(), x - t.shift);
  return acc;
}

// ---------------------------------------------------------------------------
// Decay metadata
// ---------------------------------------------------------------------------

/// Envelope for |f̂(ξ)|² as a function of r = |ξ|_inf.
struct DecayBound {
  enum class Class { CompactFrequencySupport, Polynomial, Gaussian };

  Class cls = Class::Polynomial;
  double constant = 1.0;
  double order = 0.0;   // Polynomial: C·min(1, (πr)^{-order})
  double rate = 0.0;    // Gaussian: C·exp(-rate·r²)
  double radius = 0.0;  // CompactFrequencySupport: sup |ξ|_inf over the support
  FrequencyRegion region;  // CompactFrequencySupport only

  double envelope(double r) const {
    switch (cls) {
      case Class::CompactFrequencySupport:
        return r <= radius * (1.0 + 1e-12) ? constant : 0.0;
      case Class::Polynomial:
        return constant * std::min(1.0, std::pow(kPi * r, -order));
      case Class::Gaussian:
        return constant * std::exp(-rate * r * r);
    }
    return 0.0;
  }
};

namespace detail {

inline FrequencyRegion cube_region(int d, double lo, double hi) {
  return {Mat::Identity(d, d), Vec::Constant(d, lo), Vec::Constant(d, hi)};
}

// Max |map·u|_inf over the corners of the box [lo, hi].
inline double region_radius(const FrequencyRegion& r, const Mat& pre = Mat()) {
  const int d = r.dim();
  const Mat m = pre.size() == 0 ? r.map : Mat(pre * r.map);
  double best = 0.0;
  for (int c = 0; c < (1 << d); ++c) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u(i) = ((c >> i) & 1) ? r.hi(i) : r.lo(i);
    best = std::max(best, (m * u).cwiseAbs().maxCoeff());
  }
  return best;
}

}  // namespace detail

inline DecayBound decay_bound(const Generator& g) {
  const double phase2 = g.coef_l1() * g.coef_l1();
  DecayBound out = std::visit(
      detail::overloaded{
          [&](const FrequencyBox& b) {
            DecayBound db;
            db.cls = DecayBound::Class::CompactFrequencySupport;
            db.region = {b.shape, b.lower, b.upper};
            return db;
          },
          [&](const Sinc& s) {
            DecayBound db;
            db.cls = DecayBound::Class::CompactFrequencySupport;
            db.region = detail::cube_region(s.dim, -0.5, 0.5);
            return db;
          },
          [&](const BSpline& b) {
            DecayBound db;
            db.cls = DecayBound::Class::Polynomial;
            db.order = 2.0 * (b.order + 1);
            return db;
          },
          [&](const Gaussian& gs) {
            DecayBound db;
            db.cls = DecayBound::Class::Gaussian;
            db.rate = 2.0 * kPi * gs.sigma * gs.sigma;
            db.constant = std::pow(gs.sigma, 2 * gs.dim);
            return db;
          },
          [&](const SampledSpatial& s) {
            if (!s.band_limit) {
              throw Error(ErrorCode::NoDecayInfo, "sampled generator needs a band limit for truncation");
            }
            DecayBound db;
            db.cls = DecayBound::Class::CompactFrequencySupport;
            db.region = detail::cube_region(s.dim(), -*s.band_limit, *s.band_limit);
            double l1 = 0.0;
            for (cplx v : s.values) l1 += std::abs(v);
            const double peak = std::pow(s.step, s.dim()) * l1;
            db.constant = peak * peak;
            return db;
          },
      },
      g.base());
  if (out.cls == DecayBound::Class::CompactFrequencySupport) out.radius = detail::region_radius(out.region);
  out.constant *= phase2;
  return out;
}

/// Largest |k|_inf for which some γ in [0,1)^d puts (A^T)^{-1}(γ+k) in the
/// compact support. Beyond it every summand of Φ vanishes.
inline int compact_support_radius(const DecayBound& db, const LatticeSpec& lattice) {
  const int d = lattice.dim();
  const Mat to_gamma = lattice.basis().transpose() * db.region.map;
  Vec smin = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec smax = -smin;
  for (int c = 0; c < (1 << d); ++c) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u(i) = ((c >> i) & 1) ? db.region.hi(i) : db.region.lo(i);
    const Vec s = to_gamma * u;
    smin = smin.cwiseMin(s);
    smax = smax.cwiseMax(s);
  }
  // γ+k ∈ [smin, smax) with γ ∈ [0,1) gives floor(smin) <= k <= ceil(smax)-1.
  int kmax = 0;
  for (int i = 0; i < d; ++i) {
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(smin(i)), std::abs(smax(i))));
    kmax = std::max(kmax, static_cast<int>(std::abs(std::floor(smin(i) - slack))));
    kmax = std::max(kmax, static_cast<int>(std::abs(std::ceil(smax(i) + slack) - 1.0)));
  }
  return kmax;
}

/// Certified bound on sup_γ Σ_{|k|_inf > K} |f̂((A^T)^{-1}(γ+k))|² / |det A|.
inline double tail_bound(const Generator& g, const LatticeSpec& lattice, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "truncation radius must be >= 1");
  if (lattice.dim() != g.dim()) throw Error(ErrorCode::InvalidArgument, "generator and lattice dimensions differ");
  const DecayBound db = decay_bound(g);
  const int d = lattice.dim();
  const double inv_det = 1.0 / lattice.det_abs();
  auto shell_count = [d](double r) { return std::pow(2.0 * r + 1.0, d) - std::pow(2.0 * r - 1.0, d); };

  if (db.cls == DecayBound::Class::CompactFrequencySupport) {
    const int kmax = compact_support_radius(db, lattice);
    if (radius >= kmax) return 0.0;
    const double count = std::pow(2.0 * kmax + 1.0, d) - std::pow(2.0 * radius + 1.0, d);
    return count * db.constant * inv_det;
  }

  // On the shell |k|_inf = r, |γ+k|_inf >= r-1, hence |ξ|_inf >= (r-1)/|A^T|_inf.
  const double alpha = lattice.transpose_inf_norm();
  const long explicit_shells = d == 1 ? 20000 : (d == 2 ? 2000 : 300);
  const long last = radius + explicit_shells;
  double total = 0.0;
  for (long r = radius + 1; r <= last; ++r) {
    const double rho = static_cast<double>(r - 1) / alpha;
    const double term = shell_count(static_cast<double>(r)) * db.envelope(rho);
    total += term;
    if (db.cls == DecayBound::Class::Gaussian && term == 0.0) break;
  }
  // Remainder r > last: shell count <= 2d(3r)^{d-1}, r-1 >= r/2.
  const double shells_c = 2.0 * d * std::pow(3.0, d - 1);
  if (db.cls == DecayBound::Class::Polynomial) {
    const double q = db.order - d;  // > 0 for every catalog order
    const double c = shells_c * db.constant * std::pow(2.0 * alpha / kPi, db.order);
    total += c * std::pow(static_cast<double>(last), -q) / q;
  } else {
    // Gaussian terms past `last` are far below the double range; keep the
    // bound strictly nonnegative and finite.
    total += std::numeric_limits<double>::denorm_min();
  }
  return total * inv_det;
}

// ---------------------------------------------------------------------------
// Integration support
// ---------------------------------------------------------------------------

/// Radius (in cycles/unit) of the phases carried by |f̂|²: twice the
/// effective spatial radius including translates.
inline double spectral_bandwidth(const Generator& g) {
  const double base = std::visit(
      detail::overloaded{
          [](const FrequencyBox&) { return 0.0; },
          [](const Sinc&) { return 0.0; },
          [](const BSpline& b) { return 0.5 * (b.order + 1); },
          [](const Gaussian& gs) { return 3.0 * gs.sigma; },
          [](const SampledSpatial& s) {
            double r = 0.0;
            for (int i = 0; i < s.dim(); ++i) {
              r = std::max(r, std::max(std::abs(s.origin(i)), std::abs(s.origin(i) + s.step * (s.counts[i] - 1))));
            }
            return r;
          },
      },
      g.base());
  return 2.0 * (base + g.max_shift());
}

/// A region outside of which |f̂|² carries at most rel_tol·C of its mass.
inline FrequencyRegion frequency_region(const Generator& g, double rel_tol = 1e-11) {
  const DecayBound db = decay_bound(g);
  const int d = g.dim();
  switch (db.cls) {
    case DecayBound::Class::CompactFrequencySupport:
      return db.region;
    case DecayBound::Class::Polynomial: {
      // ∫_{|ξ|_inf > R} (πr)^{-p} ≤ 2d·2^{d-1}·π^{-p}·R^{d-p}/(p-d)
      const double p = db.order;
      const double c = 2.0 * d * std::pow(2.0, d - 1) * std::pow(kPi, -p) / (p - d);
      double r = std::pow(c / rel_tol, 1.0 / (p - d));
      const double cap = d == 1 ? 2000.0 : (d == 2 ? 60.0 : 12.0);
      r = std::clamp(r, 2.0, cap);
      return detail::cube_region(d, -r, r);
    }
    case DecayBound::Class::Gaussian: {
      const double r = std::sqrt((std::log(1.0 / rel_tol) + 4.0 * d) / db.rate) + 1.0;
      return detail::cube_region(d, -r, r);
    }
  }
  return detail::cube_region(d, -1.0, 1.0);
}

/// Region for integrands of the form ĥ·conj(f̂): the smaller compact support
/// if either is compact, otherwise the larger truncation cube.
inline FrequencyRegion joint_region(const Generator& h, const Generator& f) {
  const FrequencyRegion rh = frequency_region(h);
  const FrequencyRegion rf = frequency_region(f);
  const bool ch = decay_bound(h).cls == DecayBound::Class::CompactFrequencySupport;
  const bool cf = decay_bound(f).cls == DecayBound::Class::CompactFrequencySupport;
  if (ch && cf) return rh.measure() <= rf.measure() ? rh : rf;
  if (ch) return rh;
  if (cf) return rf;
  return rh.measure() >= rf.measure() ? rh : rf;
}

// ---------------------------------------------------------------------------
// Correlations and norms
// ---------------------------------------------------------------------------

namespace detail {

// ∫ b(x) conj(b(x+t)) dx for a single base generator.
inline cplx base_correlation(const Generator& g, const Vec& t) {
  return std::visit(
      overloaded{
          [&](const FrequencyBox& b) -> cplx {
            const Vec s = b.shape.transpose() * t;
            cplx v = std::abs(b.shape.determinant());
            for (Eigen::Index i = 0; i < s.size(); ++i) {
              const double w = b.upper(i) - b.lower(i);
              const double phase = -kPi * (b.lower(i) + b.upper(i)) * s(i);
              v *= w * sinc(w * s(i)) * cplx(std::cos(phase), std::sin(phase));
            }
            return v;
          },
          [&](const Sinc&) -> cplx {
            double v = 1.0;
            for (Eigen::Index i = 0; i < t.size(); ++i) v *= sinc(t(i));
            return v;
          },
          [&](const BSpline& b) -> cplx {
            double v = 1.0;
            for (Eigen::Index i = 0; i < t.size(); ++i) v *= centered_bspline(2 * b.order + 1, t(i));
            return v;
          },
          [&](const Gaussian& gs) -> cplx {
            return std::pow(gs.sigma / std::sqrt(2.0), gs.dim) *
                   std::exp(-kPi * t.squaredNorm() / (2.0 * gs.sigma * gs.sigma));
          },
          [&](const SampledSpatial& s) -> cplx {
            if (!s.band_limit) {
              throw Error(ErrorCode::NoDecayInfo, "sampled generator needs a band limit for frequency integrals");
            }
            // Over a full Nyquist band with a lag on the sample grid, Parseval
            // for the discrete-time transform gives the exact discrete correlation.
            const double nyquist = 0.5 / s.step;
            if (std::abs(*s.band_limit - nyquist) <= 1e-12 * nyquist) {
              const Vec lag = t / s.step;
              const Vec rounded = lag.array().round().matrix();
              if ((lag - rounded).cwiseAbs().maxCoeff() <= 1e-9) {
                std::vector<int> offset(s.dim());
                for (int i = 0; i < s.dim(); ++i) offset[i] = static_cast<int>(rounded(i));
                cplx acc = 0.0;
                std::vector<int> j(s.dim());
                for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
                  if (s.values[flat] == cplx(0.0)) continue;
                  std::size_t rest = flat;
                  for (int i = s.dim() - 1; i >= 0; --i) {
                    j[i] = static_cast<int>(rest % static_cast<std::size_t>(s.counts[i])) + offset[i];
                    rest /= static_cast<std::size_t>(s.counts[i]);
                  }
                  acc += s.values[flat] * std::conj(s.at(j));
                }
                return std::pow(s.step, s.dim()) * acc;
              }
            }
            const FrequencyRegion region = cube_region(s.dim(), -*s.band_limit, *s.band_limit);
            const double bw = spectral_bandwidth(Generator::sampled(s)) + t.cwiseAbs().maxCoeff();
            return integrate_frequency<cplx>(region, bw, [&](const Vec& xi) {
              const double phase = -2.0 * kPi * xi.dot(t);
              return std::norm(riemann_transform(s, xi)) * cplx(std::cos(phase), std::sin(phase));
            });
          },
      },
      g.base());
}

}  // namespace detail

/// ∫ f(x) conj(f(x+t)) dx = ∫ |f̂(ξ)|² e^{-2πiξ·t} dξ
inline cplx correlation(const Generator& g, const Vec& t) {
  if (t.size() != g.dim()) throw Error(ErrorCode::InvalidArgument, "lag has wrong dimension");
  cplx acc = 0.0;
  for (const auto& a : g.terms()) {
    for (const auto& b : g.terms()) {
      acc += a.coef * std::conj(b.coef) * detail::base_correlation(g, t + a.shift - b.shift);
    }
  }
  return acc;
}

inline double l2_norm_squared(const Generator& g) {
  const double n = correlation(g, Vec::Zero(g.dim())).real();
  if (!(n >= 1e-14)) throw Error(ErrorCode::ZeroGenerator, "generator has (numerically) zero L2 norm");
  return n;
}

// ---------------------------------------------------------------------------
// Spatial support
// ---------------------------------------------------------------------------

struct SpatialSupport {
  enum class Class { Compact, Gaussian, Unbounded };
  Class cls = Class::Unbounded;
  Vec lo;  // Compact: bounding box of the support
  Vec hi;
};

inline SpatialSupport spatial_support(const Generator& g) {
  SpatialSupport base = std::visit(
      detail::overloaded{
          [&](const BSpline& b) {
            const double h = 0.5 * (b.order + 1);
            return SpatialSupport{SpatialSupport::Class::Compact, Vec::Constant(b.dim, -h), Vec::Constant(b.dim, h)};
          },
          [&](const SampledSpatial& s) {
            Vec lo = s.origin;
            Vec hi = s.origin;
            for (int i = 0; i < s.dim(); ++i) hi(i) += s.step * (s.counts[i] - 1);
            return SpatialSupport{SpatialSupport::Class::Compact, lo, hi};
          },
          [&](const Gaussian&) { return SpatialSupport{SpatialSupport::Class::Gaussian, Vec(), Vec()}; },
          [&](const auto&) { return SpatialSupport{}; },
      },
      g.base());
  if (base.cls != SpatialSupport::Class::Compact) return base;
  SpatialSupport out = base;
  out.lo = Vec::Constant(g.dim(), std::numeric_limits<double>::infinity());
  out.hi = -out.lo;
  for (const auto& t : g.terms()) {
    out.lo = out.lo.cwiseMin(base.lo + t.shift);
    out.hi = out.hi.cwiseMax(base.hi + t.shift);
  }
  return out;
}

/// ∫_{R^d} f(x) dx by quadrature of the spatial form.
inline cplx spatial_integral(const Generator& g) {
  const int d = g.dim();
  const cplx base = std::visit(
      detail::overloaded{
          [&](const BSpline& b) -> cplx {
            // Panels aligned with the knots make Gauss-Legendre exact.
            const double h = 0.5 * (b.order + 1);
            const TensorGrid grid = composite_gauss<16>(Vec::Constant(d, -h), Vec::Constant(d, h),
                                                        std::vector<long>(d, b.order + 1));
            return integrate_tensor<cplx>(grid, [&](const Vec& x) { return detail::base_spatial(g.base(), x); });
          },
          [&](const Gaussian& gs) -> cplx {
            const double r = 8.0 * gs.sigma;
            const TensorGrid grid = composite_gauss<16>(Vec::Constant(d, -r), Vec::Constant(d, r),
                                                        std::vector<long>(d, d == 1 ? 64 : 24));
            return integrate_tensor<cplx>(grid, [&](const Vec& x) { return detail::base_spatial(g.base(), x); });
          },
          [&](const SampledSpatial& s) -> cplx {
            cplx acc = 0.0;
            for (cplx v : s.values) acc += v;
            return std::pow(s.step, s.dim()) * acc;
          },
          [&](const auto&) -> cplx {
            throw Error(ErrorCode::NoDecayInfo, "generator is not integrable in the spatial domain");
          },
      },
      g.base());
  cplx coef_sum = 0.0;
  for (const auto& t : g.terms()) coef_sum += t.coef;
  return coef_sum * base;
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Parses `x_1,...,x_d,re,im` lines into a uniform sample grid. Grid points
/// absent from the file are zero.
inline SampledSpatial parse_sampled_csv(std::istream& in, std::optional<double> band_limit = std::nullopt) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Io, "line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols < 3 || cols > 2 + kMaxDim) {
      throw Error(ErrorCode::Io, "line " + std::to_string(line_no) + ": expected x_1..x_d,re,im with d in 1..3");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Io, "no samples found");
  const int d = static_cast<int>(cols) - 2;

  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  double step = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    std::vector<double> coords;
    for (const auto& r : rows) coords.push_back(r[i]);
    std::sort(coords.begin(), coords.end());
    lo(i) = coords.front();
    hi(i) = coords.back();
    for (std::size_t j = 1; j < coords.size(); ++j) {
      const double diff = coords[j] - coords[j - 1];
      if (diff > 1e-12 * std::max(1.0, std::abs(coords[j]))) step = std::min(step, diff);
    }
  }
  if (!std::isfinite(step)) throw Error(ErrorCode::Io, "cannot infer a grid step from a single point");

  SampledSpatial s;
  s.origin = lo;
  s.step = step;
  s.band_limit = band_limit;
  s.counts.resize(d);
  for (int i = 0; i < d; ++i) s.counts[i] = static_cast<int>(std::llround((hi(i) - lo(i)) / step)) + 1;
  std::size_t total = 1;
  for (int c : s.counts) total *= static_cast<std::size_t>(c);
  if (total > 50'000'000) throw Error(ErrorCode::TooLarge, "sample grid too large");
  s.values.assign(total, 0.0);
  std::vector<bool> seen(total, false);
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) {
      const double t = (r[i] - lo(i)) / step;
      const double rounded = std::round(t);
      if (std::abs(t - rounded) > 1e-6) {
        throw Error(ErrorCode::Io, "sample coordinate is off the uniform grid");
      }
      flat = flat * static_cast<std::size_t>(s.counts[i]) + static_cast<std::size_t>(rounded);
    }
    if (seen[flat]) throw Error(ErrorCode::Io, "duplicate sample at the same grid point");
    seen[flat] = true;
    s.values[flat] = cplx(r[d], r[d + 1]);
  }
  return s;
}

inline SampledSpatial load_sampled_csv(const std::string& path, std::optional<double> band_limit = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_sampled_csv(in, band_limit);
}

}  // namespace shiftinv
