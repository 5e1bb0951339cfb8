#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shiftinv/periodization.hpp"

using namespace shiftinv;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

IVec i1(int n) {
  IVec v(1);
  v << n;
  return v;
}

LatticeSpec lat1(double a = 1.0) { return make_lattice(Mat::Constant(1, 1, a)); }

Generator example_box() { return Generator::frequency_box(v1(-1.0 / 3.0), v1(1.0 / 3.0)); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Periodization, ExampleIndicator) {
  const PeriodizationTable t = compute_phi(example_box(), lat1(), 1024);
  ASSERT_EQ(t.size(), 1024u);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double g = t.gamma(j)(0);
    const double expected = (g <= 1.0 / 3.0 || g >= 2.0 / 3.0) ? 1.0 : 0.0;
    ASSERT_EQ(t.values[j], expected) << g;
  }
  EXPECT_EQ(t.tail, 0.0);
}

TEST(Periodization, SincIsOne) {
  const PeriodizationTable t = compute_phi(Generator::sinc(), lat1(), 4096);
  for (double v : t.values) ASSERT_EQ(v, 1.0);
}

TEST(Periodization, HatAgainstBruteForceSum) {
  const PeriodizationTable t = compute_phi(Generator::bspline(1), lat1(), 256);
  const auto fhat2 = [](double xi) { return std::pow(oracle::sinc(xi), 4); };
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double g = t.gamma(j)(0);
    const double brute = oracle::phi_1d(fhat2, 1.0, g, 10000);
    ASSERT_NEAR(t.values[j], brute, 1e-9) << g;
    ASSERT_NEAR(t.values[j], (2.0 + std::cos(2.0 * oracle::kPi * g)) / 3.0, 1e-9) << g;
  }
  EXPECT_NEAR(t.values[0], 1.0, 1e-9);
  EXPECT_NEAR(t.values[128], 1.0 / 3.0, 1e-9);
}

TEST(Periodization, ScaledLatticeAgainstBruteForce) {
  // A = [2]: Φ(γ) = ½ Σ sinc⁴((γ+k)/2)
  const PeriodizationTable t = compute_phi(Generator::bspline(1), lat1(2.0), 64);
  const auto fhat2 = [](double xi) { return std::pow(oracle::sinc(xi), 4); };
  for (std::size_t j = 0; j < t.size(); ++j) {
    ASSERT_NEAR(t.values[j], oracle::phi_1d(fhat2, 2.0, t.gamma(j)(0), 20000), 1e-9);
  }
}

TEST(Periodization, Preconditions) {
  EXPECT_EQ(code_of([] { compute_phi(Generator::sinc(), lat1(), 1000); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { compute_phi(Generator::sinc(), lat1(), 8); }), ErrorCode::InvalidArgument);
  PhiOptions bad;
  bad.target_tail = 0.0;
  EXPECT_EQ(code_of([&] { compute_phi(Generator::sinc(), lat1(), 64, bad); }), ErrorCode::InvalidArgument);
  PhiOptions capped;
  capped.target_tail = 1e-20;
  capped.radius_cap = 50;
  EXPECT_EQ(code_of([&] { compute_phi(Generator::bspline(1), lat1(), 64, capped); }),
            ErrorCode::TailNotAchievable);
  EXPECT_EQ(code_of([] { compute_phi(Generator::sinc(2), lat1(), 64); }), ErrorCode::InvalidArgument);
}

TEST(Periodization, TailPolicy) {
  PhiOptions opts;
  opts.target_tail = 1e-7;
  const PeriodizationTable t = compute_phi(Generator::bspline(1), lat1(), 64, opts);
  EXPECT_LE(t.tail, 1e-7);
  EXPECT_GT(tail_bound(Generator::bspline(1), lat1(), t.trunc_radius - 1), 1e-7);
  // values are lower bounds of the true Φ up to +tail
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double truth = (2.0 + std::cos(2.0 * oracle::kPi * t.gamma(j)(0))) / 3.0;
    ASSERT_LE(t.values[j], truth + 1e-15);
    ASSERT_GE(t.values[j] + t.tail, truth - 1e-15);
  }
}

TEST(Periodization, Normalization) {
  const std::vector<Generator> smooth = {Generator::sinc(), Generator::bspline(1), Generator::bspline(3),
                                         Generator::gaussian(1.0)};
  for (const Generator& g : smooth) {
    const PeriodizationTable t = compute_phi(g, lat1(), 4096);
    EXPECT_LE(std::abs(t.mean() - l2_norm_squared(g)), 1e-6) << g.tag();
  }
  const PeriodizationTable box = compute_phi(example_box(), lat1(), 4096);
  EXPECT_LE(std::abs(box.mean() - 2.0 / 3.0), 2.0 / 4096);
}

TEST(Periodization, NormalizationNonUnitLattices) {
  Mat shear(2, 2);
  shear << 1, 1, 0, 1;
  Mat skew(2, 2);
  skew << 1.5, 0.3, -0.2, 0.8;
  for (const Mat& a : {shear, skew}) {
    const LatticeSpec l = make_lattice(a);
    const Generator g = Generator::gaussian(0.8, 2);
    const PeriodizationTable t = compute_phi(g, l, 64);
    EXPECT_LE(std::abs(t.mean() - l2_norm_squared(g)), 1e-9);
  }
  const PeriodizationTable t = compute_phi(Generator::bspline(2), lat1(0.5), 256);
  EXPECT_LE(std::abs(t.mean() - l2_norm_squared(Generator::bspline(2))), 1e-8);
}

TEST(Periodization, PeriodicityAndNonnegativity) {
  const Generator g = Generator::bspline(2).plus_translate(v1(1.0), -0.5);
  const LatticeSpec l = lat1();
  for (double gamma = -2.0; gamma < 2.0; gamma += 0.0625) {
    EXPECT_EQ(phi_at(g, l, v1(gamma), 30), phi_at(g, l, v1(gamma + 1.0), 30));
    EXPECT_EQ(phi_at(g, l, v1(gamma), 30), phi_at(g, l, v1(gamma - 3.0), 30));
  }
  const PeriodizationTable t = compute_phi(g, l, 256);
  for (double v : t.values) EXPECT_GE(v, 0.0);
  for (double v : perturbed_phi(t, i1(3)).values) EXPECT_GE(v, 0.0);
}

TEST(Periodization, L1Examples) {
  const LatticeSpec l = lat1();
  std::vector<Vec> pts;
  for (int i = 0; i < 16; ++i) pts.push_back(v1(i / 16.0 + 0.01));

  const L1Periodization gauss = periodize_l1(Generator::gaussian(1.0), l, pts, 20);
  EXPECT_NEAR(gauss.cell_integral.real(), 1.0, 1e-8);
  EXPECT_NEAR(gauss.total_integral.real(), 1.0, 1e-8);

  const L1Periodization hat = periodize_l1(Generator::bspline(1), l, pts, 2);
  for (cplx v : hat.values) EXPECT_NEAR(v.real(), 1.0, 1e-12);

  const LatticeSpec two = lat1(2.0);
  std::vector<Vec> wide;
  for (int i = 0; i < 16; ++i) wide.push_back(v1(i / 8.0));
  const L1Periodization spread = periodize_l1(Generator::bspline(1), two, wide, 2);
  EXPECT_NEAR(spread.cell_integral.real(), 1.0, 1e-8);
  EXPECT_NEAR(spread.total_integral.real(), 1.0, 1e-8);
  double lo = 1e9;
  double hi = -1e9;
  for (std::size_t i = 0; i < wide.size(); ++i) {
    const double x = wide[i](0);
    // direct summation oracle: Σ_k hat(x + 2k)
    double direct = 0.0;
    for (int k = -2; k <= 2; ++k) direct += oracle::hat(x + 2.0 * k);
    EXPECT_NEAR(spread.values[i].real(), direct, 1e-12);
    lo = std::min(lo, direct);
    hi = std::max(hi, direct);
  }
  EXPECT_GT(hi - lo, 0.5);

  EXPECT_EQ(code_of([&] { periodize_l1(Generator::sinc(), l, pts, 2); }), ErrorCode::NoDecayInfo);
}

TEST(Periodization, AutocorrelationExamples) {
  const LatticeSpec l = lat1();
  const Generator sinc = Generator::sinc();
  EXPECT_NEAR(std::abs(autocorrelation(sinc, l, i1(0)) - 1.0), 0.0, 1e-12);
  for (int n : {1, 2, 3, -1, 7}) EXPECT_LE(std::abs(autocorrelation(sinc, l, i1(n))), 1e-12);

  const Generator hat = Generator::bspline(1);
  for (int n = -3; n <= 3; ++n) {
    const double ref = oracle::overlap(oracle::hat, -1.0, 1.0, n);
    EXPECT_NEAR(autocorrelation(hat, l, i1(n)).real(), ref, 1e-12) << n;
  }
  EXPECT_NEAR(autocorrelation(hat, l, i1(0)).real(), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(autocorrelation(hat, l, i1(1)).real(), 1.0 / 6.0, 1e-12);

  for (const Generator& g : {Generator::gaussian(0.6), Generator::bspline(3), example_box()}) {
    EXPECT_NEAR(autocorrelation(g, l, i1(0)).real(), l2_norm_squared(g), 1e-12);
  }
}

TEST(Periodization, AutocorrelationOfTranslateCombination) {
  // f = hat + ½·T_{0.5} hat: c_n = ∫ f(x) f(x+n) dx by direct overlap
  const Generator g = Generator::bspline(1).plus_translate(v1(0.5), 0.5);
  const auto f = [](double x) { return oracle::hat(x) + 0.5 * oracle::hat(x - 0.5); };
  for (int n = -2; n <= 2; ++n) {
    const double ref = oracle::overlap(f, -1.0, 1.5, n);
    EXPECT_NEAR(autocorrelation(g, lat1(), i1(n)).real(), ref, 1e-10) << n;
    EXPECT_NEAR(autocorrelation(g, lat1(), i1(n)).imag(), 0.0, 1e-12);
  }
}

TEST(Periodization, FourierCoefficientExamples) {
  const CoefficientTable sinc = phi_fourier_coeffs(compute_phi(Generator::sinc(), lat1(), 1024), 3);
  for (std::size_t i = 0; i < sinc.indices.size(); ++i) {
    const double expected = sinc.indices[i](0) == 0 ? 1.0 : 0.0;
    EXPECT_LE(std::abs(sinc.values[i] - expected), 1e-10);
  }
  const CoefficientTable hat = phi_fourier_coeffs(compute_phi(Generator::bspline(1), lat1(), 1024), 2);
  EXPECT_NEAR(hat.at(i1(0)).real(), 2.0 / 3.0, 1e-8);
  EXPECT_NEAR(hat.at(i1(1)).real(), 1.0 / 6.0, 1e-8);
  EXPECT_NEAR(hat.at(i1(-1)).real(), 1.0 / 6.0, 1e-8);
  EXPECT_LE(std::abs(hat.at(i1(2))), 1e-8);

  const CoefficientTable box = phi_fourier_coeffs(compute_phi(example_box(), lat1(), 1024), 2);
  EXPECT_LE(std::abs(box.at(i1(0)).real() - 2.0 / 3.0), 2.0 / 1024);

  EXPECT_EQ(code_of([] { phi_fourier_coeffs(compute_phi(Generator::sinc(), lat1(), 64), 17); }),
            ErrorCode::AliasRisk);
}

TEST(Periodization, CoefficientsHermitianAndDual) {
  Mat shear(2, 2);
  shear << 1, 1, 0, 1;
  struct Case {
    Generator g;
    LatticeSpec l;
    int n;
  };
  const std::vector<Case> cases = {
      {Generator::sinc(), lat1(), 4096},
      {Generator::bspline(1), lat1(), 4096},
      {Generator::bspline(3), lat1(), 4096},
      {Generator::gaussian(1.0), lat1(), 4096},
      {Generator::bspline(2).plus_translate(v1(0.3), cplx(0.2, 0.4)), lat1(1.3), 1024},
      {Generator::gaussian(0.9, 2), make_lattice(shear), 64},
  };
  for (const auto& c : cases) {
    const PeriodizationTable t = compute_phi(c.g, c.l, c.n);
    const CoefficientTable coeffs = phi_fourier_coeffs(t, 2);
    for (std::size_t i = 0; i < coeffs.indices.size(); ++i) {
      const IVec& n = coeffs.indices[i];
      EXPECT_LE(std::abs(coeffs.at(IVec(-n)) - std::conj(coeffs.values[i])), 1e-10) << c.g.tag();
      EXPECT_LE(std::abs(coeffs.values[i] - autocorrelation(c.g, c.l, n)), 1e-6) << c.g.tag() << " n=" << n.transpose();
    }
  }
}

TEST(Periodization, PerturbedExamples) {
  const PeriodizationTable hat = compute_phi(Generator::bspline(1), lat1(), 256);
  const PeriodizationTable zero = perturbed_phi(hat, i1(0));
  for (std::size_t j = 0; j < hat.size(); ++j) EXPECT_EQ(zero.values[j], 4.0 * hat.values[j]);
  EXPECT_EQ(zero.tail, 4.0 * hat.tail);

  const PeriodizationTable sinc = perturbed_phi(compute_phi(Generator::sinc(), lat1(), 256), i1(1));
  for (std::size_t j = 0; j < sinc.size(); ++j) {
    const double g = sinc.gamma(j)(0);
    EXPECT_NEAR(sinc.values[j], 4.0 * std::pow(std::cos(oracle::kPi * g), 2), 1e-12);
  }
  EXPECT_EQ(sinc.values[0], 4.0);
  EXPECT_EQ(sinc.values[128], 0.0);

  const PeriodizationTable one = perturbed_phi(hat, i1(1));
  EXPECT_NEAR(one.values[64], 4.0 / 3.0, 1e-9);
}

TEST(Periodization, PerturbedMatchesDirectRecomputation) {
  for (const Generator& g : {Generator::sinc(), Generator::bspline(1), Generator::gaussian(0.8)}) {
    const LatticeSpec l = lat1();
    const PeriodizationTable t = compute_phi(g, l, 1024);
    for (int n : {1, 2, -3}) {
      const PeriodizationTable fast = perturbed_phi(t, i1(n));
      const PeriodizationTable direct = compute_phi(g.plus_translate(l.to_spatial(i1(n))), l, 1024);
      for (std::size_t j = 0; j < t.size(); ++j) {
        ASSERT_NEAR(fast.values[j], direct.values[j], 1e-8) << g.tag() << " n=" << n << " j=" << j;
      }
    }
  }
}
