#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "shiftinv/classify.hpp"

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

std::vector<cplx> grid_samples(int n, const std::function<cplx(double)>& psi) {
  std::vector<cplx> out(n);
  for (int j = 0; j < n; ++j) out[j] = psi(static_cast<double>(j) / n);
  return out;
}

void expect_consistent(const Classification& c) {
  const SpectralBounds& b = c.evidence;
  EXPECT_LE(b.inf_all, b.inf_offzero + 1e-300);
  EXPECT_LE(b.inf_offzero, b.sup_all);
  if (b.zero_fraction == 0.0) EXPECT_EQ(b.inf_offzero, b.inf_all);
  if (c.verdict == Verdict::OrthonormalSequence || c.verdict == Verdict::RieszSequence) {
    EXPECT_EQ(b.zero_fraction, 0.0);
  }
  if (is_frame_sequence(c.verdict)) {
    ASSERT_TRUE(c.lower.has_value());
    EXPECT_GT(*c.lower, 0.0);
  }
}

}  // namespace

TEST(Classify, SpectralBoundsExamples) {
  const PeriodizationTable sinc = compute_phi(Generator::sinc(), lat1(), 1024);
  SpectralBounds b = spectral_bounds(sinc, default_eps_zero(sinc));
  EXPECT_EQ(b.sup_all, 1.0);
  EXPECT_EQ(b.inf_all, 1.0);
  EXPECT_EQ(b.zero_fraction, 0.0);

  const PeriodizationTable box = compute_phi(example_box(), lat1(), 1024);
  b = spectral_bounds(box, default_eps_zero(box));
  EXPECT_EQ(b.sup_all, 1.0);
  EXPECT_EQ(b.inf_offzero, 1.0);
  EXPECT_NEAR(b.zero_fraction, 1.0 / 3.0, 2.0 / 1024);

  const PeriodizationTable hat = compute_phi(Generator::bspline(1), lat1(), 1024);
  b = spectral_bounds(hat, default_eps_zero(hat));
  EXPECT_NEAR(b.inf_all, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(b.sup_all, 1.0, 1e-6);
  EXPECT_EQ(b.zero_fraction, 0.0);
}

TEST(Classify, EpsilonTooSmall) {
  PhiOptions opts;
  opts.target_tail = 1e-6;
  const PeriodizationTable t = compute_phi(Generator::bspline(1), lat1(), 64, opts);
  ASSERT_GT(t.tail, 0.0);
  try {
    spectral_bounds(t, t.tail);
    FAIL() << "expected EpsilonTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsilonTooSmall);
  }
  EXPECT_GE(default_eps_zero(t), 4.0 * t.tail);
}

TEST(Classify, TranslateVerdicts) {
  const Classification box = classify_table(compute_phi(example_box(), lat1(), 1024));
  EXPECT_EQ(box.verdict, Verdict::ParsevalFrameSequence);
  EXPECT_FALSE(is_riesz(box.verdict));
  EXPECT_NEAR(*box.lower, 1.0, 1e-12);
  EXPECT_NEAR(*box.upper, 1.0, 1e-12);
  expect_consistent(box);

  const Classification sinc = classify_table(compute_phi(Generator::sinc(), lat1(), 1024));
  EXPECT_EQ(sinc.verdict, Verdict::OrthonormalSequence);
  expect_consistent(sinc);

  const Classification hat = classify_table(compute_phi(Generator::bspline(1), lat1(), 1024));
  EXPECT_EQ(hat.verdict, Verdict::RieszSequence);
  EXPECT_NEAR(*hat.lower, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(*hat.upper, 1.0, 1e-6);
  expect_consistent(hat);
}

TEST(Classify, DecisionTreeOnSyntheticBounds) {
  SpectralBounds b;
  b.sup_all = 2.0;
  b.inf_all = 0.5;
  b.inf_offzero = 0.5;
  b.has_offzero = true;
  EXPECT_EQ(classify_translates(b).verdict, Verdict::RieszSequence);
  b.zero_fraction = 0.25;
  b.inf_all = 0.0;
  EXPECT_EQ(classify_translates(b).verdict, Verdict::FrameSequence);
  b.inf_offzero = 1e-6;
  EXPECT_EQ(classify_translates(b).verdict, Verdict::BesselNotFrameSeq);
  EXPECT_FALSE(classify_translates(b).lower.has_value());
  b.sup_all = 1e13;
  EXPECT_EQ(classify_translates(b).verdict, Verdict::NotBessel);
  b.sup_all = std::numeric_limits<double>::infinity();
  EXPECT_EQ(classify_translates(b).verdict, Verdict::NotBessel);
  EXPECT_FALSE(classify_translates(b).upper.has_value());
}

TEST(Classify, WeightedExponentials) {
  const auto ones = grid_samples(1024, [](double) { return cplx(1.0); });
  EXPECT_EQ(classify_weighted_exponentials(ones, 1, 1e-8).verdict, Verdict::OrthonormalSequence);

  const auto half = grid_samples(1024, [](double g) { return cplx(g < 0.5 ? 1.0 : 0.0); });
  const Classification h = classify_weighted_exponentials(half, 1, 1e-8);
  EXPECT_EQ(h.verdict, Verdict::ParsevalFrameSequence);
  EXPECT_FALSE(is_riesz(h.verdict));
  EXPECT_NEAR(h.evidence.zero_fraction, 0.5, 2.0 / 1024);

  const auto ramp = grid_samples(4096, [](double g) { return cplx(g); });
  const Classification r = classify_weighted_exponentials(ramp, 1, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::BesselNotFrameSeq);
  EXPECT_NEAR(r.evidence.inf_offzero, 1.0 / (4096.0 * 4096.0), 1e-15);

  const auto phase = grid_samples(512, [](double g) { return std::polar(1.0, 2.0 * oracle::kPi * g); });
  EXPECT_EQ(classify_weighted_exponentials(phase, 1, 1e-8).verdict, Verdict::OrthonormalSequence);
}

TEST(Classify, CompactSupportCheck) {
  const PeriodizationTable hat = compute_phi(Generator::bspline(1), lat1(), 1024);
  const CompactSupportCheck c = compact_support_riesz_check(Generator::bspline(1), lat1(), hat, default_eps_zero(hat));
  EXPECT_TRUE(c.riesz);
  EXPECT_NEAR(c.min_value, 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(c.witness(0), 0.5, 1e-12);

  // A = [2]: the decision must match a brute-force grid evaluation at double resolution
  const LatticeSpec two = lat1(2.0);
  const PeriodizationTable wide = compute_phi(Generator::bspline(1), two, 512);
  const double eps = default_eps_zero(wide);
  const CompactSupportCheck w = compact_support_riesz_check(Generator::bspline(1), two, wide, eps);
  const auto fhat2 = [](double xi) { return std::pow(oracle::sinc(xi), 4); };
  double brute_min = 1e9;
  for (int j = 0; j < 1024; ++j) brute_min = std::min(brute_min, oracle::phi_1d(fhat2, 2.0, j / 1024.0, 20000));
  EXPECT_EQ(w.riesz, brute_min >= eps);
  EXPECT_NEAR(brute_min, 2.0 / 3.0, 1e-9);  // hats at spacing 2 do not overlap
  EXPECT_TRUE(w.riesz);
  EXPECT_NEAR(w.min_value, brute_min, 1e-6);

  std::ostringstream csv;
  csv.precision(17);
  for (int j = -64; j <= 64; ++j) csv << j / 64.0 << ',' << oracle::hat(j / 64.0) << ",0\n";
  std::istringstream in(csv.str());
  const Generator sampled = Generator::sampled(parse_sampled_csv(in, 32.0));
  const PeriodizationTable st = compute_phi(sampled, lat1(), 256);
  const CompactSupportCheck s = compact_support_riesz_check(sampled, lat1(), st, default_eps_zero(st));
  EXPECT_TRUE(s.riesz);
  EXPECT_NEAR(s.min_value, 1.0 / 3.0, 1e-3);

  const PeriodizationTable sinc = compute_phi(Generator::sinc(), lat1(), 64);
  try {
    compact_support_riesz_check(Generator::sinc(), lat1(), sinc, 1e-8);
    FAIL() << "expected NotCompactlySupported";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCompactlySupported);
  }
}

TEST(Classify, PerturbationFrameCheck) {
  const PeriodizationTable sinc = compute_phi(Generator::sinc(), lat1(), 1024);
  const PerturbationCheck s = perturbation_frame_check(sinc, i1(1), default_eps_zero(sinc));
  EXPECT_FALSE(s.frame_for_original_span);
  EXPECT_EQ(s.lower_on_original, 0.0);

  const PeriodizationTable box = compute_phi(example_box(), lat1(), 1024);
  const PerturbationCheck b = perturbation_frame_check(box, i1(1), default_eps_zero(box));
  EXPECT_TRUE(b.frame_for_original_span);
  // nearest grid point to 1/3 is 341/1024; 4cos²(πγ) there
  EXPECT_NEAR(b.lower_on_original, 4.0 * std::pow(std::cos(oracle::kPi * 341.0 / 1024.0), 2), 1e-12);
  EXPECT_NEAR(b.lower_on_original, 1.0, 4e-3);

  const PeriodizationTable hat = compute_phi(Generator::bspline(1), lat1(), 1024);
  const Classification orig = classify_table(hat);
  const PerturbationCheck z = perturbation_frame_check(hat, i1(0), default_eps_zero(hat));
  EXPECT_TRUE(z.frame_for_original_span);
  EXPECT_EQ(z.perturbed.verdict, Verdict::RieszSequence);
  EXPECT_DOUBLE_EQ(*z.perturbed.lower, 4.0 * *orig.lower);
  EXPECT_DOUBLE_EQ(*z.perturbed.upper, 4.0 * *orig.upper);
}

TEST(Classify, VerdictStableUnderRefinement) {
  const std::vector<Generator> gens = {Generator::sinc(), Generator::bspline(1), Generator::bspline(3),
                                       Generator::gaussian(1.0), example_box()};
  for (const Generator& g : gens) {
    std::optional<Verdict> first;
    for (int n : {256, 512, 1024, 2048}) {
      const Classification c = classify_table(compute_phi(g, lat1(), n));
      expect_consistent(c);
      if (!first) first = c.verdict;
      EXPECT_EQ(c.verdict, *first) << g.tag() << " N=" << n;
    }
  }
}

TEST(Classify, ParsevalNotRieszAtEveryResolution) {
  for (int n : {16, 64, 256, 1024, 4096, 16384}) {
    const Classification c = classify_table(compute_phi(example_box(), lat1(), n));
    EXPECT_EQ(c.verdict, Verdict::ParsevalFrameSequence) << n;
    EXPECT_FALSE(is_riesz(c.verdict));
    EXPECT_GE(c.evidence.zero_fraction, 0.3) << n;
  }
}

TEST(Classify, ScalingEquivariance) {
  const std::vector<Generator> gens = {Generator::bspline(1), Generator::gaussian(0.7), example_box(),
                                       Generator::bspline(3)};
  for (const Generator& g : gens) {
    const Classification a = classify_table(compute_phi(g, lat1(), 1024));
    const Classification b = classify_table(compute_phi(g.scaled(2.0), lat1(), 1024));
    const bool tight_a = a.verdict == Verdict::ParsevalFrameSequence || a.verdict == Verdict::OrthonormalSequence;
    // Parseval/orthonormal depend on the value 1, so scaling moves them to the general category.
    const Verdict expected = tight_a ? (a.verdict == Verdict::OrthonormalSequence ? Verdict::RieszSequence
                                                                                  : Verdict::FrameSequence)
                                     : a.verdict;
    EXPECT_EQ(b.verdict, expected) << g.tag();
    EXPECT_EQ(*b.lower, 4.0 * *a.lower) << g.tag();
    EXPECT_EQ(*b.upper, 4.0 * *a.upper) << g.tag();
  }
}
