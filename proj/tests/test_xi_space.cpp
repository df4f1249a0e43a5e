#include <gtest/gtest.h>

#include <random>

#include "pmra/scaling.hpp"
#include "pmra/xi_space.hpp"

using namespace pmra;

namespace {

std::vector<Fn2> random_bumps(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.6, 1.8);
  std::vector<Fn2> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(smooth_bump(BumpSpec{{u(rng), u(rng)}, r(rng), r(rng), {u(rng), u(rng)}, {u(rng), u(rng)}}));
  }
  return out;
}

// Brute-force periodization over a fixed window, independent of the
// truncation logic in a_inner_product.
Complex brute_inner(const Fn2& a, const Fn2& b, LatticeSpec lat, CPoint x) {
  Complex acc{0.0, 0.0};
  for (int p = -12; p <= 12; ++p) {
    for (int r = -12; r <= 12; ++r) {
      const CPoint y{x.s - p * lat.l1, x.t - r * lat.l2};
      acc += std::conj(a(y)) * b(y);
    }
  }
  return acc;
}

}  // namespace

TEST(DilationSpec, RejectsSmallEntries) {
  try {
    DilationSpec(2, 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("|d2| > 1 required"), std::string::npos);
  }
  EXPECT_THROW(DilationSpec(-1, 3), Error);
  EXPECT_NO_THROW(DilationSpec(-2, 3));
  EXPECT_DOUBLE_EQ(DilationSpec(2, 3).delta(), 1.0 / std::sqrt(6.0));
  EXPECT_EQ(DilationSpec(-2, 2).sign(), -1);
}

TEST(AInnerProduct, MatchesBruteForcePeriodization) {
  const auto bumps = random_bumps(5, 4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const LatticeSpec lat : {LatticeSpec{1, 1}, LatticeSpec{2, 3}}) {
    const Fn2 g = a_inner_product(bumps[0], bumps[1], lat);
    for (int k = 0; k < 200; ++k) {
      const CPoint x{u(rng), u(rng)};
      EXPECT_NEAR(std::abs(g(x) - brute_inner(bumps[0], bumps[1], lat, x)), 0.0, 1e-14);
    }
  }
}

TEST(AInnerProduct, SigmaIsNormalized) {
  const auto sd = assemble_sigma(XqaClass{1, 1}, DilationSpec(2, 2));
  const Fn2 g = a_inner_product(sd->sigma, sd->sigma);
  EXPECT_LT(sample_grid(g, cell_grid(128, {1, 1})).max_abs_deviation(1.0), 1e-8);
}

TEST(AInnerProduct, DisjointTranslatesGiveZero) {
  const Fn2 a = smooth_bump(BumpSpec{{0.0, 0.0}, 0.2, 0.2});
  const Fn2 b = smooth_bump(BumpSpec{{0.5, 0.5}, 0.2, 0.2});
  const SampledField f = sample_grid(a_inner_product(a, b), cell_grid(32, {1, 1}));
  EXPECT_EQ(f.max_abs_deviation(0.0), 0.0);
}

TEST(AInnerProduct, IsPeriodicAndHermitian) {
  const auto bumps = random_bumps(17, 2);
  const Fn2 ab = a_inner_product(bumps[0], bumps[1]);
  const Fn2 ba = a_inner_product(bumps[1], bumps[0]);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const CPoint x{u(rng), u(rng)};
    EXPECT_NEAR(std::abs(ab(x) - ab({x.s + 1, x.t - 1})), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(ab(x) - std::conj(ba(x))), 0.0, 1e-15);
  }
}

TEST(AInnerProduct, ModuleLinearityInSecondArgument) {
  const auto bumps = random_bumps(21, 2);
  const Fn2 f = make_periodic({1, 1}, [](CPoint x) { return Complex{std::cos(2 * std::numbers::pi * x.s), 0.5} * e(x.t); });
  const Fn2 lhs = a_inner_product(bumps[0], module_action(bumps[1], f));
  const Fn2 base = a_inner_product(bumps[0], bumps[1]);
  const GridSpec grid = cell_grid(24, {1, 1});
  EXPECT_LT(sup_abs_difference(lhs, [&](CPoint x) { return base(x) * f(x); }, grid), 1e-14);
}

TEST(AInnerProduct, PointwiseCauchySchwarz) {
  const auto bumps = random_bumps(33, 6);
  const GridSpec grid = cell_grid(20, {1, 1});
  for (int k = 0; k + 1 < 6; k += 2) {
    const Fn2 ab = a_inner_product(bumps[k], bumps[k + 1]);
    const Fn2 aa = a_inner_product(bumps[k], bumps[k]);
    const Fn2 bb = a_inner_product(bumps[k + 1], bumps[k + 1]);
    for (int j = 0; j < grid.N; ++j) {
      for (int i = 0; i < grid.N; ++i) {
        const CPoint x = grid.point(i, j);
        EXPECT_LE(std::norm(ab(x)), aa(x).real() * bb(x).real() * (1 + 1e-12) + 1e-300);
      }
    }
  }
}

TEST(XiNorm, ZeroAndPartitionRoot) {
  const GridSpec grid = cell_grid(32, {1, 1});
  const Fn2 zero = make_compact(SupportBox{0, 1, 0, 1}, [](CPoint) { return Complex{0.0, 0.0}; });
  EXPECT_EQ(xi_norm(zero, grid), 0.0);
  EXPECT_NEAR(xi_norm(partition_bump(0.125, true), grid), 1.0, 1e-14);
}

TEST(XiNorm, TriangleInequality) {
  const auto bumps = random_bumps(41, 2);
  const GridSpec grid = cell_grid(32, {1, 1});
  const Fn2 sum = make_compact(box_union(*bumps[0].support(), *bumps[1].support()),
                               [a = bumps[0], b = bumps[1]](CPoint x) { return a(x) + b(x); });
  EXPECT_LE(xi_norm(sum, grid), xi_norm(bumps[0], grid) + xi_norm(bumps[1], grid) + 1e-14);
}

TEST(ConditionalExpectation, ConstantGivesDeterminant) {
  const DilationSpec spec(2, 3);
  const Fn2 one = make_periodic(level_lattice(spec, 1), [](CPoint) { return Complex{1.0, 0.0}; });
  EXPECT_LT(sample_grid(conditional_expectation(one, spec, 1), cell_grid(8, {1, 1})).max_abs_deviation(6.0), 1e-15);
}

TEST(ConditionalExpectation, NontrivialCharacterSumsToZero) {
  const DilationSpec spec(2, 2);
  const Fn2 ch = make_periodic(level_lattice(spec, 1), [](CPoint x) { return e(x.s / 2.0); });
  EXPECT_LT(sample_grid(conditional_expectation(ch, spec, 1), cell_grid(8, {1, 1})).max_abs_deviation(0.0), 1e-15);
}

TEST(ConditionalExpectation, RejectsWrongPeriod) {
  try {
    conditional_expectation(make_periodic({1, 1}, [](CPoint) { return Complex{1, 0}; }), DilationSpec(2, 2), 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::PeriodicityMismatch);
  }
}

TEST(LatticeRefinement, CosetSumOfFineInnerProductIsCoarse) {
  // <xi,eta>_{Z^2} = sum over cosets of <xi,eta>_{A Z^2}.
  for (const DilationSpec spec : {DilationSpec(2, 2), DilationSpec(3, -2)}) {
    const auto bumps = random_bumps(55, 2);
    const Fn2 fine = a_inner_product(bumps[0], bumps[1], level_lattice(spec, 1));
    const Fn2 coarse = a_inner_product(bumps[0], bumps[1]);
    EXPECT_LT(sup_abs_difference(conditional_expectation(fine, spec, 1), coarse, cell_grid(16, {1, 1})), 1e-14);
  }
}

TEST(Dilation, LevelZeroIsIdentityAndInverseUndoes) {
  const DilationSpec spec(2, -3);
  const Fn2 b = random_bumps(61, 1)[0];
  const GridSpec grid(32, *b.support());
  EXPECT_EQ(sup_abs_difference(dilate(b, spec, 0), b, grid), 0.0);
  EXPECT_LT(sup_abs_difference(dilate(dilate(b, spec, 2), spec, -2), b, grid), 1e-15);
}

TEST(Dilation, IsUnitary) {
  const DilationSpec spec(3, 2);
  const Fn2 b = random_bumps(63, 1)[0];
  const double n0 = l2_norm_squared_periodized(b, 64);
  const double n1 = l2_norm_squared_periodized(dilate(b, spec, 1), 64);
  EXPECT_NEAR(n1, n0, 1e-10 * n0);
}

TEST(Dilation, IntertwinesLevelInnerProducts) {
  for (const DilationSpec spec : {DilationSpec(2, 2), DilationSpec(2, 3), DilationSpec(-2, 3)}) {
    const auto bumps = random_bumps(71, 2);
    const Fn2 lhs = level_inner_product(dilate(bumps[0], spec, 1), dilate(bumps[1], spec, 1), spec, 1);
    const Fn2 rhs = level_inner_product(bumps[0], bumps[1], spec, 0);
    const GridSpec grid(24, SupportBox{0, 3.0, 0, 3.0});
    EXPECT_LT(sup_abs_difference(lhs, [&](CPoint x) { return rhs(spec.apply_inverse(x)); }, grid), 1e-14);
  }
}

TEST(TestFunctions, PartitionBumpsAreC1Partitions) {
  const Fn2 p = partition_bump(0.2);
  const Fn2 r = partition_bump(0.2, true);
  const GridSpec grid = cell_grid(40, {1, 1});
  const Fn2 sum = Fn2{[p](CPoint x) { return lattice_sum(p, {1, 1}, x); }};
  const Fn2 sq = a_inner_product(r, r);
  EXPECT_LT(sample_grid(sum, grid).max_abs_deviation(1.0), 1e-14);
  EXPECT_LT(sample_grid(sq, grid).max_abs_deviation(1.0), 1e-14);
}
