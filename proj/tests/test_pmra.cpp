#include <gtest/gtest.h>

#include <map>
#include <random>
#include <tuple>

#include "pmra/pmra.hpp"

using namespace pmra;

namespace {

const PMRA& cached(int d1, int d2, int q, int a) {
  static std::map<std::tuple<int, int, int, int>, PMRA> cache;
  const auto key = std::make_tuple(d1, d2, q, a);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_pmra(XqaClass{q, a}, DilationSpec(d1, d2))).first;
  return it->second;
}

const PMRA& p2211() { return cached(2, 2, 1, 1); }

double rel_residual(const ModuleFrame& fr, const Fn2& v, int N) {
  const auto [res, mag] = reconstruction_residual(fr, v, N);
  return mag > 0.0 ? res / mag : res;
}

}  // namespace

TEST(A1Basis, CountModulusOrthonormality) {
  for (const DilationSpec spec : {DilationSpec(2, 2), DilationSpec(2, 3), DilationSpec(-2, 3)}) {
    const std::vector<Fn2> b = build_a1_basis(spec);
    ASSERT_EQ(static_cast<int>(b.size()), spec.abs_det());
    for (const Fn2& f : b) {
      const SampledField s = sample_grid(f, cell_grid(8, level_lattice(spec, 1)));
      for (const Complex& v : s.values) EXPECT_NEAR(std::abs(v), spec.delta(), 1e-15);
    }
    EXPECT_LT(a1_orthonormality_deviation(b, spec), 1e-12);
  }
}

TEST(A1Basis, OracleCharacterSums) {
  // E(conj(b_jk) b_j'k') = (1/|det|) sum_c e(((j'-j) c1 / d1) + ((k'-k) c2 / d2)), summed by hand.
  const DilationSpec spec(2, 3);
  const std::vector<Fn2> b = build_a1_basis(spec);
  const CPoint x{0.3, 0.7};
  for (int u = 0; u < 6; ++u) {
    for (int v = 0; v < 6; ++v) {
      Complex acc{0.0, 0.0};
      for (int c1 = 0; c1 < 2; ++c1) {
        for (int c2 = 0; c2 < 3; ++c2) {
          const CPoint y{x.s - c1, x.t - c2};
          acc += std::conj(b[u](y)) * b[v](y);
        }
      }
      EXPECT_NEAR(std::abs(acc - Complex(u == v ? 1.0 : 0.0, 0.0)), 0.0, 1e-14);
    }
  }
}

TEST(Frames, SizesAndSupports) {
  const PMRA& p = p2211();
  EXPECT_EQ(p.xqa_frame.size(), 2u);
  EXPECT_EQ(p.v0_frame.size(), 2u);
  EXPECT_EQ(p.v1_frame.size(), 8u);
  EXPECT_EQ(p.w0_frame.size(), 8u);
  const SupportBox box = *p.v1_frame.xi_box();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int k = 0; k < 2000; ++k) {
    const CPoint x{u(rng), u(rng)};
    if (box.contains(x)) continue;
    for (const Fn2& f : p.v1_frame.elements) EXPECT_EQ(f(x), Complex(0.0, 0.0));
  }
}

TEST(Frames, BatchAgreesWithElements) {
  const PMRA& p = cached(2, 3, 2, -1);
  for (const ModuleFrame* fr : {&p.v0_frame, &p.v1_frame, &p.w0_frame}) {
    std::vector<Complex> batch(fr->size());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> us(-2.0, 2.0), ut(-4.0, 4.0);
    for (int k = 0; k < 100; ++k) {
      const CPoint x{us(rng), ut(rng)};
      fr->evaluate_all(x, batch);
      for (std::size_t j = 0; j < fr->size(); ++j) EXPECT_NEAR(std::abs(batch[j] - fr->elements[j](x)), 0.0, 1e-15);
    }
  }
}

TEST(Frames, ReconstructionOnEachModule) {
  for (const auto& [d1, d2, q, a] : {std::tuple{2, 2, 1, 1}, std::tuple{2, 3, 2, -1}}) {
    const PMRA& p = cached(d1, d2, q, a);
    EXPECT_LT(verify_module_frame(p.v0_frame, 20, 1e-8, 24).max_residual, 1e-8);
    EXPECT_LT(verify_module_frame(p.v1_frame, 20, 1e-8, 24).max_residual, 1e-8);
    double w0 = 0.0;
    for (int k = 0; k < 20; ++k) w0 = std::max(w0, rel_residual(p.w0_frame, random_w0_element(p, 300 + k), 24));
    EXPECT_LT(w0, 1e-7);
  }
}

TEST(Frames, V1ElementsAreDilatedAndModulated) {
  const PMRA& p = p2211();
  const Fn2 d = dilate(p.v0_frame.elements[1], p.spec(), 1);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  // Index (k * n1 + c1) * n2 + c2 with k = 1, c = (1, 0).
  const Fn2& psi = p.v1_frame.elements[(1 * 2 + 1) * 2 + 0];
  for (int k = 0; k < 300; ++k) {
    const CPoint x{u(rng), u(rng)};
    EXPECT_NEAR(std::abs(psi(x) - d(x) * e(x.s / 2.0)), 0.0, 1e-15);
  }
}

TEST(Frames, NestingV0InsideV1) {
  EXPECT_LT(nesting_residual(p2211()), 1e-8);
  EXPECT_LT(nesting_residual(cached(2, 3, 2, -1)), 1e-8);
}

TEST(Frames, V0OrthogonalToW0) {
  EXPECT_LT(frame_cross_sup(p2211().v0_frame, p2211().w0_frame, 32), 1e-8);
  EXPECT_LT(frame_cross_sup(cached(2, 3, 2, -1).v0_frame, cached(2, 3, 2, -1).w0_frame, 24), 1e-8);
}

TEST(Frames, WaveletsCarriedByDilation) {
  // <D psi_i, D psi_k>_{A Z^2}, normalised by |det A|, equals <psi_i, psi_k>_{Z^2} at Bx.
  const PMRA& p = p2211();
  const DilationSpec& spec = p.spec();
  const GridSpec grid = cell_grid(12, level_lattice(spec, 1));
  double dev = 0.0;
  for (std::size_t i : {0u, 3u, 5u}) {
    for (std::size_t k : {0u, 6u}) {
      const Fn2& a = p.w0_frame.elements[i];
      const Fn2& b = p.w0_frame.elements[k];
      const Fn2 lhs = level_inner_product(dilate(a, spec, 1), dilate(b, spec, 1), spec, 1);
      const Fn2 rhs = level_inner_product(a, b, spec, 0);
      dev = std::max(dev, sup_abs_difference(lhs, [&](CPoint x) { return rhs(spec.apply_inverse(x)); }, grid));
    }
  }
  EXPECT_LT(dev, 1e-10);
}

TEST(Frames, FreeCaseWaveletGramHasTraceThree) {
  const PMRA& p = cached(2, 2, 1, 0);
  const SampledField tr = sample_grid(
      [&](CPoint x) {
        std::vector<Complex> g(p.w0_frame.size() * p.w0_frame.size());
        gram_matrix_at(p.w0_frame, x, g);
        Complex t{0.0, 0.0};
        for (std::size_t j = 0; j < p.w0_frame.size(); ++j) t += g[j * p.w0_frame.size() + j];
        return t;
      },
      cell_grid(16, {1, 1}, GridOffset::Vertex));
  EXPECT_LT(tr.max_abs_deviation(3.0), 1e-6);
}

TEST(Projections, ModuleElementsAreFixed) {
  const PMRA& p = p2211();
  const Fn2 v = random_module_element(p.v0_frame, 77);
  EXPECT_LT(sup_abs_difference(project_Vj(p, v, 0), v, GridSpec(48, *p.v0_frame.xi_box())), 1e-8);
  const Fn2 w = random_w0_element(p, 78);
  const GridSpec wg(40, *p.w0_frame.xi_box());
  EXPECT_LT(sup_abs_difference(project_Wj(p, w, 0), w, wg), 1e-7);
  EXPECT_LT(sample_grid(project_Vj(p, w, 0), wg).max_abs_deviation(0.0), 1e-8);
}

TEST(Projections, PythagorasAcrossOneLevel) {
  const PMRA& p = p2211();
  for (const Fn2& xi : standard_test_bumps()) {
    for (int j = 0; j <= 1; ++j) {
      const double vj = norm2_Vj(p, xi, j, 96), wj = norm2_Wj(p, xi, j, 96), vj1 = norm2_Vj(p, xi, j + 1, 96);
      EXPECT_NEAR(vj1, vj + wj, 1e-6 * std::max(1.0, vj1));
    }
  }
}

TEST(Projections, NormsIncreaseWithLevel) {
  // Bump 0 is reproduced exactly from level 2 on, so equal norms differ only by
  // quadrature error; the slack matches the Pythagoras check above.
  const PMRA& p = p2211();
  for (const Fn2& xi : standard_test_bumps()) {
    double prev = -1.0;
    for (int j = 0; j <= 3; ++j) {
      const double n = norm2_Vj(p, xi, j, 192);
      EXPECT_GE(n, prev - 1e-6 * std::max(1.0, n));
      prev = n;
    }
  }
}

TEST(Density, StandardBumpsDecreaseBelowThreshold) {
  const PMRA& p = p2211();
  for (const Fn2& xi : standard_test_bumps()) {
    const DensityReport r = verify_density(p, xi, 3);
    EXPECT_TRUE(r.pass);
    EXPECT_NO_THROW(r.require_decreasing());
    EXPECT_LT(r.residuals.back(), 0.05 * r.norm);
  }
  // The wide bump is not reproduced at level 3, so its residuals decrease strictly.
  const DensityReport wide = verify_density(p, standard_test_bumps()[2], 3);
  for (std::size_t j = 0; j + 1 < wide.residuals.size(); ++j) EXPECT_LT(wide.residuals[j + 1], wide.residuals[j]);
  EXPECT_GT(wide.residuals.back(), wide.floor);
}

TEST(Density, ModuleElementsHaveZeroResidual) {
  const PMRA& p = p2211();
  const DensityReport r = verify_density(p, random_module_element(p.v0_frame, 81), 2, 64);
  for (double v : r.residuals) EXPECT_LT(v, 1e-8);
  const Fn2 deep = dilate(p.v0_frame.elements[0], p.spec(), 3);
  const DensityReport d = verify_density(p, deep, 3, 64);
  EXPECT_LT(d.residuals.back(), 1e-7);
}

TEST(Density, NonDecreasingReportThrows) {
  DensityReport r;
  r.decreasing = false;
  try {
    r.require_decreasing();
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotDecreasing);
  }
}

TEST(Intersection, DecreasesTowardZero) {
  const PMRA& p = p2211();
  for (const Fn2& xi : standard_test_bumps()) {
    const IntersectionReport r = verify_intersection(p, xi, -4);
    EXPECT_TRUE(r.pass) << r.norms.back() / r.norm;
  }
}

TEST(Intersection, ZeroStaysZero) {
  const PMRA& p = p2211();
  const Fn2 zero = make_compact(SupportBox{-1, 1, -1, 1}, [](CPoint) { return Complex{0.0, 0.0}; });
  const IntersectionReport z = verify_intersection(p, zero, -3);
  EXPECT_TRUE(z.pass);
  for (double v : z.norms) EXPECT_EQ(v, 0.0);
}

TEST(Intersection, FarBumpDecaysFaster) {
  // Under B^{-j} the far bump leaves the support of every V_0 element.
  const PMRA& p = p2211();
  const IntersectionReport a = verify_intersection(p, smooth_bump(BumpSpec{{0.2, 0.1}, 1, 1}), -3);
  const IntersectionReport b = verify_intersection(p, smooth_bump(BumpSpec{{6.2, -4.9}, 1, 1}), -3);
  EXPECT_TRUE(b.pass);
  for (std::size_t k = 0; k < a.norms.size(); ++k) EXPECT_LE(b.norms[k] / b.norm, a.norms[k] / a.norm);
  EXPECT_LT(b.norms.back() / b.norm, a.norms.back() / a.norm);
}

TEST(TightFrame, IntegralRouteAndDirectRoute) {
  const PMRA& p = p2211();
  const Fn2 xi = frame_projection(p.v0_frame, standard_test_bumps()[1]);
  const TightFrameReport r = verify_tight_frame_l2(p.v0_frame, xi, {8, 16, 32}, 64, 256);
  EXPECT_LT(r.defect_integral, 1e-6);
  EXPECT_TRUE(r.direct_monotone);
  EXPECT_LT(r.defect_direct.back(), r.defect_direct.front());
  EXPECT_NEAR(r.norm2_direct, r.norm2, 1e-3 * r.norm2);
}

TEST(TightFrame, OrthogonalElementGivesZero) {
  const PMRA& p = p2211();
  const Fn2 w = random_w0_element(p, 91);
  const TightFrameReport r = verify_tight_frame_l2(p.v0_frame, w, {4}, 32, 96);
  EXPECT_LT(r.route_integral, 1e-14 * std::max(1.0, r.norm2));
  EXPECT_LT(r.route_direct[0], 1e-6 * r.norm2);
}

TEST(Ladder, StandardBumps) {
  const PMRA& p = p2211();
  for (const Fn2& xi : standard_test_bumps()) {
    const LadderReport r = pythagoras_ladder(p, xi, 4, 96);
    EXPECT_TRUE(r.pass) << r.tail;
  }
}
