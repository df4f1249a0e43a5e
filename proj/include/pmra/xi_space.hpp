#pragma once

// Hilbert-module structure of the frequency-domain space of compactly
// supported continuous functions: lattice-valued inner products, the
// sup-norm, coset averaging between nested lattices, and dilation.

#include <cmath>
#include <cstdlib>
#include <memory>

#include "pmra/core.hpp"

namespace pmra {

/// Diagonal integer dilation diag(d1, d2), |d1|, |d2| > 1.
struct DilationSpec {
  int d1 = 2;
  int d2 = 2;

  DilationSpec() = default;
  DilationSpec(int a, int b) : d1(a), d2(b) {
    if (std::abs(d1) <= 1) throw Error(ErrorCode::InvalidArgument, "|d1| > 1 required");
    if (std::abs(d2) <= 1) throw Error(ErrorCode::InvalidArgument, "|d2| > 1 required");
  }

  int det() const { return d1 * d2; }
  int abs_det() const { return std::abs(det()); }
  int sign() const { return det() > 0 ? 1 : -1; }
  double delta() const { return 1.0 / std::sqrt(static_cast<double>(abs_det())); }

  CPoint apply(CPoint x) const { return {d1 * x.s, d2 * x.t}; }
  /// B = A^{-1}.
  CPoint apply_inverse(CPoint x) const { return {x.s / d1, x.t / d2}; }
  /// A^j x for any integer j.
  CPoint apply_power(CPoint x, int j) const {
    return {x.s * std::pow(static_cast<double>(d1), j), x.t * std::pow(static_cast<double>(d2), j)};
  }
};

/// A^j Z^2, which is again rectangular for diagonal A.
inline LatticeSpec level_lattice(const DilationSpec& spec, int j) {
  return {std::pow(std::abs(static_cast<double>(spec.d1)), j),
          std::pow(std::abs(static_cast<double>(spec.d2)), j)};
}

/// x -> sum_{p in lat} conj(xi) eta (x - p), evaluated lazily with exact
/// truncation to the overlap of the two supports.
inline Fn2 a_inner_product(const Fn2& xi, const Fn2& eta, const LatticeSpec& lat) {
  const SupportBox& a = xi.require_support("a_inner_product");
  const SupportBox& b = eta.require_support("a_inner_product");
  const auto overlap = box_intersection(a, b);
  if (!overlap) return make_periodic(lat, [](CPoint) { return Complex{0.0, 0.0}; });
  return make_periodic(lat, [xi, eta, lat, box = *overlap](CPoint x) {
    Complex acc{0.0, 0.0};
    for_each_lattice_point(box, lat, x, [&](CPoint p) {
      const CPoint y = x - p;
      acc += std::conj(xi(y)) * eta(y);
    });
    return acc;
  });
}

inline Fn2 a_inner_product(const Fn2& xi, const Fn2& eta) {
  return a_inner_product(xi, eta, LatticeSpec{1.0, 1.0});
}

/// Inner product with values in the algebra of A^j Z^2-periodic functions,
/// normalised by |det A|^j so that it intertwines the dilation:
/// <D xi, D eta>_{j+1}(x) = <xi, eta>_j(Bx).
inline Fn2 level_inner_product(const Fn2& xi, const Fn2& eta, const DilationSpec& spec, int j) {
  const LatticeSpec lat = level_lattice(spec, j);
  const double scale = std::pow(static_cast<double>(spec.abs_det()), j);
  Fn2 raw = a_inner_product(xi, eta, lat);
  return make_periodic(lat, [raw, scale](CPoint x) { return scale * raw(x); });
}

/// Grid maximum of <xi, xi>^{1/2}; a lower bound for the sup-norm that
/// converges under refinement.
inline double xi_norm(const Fn2& xi, const GridSpec& grid) {
  const Fn2 g = a_inner_product(xi, xi);
  const SampledField f = sample_grid(g, grid);
  double m = 0.0;
  for (const Complex& v : f.values) m = std::max(m, v.real());
  return std::sqrt(std::max(m, 0.0));
}

/// Coset sum from A^j Z^2-periodic functions down to Z^2-periodic ones:
/// x -> sum_{p in C} f(x - p), C = {0..|d1|^j-1} x {0..|d2|^j-1}.
/// This is |det A|^j times the normalised expectation.
inline Fn2 conditional_expectation(const Fn2& f, const DilationSpec& spec, int j) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "conditional_expectation: j >= 1 required");
  const LatticeSpec expected = level_lattice(spec, j);
  const LatticeSpec* lat = f.period();
  if (!lat || !lat->same_as(expected)) {
    throw Error(ErrorCode::PeriodicityMismatch,
                "conditional_expectation: function is not declared periodic modulo A^j Z^2");
  }
  const long n1 = std::lround(expected.l1), n2 = std::lround(expected.l2);
  return make_periodic(LatticeSpec{1.0, 1.0}, [f, n1, n2](CPoint x) {
    Complex acc{0.0, 0.0};
    for (long p1 = 0; p1 < n1; ++p1) {
      for (long p2 = 0; p2 < n2; ++p2) acc += f({x.s - p1, x.t - p2});
    }
    return acc;
  });
}

/// (D^j xi)(x) = delta^j xi(B^j x); the support box is scaled by A^j.
inline Fn2 dilate(const Fn2& xi, const DilationSpec& spec, int j) {
  const SupportBox& box = xi.require_support("dilate");
  if (j == 0) return xi;
  const double amp = std::pow(spec.delta(), j);
  const double f1 = std::pow(static_cast<double>(spec.d1), -j);
  const double f2 = std::pow(static_cast<double>(spec.d2), -j);
  const SupportBox out = box.scaled(std::pow(static_cast<double>(spec.d1), j),
                                    std::pow(static_cast<double>(spec.d2), j));
  return make_compact(out, [xi, amp, f1, f2](CPoint x) { return amp * xi({x.s * f1, x.t * f2}); });
}

/// Right module action: pointwise product keeping the support of xi.
inline Fn2 module_action(const Fn2& xi, const Fn2& f) {
  if (const SupportBox* b = xi.support()) {
    return make_compact(*b, [xi, f](CPoint x) { return xi(x) * f(x); });
  }
  return Fn2{[xi, f](CPoint x) { return xi(x) * f(x); }, xi.meta};
}

inline Fn2 scaled(const Fn2& xi, Complex c) {
  return Fn2{[xi, c](CPoint x) { return c * xi(x); }, xi.meta};
}

/// L2 norm squared through the periodisation <xi, xi> integrated over one
/// Z^2 cell.
inline double l2_norm_squared_periodized(const Fn2& xi, int N) {
  const Fn2 g = a_inner_product(xi, xi);
  return torus_integral(sample_grid(g, cell_grid(N, {1.0, 1.0})), {1.0, 1.0}).real();
}

// ---------------------------------------------------------------------------
// Test functions.

/// C-infinity bump exp(1 - 1/(1 - u^2)) on (-1, 1), value 1 at 0.
inline double smooth_bump_1d(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

struct BumpSpec {
  CPoint center{0.0, 0.0};
  double rs = 1.0;
  double rt = 1.0;
  Complex amplitude{1.0, 0.0};
  CPoint modulation{0.0, 0.0};
};

/// amplitude * e(modulation . x) * bump((s - cs)/rs) bump((t - ct)/rt).
inline Fn2 smooth_bump(const BumpSpec& b) {
  const SupportBox box{b.center.s - b.rs, b.center.s + b.rs, b.center.t - b.rt, b.center.t + b.rt};
  return make_compact(box, [b](CPoint x) {
    const double w = smooth_bump_1d((x.s - b.center.s) / b.rs) * smooth_bump_1d((x.t - b.center.t) / b.rt);
    if (w == 0.0) return Complex{0.0, 0.0};
    return b.amplitude * w * e(b.modulation.s * x.s + b.modulation.t * x.t);
  });
}

/// C^1 window w with sum_k w(s - k) = 1: plateau on |s| <= 1/2 - r and
/// complementary smoothstep ramps of half-width r.
inline double partition_window_1d(double s, double r) {
  const double a = std::abs(s);
  if (a <= 0.5 - r) return 1.0;
  if (a >= 0.5 + r) return 0.0;
  const double u = (a - 0.5 + r) / (2.0 * r);
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

/// Separable partition of unity under Z^2 translates (sqrt_form: the squares
/// sum to one instead).
inline Fn2 partition_bump(double ramp = 0.125, bool sqrt_form = false) {
  const SupportBox box{-0.5 - ramp, 0.5 + ramp, -0.5 - ramp, 0.5 + ramp};
  return make_compact(box, [ramp, sqrt_form](CPoint x) {
    double v = partition_window_1d(x.s, ramp) * partition_window_1d(x.t, ramp);
    if (sqrt_form) v = std::sqrt(v);
    return Complex{v, 0.0};
  });
}

}  // namespace pmra
