#pragma once

// One-dimensional low-pass filters with a flat plateau, the step phases
// J_{q,a,beta}, and the twisted tensor filter m~ = J * (m1 x m2).

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "pmra/core.hpp"
#include "pmra/xi_space.hpp"

namespace pmra {

using XqaClass = QuasiPeriodic;

/// ell-periodic low-pass filter for dilation by d.
struct Filter1D {
  int d = 2;
  double period = 1.0;
  double eps = 0.0;
  std::string family = "custom";
  std::function<Complex(double)> eval;

  Complex operator()(double t) const { return eval(t); }

  /// Radius of the interval around 0 on which the filter is identically 1
  /// (zero for filters without a plateau).
  double plateau_radius() const {
    if (family != "meyer-smoothstep") return 0.0;
    return period / (2.0 * std::abs(d)) - eps;
  }
  /// Radius beyond which (within a period) the filter vanishes.
  double zero_radius() const { return period / (2.0 * std::abs(d)) + eps; }
};

/// Largest admissible ramp half-width (exclusive): keeps a plateau around 0,
/// disjoint ramps, and makes the scaling product depth one on the support.
inline double max_meyer_eps(int d, double period) {
  const double ad = std::abs(d);
  return period * (ad - 1.0) / (2.0 * ad * (ad + 1.0));
}

inline double default_meyer_eps(int d, double period) { return period / (8.0 * std::abs(d)); }

inline double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

/// Meyer-type window: |m(t)|^2 = cos^2((pi/2) nu(u)) on the ramp around
/// ell/(2|d|), 1 inside, 0 outside; m real, even, nonnegative, C^1.
inline Filter1D build_meyer_filter(int d, double period, double eps) {
  if (std::abs(d) < 2) throw Error(ErrorCode::InvalidArgument, "build_meyer_filter: |d| >= 2 required");
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "build_meyer_filter: period must be positive");
  if (!(eps > 0.0) || !(eps < max_meyer_eps(d, period))) {
    throw Error(ErrorCode::BadRamp, "build_meyer_filter: eps must lie in (0, " +
                                        std::to_string(max_meyer_eps(d, period)) + ")");
  }
  const double r0 = period / (2.0 * std::abs(d)) - eps;
  const double r1 = period / (2.0 * std::abs(d)) + eps;
  Filter1D f;
  f.d = d;
  f.period = period;
  f.eps = eps;
  f.family = "meyer-smoothstep";
  f.eval = [period, eps, r0, r1](double t) -> Complex {
    const double u = t - period * std::nearbyint(t / period);
    const double a = std::abs(u);
    if (a <= r0) return {1.0, 0.0};
    if (a >= r1) return {0.0, 0.0};
    const double v = (a - r0) / (2.0 * eps);
    return {std::cos(0.5 * std::numbers::pi * smoothstep(v)), 0.0};
  };
  return f;
}

inline Filter1D build_meyer_filter(int d, double period) {
  return build_meyer_filter(d, period, default_meyer_eps(d, period));
}

struct FilterIdentityReport {
  double max_deviation = 0.0;
  int samples = 0;
  bool passes(double tol) const { return max_deviation < tol; }
};

/// max over N points of one period of |sum_{k<|d|} |m(t + k ell/d)|^2 - 1|.
inline FilterIdentityReport verify_filter_identity_1d(const Filter1D& m, int N) {
  FilterIdentityReport r;
  r.samples = N;
  const int ad = std::abs(m.d);
  for (int i = 0; i < N; ++i) {
    const double t = m.period * (static_cast<double>(i) / N) - 0.5 * m.period;
    double sum = 0.0;
    for (int k = 0; k < ad; ++k) sum += std::norm(m(t + k * m.period / m.d));
    r.max_deviation = std::max(r.max_deviation, std::abs(sum - 1.0));
  }
  return r;
}

/// Unimodular step phase on the strips t in [beta + n q, beta + (n+1) q):
/// e(-n a s) on strip n, so that J(s, t - q) = e(as) J(s, t) as for X(q,a).
struct PhaseJ {
  int q = 1;
  int a = 0;
  double beta = 0.0;

  long strip_index(double t) const { return static_cast<long>(std::floor((t - beta) / q)); }
};

inline Complex eval_phase_J(const PhaseJ& p, CPoint x) {
  const long n = p.strip_index(x.t);
  return e(-static_cast<double>(n) * p.a * x.s);
}

inline Fn2 phase_fn(const PhaseJ& p) {
  return Fn2{[p](CPoint x) { return eval_phase_J(p, x); }, Unrestricted{}};
}

/// Twist of the tensor-filter phase: a' = (1 - d1 d2) a.
inline int twisted_a(const XqaClass& cls, const DilationSpec& spec) { return (1 - spec.det()) * cls.a; }

inline PhaseJ filter_phase(const XqaClass& cls, const DilationSpec& spec) {
  return PhaseJ{cls.q, twisted_a(cls, spec), static_cast<double>(cls.q) / spec.d2};
}

/// m~(s,t) = J_{q, (1-d1 d2) a, q/d2}(s,t) m1(s) m2(t), in X(q, (1 - d1 d2) a).
inline Fn2 build_m_tilde(const XqaClass& cls, const DilationSpec& spec, const Filter1D& m1,
                         const Filter1D& m2) {
  if (std::abs(m1.period - 1.0) > 1e-14 || std::abs(m2.period - cls.q) > 1e-14 * cls.q) {
    throw Error(ErrorCode::PeriodMismatch, "build_m_tilde: m1 needs period 1 and m2 period q");
  }
  if (m1.d != spec.d1 || m2.d != spec.d2) {
    throw Error(ErrorCode::PeriodMismatch, "build_m_tilde: filter dilations differ from the dilation matrix");
  }
  const PhaseJ phase = filter_phase(cls, spec);
  return make_quasi_periodic(XqaClass{cls.q, phase.a}, [phase, m1, m2](CPoint x) {
    const Complex v = m1(x.s) * m2(x.t);
    if (v == Complex{0.0, 0.0}) return v;
    return eval_phase_J(phase, x) * v;
  });
}

/// Untwisted tensor filter m1(s) m2(t).
inline Fn2 build_tensor_filter(const Filter1D& m1, const Filter1D& m2) {
  return make_quasi_periodic(XqaClass{static_cast<int>(std::lround(m2.period)), 0},
                             [m1, m2](CPoint x) { return m1(x.s) * m2(x.t); });
}

/// max over an N x N vertex grid of [0,1) x [0,q) of
/// |sum_{j<|d1|, k<|d2|} |m~(s + j/d1, t + k q/d2)|^2 - 1|.
inline FilterIdentityReport verify_2d_filter_identity(const Fn2& mt, const XqaClass& cls,
                                                      const DilationSpec& spec, int N) {
  const GridSpec grid(N, SupportBox{0.0, 1.0, 0.0, static_cast<double>(cls.q)}, GridOffset::Vertex);
  const int a1 = std::abs(spec.d1), a2 = std::abs(spec.d2);
  const SampledField dev = sample_grid(
      [&](CPoint x) {
        double sum = 0.0;
        for (int j = 0; j < a1; ++j) {
          for (int k = 0; k < a2; ++k) {
            sum += std::norm(mt({x.s + static_cast<double>(j) / spec.d1,
                                 x.t + static_cast<double>(k) * cls.q / spec.d2}));
          }
        }
        return Complex{sum - 1.0, 0.0};
      },
      grid);
  FilterIdentityReport r;
  r.samples = static_cast<int>(grid.size());
  r.max_deviation = dev.max_abs_deviation({0.0, 0.0});
  return r;
}

struct QuasiPeriodicityReport {
  bool pass = false;
  double max_dev_s = 0.0;  // |F(s+1,t) - F(s,t)|
  double max_dev_t = 0.0;  // |F(s,t-q) - e(as) F(s,t)|
  int samples = 0;
};

/// Checks 1-periodicity in s and the twisted q-shift rule in t at N^2 random
/// points of [-2,2] x [-2q,2q].
inline QuasiPeriodicityReport verify_quasi_periodicity(const Fn2& F, const XqaClass& cls, int N, double tol,
                                                       std::uint64_t seed = 12345) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> us(-2.0, 2.0), ut(-2.0 * cls.q, 2.0 * cls.q);
  QuasiPeriodicityReport r;
  r.samples = N * N;
  for (int k = 0; k < N * N; ++k) {
    const CPoint x{us(rng), ut(rng)};
    const Complex v = F(x);
    r.max_dev_s = std::max(r.max_dev_s, std::abs(F({x.s + 1.0, x.t}) - v));
    r.max_dev_t = std::max(r.max_dev_t, std::abs(F({x.s, x.t - cls.q}) - e(cls.a * x.s) * v));
  }
  r.pass = r.max_dev_s < tol && r.max_dev_t < tol;
  return r;
}

}  // namespace pmra
