#pragma once

// The twisted scaling function sigma = J * phi: the one-dimensional infinite
// products phi_i, the phase product J, the embedding R(F) = sigma F of X(q,a)
// into the compactly supported space, and the checks that sigma is
// orthonormal over Z x qZ and satisfies sigma(Ax) = m~(x) sigma(x).

#include <cmath>
#include <cstdlib>
#include <memory>
#include <random>

#include "pmra/core.hpp"
#include "pmra/filters.hpp"
#include "pmra/xi_space.hpp"
#include "pmra/xqa.hpp"

namespace pmra {

/// phi^(t) = prod_{j >= 1} m(t / d^j) for a plateau filter; compactly
/// supported in [-radius, radius].
struct Scaling1D {
  Filter1D filter;
  double radius = 0.0;

  double operator()(double t) const {
    if (std::abs(t) > radius) return 0.0;
    const double r0 = filter.plateau_radius();
    double u = t / filter.d;
    double v = 1.0;
    // Factors are identically 1 once |t / d^j| is inside the plateau.
    while (std::abs(u) > r0) {
      v *= filter(u).real();
      if (v == 0.0) return 0.0;
      u /= filter.d;
    }
    return v;
  }
};

inline Scaling1D build_scaling_1d(const Filter1D& m, int d) {
  if (m.d != d) throw Error(ErrorCode::InvalidArgument, "build_scaling_1d: filter is for a different dilation");
  if (!(m.plateau_radius() > 0.0)) {
    throw Error(ErrorCode::NoPlateau, "build_scaling_1d: filter has no plateau around 0");
  }
  // With eps below max_meyer_eps the product equals m(t/d) on |t| <= |d| r1
  // and vanishes beyond.
  return Scaling1D{m, std::abs(d) * m.zero_radius()};
}

/// Phase product J(x) = prod_{j >= 1} J_{q,a',q/d2}(A^{-j} x), a' = (1-d1 d2) a.
/// Factors beyond a point-dependent depth all sit on the same strip
/// (n = -1 for d2 > 0, n = 0 for d2 < 0); their product is the geometric tail
/// e(a' s d1^{-depth} / (d1 - 1)) resp. 1.
struct PhaseProduct {
  PhaseJ phase;
  int d1 = 2;
  int d2 = 2;

  double limit() const {
    const double b = std::abs(phase.beta);
    return std::min(b, phase.q - b);
  }

  /// Smallest depth such that every factor past it lies on the limiting strip.
  int depth(double t) const {
    const double lim = limit();
    const double ad2 = std::abs(static_cast<double>(d2));
    double tt = std::abs(t) / ad2;
    int j = 0;
    while (tt >= lim) {
      ++j;
      tt /= ad2;
    }
    return j;
  }

  Complex operator()(CPoint x) const {
    const int jmax = depth(x.t);
    double ph = 0.0;
    double sj = x.s, tj = x.t;
    for (int j = 1; j <= jmax; ++j) {
      sj /= d1;
      tj /= d2;
      const long n = phase.strip_index(tj);
      ph -= static_cast<double>(n) * phase.a * sj;
    }
    if (d2 > 0) ph += phase.a * sj / (d1 - 1.0);  // sj == s d1^{-jmax}
    return e(ph);
  }
};

inline PhaseProduct build_phase_product_J(const XqaClass& cls, const DilationSpec& spec) {
  return PhaseProduct{filter_phase(cls, spec), spec.d1, spec.d2};
}

struct PhaseProductReport {
  double unimodularity = 0.0;  // sup | |J| - 1 |
  double cocycle = 0.0;        // sup |J(Ax) - J_{q,a',q/d2}(x) J(x)|
  int samples = 0;
  int skipped = 0;  // points within `margin` of a jump line of some factor
};

/// Samples J at random points of [-4,4] x [-4q,4q], skipping points whose
/// t-coordinate lies within `margin` of a jump line of J(x) or J(Ax).
inline PhaseProductReport verify_phase_product(const PhaseProduct& J, int samples, std::uint64_t seed = 99,
                                               double margin = 1e-9) {
  std::mt19937_64 rng(seed);
  const double q = J.phase.q;
  std::uniform_real_distribution<double> us(-4.0, 4.0), ut(-4.0 * q, 4.0 * q);
  auto near_line = [&](double t) {
    // Jump lines of the factor at depth j: t d2^{-j} in beta + qZ.
    double tj = t;
    for (int j = 0; j <= 64; ++j) {
      const double u = (tj - J.phase.beta) / q;
      if (std::abs(u - std::nearbyint(u)) * q < margin) return true;
      tj /= J.d2;
    }
    return false;
  };
  PhaseProductReport r;
  for (int k = 0; k < samples; ++k) {
    const CPoint x{us(rng), ut(rng)};
    if (near_line(x.t) || near_line(J.d2 * x.t)) {
      ++r.skipped;
      continue;
    }
    ++r.samples;
    const Complex jx = J(x);
    r.unimodularity = std::max(r.unimodularity, std::abs(std::abs(jx) - 1.0));
    const Complex lhs = J({J.d1 * x.s, J.d2 * x.t});
    r.cocycle = std::max(r.cocycle, std::abs(lhs - eval_phase_J(J.phase, x) * jx));
  }
  return r;
}

struct ScalingOptions {
  double eps1 = 0.0;  // 0 selects the default ramp
  double eps2 = 0.0;
  double sigma_scale = 1.0;  // fault-injection hook; 1 for the genuine construction
};

struct ScalingData {
  DilationSpec spec;
  XqaClass cls;
  Filter1D m1, m2;
  Fn2 m;   // m1(s) m2(t)
  Fn2 mt;  // twisted filter
  Scaling1D phi1, phi2;
  Fn2 phi;
  PhaseProduct J;
  Fn2 J_fn;
  Fn2 sigma;
  int J_depth = 0;  // maximal product depth over the support of sigma
  SupportBox support;
  double sigma_scale = 1.0;
};

/// Assembles filters, phi = phi1 x phi2, J and sigma = J phi without
/// certifying anything.
inline std::shared_ptr<const ScalingData> assemble_sigma(const XqaClass& cls, const DilationSpec& spec,
                                                         const ScalingOptions& opt = {}) {
  if (cls.q < 1) throw Error(ErrorCode::InvalidArgument, "q >= 1 required");
  auto sd = std::make_shared<ScalingData>();
  sd->spec = spec;
  sd->cls = cls;
  const double q = cls.q;
  sd->m1 = build_meyer_filter(spec.d1, 1.0, opt.eps1 > 0.0 ? opt.eps1 : default_meyer_eps(spec.d1, 1.0));
  sd->m2 = build_meyer_filter(spec.d2, q, opt.eps2 > 0.0 ? opt.eps2 : default_meyer_eps(spec.d2, q));
  sd->m = build_tensor_filter(sd->m1, sd->m2);
  sd->mt = build_m_tilde(cls, spec, sd->m1, sd->m2);
  sd->phi1 = build_scaling_1d(sd->m1, spec.d1);
  sd->phi2 = build_scaling_1d(sd->m2, spec.d2);
  sd->support = SupportBox{-sd->phi1.radius, sd->phi1.radius, -sd->phi2.radius, sd->phi2.radius};
  sd->J = build_phase_product_J(cls, spec);
  sd->J_depth = sd->J.depth(sd->phi2.radius);
  sd->sigma_scale = opt.sigma_scale;

  const Scaling1D p1 = sd->phi1, p2 = sd->phi2;
  const PhaseProduct J = sd->J;
  const double scale = opt.sigma_scale;
  sd->phi = make_compact(sd->support, [p1, p2](CPoint x) { return Complex{p1(x.s) * p2(x.t), 0.0}; });
  sd->J_fn = Fn2{[J](CPoint x) { return J(x); }, Unrestricted{}};
  sd->sigma = make_compact(sd->support, [p1, p2, J, scale](CPoint x) {
    const double v = p1(x.s);
    if (v == 0.0) return Complex{0.0, 0.0};
    const double w = v * p2(x.t);
    if (w == 0.0) return Complex{0.0, 0.0};
    return scale * w * J(x);
  });
  return sd;
}

struct SigmaCertificate {
  double orthonormality_dev = 0.0;  // sup |<sigma, sigma>_{Z x qZ} - 1|
  double refinement_dev = 0.0;      // sup |sigma(Ax) - m~(x) sigma(x)|
  int grid_n = 0;
};

inline SigmaCertificate certify_sigma(const ScalingData& sd, int N) {
  SigmaCertificate c;
  c.grid_n = N;
  const LatticeSpec lat{1.0, static_cast<double>(sd.cls.q)};
  const Fn2& sigma = sd.sigma;
  const SampledField ortho =
      sample_grid([&](CPoint x) { return lattice_sum(sigma, lat, x, [](Complex v) { return Complex{std::norm(v), 0.0}; }); },
                  cell_grid(N, lat));
  c.orthonormality_dev = ortho.max_abs_deviation({1.0, 0.0});
  c.refinement_dev = sup_abs_difference([&](CPoint x) { return sigma(sd.spec.apply(x)); },
                                        [&](CPoint x) { return sd.mt(x) * sigma(x); }, GridSpec(N, sd.support));
  return c;
}

/// Builds sigma and certifies both scaling-function conditions on an N x N
/// grid; throws ConditionFailed naming the failed condition.
inline std::shared_ptr<const ScalingData> build_sigma(const XqaClass& cls, const DilationSpec& spec,
                                                      const ScalingOptions& opt = {}, int certify_n = 128,
                                                      double tol_ortho = 1e-8, double tol_refine = 1e-9) {
  auto sd = assemble_sigma(cls, spec, opt);
  const SigmaCertificate c = certify_sigma(*sd, certify_n);
  if (!(c.orthonormality_dev < tol_ortho)) {
    throw Error(ErrorCode::ConditionFailed,
                "condition 1 (<sigma,sigma> = 1) failed, deviation " + std::to_string(c.orthonormality_dev));
  }
  if (!(c.refinement_dev < tol_refine)) {
    throw Error(ErrorCode::ConditionFailed,
                "condition 2 (sigma(Ax) = m~ sigma) failed, residual " + std::to_string(c.refinement_dev));
  }
  return sd;
}

/// R(F) = sigma F.
inline Fn2 embed_R(const ScalingData& sd, const Fn2& F) {
  const QuasiPeriodic* c = F.quasi();
  if (!c || !(*c == sd.cls)) throw Error(ErrorCode::ClassMismatch, "embed_R: F is not in X(q,a) of sigma");
  return make_compact(sd.support, [sigma = sd.sigma, F](CPoint x) {
    const Complex s = sigma(x);
    return s == Complex{0.0, 0.0} ? s : s * F(x);
  });
}

struct InclusionReport {
  QuasiPeriodicityReport class_check;
  double identity_dev = 0.0;  // sup |D^{-1}(sigma F) - delta^{-1} sigma G|
  bool pass = false;
};

/// With G(x) = filter(x) F(Ax): G must lie in X(q,a) and
/// D^{-1}(sigma F) = delta^{-1} sigma G. `filter` defaults to m~.
inline InclusionReport verify_inclusion(const ScalingData& sd, const Fn2& F, int N = 64, double tol = 1e-9,
                                        const Fn2* filter = nullptr) {
  const Fn2 filt = filter ? *filter : sd.mt;
  const DilationSpec spec = sd.spec;
  const Fn2 G = make_quasi_periodic(sd.cls, [filt, F, spec](CPoint x) { return filt(x) * F(spec.apply(x)); });
  InclusionReport r;
  r.class_check = verify_quasi_periodicity(G, sd.cls, N / 4 > 4 ? N / 4 : 4, tol);
  const double inv_delta = 1.0 / spec.delta();
  r.identity_dev = sup_abs_difference(
      [&](CPoint x) {
        const CPoint ax = spec.apply(x);
        return inv_delta * sd.sigma(ax) * F(ax);
      },
      [&](CPoint x) { return inv_delta * sd.sigma(x) * G(x); }, GridSpec(N, sd.support));
  r.pass = r.class_check.pass && r.identity_dev < tol;
  return r;
}

}  // namespace pmra
