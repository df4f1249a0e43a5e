#pragma once

// The projective modules X(q,a) of continuous F on T x R with
// F(s, t - q) = e(as) F(s,t), their C(T^2)-valued inner product, explicit
// standard module frames, and generic frame machinery (reconstruction,
// projection, Gram matrices) shared with submodules of the compactly
// supported space.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pmra/core.hpp"
#include "pmra/filters.hpp"
#include "pmra/xi_space.hpp"

namespace pmra {

struct XqaAmbient {
  XqaClass cls;
};

/// Submodule of the compactly supported space; box covers every element.
struct XiAmbient {
  SupportBox box;
};

using Ambient = std::variant<XqaAmbient, XiAmbient>;

using BatchEval = std::function<void(CPoint, std::span<Complex>)>;

struct ModuleFrame {
  std::vector<Fn2> elements;
  Ambient ambient = XqaAmbient{};
  LatticeSpec algebra{1.0, 1.0};
  /// Optional evaluator for all elements at once; must agree with elements.
  BatchEval batch;
  std::string label;
  std::vector<std::pair<std::string, double>> params;

  std::size_t size() const { return elements.size(); }

  void evaluate_all(CPoint x, std::span<Complex> out) const {
    if (batch) {
      batch(x, out);
      return;
    }
    for (std::size_t k = 0; k < elements.size(); ++k) out[k] = elements[k](x);
  }

  const XqaClass* xqa_class() const {
    const auto* amb = std::get_if<XqaAmbient>(&ambient);
    return amb ? &amb->cls : nullptr;
  }
  const SupportBox* xi_box() const {
    const auto* amb = std::get_if<XiAmbient>(&ambient);
    return amb ? &amb->box : nullptr;
  }
};

/// Points y at which the A-valued inner product at x samples its arguments:
/// (s, t - k), k < q, for X(q,a); x - p with p in Z^2 inside `box` for the
/// compactly supported space.
template <class Visit>
void for_each_inner_product_node(const ModuleFrame& fr, const SupportBox* other_box, CPoint x,
                                 Visit&& visit) {
  if (const XqaClass* cls = fr.xqa_class()) {
    for (int k = 0; k < cls->q; ++k) visit(CPoint{x.s, x.t - k});
    return;
  }
  SupportBox box = *fr.xi_box();
  if (other_box) {
    const auto overlap = box_intersection(box, *other_box);
    if (!overlap) return;
    box = *overlap;
  }
  for_each_lattice_point(box, fr.algebra, x, [&](CPoint p) { visit(x - p); });
}

inline void check_compatible(const ModuleFrame& fr, const Fn2& v, const char* who) {
  if (const XqaClass* cls = fr.xqa_class()) {
    const QuasiPeriodic* vq = v.quasi();
    if (!vq || !(*vq == *cls)) {
      throw Error(ErrorCode::IncompatibleElement, std::string(who) + ": element is not in the frame's X(q,a)");
    }
  } else if (!v.support()) {
    throw Error(ErrorCode::IncompatibleElement, std::string(who) + ": element has no support box");
  }
}

/// (<phi_j, v>_A (x))_j for all frame elements.
inline void frame_coefficients(const ModuleFrame& fr, const Fn2& v, CPoint x, std::span<Complex> out) {
  std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
  std::vector<Complex> phi(fr.size());
  for_each_inner_product_node(fr, v.support(), x, [&](CPoint y) {
    const Complex vy = v(y);
    if (vy == Complex{0.0, 0.0}) return;
    fr.evaluate_all(y, phi);
    for (std::size_t j = 0; j < phi.size(); ++j) out[j] += std::conj(phi[j]) * vy;
  });
}

/// Gram matrix G_{jk}(x) = <phi_j, phi_k>_A(x), row-major m x m.
inline void gram_matrix_at(const ModuleFrame& fr, CPoint x, std::span<Complex> out) {
  const std::size_t m = fr.size();
  std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
  std::vector<Complex> phi(m);
  for_each_inner_product_node(fr, nullptr, x, [&](CPoint y) {
    fr.evaluate_all(y, phi);
    for (std::size_t j = 0; j < m; ++j) {
      if (phi[j] == Complex{0.0, 0.0}) continue;
      const Complex cj = std::conj(phi[j]);
      for (std::size_t k = 0; k < m; ++k) out[j * m + k] += cj * phi[k];
    }
  });
}

/// <F, G>(s,t) = sum_{k<q} conj(F(s,t-k)) G(s,t-k).
inline Fn2 xqa_inner_product(const Fn2& F, const Fn2& G) {
  const QuasiPeriodic* cf = F.quasi();
  const QuasiPeriodic* cg = G.quasi();
  if (!cf || !cg || !(*cf == *cg)) {
    throw Error(ErrorCode::ClassMismatch, "xqa_inner_product: arguments must share one class X(q,a)");
  }
  const int q = cf->q;
  return make_periodic(LatticeSpec{1.0, 1.0}, [F, G, q](CPoint x) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < q; ++k) {
      const CPoint y{x.s, x.t - k};
      acc += std::conj(F(y)) * G(y);
    }
    return acc;
  });
}

/// A-valued inner product of the frame's ambient module.
inline Fn2 ambient_inner_product(const ModuleFrame& fr, const Fn2& f, const Fn2& g) {
  if (fr.xqa_class()) return xqa_inner_product(f, g);
  return a_inner_product(f, g, fr.algebra);
}

inline Metadata ambient_metadata(const ModuleFrame& fr) {
  if (const XqaClass* cls = fr.xqa_class()) return *cls;
  return *fr.xi_box();
}

/// sum_j phi_j c_j for coefficient functions c_j in A.
inline Fn2 module_combination(const ModuleFrame& fr, std::vector<Fn2> coeffs) {
  if (coeffs.size() != fr.size()) {
    throw Error(ErrorCode::InvalidArgument, "module_combination: one coefficient per frame element required");
  }
  auto shared = std::make_shared<const std::vector<Fn2>>(std::move(coeffs));
  auto frame = std::make_shared<const ModuleFrame>(fr);
  auto f = [frame, shared](CPoint x) {
    std::vector<Complex> phi(frame->size());
    frame->evaluate_all(x, phi);
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (phi[j] != Complex{0.0, 0.0}) acc += phi[j] * (*shared)[j](x);
    }
    return acc;
  };
  if (const SupportBox* b = fr.xi_box()) return make_compact(*b, std::move(f));
  return Fn2{std::move(f), ambient_metadata(fr)};
}

/// P(xi) = sum_j phi_j <phi_j, xi>_A.
inline Fn2 frame_projection(const ModuleFrame& fr, const Fn2& xi) {
  check_compatible(fr, xi, "frame_projection");
  auto frame = std::make_shared<const ModuleFrame>(fr);
  auto f = [frame, xi](CPoint x) {
    const std::size_t m = frame->size();
    std::vector<Complex> phi(m), c(m);
    frame->evaluate_all(x, phi);
    bool any = false;
    for (const Complex& v : phi) any = any || v != Complex{0.0, 0.0};
    if (!any) return Complex{0.0, 0.0};
    frame_coefficients(*frame, xi, x, c);
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) acc += phi[j] * c[j];
    return acc;
  };
  if (const SupportBox* b = fr.xi_box()) return make_compact(*b, std::move(f));
  return Fn2{std::move(f), ambient_metadata(fr)};
}

// ---------------------------------------------------------------------------
// Random elements.

/// sum_{|m|,|n| <= degree} c_{mn} e(ms + nt) with standard complex normal
/// coefficients scaled by 1/(2 degree + 1).
inline Fn2 random_trig_poly(std::mt19937_64& rng, int degree = 3) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int w = 2 * degree + 1;
  std::vector<Complex> c(static_cast<std::size_t>(w) * w);
  for (Complex& z : c) z = Complex{nd(rng), nd(rng)} / static_cast<double>(w);
  return make_periodic(LatticeSpec{1.0, 1.0}, [c = std::move(c), degree, w](CPoint x) {
    // Separable evaluation via powers of e(s) and e(t).
    const Complex zs = e(x.s), zt = e(x.t);
    std::vector<Complex> ps(w), pt(w);
    ps[degree] = pt[degree] = Complex{1.0, 0.0};
    for (int k = 1; k <= degree; ++k) {
      ps[degree + k] = ps[degree + k - 1] * zs;
      ps[degree - k] = ps[degree - k + 1] * std::conj(zs);
      pt[degree + k] = pt[degree + k - 1] * zt;
      pt[degree - k] = pt[degree - k + 1] * std::conj(zt);
    }
    Complex acc{0.0, 0.0};
    for (int m = 0; m < w; ++m) {
      Complex row{0.0, 0.0};
      for (int n = 0; n < w; ++n) row += c[static_cast<std::size_t>(m) * w + n] * pt[n];
      acc += ps[m] * row;
    }
    return acc;
  });
}

inline Fn2 random_module_element(const ModuleFrame& fr, std::uint64_t seed, int degree = 3) {
  std::mt19937_64 rng(seed);
  std::vector<Fn2> coeffs;
  coeffs.reserve(fr.size());
  for (std::size_t j = 0; j < fr.size(); ++j) coeffs.push_back(random_trig_poly(rng, degree));
  return module_combination(fr, std::move(coeffs));
}

inline Fn2 random_xqa_element(const XqaClass& cls, const ModuleFrame& fr, std::uint64_t seed, int degree = 3) {
  const XqaClass* fc = fr.xqa_class();
  if (!fc || !(*fc == cls)) throw Error(ErrorCode::ClassMismatch, "random_xqa_element: frame is not for this class");
  return random_module_element(fr, seed, degree);
}

// ---------------------------------------------------------------------------
// Explicit frames.

/// Two-element frame of X(1,a) from a dilation-2 low-pass filter:
/// h1 = m0(t) J_{1,a,1/2}, h2 = m0(t + 1/2) J_{1,a,0}. Each phase jumps
/// where its filter factor vanishes, so both elements are continuous.
inline ModuleFrame build_frame_x1a(int a, const Filter1D& m0) {
  if (m0.d != 2 || std::abs(m0.period - 1.0) > 1e-14) {
    throw Error(ErrorCode::FilterInvalid, "build_frame_x1a: filter must be for dilation 2 and period 1");
  }
  const double dev = verify_filter_identity_1d(m0, 4096).max_deviation;
  if (dev > 1e-10 || std::abs(m0(0.0) - 1.0) > 1e-12) {
    throw Error(ErrorCode::FilterInvalid, "build_frame_x1a: filter fails |m(t)|^2 + |m(t+1/2)|^2 = 1 or m(0) = 1");
  }
  const XqaClass cls{1, a};
  const PhaseJ j_half{1, a, 0.5}, j_zero{1, a, 0.0};
  ModuleFrame fr;
  fr.ambient = XqaAmbient{cls};
  fr.label = "X(1,a) filter frame";
  fr.params = {{"a", a}, {"filter_eps", m0.eps}};
  fr.elements.push_back(make_quasi_periodic(cls, [m0, j_half](CPoint x) {
    const Complex v = m0(x.t);
    return v == Complex{0.0, 0.0} ? v : v * eval_phase_J(j_half, x);
  }));
  fr.elements.push_back(make_quasi_periodic(cls, [m0, j_zero](CPoint x) {
    const Complex v = m0(x.t + 0.5);
    return v == Complex{0.0, 0.0} ? v : v * eval_phase_J(j_zero, x);
  }));
  return fr;
}

/// Partition of unity on R/qZ by n bumps of support length < 1 whose squares
/// sum to one.
struct BumpPartition {
  int q = 1;
  int n = 2;
  double spacing = 0.5;
  double ramp = 0.125;  // half-width of each overlap

  BumpPartition(int q_, int n_) : q(q_), n(n_) {
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "BumpPartition: q >= 1 required");
    if (n < q + 1) {
      throw Error(ErrorCode::GeometryError, "BumpPartition: need at least q+1 bumps for supports shorter than 1");
    }
    spacing = static_cast<double>(q) / n;
    ramp = std::min((1.0 - spacing) / 4.0, spacing / 4.0);
  }

  double center(int i) const { return i * spacing; }
  double support_length() const { return spacing + 2.0 * ramp; }

  /// u_i(t): 1 on the plateau, 0 off the support, and on the overlap the
  /// smoothstep pair normalised by sqrt(raw_i^2 + raw_neighbour^2).
  double value(int i, double t) const {
    double tau = t - center(i);
    tau -= q * std::nearbyint(tau / q);
    const double a = std::abs(tau);
    const double inner = 0.5 * spacing - ramp, outer = 0.5 * spacing + ramp;
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    const double v = (a - inner) / (2.0 * ramp);
    const double self = smoothstep(1.0 - v), other = smoothstep(v);
    return self / std::sqrt(self * self + other * other);
  }
};

/// n-element frame of X(q,a): h_i = u_i(t) J_{q,a,c_i + q/2}(s,t). Supports
/// shorter than 1 make u_i(t) u_i(t-k) vanish for 0 < k < q.
inline ModuleFrame build_frame_xqa(const XqaClass& cls, int n_bumps) {
  const BumpPartition bumps(cls.q, n_bumps);
  ModuleFrame fr;
  fr.ambient = XqaAmbient{cls};
  fr.label = "X(q,a) partition frame";
  fr.params = {{"q", cls.q},
               {"a", cls.a},
               {"n_bumps", n_bumps},
               {"spacing", bumps.spacing},
               {"ramp", bumps.ramp},
               {"support_length", bumps.support_length()}};
  for (int i = 0; i < n_bumps; ++i) {
    const PhaseJ phase{cls.q, cls.a, bumps.center(i) + 0.5 * cls.q};
    fr.elements.push_back(make_quasi_periodic(cls, [bumps, phase, i](CPoint x) {
      const double u = bumps.value(i, x.t);
      if (u == 0.0) return Complex{0.0, 0.0};
      return u * eval_phase_J(phase, x);
    }));
  }
  return fr;
}

// ---------------------------------------------------------------------------
// Verification.

struct FrameReport {
  double max_residual = 0.0;      // sup |v - sum phi <phi, v>| / sup |v|
  double max_abs_residual = 0.0;  // sup |v - sum phi <phi, v>|
  int trials = 0;
  int grid_n = 0;
  bool pass = false;
};

inline GridSpec frame_check_grid(const ModuleFrame& fr, int N) {
  if (const XqaClass* cls = fr.xqa_class()) {
    return GridSpec(N, SupportBox{0.0, 1.0, 0.0, static_cast<double>(cls->q)});
  }
  return GridSpec(N, *fr.xi_box());
}

/// Sup of the reconstruction error of a given element v on the frame's
/// check grid; returns {abs residual, sup|v|}.
inline std::pair<double, double> reconstruction_residual(const ModuleFrame& fr, const Fn2& v, int N) {
  const GridSpec grid = frame_check_grid(fr, N);
  const std::size_t m = fr.size();
  std::vector<double> res(grid.size()), mag(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const CPoint x = grid.point(static_cast<int>(k % grid.N), static_cast<int>(k / grid.N));
    std::vector<Complex> phi(m), c(m);
    fr.evaluate_all(x, phi);
    frame_coefficients(fr, v, x, c);
    Complex rec{0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) rec += phi[j] * c[j];
    const Complex vx = v(x);
    res[k] = std::abs(vx - rec);
    mag[k] = std::abs(vx);
  });
  return {*std::max_element(res.begin(), res.end()), *std::max_element(mag.begin(), mag.end())};
}

/// Reconstruction check on `trials` random module elements; random elements
/// are drawn from the module generated by `generators` (defaults to the frame
/// itself).
inline FrameReport verify_module_frame(const ModuleFrame& fr, int trials, double tol, int N = 32,
                                       std::uint64_t seed = 2024, const ModuleFrame* generators = nullptr) {
  FrameReport r;
  r.trials = trials;
  r.grid_n = N;
  const ModuleFrame& gen = generators ? *generators : fr;
  for (int k = 0; k < trials; ++k) {
    const Fn2 v = random_module_element(gen, seed + static_cast<std::uint64_t>(k));
    const auto [abs_res, vmax] = reconstruction_residual(fr, v, N);
    r.max_abs_residual = std::max(r.max_abs_residual, abs_res);
    r.max_residual = std::max(r.max_residual, vmax > 0.0 ? abs_res / vmax : abs_res);
  }
  r.pass = r.max_residual < tol;
  return r;
}

}  // namespace pmra
