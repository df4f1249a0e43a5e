#pragma once

// Projective multiresolution analysis built from sigma: V_0 = R(X(q,a)),
// V_j = D^j V_0, module frames for V_0, V_1 and the wavelet module
// W_0 = V_1 - V_0, projections onto V_j and W_j, and the L2-level checks
// (density, trivial intersection, Parseval sums).

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pmra/core.hpp"
#include "pmra/filters.hpp"
#include "pmra/scaling.hpp"
#include "pmra/xi_space.hpp"
#include "pmra/xqa.hpp"

namespace pmra {

/// b_{jk}(s,t) = delta e(js/d1 + kt/d2), 0 <= j < |d1|, 0 <= k < |d2|, periodic
/// modulo A Z^2; orthonormal for <f,g> = E(conj(f) g).
inline std::vector<Fn2> build_a1_basis(const DilationSpec& spec) {
  std::vector<Fn2> out;
  const double delta = spec.delta();
  const LatticeSpec lat = level_lattice(spec, 1);
  for (int j = 0; j < std::abs(spec.d1); ++j) {
    for (int k = 0; k < std::abs(spec.d2); ++k) {
      const double f1 = static_cast<double>(j) / spec.d1, f2 = static_cast<double>(k) / spec.d2;
      out.push_back(make_periodic(lat, [delta, f1, f2](CPoint x) { return delta * e(f1 * x.s + f2 * x.t); }));
    }
  }
  return out;
}

/// Sup over a grid of one A Z^2 cell of |E(conj(b_i) b_j) - delta_ij|.
inline double a1_orthonormality_deviation(const std::vector<Fn2>& basis, const DilationSpec& spec, int N = 32) {
  double dev = 0.0;
  const GridSpec grid = cell_grid(N, {1.0, 1.0});
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Fn2& bi = basis[i];
      const Fn2& bj = basis[j];
      const Fn2 prod = make_periodic(*bi.period(), [bi, bj](CPoint x) { return std::conj(bi(x)) * bj(x); });
      const Fn2 ex = conditional_expectation(prod, spec, 1);
      const Complex target{i == j ? 1.0 : 0.0, 0.0};
      dev = std::max(dev, sample_grid(ex, grid).max_abs_deviation(target));
    }
  }
  return dev;
}

/// A-module frame for D^j(M), M generated by `fr` (j >= 1): elements
/// D^j(phi_k) e(c1 s / d1^j + c2 t / d2^j) over the coset representatives c
/// of Z^2 / A^j Z^2. The character sum over c is |det A|^j on A^j Z^2 and 0
/// off it, which cancels the delta^{2j} from the two dilated factors.
inline ModuleFrame dilated_frame(const ModuleFrame& fr, const DilationSpec& spec, int j) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "dilated_frame: j >= 1 required");
  const SupportBox* base_box = fr.xi_box();
  if (!base_box) throw Error(ErrorCode::InvalidArgument, "dilated_frame: frame must live in the compact space");
  const long n1 = std::lround(std::pow(std::abs(spec.d1), j));
  const long n2 = std::lround(std::pow(std::abs(spec.d2), j));
  const double f1 = std::pow(static_cast<double>(spec.d1), -j);
  const double f2 = std::pow(static_cast<double>(spec.d2), -j);
  const double amp = std::pow(spec.delta(), j);
  const std::size_t m0 = fr.size();
  const std::size_t m = m0 * static_cast<std::size_t>(n1 * n2);
  auto base = std::make_shared<const ModuleFrame>(fr);

  ModuleFrame out;
  out.ambient = XiAmbient{base_box->scaled(1.0 / f1, 1.0 / f2)};
  out.label = fr.label + " dilated";
  out.params = fr.params;
  out.params.push_back({"level", j});
  // Element index: (k * n1 + c1) * n2 + c2.
  out.batch = [base, amp, f1, f2, n1, n2, m0](CPoint x, std::span<Complex> vals) {
    std::vector<Complex> phi(m0);
    base->evaluate_all({x.s * f1, x.t * f2}, phi);
    bool any = false;
    for (const Complex& v : phi) any = any || v != Complex{0.0, 0.0};
    if (!any) {
      std::fill(vals.begin(), vals.end(), Complex{0.0, 0.0});
      return;
    }
    std::vector<Complex> chi(static_cast<std::size_t>(n1 * n2));
    for (long c1 = 0; c1 < n1; ++c1) {
      for (long c2 = 0; c2 < n2; ++c2) chi[c1 * n2 + c2] = amp * e(c1 * f1 * x.s + c2 * f2 * x.t);
    }
    std::size_t idx = 0;
    for (std::size_t k = 0; k < m0; ++k) {
      for (const Complex& c : chi) vals[idx++] = phi[k] * c;
    }
  };
  const SupportBox box = *out.xi_box();
  for (std::size_t idx = 0; idx < m; ++idx) {
    const std::size_t k = idx / static_cast<std::size_t>(n1 * n2);
    const long c = static_cast<long>(idx % static_cast<std::size_t>(n1 * n2));
    const long c1 = c / n2, c2 = c % n2;
    const Fn2 phi = fr.elements[k];
    out.elements.push_back(make_compact(box, [phi, amp, f1, f2, c1, c2](CPoint x) {
      const Complex v = phi({x.s * f1, x.t * f2});
      return v == Complex{0.0, 0.0} ? v : amp * v * e(c1 * f1 * x.s + c2 * f2 * x.t);
    }));
  }
  return out;
}

struct PMRAOptions {
  ScalingOptions scaling;
  int n_bumps = 0;          // 0: q + 1 (ignored for q = 1, which uses the two-element filter frame)
  double frame_eps = 0.0;   // ramp of the X(1,a) frame filter; 0 selects the default
  int certify_n = 128;
  bool certify = true;
};

struct PMRA {
  std::shared_ptr<const ScalingData> scaling;
  ModuleFrame xqa_frame;
  ModuleFrame v0_frame;
  std::vector<Fn2> a1_basis;
  ModuleFrame v1_frame;
  ModuleFrame w0_frame;
  bool extended = false;  // negative diagonal entries

  const DilationSpec& spec() const { return scaling->spec; }
};

inline ModuleFrame default_xqa_frame(const XqaClass& cls, const PMRAOptions& opt = {}) {
  if (cls.q == 1) {
    const double eps = opt.frame_eps > 0.0 ? opt.frame_eps : default_meyer_eps(2, 1.0);
    return build_frame_x1a(cls.a, build_meyer_filter(2, 1.0, eps));
  }
  return build_frame_xqa(cls, opt.n_bumps > 0 ? opt.n_bumps : cls.q + 1);
}

/// {sigma h_i} for a frame {h_i} of X(q,a).
inline ModuleFrame build_v0_frame(std::shared_ptr<const ScalingData> sd, const ModuleFrame& xqa_frame) {
  const XqaClass* cls = xqa_frame.xqa_class();
  if (!cls || !(*cls == sd->cls)) throw Error(ErrorCode::ClassMismatch, "build_v0_frame: frame class differs from sigma's");
  auto base = std::make_shared<const ModuleFrame>(xqa_frame);
  ModuleFrame out;
  out.ambient = XiAmbient{sd->support};
  out.label = "V0";
  out.params = xqa_frame.params;
  const std::size_t m = xqa_frame.size();
  out.batch = [sd, base, m](CPoint x, std::span<Complex> vals) {
    const Complex s = sd->sigma(x);
    if (s == Complex{0.0, 0.0}) {
      std::fill(vals.begin(), vals.end(), Complex{0.0, 0.0});
      return;
    }
    base->evaluate_all(x, vals.first(m));
    for (std::size_t k = 0; k < m; ++k) vals[k] *= s;
  };
  for (const Fn2& h : xqa_frame.elements) out.elements.push_back(embed_R(*sd, h));
  return out;
}

/// Psi_{i,jk} = delta^{-1} D(sigma h_i) b_{jk} = D(sigma h_i) e(js/d1 + kt/d2).
inline ModuleFrame build_v1_frame(const PMRA& p) {
  ModuleFrame out = dilated_frame(p.v0_frame, p.spec(), 1);
  out.label = "V1";
  return out;
}

/// psi_k = Psi_k - P_{V0} Psi_k.
inline ModuleFrame build_wavelet_frame(const PMRA& p) {
  auto v0 = std::make_shared<const ModuleFrame>(p.v0_frame);
  auto v1 = std::make_shared<const ModuleFrame>(p.v1_frame);
  const SupportBox v0_box = *v0->xi_box();
  const SupportBox box = box_union(v0_box, *v1->xi_box());
  const std::size_t m0 = v0->size(), m1 = v1->size();

  ModuleFrame out;
  out.ambient = XiAmbient{box};
  out.label = "W0";
  out.params = p.v1_frame.params;
  out.batch = [v0, v1, v0_box, m0, m1](CPoint x, std::span<Complex> vals) {
    v1->evaluate_all(x, vals);
    std::vector<Complex> a(m0);
    v0->evaluate_all(x, a);
    bool any = false;
    for (const Complex& v : a) any = any || v != Complex{0.0, 0.0};
    if (!any) return;
    // C_{ik} = <sigma h_i, Psi_k>_A(x), summed over the nodes where sigma h_i lives.
    std::vector<Complex> C(m0 * m1, Complex{0.0, 0.0}), b(m0), psi(m1);
    for_each_lattice_point(v0_box, LatticeSpec{1.0, 1.0}, x, [&](CPoint lp) {
      const CPoint y = x - lp;
      v0->evaluate_all(y, b);
      bool nz = false;
      for (const Complex& v : b) nz = nz || v != Complex{0.0, 0.0};
      if (!nz) return;
      v1->evaluate_all(y, psi);
      for (std::size_t i = 0; i < m0; ++i) {
        const Complex ci = std::conj(b[i]);
        for (std::size_t k = 0; k < m1; ++k) C[i * m1 + k] += ci * psi[k];
      }
    });
    for (std::size_t k = 0; k < m1; ++k) {
      Complex acc{0.0, 0.0};
      for (std::size_t i = 0; i < m0; ++i) acc += a[i] * C[i * m1 + k];
      vals[k] -= acc;
    }
  };
  for (std::size_t k = 0; k < m1; ++k) {
    out.elements.push_back(make_compact(box, [b = out.batch, m1, k](CPoint x) {
      std::vector<Complex> v(m1);
      b(x, v);
      return v[k];
    }));
  }
  return out;
}

inline PMRA build_pmra(const XqaClass& cls, const DilationSpec& spec, const PMRAOptions& opt = {}) {
  PMRA p;
  p.scaling = opt.certify ? build_sigma(cls, spec, opt.scaling, opt.certify_n) : assemble_sigma(cls, spec, opt.scaling);
  p.extended = spec.d1 < 0 || spec.d2 < 0;
  p.xqa_frame = default_xqa_frame(cls, opt);
  p.v0_frame = build_v0_frame(p.scaling, p.xqa_frame);
  p.a1_basis = build_a1_basis(spec);
  p.v1_frame = build_v1_frame(p);
  p.w0_frame = build_wavelet_frame(p);
  return p;
}

// ---------------------------------------------------------------------------
// Projections.

inline Fn2 project_Vj(const PMRA& p, const Fn2& xi, int j) {
  if (j == 0) return frame_projection(p.v0_frame, xi);
  return dilate(frame_projection(p.v0_frame, dilate(xi, p.spec(), -j)), p.spec(), j);
}

inline Fn2 project_Wj(const PMRA& p, const Fn2& xi, int j) {
  if (j == 0) return frame_projection(p.w0_frame, xi);
  return dilate(frame_projection(p.w0_frame, dilate(xi, p.spec(), -j)), p.spec(), j);
}

struct ProjectionNorms {
  double total = 0.0;      // ||eta||^2 through the periodisation
  double projected = 0.0;  // ||P eta||^2 = int sum_k |<phi_k, eta>_A|^2
  double residual = 0.0;   // ||eta - P eta||^2, integrated pointwise
};

/// Norms for a Parseval A-module frame over Z^2 on an N x N midpoint grid of
/// the unit torus. The residual integrand <eta,eta> - sum |c_k|^2 is
/// pointwise nonnegative and vanishes exactly on the module.
inline ProjectionNorms projection_norms(const ModuleFrame& fr, const Fn2& eta, int N, bool with_total = true) {
  const SupportBox& ebox = eta.require_support("projection_norms");
  const GridSpec grid = cell_grid(N, fr.algebra);
  const std::size_t m = fr.size();
  std::vector<double> tot(grid.size()), proj(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const CPoint x = grid.point(static_cast<int>(k % grid.N), static_cast<int>(k / grid.N));
    std::vector<Complex> c(m);
    frame_coefficients(fr, eta, x, c);
    double pr = 0.0;
    for (const Complex& v : c) pr += std::norm(v);
    proj[k] = pr;
    if (with_total) {
      double t = 0.0;
      for_each_lattice_point(ebox, fr.algebra, x, [&](CPoint p) { t += std::norm(eta(x - p)); });
      tot[k] = t;
    }
  });
  ProjectionNorms r;
  double st = 0.0, sp = 0.0, sr = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    st += tot[k];
    sp += proj[k];
    sr += tot[k] - proj[k];
  }
  const double w = fr.algebra.l1 * fr.algebra.l2 / static_cast<double>(grid.size());
  r.total = st * w;
  r.projected = sp * w;
  r.residual = with_total ? std::max(sr * w, 0.0) : 0.0;
  return r;
}

/// ||P_{V_j} xi||^2 = ||P_{V_0} D^{-j} xi||^2.
inline double norm2_Vj(const PMRA& p, const Fn2& xi, int j, int N) {
  return projection_norms(p.v0_frame, dilate(xi, p.spec(), -j), N, false).projected;
}

inline double norm2_Wj(const PMRA& p, const Fn2& xi, int j, int N) {
  return projection_norms(p.w0_frame, dilate(xi, p.spec(), -j), N, false).projected;
}

// ---------------------------------------------------------------------------
// Verification reports.

struct DensityReport {
  std::vector<double> residuals;  // ||xi - P_{V_J} xi||, J = 0..Jmax
  double norm = 0.0;
  double floor = 0.0;  // residuals at or below this count as converged
  bool decreasing = false;
  bool pass = false;

  void require_decreasing() const {
    if (!decreasing) throw Error(ErrorCode::NotDecreasing, "density residuals do not decrease strictly");
  }
};

/// Residuals ||xi - P_{V_J} xi|| for J = 0..Jmax. "Decreasing" means each
/// step decreases strictly until the residual reaches the numerical floor
/// floor_rel * ||xi|| (a compact xi is reproduced exactly once it sits inside
/// the plateau of V_J).
inline DensityReport verify_density(const PMRA& p, const Fn2& xi, int Jmax, int N = 128, double threshold = 0.05,
                                    double floor_rel = 1e-10) {
  DensityReport r;
  for (int J = 0; J <= Jmax; ++J) {
    const ProjectionNorms pn = projection_norms(p.v0_frame, dilate(xi, p.spec(), -J), N);
    if (J == 0) r.norm = std::sqrt(pn.total);
    r.residuals.push_back(std::sqrt(pn.residual));
  }
  r.floor = floor_rel * r.norm;
  r.decreasing = true;
  for (std::size_t J = 0; J + 1 < r.residuals.size(); ++J) {
    const bool converged = r.residuals[J] <= r.floor && r.residuals[J + 1] <= r.floor;
    if (!(r.residuals[J + 1] < r.residuals[J]) && !converged) r.decreasing = false;
  }
  r.pass = r.decreasing && r.residuals.back() <= threshold * r.norm;
  return r;
}

struct IntersectionReport {
  std::vector<double> norms;  // ||P_{V_j} xi||, j = 0, -1, ..., Jmin
  double norm = 0.0;
  bool decreasing = false;
  bool pass = false;
};

inline IntersectionReport verify_intersection(const PMRA& p, const Fn2& xi, int Jmin = -4, int N = 64,
                                              double final_fraction = 0.2, double floor_rel = 1e-10) {
  IntersectionReport r;
  r.norm = std::sqrt(l2_norm_squared_periodized(xi, N));
  for (int j = 0; j >= Jmin; --j) r.norms.push_back(std::sqrt(std::max(norm2_Vj(p, xi, j, N), 0.0)));
  // Same floor rule as verify_density: once xi has left the support of V_0
  // the norms are exactly zero.
  const double floor = floor_rel * r.norm;
  r.decreasing = true;
  for (std::size_t k = 0; k + 1 < r.norms.size(); ++k) {
    const bool converged = r.norms[k] <= floor && r.norms[k + 1] <= floor;
    if (!(r.norms[k + 1] < r.norms[k]) && !converged) r.decreasing = false;
  }
  r.pass = r.decreasing && r.norms.back() <= final_fraction * r.norm;
  return r;
}

struct TightFrameReport {
  double norm2 = 0.0;         // ||xi||^2 through the periodisation
  double norm2_direct = 0.0;  // ||xi||^2 by quadrature on R^2
  double route_integral = 0.0;
  double defect_integral = 0.0;
  std::vector<int> pmax;
  std::vector<double> route_direct;
  std::vector<double> defect_direct;
  bool direct_monotone = false;
};

/// Parseval sums of the tight frame {phi_k e_p} of L2 against ||xi||^2:
/// (i) sum_k int_{T^2} |<phi_k, xi>_A|^2, (ii) sum_k sum_{|p|_inf <= P}
/// |<phi_k e_p, xi>_{L2}|^2 by quadrature on R^2 (M x M grid on the overlap).
inline TightFrameReport verify_tight_frame_l2(const ModuleFrame& fr, const Fn2& xi, std::vector<int> pmax_list,
                                              int N = 64, int M = 256) {
  TightFrameReport r;
  const ProjectionNorms pn = projection_norms(fr, xi, N);
  r.norm2 = pn.total;
  r.route_integral = pn.projected;
  r.norm2_direct = l2_inner_product(xi, xi, M).real();
  const double denom = r.norm2 > 0.0 ? r.norm2 : 1.0;
  r.defect_integral = std::abs(r.route_integral - r.norm2) / denom;

  r.pmax = pmax_list;
  const int P = pmax_list.empty() ? 0 : *std::max_element(pmax_list.begin(), pmax_list.end());
  const auto overlap = box_intersection(*fr.xi_box(), xi.require_support("verify_tight_frame_l2"));
  const std::size_t m = fr.size();
  const int W = 2 * P + 1;
  // coeff[k][(p1+P)*W + p2+P] = <phi_k e_p, xi>_{L2}
  std::vector<Complex> coeff(m * W * W, Complex{0.0, 0.0});
  if (overlap) {
    const GridSpec grid(M, *overlap);
    std::vector<Complex> g(m * grid.size());
    parallel_for(grid.size(), [&](std::size_t idx) {
      const CPoint x = grid.point(static_cast<int>(idx % M), static_cast<int>(idx / M));
      std::vector<Complex> phi(m);
      fr.evaluate_all(x, phi);
      const Complex v = xi(x);
      for (std::size_t k = 0; k < m; ++k) g[k * grid.size() + idx] = std::conj(phi[k]) * v;
    });
    std::vector<Complex> es(static_cast<std::size_t>(W) * M), et(static_cast<std::size_t>(W) * M);
    for (int pi = 0; pi < W; ++pi) {
      for (int i = 0; i < M; ++i) {
        const CPoint x = grid.point(i, i);
        es[pi * M + i] = e(-(pi - P) * x.s);
        et[pi * M + i] = e(-(pi - P) * x.t);
      }
    }
    const double area = grid.hs() * grid.ht();
    parallel_for(m, [&](std::size_t k) {
      // Row transform in s, then in t.
      std::vector<Complex> rows(static_cast<std::size_t>(W) * M);
      for (int j = 0; j < M; ++j) {
        const Complex* gj = &g[k * grid.size() + static_cast<std::size_t>(j) * M];
        for (int pi = 0; pi < W; ++pi) {
          Complex acc{0.0, 0.0};
          for (int i = 0; i < M; ++i) acc += gj[i] * es[pi * M + i];
          rows[pi * M + j] = acc;
        }
      }
      for (int p1 = 0; p1 < W; ++p1) {
        for (int p2 = 0; p2 < W; ++p2) {
          Complex acc{0.0, 0.0};
          for (int j = 0; j < M; ++j) acc += rows[p1 * M + j] * et[p2 * M + j];
          coeff[(k * W + p1) * W + p2] = acc * area;
        }
      }
    });
  }
  for (int Pm : pmax_list) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      for (int p1 = -Pm; p1 <= Pm; ++p1) {
        for (int p2 = -Pm; p2 <= Pm; ++p2) sum += std::norm(coeff[(k * W + p1 + P) * W + p2 + P]);
      }
    }
    r.route_direct.push_back(sum);
    r.defect_direct.push_back(std::abs(sum - r.norm2) / denom);
  }
  r.direct_monotone = true;
  for (std::size_t k = 0; k + 1 < r.defect_direct.size(); ++k) {
    if (r.defect_direct[k + 1] > r.defect_direct[k]) r.direct_monotone = false;
  }
  return r;
}

struct LadderReport {
  double norm2 = 0.0;
  double v0 = 0.0;
  std::vector<double> w;  // ||P_{W_j} xi||^2, j = 0..J-1
  double sum = 0.0;
  double tail = 0.0;  // 1 - sum / ||xi||^2
  bool pass = false;
};

/// ||xi||^2 against ||P_{V0} xi||^2 + sum_{j<levels} ||P_{W_j} xi||^2.
inline LadderReport pythagoras_ladder(const PMRA& p, const Fn2& xi, int levels = 4, int N = 128,
                                      double tol = 0.05) {
  LadderReport r;
  const ProjectionNorms pn = projection_norms(p.v0_frame, xi, N);
  r.norm2 = pn.total;
  r.v0 = pn.projected;
  r.sum = r.v0;
  for (int j = 0; j < levels; ++j) {
    r.w.push_back(norm2_Wj(p, xi, j, N));
    r.sum += r.w.back();
  }
  r.tail = r.norm2 > 0.0 ? 1.0 - r.sum / r.norm2 : 0.0;
  r.pass = std::abs(r.tail) < tol;
  return r;
}

/// Sup over an N x N torus grid of |<a_i, b_k>_A| over all frame pairs.
inline double frame_cross_sup(const ModuleFrame& a, const ModuleFrame& b, int N) {
  const auto overlap = box_intersection(*a.xi_box(), *b.xi_box());
  if (!overlap) return 0.0;
  const GridSpec grid = cell_grid(N, a.algebra);
  std::vector<double> sup(grid.size(), 0.0);
  const std::size_t ma = a.size(), mb = b.size();
  parallel_for(grid.size(), [&](std::size_t idx) {
    const CPoint x = grid.point(static_cast<int>(idx % grid.N), static_cast<int>(idx / grid.N));
    std::vector<Complex> va(ma), vb(mb), acc(ma * mb, Complex{0.0, 0.0});
    for_each_lattice_point(*overlap, a.algebra, x, [&](CPoint lp) {
      const CPoint y = x - lp;
      a.evaluate_all(y, va);
      b.evaluate_all(y, vb);
      for (std::size_t i = 0; i < ma; ++i) {
        const Complex ci = std::conj(va[i]);
        for (std::size_t k = 0; k < mb; ++k) acc[i * mb + k] += ci * vb[k];
      }
    });
    double s = 0.0;
    for (const Complex& v : acc) s = std::max(s, std::abs(v));
    sup[idx] = s;
  });
  return *std::max_element(sup.begin(), sup.end());
}

/// Largest relative reconstruction error of the V0 elements in the V1 frame.
inline double nesting_residual(const PMRA& p, int N = 32) {
  double worst = 0.0;
  for (const Fn2& v : p.v0_frame.elements) {
    const auto [res, mag] = reconstruction_residual(p.v1_frame, v, N);
    worst = std::max(worst, mag > 0.0 ? res / mag : res);
  }
  return worst;
}

/// Three compactly supported test functions: a centred unit bump, an
/// off-centre modulated bump, and a wide bump that is not reproduced
/// exactly at level 3.
inline std::vector<Fn2> standard_test_bumps() {
  return {smooth_bump(BumpSpec{{0.0, 0.0}, 1.0, 1.0, {1.0, 0.0}, {0.0, 0.0}}),
          smooth_bump(BumpSpec{{0.3, -0.2}, 1.5, 1.2, {0.6, 0.8}, {0.25, -0.5}}),
          smooth_bump(BumpSpec{{0.0, 0.0}, 4.0, 3.0, {1.0, 0.0}, {0.0, 0.125}})};
}

/// v - P_{V0} v for a random element v of V1.
inline Fn2 random_w0_element(const PMRA& p, std::uint64_t seed) {
  const Fn2 v = random_module_element(p.v1_frame, seed);
  const Fn2 pv = frame_projection(p.v0_frame, v);
  return make_compact(*p.w0_frame.xi_box(), [v, pv](CPoint x) { return v(x) - pv(x); });
}

}  // namespace pmra
