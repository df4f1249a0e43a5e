#pragma once

// Classification of frame-generated modules over C(T^2) by (rank, twist):
// the Gram projection field of a module frame, its rank, and its first
// Chern number from link variables on a periodic vertex grid.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pmra/core.hpp"
#include "pmra/filters.hpp"
#include "pmra/pmra.hpp"
#include "pmra/xqa.hpp"

namespace pmra {

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

struct KClass {
  int dim = 1;
  int twist = 0;
  bool operator==(const KClass&) const = default;
};

inline KClass operator+(KClass a, KClass b) { return {a.dim + b.dim, a.twist + b.twist}; }

inline std::string to_string(const KClass& k) {
  return "(" + std::to_string(k.dim) + "," + std::to_string(k.twist) + ")";
}

struct GramField {
  MatrixField field;  // vertex grid on [0,1)^2
  double hermiticity = 0.0;
  double idempotency = 0.0;
  double trace_min = 0.0;
  double trace_max = 0.0;
  double trace_mean = 0.0;

  int N() const { return field.grid.N; }
  int m() const { return field.m; }
  double trace_spread() const { return trace_max - trace_min; }

  CMatrix matrix(int i, int j) const {
    const int n = field.m;
    CMatrix G(n, n);
    const Complex* p = field.at(i, j);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) G(r, c) = p[r * n + c];
    }
    return G;
  }
};

inline void update_gram_stats(GramField& g) {
  const int N = g.N(), n = g.m();
  g.hermiticity = g.idempotency = 0.0;
  g.trace_min = std::numeric_limits<double>::infinity();
  g.trace_max = -g.trace_min;
  double tsum = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const CMatrix G = g.matrix(i, j);
      g.hermiticity = std::max(g.hermiticity, (G - G.adjoint()).cwiseAbs().maxCoeff());
      g.idempotency = std::max(g.idempotency, n > 0 ? (G * G - G).cwiseAbs().maxCoeff() : 0.0);
      const double tr = G.trace().real();
      g.trace_min = std::min(g.trace_min, tr);
      g.trace_max = std::max(g.trace_max, tr);
      tsum += tr;
    }
  }
  g.trace_mean = tsum / (static_cast<double>(N) * N);
}

/// Samples G_{jk}(x) = <phi_j, phi_k>_A(x) on an N x N vertex grid of the
/// unit torus. No invariants are enforced here; see certify_gram_field.
inline GramField sample_gram_field(const ModuleFrame& fr, int N) {
  GramField g;
  const int m = static_cast<int>(fr.size());
  g.field.grid = cell_grid(N, {1.0, 1.0}, GridOffset::Vertex);
  g.field.m = m;
  g.field.values.assign(g.field.grid.size() * m * m, Complex{0.0, 0.0});
  parallel_for(g.field.grid.size(), [&](std::size_t k) {
    const CPoint x = g.field.grid.point(static_cast<int>(k % N), static_cast<int>(k / N));
    gram_matrix_at(fr, x, std::span<Complex>(g.field.values.data() + k * m * m, static_cast<std::size_t>(m) * m));
  });
  update_gram_stats(g);
  return g;
}

struct GramTolerances {
  double hermiticity = 1e-12;
  double idempotency = 1e-8;
  double trace_spread = 1e-6;
};

inline void certify_gram_field(const GramField& g, const GramTolerances& tol = {}) {
  if (!(g.hermiticity < tol.hermiticity) || !(g.idempotency < tol.idempotency) ||
      !(g.trace_spread() < tol.trace_spread)) {
    throw Error(ErrorCode::FrameInvalid, "Gram field is not a projection field: hermiticity " +
                                             std::to_string(g.hermiticity) + ", idempotency " +
                                             std::to_string(g.idempotency) + ", trace spread " +
                                             std::to_string(g.trace_spread()));
  }
}

inline GramField compute_gram_field(const ModuleFrame& fr, int N, const GramTolerances& tol = {}) {
  GramField g = sample_gram_field(fr, N);
  certify_gram_field(g, tol);
  return g;
}

/// Gram field of the direct sum of two frames (block diagonal).
inline GramField direct_sum(const GramField& a, const GramField& b) {
  if (a.N() != b.N()) throw Error(ErrorCode::InvalidArgument, "direct_sum: grids differ");
  GramField g;
  const int ma = a.m(), mb = b.m(), m = ma + mb, N = a.N();
  g.field.grid = a.field.grid;
  g.field.m = m;
  g.field.values.assign(g.field.grid.size() * m * m, Complex{0.0, 0.0});
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      Complex* dst = g.field.at(i, j);
      const Complex* pa = a.field.at(i, j);
      const Complex* pb = b.field.at(i, j);
      for (int r = 0; r < ma; ++r) {
        for (int c = 0; c < ma; ++c) dst[r * m + c] = pa[r * ma + c];
      }
      for (int r = 0; r < mb; ++r) {
        for (int c = 0; c < mb; ++c) dst[(ma + r) * m + ma + c] = pb[r * mb + c];
      }
    }
  }
  update_gram_stats(g);
  return g;
}

struct ChernReport {
  int chern = 0;
  double raw = 0.0;       // plaquette sum / 2 pi before rounding
  double distance = 0.0;  // |raw - chern|
  int rank = 0;
  double min_gap = 0.0;      // smallest eigenvalue gap across 1/2
  double min_link_sv = 0.0;  // smallest singular value over all link overlaps
  std::vector<double> plaquettes;  // Berry flux per plaquette, index j*N + i
};

/// Lattice Chern number of the range bundle of a projection field: eigenvectors
/// with eigenvalue > 1/2 span the fibre, U_mu(k) = det(V(k)^* V(k + mu)) /
/// |.|, and c1 = (1/2pi) sum_k Arg(U_s(k) U_t(k+s) / (U_s(k+t) U_t(k))).
/// swap_orientation exchanges the roles of s and t.
inline ChernReport chern_number_fhs(const GramField& g, bool swap_orientation = false, double min_gap = 0.2,
                                    double min_sv = 0.1) {
  const int N = g.N(), m = g.m();
  ChernReport rep;
  std::vector<CMatrix> frames(static_cast<std::size_t>(N) * N);
  std::vector<int> ranks(frames.size());
  std::vector<double> gaps(frames.size());
  parallel_for(frames.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % N), j = static_cast<int>(k / N);
    const CMatrix G = g.matrix(i, j);
    const CMatrix H = 0.5 * (G + G.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    const auto& ev = es.eigenvalues();
    double below = -std::numeric_limits<double>::infinity(), above = std::numeric_limits<double>::infinity();
    int r = 0;
    for (int c = 0; c < m; ++c) {
      if (ev(c) > 0.5) {
        ++r;
        above = std::min(above, ev(c));
      } else {
        below = std::max(below, ev(c));
      }
    }
    gaps[k] = (r == 0 || r == m) ? (r == 0 ? 0.5 - below : above - 0.5) * 2.0 : above - below;
    ranks[k] = r;
    frames[k] = es.eigenvectors().rightCols(r);
  });
  rep.rank = ranks[0];
  rep.min_gap = *std::min_element(gaps.begin(), gaps.end());
  for (int r : ranks) {
    if (r != rep.rank) throw Error(ErrorCode::NonIntegerRank, "chern_number_fhs: rank varies over the torus");
  }
  if (rep.min_gap < min_gap) {
    throw Error(ErrorCode::EigGapTooSmall, "chern_number_fhs: eigenvalue gap " + std::to_string(rep.min_gap) +
                                               " below " + std::to_string(min_gap));
  }
  if (rep.rank == 0) return rep;

  auto idx = [N](int i, int j) { return static_cast<std::size_t>(((j % N) + N) % N) * N + ((i % N) + N) % N; };
  // links[0]: step in the first direction, links[1]: second direction.
  std::vector<Complex> links[2] = {std::vector<Complex>(frames.size()), std::vector<Complex>(frames.size())};
  std::vector<double> svs(frames.size() * 2);
  parallel_for(frames.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % N), j = static_cast<int>(k / N);
    for (int mu = 0; mu < 2; ++mu) {
      const bool step_s = (mu == 0) != swap_orientation;
      const std::size_t nb = step_s ? idx(i + 1, j) : idx(i, j + 1);
      const CMatrix O = frames[k].adjoint() * frames[nb];
      Eigen::JacobiSVD<CMatrix> svd(O);
      svs[2 * k + mu] = svd.singularValues().minCoeff();
      const Complex d = O.determinant();
      links[mu][k] = d / std::abs(d);
    }
  });
  rep.min_link_sv = *std::min_element(svs.begin(), svs.end());
  if (rep.min_link_sv < min_sv) {
    throw Error(ErrorCode::RankDeficientLink, "chern_number_fhs: link overlap singular value " +
                                                  std::to_string(rep.min_link_sv) + " (grid too coarse)");
  }
  rep.plaquettes.assign(frames.size(), 0.0);
  double total = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const std::size_t k = idx(i, j);
      std::size_t k1, k2;
      if (!swap_orientation) {
        k1 = idx(i + 1, j);
        k2 = idx(i, j + 1);
      } else {
        k1 = idx(i, j + 1);
        k2 = idx(i + 1, j);
      }
      const Complex w = links[0][k] * links[1][k1] * std::conj(links[0][k2]) * std::conj(links[1][k]);
      const double f = std::arg(w);
      rep.plaquettes[k] = f;
      total += f;
    }
  }
  rep.raw = total / (2.0 * std::numbers::pi);
  rep.chern = static_cast<int>(std::lround(rep.raw));
  rep.distance = std::abs(rep.raw - rep.chern);
  return rep;
}

/// Orientation constant kappa with a = kappa c1, fixed by X(1,1).
inline int calibrate_sign(const Filter1D& m0, int N = 32) {
  const GramField g = compute_gram_field(build_frame_x1a(1, m0), N);
  const ChernReport c = chern_number_fhs(g);
  if (std::abs(c.chern) != 1) {
    throw Error(ErrorCode::ClassificationMismatch, "calibrate_sign: X(1,1) gave Chern number " + std::to_string(c.chern));
  }
  return c.chern;
}

inline int calibrate_sign() { return calibrate_sign(build_meyer_filter(2, 1.0)); }

struct Classification {
  KClass kclass;
  ChernReport chern;
  double trace_mean = 0.0;
  double hermiticity = 0.0;
  double idempotency = 0.0;
  double trace_spread = 0.0;
  int N = 0;
  int kappa = 1;
};

inline Classification classify_gram(const GramField& g, int kappa) {
  Classification c;
  c.N = g.N();
  c.kappa = kappa;
  c.trace_mean = g.trace_mean;
  c.hermiticity = g.hermiticity;
  c.idempotency = g.idempotency;
  c.trace_spread = g.trace_spread();
  const long dim = std::lround(g.trace_mean);
  if (std::abs(g.trace_mean - static_cast<double>(dim)) > 1e-3 || dim < 1) {
    throw Error(ErrorCode::NonIntegerRank, "classify: mean Gram trace " + std::to_string(g.trace_mean) +
                                               " is not a positive integer");
  }
  c.chern = chern_number_fhs(g);
  if (c.chern.rank != dim) throw Error(ErrorCode::NonIntegerRank, "classify: eigen-rank differs from the trace");
  c.kclass = KClass{static_cast<int>(dim), kappa * c.chern.chern};
  return c;
}

inline Classification classify(const ModuleFrame& fr, int N, int kappa, const GramTolerances& tol = {}) {
  return classify_gram(compute_gram_field(fr, N, tol), kappa);
}

struct ClassCheck {
  std::string name;
  KClass expected;
  KClass computed;
  Classification detail;
  bool pass = false;
  std::string error;  // non-empty if the integrator failed
};

struct ClassReport {
  int kappa = 1;
  int N = 0;
  bool extended = false;
  std::vector<ClassCheck> checks;  // v0, v1, w0
  bool pass = false;
};

/// Expected classes: V0 ~ X(q,a), V1 ~ X(|det|q, sign a), W0 ~ X((|det|-1)q, (sign-1)a).
inline std::vector<std::pair<std::string, KClass>> expected_classes(const XqaClass& cls, const DilationSpec& spec) {
  const int ad = spec.abs_det(), sg = spec.sign();
  return {{"v0", {cls.q, cls.a}}, {"v1", {ad * cls.q, sg * cls.a}}, {"w0", {(ad - 1) * cls.q, (sg - 1) * cls.a}}};
}

inline ClassReport verify_module_classes(const PMRA& p, int N, int kappa, const GramTolerances& tol = {}) {
  ClassReport r;
  r.kappa = kappa;
  r.N = N;
  r.extended = p.extended;
  const auto expected = expected_classes(p.scaling->cls, p.spec());
  const ModuleFrame* frames[3] = {&p.v0_frame, &p.v1_frame, &p.w0_frame};
  r.pass = true;
  for (int k = 0; k < 3; ++k) {
    ClassCheck c;
    c.name = expected[k].first;
    c.expected = expected[k].second;
    try {
      c.detail = classify(*frames[k], N, kappa, tol);
      c.computed = c.detail.kclass;
      c.pass = c.computed == c.expected;
    } catch (const Error& e) {
      c.error = e.what();
      c.pass = false;
    }
    r.pass = r.pass && c.pass;
    r.checks.push_back(std::move(c));
  }
  return r;
}

}  // namespace pmra
