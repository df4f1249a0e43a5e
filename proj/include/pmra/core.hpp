#pragma once

// Numeric substrate: points, lattices, support boxes, lazily evaluated
// functions on R^2, uniform grids, exact lattice sums and midpoint quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace pmra {

using Complex = std::complex<double>;

enum class ErrorCode {
  MissingSupport,
  NonFinite,
  BoxMismatch,
  PeriodicityMismatch,
  BadRamp,
  PeriodMismatch,
  ClassMismatch,
  FilterInvalid,
  GeometryError,
  IncompatibleElement,
  NoPlateau,
  ConditionFailed,
  FrameInvalid,
  NotDecreasing,
  RankDeficientLink,
  EigGapTooSmall,
  NonIntegerRank,
  ClassificationMismatch,
  InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingSupport: return "MissingSupport";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BoxMismatch: return "BoxMismatch";
    case ErrorCode::PeriodicityMismatch: return "PeriodicityMismatch";
    case ErrorCode::BadRamp: return "BadRamp";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::ClassMismatch: return "ClassMismatch";
    case ErrorCode::FilterInvalid: return "FilterInvalid";
    case ErrorCode::GeometryError: return "GeometryError";
    case ErrorCode::IncompatibleElement: return "IncompatibleElement";
    case ErrorCode::NoPlateau: return "NoPlateau";
    case ErrorCode::ConditionFailed: return "ConditionFailed";
    case ErrorCode::FrameInvalid: return "FrameInvalid";
    case ErrorCode::NotDecreasing: return "NotDecreasing";
    case ErrorCode::RankDeficientLink: return "RankDeficientLink";
    case ErrorCode::EigGapTooSmall: return "EigGapTooSmall";
    case ErrorCode::NonIntegerRank: return "NonIntegerRank";
    case ErrorCode::ClassificationMismatch: return "ClassificationMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// e(x) = exp(2 pi i x). The argument is reduced mod 1 first so that large
/// integer parts do not cost accuracy in the phase.
inline Complex e(double x) {
  const double frac = x - std::nearbyint(x);
  const double ang = 2.0 * std::numbers::pi * frac;
  return {std::cos(ang), std::sin(ang)};
}

struct CPoint {
  double s = 0.0;
  double t = 0.0;
};

inline CPoint operator+(CPoint a, CPoint b) { return {a.s + b.s, a.t + b.t}; }
inline CPoint operator-(CPoint a, CPoint b) { return {a.s - b.s, a.t - b.t}; }

/// Rectangular lattice l1 Z x l2 Z.
struct LatticeSpec {
  double l1 = 1.0;
  double l2 = 1.0;

  LatticeSpec() = default;
  LatticeSpec(double a, double b) : l1(a), l2(b) {
    if (!(l1 > 0.0) || !(l2 > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "lattice generators must be positive");
    }
  }
  bool same_as(const LatticeSpec& o, double tol = 1e-12) const {
    return std::abs(l1 - o.l1) <= tol * std::max(1.0, l1) &&
           std::abs(l2 - o.l2) <= tol * std::max(1.0, l2);
  }
};

/// Closed axis-aligned box.
struct SupportBox {
  double smin = 0.0, smax = 0.0, tmin = 0.0, tmax = 0.0;

  SupportBox() = default;
  SupportBox(double s0, double s1, double t0, double t1) : smin(s0), smax(s1), tmin(t0), tmax(t1) {
    if (!(smin <= smax) || !(tmin <= tmax)) {
      throw Error(ErrorCode::InvalidArgument, "support box must satisfy min <= max");
    }
  }

  bool contains(CPoint x) const {
    return x.s >= smin && x.s <= smax && x.t >= tmin && x.t <= tmax;
  }
  double width() const { return smax - smin; }
  double height() const { return tmax - tmin; }
  SupportBox scaled(double a, double b) const {
    const double s0 = smin * a, s1 = smax * a, t0 = tmin * b, t1 = tmax * b;
    return {std::min(s0, s1), std::max(s0, s1), std::min(t0, t1), std::max(t0, t1)};
  }
  SupportBox shifted(CPoint p) const { return {smin + p.s, smax + p.s, tmin + p.t, tmax + p.t}; }
};

inline SupportBox box_union(const SupportBox& a, const SupportBox& b) {
  return {std::min(a.smin, b.smin), std::max(a.smax, b.smax), std::min(a.tmin, b.tmin),
          std::max(a.tmax, b.tmax)};
}

inline std::optional<SupportBox> box_intersection(const SupportBox& a, const SupportBox& b) {
  const double s0 = std::max(a.smin, b.smin), s1 = std::min(a.smax, b.smax);
  const double t0 = std::max(a.tmin, b.tmin), t1 = std::min(a.tmax, b.tmax);
  if (s0 > s1 || t0 > t1) return std::nullopt;
  return SupportBox{s0, s1, t0, t1};
}

/// Quasi-periodicity class (q, a): F(s+1,t) = F(s,t), F(s,t-q) = e(as) F(s,t).
struct QuasiPeriodic {
  int q = 1;
  int a = 0;
  friend bool operator==(const QuasiPeriodic&, const QuasiPeriodic&) = default;
};

struct Unrestricted {};

using Metadata = std::variant<SupportBox, LatticeSpec, QuasiPeriodic, Unrestricted>;

/// A deterministic function R^2 -> C together with a declaration of its
/// support or periodicity structure.
struct Fn2 {
  std::function<Complex(CPoint)> eval;
  Metadata meta = Unrestricted{};

  Complex operator()(CPoint x) const { return eval(x); }

  const SupportBox* support() const { return std::get_if<SupportBox>(&meta); }
  const LatticeSpec* period() const { return std::get_if<LatticeSpec>(&meta); }
  const QuasiPeriodic* quasi() const { return std::get_if<QuasiPeriodic>(&meta); }

  const SupportBox& require_support(const char* who) const {
    const SupportBox* b = support();
    if (!b) throw Error(ErrorCode::MissingSupport, std::string(who) + ": function has no support box");
    return *b;
  }
};

/// Wraps an evaluator so that it is exactly zero outside the closed box.
template <class F>
Fn2 make_compact(SupportBox box, F&& f) {
  return Fn2{[box, g = std::forward<F>(f)](CPoint x) -> Complex {
               if (!box.contains(x)) return {0.0, 0.0};
               return g(x);
             },
             box};
}

template <class F>
Fn2 make_periodic(LatticeSpec lat, F&& f) {
  return Fn2{std::forward<F>(f), lat};
}

template <class F>
Fn2 make_quasi_periodic(QuasiPeriodic cls, F&& f) {
  return Fn2{std::forward<F>(f), cls};
}

inline Fn2 constant_fn(Complex c) {
  return Fn2{[c](CPoint) { return c; }, Unrestricted{}};
}

inline void check_finite(Complex v, const char* who) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw Error(ErrorCode::NonFinite, std::string(who) + ": evaluator returned a non-finite value");
  }
}

// ---------------------------------------------------------------------------
// Lattice sums with exact truncation.

/// Index range {k : lo <= x - k*l <= hi}. A relative slack of a few ulps keeps
/// points that sit on the closed boundary.
inline std::pair<long, long> lattice_index_range(double x, double l, double lo, double hi) {
  const double slack = 4e-15 * std::max({1.0, std::abs(x), std::abs(lo), std::abs(hi)});
  const long kmin = static_cast<long>(std::ceil((x - hi - slack) / l));
  const long kmax = static_cast<long>(std::floor((x - lo + slack) / l));
  return {kmin, kmax};
}

/// Calls visit(p) for every lattice vector p in lat with x - p in box.
template <class Visit>
void for_each_lattice_point(const SupportBox& box, const LatticeSpec& lat, CPoint x, Visit&& visit) {
  const auto [k1lo, k1hi] = lattice_index_range(x.s, lat.l1, box.smin, box.smax);
  const auto [k2lo, k2hi] = lattice_index_range(x.t, lat.l2, box.tmin, box.tmax);
  for (long k1 = k1lo; k1 <= k1hi; ++k1) {
    for (long k2 = k2lo; k2 <= k2hi; ++k2) {
      visit(CPoint{static_cast<double>(k1) * lat.l1, static_cast<double>(k2) * lat.l2});
    }
  }
}

/// Sum over p in lat of combiner(f(x - p)); only the finitely many p with
/// x - p inside f's support box contribute.
template <class Combiner>
Complex lattice_sum(const Fn2& f, const LatticeSpec& lat, CPoint x, Combiner&& combiner) {
  const SupportBox& box = f.require_support("lattice_sum");
  Complex acc{0.0, 0.0};
  for_each_lattice_point(box, lat, x, [&](CPoint p) {
    const Complex v = f(x - p);
    check_finite(v, "lattice_sum");
    acc += combiner(v);
  });
  return acc;
}

inline Complex lattice_sum(const Fn2& f, const LatticeSpec& lat, CPoint x) {
  return lattice_sum(f, lat, x, [](Complex v) { return v; });
}

// ---------------------------------------------------------------------------
// Worker pool for grid sweeps. Each index writes its own slot, so the result
// does not depend on how indices are partitioned.

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PMRA_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = 0) {
  if (workers == 0) workers = worker_count();
  if (workers <= 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Grids and sampled fields.

enum class GridOffset { Midpoint, Vertex };

struct GridSpec {
  int N = 2;
  SupportBox box{0.0, 1.0, 0.0, 1.0};
  GridOffset offset = GridOffset::Midpoint;

  GridSpec() = default;
  GridSpec(int n, SupportBox b, GridOffset o = GridOffset::Midpoint) : N(n), box(b), offset(o) {
    if (N < 2) throw Error(ErrorCode::InvalidArgument, "grid needs N >= 2");
  }

  double hs() const { return box.width() / N; }
  double ht() const { return box.height() / N; }
  /// i indexes s, j indexes t.
  CPoint point(int i, int j) const {
    const double shift = offset == GridOffset::Midpoint ? 0.5 : 0.0;
    return {box.smin + (i + shift) * hs(), box.tmin + (j + shift) * ht()};
  }
  std::size_t size() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }
};

/// Grid over one cell [0,l1) x [0,l2) of a lattice.
inline GridSpec cell_grid(int N, const LatticeSpec& lat, GridOffset o = GridOffset::Midpoint) {
  return GridSpec(N, SupportBox{0.0, lat.l1, 0.0, lat.l2}, o);
}

/// Scalar field on a grid, stored in rows of constant t: index j*N + i.
struct SampledField {
  GridSpec grid;
  std::vector<Complex> values;

  Complex& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.N + i]; }
  Complex at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.N + i]; }

  double max_abs_deviation(Complex target) const {
    double m = 0.0;
    for (const Complex& v : values) m = std::max(m, std::abs(v - target));
    return m;
  }
};

/// m x m matrix per grid point; entry (r, c) at point k is values[(k*m + r)*m + c].
struct MatrixField {
  GridSpec grid;
  int m = 0;
  std::vector<Complex> values;

  Complex* at(int i, int j) {
    return values.data() + (static_cast<std::size_t>(j) * grid.N + i) * m * m;
  }
  const Complex* at(int i, int j) const {
    return values.data() + (static_cast<std::size_t>(j) * grid.N + i) * m * m;
  }
};

template <class F>
SampledField sample_grid(F&& f, const GridSpec& grid, unsigned workers = 0) {
  SampledField out{grid, std::vector<Complex>(grid.size())};
  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        const int i = static_cast<int>(k % grid.N), j = static_cast<int>(k / grid.N);
        const Complex v = f(grid.point(i, j));
        check_finite(v, "sample_grid");
        out.values[k] = v;
      },
      workers);
  return out;
}

/// Midpoint-rule integral over one fundamental cell of lat, normalised so the
/// constant 1 integrates to the cell area.
inline Complex torus_integral(const SampledField& g, const LatticeSpec& lat) {
  const GridSpec& gr = g.grid;
  const double tol = 1e-12;
  if (gr.offset != GridOffset::Midpoint || std::abs(gr.box.width() - lat.l1) > tol * lat.l1 ||
      std::abs(gr.box.height() - lat.l2) > tol * lat.l2) {
    throw Error(ErrorCode::BoxMismatch, "torus_integral: grid is not a midpoint grid on one lattice cell");
  }
  Complex acc{0.0, 0.0};
  for (const Complex& v : g.values) acc += v;
  return acc * (lat.l1 * lat.l2 / static_cast<double>(gr.size()));
}

/// Midpoint-rule integral of f over a box with N points per axis.
template <class F>
Complex integrate_box(F&& f, const SupportBox& box, int N, unsigned workers = 0) {
  if (box.width() == 0.0 || box.height() == 0.0) return {0.0, 0.0};
  const SampledField g = sample_grid(std::forward<F>(f), GridSpec(N, box), workers);
  Complex acc{0.0, 0.0};
  for (const Complex& v : g.values) acc += v;
  return acc * (g.grid.hs() * g.grid.ht());
}

/// Midpoint approximation of the L2 inner product (conjugate-linear in xi).
/// Integrates over the intersection of the supports, where the integrand lives.
inline Complex l2_inner_product(const Fn2& xi, const Fn2& eta, int N) {
  const SupportBox& a = xi.require_support("l2_inner_product");
  const SupportBox& b = eta.require_support("l2_inner_product");
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "l2_inner_product: N >= 2 required");
  const auto box = box_intersection(a, b);
  if (!box) return {0.0, 0.0};
  return integrate_box([&](CPoint x) { return std::conj(xi(x)) * eta(x); }, *box, N);
}

/// Sup over grid points of |f(x) - g(x)|.
template <class F, class G>
double sup_abs_difference(F&& f, G&& g, const GridSpec& grid) {
  const SampledField d = sample_grid([&](CPoint x) { return f(x) - g(x); }, grid);
  return d.max_abs_deviation({0.0, 0.0});
}

// ---------------------------------------------------------------------------
// CSV export.

inline void write_csv(std::ostream& os, const SampledField& f) {
  char buf[160];
  os << "s,t,re,im\n";
  for (int j = 0; j < f.grid.N; ++j) {
    for (int i = 0; i < f.grid.N; ++i) {
      const CPoint x = f.grid.point(i, j);
      const Complex v = f.at(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x.s, x.t, v.real(), v.imag());
      os << buf;
    }
  }
}

inline void write_csv(std::ostream& os, const MatrixField& f) {
  char buf[200];
  os << "s,t,i,j,re,im\n";
  for (int j = 0; j < f.grid.N; ++j) {
    for (int i = 0; i < f.grid.N; ++i) {
      const CPoint x = f.grid.point(i, j);
      const Complex* mat = f.at(i, j);
      for (int r = 0; r < f.m; ++r) {
        for (int c = 0; c < f.m; ++c) {
          const Complex v = mat[r * f.m + c];
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g,%.17g\n", x.s, x.t, r, c, v.real(),
                        v.imag());
          os << buf;
        }
      }
    }
  }
}

}  // namespace pmra
