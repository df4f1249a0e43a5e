#pragma once

// Run configuration, the tagged verification suite, JSON artifacts and the
// command implementations behind the pmra_cli tool.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmra/core.hpp"
#include "pmra/filters.hpp"
#include "pmra/ktheory.hpp"
#include "pmra/pmra.hpp"
#include "pmra/scaling.hpp"
#include "pmra/xqa.hpp"

namespace pmra {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kJBoundaryConvention =
    "half-open strips [beta + n q, beta + (n+1) q); J is right-continuous in t on its jump lines";

enum ExitCode { kExitPass = 0, kExitConfig = 1, kExitCondition = 2, kExitClassifier = 3 };

struct Config {
  int d1 = 2, d2 = 2, q = 1, a = 1;
  int N = 512;  // certification and export grid
  std::map<std::string, double> tolerances;  // per-tag overrides
  double eps1 = 0.0, eps2 = 0.0, frame_eps = 0.0;  // 0: defaults
  int n_bumps = 0;                                // 0: q + 1
  int jmax = 3, jmin = -4;
  std::uint64_t seed = 2024;
  std::string output_dir = ".";
  int frame_n = 32;
  int frame_trials = 20;
  int density_n = 128;
  int gram_n = 32;

  void validate() const {
    (void)DilationSpec(d1, d2);
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "q >= 1 required");
    if (N < 32) throw Error(ErrorCode::InvalidArgument, "N >= 32 required");
    if (jmax < 0 || jmin > 0) throw Error(ErrorCode::InvalidArgument, "jmax >= 0 and jmin <= 0 required");
    if (frame_n < 4 || density_n < 8 || gram_n < 8 || frame_trials < 1) {
      throw Error(ErrorCode::InvalidArgument, "check grids too small");
    }
  }

  DilationSpec spec() const { return DilationSpec(d1, d2); }
  XqaClass cls() const { return XqaClass{q, a}; }

  PMRAOptions pmra_options(double sigma_scale = 1.0) const {
    PMRAOptions o;
    o.scaling.eps1 = eps1;
    o.scaling.eps2 = eps2;
    o.scaling.sigma_scale = sigma_scale;
    o.n_bumps = n_bumps;
    o.frame_eps = frame_eps;
    o.certify = false;
    return o;
  }
};

inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"thm5.1-cond1", 1e-8},         {"thm5.1-cond2", 1e-9},          {"prop5.2-filter", 1e-12},
      {"prop5.3-unimodular", 1e-12},  {"prop5.3-cocycle", 1e-10},      {"thm5.1-isometry", 1e-8},
      {"thm5.1-inclusion", 1e-9},     {"def2.2-frame-xqa", 1e-8},      {"def2.2-frame-v0", 1e-8},
      {"def2.2-frame-v1", 1e-8},      {"def2.2-frame-w0", 1e-7},       {"prop3.6-a1-basis", 1e-12},
      {"def3.1-nesting", 1e-8},       {"thm3.8-orthogonality", 1e-8},  {"prop2.7-parseval", 1e-6},
      {"prop3.4-density", 0.05},      {"prop3.2-intersection", 0.2},   {"thm3.9-ladder", 0.05}};
  return t;
}

inline double tolerance(const Config& c, const std::string& tag) {
  if (auto it = c.tolerances.find(tag); it != c.tolerances.end()) return it->second;
  return default_tolerances().at(tag);
}

inline void to_json(ojson& j, const Config& c) {
  j = ojson{{"d1", c.d1},
            {"d2", c.d2},
            {"q", c.q},
            {"a", c.a},
            {"N", c.N},
            {"tolerances", c.tolerances},
            {"eps1", c.eps1},
            {"eps2", c.eps2},
            {"frame_eps", c.frame_eps},
            {"n_bumps", c.n_bumps},
            {"jmax", c.jmax},
            {"jmin", c.jmin},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"frame_n", c.frame_n},
            {"frame_trials", c.frame_trials},
            {"density_n", c.density_n},
            {"gram_n", c.gram_n}};
}

/// Fills fields present in j; absent keys keep their current values.
inline void update_from_json(Config& c, const ojson& j) {
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
  };
  get("d1", c.d1);
  get("d2", c.d2);
  get("q", c.q);
  get("a", c.a);
  get("N", c.N);
  get("tolerances", c.tolerances);
  get("eps1", c.eps1);
  get("eps2", c.eps2);
  get("frame_eps", c.frame_eps);
  get("n_bumps", c.n_bumps);
  get("jmax", c.jmax);
  get("jmin", c.jmin);
  get("seed", c.seed);
  get("output_dir", c.output_dir);
  get("frame_n", c.frame_n);
  get("frame_trials", c.frame_trials);
  get("density_n", c.density_n);
  get("gram_n", c.gram_n);
}

struct ResidualEntry {
  std::string tag;
  std::string description;
  double expected = 0.0;
  double computed = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline void to_json(ojson& j, const ResidualEntry& e) {
  j = ojson{{"tag", e.tag},           {"description", e.description}, {"expected", e.expected},
            {"computed", e.computed}, {"deviation", e.deviation},     {"tolerance", e.tolerance},
            {"pass", e.pass}};
}

inline ResidualEntry residual_entry(const Config& c, const std::string& tag, const std::string& what,
                                    double expected, double computed, bool extra_ok = true) {
  ResidualEntry e{tag, what, expected, computed, std::abs(computed - expected), tolerance(c, tag), false};
  e.pass = extra_ok && e.deviation < e.tolerance;
  return e;
}

inline ojson frame_manifest(const ModuleFrame& fr) {
  ojson j{{"label", fr.label}, {"size", fr.size()}};
  if (const XqaClass* cls = fr.xqa_class()) {
    j["ambient"] = {{"type", "X(q,a)"}, {"q", cls->q}, {"a", cls->a}};
  } else {
    const SupportBox& b = *fr.xi_box();
    j["ambient"] = {{"type", "compact"}, {"box", {b.smin, b.smax, b.tmin, b.tmax}}};
  }
  ojson params = ojson::object();
  for (const auto& [k, v] : fr.params) params[k] = v;
  j["params"] = params;
  return j;
}

inline ojson scaling_parameters(const PMRA& p) {
  const ScalingData& sd = *p.scaling;
  return ojson{{"det", sd.spec.det()},
               {"abs_det", sd.spec.abs_det()},
               {"sign", sd.spec.sign()},
               {"delta", sd.spec.delta()},
               {"eps1", sd.m1.eps},
               {"eps2", sd.m2.eps},
               {"filter_family", sd.m1.family},
               {"twisted_a", sd.J.phase.a},
               {"beta", sd.J.phase.beta},
               {"J_depth", sd.J_depth},
               {"J_boundary_convention", kJBoundaryConvention},
               {"sigma_support", {sd.support.smin, sd.support.smax, sd.support.tmin, sd.support.tmax}},
               {"sigma_scale", sd.sigma_scale},
               {"extended", p.extended}};
}

/// Both scaling-function conditions and the filter identity.
inline std::vector<ResidualEntry> construction_checks(const Config& c, const PMRA& p) {
  const ScalingData& sd = *p.scaling;
  const SigmaCertificate cert = certify_sigma(sd, c.N);
  const FilterIdentityReport f2 = verify_2d_filter_identity(sd.mt, sd.cls, sd.spec, c.N);
  return {residual_entry(c, "thm5.1-cond1", "sup |<sigma,sigma>_{Z x qZ} - 1|", 1.0, 1.0 + cert.orthonormality_dev),
          residual_entry(c, "thm5.1-cond2", "sup |sigma(Ax) - m~(x) sigma(x)|", 0.0, cert.refinement_dev),
          residual_entry(c, "prop5.2-filter", "sup |coset sum of |m~|^2 - 1|", 0.0, f2.max_deviation)};
}

/// Full invariant suite.
inline std::vector<ResidualEntry> verification_suite(const Config& c, const PMRA& p) {
  std::vector<ResidualEntry> out = construction_checks(c, p);
  const ScalingData& sd = *p.scaling;

  const PhaseProductReport jr = verify_phase_product(sd.J, 10000, c.seed);
  out.push_back(residual_entry(c, "prop5.3-unimodular", "sup ||J| - 1| off the jump lines", 0.0, jr.unimodularity));
  out.push_back(residual_entry(c, "prop5.3-cocycle", "sup |J(Ax) - J_{q,a',q/d2}(x) J(x)|", 0.0, jr.cocycle));

  double iso = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Fn2 F = random_xqa_element(sd.cls, p.xqa_frame, c.seed + 2 * k);
    const Fn2 G = random_xqa_element(sd.cls, p.xqa_frame, c.seed + 2 * k + 1);
    iso = std::max(iso, sup_abs_difference(a_inner_product(embed_R(sd, F), embed_R(sd, G)), xqa_inner_product(F, G),
                                           cell_grid(c.frame_n, {1.0, 1.0})));
  }
  out.push_back(residual_entry(c, "thm5.1-isometry", "sup |<RF,RG>_A - <F,G>_X|", 0.0, iso));

  const InclusionReport inc = verify_inclusion(sd, p.xqa_frame.elements[0], c.frame_n, tolerance(c, "thm5.1-inclusion"));
  out.push_back(residual_entry(c, "thm5.1-inclusion", "sup |D^{-1}(sigma F) - delta^{-1} sigma G|, G in X(q,a)", 0.0,
                               std::max({inc.identity_dev, inc.class_check.max_dev_s, inc.class_check.max_dev_t})));

  out.push_back(residual_entry(c, "prop3.6-a1-basis", "sup |E(conj(b) b') - identity|", 0.0,
                               a1_orthonormality_deviation(p.a1_basis, sd.spec)));

  const std::pair<const char*, const ModuleFrame*> frames[] = {
      {"def2.2-frame-xqa", &p.xqa_frame}, {"def2.2-frame-v0", &p.v0_frame}, {"def2.2-frame-v1", &p.v1_frame}};
  for (const auto& [tag, fr] : frames) {
    const FrameReport r = verify_module_frame(*fr, c.frame_trials, tolerance(c, tag), c.frame_n, c.seed);
    out.push_back(residual_entry(c, tag, "relative reconstruction residual of " + fr->label, 0.0, r.max_residual));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < c.frame_trials; ++k) {
      const Fn2 w = random_w0_element(p, c.seed + k);
      const auto [res, mag] = reconstruction_residual(p.w0_frame, w, c.frame_n);
      worst = std::max(worst, mag > 0.0 ? res / mag : res);
    }
    out.push_back(residual_entry(c, "def2.2-frame-w0", "relative reconstruction residual on V1 - P_V0 V1", 0.0, worst));
  }
  out.push_back(residual_entry(c, "def3.1-nesting", "V0 elements reconstructed by the V1 frame", 0.0,
                               nesting_residual(p, c.frame_n)));
  out.push_back(residual_entry(c, "thm3.8-orthogonality", "sup |<sigma h_i, psi_k>_A|", 0.0,
                               frame_cross_sup(p.v0_frame, p.w0_frame, c.frame_n)));

  const std::vector<Fn2> bumps = standard_test_bumps();
  {
    const Fn2 x = frame_projection(p.v0_frame, bumps[1]);
    const TightFrameReport t = verify_tight_frame_l2(p.v0_frame, x, {8, 16, 32}, c.frame_n * 2, 256);
    out.push_back(residual_entry(c, "prop2.7-parseval", "integral-route Parseval defect for P_V0(bump)", 0.0,
                                 t.defect_integral, t.direct_monotone));
  }
  double dens = 0.0, inter = 0.0, ladder = 0.0;
  bool dens_ok = true, inter_ok = true;
  for (const Fn2& b : bumps) {
    const DensityReport d = verify_density(p, b, c.jmax, c.density_n, tolerance(c, "prop3.4-density"));
    dens = std::max(dens, d.residuals.back() / d.norm);
    dens_ok = dens_ok && d.decreasing;
    const IntersectionReport in = verify_intersection(p, b, c.jmin, c.density_n / 2, tolerance(c, "prop3.2-intersection"));
    inter = std::max(inter, in.norms.back() / in.norm);
    inter_ok = inter_ok && in.decreasing;
    const LadderReport l = pythagoras_ladder(p, b, c.jmax + 1, c.density_n);
    ladder = std::max(ladder, std::abs(l.tail));
  }
  out.push_back(residual_entry(c, "prop3.4-density", "max ||xi - P_{V_Jmax} xi|| / ||xi||, strictly decreasing", 0.0,
                               dens, dens_ok));
  out.push_back(residual_entry(c, "prop3.2-intersection", "max ||P_{V_Jmin} xi|| / ||xi||, strictly decreasing", 0.0,
                               inter, inter_ok));
  out.push_back(residual_entry(c, "thm3.9-ladder", "max |1 - (||P_V0 xi||^2 + sum_j ||P_Wj xi||^2) / ||xi||^2|", 0.0,
                               ladder));
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts.

inline ojson read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return ojson::parse(in);
}

inline void write_json_file(const std::string& path, const ojson& j) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << "\n";
}

struct LoadedArtifact {
  Config config;
  double sigma_scale = 1.0;
  ojson json;
};

inline LoadedArtifact load_artifact(const std::string& path) {
  LoadedArtifact a;
  a.json = read_json_file(path);
  if (!a.json.contains("config")) throw Error(ErrorCode::InvalidArgument, path + " is not a pmra artifact");
  update_from_json(a.config, a.json.at("config"));
  if (a.json.contains("parameters") && a.json["parameters"].contains("sigma_scale")) {
    a.sigma_scale = a.json["parameters"]["sigma_scale"].get<double>();
  }
  a.config.validate();
  return a;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline bool all_pass(const std::vector<ResidualEntry>& v) {
  return std::all_of(v.begin(), v.end(), [](const ResidualEntry& e) { return e.pass; });
}

inline ojson report_header(const Config& c, const char* kind) {
  ojson j;
  j["format"] = kind;
  j["version"] = kVersion;
  j["config"] = c;
  return j;
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code and writes diagnostics to `log`.

inline int cmd_build(const Config& c, std::ostream& log) {
  try {
    c.validate();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto t0 = std::chrono::steady_clock::now();
  ojson j = report_header(c, "pmra-artifact");
  const std::string path = (std::filesystem::path(c.output_dir) / "pmra.json").string();
  int code = kExitPass;
  try {
    const PMRA p = build_pmra(c.cls(), c.spec(), c.pmra_options());
    j["parameters"] = scaling_parameters(p);
    const std::vector<ResidualEntry> res = construction_checks(c, p);
    j["residuals"] = res;
    j["frames"] = {{"xqa", frame_manifest(p.xqa_frame)},
                   {"v0", frame_manifest(p.v0_frame)},
                   {"v1", frame_manifest(p.v1_frame)},
                   {"w0", frame_manifest(p.w0_frame)}};
    j["errors"] = ojson::array();
    if (!all_pass(res)) {
      code = kExitCondition;
      for (const ResidualEntry& e : res) {
        if (!e.pass) j["errors"].push_back({{"code", "ConditionFailed"}, {"tag", e.tag}, {"deviation", e.deviation}});
      }
    }
  } catch (const Error& e) {
    j["errors"] = ojson::array({{{"code", to_string(e.code())}, {"message", e.what()}}});
    code = e.code() == ErrorCode::ConditionFailed ? kExitCondition : kExitConfig;
  }
  j["status"] = code == kExitPass ? "pass" : "fail";
  j["timing"] = {{"total_seconds", seconds_since(t0)}};
  try {
    write_json_file(path, j);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  log << "wrote " << path << " (" << j["status"].get<std::string>() << ")\n";
  return code;
}

inline int cmd_verify(const std::string& artifact, const std::string& out_path, std::ostream& log) {
  LoadedArtifact a;
  try {
    a = load_artifact(artifact);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto t0 = std::chrono::steady_clock::now();
  ojson j = report_header(a.config, "pmra-verify-report");
  int code = kExitPass;
  try {
    const PMRA p = build_pmra(a.config.cls(), a.config.spec(), a.config.pmra_options(a.sigma_scale));
    j["parameters"] = scaling_parameters(p);
    const std::vector<ResidualEntry> res = verification_suite(a.config, p);
    j["residuals"] = res;
    j["errors"] = ojson::array();
    for (const ResidualEntry& e : res) {
      if (!e.pass) {
        code = kExitCondition;
        log << "FAIL " << e.tag << " deviation " << e.deviation << " (tolerance " << e.tolerance << ")\n";
      }
    }
  } catch (const Error& e) {
    j["errors"] = ojson::array({{{"code", to_string(e.code())}, {"message", e.what()}}});
    code = kExitCondition;
  }
  j["status"] = code == kExitPass ? "pass" : "fail";
  j["timing"] = {{"total_seconds", seconds_since(t0)}};
  write_json_file(out_path, j);
  log << "wrote " << out_path << " (" << j["status"].get<std::string>() << ")\n";
  return code;
}

inline ojson classification_json(const ClassCheck& c) {
  ojson j{{"expected", {{"dim", c.expected.dim}, {"twist", c.expected.twist}}}, {"pass", c.pass}};
  if (!c.error.empty()) {
    j["error"] = c.error;
    return j;
  }
  j["dim"] = c.computed.dim;
  j["twist"] = c.computed.twist;
  j["chern"] = c.detail.chern.chern;
  j["raw_plaquette_sum"] = c.detail.chern.raw;
  j["distance_from_integer"] = c.detail.chern.distance;
  j["min_eigen_gap"] = c.detail.chern.min_gap;
  j["min_link_singular_value"] = c.detail.chern.min_link_sv;
  j["residuals"] = {{"hermiticity", c.detail.hermiticity},
                    {"idempotency", c.detail.idempotency},
                    {"trace_spread", c.detail.trace_spread},
                    {"trace_mean", c.detail.trace_mean}};
  return j;
}

/// Classifies v0, v1, w0 at grid N and 2N; passes iff all classes match the
/// expected ones at both resolutions.
inline int cmd_classify(const std::string& artifact, const std::string& out_path, int N, std::ostream& log) {
  LoadedArtifact a;
  try {
    a = load_artifact(artifact);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (N <= 0) N = a.config.gram_n;
  const auto t0 = std::chrono::steady_clock::now();
  ojson j = report_header(a.config, "pmra-kclass-report");
  int code = kExitPass;
  try {
    const PMRA p = build_pmra(a.config.cls(), a.config.spec(), a.config.pmra_options(a.sigma_scale));
    const int kappa = calibrate_sign();
    j["kappa"] = kappa;
    j["extended"] = p.extended;
    j["J_boundary_convention"] = kJBoundaryConvention;
    ojson runs = ojson::array();
    bool ok = true;
    for (int n : {N, 2 * N}) {
      const ClassReport r = verify_module_classes(p, n, kappa);
      ojson run{{"N", n}, {"pass", r.pass}};
      for (const ClassCheck& c : r.checks) {
        run[c.name] = classification_json(c);
        if (!c.pass) {
          log << "classify " << c.name << " at N=" << n << ": expected " << to_string(c.expected);
          if (c.error.empty()) {
            log << " got " << to_string(c.computed) << "\n";
          } else {
            log << " failed: " << c.error << "\n";
          }
        }
      }
      ok = ok && r.pass;
      runs.push_back(run);
    }
    j["runs"] = runs;
    const auto expected = expected_classes(p.scaling->cls, p.spec());
    ojson frames;
    for (const auto& [name, k] : expected) {
      const ojson& first = runs[0][name];
      frames[name] = {{"expected", {{"dim", k.dim}, {"twist", k.twist}}},
                      {"dim", first.value("dim", 0)},
                      {"twist", first.value("twist", 0)},
                      {"stable", runs[0][name].value("dim", -1) == runs[1][name].value("dim", -2) &&
                                     runs[0][name].value("twist", -1) == runs[1][name].value("twist", -2)}};
    }
    j["frames"] = frames;
    if (!ok) code = kExitClassifier;
  } catch (const Error& e) {
    j["errors"] = ojson::array({{{"code", to_string(e.code())}, {"message", e.what()}}});
    code = kExitClassifier;
  }
  j["status"] = code == kExitPass ? "pass" : "fail";
  j["timing"] = {{"total_seconds", seconds_since(t0)}};
  write_json_file(out_path, j);
  log << "wrote " << out_path << " (" << j["status"].get<std::string>() << ")\n";
  return code;
}

inline const std::vector<std::string>& export_fields() {
  static const std::vector<std::string> f = {"sigma", "phi", "J", "m_tilde", "wavelet[i]", "gram-trace", "plaquette"};
  return f;
}

/// Writes the named field as CSV. `frame` selects the frame for gram-trace
/// and plaquette (xqa, v0, v1, w0).
inline int cmd_export(const std::string& artifact, const std::string& field, int grid, const std::string& frame,
                      std::ostream& csv, std::ostream& log) {
  LoadedArtifact a;
  try {
    a = load_artifact(artifact);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (grid <= 0) grid = a.config.N;
  const std::regex wavelet_re(R"(wavelet\[(\d+)\])");
  std::smatch m;
  const bool is_wavelet = std::regex_match(field, m, wavelet_re);
  const bool known = is_wavelet || field == "sigma" || field == "phi" || field == "J" || field == "m_tilde" ||
                     field == "gram-trace" || field == "plaquette";
  if (!known) {
    log << "error: unknown field '" << field << "'; expected one of";
    for (const auto& f : export_fields()) log << " " << f;
    log << "\n";
    return kExitConfig;
  }
  try {
    const PMRA p = build_pmra(a.config.cls(), a.config.spec(), a.config.pmra_options(a.sigma_scale));
    const ScalingData& sd = *p.scaling;
    if (field == "sigma" || field == "phi" || field == "J") {
      const Fn2& f = field == "sigma" ? sd.sigma : field == "phi" ? sd.phi : sd.J_fn;
      write_csv(csv, sample_grid(f, GridSpec(grid, sd.support)));
    } else if (field == "m_tilde") {
      write_csv(csv, sample_grid(sd.mt, cell_grid(grid, {1.0, static_cast<double>(sd.cls.q)})));
    } else if (is_wavelet) {
      const std::size_t i = std::stoul(m[1].str());
      if (i >= p.w0_frame.size()) {
        log << "error: wavelet index " << i << " out of range (" << p.w0_frame.size() << " elements)\n";
        return kExitConfig;
      }
      write_csv(csv, sample_grid(p.w0_frame.elements[i], GridSpec(grid, *p.w0_frame.xi_box())));
    } else {
      const ModuleFrame* fr = frame == "xqa" ? &p.xqa_frame
                              : frame == "v0" ? &p.v0_frame
                              : frame == "v1" ? &p.v1_frame
                              : frame == "w0" ? &p.w0_frame
                                              : nullptr;
      if (!fr) {
        log << "error: unknown frame '" << frame << "'\n";
        return kExitConfig;
      }
      const GramField g = sample_gram_field(*fr, grid);
      SampledField out{g.field.grid, std::vector<Complex>(g.field.grid.size())};
      if (field == "gram-trace") {
        for (int jj = 0; jj < grid; ++jj) {
          for (int ii = 0; ii < grid; ++ii) out.at(ii, jj) = g.matrix(ii, jj).trace();
        }
      } else {
        const ChernReport c = chern_number_fhs(g);
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = Complex{c.plaquettes[k], 0.0};
      }
      write_csv(csv, out);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConditionFailed ? kExitCondition : kExitClassifier;
  }
  return kExitPass;
}

}  // namespace pmra
