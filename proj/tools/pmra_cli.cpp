// pmra_cli: build, verify, classify and export projective multiresolution
// analyses with diagonal dilation.

#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmra/report.hpp"

namespace {

int parse_tolerances(const std::vector<std::string>& items, pmra::Config& cfg) {
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --tol expects tag=value, got '" << item << "'\n";
      return pmra::kExitConfig;
    }
    const std::string tag = item.substr(0, eq);
    if (!pmra::default_tolerances().count(tag)) {
      std::cerr << "error: unknown check tag '" << tag << "'\n";
      return pmra::kExitConfig;
    }
    try {
      cfg.tolerances[tag] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "error: bad tolerance value in '" << item << "'\n";
      return pmra::kExitConfig;
    }
  }
  return pmra::kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective multiresolution analyses for diagonal dilations"};
  app.require_subcommand(1);

  pmra::Config cfg;
  std::string config_file;
  std::vector<std::string> tol_items;
  auto* build = app.add_subcommand("build", "construct sigma and the frames, write pmra.json");
  build->add_option("--config", config_file, "JSON config file (flags override it)");
  // Flags given on the command line are copied over the config file's values.
  std::vector<std::pair<CLI::Option*, std::function<void(pmra::Config&, const pmra::Config&)>>> flags;
  auto flag = [&](const char* name, auto pmra::Config::*member, const char* help) {
    CLI::Option* o = build->add_option(name, cfg.*member, help);
    flags.emplace_back(o, [member](pmra::Config& dst, const pmra::Config& src) { dst.*member = src.*member; });
  };
  flag("--d1", &pmra::Config::d1, "first diagonal entry of A");
  flag("--d2", &pmra::Config::d2, "second diagonal entry of A");
  flag("--q", &pmra::Config::q, "dimension parameter q >= 1");
  flag("--a", &pmra::Config::a, "twist parameter a");
  flag("--N", &pmra::Config::N, "certification grid size");
  flag("--eps1", &pmra::Config::eps1, "ramp half-width of m1 (0: default)");
  flag("--eps2", &pmra::Config::eps2, "ramp half-width of m2 (0: default)");
  flag("--frame-eps", &pmra::Config::frame_eps, "ramp of the X(1,a) frame filter (0: default)");
  flag("--n-bumps", &pmra::Config::n_bumps, "bumps in the X(q,a) frame for q >= 2 (0: q+1)");
  flag("--jmax", &pmra::Config::jmax, "finest level for density checks");
  flag("--jmin", &pmra::Config::jmin, "coarsest level for intersection checks");
  flag("--seed", &pmra::Config::seed, "seed for random test elements");
  flag("--out", &pmra::Config::output_dir, "output directory");
  build->add_option("--tol", tol_items, "per-check tolerance override tag=value");

  std::string artifact = "pmra.json", out_path;
  auto* verify = app.add_subcommand("verify", "run the invariant suite on an artifact");
  verify->add_option("--artifact", artifact, "pmra.json from build");
  verify->add_option("--out", out_path, "report path (default: report.json next to the artifact)");

  int classify_n = 0;
  auto* classify = app.add_subcommand("classify", "classify the V0, V1, W0 modules");
  classify->add_option("--artifact", artifact, "pmra.json from build");
  classify->add_option("--out", out_path, "report path (default: kclass.json next to the artifact)");
  classify->add_option("--N", classify_n, "Gram grid size (default from config; also run at 2N)");

  std::string field, frame = "w0";
  int export_grid = 0;
  auto* exp = app.add_subcommand("export", "write a sampled field as CSV");
  exp->add_option("--artifact", artifact, "pmra.json from build");
  exp->add_option("--field", field, "sigma, phi, J, m_tilde, wavelet[i], gram-trace, plaquette")->required();
  exp->add_option("--grid", export_grid, "grid size per axis (default: config N)");
  exp->add_option("--frame", frame, "frame for gram-trace/plaquette: xqa, v0, v1, w0");
  exp->add_option("--out", out_path, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pmra::kExitConfig;
  }

  auto sibling = [&](const char* name) {
    return (std::filesystem::path(artifact).parent_path() / name).string();
  };

  if (*build) {
    if (!config_file.empty()) {
      pmra::Config merged;
      try {
        pmra::update_from_json(merged, pmra::read_json_file(config_file));
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pmra::kExitConfig;
      }
      for (const auto& [opt, copy] : flags) {
        if (opt->count() > 0) copy(merged, cfg);
      }
      cfg = merged;
    }
    if (const int rc = parse_tolerances(tol_items, cfg); rc != 0) return rc;
    return pmra::cmd_build(cfg, std::cerr);
  }
  if (*verify) {
    return pmra::cmd_verify(artifact, out_path.empty() ? sibling("report.json") : out_path, std::cerr);
  }
  if (*classify) {
    return pmra::cmd_classify(artifact, out_path.empty() ? sibling("kclass.json") : out_path, classify_n, std::cerr);
  }
  if (*exp) {
    if (out_path.empty()) return pmra::cmd_export(artifact, field, export_grid, frame, std::cout, std::cerr);
    std::ofstream csv(out_path);
    if (!csv) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return pmra::kExitConfig;
    }
    return pmra::cmd_export(artifact, field, export_grid, frame, csv, std::cerr);
  }
  return pmra::kExitConfig;
}
