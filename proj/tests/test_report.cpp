#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmra/report.hpp"

using namespace pmra;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pmra_test_report_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Config small_config(const fs::path& dir) {
  Config c;
  c.N = 64;
  c.frame_n = 16;
  c.frame_trials = 4;
  c.density_n = 64;
  c.gram_n = 16;
  c.output_dir = dir.string();
  return c;
}

ojson without_timing(ojson j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST(Config, Validation) {
  Config c;
  EXPECT_NO_THROW(c.validate());
  c.d2 = 1;
  try {
    c.validate();
    FAIL();
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("|d2| > 1 required"), std::string::npos);
  }
  c = Config{};
  c.q = 0;
  EXPECT_THROW(c.validate(), Error);
  c = Config{};
  c.N = 16;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, JsonRoundTrip) {
  Config c;
  c.d1 = 3;
  c.d2 = -2;
  c.q = 2;
  c.a = -1;
  c.tolerances["thm5.1-cond1"] = 1e-7;
  c.seed = 77;
  ojson j = c;
  Config back;
  update_from_json(back, j);
  EXPECT_EQ(ojson(back).dump(), j.dump());
  EXPECT_DOUBLE_EQ(tolerance(back, "thm5.1-cond1"), 1e-7);
  EXPECT_DOUBLE_EQ(tolerance(back, "thm5.1-cond2"), 1e-9);
}

TEST(Config, PartialJsonKeepsDefaults) {
  Config c;
  update_from_json(c, ojson::parse(R"({"d1": 3, "a": 0})"));
  EXPECT_EQ(c.d1, 3);
  EXPECT_EQ(c.a, 0);
  EXPECT_EQ(c.d2, 2);
  EXPECT_EQ(c.N, 512);
}

TEST(ResidualEntry, PassRequiresDeviationAndExtra) {
  const Config c;
  EXPECT_TRUE(residual_entry(c, "thm5.1-cond2", "", 0.0, 1e-12).pass);
  EXPECT_FALSE(residual_entry(c, "thm5.1-cond2", "", 0.0, 1e-3).pass);
  EXPECT_FALSE(residual_entry(c, "thm5.1-cond2", "", 0.0, 1e-12, false).pass);
}

TEST(Commands, BuildRejectsBadDilation) {
  const fs::path dir = scratch("bad");
  Config c = small_config(dir);
  c.d2 = 1;
  std::ostringstream log;
  EXPECT_EQ(cmd_build(c, log), kExitConfig);
  EXPECT_NE(log.str().find("|d2| > 1 required"), std::string::npos);
}

TEST(Commands, BuildIsDeterministic) {
  const fs::path a = scratch("det");
  std::ostringstream log;
  ASSERT_EQ(cmd_build(small_config(a), log), kExitPass);
  const ojson first = without_timing(read_json_file((a / "pmra.json").string()));
  ASSERT_EQ(cmd_build(small_config(a), log), kExitPass);
  const ojson second = without_timing(read_json_file((a / "pmra.json").string()));
  EXPECT_EQ(first.dump(), second.dump());
  EXPECT_EQ(first["status"], "pass");
  EXPECT_EQ(first["parameters"]["filter_family"], "meyer-smoothstep");
  EXPECT_TRUE(first["parameters"].contains("J_boundary_convention"));
  for (const auto& r : first["residuals"]) EXPECT_LT(r["deviation"].get<double>(), 1e-8) << r["tag"];
}

TEST(Commands, TamperedSigmaFailsConditionOne) {
  const fs::path dir = scratch("tamper");
  std::ostringstream log;
  ASSERT_EQ(cmd_build(small_config(dir), log), kExitPass);
  const std::string art = (dir / "pmra.json").string();
  ojson j = read_json_file(art);
  j["parameters"]["sigma_scale"] = 1.01;
  write_json_file(art, j);
  const std::string out = (dir / "report.json").string();
  EXPECT_EQ(cmd_verify(art, out, log), kExitCondition);
  const ojson rep = read_json_file(out);
  EXPECT_EQ(rep["status"], "fail");
  bool seen = false;
  for (const auto& r : rep["residuals"]) {
    if (r["tag"] == "thm5.1-cond1") {
      seen = true;
      EXPECT_FALSE(r["pass"].get<bool>());
      EXPECT_NEAR(r["deviation"].get<double>(), 0.0201, 1e-6);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Commands, VerifyMissingArtifact) {
  std::ostringstream log;
  EXPECT_EQ(cmd_verify("/nonexistent/pmra.json", "/tmp/x.json", log), kExitConfig);
}

TEST(Commands, ExportFieldsAndErrors) {
  const fs::path dir = scratch("export");
  std::ostringstream log;
  ASSERT_EQ(cmd_build(small_config(dir), log), kExitPass);
  const std::string art = (dir / "pmra.json").string();

  std::ostringstream csv;
  ASSERT_EQ(cmd_export(art, "sigma", 8, "w0", csv, log), kExitPass);
  std::istringstream is(csv.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "s,t,re,im");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 64);

  std::ostringstream jcsv;
  ASSERT_EQ(cmd_export(art, "J", 16, "w0", jcsv, log), kExitPass);
  std::istringstream js(jcsv.str());
  std::getline(js, line);
  while (std::getline(js, line)) {
    double s, t, re, im;
    char c;
    std::istringstream ls(line);
    ls >> s >> c >> t >> c >> re >> c >> im;
    EXPECT_NEAR(std::hypot(re, im), 1.0, 1e-12);
  }

  std::ostringstream trace;
  ASSERT_EQ(cmd_export(art, "gram-trace", 8, "w0", trace, log), kExitPass);
  std::istringstream ts(trace.str());
  std::getline(ts, line);
  while (std::getline(ts, line)) {
    double s, t, re, im;
    char c;
    std::istringstream ls(line);
    ls >> s >> c >> t >> c >> re >> c >> im;
    EXPECT_NEAR(re, 3.0, 1e-6);
  }

  std::ostringstream sink;
  EXPECT_EQ(cmd_export(art, "wavelet[3]", 8, "w0", sink, log), kExitPass);
  EXPECT_EQ(cmd_export(art, "wavelet[99]", 8, "w0", sink, log), kExitConfig);
  EXPECT_EQ(cmd_export(art, "nonsense", 8, "w0", sink, log), kExitConfig);
}

TEST(Commands, ClassifyWritesExpectedClasses) {
  const fs::path dir = scratch("classify");
  std::ostringstream log;
  ASSERT_EQ(cmd_build(small_config(dir), log), kExitPass);
  const std::string out = (dir / "kclass.json").string();
  ASSERT_EQ(cmd_classify((dir / "pmra.json").string(), out, 16, log), kExitPass) << log.str();
  const ojson k = read_json_file(out);
  EXPECT_EQ(k["frames"]["v0"]["dim"], 1);
  EXPECT_EQ(k["frames"]["v0"]["twist"], 1);
  EXPECT_EQ(k["frames"]["v1"]["dim"], 4);
  EXPECT_EQ(k["frames"]["w0"]["dim"], 3);
  EXPECT_EQ(k["frames"]["w0"]["twist"], 0);
  EXPECT_TRUE(k["frames"]["w0"]["stable"].get<bool>());
  EXPECT_EQ(std::abs(k["kappa"].get<int>()), 1);
}
