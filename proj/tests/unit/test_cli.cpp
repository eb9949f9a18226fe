#include "../../tools/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "boostvar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = boostvar::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("boostvar_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, SimulateIsDeterministic) {
  auto dir = scratch("sim");
  std::vector<std::string> args{"simulate", "--t", "200", "--d", "20", "--s", "3", "--snr", "1.0",
                                "--reps", "5", "--seed", "7", "--steps", "60"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  b.insert(b.end(), {"--out", (dir / "b").string(), "--threads", "2"});
  auto ra = run(a);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(run(b).code, 0);
  const std::string ma = slurp(dir / "a" / "metrics.json");
  EXPECT_FALSE(ma.empty());
  EXPECT_EQ(ma, slurp(dir / "b" / "metrics.json"));
  EXPECT_NE(ra.out.find("LS-Boost2p"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, FitOnTooFewRowsIsDataError) {
  auto dir = scratch("short");
  std::ofstream(dir / "tiny.csv") << "a,b\n1,2\n3,4\n5,7\n";
  auto r = run({"fit", "--input", (dir / "tiny.csv").string(), "--p", "3", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("insufficient observations"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, UsageErrors) {
  auto r = run({"simulate", "--no-such-flag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"fit"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, FitSelectBoundsWorkflow) {
  auto dir = scratch("flow");
  const auto data = (dir / "series.csv").string();
  auto sim = run({"simulate", "--t", "400", "--d", "8", "--s", "2", "--reps", "1", "--seed", "3",
                  "--steps", "10", "--emit-data", data});
  ASSERT_EQ(sim.code, 0) << sim.err;
  ASSERT_TRUE(fs::exists(data));

  const auto run_dir = (dir / "run").string();
  auto fit = run({"fit", "--input", data, "--variant", "lag", "--p", "2", "--steps", "300", "--split",
                  "--out", run_dir});
  ASSERT_EQ(fit.code, 0) << fit.err;
  for (const char* f : {"coefficients.csv", "path.json", "pvalue_paths.csv"})
    EXPECT_TRUE(fs::exists(fs::path(run_dir) / f)) << f;

  auto pf = run({"select", "--run", run_dir, "--criterion", "pfilter", "--alpha", "0.05"});
  ASSERT_EQ(pf.code, 0) << pf.err;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(pf.out, m, std::regex(R"(model size (\d+) \(unfiltered (\d+)\))")))
      << pf.out;
  EXPECT_LT(std::stoi(m[1]), std::stoi(m[2]));
  EXPECT_TRUE(fs::exists(fs::path(run_dir) / "selection.json"));

  auto ai = run({"select", "--run", run_dir, "--criterion", "aicc"});
  EXPECT_EQ(ai.code, 0) << ai.err;
  auto va = run({"select", "--run", run_dir, "--criterion", "validation"});
  EXPECT_EQ(va.code, 0) << va.err;
  auto bad = run({"select", "--run", run_dir, "--criterion", "bic"});
  EXPECT_EQ(bad.code, 1);

  auto bd = run({"bounds", "--run", run_dir});
  ASSERT_EQ(bd.code, 0) << bd.err;
  EXPECT_TRUE(fs::exists(fs::path(run_dir) / "bounds.json"));
  EXPECT_NE(bd.out.find("prediction bound violations: 0"), std::string::npos) << bd.out;
  fs::remove_all(dir);
}

TEST(Cli, FitIsByteIdenticalAcrossRuns) {
  auto dir = scratch("repeat");
  const auto data = (dir / "series.csv").string();
  ASSERT_EQ(run({"simulate", "--t", "100", "--d", "3", "--s", "1", "--reps", "1", "--steps", "5",
                 "--emit-data", data}).code, 0);
  for (const char* out : {"a", "b"})
    ASSERT_EQ(run({"fit", "--input", data, "--steps", "40", "--out", (dir / out).string()}).code, 0);
  for (const char* f : {"coefficients.csv", "path.json", "pvalue_paths.csv"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  fs::remove_all(dir);
}

TEST(Cli, CrossSectionFit) {
  auto dir = scratch("cross");
  {
    std::ofstream f(dir / "xs.csv");
    f << "x1,x2,y\n";
    for (int i = 0; i < 40; ++i) {
      const double x1 = (i % 7) - 3.0, x2 = ((i * 5) % 11) - 5.0;
      f << x1 << ',' << x2 << ',' << 2.0 * x1 - 0.5 * x2 + ((i % 3) - 1) * 0.1 << '\n';
    }
  }
  auto r = run({"fit", "--input", (dir / "xs.csv").string(), "--variant", "cross", "--steps", "500",
                "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string coef = slurp(dir / "o" / "coefficients.csv");
  EXPECT_NE(coef.find(",y,x1,1,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, IngestAppliesCodes) {
  auto dir = scratch("ingest");
  std::ofstream(dir / "raw.csv") << "date,a,b\ntransform,2,1\n2000,1,5\n2001,2,6\n2002,4,\n2003,7,8\n";
  auto r = run({"ingest", "--input", (dir / "raw.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2001,1,6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("2003,3,8"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("2002"), std::string::npos) << r.out;
  auto bad = run({"ingest", "--input", (dir / "missing.csv").string()});
  EXPECT_EQ(bad.code, 2);
  fs::remove_all(dir);
}
