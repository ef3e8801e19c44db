#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace
{

namespace fs = std::filesystem;

const fs::path kTmp = CURLCURL_TEST_TMP;

struct Result
{
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args)
{
  fs::create_directories(kTmp);
  const fs::path out = kTmp / "stdout.txt", err = kTmp / "stderr.txt";
  const std::string cmd = std::string("\"") + CURLCURL_CLI + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_file(const std::string& name, const std::string& text)
{
  fs::create_directories(kTmp);
  const fs::path p = kTmp / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* const kTetMesh = "tetmesh 1\n"
                             "vertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                             "tets 1\n0 1 2 3\n"
                             "boundary 4\n1 2 3 D\n0 2 3 D\n0 1 3 D\n0 1 2 D\n";

} // namespace

TEST(Cli, MissingSubcommandIsAConfigError)
{
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("run").code, 2);
  EXPECT_EQ(run("run --case sphere --out x.csv").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, InvalidParametersAreConfigErrors)
{
  const auto out = (kTmp / "bad.csv").string();
  EXPECT_EQ(run("run --degree -1 --out " + out).code, 2);
  EXPECT_EQ(run("run --theta 1.5 --out " + out).code, 2);
  EXPECT_EQ(run("run --case file --out " + out).code, 2);
  EXPECT_EQ(run("patch-experiment --degrees 3..1 --out " + out).code, 2);
}

TEST(Cli, MeshErrorsReportLineNumbers)
{
  const auto bad = write_file("bad_mesh.txt", "tetmesh 1\nvertices 4\n0 0 0\n1 0\n");
  const Result r = run("check-mesh " + bad.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_EQ(run("check-mesh " + (kTmp / "missing.txt").string()).code, 3);
  const auto out = (kTmp / "bad.csv").string();
  EXPECT_EQ(run("run --case file --mesh " + bad.string() + " --out " + out).code, 3);
}

TEST(Cli, CheckMeshPrintsStatistics)
{
  const auto mesh = write_file("tet.txt", kTetMesh);
  const Result r = run("check-mesh " + mesh.string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tets 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("edges 6\n"), std::string::npos);
  EXPECT_NE(r.out.find("patches_dirichlet 6\n"), std::string::npos) << r.out;
}

TEST(Cli, RunWritesCsvFiles)
{
  const fs::path out = kTmp / "run.csv";
  const Result r = run("run --case cube-smooth --N 1 --levels 2 --degree 0 --estimator both --out " +
                       out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("level,N,h,ndofs,error,eta_cofree,eta_ofree,upper_bound,osc_total,"
                      "eff_cofree,eff_ofree,max_local_eff,n_marked\r\n",
                      0),
            0u);
  EXPECT_NE(csv.find("\r\n1,2,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out.string() + ".timings.csv"));
  EXPECT_TRUE(fs::exists(out.string() + ".marked.csv"));

  // Same input, same bytes.
  const fs::path again = kTmp / "run2.csv";
  ASSERT_EQ(run("run --case cube-smooth --N 1 --levels 2 --degree 0 --estimator both --out " +
                again.string())
                .code,
            0);
  EXPECT_EQ(slurp(again), csv);
}

TEST(Cli, PatchExperimentWritesCsv)
{
  const fs::path out = kTmp / "patch.csv";
  const Result r = run("patch-experiment --N 2 --degrees 0,1 --enrich 1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("degree,eta_patch,eta_sweep,dual_norm,ratio_patch,ratio_sweep\r\n0,", 0), 0u);
  EXPECT_NE(csv.find("\r\n1,"), std::string::npos);
}
