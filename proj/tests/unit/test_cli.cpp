#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "kemweb_cli/cli.hpp"

namespace fs = std::filesystem;
using kemweb::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kemweb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string example(const std::string& name) { return write(name + ".web", *kemweb::cli::example_text(name)); }

  Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

const std::string kLcViolator =
    "dim 2\ncoords x1 x2\ndomain x1 1 2\ndomain x2 1 2\nsign x1 +\nsign x2 +\nmode raw\n"
    "gii x1 : 1\ngii x2 : 1 + x1*x2^2\n";

const std::string kRemainViolator =
    "dim 3\ncoords x1 x2 x3\ndomain x1 1 2\ndomain x2 1 2\ndomain x3 1 2\nsign x1 +\nsign x2 +\nsign x3 +\n"
    "mode sigma\nphi x1 : 1\nphi x2 : 1\nphi x3 : 1\nsigma x1 x2 : x1\nsigma x2 x1 : x2^2\nsigma x3 x1 : x3\n";

TEST_F(Cli, CheckSphericalPasses) { EXPECT_EQ(run({"check", example("spherical-e3")}).code, 0); }

TEST_F(Cli, CheckNamesFailingCondition) {
  const Result r = run({"--json", "check", write("bad.web", kLcViolator)});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_NE(r.out.find("condition failed: levi_civita"), std::string::npos);
}

TEST_F(Cli, MalformedFileIsUsageError) {
  const Result r = run({"--json", "check", write("bad.web", "dim 2\ncoords x\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::ordered_json::parse(r.out)["verdict"], "error");
  EXPECT_NE(r.err.find("parse error"), std::string::npos);
}

TEST_F(Cli, MissingFileIsUsageError) { EXPECT_EQ(run({"check", (dir_ / "none.web").string()}).code, 2); }

TEST_F(Cli, BadFlags) {
  EXPECT_EQ(run({"--samples", "2", "check", example("spherical-e3")}).code, 2);
  EXPECT_EQ(run({"--tol", "0", "check", example("spherical-e3")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, ClassifySpherical) {
  const Result r = run({"--json", "classify", example("spherical-e3")});
  ASSERT_EQ(r.code, 0);
  const auto tree = nlohmann::ordered_json::parse(r.out)["classification"]["tree"];
  EXPECT_EQ(tree["kind"], "irregular_m1");
  EXPECT_EQ(tree["concircular_compatible"], true);
}

TEST_F(Cli, ClassifyProductOfLines) {
  const Result r = run({"--json", "classify", example("euclidean-3")});
  ASSERT_EQ(r.code, 0);
  const auto tree = nlohmann::ordered_json::parse(r.out)["classification"]["tree"];
  EXPECT_EQ(tree["kind"], "product");
  EXPECT_EQ(tree["children"].size(), 3U);
}

TEST_F(Cli, ClassifyIrregularDemo) {
  const Result r = run({"--json", "classify", example("irregular-demo")});
  ASSERT_EQ(r.code, 0);
  const auto tree = nlohmann::ordered_json::parse(r.out)["classification"]["tree"];
  EXPECT_EQ(tree["kind"], "irregular_m1");
  EXPECT_EQ(tree["concircular_compatible"], false);
}

TEST_F(Cli, ClassifyRemainViolator) {
  const Result r = run({"--json", "classify", write("v.web", kRemainViolator)});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["remain"]["pass"], false);
  EXPECT_EQ(j["remain"]["triples"].size(), 1U);
}

TEST_F(Cli, ClassifyNeedsSigmaOrFamily) {
  EXPECT_EQ(run({"classify", example("sphere-s2")}).code, 2);
}

TEST_F(Cli, VerifyTensors) {
  const std::string f = example("spherical-e3");
  EXPECT_EQ(run({"verify-ct", f, "--L", "r r : -r^2"}).code, 0);
  EXPECT_EQ(run({"verify-ct", f, "--K-metric"}).code, 0);
  EXPECT_EQ(run({"verify-ct", f, "--L", "r r : r^3"}).code, 1);
  EXPECT_EQ(run({"verify-ct", f, "--L", "r q : 1"}).code, 2);
  EXPECT_EQ(run({"verify-ct", f}).code, 2);
  EXPECT_EQ(run({"verify-ct", example("warped-demo")}).code, 0);
}

TEST_F(Cli, CurvatureValues) {
  const Result s2 = run({"--json", "curvature", example("sphere-s2"), "--point", "theta=pi/3"});
  ASSERT_EQ(s2.code, 0);
  EXPECT_NEAR(nlohmann::ordered_json::parse(s2.out)["values"]["kappa"].get<double>(), 1.0, 1e-9);

  const Result e3 = run({"--json", "curvature", example("euclidean-3")});
  ASSERT_EQ(e3.code, 0);
  EXPECT_EQ(nlohmann::ordered_json::parse(e3.out)["values"]["kappa"].get<double>(), 0.0);
}

TEST_F(Cli, CurvatureComponent) {
  const Result r = run({"curvature", example("sphere-s2"), "--component", "theta,phi,theta,phi"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("R[theta,phi,theta,phi]"), std::string::npos);
}

TEST_F(Cli, CurvatureOutsideDomain) {
  EXPECT_EQ(run({"curvature", example("sphere-s2"), "--point", "theta=5"}).code, 3);
}

TEST_F(Cli, CurvatureWarpedChecks) {
  const Result r = run({"--json", "curvature", example("warped-s3")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::ordered_json::parse(r.out)["conditions"].size(), 3U);
}

TEST_F(Cli, ExampleCommand) {
  const std::string out = (dir_ / "s.web").string();
  ASSERT_EQ(run({"example", "spherical-e3", "-o", out}).code, 0);
  EXPECT_EQ(run({"check", out}).code, 0);
  EXPECT_EQ(run({"example", "nope"}).code, 2);
  EXPECT_EQ(run({"example", "euclidean-0"}).code, 2);
  EXPECT_FALSE(run({"example", "elliptic-e2"}).out.empty());
}

TEST_F(Cli, JsonIsByteIdenticalAcrossRuns) {
  const std::vector<std::vector<std::string>> commands{
      {"--json", "--seed", "3", "check", example("spherical-e3")},
      {"--json", "classify", example("irregular-demo")},
      {"--json", "verify-ct", example("warped-demo")},
      {"--json", "curvature", example("warped-s3")},
  };
  for (const auto& c : commands) EXPECT_EQ(run(c).out, run(c).out);
}

}  // namespace
