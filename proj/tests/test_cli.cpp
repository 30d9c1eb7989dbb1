#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using cxorder::cli::Json;

class Cli : public ::testing::Test {
 protected:
  fs::path dir_;

  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cxorder_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  struct Run {
    int code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
  };

  Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "cxorder");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cxorder::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }
};

const char* kExample =
    R"({"mu": {"mean": [0, 0], "cov": [[1, 0], [0, 1]]},
        "nu": {"mean": [1, 2], "cov": [[2, 0], [0, 0]]}})";

double at(const Json& m, int i, int j) { return m.at(i).at(j).get<double>(); }

TEST_F(Cli, GaussianExample) {
  const Run r = run({"project-gaussian", write("p.json", kExample)});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_NEAR(at(j["J"]["cov"], 0, 0), 2.0, 1e-8);
  EXPECT_NEAR(at(j["J"]["cov"], 1, 1), 1.0, 1e-8);
  EXPECT_NEAR(at(j["J"]["cov"], 0, 1), 0.0, 1e-8);
  EXPECT_EQ(j["J"]["mean"], Json::parse("[0.0, 0.0]"));
  EXPECT_EQ(j["I"]["mean"], Json::parse("[1.0, 2.0]"));
  EXPECT_EQ(j["uniqueness"]["unique"], false);
  EXPECT_EQ(j["method"], "singular_reduction");
  EXPECT_TRUE(j["transform"].contains("O"));
  EXPECT_TRUE(j["transform"].contains("D"));
}

TEST_F(Cli, EqualGaussians) {
  const Run r = run({"project-gaussian",
                     write("p.json", R"({"mu": {"mean": [1], "cov": [[3]]},
                                         "nu": {"mean": [1], "cov": [[3]]}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_NEAR(j["bw2"].get<double>(), 0.0, 1e-14);
  EXPECT_NEAR(j["w2_mu_I"].get<double>(), 0.0, 1e-7);
  EXPECT_EQ(j["transform"]["D"], Json::parse("[1.0]"));
  EXPECT_FALSE(j.contains("uniqueness"));
}

TEST_F(Cli, CommutingPair) {
  const Run r = run({"project-gaussian",
                     write("p.json", R"({"mu": {"mean": [0, 0], "cov": [[4, 0], [0, 1]]},
                                         "nu": {"mean": [0, 0], "cov": [[1, 0], [0, 4]]}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["method"], "commuting");
  EXPECT_NEAR(at(j["I"]["cov"], 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(at(j["I"]["cov"], 1, 1), 1.0, 1e-12);
  EXPECT_NEAR(at(j["J"]["cov"], 0, 0), 4.0, 1e-12);
  EXPECT_NEAR(at(j["J"]["cov"], 1, 1), 4.0, 1e-12);
}

TEST_F(Cli, PgdTraceCsv) {
  const std::string trace = (dir_ / "trace.csv").string();
  const Run r = run({"project-gaussian", "--method", "pgd", "--trace", trace,
                     write("p.json", R"({"mu": {"mean": [0, 0], "cov": [[4, 1], [1, 1]]},
                                         "nu": {"mean": [0, 0], "cov": [[1, 0], [0, 4]]}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(read(trace));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "iteration,objective,grad_norm");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_GT(rows, 0);
  EXPECT_EQ(r.json()["method"], "pgd");
}

TEST_F(Cli, OneDimExamples) {
  Run r = run({"project-1d", write("a.json", R"({"mu": {"points": [-1, 1], "weights": [0.5, 0.5]},
                                                  "nu": {"points": [0], "weights": [1]}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  EXPECT_EQ(j["I"]["points"], Json::parse("[[0.0]]"));
  EXPECT_EQ(j["J"]["points"], Json::parse("[[-1.0], [1.0]]"));

  r = run({"project-1d", write("b.json", R"({"mu": {"points": [0, 2], "weights": [0.5, 0.5]},
                                             "nu": {"points": [0], "weights": [1]}})")});
  j = r.json();
  EXPECT_NEAR(j["w2_mu_I_squared"].get<double>(), 2.0, 1e-14);
  EXPECT_NEAR(j["w2_nu_J_squared"].get<double>(), 2.0, 1e-14);

  r = run({"project-1d", write("c.json", R"({"mu": {"points": [0, 2], "weights": [0.5, 0.5]},
                                             "nu": {"points": [0, 2], "weights": [0.5, 0.5]}})")});
  j = r.json();
  EXPECT_EQ(j["I"], j["J"]);
  EXPECT_EQ(j["I"]["points"], Json::parse("[[0.0], [2.0]]"));
}

TEST_F(Cli, DiscreteExamplesAndAgreementWithOneDim) {
  Run r = run({"project-discrete", write("a.json", R"({"mu": {"points": [0], "weights": [1]},
                                                       "nu": {"points": [-1, 1], "weights": [0.5, 0.5]}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["value"].get<double>(), 0.0, 1e-12);

  const std::string p = write("b.json", R"({"mu": {"points": [-2, 0.5, 1, 3], "weights": [0.1, 0.4, 0.3, 0.2]},
                                            "nu": {"points": [-1, 0, 2], "weights": [0.3, 0.3, 0.4]}})");
  const std::string coupling = (dir_ / "pi.csv").string();
  const Json wot = run({"project-discrete", "--coupling", coupling, p}).json();
  const Json exact = run({"project-1d", p}).json();
  ASSERT_EQ(wot["I"]["points"].size(), exact["I"]["points"].size());
  for (std::size_t k = 0; k < exact["I"]["points"].size(); ++k) {
    EXPECT_NEAR(at(wot["I"]["points"], k, 0), at(exact["I"]["points"], k, 0), 1e-6);
  }
  std::istringstream csv(read(coupling));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST_F(Cli, BudgetExceededIsSolverFailure) {
  const Run r = run({"project-discrete", "--budget", "2",
                     write("a.json", R"({"mu": {"points": [0, 1], "weights": [0.5, 0.5]},
                                         "nu": {"points": [-1, 1], "weights": [0.5, 0.5]}})")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("budget_exceeded"), std::string::npos);
}

TEST_F(Cli, DistanceCommand) {
  Json j = run({"distance", write("a.json", kExample)}).json();
  EXPECT_NEAR(j["w2"].get<double>() * j["w2"].get<double>(),
              5.0 + j["bw2"].get<double>(), 1e-12);
  j = run({"distance", write("b.json", R"({"mu": {"points": [[0, 0]], "weights": [1]},
                                          "nu": {"points": [[3, 4]], "weights": [1]}})")}).json();
  EXPECT_NEAR(j["w2"].get<double>(), 5.0, 1e-14);
}

TEST_F(Cli, CheckPassesOnGaussianAndOneDim) {
  Run r = run({"check", write("a.json", kExample)});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.json()["pass"], true);
  r = run({"check", write("b.json", R"({"mu": {"points": [-2, 0.5, 1], "weights": [0.2, 0.5, 0.3]},
                                       "nu": {"points": [-1, 2], "weights": [0.6, 0.4]}})")});
  EXPECT_EQ(r.code, 0) << r.out;
  bool saw_second_moment = false;
  const Json report = r.json();
  for (const Json& c : report["checks"]) {
    saw_second_moment |= c["name"] == "second_moment_identity";
    EXPECT_TRUE(c.contains("tolerance"));
  }
  EXPECT_TRUE(saw_second_moment);
}

TEST_F(Cli, CheckFailsOnCorruptedClaim) {
  const std::string problem = write("p.json", kExample);
  Json good = run({"project-gaussian", problem}).json();
  Json claims;
  claims["I"] = good["I"];
  claims["I"]["cov"][0][0] = good["I"]["cov"][0][0].get<double>() + 0.1;
  const Run r = run({"check", "--assert-file", write("claims.json", claims.dump()), problem});
  EXPECT_EQ(r.code, 1);
  const Json j = r.json();
  EXPECT_EQ(j["pass"], false);
  bool trace_failed = false;
  for (const Json& c : j["checks"]) {
    if (c["name"] == "trace_identity") trace_failed = c["pass"] == false;
  }
  EXPECT_TRUE(trace_failed);

  // The uncorrupted claim passes.
  claims["I"] = good["I"];
  EXPECT_EQ(run({"check", "--assert-file", write("ok.json", claims.dump()), problem}).code, 0);
}

TEST_F(Cli, ParseErrors) {
  EXPECT_EQ(run({"project-gaussian", write("a.json", "{not json")}).code, 2);
  EXPECT_EQ(run({"project-gaussian", write("b.json", R"({"mu": {"mean": [0], "cov": [[1]]}})")}).code, 2);
  EXPECT_EQ(run({"project-gaussian", write("c.json", R"({"mu": {"mean": [0, 0], "cov": [[1, 0], [0, -1]]},
                                                        "nu": {"mean": [0, 0], "cov": [[1, 0], [0, 1]]}})")}).code, 2);
  EXPECT_EQ(run({"project-gaussian", write("d.json", R"({"mu": {"mean": [0], "cov": [[1]]},
                                                        "nu": {"mean": [0, 0], "cov": [[1, 0], [0, 1]]}})")}).code, 2);
  EXPECT_EQ(run({"check", write("e.json", R"({"mu": {"mean": [0], "cov": [[1]]},
                                            "nu": {"points": [0], "weights": [1]}})")}).code, 2);
  EXPECT_EQ(run({"project-1d", write("f.json", R"({"mu": {"points": [0, 1], "weights": [0.5, 0.7]},
                                                 "nu": {"points": [0], "weights": [1]}})")}).code, 2);
  EXPECT_EQ(run({"project-gaussian", write("h.json", R"({"mu": {"mean": [0], "cov": [[1e400]]},
                                                        "nu": {"mean": [0], "cov": [[1]]}})")}).code, 2);
  EXPECT_EQ(run({"project-gaussian", (dir_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(run({"project-gaussian", "--method", "newton", write("g.json", kExample)}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(Cli, HelpIsSuccess) {
  const Run r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("project-gaussian"), std::string::npos);
}

TEST_F(Cli, OutputFileAndRoundTrip) {
  const std::string out = (dir_ / "out.json").string();
  const std::vector<std::vector<std::string>> commands = {
      {"project-gaussian", write("g.json", kExample)},
      {"project-1d", write("o.json", R"({"mu": {"points": [-2, 0.5, 1], "weights": [0.2, 0.5, 0.3]},
                                        "nu": {"points": [-1, 2], "weights": [0.6, 0.4]}})")},
      {"project-discrete", write("d.json", R"({"mu": {"points": [[0, 0], [1, 2], [3, 1]], "weights": [0.3, 0.3, 0.4]},
                                              "nu": {"points": [[1, 1], [2, 0]], "weights": [0.5, 0.5]}})")},
      {"distance", write("x.json", kExample)},
      {"check", write("c.json", kExample)}};
  for (auto args : commands) {
    args.insert(args.begin() + 1, {"--output", out});
    const Run r = run(args);
    ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
    EXPECT_TRUE(r.out.empty());
    const std::string text = read(out);
    EXPECT_EQ(cxorder::cli::dump(Json::parse(text)), text) << args[0];
  }
}

TEST_F(Cli, FloatsRoundTripExactly) {
  const double x = 0.1 + 0.2;
  const Json j = {{"v", x}};
  const std::string text = cxorder::cli::dump(j);
  EXPECT_EQ(Json::parse(text)["v"].get<double>(), x);
  EXPECT_EQ(cxorder::cli::dump(Json::parse(text)), text);
}

TEST_F(Cli, ExecutableExitCodes) {
  const std::string ok = write("g.json", kExample);
  const std::string bad = write("bad.json", "[]");
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(std::string(CXORDER_BIN) + " project-gaussian " + ok), 0);
  EXPECT_EQ(status(std::string(CXORDER_BIN) + " project-gaussian " + bad), 2);
  EXPECT_EQ(status(std::string(CXORDER_BIN) + " distance - < " + ok), 0);
}

}  // namespace
