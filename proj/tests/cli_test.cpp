// Copyright 2026 The nmrswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nmrswitch/acquisition.hpp"
#include "nmrswitch/spinsim.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nmrswitch;

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nmrswitch_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }

  std::string write(const std::string& name, const std::string& content) {
    std::ofstream(path(name), std::ios::binary) << content;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  // "key value" lines from human-readable output.
  static std::map<std::string, std::string> fields(const std::string& text) {
    std::map<std::string, std::string> m;
    std::istringstream in(text);
    for (std::string k, v; in >> k >> v;) m.emplace(k, v);
    return m;
  }

  fs::path dir_;
};

TEST_F(CliTest, CompileControlNot) {
  const auto circ = write("cn.circ", "CN 0 1\n");
  const auto r = run({"compile", circ, "--system", "chloroform", "-o",
                      path("cn.seq")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto f = fields(r.out);
  EXPECT_EQ(f.at("pulses"), "12");
  EXPECT_EQ(f.at("delays"), "1");
  const double duration = std::stod(f.at("duration_s"));
  EXPECT_GT(duration, 1.0 / 430.0);
  EXPECT_LT(duration, 1.0 / 430.0 + 2e-4);
  const auto seq = spinsim::parse_sequence(read(path("cn.seq")));
  EXPECT_EQ(seq.pulse_count(), 12u);
}

TEST_F(CliTest, CompileToStdoutWithJsonSummary) {
  const auto circ = write("h.circ", "H 1\n");
  const auto r = run({"compile", circ, "--json"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(spinsim::parse_sequence(r.out).pulse_count(), 3u);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["pulses"], 3);
  EXPECT_EQ(j["delays"], 0);
}

TEST_F(CliTest, CompileEmptyCircuit) {
  const auto circ = write("empty.circ", "# nothing\n");
  const auto r = run({"compile", circ, "-o", path("e.seq")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto f = fields(r.out);
  EXPECT_EQ(f.at("pulses"), "0");
  EXPECT_EQ(f.at("duration_s"), "0");
  EXPECT_EQ(read(path("e.seq")), "");
}

TEST_F(CliTest, CompileUncoupledPairFails) {
  const auto circ = write("bad.circ", "CN 0 2\n");
  const auto r = run({"compile", circ});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("coupling"), std::string::npos) << r.err;
}

TEST_F(CliTest, CompileParseErrorReportsLine) {
  const auto circ = write("bad.circ", "CN 0 1\n---\nXX 1\n");
  const auto r = run({"compile", circ});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, VerifyCompiledControlNot) {
  run({"compile", write("cn.circ", "CN 0 1\n"), "-o", path("cn.seq")});
  const auto r = run({"verify", path("cn.seq"), "--gate", "CN 0 1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto f = fields(r.out);
  EXPECT_EQ(f.at("result"), "pass");
  EXPECT_LE(std::stod(f.at("distance")), 1e-9);

  const auto j = run({"verify", path("cn.seq"), "--circuit",
                      write("t.circ", "CN 0 1\n"), "--json"});
  ASSERT_EQ(j.code, cli::kOk);
  const auto js = nlohmann::json::parse(j.out);
  EXPECT_TRUE(js["passed"].get<bool>());
  EXPECT_LE(js["distance"].get<double>(), 1e-9);
}

TEST_F(CliTest, VerifyHadamardAgainstNotFails) {
  run({"compile", write("h.circ", "H 0\n"), "-o", path("h.seq")});
  const auto r = run({"verify", path("h.seq"), "--gate", "N 0"});
  EXPECT_EQ(r.code, cli::kVerifyFailed);
  EXPECT_EQ(fields(r.out).at("result"), "fail");
}

TEST_F(CliTest, VerifyEmptyAgainstIdentity) {
  const auto r = run({"verify", write("e.seq", ""), "--gate", "I"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(fields(r.out).at("distance"), "0");
}

TEST_F(CliTest, VerifyUsageErrors) {
  const auto seq = write("e.seq", "");
  EXPECT_EQ(run({"verify", seq}).code, cli::kUsageError);
  EXPECT_EQ(run({"verify", seq, "--gate", "CN 0 1", "--tol", "-1"}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"verify", write("bad.seq", "P 0 +x\n"), "--gate", "I"}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"verify", path("missing.seq"), "--gate", "I"}).code,
            cli::kUsageError);
}

TEST_F(CliTest, SwitchCrossMode) {
  const auto frames = write("f.txt", "00\n10\n01\n11\n");
  for (const char* mode : {"ideal", "pulse"}) {
    const auto r = run({"switch", "--perm", "1 0", frames, "--mode", mode});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(r.out, "00\n01\n10\n11\n");
  }
}

TEST_F(CliTest, SwitchIdentityAndCycle) {
  const auto four = write("f4.txt", "0000\n1010\n0111\n");
  EXPECT_EQ(run({"switch", "--perm", "0 1 2 3", four}).out,
            "0000\n1010\n0111\n");
  const auto three = write("f3.txt", "110\n");
  EXPECT_EQ(run({"switch", "--perm", "1 2 0", three}).out, "011\n");
}

TEST_F(CliTest, SwitchJobsKeepOrderAndEmitCircuit) {
  std::string frames;
  for (int i = 0; i < 64; ++i) {
    for (int b = 5; b >= 0; --b) frames += ((i >> b) & 1) ? '1' : '0';
    frames += '\n';
  }
  const auto f = write("f6.txt", frames);
  const auto serial = run({"switch", "--perm", "3 5 0 1 2 4", f});
  const auto parallel = run({"switch", "--perm", "3 5 0 1 2 4", f, "--jobs",
                             "4", "--emit-circuit", path("sw.circ"), "-o",
                             path("out.txt")});
  ASSERT_EQ(parallel.code, cli::kOk) << parallel.err;
  EXPECT_EQ(read(path("out.txt")), serial.out);
  const auto circuit = read(path("sw.circ"));
  EXPECT_LE(std::count(circuit.begin(), circuit.end(), '-') / 3 + 1, 6);
}

TEST_F(CliTest, SwitchErrors) {
  const auto frames = write("f.txt", "00\n10\n");
  EXPECT_EQ(run({"switch", "--perm", "1 1", frames}).code, cli::kUsageError);
  EXPECT_EQ(run({"switch", "--perm", "1 0 2", frames}).code, cli::kUsageError);
  EXPECT_EQ(run({"switch", "--perm", "1 0", frames, "--mode", "fast"}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"switch", "--perm", "1 0", write("b.txt", "0a\n")}).code,
            cli::kUsageError);
}

TEST_F(CliTest, SpectrumSinglesAndDoubletSpacing) {
  const auto zero = run({"spectrum", "--frame", "00", "--peaks-json",
                         path("p0.json")});
  ASSERT_EQ(zero.code, cli::kOk) << zero.err;
  const auto p0 = nlohmann::json::parse(read(path("p0.json")));
  ASSERT_EQ(p0.size(), 1u);
  const double fidres = 10000.0 / 32768.0;
  EXPECT_NEAR(p0[0]["freq_hz"].get<double>(), 107.5, 2 * fidres);

  const auto one = run({"spectrum", "--frame", "01", "--json"});
  ASSERT_EQ(one.code, cli::kOk);
  const auto j1 = nlohmann::json::parse(one.out);
  ASSERT_EQ(j1["peaks"].size(), 1u);
  EXPECT_NEAR(p0[0]["freq_hz"].get<double>() -
                  j1["peaks"][0]["freq_hz"].get<double>(),
              215.0, 2 * fidres);
  EXPECT_NEAR(j1["fidres_hz"].get<double>(), 0.305176, 1e-6);
}

TEST_F(CliTest, SpectrumRoutedMatchesDirect) {
  const auto opts = std::vector<std::string>{"--td", "2048"};
  auto args = [&](std::vector<std::string> a) {
    a.insert(a.end(), opts.begin(), opts.end());
    return a;
  };
  ASSERT_EQ(run(args({"spectrum", "--frame", "10", "--route", "1 0",
                      "--spectrum-csv", path("routed.csv")}))
                .code,
            cli::kOk);
  ASSERT_EQ(run(args({"spectrum", "--frame", "01", "--spectrum-csv",
                      path("direct.csv")}))
                .code,
            cli::kOk);
  std::istringstream a(read(path("routed.csv"))), b(read(path("direct.csv")));
  std::string la, lb;
  std::getline(a, la);
  std::getline(b, lb);
  EXPECT_EQ(la, "index,freq_hz,re,im");
  std::size_t rows = 0;
  while (std::getline(a, la) && std::getline(b, lb)) {
    std::vector<double> va, vb;
    std::istringstream sa(la), sb(lb);
    for (std::string t; std::getline(sa, t, ',');) va.push_back(std::stod(t));
    for (std::string t; std::getline(sb, t, ',');) vb.push_back(std::stod(t));
    ASSERT_EQ(va.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(va[k], vb[k], 1e-9 * std::max(1.0, std::abs(vb[k])));
    }
    ++rows;
  }
  EXPECT_EQ(rows, 1024u);
}

TEST_F(CliTest, SpectrumFromStateFile) {
  const auto state = write("psi.txt",
                           "0.70710678118654752 0\n0.70710678118654752 0\n0 0\n"
                           "0 0\n");
  const auto r = run({"spectrum", "--state", state});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(fields(r.out).at("peaks"), "2");
  EXPECT_EQ(run({"spectrum", "--state", write("bad.txt", "1 0\n1 0\n")}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"spectrum", "--frame", "000"}).code, cli::kUsageError);
  EXPECT_EQ(run({"spectrum"}).code, cli::kUsageError);
  EXPECT_EQ(run({"spectrum", "--frame", "00", "--td", "7"}).code,
            cli::kUsageError);
}

TEST_F(CliTest, SpectrumOutputsAreDeterministic) {
  for (const char* tag : {"a", "b"}) {
    ASSERT_EQ(run({"spectrum", "--frame", "00", "--td", "1024", "--fid-csv",
                   path(std::string("fid_") + tag + ".csv"), "--spectrum-csv",
                   path(std::string("spec_") + tag + ".csv")})
                  .code,
              cli::kOk);
  }
  EXPECT_EQ(read(path("fid_a.csv")), read(path("fid_b.csv")));
  EXPECT_EQ(read(path("spec_a.csv")), read(path("spec_b.csv")));
  EXPECT_EQ(read(path("fid_a.csv")).substr(0, 19), "index,time_s,re,im\n");
}

TEST_F(CliTest, ConfigFileWithFlagsWinning) {
  const auto cfg = write("run.ini", "[spectrum]\ntd=4096\nsw=5000\n");
  const auto from_file = run({"--config", cfg, "spectrum", "--frame", "00"});
  ASSERT_EQ(from_file.code, cli::kOk) << from_file.err;
  EXPECT_EQ(fields(from_file.out).at("fidres_hz"), "1.22070312");
  const auto flag_wins =
      run({"--config", cfg, "spectrum", "--frame", "00", "--td", "8192"});
  EXPECT_EQ(fields(flag_wins.out).at("fidres_hz"), "0.610351562");
}

TEST_F(CliTest, UsageAndHelp) {
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(run({"compile"}).code, cli::kUsageError);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("compile"), std::string::npos);
}

TEST(ParseSystem, Presets) {
  EXPECT_EQ(cli::parse_system("chloroform").coupling(0, 1), 215.0);
  const auto u = cli::parse_system("uniform:3:100");
  EXPECT_EQ(u.size(), 3u);
  EXPECT_EQ(u.coupling(0, 2), 100.0);
  EXPECT_EQ(cli::parse_system("uniform:4").coupling(1, 3), 215.0);
  EXPECT_ANY_THROW(cli::parse_system("benzene"));
  EXPECT_ANY_THROW(cli::parse_system("uniform:x"));
  EXPECT_ANY_THROW(cli::parse_system("uniform:0"));
}

}  // namespace
