#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = INNONET_CLI_PATH;
const std::string kData = INNONET_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int status;
  std::string err;
};

/// Runs a shell command line, capturing the exit status and stderr.
Run sh(const std::string& cmd, const fs::path& scratch) {
  const auto err_file = scratch / "stderr.txt";
  const int raw = std::system((cmd + " 2> '" + err_file.string() + "'").c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err_file)};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("innonet_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string toy_args() const {
    return " -i '" + kData + "/toy/events.csv' -d '" + kData + "/toy/directory.csv'";
  }

  fs::path dir_;
};

std::set<std::string> listing(const fs::path& d) {
  std::set<std::string> out;
  if (!fs::exists(d)) return out;
  for (const auto& e : fs::directory_iterator(d)) out.insert(e.path().filename().string());
  return out;
}

}  // namespace

TEST_F(CliTest, AnalyzeToyWritesEveryArtifactWithHandValues) {
  const auto out = dir_ / "report";
  const auto r = sh("'" + kCli + "' analyze" + toy_args() + " -o '" + out.string() + "'", dir_);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(listing(out), (std::set<std::string>{"diagnostics.json", "events.csv", "directory_resolved.csv",
                                                  "frames.csv", "frame_diagnostics.json", "metrics.csv", "graph.csv",
                                                  "scores.csv", "table2_logit.json", "table3_anova.json",
                                                  "figure2_ttests.json"}));
  const auto metrics = slurp(out / "metrics.csv");
  EXPECT_NE(metrics.find("\na@toy.example,ADMIN,1,4,7,4,3,-1,,15,0.5,,0.9,"), std::string::npos) << metrics;
  EXPECT_NE(metrics.find("\nb@toy.example,PRODUCT,2,1,0,1,2,1,2,,,1,0.2,"), std::string::npos);
  EXPECT_NE(metrics.find("\nc@toy.example,AWARD,2,2,2,2,2,0,28,3,0,0,0.6,"), std::string::npos);
  EXPECT_NE(metrics.find("\nd@toy.example,NONE,3,2,0,1,2,1,3,,,0,0.6,"), std::string::npos);
  EXPECT_NE(metrics.find("\ne@toy.example,NONE,3,1,0,1,0,-1,,,,,0.2,"), std::string::npos);
  EXPECT_EQ(slurp(out / "scores.csv"),
            "position,address,label,model7_score\n1,a@toy.example,ADMIN,0.156771\n2,c@toy.example,AWARD,0.00977165\n");
  EXPECT_NE(slurp(out / "diagnostics.json").find("\"cohort_size\": 5"), std::string::npos);
}

TEST_F(CliTest, MissingDirectoryIsAConfigErrorWithNoOutputs) {
  const auto out = dir_ / "report";
  const auto r = sh("'" + kCli + "' analyze -i '" + kData + "/toy/events.csv' -d '" + (dir_ / "absent.csv").string() +
                        "' -o '" + out.string() + "'",
                    dir_);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("\"kind\":\"config_error\""), std::string::npos) << r.err;
  EXPECT_TRUE(listing(out).empty());
}

TEST_F(CliTest, AnalysisFailureLeavesNoPartialArtifacts) {
  const auto empty_log = dir_ / "empty.csv";
  std::ofstream(empty_log) << "message_uid,timestamp,sender,recipient,channel\n";
  const auto out = dir_ / "report";
  const auto r = sh("'" + kCli + "' analyze -i '" + empty_log.string() + "' -d '" + kData + "/toy/directory.csv' -o '" +
                        out.string() + "'",
                    dir_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("\"status\":\"error\""), std::string::npos) << r.err;
  EXPECT_TRUE(listing(out).empty());
}

TEST_F(CliTest, UnknownFlagAndBadEnumAreConfigErrors) {
  EXPECT_EQ(sh("'" + kCli + "' analyze --bogus", dir_).status, 2);
  EXPECT_EQ(sh("'" + kCli + "' analyze" + toy_args() + " --percentile-scope galaxy -o '" + dir_.string() + "'", dir_).status,
            2);
  EXPECT_EQ(sh("'" + kCli + "' analyze" + toy_args() + " --stats logit,vibes -o '" + dir_.string() + "'", dir_).status, 2);
  EXPECT_EQ(sh("'" + kCli + "' analyze" + toy_args() + " --horizon-days 0 -o '" + dir_.string() + "'", dir_).status, 2);
}

TEST_F(CliTest, ConfigFileAndEnvironmentOutputDirectory) {
  const auto cfg = dir_ / "run.toml";
  std::ofstream(cfg) << "[metrics]\ninput = [\"" << kData << "/toy/events.csv\"]\ndirectory = \"" << kData
                     << "/toy/directory.csv\"\nno-cc = true\n";
  const auto out = dir_ / "from_env";
  const auto r = sh("INNONET_OUT_DIR='" + out.string() + "' '" + kCli + "' metrics --config '" + cfg.string() + "'", dir_);
  ASSERT_EQ(r.status, 0) << r.err;
  // Without CC copies, a's only answered frame is the 2-hour one.
  EXPECT_NE(slurp(out / "metrics.csv").find("\na@toy.example,ADMIN,1,4,7,3,3,0,,2,1,"), std::string::npos)
      << slurp(out / "metrics.csv");
}

TEST_F(CliTest, SimulatePipedIntoAnalyzeRanksAdministratorsHigh) {
  const auto dir_file = dir_ / "directory.csv";
  const auto out = dir_ / "report";
  const auto r = sh("'" + kCli + "' simulate --seed 7 --directory-out '" + dir_file.string() + "' | '" + kCli +
                        "' analyze -i - -d '" + dir_file.string() + "' -o '" + out.string() + "'",
                    dir_);
  ASSERT_EQ(r.status, 0) << r.err;

  std::ifstream scores(out / "scores.csv");
  std::string line;
  std::getline(scores, line);
  std::vector<bool> admin;
  while (std::getline(scores, line)) admin.push_back(line.find(",ADMIN,") != std::string::npos);
  const std::size_t n = admin.size();
  const std::size_t admins = static_cast<std::size_t>(std::count(admin.begin(), admin.end(), true));
  const std::size_t top = n / 10;
  const std::size_t hits = static_cast<std::size_t>(std::count(admin.begin(), admin.begin() + top, true));
  ASSERT_GT(n, 1500u);
  ASSERT_EQ(admins, 26u);

  // Hypergeometric upper tail: chance of at least `hits` administrators in a
  // random draw of `top` from `n` scored actors.
  const auto log_choose = [](double a, double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
  double tail = 0;
  for (std::size_t k = hits; k <= std::min(top, admins); ++k)
    tail += std::exp(log_choose(admins, k) + log_choose(n - admins, top - k) - log_choose(n, top));
  EXPECT_GT(hits, top * admins / n);
  EXPECT_LT(tail, 0.01) << hits << " administrators in the top " << top;
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const auto corpus = dir_ / "corpus";
  ASSERT_EQ(sh("'" + kCli + "' simulate --seed 5 --days 7 -o '" + corpus.string() + "'", dir_).status, 0);
  const std::string in = " -i '" + (corpus / "events.csv").string() + "' -d '" + (corpus / "directory.csv").string() + "'";
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(sh("'" + kCli + "' analyze" + in + " --threads 1 -o '" + a.string() + "'", dir_).status, 0);
  ASSERT_EQ(sh("'" + kCli + "' analyze" + in + " --threads 3 -o '" + b.string() + "'", dir_).status, 0);
  const auto files = listing(a);
  ASSERT_EQ(files, listing(b));
  ASSERT_EQ(files.size(), 11u);
  for (const auto& f : files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  const auto again = dir_ / "corpus2";
  ASSERT_EQ(sh("'" + kCli + "' simulate --seed 5 --days 7 -o '" + again.string() + "'", dir_).status, 0);
  for (const auto& f : {"events.csv", "directory.csv", "ground_truth.json"})
    EXPECT_EQ(slurp(corpus / f), slurp(again / f)) << f;
}
