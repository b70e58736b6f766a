#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

// Runs the CLI with stdout discarded and stderr captured.
RunResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path err = dir / "stderr.txt";
  std::string cmd = std::string(WSAW_CLI_PATH) + " " + args + " >/dev/null 2>" +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(status);
  std::ifstream f(err);
  std::stringstream ss;
  ss << f.rdbuf();
  res.stderr_text = ss.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wsaw_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli enumerate writes the exact free-walk count") {
  TempDir tmp;
  fs::path out = tmp.path / "enum.csv";
  RunResult r = run_cli("enumerate --dim 5 --beta 0 --n 3 --out " + out.string(), tmp.path);
  REQUIRE(r.exit_code == 0);
  std::string body = slurp(out);
  CHECK(body.find("n,c_n,msd") != std::string::npos);
  CHECK(body.find("3,1000,") != std::string::npos);
  CHECK(fs::exists(out.string() + ".manifest.json"));
  CHECK(fs::exists(out.string() + ".endpoints.csv"));
}

TEST_CASE("cli runs are byte-identical under the same seed") {
  TempDir tmp;
  fs::path a = tmp.path / "a.csv";
  fs::path b = tmp.path / "b.csv";
  std::string common = "metropolis --dim 2 --beta 0.2 --n 10 --seed 42 --chains 1 --out ";
  REQUIRE(run_cli(common + a.string(), tmp.path).exit_code == 0);
  REQUIRE(run_cli(common + b.string(), tmp.path).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a.string() + ".trace.csv") == slurp(b.string() + ".trace.csv"));
}

TEST_CASE("cli manifest round trip reproduces the outputs") {
  TempDir tmp;
  fs::path out = tmp.path / "perm.csv";
  REQUIRE(run_cli("perm --dim 3 --beta 0.1 --n 12 --tours 200 --seed 9 --out " +
                      out.string(),
                  tmp.path)
              .exit_code == 0);
  std::string first = slurp(out);
  REQUIRE(run_cli("--from-manifest " + out.string() + ".manifest.json", tmp.path)
              .exit_code == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("cli rejects invalid configs with a parseable reason") {
  TempDir tmp;
  fs::path out = tmp.path / "x.csv";
  RunResult r =
      run_cli("enumerate --dim 2 --beta 1.5 --n 3 --out " + out.string(), tmp.path);
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.rfind("error: invalid-config:", 0) == 0);
  CHECK(r.stderr_text.find('\n') == r.stderr_text.size() - 1);  // single line
}

TEST_CASE("cli reports budget exhaustion with a distinct exit code") {
  TempDir tmp;
  fs::path out = tmp.path / "big.csv";
  RunResult r = run_cli(
      "enumerate --dim 5 --beta 0.1 --n 9 --budget small --out " + out.string(),
      tmp.path);
  CHECK(r.exit_code == 3);
  CHECK(r.stderr_text.rfind("error: budget-exceeded:", 0) == 0);
}

TEST_CASE("cli lace-check passes the identity tolerance") {
  TempDir tmp;
  fs::path out = tmp.path / "lace.csv";
  RunResult r =
      run_cli("lace-check --dim 2 --n 4 --out " + out.string(), tmp.path);
  REQUIRE(r.exit_code == 0);
  std::string body = slurp(out);
  CHECK(body.find("n,beta,max_residual") != std::string::npos);
}
