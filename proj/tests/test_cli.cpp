#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CKM_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ckm_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("run writes outputs and snapshots") {
  const fs::path dir = scratch("run");
  write(dir / "cfg.json", R"({"iterations": 12, "eval_every": 5, "eval_foreground": 50, "eval_background": 20})");
  const fs::path out = dir / "out";
  CHECK(run("run --config " + (dir / "cfg.json").string() + " --out " + out.string() +
            " --seed 7 --snapshot-every 4") == 0);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "summary.json"));
  for (int t : {4, 8, 12}) CHECK(fs::exists(out / ("bank_" + std::to_string(t) + ".json")));

  CHECK(run("inspect-bank --snapshot " + (out / "bank_8.json").string()) == 0);
  CHECK(run("report --out " + out.string()) == 0);
  CHECK(fs::exists(out / "metrics.json"));

  const fs::path again = dir / "again";
  CHECK(run("run --config " + (dir / "cfg.json").string() + " --out " + again.string() +
            " --seed 7") == 0);
  CHECK(read(out / "metrics.csv") == read(again / "metrics.csv"));
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  write(dir / "unknown.json", R"({"iterationz": 3})");
  write(dir / "broken.json", "{");
  write(dir / "bad_bank.json", R"({"version": "v0"})");
  CHECK(run("run --config " + (dir / "unknown.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("run --config " + (dir / "broken.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("run --config " + (dir / "missing.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("run --out " + (dir / "o").string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("inspect-bank --snapshot " + (dir / "bad_bank.json").string()) == 3);
  CHECK(run("report --out " + (dir / "nothing").string()) == 3);
}
