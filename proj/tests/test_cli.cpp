#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "opgrowth/cli.hpp"
#include "opgrowth/error.hpp"

using namespace opgrowth;
using namespace opgrowth::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "opgrowth_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config text parsing") {
  auto kv = parse_config_text("# comment\nalpha = 1.7\nq_star=3  # trailing\n\n");
  CHECK(kv.at("alpha") == "1.7");
  CHECK(kv.at("q-star") == "3");
  CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("alpha 1.5\n"), ConfigError);
}

TEST_CASE("default configuration") {
  auto c = default_config("bounds");
  CHECK(c.get_double("r") == 127.0);
  CHECK(c.get_double("alpha") == 1.5);
  CHECK_FALSE(c.has("m"));
  CHECK_FALSE(c.get_bool("adaptive-tau"));
  CHECK_THROWS_AS(default_config("nope"), ConfigError);
  CHECK_THROWS_AS(c.get("nope"), ConfigError);
  auto o = default_config("oracle-compare");
  CHECK(o.get_int("m") == 2);
  CHECK(o.get_int("q-star") == 2);
}

TEST_CASE("parse errors exit with code 2") {
  auto r = run_cli({"bounds", "--no-such-flag", "1"});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("error") != std::string::npos);
  CHECK(run_cli({}).code == kExitConfigError);
  CHECK(run_cli({"bounds", "--alpha", "abc"}).code == kExitConfigError);
  CHECK(run_cli({"bounds", "--kind", "magic"}).code == kExitConfigError);
}

TEST_CASE("unknown config file key exits with code 2") {
  auto path = scratch("bad.cfg");
  std::ofstream(path) << "alpha = 1.5\nfoo = 2\n";
  auto r = run_cli({"bounds", "--config", path.string()});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("foo") != std::string::npos);
}

TEST_CASE("config file then flags") {
  auto path = scratch("good.cfg");
  std::ofstream(path) << "alpha = 2.5\nr = 63\n";
  auto r = run_cli({"bounds", "--config", path.string(), "--r", "31"});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["alpha"] == "2.5");
  CHECK(j["config"]["r"] == "31");
}

TEST_CASE("bounds JSON carries the regime") {
  auto r = run_cli({"bounds", "--alpha", "1.5", "--r", "127"});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["report"]["regime"] == "1<alpha<2");
  CHECK(j["report"]["bound"].get<double>() > 0.0);
  CHECK(r.err.find("bounds frobenius") != std::string::npos);

  auto all = run_cli({"bounds", "--kind", "all", "--alpha", "2.5", "--r", "127"});
  REQUIRE(all.code == kExitOk);
  CHECK(nlohmann::json::parse(all.out)["reports"].size() == 3);
}

TEST_CASE("output file is written atomically") {
  auto path = scratch("bounds.json");
  std::filesystem::remove(path);
  auto r = run_cli({"bounds", "--out", path.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(std::filesystem::exists(path));
  CHECK(r.out.find("bounds") != std::string::npos);
  auto j = nlohmann::json::parse(slurp(path));
  CHECK(j.contains("report"));
  for (const auto& e : std::filesystem::directory_iterator(path.parent_path()))
    CHECK(e.path().string().find(".tmp") == std::string::npos);
}

TEST_CASE("protocol subcommand") {
  auto r = run_cli({"protocol", "--r", "1000"});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schedule"]["params"]["m"] == 14);
  CHECK(j["schedule"]["params"]["q_star"] == 3);
  CHECK(j["schedule"]["layers"].size() == 14);
  CHECK(j["recursion"]["rows"].size() == 3);
  CHECK(run_cli({"protocol", "--r", "2"}).code == kExitConfigError);
}

TEST_CASE("reduced subcommand is deterministic") {
  const std::vector<std::string> args{"reduced", "--m", "5", "--q-star", "2", "--trials", "30", "--seed", "4"};
  auto a = run_cli(args);
  auto b = run_cli(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j.contains("success"));
}

TEST_CASE("quick verify passes") {
  auto r = run_cli({"verify", "--trials", "10", "--seed", "2"});
  CHECK(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);
}

TEST_CASE("oracle comparison passes") {
  auto r = run_cli({"oracle-compare", "--trials", "5"});
  CHECK(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["sites"] == 4);
  CHECK(run_cli({"oracle-compare", "--m", "3", "--q-star", "2"}).code == kExitConfigError);
}

TEST_CASE("sweep CSV") {
  auto r = run_cli({"sweep", "--lo", "1000", "--hi", "100000", "--points", "4", "--trials", "0"});
  REQUIRE(r.code == kExitOk);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].back() == "seed");
  const auto& header = rows[0];
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  double prev = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == header.size());
    const double t = std::stod(rows[k][col("t_qstar")]);
    CHECK(t >= prev);
    prev = t;
    CHECK_FALSE(rows[k][col("seed")].empty());
  }
  CHECK(r.out.find("# loglog_slope t_qstar") != std::string::npos);
  CHECK(run_cli({"sweep", "--param", "m"}).code == kExitConfigError);
  CHECK(run_cli({"sweep", "--lo", "1000", "--hi", "100000", "--points", "4", "--trials", "0"}).out == r.out);
}

TEST_CASE("installed binary reports usage errors") {
  const char* bin = std::getenv("OPGROWTH_CLI");
  if (!bin) return;
  const std::string cmd = std::string(bin) + " bounds --bogus > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == kExitConfigError);
  const std::string ok = std::string(bin) + " bounds > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(ok.c_str())) == kExitOk);
}
