#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "usc/cli.hpp"

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = usc::run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string sc = std::string(USC_SPEC_DIR) + "/sc3.toml";
const std::string kz = std::string(USC_SPEC_DIR) + "/kz_1_28.toml";

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"validate", "--spec", sc}).code == 0);
  CHECK(run({"validate", "--spec", "/nonexistent.toml"}).code == 1);
  CHECK(run({"validate", "--bogus-flag"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"network", "--spec", sc, "--level", "14"}).code == 1);
}

TEST_CASE("validation failure exits 1") {
  const std::string path = "cli_bad_spec.toml";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs("k = 4\noffsets = [[\"0\",\"0\"],[\"1/4\",\"0\"],[\"1/2\",\"0\"],[\"3/4\",\"0\"],"
               "[\"3/4\",\"1/4\"],[\"3/4\",\"1/2\"],[\"3/4\",\"3/4\"],[\"1/2\",\"3/4\"],[\"1/4\",\"3/4\"],"
               "[\"0\",\"3/4\"],[\"0\",\"1/2\"],[\"0\",\"1/4\"],[\"1/4\",\"1/4\"]]\n",
               f);
    std::fclose(f);
  }
  const auto r = run({"validate", "--spec", path, "--json"});
  CHECK(r.code == 1);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["result"]["report"]["symmetric"] == false);
  std::remove(path.c_str());
}

TEST_CASE("JSON documents are identical across worker counts") {
  const auto a = run({"renorm", "--spec", sc, "--levels", "1..3", "--json", "--workers", "1"});
  const auto b = run({"renorm", "--spec", sc, "--levels", "1..3", "--json", "--workers", "4"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["command"] == "renorm");
  CHECK(doc["version"] == "0.1.0");
  CHECK(doc.contains("config"));
  CHECK(doc.contains("result"));

  const auto w1 = run({"walk", "--spec", sc, "--levels", "2..3", "--walks", "200", "--json", "--workers", "1"});
  const auto w4 = run({"walk", "--spec", sc, "--levels", "2..3", "--walks", "200", "--json", "--workers", "4"});
  REQUIRE(w1.code == 0);
  CHECK(w1.out == w4.out);
}

TEST_CASE("config files are overridden by flags") {
  const std::string path = "cli_config.json";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs(("{\"spec\": \"" + kz + "\", \"level\": 1}").c_str(), f);
    std::fclose(f);
  }
  const auto r = run({"network", "--config", path, "--level", "2", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["config"]["level"] == 2);
  CHECK(doc["config"]["spec"] == kz);
  std::remove(path.c_str());
}

TEST_CASE("geodesic and metric commands") {
  const auto g = run({"geodesic", "--spec", sc, "--level", "2", "--x", "0,0", "--y", "1,0", "--json"});
  REQUIRE(g.code == 0);
  const auto doc = nlohmann::json::parse(g.out);
  CHECK(doc["result"]["upper"] == 1.0);
  CHECK(run({"metric", "--spec", sc, "--level", "2", "--x", "w:11", "--y", "w:55"}).code == 0);
  CHECK(run({"metric", "--spec", sc, "--level", "2", "--x", "zzz", "--y", "w:55"}).code == 1);
}

TEST_CASE("render writes SVG") {
  const auto r = run({"render", "--spec", sc, "--level", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("<svg") != std::string::npos);
}

TEST_CASE("installed binary reports usage errors") {
  const char* bin = std::getenv("CARPET_BIN");
  if (!bin) return;
  const std::string cmd = std::string(bin) + " validate --nope > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  const std::string ok = std::string(bin) + " validate --spec " + sc + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
}
