#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "chipletrank/manifest.hpp"
#include "chipletrank/scatter_io.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace chipletrank;
namespace t = chipletrank::testing;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string error_code(const Result& r) {
  REQUIRE(lines(r.err) >= 1);
  const std::string last = r.err.substr(r.err.rfind('\n', r.err.size() - 2) == std::string::npos
                                            ? 0
                                            : r.err.rfind('\n', r.err.size() - 2) + 1);
  return nlohmann::json::parse(last)["error"].get<std::string>();
}

struct Workspace {
  t::TempDir dir;
  std::string system = (dir / "sys.json").string();

  Workspace() { t::write_file(dir / "sys.json", serialize_system(t::asymmetric4())); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("sweep then label") {
  Workspace w;
  const Result sweep = run({"sweep", "--system", w.system, "--out", w.at("sweep.csv")});
  REQUIRE(sweep.code == 0);
  CHECK(sweep.out.empty());
  CHECK(lines(t::read_file(w.at("sweep.csv"))) == 25);

  const auto manifest = nlohmann::json::parse(t::read_file(w.at("sweep.csv.manifest.json")));
  CHECK(manifest["command"] == "sweep");
  CHECK(manifest["input_digests"][w.system] == file_digest(w.system));
  CHECK(manifest["outputs"][0] == w.at("sweep.csv"));

  const Result label = run({"label", "--in", w.at("sweep.csv"), "--out", w.at("labeled.csv")});
  REQUIRE(label.code == 0);
  const LabeledScatter lab = load_labeled_csv(w.at("labeled.csv"));
  CHECK(lab.points.size() == 24);

  const Result to_stdout = run({"sweep", "--system", w.system});
  CHECK(to_stdout.code == 0);
  CHECK(to_stdout.out == t::read_file(w.at("sweep.csv")));
}

TEST_CASE("parallel sweep output is byte identical") {
  Workspace w;
  const Result one = run({"--parallel", "1", "sweep", "--system", w.system});
  const Result four = run({"sweep", "--system", w.system, "--parallel", "4"});
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("pairs, train and rank") {
  Workspace w;
  REQUIRE(run({"sweep", "--system", w.system, "--out", w.at("s.csv")}).code == 0);
  REQUIRE(run({"label", "--in", w.at("s.csv"), "--out", w.at("l.csv")}).code == 0);
  REQUIRE(run({"pairs", "--system", w.system, "--labeled", w.at("l.csv"), "--k", "5", "--out",
               w.at("pairs.csv")})
              .code == 0);
  const Result train = run({"train", "--system", w.system, "--pairs", w.at("pairs.csv"),
                            "--iterations", "20", "--batch", "8", "--out", w.at("model.json")});
  REQUIRE(train.code == 0);
  CHECK(train.err.find("trained on") != std::string::npos);
  const auto model = nlohmann::json::parse(t::read_file(w.at("model.json")));
  CHECK(model["meta"]["iterations"] == 20);

  const Result a = run({"rank", "--system", w.system, "--model", w.at("model.json"), "--top", "0"});
  const Result b = run({"rank", "--system", w.system, "--model", w.at("model.json"), "--top", "0"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("rank,order,score\n", 0) == 0);
  CHECK(lines(a.out) == 25);

  const Result again = run({"train", "--system", w.system, "--pairs", w.at("pairs.csv"),
                            "--iterations", "20", "--batch", "8", "--out", w.at("model2.json")});
  REQUIRE(again.code == 0);
  CHECK(t::read_file(w.at("model.json")) == t::read_file(w.at("model2.json")));

  const Result eval = run({"eval", "--test-system", w.system, "--test-labeled", w.at("l.csv"),
                           "--model", w.at("model.json"), "--out", w.at("report.txt")});
  REQUIRE(eval.code == 0);
  CHECK(t::read_file(w.at("report.txt")).find("Testing-average") != std::string::npos);
  CHECK(nlohmann::json::parse(t::read_file(w.at("report.json")))["rows"].size() == 1);

  const Result plot = run({"plot", "--labeled", w.at("l.csv"), "--highlight", "0-1-2-3", "--out",
                           w.at("plot.svg")});
  REQUIRE(plot.code == 0);
  CHECK(t::read_file(w.at("plot.svg")).find("class=\"hl\"") != std::string::npos);
}

TEST_CASE("baseline") {
  Workspace w;
  const Result r = run({"baseline", "--system", w.system});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("step,chiplet,name,importance,area_mm2,key") != std::string::npos);
  CHECK(lines(r.out) == 6);
}

TEST_CASE("usage errors") {
  Workspace w;
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{}, {"sweep"}, {"frobnicate"}, {"sweep", "--system", w.system, "--grid", "x"},
        {"sweep", "--system", w.system, "--orders", "some"}, {"train", "--system", w.system, "--pairs", "p", "--batch", "0"}}) {
    const Result r = run(args);
    CHECK(r.code == 1);
    CHECK(lines(r.err) == 1);
    CHECK_NOTHROW(nlohmann::json::parse(r.err));
  }
}

TEST_CASE("data errors") {
  Workspace w;
  t::write_file(w.dir / "broken.json", "{\"name\": ");
  Result r = run({"sweep", "--system", w.at("broken.json")});
  CHECK(r.code == 2);
  CHECK(error_code(r) == "MalformedFile");

  r = run({"sweep", "--system", w.at("absent.json")});
  CHECK(r.code == 2);
  CHECK(error_code(r) == "IoError");

  t::write_file(w.dir / "orders.txt", "0-1-2\n");
  r = run({"sweep", "--system", w.system, "--orders", "list", "--order-file", w.at("orders.txt")});
  CHECK(r.code == 2);
  CHECK(error_code(r) == "InvalidOrder");

  t::write_file(w.dir / "model.json", "{}");
  r = run({"rank", "--system", w.system, "--model", w.at("model.json")});
  CHECK(r.code == 2);
  CHECK(error_code(r) == "MalformedCheckpoint");
}

TEST_CASE("help and version") {
  const Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("sweep") != std::string::npos);
  const Result sub = run({"rank", "--help"});
  CHECK(sub.code == 0);
  CHECK(sub.out.find("--candidates") != std::string::npos);
}

}  // TEST_SUITE
