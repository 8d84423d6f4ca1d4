#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("roppt_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

TempDir& tmp() {
  static TempDir dir;
  return dir;
}

int run_cli(const std::string& args, const std::string& capture = "") {
  std::string out = capture.empty() ? tmp().file("last_output.txt") : capture;
  std::string cmd = std::string(ROPPT_CLI_PATH) + " " + args + " >" + out + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

const char* kCanonicalJsonl =
    R"({"tokens": ["a", "routine", "exercise", "became", "bogged", "down"], "heads": [2, 2, 3, -1, 3, 4], "target_idx": 4, "label": 1})"
    "\n";

}  // namespace

TEST_CASE("prune command") {
  write_file(tmp().file("canon.jsonl"), kCanonicalJsonl);

  SUBCASE("tree:1 retains the target's tree neighborhood") {
    int code = run_cli("prune --input " + tmp().file("canon.jsonl") +
                       " --strategy tree:1 --output " + tmp().file("mask.jsonl"));
    CHECK(code == 0);
    auto j = nlohmann::json::parse(slurp(tmp().file("mask.jsonl")));
    CHECK(j["retained"] == nlohmann::json::array({3, 4, 5}));
    CHECK(j["compression"] == doctest::Approx(0.5));
  }
  SUBCASE("full strategy keeps everything") {
    int code = run_cli("prune --input " + tmp().file("canon.jsonl") +
                       " --strategy full --output " + tmp().file("maskf.jsonl"));
    CHECK(code == 0);
    auto j = nlohmann::json::parse(slurp(tmp().file("maskf.jsonl")));
    CHECK(j["retained"].size() == 6);
    CHECK(j["compression"] == 1.0);
  }
  SUBCASE("negative neighbor range is a usage error") {
    CHECK(run_cli("prune --input " + tmp().file("canon.jsonl") +
                  " --strategy tree:-1 --output " + tmp().file("x.jsonl")) == 2);
  }
  SUBCASE("unknown strategy is a usage error") {
    CHECK(run_cli("prune --input " + tmp().file("canon.jsonl") + " --strategy bogus --output " +
                  tmp().file("x.jsonl")) == 2);
  }
  SUBCASE("missing input file") {
    CHECK(run_cli("prune --input " + tmp().file("absent.jsonl") + " --strategy tree:1 --output " +
                  tmp().file("x.jsonl")) == 2);
  }
  SUBCASE("repeated runs are byte-identical") {
    run_cli("gen --seed 3 --n 40 --min-len 4 --max-len 25 --output " + tmp().file("g.jsonl"));
    REQUIRE(run_cli("prune --input " + tmp().file("g.jsonl") + " --strategy tree:2 --output " +
                    tmp().file("m1.jsonl")) == 0);
    REQUIRE(run_cli("prune --input " + tmp().file("g.jsonl") + " --strategy tree:2 --output " +
                    tmp().file("m2.jsonl")) == 0);
    CHECK(slurp(tmp().file("m1.jsonl")) == slurp(tmp().file("m2.jsonl")));
  }
}

TEST_CASE("gen command is deterministic and valid") {
  REQUIRE(run_cli("gen --seed 11 --n 25 --min-len 4 --max-len 15 --output " +
                  tmp().file("gen1.jsonl")) == 0);
  REQUIRE(run_cli("gen --seed 11 --n 25 --min-len 4 --max-len 15 --output " +
                  tmp().file("gen2.jsonl")) == 0);
  CHECK(slurp(tmp().file("gen1.jsonl")) == slurp(tmp().file("gen2.jsonl")));
  std::istringstream lines(slurp(tmp().file("gen1.jsonl")));
  int count = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++count;
  CHECK(count == 25);
  CHECK(run_cli("gen --seed 1 --n 10 --min-len 2 --max-len 9 --output " +
                tmp().file("bad.jsonl")) == 2);
}

TEST_CASE("train, eval and stats") {
  REQUIRE(run_cli("gen --seed 4 --n 40 --min-len 4 --max-len 14 --marker-range 1 --output " +
                  tmp().file("corpus.jsonl")) == 0);
  const std::string train_flags = "train --input " + tmp().file("corpus.jsonl") +
                                  " --strategy tree:1 --epochs 2 --batch 8 --lr 0.05 --seed 9 "
                                  "--dim 8 --layers 1";

  SUBCASE("repeated training is byte-identical") {
    REQUIRE(run_cli(train_flags + " --save " + tmp().file("p1.bin")) == 0);
    REQUIRE(run_cli(train_flags + " --save " + tmp().file("p2.bin")) == 0);
    std::string a = slurp(tmp().file("p1.bin"));
    REQUIRE(!a.empty());
    CHECK(a == slurp(tmp().file("p2.bin")));
    CHECK(a.substr(0, 6) == "ROPPT1");
  }
  SUBCASE("zero learning rate gives a flat history") {
    REQUIRE(run_cli("train --input " + tmp().file("corpus.jsonl") +
                    " --strategy tree:1 --epochs 2 --batch 8 --lr 0 --seed 9 --dim 8 "
                    "--layers 1 --save " +
                    tmp().file("pz.bin") + " --history " + tmp().file("hz.json")) == 0);
    auto j = nlohmann::json::parse(slurp(tmp().file("hz.json")));
    REQUIRE(j["history"].size() == 2);
    CHECK(j["history"][0]["loss"] == j["history"][1]["loss"]);
  }
  SUBCASE("eval reads the saved params back") {
    REQUIRE(run_cli(train_flags + " --save " + tmp().file("pe.bin")) == 0);
    int code = run_cli("eval --input " + tmp().file("corpus.jsonl") + " --params " +
                           tmp().file("pe.bin") + " --strategy tree:1 --json",
                       tmp().file("eval.json"));
    CHECK(code == 0);
    auto j = nlohmann::json::parse(slurp(tmp().file("eval.json")));
    CHECK(j.contains("f1"));
    CHECK(j["total"] == 40);
  }
  SUBCASE("stats prints the bucket table") {
    int code = run_cli("stats --input " + tmp().file("corpus.jsonl") + " --strategy tree:2",
                       tmp().file("stats.txt"));
    CHECK(code == 0);
    std::string out = slurp(tmp().file("stats.txt"));
    CHECK(out.find("bucket") != std::string::npos);
    CHECK(out.find("<20") != std::string::npos);
  }
}

TEST_CASE("compare command") {
  REQUIRE(run_cli("gen --seed 6 --n 50 --min-len 4 --max-len 14 --marker-range 1 --output " +
                  tmp().file("cmp.jsonl")) == 0);
  SUBCASE("four strategies produce four rows in input order") {
    int code = run_cli("compare --input " + tmp().file("cmp.jsonl") +
                           " --strategies tree:4,window:4,chunk,full --epochs 2 --batch 8 "
                           "--dim 8 --seed 3",
                       tmp().file("cmp.txt"));
    CHECK(code == 0);
    std::string out = slurp(tmp().file("cmp.txt"));
    std::size_t prev = 0;
    for (const char* name : {"tree:4", "window:4", "chunk", "full"}) {
      auto pos = out.find(name, prev);
      REQUIRE(pos != std::string::npos);
      prev = pos;
    }
  }
  SUBCASE("a single strategy is a usage error") {
    CHECK(run_cli("compare --input " + tmp().file("cmp.jsonl") +
                  " --strategies tree:1 --epochs 1 --dim 8") == 2);
  }
}

TEST_CASE("conllu input works through the CLI") {
  write_file(tmp().file("tiny.conllu"),
             "# target_idx = 1\n"
             "# label = 1\n"
             "1\tthe\t_\t_\t_\t_\t2\tdet\t_\t_\n"
             "2\tidea\t_\t_\t_\t_\t0\troot\t_\t_\n"
             "\n");
  int code = run_cli("prune --input " + tmp().file("tiny.conllu") +
                     " --format conllu --strategy tree:0 --output " + tmp().file("cm.jsonl"));
  CHECK(code == 0);
  auto j = nlohmann::json::parse(slurp(tmp().file("cm.jsonl")));
  CHECK(j["retained"] == nlohmann::json::array({1}));
}

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("prune") == 2);  // missing required flags
}
