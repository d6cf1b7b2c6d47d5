// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the raisr executable and checks exit codes and outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "raisr_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(RAISR_CLI) + " " + args + " >" + (kRoot / "stdout.txt").string() +
                          " 2>" + (kRoot / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_pgm(const fs::path& p, int w, int h, int seed) {
  std::ofstream out(p, std::ios::binary);
  out << "P5\n" << w << " " << h << "\n255\n";
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out.put(char(128 + 90 * std::sin(0.3 * c + 0.17 * r * (1 + seed % 3) + seed)));
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Trains one small bank shared by the cases below.
struct Setup {
  fs::path corpus = kRoot / "corpus";
  fs::path bank = kRoot / "bank.bin";
  fs::path input = kRoot / "in.pgm";

  Setup() {
    static bool done = false;
    if (done) return;
    fs::remove_all(kRoot);
    fs::create_directories(corpus);
    for (int i = 0; i < 3; ++i) write_pgm(corpus / ("img" + std::to_string(i) + ".pgm"), 48, 48, i);
    write_pgm(input, 24, 20, 7);
    REQUIRE(run("train --corpus " + q(corpus) + " --out " + q(bank) + " --filter-size 5 --angle-bins 8 --report " +
                q(kRoot / "train.json")) == 0);
    done = true;
  }
};

}  // namespace

TEST_CASE("train writes a bank and a report") {
  Setup s;
  // header, four threshold doubles, 72 keys x 4 pixel types x 25 taps
  CHECK(fs::file_size(s.bank) == 24 + 4 * 8 + 72 * 4 * 25 * 8);
  CHECK(slurp(kRoot / "train.json").find("raisr-train-report/1") != std::string::npos);
}

TEST_CASE("training is byte-identical across thread counts") {
  Setup s;
  const auto b8 = kRoot / "bank8.bin";
  REQUIRE(run("train --corpus " + q(s.corpus) + " --out " + q(b8) +
              " --filter-size 5 --angle-bins 8 --threads 8") == 0);
  CHECK(slurp(b8) == slurp(s.bank));
}

TEST_CASE("upscale and the initial-only path") {
  Setup s;
  const auto out = kRoot / "out.pgm", init = kRoot / "init.pgm", bic = kRoot / "bic.pgm";
  REQUIRE(run("upscale " + q(s.input) + " " + q(out) + " --bank " + q(s.bank) + " --blend-map " +
              q(kRoot / "map.pgm")) == 0);
  CHECK(slurp(out).rfind("P5\n48 40\n255\n", 0) == 0);
  CHECK(fs::exists(kRoot / "map.pgm"));

  // --initial-only equals plain bicubic with everything else off.
  REQUIRE(run("upscale " + q(s.input) + " " + q(init) + " --bank " + q(s.bank) + " --initial-only") == 0);
  REQUIRE(run("upscale " + q(s.input) + " " + q(bic) + " --bank " + q(s.bank) +
              " --initial-only --blend none --bp-iters 0") == 0);
  CHECK(slurp(init) == slurp(bic));
  CHECK(slurp(init) != slurp(out));
}

TEST_CASE("sharpen, evaluate and dump-filters") {
  Setup s;
  CHECK(run("sharpen " + q(s.input) + " " + q(kRoot / "sharp.pgm") + " --preset detail") == 0);
  CHECK(run("sharpen " + q(s.input) + " " + q(kRoot / "sharp2.pgm") + " --layers 1:0.5:none") == 0);
  CHECK(run("evaluate --hr " + q(s.corpus) + " --bank " + q(s.bank) + " --json " + q(kRoot / "eval.json")) == 0);
  CHECK(slurp(kRoot / "stdout.txt").find("mean") != std::string::npos);
  CHECK(slurp(kRoot / "eval.json").find("raisr-eval-report/1") != std::string::npos);
  CHECK(run("dump-filters --bank " + q(s.bank) + " " + q(kRoot / "grid.png")) == 0);
  for (int t = 0; t < 4; ++t) CHECK(fs::exists(kRoot / ("grid_t" + std::to_string(t) + ".png")));
}

TEST_CASE("exit codes") {
  Setup s;
  // 1: usage
  CHECK(run("") == 1);
  CHECK(run("bogus") == 1);
  CHECK(run("train --corpus " + q(s.corpus)) == 1);
  CHECK(run("train --corpus " + q(s.corpus) + " --out " + q(kRoot / "x.bin") + " --filter-size 4") == 1);
  CHECK(run("upscale " + q(s.input) + " " + q(kRoot / "o.pgm") + " --bank " + q(s.bank) + " --scale 3") == 1);
  CHECK(run("sharpen " + q(s.input) + " " + q(kRoot / "o.pgm") + " --preset detail --layers 1:1:none") == 1);
  CHECK(run("sharpen " + q(s.input) + " " + q(kRoot / "o.pgm") + " --preset nope") == 1);
  CHECK(run("upscale " + q(s.input) + " " + q(kRoot / "o.pgm") + " --bank " + q(s.bank) + " --blend fancy") == 1);
  // 2: I/O
  CHECK(run("upscale " + q(kRoot / "missing.pgm") + " " + q(kRoot / "o.pgm") + " --bank " + q(s.bank)) == 2);
  CHECK(run("upscale " + q(s.input) + " " + q(kRoot / "o.pgm") + " --bank " + q(kRoot / "missing.bin")) == 2);
  {
    std::ofstream bad(kRoot / "truncated.bin", std::ios::binary);
    const auto bytes = slurp(s.bank);
    bad.write(bytes.data(), std::streamsize(bytes.size() - 8));
  }
  CHECK(run("upscale " + q(s.input) + " " + q(kRoot / "o.pgm") + " --bank " + q(kRoot / "truncated.bin")) == 2);
  CHECK(run("train --corpus " + q(kRoot / "nowhere") + " --out " + q(kRoot / "x.bin")) == 2);
  CHECK(!slurp(kRoot / "stderr.txt").empty());
}
