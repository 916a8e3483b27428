#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "maskopt/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "maskopt_cli_test";

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MASKOPT_CLI + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_json(const std::string& name, const nlohmann::json& j) {
  const fs::path p = work / name;
  std::ofstream(p) << j.dump();
  return p;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

struct Scratch {
  Scratch() {
    fs::remove_all(work);
    fs::create_directories(work);
  }
};

}  // namespace

TEST_CASE("dataset on disk drives the same sweep as the in-memory suite") {
  Scratch s;
  const fs::path data = work / "data";
  REQUIRE(cli("synth --n 12 --out " + data.string()) == 0);
  CHECK(maskopt::load_dataset(data).size() == 12);

  const auto small = write_json("small.json", {{"generation", {{"n", 12}}}, {"backend", "fmm"}});
  const auto disk = write_json("disk.json", {{"dataset", data.string()}, {"backend", "fmm"}});
  REQUIRE(cli("sweep-dilate --config " + small.string() + " --out " + (work / "mem").string()) == 0);
  REQUIRE(cli("sweep-dilate --config " + disk.string() + " --out " + (work / "disk").string()) == 0);

  const auto mem_csv = work / "mem" / "sweep_dilation.csv";
  CHECK(line_count(mem_csv) == 1 + 12 * 6);
  CHECK(slurp(mem_csv) == slurp(work / "disk" / "sweep_dilation.csv"));
  CHECK(slurp(work / "mem" / "sweep_dilation_table.csv").rfind("metric,bin,d=-2,d=0,d=+2,d=+4,d=+6,d=+8", 0) == 0);
}

TEST_CASE("every subcommand runs on a small suite") {
  Scratch s;
  const auto small = write_json("small.json", {{"generation", {{"n", 8}}}, {"backend", "fmm"}});
  const std::string base = "--config " + small.string() + " --out " + (work / "out").string();
  CHECK(cli("sweep-alpha " + base) == 0);
  CHECK(fs::exists(work / "out" / "sweep_alpha_summary.json"));
  CHECK(cli("sweep-alpha --alpha-units pixels " + base) == 0);
  CHECK(cli("contrast-masks " + base) == 0);
  CHECK(fs::exists(work / "out" / "contrast_masks.csv"));
  CHECK(cli("render --sample 3 " + base) == 0);
  CHECK(fs::exists(work / "out" / "dilation_panel.png"));
  CHECK(fs::exists(work / "out" / "contour_alpha_0.03.png"));
  CHECK(cli("eval-one --sample 2 --alpha 0.05 " + base) == 0);
  const auto result = nlohmann::json::parse(slurp(work / "out" / "eval_result.json"));
  CHECK(result.contains("psnr"));
  CHECK(cli("sweep-dilate --masked-only " + base) == 0);
}

TEST_CASE("exit codes") {
  Scratch s;
  const auto small = write_json("small.json", {{"generation", {{"n", 8}}}, {"backend", "fmm"}});
  const std::string out = " --out " + (work / "out").string();
  CHECK(cli("sweep-dilate --backend telea" + out) == 2);
  CHECK(cli("frobnicate" + out) == 2);
  CHECK(cli("sweep-dilate --config " + write_json("bad.json", {{"colour", 1}}).string() + out) == 2);
  CHECK(cli("sweep-dilate --config " + (work / "absent.json").string() + out) == 2);
  CHECK(cli("eval-one --sample 0 --segment-id 99 --config " + small.string() + out) == 2);
  CHECK(cli("sweep-dilate --config " +
            write_json("nodata.json", {{"dataset", (work / "nowhere").string()}}).string() + out) == 3);
  const auto eroded = write_json("eroded.json", {{"generation", {{"n", 8}}}, {"backend", "fmm"}, {"d_values", {-64, 0}}});
  CHECK(cli("sweep-dilate --config " + eroded.string() + out) == 4);
}
