#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "checksum.hpp"
#include "cli.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using cbf_surrogate::testing::TempDir;
using cbf_surrogate::testing::read_text;
using cbf_surrogate::testing::write_text;

namespace {

struct Captured {
  int code = 0;
  std::string out, err;
};

Captured run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cbf_surrogate");
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Captured c;
  c.code = cbf_surrogate::cli::run(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

std::size_t data_rows(const fs::path& csv) {
  const auto text = read_text(csv);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

const std::vector<std::string> kSmall{"--k-outer", "4", "--k-inner", "3", "--grid-c", "1,8",
                                      "--grid-gamma", "0.5,2", "--grid-epsilon", "0.1"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

}  // namespace

TEST_CASE("synth then analysis subcommands") {
  TempDir dir("cli");
  const auto cohort = (dir / "cohort").string();
  auto r = run_cli({"synth", "--n-subjects", "40", "--seed", "3", "--out", cohort});
  REQUIRE(r.code == 0);
  const auto manifest = (dir / "cohort/manifest.csv").string();
  CHECK(fs::exists(dir / "cohort/atlas.csv"));
  CHECK(fs::exists(dir / "cohort/run_meta.json"));

  SUBCASE("evaluate writes one row per lobe and range") {
    const auto out = dir / "eval";
    r = run_cli(with_small({"evaluate", "--manifest", manifest, "--ranges", "0.10,0.15,0.20",
                            "--out", out.string(), "--jobs", "2"}));
    REQUIRE(r.code == 0);
    CHECK(data_rows(out / "evaluation.csv") == 12);
    CHECK(fs::exists(out / "figures/lobe_frontal_f0.10.svg"));
    CHECK(fs::exists(out / "figures/lobe_temporal_f0.20.svg"));

    std::ifstream in(out / "run_meta.json");
    const auto meta = nlohmann::json::parse(in);
    CHECK(meta.at("seed") == 1);
    CHECK(meta.at("jobs") == 2);
    CHECK(meta.at("config").at("k_outer") == 4);
    std::size_t listed = 0;
    for (const auto& item : meta.at("artifacts").items()) {
      const auto expected = item.value().get<std::string>();
      CHECK(cbf_surrogate::cli::sha256_file(out / item.key()) == expected);
      ++listed;
    }
    CHECK(listed == 13);
  }

  SUBCASE("a non-standard range warns but runs") {
    r = run_cli(with_small({"predict", "--manifest", manifest, "--ranges", "0.125", "--regions",
                            "total", "--out", (dir / "p").string()}));
    CHECK(r.code == 0);
    CHECK(r.err.find("non-standard frequency range [0.01-0.125]") != std::string::npos);
    CHECK(data_rows(dir / "p/predictions.csv") == 40);
  }

  SUBCASE("features, demographics and groups") {
    r = run_cli({"features", "--manifest", manifest, "--regions", "lobes,roi:parietal_1",
                 "--out", (dir / "f").string()});
    REQUIRE(r.code == 0);
    CHECK(data_rows(dir / "f/features.csv") == 40 * 5);
    r = run_cli({"demographics", "--manifest", manifest, "--out", (dir / "d").string()});
    REQUIRE(r.code == 0);
    CHECK(data_rows(dir / "d/demographics.csv") == 4);
    r = run_cli(with_small({"groups", "--manifest", manifest, "--regions", "roi:parietal_1",
                            "--out", (dir / "g").string()}));
    REQUIRE(r.code == 0);
    CHECK(data_rows(dir / "g/groups.csv") == 6);
    r = run_cli(with_small({"cognition", "--manifest", manifest, "--regions", "total", "--out",
                            (dir / "g").string()}));
    CHECK(r.code == 1);
  }

  SUBCASE("sweep in prefix mode") {
    r = run_cli(with_small({"sweep", "--manifest", manifest, "--sweep-mode", "prefix", "--out",
                            (dir / "s").string()}));
    REQUIRE(r.code == 0);
    CHECK(data_rows(dir / "s/sweep.csv") == 8);
  }

  SUBCASE("config file values with command-line override") {
    const auto cfg = dir / "run.ini";
    write_text(cfg, "k-outer=100\nk-inner=3\nmanifest=" + manifest + "\n");
    r = run_cli({"predict", "--config", cfg.string(), "--out", (dir / "c").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("k exceeds n") != std::string::npos);
    r = run_cli(with_small({"predict", "--config", cfg.string(), "--regions", "total", "--out",
                            (dir / "c").string()}));
    CHECK(r.code == 0);
  }

  SUBCASE("input errors exit 1") {
    const auto out = (dir / "e").string();
    CHECK(run_cli({"predict", "--manifest", manifest, "--k-outer", "100", "--out", out}).code == 1);
    CHECK(run_cli({"evaluate", "--manifest", manifest, "--regions", "roi:nope", "--out", out})
              .code == 1);
    CHECK(run_cli({"evaluate", "--manifest", manifest, "--features", "everything", "--out", out})
              .code == 1);
    CHECK(run_cli({"evaluate", "--manifest", manifest, "--grid-c", "1,x", "--out", out}).code == 1);
    CHECK(run_cli({"evaluate", "--manifest", manifest, "--k-inner", "40", "--out", out}).code == 1);
    CHECK(run_cli({"evaluate", "--manifest", (dir / "missing.csv").string(), "--out", out})
              .code == 1);
  }

  SUBCASE("solver failure exits 2") {
    CHECK(run_cli(with_small({"predict", "--manifest", manifest, "--regions", "total", "--tol",
                              "1e-300", "--out", (dir / "t").string()}))
              .code == 2);
  }
}

TEST_CASE("k larger than the cohort is rejected before any work") {
  TempDir dir("cli_k");
  REQUIRE(run_cli({"synth", "--n-subjects", "71", "--n-timepoints", "128", "--tr", "2",
                   "--out", dir.path().string()})
              .code == 0);
  const auto r = run_cli({"predict", "--manifest", (dir / "manifest.csv").string(), "--k-outer",
                          "100", "--out", (dir / "o").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("k exceeds n") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o/predictions.csv"));
}

TEST_CASE("usage errors") {
  auto r = run_cli({"evaluate", "--no-such-flag"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  TempDir dir("cli_usage");
  CHECK(run_cli({"synth", "--n-rois", "2", "--out", (dir / "o").string()}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
}
