// End-to-end checks of the command line tool. The binary path arrives via
// the GREX_BIN environment variable set by CTest.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grex/config.hpp"
#include "grex/graph_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* env = std::getenv("GREX_BIN");
    REQUIRE(env != nullptr);
    return env;
}

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "grex_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config round trip is the identity") {
    grex::RunConfig cfg;
    cfg.seed = 9;
    cfg.dataset = "planar";
    cfg.d_hidden = 12;
    cfg.diffusion.n_steps = 17;
    cfg.lr = 3e-4;
    grex::RunConfig back = grex::config_from_json(grex::config_to_json(cfg));
    CHECK(grex::config_to_json(back) == grex::config_to_json(cfg));
}

TEST_CASE("full pipeline smoke: gen-data, train, sample, eval, coarsen-demo") {
    const fs::path root = fresh_dir("pipeline");
    const std::string common =
        " --seed 3 --d-hidden 8 --d-ppgn 6 --d-emb 4 --layers 2 --spectral-k 1"
        " --sample-steps 4";

    // tiny tree dataset
    REQUIRE(run("gen-data --dataset tree --dataset-count 8 --min-nodes 5 --max-nodes 8"
                " --seed 3 --out " + (root / "data").string()) == 0);
    CHECK(fs::exists(root / "data/manifest.json"));
    CHECK(fs::exists(root / "data/graphs/g0000.txt"));
    CHECK(fs::exists(root / "data/config.json"));

    // training with a tiny budget
    REQUIRE(run("train --data " + (root / "data").string() + " --out " +
                (root / "model").string() + common + " --steps 2 --batch-size 2") == 0);
    CHECK(fs::exists(root / "model/checkpoint.ckpt"));

    // zero-step training leaves the initialization untouched
    REQUIRE(run("train --data " + (root / "data").string() + " --out " +
                (root / "model0").string() + common + " --steps 0 --batch-size 2") == 0);
    REQUIRE(run("train --data " + (root / "data").string() + " --out " +
                (root / "model0b").string() + common + " --steps 0 --batch-size 2") == 0);
    CHECK(slurp(root / "model0/checkpoint.ckpt") == slurp(root / "model0b/checkpoint.ckpt"));

    // sampling twice with one seed is byte-identical
    const std::string sample_args = "sample --checkpoint " +
                                    (root / "model/checkpoint.ckpt").string() + common +
                                    " --target-n 6 --count 2 --out ";
    REQUIRE(run(sample_args + (root / "s1").string()) == 0);
    REQUIRE(run(sample_args + (root / "s2").string()) == 0);
    CHECK(slurp(root / "s1/sample_0000.txt") == slurp(root / "s2/sample_0000.txt"));
    CHECK(slurp(root / "s1/sample_0001.txt") == slurp(root / "s2/sample_0001.txt"));
    grex::Graph sampled = grex::load_graph(root / "s1/sample_0000.txt");
    CHECK(sampled.num_nodes() == 6);

    // stochastic mode also runs
    CHECK(run("sample --checkpoint " + (root / "model/checkpoint.ckpt").string() + common +
              " --target-n 5 --count 1 --mode stochastic --out " + (root / "s3").string()) == 0);

    // eval of the test set against itself: all MMDs zero, ratio zero
    REQUIRE(run("eval --generated " + (root / "data/graphs").string() + " --data " +
                (root / "data").string() + " --report " + (root / "report.json").string()) == 0);
    const std::string report = slurp(root / "report.json");
    CHECK(report.find("mean_ratio") != std::string::npos);

    // coarsen-demo on one dataset graph
    REQUIRE(run("coarsen-demo --graph " + (root / "data/graphs/g0000.txt").string() +
                " --seed 3 --out " + (root / "levels").string()) == 0);
    CHECK(fs::exists(root / "levels/level_0.txt"));
    CHECK(fs::exists(root / "levels/report.json"));

    // checkpoint/config dimension mismatch is a structured failure
    CHECK(run("sample --checkpoint " + (root / "model/checkpoint.ckpt").string() +
              " --seed 3 --d-hidden 11 --target-n 4 --count 1 --out " +
              (root / "bad").string()) != 0);
    // missing files fail nonzero
    CHECK(run("train --data /nonexistent --out " + (root / "x").string()) != 0);
    CHECK(run("eval --generated /nonexistent --data " + (root / "data").string()) != 0);
}

TEST_CASE("config file plus flag overrides") {
    const fs::path root = fresh_dir("config");
    grex::RunConfig cfg;
    cfg.dataset = "tree";
    cfg.dataset_count = 5;
    cfg.min_nodes = 4;
    cfg.max_nodes = 6;
    cfg.seed = 11;
    grex::save_config(cfg, root / "cfg.json");

    REQUIRE(run("gen-data --config " + (root / "cfg.json").string() + " --dataset-count 7 --out " +
                (root / "data").string()) == 0);
    // the effective config written out reflects the flag override
    grex::RunConfig effective = grex::load_config(root / "data/config.json");
    CHECK(effective.dataset_count == 7);
    CHECK(effective.seed == 11);
    CHECK(effective.min_nodes == 4);

    int files = 0;
    for (const auto& e : fs::directory_iterator(root / "data/graphs")) {
        (void)e;
        ++files;
    }
    CHECK(files == 7);
}
