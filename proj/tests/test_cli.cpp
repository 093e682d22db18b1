#include "doctest.h"
#include "support.hpp"

#include "trendop/io.hpp"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

namespace {

struct Run {
    int status;
    std::string err;
};

// Runs the CLI from `dir`, capturing stderr.
Run cli(const std::filesystem::path &dir, const std::string &args,
        const std::string &env = "") {
    const auto err = dir / "stderr.txt";
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" TRENDOP_CLI "' " +
                            args + " > stdout.txt 2> '" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(err);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, text};
}

} // namespace

TEST_CASE("synth writes a series and a metadata sidecar") {
    const auto dir = testing::scratch_dir("cli_synth");
    CHECK(cli(dir, "synth --model F --steps 2000 --seed 7 --out s").status == 0);
    int files = 0;
    for (const auto &e : std::filesystem::directory_iterator(dir / "s"))
        files += e.is_regular_file();
    CHECK(files == 2);

    CHECK(cli(dir, "synth --model M --drift linear --out m").status == 0);
    const auto t = trendop::io::read_table(dir / "m" / "trajectory.tsv");
    CHECK(t.rows[0][1] == 1.0);
}

TEST_CASE("exit status 2 for invalid input") {
    const auto dir = testing::scratch_dir("cli_invalid");
    auto r = cli(dir, "synth --model F --delta 1.5");
    CHECK(r.status == 2);
    CHECK(r.err.find("delta") != std::string::npos);
    CHECK(cli(dir, "synth --model Q").status == 2);
    CHECK(cli(dir, "analyze --bogus-flag").status == 2);
    CHECK(cli(dir, "").status == 2);
    r = cli(dir, "analyze --model M --Q 100 --lag 20");
    CHECK(r.status == 2);
    CHECK(r.err.find("validate") != std::string::npos);
    CHECK(cli(dir, "periods --from nowhere").status == 2);
}

TEST_CASE("exit status 3 for numerical failure") {
    const auto dir = testing::scratch_dir("cli_numerical");
    // A constant series embeds to one repeated point: zero bandwidths.
    {
        std::ofstream out(dir / "flat.txt");
        for (int t = 0; t < 100; ++t)
            out << t << " 1.0\n";
    }
    std::ofstream(dir / "flat.json")
        << R"({"input": {"source": "scalar", "path": "flat.txt"},
              "embedding": {"Q": 2, "lag": 1}, "operator": {"knn": 3}})";
    const auto r = cli(dir, "analyze --config flat.json --out o");
    CHECK(r.status == 3);
    CHECK(r.err.find("operator") != std::string::npos);
}

TEST_CASE("analyze, reconstruct and periods") {
    const auto dir = testing::scratch_dir("cli_pipeline");
    CHECK(cli(dir, "analyze --model M --steps 400 --modes 6 --out a").status == 0);
    for (const char *f : {"eigenvalues.tsv", "modes.tsv", "mode_series.tsv", "resolved_config.json"})
        CHECK(std::filesystem::is_regular_file(dir / "a" / f));

    const auto eig = trendop::io::read_table(dir / "a" / "eigenvalues.tsv");
    int pair = -1;
    for (const auto &row : eig.rows)
        if (pair < 0 && row[2] > 0)
            pair = static_cast<int>(row[0]);
    REQUIRE(pair > 1);
    const auto r = cli(dir, "reconstruct --model M --steps 400 --modes 6 --out a --indices " +
                                std::to_string(pair));
    CHECK(r.status == 0);
    CHECK(r.err.find("added mode " + std::to_string(pair + 1)) != std::string::npos);
    CHECK(std::filesystem::is_regular_file(dir / "a" / "projection.tsv"));

    CHECK(cli(dir, "reconstruct --model M --steps 400 --modes 6 --out a --indices 99").status ==
          2);

    CHECK(cli(dir, "periods --from a").status == 0);
    const auto periods = trendop::io::read_table(dir / "a" / "periods.tsv");
    REQUIRE(periods.rows.size() == eig.rows.size());
    CHECK(std::isinf(periods.rows[0][4]));
}

TEST_CASE("output directory from the environment") {
    const auto dir = testing::scratch_dir("cli_env");
    CHECK(cli(dir, "synth --model A", "TRENDOP_OUT=fromenv").status == 0);
    CHECK(std::filesystem::is_regular_file(dir / "fromenv" / "trajectory.tsv"));
    CHECK(cli(dir, "synth --model A --out flag", "TRENDOP_OUT=fromenv").status == 0);
    CHECK(std::filesystem::is_regular_file(dir / "flag" / "trajectory.tsv"));
}

TEST_CASE("config file with flag overrides") {
    const auto dir = testing::scratch_dir("cli_config");
    std::ofstream(dir / "run.json") << R"({"input": {"source": "synthetic",
        "model": {"kind": "A", "n_steps": 300}},
        "embedding": {"Q": 3, "lag": 16}, "operator": {"knn": 7, "modes": 4},
        "output": {"dir": "cfgout"}})";
    CHECK(cli(dir, "analyze --config run.json --knn 9").status == 0);
    std::ifstream in(dir / "cfgout" / "resolved_config.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["operator"]["knn"] == 9);
    CHECK(j["input"]["model"]["n_steps"] == 300);
}
