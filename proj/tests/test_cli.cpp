// Drives the installed CLI binary end to end over a small synthetic corpus.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = AFFECTFUSE_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("affectfuse_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& rel = "") const { return (path / rel).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(kCli) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli: full pipeline with documented exit codes") {
    TempDir dir;
    {
        json spec = {{"subjects_per_country", {{"SP", 2}}},
                     {"session_ms", 15000},
                     {"fps", "10/1"},
                     {"audio_priors", {0.5, 0.25, 0.25, 0.0, 0.0}}};
        std::ofstream(dir.str("spec.json")) << spec.dump();
    }

    CHECK(run_cli("synth --spec " + dir.str("spec.json") + " --out " + dir.str("corpus") +
                  " --seed 5") == 0);
    CHECK(run_cli("validate --corpus " + dir.str("corpus")) == 0);
    CHECK(run_cli("goldstd --channel audio --input " + dir.str("corpus/annotations/audio") +
                  " --out " + dir.str("gold_audio.csv") + " --meta " + dir.str("corpus/meta.json") +
                  " --majority-fraction 0.5 --avatar-track " + dir.str("corpus/avatar")) == 0);
    CHECK(run_cli("goldstd --channel video --input " + dir.str("corpus/annotations/video") +
                  " --out " + dir.str("gold_video.csv")) == 0);
    CHECK(run_cli("kappa --channel audio --input " + dir.str("corpus/annotations/audio") +
                  " --out " + dir.str("kappa.csv") + " --meta " + dir.str("corpus/meta.json")) == 0);
    CHECK(run_cli("gazefeat --input " + dir.str("corpus/trajectories") + " --out " +
                  dir.str("gaze.csv") + " --glasses " + dir.str("corpus/glasses.csv")) == 0);
    CHECK(run_cli("sync --corpus " + dir.str("corpus") + " --gold-audio " + dir.str("gold_audio.csv") +
                  " --gold-video " + dir.str("gold_video.csv") + " --gaze-features " +
                  dir.str("gaze.csv") + " --label-type audio --modalities F,G --speaking all --out " +
                  dir.str("matrix.csv")) == 0);
    CHECK(run_cli("train --matrix " + dir.str("matrix.csv") +
                  " --arch 16-8 --epochs 5 --budget 60 --seed 2 --out " + dir.str("model.json")) == 0);

    {
        json config = {{"matrix", dir.str("matrix.csv")},
                       {"k", 2},
                       {"runs", 2},
                       {"seed", 3},
                       {"out", dir.str("reports")},
                       {"experiments", json::array({{{"id", "fg"},
                                                     {"train_country", "SP"},
                                                     {"test_country", "SP"},
                                                     {"archs", json::array({"16-8"})},
                                                     {"epochs", 4},
                                                     {"budget", 60},
                                                     {"dropout", 0.0}},
                                                    {{"id", "fg2"},
                                                     {"train_country", "SP"},
                                                     {"test_country", "SP"},
                                                     {"archs", json::array({"8-4"})},
                                                     {"epochs", 4},
                                                     {"budget", 60},
                                                     {"dropout", 0.0}}})}};
        std::ofstream(dir.str("eval.json")) << config.dump();
    }
    CHECK(run_cli("eval --config " + dir.str("eval.json")) == 0);
    CHECK(fs::exists(dir.str("reports/fg.report.json")));
    CHECK(run_cli("stats --reports " + dir.str("reports") + " --q 0.05") == 0);
    CHECK(fs::exists(dir.str("reports/pairwise_stats.csv")));
    CHECK(run_cli("report --reports " + dir.str("reports") + " --out " + dir.str("rendered")) == 0);
    CHECK(fs::exists(dir.str("rendered/results.csv")));
    CHECK(fs::exists(dir.str("rendered/chart_SP.svg")));
}

TEST_CASE("cli: validation failures exit 1, unknown subcommands fail") {
    TempDir dir;
    // missing corpus -> validation error
    CHECK(run_cli("goldstd --channel audio --input " + dir.str("nope") + " --out " +
                  dir.str("gold.csv") + " --session-ms 10000") == 1);
    // validate on an empty dir reports violations -> exit 1
    fs::create_directories(dir.str("empty"));
    CHECK(run_cli("validate --corpus " + dir.str("empty")) == 1);
    CHECK(run_cli("definitely-not-a-command") != 0);
    // bad flag value caught by the option parser
    CHECK(run_cli("goldstd --channel nonsense --input x --out y") != 0);
}

TEST_CASE("cli: --config file supplies defaults, flags override") {
    TempDir dir;
    {
        json spec = {{"subjects_per_country", {{"SP", 1}}},
                     {"session_ms", 10000},
                     {"fps", "10/1"}};
        std::ofstream(dir.str("spec.json")) << spec.dump();
        json config = {{"synth", {{"spec", dir.str("spec.json")}}}};
        std::ofstream(dir.str("config.json")) << config.dump();
    }
    CHECK(run_cli("--config " + dir.str("config.json") + " --seed 9 synth --out " +
                  dir.str("corpus")) == 0);
    CHECK(fs::exists(dir.str("corpus/meta.json")));
    const json meta = json::parse(std::ifstream(dir.str("corpus/meta.json")));
    CHECK(meta.at("seed").get<int>() == 9);  // --seed wins over the spec file
    CHECK(meta.at("session_ms").get<int>() == 10000);
}
