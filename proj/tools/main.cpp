// affectfuse command-line tool. Thin shell over the C API: each subcommand
// assembles a JSON options document and hands it to the matching af_* call.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "affectfuse/affectfuse.h"

using nlohmann::json;

namespace {

struct CommonState {
    std::string config_path;
    bool have_seed = false;
    std::uint64_t seed = 0;
};

// declarative config file: top-level keys per subcommand provide option
// defaults, explicit flags win
json options_from_config(const CommonState& state, const std::string& command) {
    json options = json::object();
    if (!state.config_path.empty()) {
        std::ifstream in(state.config_path);
        if (!in) {
            std::fprintf(stderr, "affectfuse: cannot open config %s\n", state.config_path.c_str());
            std::exit(1);
        }
        json config = json::parse(in, nullptr, true, true);
        if (config.contains(command)) options = config.at(command);
    }
    return options;
}

using StageCall = af_status (*)(af_context*, const char*, char**);

int run(StageCall call, af_context* ctx, const CommonState& state, json options) {
    if (state.have_seed) options["seed"] = state.seed;
    char* summary = nullptr;
    const af_status status = call(ctx, options.dump().c_str(), &summary);
    if (status != AF_OK) {
        std::fprintf(stderr, "affectfuse: %s\n", af_last_error(ctx));
        return status == AF_ERR_VALIDATION ? 1 : 2;
    }
    if (summary) {
        std::printf("%s\n", summary);
        af_string_free(summary);
    }
    return 0;
}

void set_if(json& options, const char* key, const std::string& value) {
    if (!value.empty()) options[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"affectfuse: multimodal emotion-expression recognition pipeline"};
    app.require_subcommand(1);

    CommonState state;
    app.add_option("--config", state.config_path, "declarative JSON config; flags override")
        ->expected(1);
    auto* seed_opt = app.add_option("--seed", state.seed, "root seed override");

    af_context* ctx = af_context_new();
    int exit_code = 0;
    auto dispatch = [&](StageCall call, const json& options) {
        state.have_seed = seed_opt->count() > 0;
        exit_code = run(call, ctx, state, options);
    };

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::string synth_spec, synth_out;
    synth->add_option("--spec", synth_spec, "synthetic spec JSON file");
    synth->add_option("--out", synth_out, "output corpus directory")->required();
    synth->callback([&] {
        json options = options_from_config(state, "synth");
        set_if(options, "spec", synth_spec);
        options["out"] = synth_out;
        dispatch(&af_synth, options);
    });

    // validate
    auto* validate = app.add_subcommand("validate", "schema-check a corpus directory");
    std::string validate_corpus;
    validate->add_option("--corpus", validate_corpus, "corpus directory")->required();
    validate->callback([&] {
        json options = options_from_config(state, "validate");
        options["corpus"] = validate_corpus;
        char* summary = nullptr;
        const af_status status = af_validate(ctx, options.dump().c_str(), &summary);
        if (status != AF_OK) {
            std::fprintf(stderr, "affectfuse: %s\n", af_last_error(ctx));
            exit_code = status == AF_ERR_VALIDATION ? 1 : 2;
            return;
        }
        const json report = json::parse(summary);
        af_string_free(summary);
        std::printf("%s\n", report.dump(2).c_str());
        exit_code = report.value("ok", false) ? 0 : 1;
    });

    // goldstd
    auto* goldstd = app.add_subcommand("goldstd", "build gold-standard labels from annotations");
    std::string g_channel, g_input, g_out, g_avatar, g_meta;
    double g_fraction = 0.5;
    long long g_session = 0;
    goldstd->add_option("--channel", g_channel, "audio or video")->required();
    goldstd->add_option("--input", g_input, "per-subject annotation CSV directory")->required();
    goldstd->add_option("--out", g_out, "gold standard CSV")->required();
    goldstd->add_option("--majority-fraction", g_fraction, "segment majority threshold (audio)");
    goldstd->add_option("--avatar-track", g_avatar, "avatar speech track directory (audio)");
    goldstd->add_option("--session-ms", g_session, "session length in ms (audio)");
    goldstd->add_option("--meta", g_meta, "corpus meta.json (supplies session length)");
    goldstd->callback([&] {
        json options = options_from_config(state, "goldstd");
        options["channel"] = g_channel;
        options["input"] = g_input;
        options["out"] = g_out;
        if (goldstd->count("--majority-fraction")) options["majority_fraction"] = g_fraction;
        set_if(options, "avatar", g_avatar);
        set_if(options, "meta", g_meta);
        if (g_session > 0) options["session_ms"] = g_session;
        dispatch(&af_goldstd, options);
    });

    // kappa
    auto* kappa = app.add_subcommand("kappa", "pairwise inter-rater agreement");
    std::string k_channel, k_input, k_out, k_meta;
    long long k_session = 0;
    kappa->add_option("--channel", k_channel, "audio or video")->required();
    kappa->add_option("--input", k_input, "per-subject annotation CSV directory")->required();
    kappa->add_option("--out", k_out, "kappa CSV output")->required();
    kappa->add_option("--session-ms", k_session, "session length in ms (audio)");
    kappa->add_option("--meta", k_meta, "corpus meta.json");
    kappa->callback([&] {
        json options = options_from_config(state, "kappa");
        options["channel"] = k_channel;
        options["input"] = k_input;
        options["out"] = k_out;
        set_if(options, "meta", k_meta);
        if (k_session > 0) options["session_ms"] = k_session;
        dispatch(&af_kappa, options);
    });

    // gazefeat
    auto* gazefeat = app.add_subcommand("gazefeat", "gaze/head window features + looking-at-VC");
    std::string gf_input, gf_out, gf_glasses, gf_diag;
    long long gf_window = 1500, gf_stride = 500;
    gazefeat->add_option("--input", gf_input, "trajectory CSV directory")->required();
    gazefeat->add_option("--out", gf_out, "window feature CSV")->required();
    gazefeat->add_option("--glasses", gf_glasses, "glasses flag CSV");
    gazefeat->add_option("--diagnostics", gf_diag, "cluster diagnostics CSV");
    gazefeat->add_option("--window-ms", gf_window, "window length");
    gazefeat->add_option("--center-stride-ms", gf_stride, "center stride");
    gazefeat->callback([&] {
        json options = options_from_config(state, "gazefeat");
        options["input"] = gf_input;
        options["out"] = gf_out;
        set_if(options, "glasses", gf_glasses);
        set_if(options, "diagnostics", gf_diag);
        options["window_ms"] = gf_window;
        options["center_stride_ms"] = gf_stride;
        dispatch(&af_gazefeat, options);
    });

    // sync
    auto* sync = app.add_subcommand("sync", "assemble synchronized training matrices");
    std::string s_corpus, s_gold_audio, s_gold_video, s_gaze, s_label = "audio", s_mod, s_speak = "all",
                s_out;
    sync->add_option("--corpus", s_corpus, "corpus directory")->required();
    sync->add_option("--gold-audio", s_gold_audio, "audio gold CSV")->required();
    sync->add_option("--gold-video", s_gold_video, "video gold CSV");
    sync->add_option("--gaze-features", s_gaze, "gazefeat output CSV");
    sync->add_option("--label-type", s_label, "audio or video");
    sync->add_option("--modalities", s_mod, "comma list of A,F,G")->required();
    sync->add_option("--speaking", s_speak, "all, speech or silence");
    sync->add_option("--out", s_out, "matrix CSV")->required();
    sync->callback([&] {
        json options = options_from_config(state, "sync");
        options["corpus"] = s_corpus;
        options["gold_audio"] = s_gold_audio;
        set_if(options, "gold_video", s_gold_video);
        set_if(options, "gaze_features", s_gaze);
        options["label_type"] = s_label;
        options["modalities"] = s_mod;
        options["speaking"] = s_speak;
        options["out"] = s_out;
        dispatch(&af_sync, options);
    });

    // train
    auto* train = app.add_subcommand("train", "train one MLP on a matrix");
    std::string t_matrix, t_arch = "100-20", t_out;
    int t_epochs = 0;
    long long t_budget = 0;
    train->add_option("--matrix", t_matrix, "matrix CSV from sync")->required();
    train->add_option("--arch", t_arch, "hidden widths, e.g. 100-20");
    train->add_option("--epochs", t_epochs, "training epochs");
    train->add_option("--budget", t_budget, "per-epoch sample budget");
    train->add_option("--out", t_out, "model JSON output")->required();
    train->callback([&] {
        json options = options_from_config(state, "train");
        options["matrix"] = t_matrix;
        options["arch"] = t_arch;
        if (t_epochs > 0) options["epochs"] = t_epochs;
        if (t_budget > 0) options["budget"] = t_budget;
        options["out"] = t_out;
        dispatch(&af_train, options);
    });

    // eval
    auto* eval = app.add_subcommand("eval", "run the cross-validated experiment matrix");
    std::string e_config;
    eval->add_option("--config", e_config, "experiment config JSON")->required();
    eval->callback([&] {
        json options;
        options["config"] = e_config;
        dispatch(&af_eval, options);
    });

    // stats
    auto* stats = app.add_subcommand("stats", "pairwise corrected t-tests with FDR control");
    std::string st_reports, st_out, st_group = "country";
    double st_q = 0.05;
    stats->add_option("--reports", st_reports, "directory of .report.json files")->required();
    stats->add_option("--q", st_q, "FDR level");
    stats->add_option("--group-by", st_group, "country or country_label");
    stats->add_option("--out", st_out, "output CSV");
    stats->callback([&] {
        json options = options_from_config(state, "stats");
        options["reports"] = st_reports;
        options["q"] = st_q;
        options["group_by"] = st_group;
        set_if(options, "out", st_out);
        dispatch(&af_stats, options);
    });

    // report
    auto* report = app.add_subcommand("report", "render result tables and charts");
    std::string r_reports, r_out;
    report->add_option("--reports", r_reports, "directory of .report.json files")->required();
    report->add_option("--out", r_out, "output directory");
    report->callback([&] {
        json options = options_from_config(state, "report");
        options["reports"] = r_reports;
        set_if(options, "out", r_out);
        dispatch(&af_report, options);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        af_context_free(ctx);
        return app.exit(e) ? 1 : 0;
    }

    af_context_free(ctx);
    return exit_code;
}
