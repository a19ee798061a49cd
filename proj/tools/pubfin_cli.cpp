// pubfin: synthetic data generation, training, evaluation and lead-lag
// analysis of US vs. international public-finance rating panels.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pubfin/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pubfin;
using namespace pubfin::pipeline;

struct CommonOptions {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string calendar;
    bool allow_early_dates = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "flat key=value run configuration");
    cmd->add_option("--out-dir", opts.out_dir, "directory receiving every artifact")->required();
    cmd->add_option("--seed", opts.seed, "override the configured seed");
    cmd->add_option("--set", opts.overrides, "override one config key (key=value); repeatable");
}

/// File values first, then --set overrides, then dedicated flags.
RunConfig resolve(const CommonOptions& opts) {
    RunConfig cfg;
    if (!opts.config.empty()) {
        std::ifstream in(opts.config);
        if (!in) throw ConfigError("cannot open config '" + opts.config + "'");
        apply_config_text(cfg, in);
    }
    for (const auto& kv : opts.overrides) apply_assignment(cfg, kv, "--set");
    if (opts.seed) cfg.synth.seed = cfg.train.seed = *opts.seed;
    if (!opts.calendar.empty()) cfg.calendar = opts.calendar;
    if (opts.allow_early_dates) cfg.allow_early_dates = true;
    validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"US vs. international public-finance rating analysis"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string events, checkpoint;

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic rating-event panel");
    add_common(synth_cmd, opts);

    auto add_events = [&](CLI::App* cmd) {
        cmd->add_option("--events", events, "rating-event CSV (entity_id,region,date,rating)")->required();
        cmd->add_flag("--allow-early-dates", opts.allow_early_dates, "accept events before 2010-11-01");
    };

    auto* train_cmd = app.add_subcommand("train", "fit the LSTM regressor and evaluate it");
    add_common(train_cmd, opts);
    add_events(train_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a saved checkpoint");
    add_common(eval_cmd, opts);
    add_events(eval_cmd);
    eval_cmd->add_option("--checkpoint", checkpoint, "model checkpoint written by train")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "dip detection, event matching and lag profile");
    add_common(analyze_cmd, opts);
    add_events(analyze_cmd);
    analyze_cmd->add_option("--calendar", opts.calendar, "event calendar CSV (name,anchor_month)");

    auto* all_cmd = app.add_subcommand("run-all", "synth, train and analyze in one run");
    add_common(all_cmd, opts);
    all_cmd->add_option("--calendar", opts.calendar, "event calendar CSV (name,anchor_month)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kSuccess : kConfigError;
    }

    const fs::path out_dir = opts.out_dir;
    return guarded([&] {
        const RunConfig cfg = resolve(opts);
        if (*synth_cmd) {
            const auto out = run_synth(cfg, out_dir);
            std::cout << "wrote " << out.events.size() << " events to " << (out_dir / kEventsFile).string() << '\n';
        } else if (*train_cmd) {
            const auto out = run_train(cfg, events, out_dir);
            std::cout << "epochs=" << out.result.curve.size()
                      << " mse_normalized=" << format_double(out.report.mse_normalized)
                      << " mse_notch=" << format_double(out.report.mse_notch)
                      << " baseline_mse=" << format_double(out.report.baseline_mse_persistence) << '\n';
        } else if (*eval_cmd) {
            const auto report = run_evaluate(cfg, events, checkpoint, out_dir);
            std::cout << "mse_normalized=" << format_double(report.mse_normalized)
                      << " mse_notch=" << format_double(report.mse_notch) << '\n';
        } else if (*analyze_cmd) {
            const auto out = run_analyze(cfg, events, out_dir);
            std::cout << "best_lag=" << out.result.lag.best_lag << " dips=" << out.result.dips.size()
                      << " matched=" << out.result.matched_count() << '\n';
        } else if (*all_cmd) {
            const auto out = run_all(cfg, out_dir);
            std::cout << read_file(out_dir / kSummaryFile);
        }
    });
}
