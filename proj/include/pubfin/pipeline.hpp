#pragma once

#include <exception>
#include <fstream>
#include <tuple>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pubfin/analysis.hpp"
#include "pubfin/config.hpp"
#include "pubfin/error.hpp"
#include "pubfin/ingest.hpp"
#include "pubfin/io.hpp"
#include "pubfin/neural/checkpoint.hpp"
#include "pubfin/neural/train.hpp"
#include "pubfin/preprocess.hpp"
#include "pubfin/ratings.hpp"
#include "pubfin/synth.hpp"

namespace pubfin::pipeline {

namespace fs = std::filesystem;

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kConfigError = 2,
    kDataError = 3,
    kDivergence = 4,
};

inline constexpr const char* kEventsFile = "events.csv";
inline constexpr const char* kGroundTruthFile = "ground_truth.txt";
inline constexpr const char* kCheckpointFile = "model_checkpoint.txt";
inline constexpr const char* kLossCurveFile = "loss_curve.csv";
inline constexpr const char* kEvalReportFile = "eval_report.txt";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kDatasetFile = "dataset.csv";
inline constexpr const char* kPanelFile = "panel.csv";
inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kRunConfigFile = "run_config.txt";

inline void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline std::vector<RatingEvent> load_events(const fs::path& path, const RunConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open events file '" + path.string() + "'");
    return read_events_csv(in, IngestOptions{cfg.allow_early_dates});
}

inline std::vector<analysis::EventRecord> load_calendar(const RunConfig& cfg) {
    if (cfg.calendar.empty()) return analysis::default_event_calendar();
    std::ifstream in(cfg.calendar, std::ios::binary);
    if (!in) throw DataError("cannot open event calendar '" + cfg.calendar + "'");
    return analysis::read_event_calendar(in);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline synth::SynthOutput run_synth(const RunConfig& cfg, const fs::path& out_dir) {
    synth::validate(cfg.synth);
    prepare_out_dir(out_dir);
    auto out = synth::generate_panel(cfg.synth);
    write_file(out_dir / kEventsFile, [&](std::ostream& o) { write_events_csv(o, out.events); });
    write_file(out_dir / kGroundTruthFile, [&](std::ostream& o) { synth::write_ground_truth(o, out.truth); });
    return out;
}

// ---------------------------------------------------------------------------
// train / evaluate
// ---------------------------------------------------------------------------

struct TrainOutcome {
    PreparedData data;
    neural::TrainResult result;
    neural::EvalReport report;
};

inline PreparedData prepare_from_events(const std::vector<RatingEvent>& events, const RunConfig& cfg) {
    const auto [us, intl] = build_panels(events);
    return prepare_dataset(us, intl, cfg.preprocess);
}

inline TrainOutcome run_train(const RunConfig& cfg, const fs::path& events_path, const fs::path& out_dir) {
    validate(cfg);
    const auto events = load_events(events_path, cfg);
    TrainOutcome out;
    out.data = prepare_from_events(events, cfg);
    prepare_out_dir(out_dir);
    out.result = neural::train(cfg.train, out.data.train, out.data.test);
    out.report = neural::evaluate(out.result.params, out.data.test, out.data.all.intl_stats);

    write_file(out_dir / kCheckpointFile,
               [&](std::ostream& o) { neural::write_checkpoint(o, out.result.params, cfg.preprocess.lookback); });
    write_file(out_dir / kLossCurveFile, [&](std::ostream& o) { neural::write_loss_curve_csv(o, out.result.curve); });
    write_file(out_dir / kEvalReportFile, [&](std::ostream& o) { neural::write_eval_report(o, out.report); });
    write_file(out_dir / kPredictionsFile, [&](std::ostream& o) { neural::write_predictions_csv(o, out.report); });
    write_file(out_dir / kDatasetFile, [&](std::ostream& o) { write_dataset_csv(o, out.data.all); });
    return out;
}

/// Evaluate-only run from a saved checkpoint. The checkpoint's lookback
/// overrides the configured one.
inline neural::EvalReport run_evaluate(RunConfig cfg, const fs::path& events_path, const fs::path& checkpoint_path,
                                       const fs::path& out_dir) {
    std::ifstream in(checkpoint_path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + checkpoint_path.string() + "'");
    const auto ckpt = neural::read_checkpoint(in);
    cfg.preprocess.lookback = ckpt.lookback;
    validate(cfg);
    const auto data = prepare_from_events(load_events(events_path, cfg), cfg);
    auto report = neural::evaluate(ckpt.params, data.test, data.all.intl_stats);
    prepare_out_dir(out_dir);
    write_file(out_dir / kEvalReportFile, [&](std::ostream& o) { neural::write_eval_report(o, report); });
    write_file(out_dir / kPredictionsFile, [&](std::ostream& o) { neural::write_predictions_csv(o, report); });
    return report;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOutcome {
    RegionPanel us;    // aligned
    RegionPanel intl;  // aligned
    analysis::AnalysisResult result;
};

inline AnalyzeOutcome run_analyze(const RunConfig& cfg, const fs::path& events_path, const fs::path& out_dir) {
    validate(cfg);
    const auto events = load_events(events_path, cfg);
    const auto calendar = load_calendar(cfg);
    const auto [us_raw, intl_raw] = build_panels(events);
    AnalyzeOutcome out;
    std::tie(out.us, out.intl) = align_panels(us_raw, intl_raw, cfg.preprocess.lookback);
    out.result = analysis::analyze(out.us, out.intl, cfg.analysis, calendar);

    prepare_out_dir(out_dir);
    const std::vector<RegionPanel> panels{out.us, out.intl};
    write_file(out_dir / kPanelFile, [&](std::ostream& o) { write_panel_csv(o, panels); });
    analysis::emit_trend_report(out_dir, out.us, out.intl, out.result.dips, out.result.lag);
    return out;
}

// ---------------------------------------------------------------------------
// run-all
// ---------------------------------------------------------------------------

struct RunAllOutcome {
    synth::SynthOutput synth;
    TrainOutcome train;
    AnalyzeOutcome analyze;
};

inline void write_summary(std::ostream& o, const RunAllOutcome& r) {
    const auto& curve = r.train.result.curve.points;
    o << "true_lag=" << r.synth.truth.true_lag << '\n'
      << "best_lag=" << r.analyze.result.lag.best_lag << '\n'
      << "lag_correlation=" << format_double(r.analyze.result.lag.correlation_at_best) << '\n'
      << "dips_detected=" << r.analyze.result.dips.size() << '\n'
      << "dips_matched=" << r.analyze.result.matched_count() << '\n'
      << "initial_train_mse=" << format_double(r.train.result.initial_train_mse) << '\n'
      << "final_train_mse=" << format_double(curve.back().train_mse) << '\n'
      << "final_test_mse=" << format_double(curve.back().test_mse) << '\n'
      << "mse_normalized=" << format_double(r.train.report.mse_normalized) << '\n'
      << "mse_notch=" << format_double(r.train.report.mse_notch) << '\n'
      << "baseline_mse=" << format_double(r.train.report.baseline_mse_persistence) << '\n';
}

/// synth -> train -> analyze, everything written into `out_dir`.
inline RunAllOutcome run_all(const RunConfig& cfg, const fs::path& out_dir) {
    validate(cfg);
    RunAllOutcome r;
    r.synth = run_synth(cfg, out_dir);
    write_file(out_dir / kRunConfigFile, [&](std::ostream& o) { write_config(o, cfg); });
    r.train = run_train(cfg, out_dir / kEventsFile, out_dir);
    r.analyze = run_analyze(cfg, out_dir / kEventsFile, out_dir);
    write_file(out_dir / kSummaryFile, [&](std::ostream& o) { write_summary(o, r); });
    return r;
}

// ---------------------------------------------------------------------------
// exit-code mapping
// ---------------------------------------------------------------------------

/// Runs `fn`, reporting any failure on `err` and mapping it to an exit code.
template <typename Fn>
int guarded(Fn&& fn, std::ostream& err = std::cerr) {
    try {
        fn();
        return kSuccess;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::config: return kConfigError;
            case ErrorKind::data: return kDataError;
            case ErrorKind::numerical: return kDivergence;
        }
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace pubfin::pipeline
