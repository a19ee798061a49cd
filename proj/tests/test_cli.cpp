#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "pubfin/io.hpp"
#include "pubfin/pipeline.hpp"

namespace fs = std::filesystem;
using pubfin::read_file;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pubfin_cli_test";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::string& args) {
    fs::create_directories(kRoot);
    const auto out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
    const std::string cmd = std::string("\"") + PUBFIN_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

std::string dir(const std::string& name) {
    const auto p = kRoot / name;
    fs::remove_all(p);
    return p.string();
}

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (const auto eq = line.find('='); eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    return kv;
}

long line_count(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

const std::string kSyntheticConf = std::string(PUBFIN_SOURCE_DIR) + "/configs/synthetic.conf";

}  // namespace

TEST(Cli, SynthWritesEventsAndGroundTruth) {
    const auto d = dir("synth");
    const auto r = cli("synth --out-dir " + d);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto events = read_file(fs::path(d) / "events.csv");
    EXPECT_EQ(events.substr(0, events.find('\n')), "entity_id,region,date,rating");
    EXPECT_GT(line_count(events), 100);
    EXPECT_EQ(key_values(read_file(fs::path(d) / "ground_truth.txt"))["true_lag"], "3");

    const auto d2 = dir("synth2");
    ASSERT_EQ(cli("synth --out-dir " + d2).code, 0);
    EXPECT_EQ(read_file(fs::path(d2) / "events.csv"), events);
}

TEST(Cli, UnknownConfigKeyExitsTwo) {
    const auto r = cli("synth --out-dir " + dir("badkey") + " --set bogus_key=1");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bogus_key"), std::string::npos);
    EXPECT_EQ(cli("synth --out-dir " + dir("badval") + " --set epochs=0").code, 2);
    EXPECT_EQ(cli("synth").code, 2);
    EXPECT_EQ(cli("frobnicate --out-dir x").code, 2);
}

TEST(Cli, TrainEvaluateRoundTrip) {
    const auto data = dir("train_data");
    ASSERT_EQ(cli("synth --out-dir " + data).code, 0);
    const auto events = (fs::path(data) / "events.csv").string();

    const auto a = dir("train_a");
    const auto r = cli("train --events " + events + " --out-dir " + a + " --set epochs=15");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto curve = read_file(fs::path(a) / "loss_curve.csv");
    EXPECT_EQ(line_count(curve), 16);
    const auto report = key_values(read_file(fs::path(a) / "eval_report.txt"));
    for (const char* k : {"mse_normalized", "mse_notch", "baseline_mse", "test_samples"})
        EXPECT_TRUE(report.count(k)) << k;

    const auto b = dir("train_b");
    ASSERT_EQ(cli("train --events " + events + " --out-dir " + b + " --set epochs=15").code, 0);
    EXPECT_EQ(read_file(fs::path(b) / "model_checkpoint.txt"), read_file(fs::path(a) / "model_checkpoint.txt"));
    EXPECT_EQ(read_file(fs::path(b) / "loss_curve.csv"), curve);

    const auto e = dir("evaluate");
    const auto ev = cli("evaluate --events " + events + " --checkpoint " + (fs::path(a) / "model_checkpoint.txt").string() +
                           " --out-dir " + e);
    ASSERT_EQ(ev.code, 0) << ev.err;
    EXPECT_EQ(read_file(fs::path(e) / "eval_report.txt"), read_file(fs::path(a) / "eval_report.txt"));
    EXPECT_EQ(read_file(fs::path(e) / "predictions.csv"), read_file(fs::path(a) / "predictions.csv"));
}

TEST(Cli, AnalyzeRecoversLagAndDips) {
    const auto data = dir("analyze_data");
    ASSERT_EQ(cli("synth --config " + kSyntheticConf + " --out-dir " + data).code, 0);
    const auto out = dir("analyze");
    const auto r = cli("analyze --config " + kSyntheticConf + " --events " + (fs::path(data) / "events.csv").string() +
                          " --out-dir " + out);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("best_lag=3"), std::string::npos) << r.out;
    for (const char* f : {"trend.csv", "dips.csv", "lag_profile.csv", "panel.csv"})
        EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;

    const auto dips = read_file(fs::path(out) / "dips.csv");
    std::istringstream in(dips);
    std::string line;
    std::getline(in, line);
    int close_matches = 0;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        const auto dist = line.substr(last + 1);
        if (!dist.empty() && std::stoi(dist) <= 2) ++close_matches;
    }
    EXPECT_GE(close_matches, 5) << dips;
}

TEST(Cli, DataErrorsExitThree) {
    const auto d = dir("empty_events");
    fs::create_directories(d);
    const auto empty = (fs::path(d) / "events.csv").string();
    pubfin::write_file(empty, [](std::ostream& o) { o << "entity_id,region,date,rating\n"; });
    EXPECT_EQ(cli("analyze --events " + empty + " --out-dir " + d).code, 3);

    const auto bad = (fs::path(d) / "bad.csv").string();
    pubfin::write_file(bad, [](std::ostream& o) { o << "entity_id,region,date,rating\nA,US,2012-01-05,ZZZ\n"; });
    const auto r = cli("train --events " + bad + " --out-dir " + d);
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

    EXPECT_EQ(cli("analyze --events " + (fs::path(d) / "missing.csv").string() + " --out-dir " + d).code, 3);
}

TEST(Cli, RunAllIsReproducible) {
    const auto a = dir("all_a"), b = dir("all_b");
    const auto ra = cli("run-all --out-dir " + a + " --set epochs=20");
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(cli("run-all --out-dir " + b + " --set epochs=20").code, 0);
    const auto summary = read_file(fs::path(a) / "summary.txt");
    EXPECT_EQ(read_file(fs::path(b) / "summary.txt"), summary);
    const auto kv = key_values(summary);
    EXPECT_EQ(kv.at("best_lag"), kv.at("true_lag"));
    EXPECT_EQ(ra.out, summary);

    const auto c = dir("all_seed");
    ASSERT_EQ(cli("run-all --out-dir " + c + " --set epochs=20 --seed 7 --set lag_months=5").code, 0);
    EXPECT_EQ(key_values(read_file(fs::path(c) / "summary.txt")).at("best_lag"), "5");
}

TEST(Cli, DivergenceExitsFour) {
    const auto r = cli("run-all --out-dir " + dir("diverge") + " --set epochs=5 --set learning_rate=1e300");
    EXPECT_EQ(r.code, 4) << r.err;
    EXPECT_NE(r.err.find("non-finite"), std::string::npos);
}
