#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taptree/baseline.hpp"
#include "taptree/errors.hpp"
#include "taptree/eval.hpp"
#include "taptree/ingest.hpp"
#include "taptree/json_io.hpp"
#include "taptree/seqmine.hpp"
#include "taptree/synth.hpp"
#include "taptree/tree.hpp"
#include "taptree/treebuild.hpp"
#include "taptree/treematch.hpp"

namespace {

using namespace taptree;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// "-" means stdout, anything else is a file path.
void write_out(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    write_text_file(path, content);
}

LoadResult load_from(const std::string& input, const LoadOptions& opts) {
    if (input == "-") return load_events(std::cin, opts);
    return load_events_file(input, opts);
}

std::vector<TaskTree> forest_from_events(const std::string& input, const LoadOptions& opts,
                                         const TreeFilter& filter) {
    LoadResult res = load_from(input, opts);
    std::vector<TaskTree> forest;
    for (const EventBatch& b : res.batches) {
        std::vector<TaskTree> built = build_trees(b);
        forest.insert(forest.end(), std::make_move_iterator(built.begin()),
                      std::make_move_iterator(built.end()));
    }
    return filter_trees(forest, filter);
}

struct IngestArgs {
    std::string input, host, out = "-";
    double max_bad = 0.10;
};

void cmd_ingest(const IngestArgs& a) {
    LoadOptions opts;
    opts.host_filter = a.host;
    opts.max_bad_fraction = a.max_bad;
    LoadResult res = load_from(a.input, opts);
    std::size_t kept = 0;
    std::ostringstream body;
    for (const EventBatch& b : res.batches) {
        kept += b.events.size();
        for (const AuditEvent& e : b.events) body << serialize_event(e) << '\n';
    }
    write_out(a.out, body.str());
    std::cerr << "ingest: " << res.total_lines << " lines, " << kept << " events kept, "
              << res.skipped << " skipped, " << res.filtered << " filtered, "
              << res.batches.size() << " host-day batches\n";
}

struct BuildArgs {
    std::string events, host, out;
    int min_nodes = 1, min_depth = 1;
    double max_bad = 0.10;
};

void cmd_build(const BuildArgs& a) {
    LoadOptions opts;
    opts.host_filter = a.host;
    opts.max_bad_fraction = a.max_bad;
    std::vector<TaskTree> forest = forest_from_events(a.events, opts, {a.min_nodes, a.min_depth});
    save_forest(forest, a.out);
    TreeStats stats = tree_stats(forest);
    std::cerr << "build: " << stats.count << " trees, " << stats.total_nodes << " nodes, "
              << stats.malicious << " labeled malicious\n";
}

struct BaselineArgs {
    std::string forest, stage = "semantic", weight_merge = "max", out;
};

void cmd_baseline(const BaselineArgs& a) {
    std::vector<TaskTree> forest = load_forest(a.forest);
    BaselineModel model =
        build_baseline(forest, stage_from(a.stage), weight_merge_from(a.weight_merge));
    save_model(model, a.out);
    std::cerr << "baseline: " << model.build_stats.input_count << " trees in, "
              << model.trees.size() << " out (" << to_string(model.stage) << ")\n";
}

struct DetectArgs {
    std::string model, forest, mode = "partial-same", anchor = "any", out = "-";
    double threshold = 0.5;
    bool exhaustive = false;
};

void cmd_detect(const DetectArgs& a) {
    BaselineModel model = load_model(a.model);
    std::vector<TaskTree> forest = load_forest(a.forest);
    MatchParams params;
    params.mode = match_mode_from(a.mode);
    params.delta = a.threshold;
    params.anchor = anchor_from(a.anchor);
    std::string csv = "tree_id,best_score,best_baseline_id,anomalous,label\n";
    std::size_t flagged = 0;
    for (const TaskTree& t : forest) {
        DetectionVerdict v = detect(t, model, params, a.exhaustive);
        flagged += v.anomalous ? 1 : 0;
        csv += v.tree_id + ',' + fixed6(v.best_score) + ',' +
               (v.best_baseline_id.empty() ? "-" : v.best_baseline_id) + ',' +
               (v.anomalous ? "1" : "0") + ',' + std::to_string(t.label) + '\n';
    }
    write_out(a.out, csv);
    std::cerr << "detect: " << flagged << " of " << forest.size() << " trees anomalous at "
              << fixed6(a.threshold) << "\n";
}

struct TracesArgs {
    std::string forest, out;
};

void cmd_traces(const TracesArgs& a) {
    save_traces(extract_traces(load_forest(a.forest)), a.out);
}

struct MineArgs {
    std::string traces, out;
    double min_support = 0.05;
    bool maximal = false;
};

void cmd_mine(const MineArgs& a) {
    std::vector<Trace> traces = load_traces(a.traces);
    PatternSet ps = mine_patterns(traces, a.min_support);
    const std::size_t mined = ps.patterns.size();
    if (a.maximal) ps.patterns = maximal_patterns(ps.patterns);
    save_patterns(ps, a.out);
    std::cerr << "mine: " << mined << " frequent patterns";
    if (a.maximal) std::cerr << ", " << ps.patterns.size() << " maximal";
    std::cerr << "\n";
}

struct TrainArgs {
    std::string traces, patterns, out;
    double min_support = 0.05, min_class_ratio = 2.0, alpha = 1.0;
    bool keep_redundant = false;
};

void cmd_train(const TrainArgs& a) {
    std::vector<Trace> traces = load_traces(a.traces);
    PatternSet ps = load_patterns(a.patterns);
    FeatureParams fp;
    fp.min_support = a.min_support;
    fp.min_class_ratio = a.min_class_ratio;
    fp.drop_redundant = !a.keep_redundant;
    fp.n_sequences = ps.n_sequences;
    std::vector<SequentialPattern> features = select_features(ps.patterns, fp);
    TraceClassifier clf = train_classifier(traces, features, a.alpha);
    save_classifier(clf, a.out);
    std::cerr << "train: " << features.size() << " features from " << ps.patterns.size()
              << " patterns\n";
}

struct ClassifyArgs {
    std::string traces, clf, out = "-";
    double threshold = 0.5;
};

void cmd_classify(const ClassifyArgs& a) {
    std::vector<Trace> traces = load_traces(a.traces);
    TraceClassifier clf = load_classifier(a.clf);
    std::string csv = "trace_id,tree_id,likelihood,malicious,label\n";
    std::size_t hits = 0;
    for (const Trace& t : traces) {
        Classification c = classify(t, clf, a.threshold);
        hits += c.label ? 1 : 0;
        csv += t.trace_id + ',' + t.tree_id + ',' + fixed6(c.likelihood) + ',' +
               std::to_string(c.label) + ',' + std::to_string(t.label) + '\n';
    }
    write_out(a.out, csv);
    std::cerr << "classify: " << hits << " of " << traces.size() << " traces flagged\n";
}

struct RunArgs {
    std::string config, report, roc, json;
};

void cmd_run(const RunArgs& a) {
    RunConfig cfg = load_config(a.config);
    EvalReport rep = run_pipeline(cfg);
    if (!a.report.empty()) write_out(a.report, report_csv(rep));
    if (!a.roc.empty()) write_out(a.roc, roc_csv(rep));
    if (!a.json.empty()) save_report(rep, a.json);
    if (a.report.empty() && a.roc.empty() && a.json.empty()) write_out("-", report_csv(rep));
    std::cerr << "run: protocol " << rep.protocol << ", " << rep.rows.size() << " rows\n";
}

struct SynthArgs {
    std::string kind, out;
    std::uint64_t seed = 1;
    std::size_t count = 1000;
    std::size_t malicious_trees = 25;
};

void cmd_synth(const SynthArgs& a) {
    if (a.kind == "events") {
        if (a.out == "-") {
            synth_event_log(a.seed, a.count, std::cout);
            std::cout.flush();
        } else {
            std::ofstream os(a.out, std::ios::binary);
            if (!os) throw IoError("cannot open for writing: " + a.out);
            synth_event_log(a.seed, a.count, os);
        }
    } else if (a.kind == "forest") {
        save_forest(synth_baseline_corpus(a.seed, a.count), a.out);
    } else if (a.kind == "anomalous") {
        save_forest(synth_anomalous_trees(a.count), a.out);
    } else if (a.kind == "traces") {
        save_traces(synth_trace_set(a.count, a.malicious_trees), a.out);
    } else {
        throw Error("unknown synth kind: " + a.kind);
    }
}

struct StatsArgs {
    std::string forest;
};

void cmd_stats(const StatsArgs& a) {
    std::vector<TaskTree> forest = load_forest(a.forest);
    TreeStats s = tree_stats(forest);
    std::cout << "trees: " << s.count << "\n";
    std::cout << "nodes: " << s.total_nodes << "\n";
    std::cout << "benign: " << s.benign << "\n";
    std::cout << "malicious: " << s.malicious << "\n";
    std::cout << "depth histogram:\n";
    for (const auto& [depth, n] : s.depth_histogram)
        std::cout << "  " << depth << ": " << n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Host behavior modeling and threat detection over audit logs"};
    app.require_subcommand(1);

    IngestArgs ingest;
    CLI::App* c = app.add_subcommand("ingest", "Normalize a JSONL event log");
    c->add_option("--input", ingest.input, "Input JSONL path, - for stdin")->required();
    c->add_option("--host", ingest.host, "Keep only this host");
    c->add_option("--out", ingest.out, "Output path, - for stdout");
    c->add_option("--max-bad-fraction", ingest.max_bad, "Tolerated share of bad lines");
    c->callback([&ingest] { cmd_ingest(ingest); });

    BuildArgs build;
    c = app.add_subcommand("build", "Build task process-trees from events");
    c->add_option("--events", build.events, "Input JSONL path, - for stdin")->required();
    c->add_option("--host", build.host, "Keep only this host");
    c->add_option("--min-nodes", build.min_nodes, "Drop trees with fewer nodes");
    c->add_option("--min-depth", build.min_depth, "Drop trees shallower than this");
    c->add_option("--max-bad-fraction", build.max_bad, "Tolerated share of bad lines");
    c->add_option("--out", build.out, "Forest JSON output path")->required();
    c->callback([&build] { cmd_build(build); });

    BaselineArgs baseline;
    c = app.add_subcommand("baseline", "Fuse a forest into a baseline model");
    c->add_option("--forest", baseline.forest, "Forest JSON input")->required();
    c->add_option("--stage", baseline.stage, "temporal | clustered | semantic");
    c->add_option("--weight-merge", baseline.weight_merge, "max | sum");
    c->add_option("--out", baseline.out, "Model JSON output path")->required();
    c->callback([&baseline] { cmd_baseline(baseline); });

    DetectArgs detect;
    c = app.add_subcommand("detect", "Score trees against a baseline model");
    c->add_option("--model", detect.model, "Model JSON input")->required();
    c->add_option("--forest", detect.forest, "Forest JSON input")->required();
    c->add_option("--mode", detect.mode, "exact | partial-same | partial-var");
    c->add_option("--threshold", detect.threshold, "Anomaly threshold delta");
    c->add_option("--anchor", detect.anchor, "root | any");
    c->add_flag("--exhaustive", detect.exhaustive, "Always compute the true best score");
    c->add_option("--out", detect.out, "Verdict CSV path, - for stdout");
    c->callback([&detect] { cmd_detect(detect); });

    TracesArgs traces;
    c = app.add_subcommand("traces", "Extract root-to-leaf traces from a forest");
    c->add_option("--forest", traces.forest, "Forest JSON input")->required();
    c->add_option("--out", traces.out, "Traces JSON output path")->required();
    c->callback([&traces] { cmd_traces(traces); });

    MineArgs mine;
    c = app.add_subcommand("mine", "Mine frequent sequential patterns from traces");
    c->add_option("--traces", mine.traces, "Traces JSON input")->required();
    c->add_option("--min-support", mine.min_support, "Minimum support fraction");
    c->add_flag("--maximal", mine.maximal, "Keep only maximal patterns");
    c->add_option("--out", mine.out, "Patterns JSON output path")->required();
    c->callback([&mine] { cmd_mine(mine); });

    TrainArgs train;
    c = app.add_subcommand("train", "Select features and train a trace classifier");
    c->add_option("--traces", train.traces, "Traces JSON input")->required();
    c->add_option("--patterns", train.patterns, "Patterns JSON input")->required();
    c->add_option("--min-support", train.min_support, "Feature support floor");
    c->add_option("--min-class-ratio", train.min_class_ratio, "Class skew floor");
    c->add_option("--alpha", train.alpha, "Laplace smoothing strength");
    c->add_flag("--keep-redundant", train.keep_redundant, "Skip redundancy pruning");
    c->add_option("--out", train.out, "Classifier JSON output path")->required();
    c->callback([&train] { cmd_train(train); });

    ClassifyArgs classify;
    c = app.add_subcommand("classify", "Score traces with a trained classifier");
    c->add_option("--traces", classify.traces, "Traces JSON input")->required();
    c->add_option("--clf", classify.clf, "Classifier JSON input")->required();
    c->add_option("--threshold", classify.threshold, "Malicious posterior threshold");
    c->add_option("--out", classify.out, "Verdict CSV path, - for stdout");
    c->callback([&classify] { cmd_classify(classify); });

    RunArgs run;
    c = app.add_subcommand("run", "Run a full evaluation from a config file");
    c->add_option("--config", run.config, "Run config JSON")->required();
    c->add_option("--report", run.report, "Metric CSV output path");
    c->add_option("--roc", run.roc, "ROC CSV output path");
    c->add_option("--json", run.json, "Report JSON output path");
    c->callback([&run] { cmd_run(run); });

    SynthArgs synth;
    c = app.add_subcommand("synth", "Generate deterministic synthetic corpora");
    c->add_option("--kind", synth.kind, "events | forest | anomalous | traces")->required();
    c->add_option("--seed", synth.seed, "RNG seed");
    c->add_option("--count", synth.count, "Events, trees or benign traces to emit");
    c->add_option("--malicious-trees", synth.malicious_trees,
                  "Malicious tree count for --kind traces");
    c->add_option("--out", synth.out, "Output path, - for stdout")->required();
    c->callback([&synth] { cmd_synth(synth); });

    StatsArgs stats;
    c = app.add_subcommand("stats", "Print summary statistics for a forest");
    c->add_option("--forest", stats.forest, "Forest JSON input")->required();
    c->callback([&stats] { cmd_stats(stats); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
