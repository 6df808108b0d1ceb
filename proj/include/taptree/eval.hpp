#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taptree/baseline.hpp"
#include "taptree/seqmine.hpp"
#include "taptree/tree.hpp"
#include "taptree/treematch.hpp"

namespace taptree {

struct MetricRow {
    double threshold = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double tpr = 0.0, tnr = 0.0, accuracy = 0.0, fpr = 0.0;
    std::optional<double> precision;  // absent when tp + fp == 0

    friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct Timing {
    double baseline_build_seconds = 0.0;
    double mean_match_millis = 0.0;

    friend bool operator==(const Timing&, const Timing&) = default;
};

struct EvalReport {
    std::string protocol;  // e.g. "kfold10" or "kfold10+loo_tree"
    std::vector<MetricRow> rows;
    Timing timing;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct RunConfig {
    std::string task = "detect";  // "detect" or "classify"
    std::string input_events;
    std::string input_traces;  // classify may read traces directly
    std::string host_filter;
    double max_bad_fraction = 0.10;
    int min_nodes = 1;
    int min_depth = 1;
    Stage stage = Stage::SEMANTIC;
    WeightMerge weight_merge = WeightMerge::MAX;
    MatchMode mode = MatchMode::PARTIAL_SAME_WEIGHT;
    Anchor anchor = Anchor::ANY_NODE;
    std::vector<double> delta_grid = {0.5, 0.7, 0.9};
    std::vector<double> seq_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double min_support = 0.05;
    double min_class_ratio = 2.0;
    bool drop_redundant = true;
    bool use_maximal = true;
    double alpha = 1.0;
    int kfold = 10;
    std::string loo_level = "tree";  // "tree" or "trace"
    std::uint64_t seed = 1;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

MetricRow make_row(double threshold, std::size_t tp, std::size_t fp, std::size_t tn,
                   std::size_t fn);

// Seeded Fisher-Yates partition of [0, n) into k nearly equal folds. The
// shuffle is hand-rolled so fold membership is identical on every platform.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed);

// Worker cap: TAPTREE_THREADS when set, else hardware concurrency.
std::size_t worker_count();

// One-class protocol: k-fold over the benign forest (the baseline is rebuilt
// without the held-out fold), while malicious trees score against the full
// benign baseline. One score per tree feeds every delta in the grid.
EvalReport evaluate_tree_detector(const std::vector<TaskTree>& benign,
                                  const std::vector<TaskTree>& malicious,
                                  const RunConfig& config);

// Supervised protocol: k-fold over benign traces, leave-one-out over the
// malicious side (per tree or per trace, see loo_level); the mining, feature
// selection and classifier are refit for every training split.
EvalReport evaluate_sequence_classifier(const std::vector<Trace>& traces,
                                        const RunConfig& config);

EvalReport run_pipeline(const RunConfig& config);

// Stable CSV renderings (no timing columns, byte-identical across runs).
std::string report_csv(const EvalReport& report);
std::string roc_csv(const EvalReport& report);

}  // namespace taptree
