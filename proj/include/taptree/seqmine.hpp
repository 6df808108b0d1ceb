#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "taptree/tree.hpp"

namespace taptree {

using Item = std::string;
using ItemSet = std::vector<Item>;     // kept sorted and unique
using Sequence = std::vector<ItemSet>;

struct Trace {
    std::string trace_id;
    std::string tree_id;
    Sequence items;
    int label = 0;

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct SequentialPattern {
    Sequence items;
    double support = 0.0;      // fraction of input sequences containing the pattern
    int n = 0;                 // total item count across itemsets
    double sup_benign = 0.0;   // fraction of benign sequences containing it
    double sup_malicious = 0.0;

    friend bool operator==(const SequentialPattern&, const SequentialPattern&) = default;
};

// Mining output plus the input size, which later feeds the epsilon used in
// class-ratio feature selection.
struct PatternSet {
    std::vector<SequentialPattern> patterns;
    std::size_t n_sequences = 0;

    friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

struct FeatureParams {
    double min_support = 0.0;
    double min_class_ratio = 2.0;
    bool drop_redundant = true;
    std::size_t n_sequences = 0;  // drives epsilon = 1 / (2 n)
};

struct TraceClassifier {
    std::vector<SequentialPattern> features;
    double prior_benign = 0.5;
    double prior_malicious = 0.5;
    // Smoothed presence probability per feature: [P(f | benign), P(f | malicious)].
    std::vector<std::array<double, 2>> likelihoods;
    double alpha = 1.0;

    friend bool operator==(const TraceClassifier&, const TraceClassifier&) = default;
};

struct Classification {
    int label = 0;
    double likelihood = 0.0;  // posterior probability of the malicious class
};

ItemSet make_itemset(std::vector<std::string> items);  // sorts and dedupes

// One trace per root-to-leaf path, leaves in sibling order; items are the node
// labels as singleton itemsets. Edge weights do not replicate items.
std::vector<Trace> extract_traces(const TaskTree& tree);
std::vector<Trace> extract_traces(const std::vector<TaskTree>& forest);

// True iff `small` embeds in `big`: indices i1 < ... < in with each small
// itemset a subset of the big itemset at that index.
bool contains(const Sequence& big, const Sequence& small);

// All sequences with support >= min_support, grown by prefix extension with
// the usual anti-monotone pruning; output in canonical order (item count,
// then lexicographic). Per-class supports are filled from trace labels.
PatternSet mine_patterns(const std::vector<Trace>& traces, double min_support);

// Patterns contained in no other pattern of the set.
std::vector<SequentialPattern> maximal_patterns(const std::vector<SequentialPattern>& patterns);

// Keep patterns heavily skewed toward one class; optionally drop a pattern
// contained in a kept one whose class ratio is within 10% of its own.
std::vector<SequentialPattern> select_features(const std::vector<SequentialPattern>& patterns,
                                               const FeatureParams& params);

TraceClassifier train_classifier(const std::vector<Trace>& traces,
                                 const std::vector<SequentialPattern>& features,
                                 double alpha = 1.0);

Classification classify(const Trace& trace, const TraceClassifier& clf, double threshold);

// Fraction of the trace's items no embedding of any baseline pattern can
// cover; 0 = fully explained, 1 = fully noisy.
double noise_score(const Trace& trace, const std::vector<SequentialPattern>& baseline);

}  // namespace taptree
