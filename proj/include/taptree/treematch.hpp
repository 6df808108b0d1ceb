#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "taptree/baseline.hpp"
#include "taptree/tree.hpp"

namespace taptree {

enum class MatchMode { EXACT, PARTIAL_SAME_WEIGHT, PARTIAL_VARIABLE_WEIGHT };
enum class Anchor { ROOT_ONLY, ANY_NODE };

const char* to_string(MatchMode m);
MatchMode match_mode_from(std::string_view s);  // "exact" | "partial-same" | "partial-var"
const char* to_string(Anchor a);
Anchor anchor_from(std::string_view s);  // "root" | "any"

struct MatchParams {
    MatchMode mode = MatchMode::PARTIAL_SAME_WEIGHT;
    double delta = 0.5;  // score threshold; unused for EXACT
    Anchor anchor = Anchor::ANY_NODE;
};

// Outcome of matching pattern p against one baseline tree. matched holds the
// pattern node ids of R, the best connected root-containing part of p that
// embeds; the score is k/l with weights 1 per node (same-weight) or the node
// depth (variable-weight), l summed over all of p.
struct MatchResult {
    std::string baseline_tree_id;
    std::vector<int> matched;
    long long k = 0;
    long long l = 0;
    double score = 0.0;
    bool match = false;  // score >= delta
};

struct DetectionVerdict {
    std::string tree_id;
    double best_score = 0.0;
    std::string best_baseline_id;
    bool anomalous = false;
};

// Full embedding of p into t: labels, direct parent-child edges, sibling
// subordering and, for every pattern edge, weight(p) <= weight(t). The search
// expands depth-first and bails out on the first mismatch per anchoring.
bool exact_match(const TaskTree& p, const TaskTree& t, Anchor anchor = Anchor::ANY_NODE);

// Best-scoring partial embedding under the exact-match constraints; a pattern
// edge that fails its weight bound simply stays outside R.
MatchResult partial_match(const TaskTree& p, const TaskTree& t, const MatchParams& params);

// Score `tree` against every model tree (ascending tree_id) and flag it
// anomalous when even the best score stays below delta. Scanning normally
// stops at the first score that clears delta; pass exhaustive=true to always
// compute the true maximum (threshold sweeps need that).
DetectionVerdict detect(const TaskTree& tree, const BaselineModel& model,
                        const MatchParams& params, bool exhaustive = false);

}  // namespace taptree
