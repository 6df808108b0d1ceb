#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taptree/tree.hpp"

namespace taptree {

enum class Stage { TEMPORAL_SET, CLUSTERED, SEMANTIC };
enum class WeightMerge { MAX, SUM };

const char* to_string(Stage s);
const char* to_string(WeightMerge w);
Stage stage_from(std::string_view s);            // "temporal" | "clustered" | "semantic"
WeightMerge weight_merge_from(std::string_view s);  // "max" | "sum"

struct BuildStats {
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    double build_millis = 0.0;  // in-memory only; persisted model files carry 0
};

// The fused forest of representative behavior trees. provenance maps each
// surviving tree_id to every raw tree folded into it.
struct BaselineModel {
    Stage stage = Stage::TEMPORAL_SET;
    WeightMerge weight_merge = WeightMerge::MAX;
    std::vector<TaskTree> trees;
    std::map<std::string, std::vector<std::string>> provenance;
    BuildStats build_stats;
};

// Injective node mapping witnessing that one tree embeds in another with
// direct parent-child edges and sibling order preserved.
struct SubtreeWitness {
    std::map<int, int> mapping;  // inner-tree node id -> host-tree node id
    bool verified = false;
};

// Identity used for structural deduplication: the sorted node-label multiset
// plus the sorted (parent label, child label) edge multiset. Weights and
// sibling order are deliberately excluded.
std::string structural_identity(const TaskTree& t);

// Stage 1: collapse structurally identical trees; corresponding edge weights
// combine under the configured rule (max by default).
BaselineModel temporal_tree_set(const std::vector<TaskTree>& trees,
                                WeightMerge wm = WeightMerge::MAX);

// Merge duplicate same-label leaf children under a common parent, to fixpoint.
TaskTree cluster_tree(const TaskTree& t, WeightMerge wm = WeightMerge::MAX);

// Stage 2: cluster every tree of a TEMPORAL_SET model, then re-deduplicate.
BaselineModel cluster_model(const BaselineModel& model);

// Witness that t2 embeds in t1 (anchored at any node) with labels, direct
// parent-child edges and sibling subordering preserved; weights unconstrained.
std::optional<SubtreeWitness> is_induced_subtree(const TaskTree& t2, const TaskTree& t1);

// Union of two trees sharing a root label: the guest is grafted at the first
// preorder occurrence of its root label in the host; coinciding edges combine
// weights, novel children append after existing siblings.
TaskTree merge_trees(const TaskTree& ta, const TaskTree& tb, WeightMerge wm = WeightMerge::MAX);

// Stage 3: absorb induced subtrees, merge root-sharing trees, append the rest;
// afterwards no surviving tree embeds in another.
BaselineModel semantic_aggregate(const BaselineModel& model);

// Online variant: fold one sanitized tree into a SEMANTIC model.
BaselineModel update_baseline(const BaselineModel& model, const TaskTree& new_tree);

// Run the stage pipeline far enough to reach `target`.
BaselineModel build_baseline(const std::vector<TaskTree>& trees, Stage target,
                             WeightMerge wm = WeightMerge::MAX);

}  // namespace taptree
