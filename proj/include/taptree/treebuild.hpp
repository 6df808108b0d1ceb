#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "taptree/event.hpp"
#include "taptree/tree.hpp"

namespace taptree {

struct TreeFilter {
    int min_nodes = 1;
    int min_depth = 1;
};

struct TreeStats {
    std::size_t count = 0;
    std::size_t total_nodes = 0;
    std::map<int, std::size_t> depth_histogram;          // max depth -> tree count
    std::map<std::size_t, std::size_t> node_histogram;   // node count -> tree count
    std::size_t benign = 0;
    std::size_t malicious = 0;
};

// Build task process-trees from one time-sorted batch. Process starts attach
// the child image under its parent's node (ppid first, actor lineage as
// fallback, otherwise a fresh root); every other event attaches the acted-on
// path under the acting process. A repeat of the same (parent node, child
// label) pair bumps that edge's weight, so the sum of all edge weights equals
// the number of events consumed.
std::vector<TaskTree> build_trees(const EventBatch& batch);

std::vector<TaskTree> filter_trees(const std::vector<TaskTree>& trees, const TreeFilter& f);

TreeStats tree_stats(const std::vector<TaskTree>& trees);

}  // namespace taptree
