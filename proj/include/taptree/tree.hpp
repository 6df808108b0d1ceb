#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace taptree {

// One node of a task process-tree. Nodes live in TaskTree::nodes in creation
// order and a node's id is its index there, so a parent id is always smaller
// than any of its children's ids.
struct TreeNode {
    std::string label;            // program or file path; "unknown" when the log omitted it
    std::uint64_t weight = 1;     // invocation count on the edge from the parent; unused on the root
    std::int64_t first_seen = 0;  // microseconds since epoch, first observation
    int parent = -1;
    std::vector<int> children;    // left-to-right sibling order

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Weighted rooted tree of program invocations observed for one task.
// Sibling order is the order children were attached, which for trees built
// from a time-sorted batch coincides with first_seen order.
struct TaskTree {
    std::string tree_id;
    std::string host;
    int label = 0;                // 1 when any contributing event was tagged malicious
    std::vector<TreeNode> nodes;  // index 0 is the root when non-empty

    bool empty() const { return nodes.empty(); }
    std::size_t node_count() const { return nodes.size(); }
    bool is_leaf(int id) const { return nodes[static_cast<std::size_t>(id)].children.empty(); }

    int add_root(std::string lbl, std::int64_t first_seen = 0);
    int add_child(int parent, std::string lbl, std::uint64_t weight = 1, std::int64_t first_seen = 0);

    // First child of `parent` carrying `lbl`, or -1.
    int find_child(int parent, std::string_view lbl) const;

    // Depth of every node; root has depth 1.
    std::vector<int> depths() const;
    int depth_of(int id) const;
    int depth() const;  // max over nodes, 0 for an empty tree

    std::vector<int> preorder() const;
    std::uint64_t total_weight() const;  // sum of non-root edge weights
    bool has_label(std::string_view lbl) const;

    // Canonical encoding of the tree shape (labels, sibling order, optionally
    // weights). Two trees have equal keys iff a walk in sibling order visits
    // the same labels/arities, independent of node storage order.
    std::string shape_key(bool with_weights) const;

    friend bool operator==(const TaskTree&, const TaskTree&) = default;
};

}  // namespace taptree
