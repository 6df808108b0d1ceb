#include "taptree/tree.hpp"

#include <algorithm>
#include <cassert>

namespace taptree {

int TaskTree::add_root(std::string lbl, std::int64_t first_seen) {
    assert(nodes.empty() && "tree already has a root");
    TreeNode n;
    n.label = std::move(lbl);
    n.weight = 1;
    n.first_seen = first_seen;
    n.parent = -1;
    nodes.push_back(std::move(n));
    return 0;
}

int TaskTree::add_child(int parent, std::string lbl, std::uint64_t weight, std::int64_t first_seen) {
    assert(parent >= 0 && static_cast<std::size_t>(parent) < nodes.size());
    const int id = static_cast<int>(nodes.size());
    TreeNode n;
    n.label = std::move(lbl);
    n.weight = weight;
    n.first_seen = first_seen;
    n.parent = parent;
    nodes.push_back(std::move(n));
    nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
}

int TaskTree::find_child(int parent, std::string_view lbl) const {
    for (int c : nodes[static_cast<std::size_t>(parent)].children)
        if (nodes[static_cast<std::size_t>(c)].label == lbl) return c;
    return -1;
}

std::vector<int> TaskTree::depths() const {
    std::vector<int> d(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int p = nodes[i].parent;
        d[i] = (p < 0) ? 1 : d[static_cast<std::size_t>(p)] + 1;  // parents precede children
    }
    return d;
}

int TaskTree::depth_of(int id) const {
    int d = 1;
    for (int p = nodes[static_cast<std::size_t>(id)].parent; p >= 0;
         p = nodes[static_cast<std::size_t>(p)].parent)
        ++d;
    return d;
}

int TaskTree::depth() const {
    if (nodes.empty()) return 0;
    const auto d = depths();
    return *std::max_element(d.begin(), d.end());
}

std::vector<int> TaskTree::preorder() const {
    std::vector<int> out;
    out.reserve(nodes.size());
    if (nodes.empty()) return out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        out.push_back(v);
        const auto& ch = nodes[static_cast<std::size_t>(v)].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::uint64_t TaskTree::total_weight() const {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].parent >= 0) sum += nodes[i].weight;
    return sum;
}

bool TaskTree::has_label(std::string_view lbl) const {
    for (const auto& n : nodes)
        if (n.label == lbl) return true;
    return false;
}

std::string TaskTree::shape_key(bool with_weights) const {
    std::string out;
    out.reserve(nodes.size() * 16);
    if (nodes.empty()) return out;
    // Length-prefixed labels keep the encoding unambiguous for labels that
    // contain the bracket characters.
    auto encode = [&](auto&& self, int v) -> void {
        const TreeNode& n = nodes[static_cast<std::size_t>(v)];
        out += std::to_string(n.label.size());
        out += ':';
        out += n.label;
        if (with_weights && n.parent >= 0) {
            out += '*';
            out += std::to_string(n.weight);
        }
        out += '[';
        for (int c : n.children) self(self, c);
        out += ']';
    };
    encode(encode, 0);
    return out;
}

}  // namespace taptree
