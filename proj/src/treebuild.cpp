#include "taptree/treebuild.hpp"

#include <cctype>
#include <string>
#include <unordered_map>

namespace taptree {

namespace {

// A node reference that stays valid while the tree vector grows.
struct Ref {
    int tree = -1;
    int node = -1;
    bool valid() const { return tree >= 0; }
};

bool is_start_event(const AuditEvent& e) {
    if (e.object != ObjectKind::PROCESS) return false;
    std::string up = e.action;
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return up == "START" || up == "CREATE";
}

}  // namespace

std::vector<TaskTree> build_trees(const EventBatch& batch) {
    std::vector<TaskTree> trees;
    std::unordered_map<std::int64_t, Ref> by_pid;
    std::unordered_map<std::string, Ref> by_actor;

    auto node_label = [&](const Ref& r) -> const std::string& {
        return trees[static_cast<std::size_t>(r.tree)].nodes[static_cast<std::size_t>(r.node)].label;
    };

    auto new_root = [&](const std::string& label, std::int64_t ts) -> Ref {
        TaskTree t;
        t.host = batch.host;
        t.add_root(label, ts);
        trees.push_back(std::move(t));
        return Ref{static_cast<int>(trees.size()) - 1, 0};
    };

    // Attach `label` under `parent`, reusing an existing same-label child as a
    // weight increment. Exactly one attach happens per event.
    auto attach = [&](const Ref& parent, const std::string& label, std::int64_t ts) -> Ref {
        TaskTree& t = trees[static_cast<std::size_t>(parent.tree)];
        const int existing = t.find_child(parent.node, label);
        if (existing >= 0) {
            t.nodes[static_cast<std::size_t>(existing)].weight += 1;
            return Ref{parent.tree, existing};
        }
        const int id = t.add_child(parent.node, label, 1, ts);
        return Ref{parent.tree, id};
    };

    for (const AuditEvent& e : batch.events) {
        Ref parent;
        std::string child_label;

        if (is_start_event(e)) {
            child_label = e.image_path;
            // Filiation first: the ppid owner, unless the record names a
            // different parent image (stale pid); then actor lineage; then a
            // synthesized root for the never-observed parent.
            if (auto it = by_pid.find(e.ppid); it != by_pid.end()) {
                if (e.parent_image_path == "unknown" || node_label(it->second) == e.parent_image_path)
                    parent = it->second;
            }
            if (!parent.valid()) {
                if (auto it = by_actor.find(e.actor_id); it != by_actor.end()) parent = it->second;
            }
            if (!parent.valid()) {
                parent = new_root(e.parent_image_path, e.timestamp_us);
                by_pid[e.ppid] = parent;
            }
            const Ref child = attach(parent, child_label, e.timestamp_us);
            // The started process is now live under its own pid; its object id
            // names it and the actor id keeps naming the parent.
            by_pid[e.pid] = child;
            by_actor[e.object_id] = child;
            by_actor[e.actor_id] = parent;
            if (e.label && *e.label == 1) trees[static_cast<std::size_t>(child.tree)].label = 1;
            continue;
        }

        // Non-start event: resolve the acting process, then hang the acted-on
        // path under it. A pid whose recorded image no longer matches is
        // treated as reused and gets a fresh lineage.
        Ref actor;
        if (auto it = by_pid.find(e.pid); it != by_pid.end()) {
            if (e.image_path == "unknown" || node_label(it->second) == e.image_path)
                actor = it->second;
        }
        if (!actor.valid()) {
            if (auto it = by_actor.find(e.actor_id); it != by_actor.end()) actor = it->second;
        }
        if (!actor.valid()) {
            actor = new_root(e.image_path, e.timestamp_us);
            by_pid[e.pid] = actor;
        }
        by_actor[e.actor_id] = actor;

        child_label = (e.object == ObjectKind::PROCESS) ? e.image_path : e.file_path;
        attach(actor, child_label, e.timestamp_us);
        if (e.label && *e.label == 1) trees[static_cast<std::size_t>(actor.tree)].label = 1;
    }

    const std::string day = day_string(batch.events.empty() ? batch.day * 86'400'000'000LL
                                                            : batch.span_start);
    for (std::size_t i = 0; i < trees.size(); ++i)
        trees[i].tree_id = batch.host + "/" + day + "/t" + std::to_string(i);
    return trees;
}

std::vector<TaskTree> filter_trees(const std::vector<TaskTree>& trees, const TreeFilter& f) {
    std::vector<TaskTree> out;
    for (const TaskTree& t : trees)
        if (t.node_count() >= static_cast<std::size_t>(f.min_nodes) && t.depth() >= f.min_depth)
            out.push_back(t);
    return out;
}

TreeStats tree_stats(const std::vector<TaskTree>& trees) {
    TreeStats s;
    s.count = trees.size();
    for (const TaskTree& t : trees) {
        s.total_nodes += t.node_count();
        s.depth_histogram[t.depth()] += 1;
        s.node_histogram[t.node_count()] += 1;
        if (t.label == 1)
            ++s.malicious;
        else
            ++s.benign;
    }
    return s;
}

}  // namespace taptree
