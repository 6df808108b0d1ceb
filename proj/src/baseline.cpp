#include "taptree/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>
#include <utility>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

std::uint64_t merge_weight(std::uint64_t a, std::uint64_t b, WeightMerge wm) {
    return wm == WeightMerge::MAX ? std::max(a, b) : a + b;
}

void append_encoded(std::string& out, const std::string& s) {
    out += std::to_string(s.size());
    out += ':';
    out += s;
}

// Fold the weights of `src` into `rep`, two trees with equal structural
// identity. When the full shapes (labels + sibling order) coincide the
// preorder walks pair up node for node; otherwise edges correspond by their
// (parent label, child label) pair, position within the pair group, extras
// folding into the group's last edge.
void fold_weights(TaskTree& rep, const TaskTree& src, WeightMerge wm) {
    if (rep.shape_key(false) == src.shape_key(false)) {
        const auto pr = rep.preorder();
        const auto ps = src.preorder();
        for (std::size_t i = 0; i < pr.size(); ++i) {
            TreeNode& rn = rep.nodes[static_cast<std::size_t>(pr[i])];
            const TreeNode& sn = src.nodes[static_cast<std::size_t>(ps[i])];
            if (rn.parent >= 0) rn.weight = merge_weight(rn.weight, sn.weight, wm);
            rn.first_seen = std::min(rn.first_seen, sn.first_seen);
        }
        return;
    }
    std::map<std::pair<std::string, std::string>, std::vector<int>> groups;
    for (int id : rep.preorder()) {
        const TreeNode& n = rep.nodes[static_cast<std::size_t>(id)];
        if (n.parent < 0) continue;
        groups[{rep.nodes[static_cast<std::size_t>(n.parent)].label, n.label}].push_back(id);
    }
    std::map<std::pair<std::string, std::string>, std::size_t> used;
    for (int id : src.preorder()) {
        const TreeNode& sn = src.nodes[static_cast<std::size_t>(id)];
        if (sn.parent < 0) continue;
        const std::pair<std::string, std::string> key{
            src.nodes[static_cast<std::size_t>(sn.parent)].label, sn.label};
        auto& ids = groups.at(key);  // identity equality guarantees the pair exists
        const std::size_t pos = std::min(used[key]++, ids.size() - 1);
        TreeNode& rn = rep.nodes[static_cast<std::size_t>(ids[pos])];
        rn.weight = merge_weight(rn.weight, sn.weight, wm);
        rn.first_seen = std::min(rn.first_seen, sn.first_seen);
    }
    rep.nodes[0].first_seen = std::min(rep.nodes[0].first_seen, src.nodes[0].first_seen);
}

struct Entry {
    TaskTree tree;
    std::vector<std::string> sources;
};

// Shared by stages 1 and 2: collapse entries with equal structural identity.
std::vector<Entry> dedupe_entries(std::vector<Entry> in, WeightMerge wm) {
    std::vector<Entry> out;
    std::unordered_map<std::string, std::size_t> index;
    for (Entry& e : in) {
        const std::string key = structural_identity(e.tree);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, out.size());
            out.push_back(std::move(e));
            continue;
        }
        Entry& rep = out[it->second];
        fold_weights(rep.tree, e.tree, wm);
        rep.tree.label = std::max(rep.tree.label, e.tree.label);
        rep.sources.insert(rep.sources.end(), e.sources.begin(), e.sources.end());
    }
    return out;
}

BaselineModel model_from_entries(std::vector<Entry> entries, Stage stage, WeightMerge wm,
                                 std::size_t input_count, double millis) {
    BaselineModel m;
    m.stage = stage;
    m.weight_merge = wm;
    m.build_stats.input_count = input_count;
    m.build_stats.output_count = entries.size();
    m.build_stats.build_millis = millis;
    for (Entry& e : entries) {
        m.provenance[e.tree.tree_id] = std::move(e.sources);
        m.trees.push_back(std::move(e.tree));
    }
    return m;
}

std::vector<Entry> entries_from_model(const BaselineModel& model) {
    std::vector<Entry> entries;
    entries.reserve(model.trees.size());
    for (const TaskTree& t : model.trees) {
        Entry e;
        e.tree = t;
        auto it = model.provenance.find(t.tree_id);
        e.sources = (it != model.provenance.end()) ? it->second
                                                   : std::vector<std::string>{t.tree_id};
        entries.push_back(std::move(e));
    }
    return entries;
}

// Greedy left-to-right embedding of the subtree rooted at `cn` onto the node
// `hn`. Children of cn must map onto an increasing subsequence of hn's
// children; taking the leftmost child that accepts the full subtree is safe
// because any later witness can be exchanged for it without shrinking the
// options left for the remaining siblings.
bool embed_at(const TaskTree& c, int cn, const TaskTree& h, int hn, std::map<int, int>& out) {
    const TreeNode& cnode = c.nodes[static_cast<std::size_t>(cn)];
    const TreeNode& hnode = h.nodes[static_cast<std::size_t>(hn)];
    if (cnode.label != hnode.label) return false;
    std::map<int, int> local;
    local[cn] = hn;
    std::size_t hi = 0;
    for (int cc : cnode.children) {
        bool placed = false;
        while (hi < hnode.children.size()) {
            std::map<int, int> sub;
            if (embed_at(c, cc, h, hnode.children[hi], sub)) {
                local.insert(sub.begin(), sub.end());
                ++hi;
                placed = true;
                break;
            }
            ++hi;
        }
        if (!placed) return false;
    }
    out.insert(local.begin(), local.end());
    return true;
}

void absorb_into(TaskTree& host, const TaskTree& sub, const SubtreeWitness& w, WeightMerge wm) {
    for (const auto& [cn, hn] : w.mapping) {
        const TreeNode& sn = sub.nodes[static_cast<std::size_t>(cn)];
        TreeNode& hnode = host.nodes[static_cast<std::size_t>(hn)];
        if (sn.parent >= 0) hnode.weight = merge_weight(hnode.weight, sn.weight, wm);
        hnode.first_seen = std::min(hnode.first_seen, sn.first_seen);
    }
    host.label = std::max(host.label, sub.label);
}

bool merge_applicable(const TaskTree& a, const TaskTree& b) {
    return a.has_label(b.nodes[0].label) || b.has_label(a.nodes[0].label);
}

void copy_subtree(TaskTree& out, int parent, const TaskTree& src, int sn) {
    const TreeNode& n = src.nodes[static_cast<std::size_t>(sn)];
    const int id = out.add_child(parent, n.label, n.weight, n.first_seen);
    for (int c : n.children) copy_subtree(out, id, src, c);
}

void graft(TaskTree& host, int hn, const TaskTree& guest, int gn, WeightMerge wm) {
    const TreeNode& gnode = guest.nodes[static_cast<std::size_t>(gn)];
    host.nodes[static_cast<std::size_t>(hn)].first_seen =
        std::min(host.nodes[static_cast<std::size_t>(hn)].first_seen, gnode.first_seen);
    for (int gc : gnode.children) {
        const TreeNode& gchild = guest.nodes[static_cast<std::size_t>(gc)];
        const int hit = host.find_child(hn, gchild.label);
        if (hit >= 0) {
            TreeNode& hchild = host.nodes[static_cast<std::size_t>(hit)];
            hchild.weight = merge_weight(hchild.weight, gchild.weight, wm);
            graft(host, hit, guest, gc, wm);
        } else {
            copy_subtree(host, hn, guest, gc);
        }
    }
}

// One acceptance step of the aggregation loop: absorb into the first entry
// admitting an embedding, else merge with the first entry sharing a root
// label, else append as a new representative.
void accept_candidate(std::vector<Entry>& accepted, Entry cand, WeightMerge wm) {
    for (Entry& a : accepted) {
        if (auto w = is_induced_subtree(cand.tree, a.tree)) {
            absorb_into(a.tree, cand.tree, *w, wm);
            a.sources.insert(a.sources.end(), cand.sources.begin(), cand.sources.end());
            return;
        }
    }
    for (Entry& a : accepted) {
        if (merge_applicable(a.tree, cand.tree)) {
            a.tree = merge_trees(a.tree, cand.tree, wm);
            a.sources.insert(a.sources.end(), cand.sources.begin(), cand.sources.end());
            return;
        }
    }
    accepted.push_back(std::move(cand));
}

// Merging can create fresh embedding relations between survivors; absorb
// until the collection is an antichain again.
void absorb_closure(std::vector<Entry>& accepted, WeightMerge wm) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < accepted.size() && !changed; ++i) {
            for (std::size_t j = 0; j < accepted.size() && !changed; ++j) {
                if (i == j) continue;
                if (auto w = is_induced_subtree(accepted[j].tree, accepted[i].tree)) {
                    absorb_into(accepted[i].tree, accepted[j].tree, *w, wm);
                    accepted[i].sources.insert(accepted[i].sources.end(),
                                               accepted[j].sources.begin(),
                                               accepted[j].sources.end());
                    accepted.erase(accepted.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                }
            }
        }
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

const char* to_string(Stage s) {
    switch (s) {
        case Stage::TEMPORAL_SET: return "temporal";
        case Stage::CLUSTERED: return "clustered";
        case Stage::SEMANTIC: break;
    }
    return "semantic";
}

const char* to_string(WeightMerge w) { return w == WeightMerge::MAX ? "max" : "sum"; }

Stage stage_from(std::string_view s) {
    if (s == "temporal" || s == "temporal_set") return Stage::TEMPORAL_SET;
    if (s == "clustered") return Stage::CLUSTERED;
    if (s == "semantic") return Stage::SEMANTIC;
    throw FormatError("unknown stage: " + std::string(s));
}

WeightMerge weight_merge_from(std::string_view s) {
    if (s == "max") return WeightMerge::MAX;
    if (s == "sum") return WeightMerge::SUM;
    throw FormatError("unknown weight merge rule: " + std::string(s));
}

std::string structural_identity(const TaskTree& t) {
    std::vector<std::string> labels;
    labels.reserve(t.nodes.size());
    std::vector<std::string> edges;
    edges.reserve(t.nodes.size());
    for (const TreeNode& n : t.nodes) {
        labels.push_back(n.label);
        if (n.parent >= 0) {
            std::string e;
            append_encoded(e, t.nodes[static_cast<std::size_t>(n.parent)].label);
            append_encoded(e, n.label);
            edges.push_back(std::move(e));
        }
    }
    std::sort(labels.begin(), labels.end());
    std::sort(edges.begin(), edges.end());
    std::string key = "V";
    for (const std::string& l : labels) append_encoded(key, l);
    key += "E";
    for (const std::string& e : edges) append_encoded(key, e);
    return key;
}

BaselineModel temporal_tree_set(const std::vector<TaskTree>& trees, WeightMerge wm) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Entry> entries;
    entries.reserve(trees.size());
    for (const TaskTree& t : trees) entries.push_back(Entry{t, {t.tree_id}});
    auto out = dedupe_entries(std::move(entries), wm);
    return model_from_entries(std::move(out), Stage::TEMPORAL_SET, wm, trees.size(),
                              elapsed_ms(t0));
}

TaskTree cluster_tree(const TaskTree& t, WeightMerge wm) {
    if (t.empty()) return t;
    TaskTree out;
    out.tree_id = t.tree_id;
    out.host = t.host;
    out.label = t.label;
    // Rebuild top-down; leaf children that repeat a label under the same
    // parent collapse into the first occurrence.
    auto rebuild = [&](auto&& self, int sn, int parent) -> void {
        const TreeNode& n = t.nodes[static_cast<std::size_t>(sn)];
        const int id = (parent < 0) ? out.add_root(n.label, n.first_seen)
                                    : out.add_child(parent, n.label, n.weight, n.first_seen);
        std::map<std::string, int> leaf_by_label;
        for (int c : n.children) {
            const TreeNode& cn = t.nodes[static_cast<std::size_t>(c)];
            if (cn.children.empty()) {
                auto it = leaf_by_label.find(cn.label);
                if (it != leaf_by_label.end()) {
                    TreeNode& kept = out.nodes[static_cast<std::size_t>(it->second)];
                    kept.weight = merge_weight(kept.weight, cn.weight, wm);
                    kept.first_seen = std::min(kept.first_seen, cn.first_seen);
                    continue;
                }
                leaf_by_label[cn.label] =
                    out.add_child(id, cn.label, cn.weight, cn.first_seen);
            } else {
                self(self, c, id);
            }
        }
    };
    rebuild(rebuild, 0, -1);
    return out;
}

BaselineModel cluster_model(const BaselineModel& model) {
    if (model.stage != Stage::TEMPORAL_SET)
        throw StageError("cluster_model expects a temporal tree set");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Entry> entries = entries_from_model(model);
    for (Entry& e : entries) e.tree = cluster_tree(e.tree, model.weight_merge);
    auto out = dedupe_entries(std::move(entries), model.weight_merge);
    return model_from_entries(std::move(out), Stage::CLUSTERED, model.weight_merge,
                              model.trees.size(), elapsed_ms(t0));
}

std::optional<SubtreeWitness> is_induced_subtree(const TaskTree& t2, const TaskTree& t1) {
    if (t2.empty() || t1.empty() || t2.node_count() > t1.node_count()) return std::nullopt;
    for (int anchor : t1.preorder()) {
        SubtreeWitness w;
        if (embed_at(t2, 0, t1, anchor, w.mapping)) {
            w.verified = true;
            return w;
        }
    }
    return std::nullopt;
}

TaskTree merge_trees(const TaskTree& ta, const TaskTree& tb, WeightMerge wm) {
    if (ta.empty() || tb.empty())
        throw MergePreconditionError("cannot merge an empty tree");
    const TaskTree* host = nullptr;
    const TaskTree* guest = nullptr;
    if (ta.has_label(tb.nodes[0].label)) {
        host = &ta;
        guest = &tb;
    } else if (tb.has_label(ta.nodes[0].label)) {
        host = &tb;
        guest = &ta;
    } else {
        throw MergePreconditionError("neither root label occurs in the other tree");
    }
    TaskTree out = *host;
    out.label = std::max(ta.label, tb.label);
    int at = -1;
    for (int id : out.preorder()) {
        if (out.nodes[static_cast<std::size_t>(id)].label == guest->nodes[0].label) {
            at = id;
            break;
        }
    }
    graft(out, at, *guest, 0, wm);
    return out;
}

BaselineModel semantic_aggregate(const BaselineModel& model) {
    if (model.stage != Stage::CLUSTERED)
        throw StageError("semantic aggregation expects a clustered model");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Entry> entries = entries_from_model(model);
    // Biggest trees first so small ones land inside them; ties by id for a
    // reproducible pass.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.tree.node_count() != b.tree.node_count())
            return a.tree.node_count() > b.tree.node_count();
        return a.tree.tree_id < b.tree.tree_id;
    });
    std::vector<Entry> accepted;
    for (Entry& e : entries) accept_candidate(accepted, std::move(e), model.weight_merge);
    absorb_closure(accepted, model.weight_merge);
    return model_from_entries(std::move(accepted), Stage::SEMANTIC, model.weight_merge,
                              model.trees.size(), elapsed_ms(t0));
}

BaselineModel update_baseline(const BaselineModel& model, const TaskTree& new_tree) {
    if (model.stage != Stage::SEMANTIC)
        throw StageError("update_baseline expects a semantic model");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Entry> accepted = entries_from_model(model);
    Entry cand;
    cand.tree = cluster_tree(new_tree, model.weight_merge);
    cand.sources = {new_tree.tree_id};
    accept_candidate(accepted, std::move(cand), model.weight_merge);
    absorb_closure(accepted, model.weight_merge);
    auto out = model_from_entries(std::move(accepted), Stage::SEMANTIC, model.weight_merge,
                                  model.build_stats.input_count + 1, elapsed_ms(t0));
    return out;
}

BaselineModel build_baseline(const std::vector<TaskTree>& trees, Stage target, WeightMerge wm) {
    BaselineModel m = temporal_tree_set(trees, wm);
    double millis = m.build_stats.build_millis;
    if (target == Stage::TEMPORAL_SET) return m;
    m = cluster_model(m);
    millis += m.build_stats.build_millis;
    if (target == Stage::CLUSTERED) {
        m.build_stats.input_count = trees.size();
        m.build_stats.build_millis = millis;
        return m;
    }
    m = semantic_aggregate(m);
    m.build_stats.input_count = trees.size();
    m.build_stats.build_millis += millis;
    return m;
}

}  // namespace taptree
