#include "taptree/treematch.hpp"

#include <algorithm>
#include <numeric>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

// Exact embedding of the pattern subtree at pn onto target node tn, greedy
// leftmost over target children (complete for ordered embeddings: a leftmost
// feasible child never costs a later sibling its options).
bool exact_at(const TaskTree& p, int pn, const TaskTree& t, int tn) {
    const TreeNode& pnode = p.nodes[static_cast<std::size_t>(pn)];
    const TreeNode& tnode = t.nodes[static_cast<std::size_t>(tn)];
    if (pnode.label != tnode.label) return false;
    std::size_t ti = 0;
    for (int pc : pnode.children) {
        bool placed = false;
        while (ti < tnode.children.size()) {
            const int tc = tnode.children[ti];
            ++ti;
            if (p.nodes[static_cast<std::size_t>(pc)].weight <=
                    t.nodes[static_cast<std::size_t>(tc)].weight &&
                exact_at(p, pc, t, tc)) {
                placed = true;
                break;
            }
        }
        if (!placed) return false;
    }
    return true;
}

// Weight of a pattern node in the chosen scoring mode.
long long omega(const std::vector<int>& depths, int pn, MatchMode mode) {
    return mode == MatchMode::PARTIAL_VARIABLE_WEIGHT
               ? static_cast<long long>(depths[static_cast<std::size_t>(pn)])
               : 1LL;
}

struct PartialSolver {
    const TaskTree& p;
    const TaskTree& t;
    MatchMode mode;
    std::vector<int> pdepths;
    std::vector<long long> memo;  // best gain for (pn, tn), -1 unknown, -2 label clash

    PartialSolver(const TaskTree& pp, const TaskTree& tt, MatchMode m)
        : p(pp), t(tt), mode(m), pdepths(pp.depths()),
          memo(pp.node_count() * tt.node_count(), -1) {}

    long long& cell(int pn, int tn) {
        return memo[static_cast<std::size_t>(pn) * t.node_count() + static_cast<std::size_t>(tn)];
    }

    // Best total weight of a connected part of p's subtree at pn, with pn
    // pinned onto tn. Labels must agree; the caller checks the edge weight
    // bound for pn itself.
    long long best(int pn, int tn) {
        long long& m = cell(pn, tn);
        if (m != -1) return m == -2 ? 0 : m;
        const TreeNode& pnode = p.nodes[static_cast<std::size_t>(pn)];
        const TreeNode& tnode = t.nodes[static_cast<std::size_t>(tn)];
        if (pnode.label != tnode.label) {
            m = -2;
            return 0;
        }
        m = omega(pdepths, pn, mode) + child_gain(pnode.children, tnode.children);
        return m;
    }

    bool takeable(int pc, int tc) {
        const TreeNode& pchild = p.nodes[static_cast<std::size_t>(pc)];
        const TreeNode& tchild = t.nodes[static_cast<std::size_t>(tc)];
        return pchild.label == tchild.label && pchild.weight <= tchild.weight;
    }

    // Align pattern children with an increasing subsequence of target
    // children; a skipped pattern child drops its whole subtree from R.
    long long child_gain(const std::vector<int>& pc, const std::vector<int>& tc) {
        const std::size_t np = pc.size(), nt = tc.size();
        if (np == 0) return 0;
        std::vector<long long> dp((np + 1) * (nt + 1), 0);
        auto at = [&](std::size_t i, std::size_t j) -> long long& { return dp[i * (nt + 1) + j]; };
        for (std::size_t i = np; i-- > 0;) {
            for (std::size_t j = nt; j-- > 0;) {
                long long v = std::max(at(i + 1, j), at(i, j + 1));
                if (takeable(pc[i], tc[j]))
                    v = std::max(v, best(pc[i], tc[j]) + at(i + 1, j + 1));
                at(i, j) = v;
            }
        }
        return at(0, 0);
    }

    // Re-walk the DP to emit the matched pattern nodes. Preference on ties:
    // take the current pair, else advance the target child, else drop the
    // pattern child; this reproduces one maximiser deterministically.
    void collect(int pn, int tn, std::vector<int>& out) {
        out.push_back(pn);
        const TreeNode& pnode = p.nodes[static_cast<std::size_t>(pn)];
        const TreeNode& tnode = t.nodes[static_cast<std::size_t>(tn)];
        const auto& pc = pnode.children;
        const auto& tc = tnode.children;
        const std::size_t np = pc.size(), nt = tc.size();
        if (np == 0) return;
        std::vector<long long> dp((np + 1) * (nt + 1), 0);
        auto at = [&](std::size_t i, std::size_t j) -> long long& { return dp[i * (nt + 1) + j]; };
        for (std::size_t i = np; i-- > 0;)
            for (std::size_t j = nt; j-- > 0;) {
                long long v = std::max(at(i + 1, j), at(i, j + 1));
                if (takeable(pc[i], tc[j]))
                    v = std::max(v, best(pc[i], tc[j]) + at(i + 1, j + 1));
                at(i, j) = v;
            }
        std::size_t i = 0, j = 0;
        while (i < np && j < nt) {
            if (takeable(pc[i], tc[j]) &&
                at(i, j) == best(pc[i], tc[j]) + at(i + 1, j + 1)) {
                collect(pc[i], tc[j], out);
                ++i;
                ++j;
            } else if (at(i, j) == at(i, j + 1)) {
                ++j;
            } else {
                ++i;
            }
        }
    }
};

}  // namespace

const char* to_string(MatchMode m) {
    switch (m) {
        case MatchMode::EXACT: return "exact";
        case MatchMode::PARTIAL_SAME_WEIGHT: return "partial-same";
        case MatchMode::PARTIAL_VARIABLE_WEIGHT: break;
    }
    return "partial-var";
}

MatchMode match_mode_from(std::string_view s) {
    if (s == "exact") return MatchMode::EXACT;
    if (s == "partial-same" || s == "partial_same_weight") return MatchMode::PARTIAL_SAME_WEIGHT;
    if (s == "partial-var" || s == "partial_variable_weight")
        return MatchMode::PARTIAL_VARIABLE_WEIGHT;
    throw FormatError("unknown match mode: " + std::string(s));
}

const char* to_string(Anchor a) { return a == Anchor::ROOT_ONLY ? "root" : "any"; }

Anchor anchor_from(std::string_view s) {
    if (s == "root" || s == "root_only") return Anchor::ROOT_ONLY;
    if (s == "any" || s == "any_node") return Anchor::ANY_NODE;
    throw FormatError("unknown anchor: " + std::string(s));
}

bool exact_match(const TaskTree& p, const TaskTree& t, Anchor anchor) {
    if (p.empty() || t.empty()) return false;
    if (anchor == Anchor::ROOT_ONLY) return exact_at(p, 0, t, 0);
    for (int tn : t.preorder())
        if (exact_at(p, 0, t, tn)) return true;
    return false;
}

MatchResult partial_match(const TaskTree& p, const TaskTree& t, const MatchParams& params) {
    if (params.mode == MatchMode::EXACT)
        throw Error("partial_match requires a partial mode");
    MatchResult r;
    r.baseline_tree_id = t.tree_id;
    if (p.empty() || t.empty()) return r;

    PartialSolver solver(p, t, params.mode);
    const auto pd = p.depths();
    long long l = 0;
    for (std::size_t i = 0; i < p.node_count(); ++i)
        l += omega(pd, static_cast<int>(i), params.mode);
    r.l = l;

    long long bestGain = 0;
    int bestAnchor = -1;
    if (params.anchor == Anchor::ROOT_ONLY) {
        if (t.nodes[0].label == p.nodes[0].label) {
            bestGain = solver.best(0, 0);
            bestAnchor = 0;
        }
    } else {
        for (int tn : t.preorder()) {
            if (t.nodes[static_cast<std::size_t>(tn)].label != p.nodes[0].label) continue;
            const long long g = solver.best(0, tn);
            if (g > bestGain || bestAnchor < 0) {
                bestGain = g;
                bestAnchor = tn;
            }
        }
    }
    if (bestAnchor >= 0 && bestGain > 0) {
        solver.collect(0, bestAnchor, r.matched);
        std::sort(r.matched.begin(), r.matched.end());
        r.k = bestGain;
    }
    r.score = (r.l > 0) ? static_cast<double>(r.k) / static_cast<double>(r.l) : 0.0;
    r.match = r.score >= params.delta;
    return r;
}

DetectionVerdict detect(const TaskTree& tree, const BaselineModel& model,
                        const MatchParams& params, bool exhaustive) {
    if (model.stage == Stage::TEMPORAL_SET)
        throw StageError("detection requires a clustered or semantic baseline");
    if (model.trees.empty()) throw EmptyModelError("baseline model has no trees");

    // Canonical scan order makes the verdict independent of model tree order.
    std::vector<std::size_t> order(model.trees.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.trees[a].tree_id < model.trees[b].tree_id;
    });

    DetectionVerdict v;
    v.tree_id = tree.tree_id;
    if (params.mode == MatchMode::EXACT) {
        for (std::size_t idx : order) {
            if (exact_match(tree, model.trees[idx], params.anchor)) {
                v.best_score = 1.0;
                v.best_baseline_id = model.trees[idx].tree_id;
                v.anomalous = false;
                return v;
            }
        }
        v.best_score = 0.0;
        v.anomalous = true;
        return v;
    }

    bool first = true;
    for (std::size_t idx : order) {
        const MatchResult r = partial_match(tree, model.trees[idx], params);
        if (first || r.score > v.best_score) {
            v.best_score = r.score;
            v.best_baseline_id = r.baseline_tree_id;
            first = false;
        }
        if (!exhaustive && v.best_score >= params.delta) break;
    }
    v.anomalous = v.best_score < params.delta;
    return v;
}

}  // namespace taptree
