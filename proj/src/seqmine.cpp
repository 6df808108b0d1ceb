#include "taptree/seqmine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

bool is_subset(const ItemSet& a, const ItemSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Canonical comparison key; '\x01' terminates itemsets and sorts below any
// item byte, so shorter itemsets order before their extensions.
std::string flat_key(const Sequence& s) {
    std::string out;
    for (const ItemSet& is : s) {
        for (const Item& it : is) {
            out += it;
            out += '\x02';
        }
        out += '\x01';
    }
    return out;
}

int item_count(const Sequence& s) {
    std::size_t n = 0;
    for (const ItemSet& is : s) n += is.size();
    return static_cast<int>(n);
}

struct Miner {
    const std::vector<Trace>& traces;
    double min_count;  // support threshold in absolute sequence count
    std::size_t n_benign = 0, n_malicious = 0, n_labeled = 0;
    std::vector<SequentialPattern> out;

    void finish_pattern(const Sequence& seq, const std::vector<std::size_t>& supporters) {
        SequentialPattern p;
        p.items = seq;
        p.n = item_count(seq);
        p.support = static_cast<double>(supporters.size()) / static_cast<double>(traces.size());
        std::size_t cb = 0, cm = 0;
        for (std::size_t idx : supporters)
            (traces[idx].label == 1 ? cm : cb) += 1;
        p.sup_benign = n_benign ? static_cast<double>(cb) / static_cast<double>(n_benign) : 0.0;
        p.sup_malicious =
            n_malicious ? static_cast<double>(cm) / static_cast<double>(n_malicious) : 0.0;
        out.push_back(std::move(p));
    }

    // Grow `seq` by one item at a time. An s-extension opens a new itemset
    // with any item; an i-extension adds to the last itemset an item greater
    // than everything already there. Every pattern has exactly one build path
    // under this scheme, and supporters only ever shrink, so pruning below
    // min_count is safe.
    void grow(Sequence& seq, const std::vector<std::size_t>& supporters) {
        std::set<Item> cand_s, cand_i;
        const Item* last =
            seq.empty() || seq.back().empty() ? nullptr : &seq.back().back();
        for (std::size_t idx : supporters) {
            for (const ItemSet& is : traces[idx].items) {
                for (const Item& it : is) {
                    cand_s.insert(it);
                    if (last && it > *last) cand_i.insert(it);
                }
            }
        }
        auto try_extension = [&](const Item& item, bool inline_ext) {
            if (inline_ext)
                seq.back().push_back(item);
            else
                seq.push_back(ItemSet{item});
            std::vector<std::size_t> next;
            for (std::size_t idx : supporters)
                if (contains(traces[idx].items, seq)) next.push_back(idx);
            if (static_cast<double>(next.size()) >= min_count) {
                finish_pattern(seq, next);
                grow(seq, next);
            }
            if (inline_ext)
                seq.back().pop_back();
            else
                seq.pop_back();
        };
        if (last)
            for (const Item& it : cand_i) try_extension(it, true);
        for (const Item& it : cand_s) try_extension(it, false);
    }
};

// Earliest index at which each pattern prefix can finish, and latest index at
// which each suffix can start; -1 marks infeasible.
std::vector<int> prefix_min_end(const Sequence& big, const Sequence& pat) {
    std::vector<int> e(pat.size(), -1);
    std::size_t bi = 0;
    for (std::size_t j = 0; j < pat.size(); ++j) {
        while (bi < big.size() && !is_subset(pat[j], big[bi])) ++bi;
        if (bi == big.size()) return e;  // remaining entries stay -1
        e[j] = static_cast<int>(bi);
        ++bi;
    }
    return e;
}

std::vector<int> suffix_max_start(const Sequence& big, const Sequence& pat) {
    std::vector<int> l(pat.size(), -1);
    int bi = static_cast<int>(big.size()) - 1;
    for (std::size_t jj = pat.size(); jj-- > 0;) {
        while (bi >= 0 && !is_subset(pat[jj], big[static_cast<std::size_t>(bi)])) --bi;
        if (bi < 0) return l;
        l[jj] = bi;
        --bi;
    }
    return l;
}

}  // namespace

ItemSet make_itemset(std::vector<std::string> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
}

std::vector<Trace> extract_traces(const TaskTree& tree) {
    std::vector<Trace> out;
    if (tree.empty()) return out;
    std::vector<std::string> path;
    auto walk = [&](auto&& self, int v) -> void {
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(v)];
        path.push_back(n.label);
        if (n.children.empty()) {
            Trace tr;
            tr.tree_id = tree.tree_id;
            tr.trace_id = tree.tree_id + "#" + std::to_string(out.size());
            tr.label = tree.label;
            for (const std::string& lbl : path) tr.items.push_back(ItemSet{lbl});
            out.push_back(std::move(tr));
        } else {
            for (int c : n.children) self(self, c);
        }
        path.pop_back();
    };
    walk(walk, 0);
    return out;
}

std::vector<Trace> extract_traces(const std::vector<TaskTree>& forest) {
    std::vector<Trace> out;
    for (const TaskTree& t : forest) {
        auto traces = extract_traces(t);
        out.insert(out.end(), std::make_move_iterator(traces.begin()),
                   std::make_move_iterator(traces.end()));
    }
    return out;
}

bool contains(const Sequence& big, const Sequence& small) {
    std::size_t bi = 0;
    for (const ItemSet& a : small) {
        while (bi < big.size() && !is_subset(a, big[bi])) ++bi;
        if (bi == big.size()) return false;
        ++bi;
    }
    return true;
}

PatternSet mine_patterns(const std::vector<Trace>& traces, double min_support) {
    if (traces.empty()) throw EmptyInputError("no traces to mine");
    if (!(min_support > 0.0) || min_support > 1.0)
        throw Error("min_support must be in (0, 1]");

    Miner miner{traces, min_support * static_cast<double>(traces.size())};
    for (const Trace& t : traces) {
        if (t.label == 1)
            ++miner.n_malicious;
        else
            ++miner.n_benign;
    }
    std::vector<std::size_t> all(traces.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Sequence seed;
    miner.grow(seed, all);

    std::sort(miner.out.begin(), miner.out.end(),
              [](const SequentialPattern& a, const SequentialPattern& b) {
                  if (a.n != b.n) return a.n < b.n;
                  return flat_key(a.items) < flat_key(b.items);
              });
    PatternSet ps;
    ps.patterns = std::move(miner.out);
    ps.n_sequences = traces.size();
    return ps;
}

std::vector<SequentialPattern> maximal_patterns(const std::vector<SequentialPattern>& patterns) {
    std::vector<SequentialPattern> out;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < patterns.size() && !dominated; ++j) {
            if (i == j || patterns[j].items == patterns[i].items) continue;
            dominated = contains(patterns[j].items, patterns[i].items);
        }
        if (!dominated) out.push_back(patterns[i]);
    }
    return out;
}

std::vector<SequentialPattern> select_features(const std::vector<SequentialPattern>& patterns,
                                               const FeatureParams& params) {
    const double eps =
        params.n_sequences > 0 ? 1.0 / (2.0 * static_cast<double>(params.n_sequences)) : 1e-9;
    auto ratio = [&](const SequentialPattern& p) {
        return std::max(p.sup_benign / (p.sup_malicious + eps),
                        p.sup_malicious / (p.sup_benign + eps));
    };
    std::vector<SequentialPattern> kept;
    for (const SequentialPattern& p : patterns)
        if (p.support >= params.min_support && ratio(p) >= params.min_class_ratio)
            kept.push_back(p);
    if (!params.drop_redundant) return kept;

    std::vector<SequentialPattern> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < kept.size() && !redundant; ++j) {
            if (i == j || kept[j].items == kept[i].items) continue;
            if (!contains(kept[j].items, kept[i].items)) continue;
            const double ri = ratio(kept[i]), rj = ratio(kept[j]);
            redundant = std::fabs(ri - rj) < 0.10 * std::max(ri, rj);
        }
        if (!redundant) out.push_back(kept[i]);
    }
    return out;
}

TraceClassifier train_classifier(const std::vector<Trace>& traces,
                                 const std::vector<SequentialPattern>& features, double alpha) {
    if (alpha <= 0) throw Error("alpha must be positive");
    std::size_t nb = 0, nm = 0;
    for (const Trace& t : traces) (t.label == 1 ? nm : nb) += 1;
    if (nb == 0 || nm == 0)
        throw SingleClassError("training traces must include both classes");

    TraceClassifier clf;
    clf.features = features;
    clf.alpha = alpha;
    clf.prior_benign = static_cast<double>(nb) / static_cast<double>(nb + nm);
    clf.prior_malicious = static_cast<double>(nm) / static_cast<double>(nb + nm);
    clf.likelihoods.reserve(features.size());
    for (const SequentialPattern& f : features) {
        std::size_t cb = 0, cm = 0;
        for (const Trace& t : traces)
            if (contains(t.items, f.items)) (t.label == 1 ? cm : cb) += 1;
        clf.likelihoods.push_back(
            {(static_cast<double>(cb) + alpha) / (static_cast<double>(nb) + 2.0 * alpha),
             (static_cast<double>(cm) + alpha) / (static_cast<double>(nm) + 2.0 * alpha)});
    }
    return clf;
}

Classification classify(const Trace& trace, const TraceClassifier& clf, double threshold) {
    double logb = std::log(clf.prior_benign);
    double logm = std::log(clf.prior_malicious);
    for (std::size_t i = 0; i < clf.features.size(); ++i) {
        const bool present = contains(trace.items, clf.features[i].items);
        const auto& [pb, pm] = clf.likelihoods[i];
        logb += std::log(present ? pb : 1.0 - pb);
        logm += std::log(present ? pm : 1.0 - pm);
    }
    Classification c;
    c.likelihood = 1.0 / (1.0 + std::exp(logb - logm));
    c.label = c.likelihood >= threshold ? 1 : 0;
    return c;
}

double noise_score(const Trace& trace, const std::vector<SequentialPattern>& baseline) {
    const Sequence& big = trace.items;
    std::size_t total = 0;
    for (const ItemSet& is : big) total += is.size();
    if (total == 0) return 0.0;

    // An item of big[i] is covered when some embedding of some pattern places
    // an itemset containing it at i; itemset j of a pattern can sit at i iff
    // its prefix fits strictly before i and its suffix strictly after.
    std::vector<std::set<Item>> covered(big.size());
    for (const SequentialPattern& p : baseline) {
        const Sequence& pat = p.items;
        if (pat.empty() || !contains(big, pat)) continue;
        const auto e = prefix_min_end(big, pat);
        const auto l = suffix_max_start(big, pat);
        for (std::size_t j = 0; j < pat.size(); ++j) {
            const int lo = (j == 0) ? 0 : e[j - 1] + 1;
            const int hi = (j + 1 == pat.size()) ? static_cast<int>(big.size()) - 1 : l[j + 1] - 1;
            for (int i = lo; i <= hi; ++i) {
                if (!is_subset(pat[j], big[static_cast<std::size_t>(i)])) continue;
                covered[static_cast<std::size_t>(i)].insert(pat[j].begin(), pat[j].end());
            }
        }
    }
    std::size_t cov = 0;
    for (const auto& s : covered) cov += s.size();
    return 1.0 - static_cast<double>(cov) / static_cast<double>(total);
}

}  // namespace taptree
