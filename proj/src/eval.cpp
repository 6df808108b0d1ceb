#include "taptree/eval.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <thread>

#include "taptree/errors.hpp"
#include "taptree/ingest.hpp"
#include "taptree/json_io.hpp"
#include "taptree/treebuild.hpp"

namespace taptree {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void append_fixed(std::string& out, double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6f", v);
    out += buf.data();
}

// Map fn over [0, n) with at most worker_count() threads; results land by
// index, so the outcome is independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Best partial/exact score of each tree against the model; empty training
// sets score everything 0 (nothing to conform to).
std::vector<double> score_forest(const std::vector<TaskTree>& forest, const BaselineModel& model,
                                 const RunConfig& cfg, double* match_millis_total) {
    std::vector<double> scores(forest.size(), 0.0);
    if (model.trees.empty()) return scores;
    MatchParams params{cfg.mode, 1.0, cfg.anchor};  // delta 1.0: no early exit below the max
    const auto t0 = Clock::now();
    parallel_for(forest.size(), [&](std::size_t i) {
        scores[i] = detect(forest[i], model, params, /*exhaustive=*/true).best_score;
    });
    if (match_millis_total) *match_millis_total += seconds_since(t0) * 1000.0;
    return scores;
}

struct SeqModel {
    TraceClassifier clf;
};

SeqModel fit_sequence_model(const std::vector<Trace>& training, const RunConfig& cfg) {
    PatternSet mined = mine_patterns(training, cfg.min_support);
    std::vector<SequentialPattern> pats =
        cfg.use_maximal ? maximal_patterns(mined.patterns) : mined.patterns;
    FeatureParams fp;
    fp.min_support = cfg.min_support;
    fp.min_class_ratio = cfg.min_class_ratio;
    fp.drop_redundant = cfg.drop_redundant;
    fp.n_sequences = mined.n_sequences;
    std::vector<SequentialPattern> features = select_features(pats, fp);
    return SeqModel{train_classifier(training, features, cfg.alpha)};
}

}  // namespace

MetricRow make_row(double threshold, std::size_t tp, std::size_t fp, std::size_t tn,
                   std::size_t fn) {
    MetricRow r;
    r.threshold = threshold;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    const double dtp = static_cast<double>(tp), dfp = static_cast<double>(fp);
    const double dtn = static_cast<double>(tn), dfn = static_cast<double>(fn);
    r.tpr = (tp + fn) ? dtp / (dtp + dfn) : 0.0;
    r.tnr = (tn + fp) ? dtn / (dtn + dfp) : 0.0;
    r.fpr = (fp + tn) ? dfp / (dfp + dtn) : 0.0;
    const std::size_t total = tp + fp + tn + fn;
    r.accuracy = total ? (dtp + dtn) / static_cast<double>(total) : 0.0;
    if (tp + fp) r.precision = dtp / (dtp + dfp);
    return r;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // mt19937_64 output is pinned by the standard; the modulo draw keeps the
    // shuffle identical everywhere, which std::shuffle would not.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    const std::size_t kk = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(k)));
    std::vector<std::vector<std::size_t>> folds(kk);
    for (std::size_t f = 0; f < kk; ++f) {
        const std::size_t lo = f * n / kk, hi = (f + 1) * n / kk;
        folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                        idx.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    return folds;
}

std::size_t worker_count() {
    if (const char* s = std::getenv("TAPTREE_THREADS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

EvalReport evaluate_tree_detector(const std::vector<TaskTree>& benign,
                                  const std::vector<TaskTree>& malicious,
                                  const RunConfig& config) {
    if (benign.empty() || malicious.empty())
        throw EmptyForestError("tree evaluation needs a benign and a malicious forest");

    double match_millis = 0.0;
    std::size_t scored = 0;

    // Held-out benign scores, fold by fold.
    std::vector<double> benign_scores(benign.size(), 0.0);
    const auto folds = kfold_indices(benign.size(), config.kfold, config.seed);
    for (const auto& fold : folds) {
        if (fold.empty()) continue;
        std::vector<bool> held(benign.size(), false);
        for (std::size_t i : fold) held[i] = true;
        std::vector<TaskTree> training;
        training.reserve(benign.size() - fold.size());
        for (std::size_t i = 0; i < benign.size(); ++i)
            if (!held[i]) training.push_back(benign[i]);
        BaselineModel model;
        if (!training.empty()) model = build_baseline(training, config.stage, config.weight_merge);
        std::vector<TaskTree> heldout;
        heldout.reserve(fold.size());
        for (std::size_t i : fold) heldout.push_back(benign[i]);
        const auto scores = score_forest(heldout, model, config, &match_millis);
        for (std::size_t j = 0; j < fold.size(); ++j) benign_scores[fold[j]] = scores[j];
        scored += fold.size();
    }

    // Malicious trees never contribute to the baseline, so each one faces the
    // model built from the full benign forest.
    const auto t0 = Clock::now();
    const BaselineModel full = build_baseline(benign, config.stage, config.weight_merge);
    const double build_seconds = seconds_since(t0);
    const auto malicious_scores = score_forest(malicious, full, config, &match_millis);
    scored += malicious.size();

    EvalReport rep;
    rep.protocol = "kfold" + std::to_string(folds.size());
    rep.timing.baseline_build_seconds = build_seconds;
    rep.timing.mean_match_millis = scored ? match_millis / static_cast<double>(scored) : 0.0;
    for (double delta : config.delta_grid) {
        std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
        for (double s : malicious_scores) (s < delta ? tp : fn) += 1;
        for (double s : benign_scores) (s < delta ? fp : tn) += 1;
        rep.rows.push_back(make_row(delta, tp, fp, tn, fn));
    }
    return rep;
}

EvalReport evaluate_sequence_classifier(const std::vector<Trace>& traces,
                                        const RunConfig& config) {
    std::vector<Trace> benign, malicious;
    for (const Trace& t : traces) (t.label == 1 ? malicious : benign).push_back(t);
    if (benign.empty() || malicious.empty())
        throw SingleClassError("sequence evaluation needs traces of both classes");

    const auto t0 = Clock::now();
    std::vector<double> benign_like(benign.size(), 0.0);
    const auto folds = kfold_indices(benign.size(), config.kfold, config.seed);
    for (const auto& fold : folds) {
        if (fold.empty()) continue;
        std::vector<bool> held(benign.size(), false);
        for (std::size_t i : fold) held[i] = true;
        std::vector<Trace> training;
        for (std::size_t i = 0; i < benign.size(); ++i)
            if (!held[i]) training.push_back(benign[i]);
        training.insert(training.end(), malicious.begin(), malicious.end());
        const SeqModel model = fit_sequence_model(training, config);
        for (std::size_t i : fold)
            benign_like[i] = classify(benign[i], model.clf, 0.5).likelihood;
    }

    // Leave-one-out units on the malicious side: whole trees by default so a
    // campaign's own sibling traces cannot vouch for it.
    std::vector<std::vector<std::size_t>> units;
    if (config.loo_level == "trace") {
        for (std::size_t i = 0; i < malicious.size(); ++i) units.push_back({i});
    } else {
        std::map<std::string, std::vector<std::size_t>> by_tree;
        for (std::size_t i = 0; i < malicious.size(); ++i)
            by_tree[malicious[i].tree_id].push_back(i);
        for (auto& [id, idxs] : by_tree) units.push_back(std::move(idxs));
    }
    std::vector<double> malicious_like(malicious.size(), 0.0);
    for (const auto& unit : units) {
        std::vector<bool> out(malicious.size(), false);
        for (std::size_t i : unit) out[i] = true;
        std::vector<Trace> training = benign;
        for (std::size_t i = 0; i < malicious.size(); ++i)
            if (!out[i]) training.push_back(malicious[i]);
        const SeqModel model = fit_sequence_model(training, config);
        for (std::size_t i : unit)
            malicious_like[i] = classify(malicious[i], model.clf, 0.5).likelihood;
    }

    EvalReport rep;
    rep.protocol = "kfold" + std::to_string(folds.size()) + "+loo_" + config.loo_level;
    rep.timing.baseline_build_seconds = seconds_since(t0);
    const std::size_t scored = benign.size() + malicious.size();
    rep.timing.mean_match_millis =
        scored ? rep.timing.baseline_build_seconds * 1000.0 / static_cast<double>(scored) : 0.0;
    for (double thr : config.seq_thresholds) {
        std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
        for (double s : malicious_like) (s >= thr ? tp : fn) += 1;
        for (double s : benign_like) (s >= thr ? fp : tn) += 1;
        rep.rows.push_back(make_row(thr, tp, fp, tn, fn));
    }
    return rep;
}

EvalReport run_pipeline(const RunConfig& config) {
    if (config.task == "detect" && config.stage == Stage::TEMPORAL_SET)
        throw StageError("detection requires a clustered or semantic baseline");

    std::vector<TaskTree> forest;
    if (!config.input_events.empty()) {
        LoadOptions lo;
        lo.host_filter = config.host_filter;
        lo.max_bad_fraction = config.max_bad_fraction;
        const LoadResult loaded = load_events_file(config.input_events, lo);
        for (const EventBatch& b : loaded.batches) {
            auto trees = build_trees(b);
            forest.insert(forest.end(), std::make_move_iterator(trees.begin()),
                          std::make_move_iterator(trees.end()));
        }
        forest = filter_trees(forest, TreeFilter{config.min_nodes, config.min_depth});
    }

    if (config.task == "detect") {
        std::vector<TaskTree> benign, malicious;
        for (TaskTree& t : forest) (t.label == 1 ? malicious : benign).push_back(std::move(t));
        return evaluate_tree_detector(benign, malicious, config);
    }
    if (config.task == "classify") {
        std::vector<Trace> traces;
        if (!config.input_traces.empty()) {
            traces = load_traces(config.input_traces);
        } else {
            traces = extract_traces(forest);
        }
        return evaluate_sequence_classifier(traces, config);
    }
    throw Error("unknown task: " + config.task);
}

std::string report_csv(const EvalReport& report) {
    std::string out = "threshold,tp,fp,tn,fn,tpr,tnr,precision,accuracy,fpr\n";
    for (const MetricRow& r : report.rows) {
        append_fixed(out, r.threshold);
        out += ',';
        out += std::to_string(r.tp);
        out += ',';
        out += std::to_string(r.fp);
        out += ',';
        out += std::to_string(r.tn);
        out += ',';
        out += std::to_string(r.fn);
        out += ',';
        append_fixed(out, r.tpr);
        out += ',';
        append_fixed(out, r.tnr);
        out += ',';
        if (r.precision)
            append_fixed(out, *r.precision);
        else
            out += '-';
        out += ',';
        append_fixed(out, r.accuracy);
        out += ',';
        append_fixed(out, r.fpr);
        out += '\n';
    }
    return out;
}

std::string roc_csv(const EvalReport& report) {
    std::string out = "threshold,fpr,tpr\n";
    for (const MetricRow& r : report.rows) {
        append_fixed(out, r.threshold);
        out += ',';
        append_fixed(out, r.fpr);
        out += ',';
        append_fixed(out, r.tpr);
        out += '\n';
    }
    return out;
}

}  // namespace taptree
