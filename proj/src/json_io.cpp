#include "taptree/json_io.hpp"

#include <fstream>
#include <sstream>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

using json = nlohmann::json;

// Shape errors from nlohmann all surface as FormatError.
template <typename Fn>
auto checked(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
}

void check_version(const json& j) {
    auto it = j.find("version");
    if (it == j.end() || !it->is_number_integer())
        throw FormatError("artifact file lacks a version field");
    if (it->get<int>() != kArtifactVersion)
        throw VersionMismatchError("unsupported artifact version " + it->dump());
}

}  // namespace

ojson tree_to_json(const TaskTree& t) {
    ojson j;
    j["tree_id"] = t.tree_id;
    j["host"] = t.host;
    j["label"] = t.label;
    ojson nodes = ojson::array();
    const auto depths = t.depths();
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        ojson n;
        n["id"] = i;
        n["label"] = t.nodes[i].label;
        n["depth"] = depths[i];
        n["first_seen"] = t.nodes[i].first_seen;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    ojson edges = ojson::array();
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].parent < 0) continue;
        ojson e;
        e["parent"] = t.nodes[i].parent;
        e["child"] = i;
        e["weight"] = t.nodes[i].weight;
        edges.push_back(std::move(e));
    }
    j["edges"] = std::move(edges);
    ojson order = ojson::object();
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (!t.nodes[i].children.empty()) order[std::to_string(i)] = t.nodes[i].children;
    j["sibling_order"] = std::move(order);
    return j;
}

TaskTree tree_from_json(const json& j) {
    return checked([&] {
        TaskTree t;
        t.tree_id = j.at("tree_id").get<std::string>();
        t.host = j.value("host", std::string{});
        t.label = j.value("label", 0);
        const auto& nodes = j.at("nodes");
        t.nodes.resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.at("id").get<std::size_t>() != i)
                throw FormatError("tree nodes must be listed in id order");
            t.nodes[i].label = n.at("label").get<std::string>();
            t.nodes[i].first_seen = n.value("first_seen", std::int64_t{0});
        }
        for (const auto& e : j.at("edges")) {
            const std::size_t c = e.at("child").get<std::size_t>();
            const int p = e.at("parent").get<int>();
            if (c >= t.nodes.size() || p < 0 || static_cast<std::size_t>(p) >= t.nodes.size())
                throw FormatError("edge references an unknown node");
            t.nodes[c].parent = p;
            t.nodes[c].weight = e.at("weight").get<std::uint64_t>();
        }
        if (const auto it = j.find("sibling_order"); it != j.end()) {
            for (const auto& [key, arr] : it->items()) {
                const std::size_t p = static_cast<std::size_t>(std::stoull(key));
                if (p >= t.nodes.size()) throw FormatError("sibling_order names an unknown node");
                t.nodes[p].children = arr.get<std::vector<int>>();
            }
        } else {
            for (std::size_t i = 0; i < t.nodes.size(); ++i)
                if (t.nodes[i].parent >= 0)
                    t.nodes[static_cast<std::size_t>(t.nodes[i].parent)].children.push_back(
                        static_cast<int>(i));
        }
        if (!t.nodes.empty() && t.nodes[0].parent != -1)
            throw FormatError("node 0 must be the root");
        return t;
    });
}

ojson forest_to_json(const std::vector<TaskTree>& trees) {
    ojson j;
    j["version"] = kArtifactVersion;
    ojson arr = ojson::array();
    for (const TaskTree& t : trees) arr.push_back(tree_to_json(t));
    j["trees"] = std::move(arr);
    return j;
}

std::vector<TaskTree> forest_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        std::vector<TaskTree> out;
        for (const auto& t : j.at("trees")) out.push_back(tree_from_json(t));
        return out;
    });
}

ojson model_to_json(const BaselineModel& m) {
    ojson j;
    j["version"] = kArtifactVersion;
    j["stage"] = to_string(m.stage);
    j["weight_merge"] = to_string(m.weight_merge);
    ojson arr = ojson::array();
    for (const TaskTree& t : m.trees) arr.push_back(tree_to_json(t));
    j["trees"] = std::move(arr);
    ojson prov = ojson::object();
    for (const auto& [id, sources] : m.provenance) prov[id] = sources;
    j["provenance"] = std::move(prov);
    ojson stats;
    stats["input_count"] = m.build_stats.input_count;
    stats["output_count"] = m.build_stats.output_count;
    stats["build_millis"] = 0.0;  // timings stay out of the artifact for bit-stability
    j["build_stats"] = std::move(stats);
    return j;
}

BaselineModel model_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        BaselineModel m;
        m.stage = stage_from(j.at("stage").get<std::string>());
        m.weight_merge = weight_merge_from(j.at("weight_merge").get<std::string>());
        for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
        if (const auto it = j.find("provenance"); it != j.end())
            for (const auto& [id, sources] : it->items())
                m.provenance[id] = sources.get<std::vector<std::string>>();
        if (const auto it = j.find("build_stats"); it != j.end()) {
            m.build_stats.input_count = it->value("input_count", std::size_t{0});
            m.build_stats.output_count = it->value("output_count", std::size_t{0});
        }
        return m;
    });
}

namespace {

ojson pattern_to_json(const SequentialPattern& p) {
    ojson pj;
    pj["items"] = p.items;
    pj["support"] = p.support;
    pj["n"] = p.n;
    ojson pcs;
    pcs["benign"] = p.sup_benign;
    pcs["malicious"] = p.sup_malicious;
    pj["per_class_support"] = std::move(pcs);
    return pj;
}

SequentialPattern pattern_from_json(const json& pj) {
    SequentialPattern p;
    p.items = pj.at("items").get<Sequence>();
    for (ItemSet& is : p.items) is = make_itemset(std::move(is));
    p.support = pj.at("support").get<double>();
    p.n = pj.value("n", 0);
    if (p.n == 0)
        for (const ItemSet& is : p.items) p.n += static_cast<int>(is.size());
    if (const auto it = pj.find("per_class_support"); it != pj.end()) {
        p.sup_benign = it->value("benign", 0.0);
        p.sup_malicious = it->value("malicious", 0.0);
    }
    return p;
}

}  // namespace

ojson patterns_to_json(const PatternSet& ps) {
    ojson j;
    j["version"] = kArtifactVersion;
    j["n_sequences"] = ps.n_sequences;
    ojson arr = ojson::array();
    for (const SequentialPattern& p : ps.patterns) arr.push_back(pattern_to_json(p));
    j["patterns"] = std::move(arr);
    return j;
}

PatternSet patterns_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        PatternSet ps;
        ps.n_sequences = j.value("n_sequences", std::size_t{0});
        for (const auto& pj : j.at("patterns")) ps.patterns.push_back(pattern_from_json(pj));
        return ps;
    });
}

ojson classifier_to_json(const TraceClassifier& c) {
    ojson j;
    j["version"] = kArtifactVersion;
    j["alpha"] = c.alpha;
    ojson priors;
    priors["benign"] = c.prior_benign;
    priors["malicious"] = c.prior_malicious;
    j["priors"] = std::move(priors);
    ojson feats = ojson::array();
    for (const SequentialPattern& f : c.features) feats.push_back(pattern_to_json(f));
    j["features"] = std::move(feats);
    ojson like = ojson::array();
    for (const auto& [pb, pm] : c.likelihoods) {
        ojson row;
        row["benign"] = pb;
        row["malicious"] = pm;
        like.push_back(std::move(row));
    }
    j["likelihoods"] = std::move(like);
    return j;
}

TraceClassifier classifier_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        TraceClassifier c;
        c.alpha = j.at("alpha").get<double>();
        c.prior_benign = j.at("priors").at("benign").get<double>();
        c.prior_malicious = j.at("priors").at("malicious").get<double>();
        for (const auto& f : j.at("features")) c.features.push_back(pattern_from_json(f));
        for (const auto& row : j.at("likelihoods"))
            c.likelihoods.push_back({row.at("benign").get<double>(),
                                     row.at("malicious").get<double>()});
        if (c.likelihoods.size() != c.features.size())
            throw FormatError("classifier features and likelihoods differ in length");
        return c;
    });
}

ojson traces_to_json(const std::vector<Trace>& traces) {
    ojson j;
    j["version"] = kArtifactVersion;
    ojson arr = ojson::array();
    for (const Trace& t : traces) {
        ojson tj;
        tj["trace_id"] = t.trace_id;
        tj["tree_id"] = t.tree_id;
        tj["label"] = t.label;
        tj["items"] = t.items;
        arr.push_back(std::move(tj));
    }
    j["traces"] = std::move(arr);
    return j;
}

std::vector<Trace> traces_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        std::vector<Trace> out;
        for (const auto& tj : j.at("traces")) {
            Trace t;
            t.trace_id = tj.value("trace_id", std::string{});
            t.tree_id = tj.value("tree_id", std::string{});
            t.label = tj.value("label", 0);
            t.items = tj.at("items").get<Sequence>();
            for (ItemSet& is : t.items) is = make_itemset(std::move(is));
            if (t.items.empty()) throw FormatError("trace has no itemsets");
            for (const ItemSet& is : t.items)
                if (is.empty()) throw FormatError("trace has an empty itemset");
            out.push_back(std::move(t));
        }
        return out;
    });
}

ojson report_to_json(const EvalReport& r) {
    ojson j;
    j["version"] = kArtifactVersion;
    j["protocol"] = r.protocol;
    ojson rows = ojson::array();
    for (const MetricRow& row : r.rows) {
        ojson rj;
        rj["threshold"] = row.threshold;
        rj["tp"] = row.tp;
        rj["fp"] = row.fp;
        rj["tn"] = row.tn;
        rj["fn"] = row.fn;
        rj["tpr"] = row.tpr;
        rj["tnr"] = row.tnr;
        if (row.precision)
            rj["precision"] = *row.precision;
        else
            rj["precision"] = nullptr;
        rj["accuracy"] = row.accuracy;
        rj["fpr"] = row.fpr;
        rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    ojson timing;
    timing["baseline_build_seconds"] = r.timing.baseline_build_seconds;
    timing["mean_match_millis"] = r.timing.mean_match_millis;
    j["timing"] = std::move(timing);
    return j;
}

EvalReport report_from_json(const json& j) {
    check_version(j);
    return checked([&] {
        EvalReport r;
        r.protocol = j.value("protocol", std::string{});
        for (const auto& rj : j.at("rows")) {
            MetricRow row;
            row.threshold = rj.at("threshold").get<double>();
            row.tp = rj.at("tp").get<std::size_t>();
            row.fp = rj.at("fp").get<std::size_t>();
            row.tn = rj.at("tn").get<std::size_t>();
            row.fn = rj.at("fn").get<std::size_t>();
            row.tpr = rj.at("tpr").get<double>();
            row.tnr = rj.at("tnr").get<double>();
            if (!rj.at("precision").is_null()) row.precision = rj.at("precision").get<double>();
            row.accuracy = rj.at("accuracy").get<double>();
            row.fpr = rj.at("fpr").get<double>();
            r.rows.push_back(row);
        }
        if (const auto it = j.find("timing"); it != j.end()) {
            r.timing.baseline_build_seconds = it->value("baseline_build_seconds", 0.0);
            r.timing.mean_match_millis = it->value("mean_match_millis", 0.0);
        }
        return r;
    });
}

ojson config_to_json(const RunConfig& c) {
    ojson j;
    j["task"] = c.task;
    j["input_events"] = c.input_events;
    j["input_traces"] = c.input_traces;
    j["host_filter"] = c.host_filter;
    j["max_bad_fraction"] = c.max_bad_fraction;
    j["min_nodes"] = c.min_nodes;
    j["min_depth"] = c.min_depth;
    j["stage"] = to_string(c.stage);
    j["weight_merge"] = to_string(c.weight_merge);
    j["mode"] = to_string(c.mode);
    j["anchor"] = to_string(c.anchor);
    j["delta_grid"] = c.delta_grid;
    j["seq_thresholds"] = c.seq_thresholds;
    j["min_support"] = c.min_support;
    j["min_class_ratio"] = c.min_class_ratio;
    j["drop_redundant"] = c.drop_redundant;
    j["use_maximal"] = c.use_maximal;
    j["alpha"] = c.alpha;
    j["kfold"] = c.kfold;
    j["loo_level"] = c.loo_level;
    j["seed"] = c.seed;
    return j;
}

RunConfig config_from_json(const json& j) {
    return checked([&] {
        RunConfig c;
        c.task = j.value("task", c.task);
        c.input_events = j.value("input_events", c.input_events);
        c.input_traces = j.value("input_traces", c.input_traces);
        c.host_filter = j.value("host_filter", c.host_filter);
        c.max_bad_fraction = j.value("max_bad_fraction", c.max_bad_fraction);
        c.min_nodes = j.value("min_nodes", c.min_nodes);
        c.min_depth = j.value("min_depth", c.min_depth);
        if (j.contains("stage")) c.stage = stage_from(j.at("stage").get<std::string>());
        if (j.contains("weight_merge"))
            c.weight_merge = weight_merge_from(j.at("weight_merge").get<std::string>());
        if (j.contains("mode")) c.mode = match_mode_from(j.at("mode").get<std::string>());
        if (j.contains("anchor")) c.anchor = anchor_from(j.at("anchor").get<std::string>());
        if (j.contains("delta_grid")) c.delta_grid = j.at("delta_grid").get<std::vector<double>>();
        if (j.contains("seq_thresholds"))
            c.seq_thresholds = j.at("seq_thresholds").get<std::vector<double>>();
        c.min_support = j.value("min_support", c.min_support);
        c.min_class_ratio = j.value("min_class_ratio", c.min_class_ratio);
        c.drop_redundant = j.value("drop_redundant", c.drop_redundant);
        c.use_maximal = j.value("use_maximal", c.use_maximal);
        c.alpha = j.value("alpha", c.alpha);
        c.kfold = j.value("kfold", c.kfold);
        c.loo_level = j.value("loo_level", c.loo_level);
        c.seed = j.value("seed", c.seed);
        return c;
    });
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failure on " + path);
}

nlohmann::json load_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("bad JSON in ") + path + ": " + e.what());
    }
}

namespace {
void save_pretty(const ojson& j, const std::string& path) {
    write_text_file(path, j.dump(2) + "\n");
}
}  // namespace

void save_forest(const std::vector<TaskTree>& trees, const std::string& path) {
    save_pretty(forest_to_json(trees), path);
}
std::vector<TaskTree> load_forest(const std::string& path) {
    return forest_from_json(load_json_file(path));
}
void save_model(const BaselineModel& m, const std::string& path) {
    save_pretty(model_to_json(m), path);
}
BaselineModel load_model(const std::string& path) {
    return model_from_json(load_json_file(path));
}
void save_patterns(const PatternSet& ps, const std::string& path) {
    save_pretty(patterns_to_json(ps), path);
}
PatternSet load_patterns(const std::string& path) {
    return patterns_from_json(load_json_file(path));
}
void save_classifier(const TraceClassifier& c, const std::string& path) {
    save_pretty(classifier_to_json(c), path);
}
TraceClassifier load_classifier(const std::string& path) {
    return classifier_from_json(load_json_file(path));
}
void save_traces(const std::vector<Trace>& traces, const std::string& path) {
    save_pretty(traces_to_json(traces), path);
}
std::vector<Trace> load_traces(const std::string& path) {
    return traces_from_json(load_json_file(path));
}
void save_report(const EvalReport& r, const std::string& path) {
    save_pretty(report_to_json(r), path);
}
EvalReport load_report(const std::string& path) {
    return report_from_json(load_json_file(path));
}
RunConfig load_config(const std::string& path) {
    return config_from_json(load_json_file(path));
}

}  // namespace taptree
