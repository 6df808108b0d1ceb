// Python bindings for the core library. One-to-one with the C++ surface:
// same names, same defaults, same exceptions, so the CLI and the module stay
// interchangeable for scripting.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "taptree/baseline.hpp"
#include "taptree/errors.hpp"
#include "taptree/eval.hpp"
#include "taptree/event.hpp"
#include "taptree/ingest.hpp"
#include "taptree/json_io.hpp"
#include "taptree/seqmine.hpp"
#include "taptree/synth.hpp"
#include "taptree/tree.hpp"
#include "taptree/treebuild.hpp"
#include "taptree/treematch.hpp"

namespace py = pybind11;
using namespace taptree;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Process-tree baselining, tree-pattern detection and trace classification";

    // -- enums ------------------------------------------------------------

    py::enum_<ObjectKind>(m, "ObjectKind")
        .value("FILE", ObjectKind::FILE)
        .value("PROCESS", ObjectKind::PROCESS)
        .value("FLOW", ObjectKind::FLOW)
        .value("REGISTRY", ObjectKind::REGISTRY)
        .value("OTHER", ObjectKind::OTHER);

    py::enum_<Stage>(m, "Stage")
        .value("TEMPORAL_SET", Stage::TEMPORAL_SET)
        .value("CLUSTERED", Stage::CLUSTERED)
        .value("SEMANTIC", Stage::SEMANTIC);

    py::enum_<WeightMerge>(m, "WeightMerge")
        .value("MAX", WeightMerge::MAX)
        .value("SUM", WeightMerge::SUM);

    py::enum_<MatchMode>(m, "MatchMode")
        .value("EXACT", MatchMode::EXACT)
        .value("PARTIAL_SAME_WEIGHT", MatchMode::PARTIAL_SAME_WEIGHT)
        .value("PARTIAL_VARIABLE_WEIGHT", MatchMode::PARTIAL_VARIABLE_WEIGHT);

    py::enum_<Anchor>(m, "Anchor")
        .value("ROOT_ONLY", Anchor::ROOT_ONLY)
        .value("ANY_NODE", Anchor::ANY_NODE);

    // -- exceptions -------------------------------------------------------

    // Base first: translators run newest-first, so the subclasses win.
    const auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<SchemaError>(m, "SchemaError", base);
    py::register_exception<IoError>(m, "IoError", base);
    py::register_exception<CorruptInputError>(m, "CorruptInputError", base);
    py::register_exception<MergePreconditionError>(m, "MergePreconditionError", base);
    py::register_exception<EmptyModelError>(m, "EmptyModelError", base);
    py::register_exception<EmptyInputError>(m, "EmptyInputError", base);
    py::register_exception<EmptyForestError>(m, "EmptyForestError", base);
    py::register_exception<SingleClassError>(m, "SingleClassError", base);
    py::register_exception<VersionMismatchError>(m, "VersionMismatchError", base);
    py::register_exception<FormatError>(m, "FormatError", base);
    py::register_exception<StageError>(m, "StageError", base);

    // -- trees ------------------------------------------------------------

    py::class_<TreeNode>(m, "TreeNode")
        .def(py::init<>())
        .def_readwrite("label", &TreeNode::label)
        .def_readwrite("weight", &TreeNode::weight)
        .def_readwrite("first_seen", &TreeNode::first_seen)
        .def_readwrite("parent", &TreeNode::parent)
        .def_readwrite("children", &TreeNode::children)
        .def(py::self == py::self);

    py::class_<TaskTree>(m, "TaskTree")
        .def(py::init<>())
        .def_readwrite("tree_id", &TaskTree::tree_id)
        .def_readwrite("host", &TaskTree::host)
        .def_readwrite("label", &TaskTree::label)
        .def_readwrite("nodes", &TaskTree::nodes)
        .def("empty", &TaskTree::empty)
        .def("node_count", &TaskTree::node_count)
        .def("is_leaf", &TaskTree::is_leaf, py::arg("id"))
        .def("add_root", &TaskTree::add_root, py::arg("label"), py::arg("first_seen") = 0)
        .def("add_child", &TaskTree::add_child, py::arg("parent"), py::arg("label"),
             py::arg("weight") = 1, py::arg("first_seen") = 0)
        .def("find_child", &TaskTree::find_child, py::arg("parent"), py::arg("label"))
        .def("depths", &TaskTree::depths)
        .def("depth_of", &TaskTree::depth_of, py::arg("id"))
        .def("depth", &TaskTree::depth)
        .def("preorder", &TaskTree::preorder)
        .def("total_weight", &TaskTree::total_weight)
        .def("has_label", &TaskTree::has_label, py::arg("label"))
        .def("shape_key", &TaskTree::shape_key, py::arg("with_weights"))
        .def(py::self == py::self)
        .def("__repr__", [](const TaskTree& t) {
            return "<TaskTree '" + t.tree_id + "' " + std::to_string(t.nodes.size()) + " nodes>";
        });

    // -- events and ingest ------------------------------------------------

    py::class_<AuditEvent>(m, "AuditEvent")
        .def(py::init<>())
        .def_readwrite("id", &AuditEvent::id)
        .def_readwrite("object", &AuditEvent::object)
        .def_readwrite("action", &AuditEvent::action)
        .def_readwrite("pid", &AuditEvent::pid)
        .def_readwrite("ppid", &AuditEvent::ppid)
        .def_readwrite("actor_id", &AuditEvent::actor_id)
        .def_readwrite("object_id", &AuditEvent::object_id)
        .def_readwrite("principal", &AuditEvent::principal)
        .def_readwrite("file_path", &AuditEvent::file_path)
        .def_readwrite("image_path", &AuditEvent::image_path)
        .def_readwrite("parent_image_path", &AuditEvent::parent_image_path)
        .def_readwrite("timestamp_us", &AuditEvent::timestamp_us)
        .def_readwrite("host", &AuditEvent::host)
        .def_readwrite("label", &AuditEvent::label)
        .def(py::self == py::self);

    py::class_<EventBatch>(m, "EventBatch")
        .def(py::init<>())
        .def_readwrite("host", &EventBatch::host)
        .def_readwrite("day", &EventBatch::day)
        .def_readwrite("events", &EventBatch::events)
        .def_readwrite("span_start", &EventBatch::span_start)
        .def_readwrite("span_end", &EventBatch::span_end);

    py::class_<LoadOptions>(m, "LoadOptions")
        .def(py::init<>())
        .def_readwrite("host_filter", &LoadOptions::host_filter)
        .def_readwrite("max_bad_fraction", &LoadOptions::max_bad_fraction);

    py::class_<LoadResult>(m, "LoadResult")
        .def(py::init<>())
        .def_readwrite("batches", &LoadResult::batches)
        .def_readwrite("total_lines", &LoadResult::total_lines)
        .def_readwrite("skipped", &LoadResult::skipped)
        .def_readwrite("filtered", &LoadResult::filtered);

    py::class_<TreeFilter>(m, "TreeFilter")
        .def(py::init<>())
        .def_readwrite("min_nodes", &TreeFilter::min_nodes)
        .def_readwrite("min_depth", &TreeFilter::min_depth);

    py::class_<TreeStats>(m, "TreeStats")
        .def(py::init<>())
        .def_readwrite("count", &TreeStats::count)
        .def_readwrite("total_nodes", &TreeStats::total_nodes)
        .def_readwrite("depth_histogram", &TreeStats::depth_histogram)
        .def_readwrite("node_histogram", &TreeStats::node_histogram)
        .def_readwrite("benign", &TreeStats::benign)
        .def_readwrite("malicious", &TreeStats::malicious);

    // -- baseline ---------------------------------------------------------

    py::class_<BuildStats>(m, "BuildStats")
        .def(py::init<>())
        .def_readwrite("input_count", &BuildStats::input_count)
        .def_readwrite("output_count", &BuildStats::output_count)
        .def_readwrite("build_millis", &BuildStats::build_millis);

    py::class_<BaselineModel>(m, "BaselineModel")
        .def(py::init<>())
        .def_readwrite("stage", &BaselineModel::stage)
        .def_readwrite("weight_merge", &BaselineModel::weight_merge)
        .def_readwrite("trees", &BaselineModel::trees)
        .def_readwrite("provenance", &BaselineModel::provenance)
        .def_readwrite("build_stats", &BaselineModel::build_stats)
        .def("__repr__", [](const BaselineModel& mm) {
            return std::string("<BaselineModel ") + to_string(mm.stage) + " " +
                   std::to_string(mm.trees.size()) + " trees>";
        });

    py::class_<SubtreeWitness>(m, "SubtreeWitness")
        .def(py::init<>())
        .def_readwrite("mapping", &SubtreeWitness::mapping)
        .def_readwrite("verified", &SubtreeWitness::verified);

    // -- matching ---------------------------------------------------------

    py::class_<MatchParams>(m, "MatchParams")
        .def(py::init<>())
        .def_readwrite("mode", &MatchParams::mode)
        .def_readwrite("delta", &MatchParams::delta)
        .def_readwrite("anchor", &MatchParams::anchor);

    py::class_<MatchResult>(m, "MatchResult")
        .def(py::init<>())
        .def_readwrite("baseline_tree_id", &MatchResult::baseline_tree_id)
        .def_readwrite("matched", &MatchResult::matched)
        .def_readwrite("k", &MatchResult::k)
        .def_readwrite("l", &MatchResult::l)
        .def_readwrite("score", &MatchResult::score)
        .def_readwrite("match", &MatchResult::match);

    py::class_<DetectionVerdict>(m, "DetectionVerdict")
        .def(py::init<>())
        .def_readwrite("tree_id", &DetectionVerdict::tree_id)
        .def_readwrite("best_score", &DetectionVerdict::best_score)
        .def_readwrite("best_baseline_id", &DetectionVerdict::best_baseline_id)
        .def_readwrite("anomalous", &DetectionVerdict::anomalous)
        .def("__repr__", [](const DetectionVerdict& v) {
            return "<DetectionVerdict '" + v.tree_id + "' score " + std::to_string(v.best_score) +
                   (v.anomalous ? " anomalous>" : ">");
        });

    // -- traces and mining ------------------------------------------------

    py::class_<Trace>(m, "Trace")
        .def(py::init<>())
        .def_readwrite("trace_id", &Trace::trace_id)
        .def_readwrite("tree_id", &Trace::tree_id)
        .def_readwrite("items", &Trace::items)
        .def_readwrite("label", &Trace::label)
        .def(py::self == py::self);

    py::class_<SequentialPattern>(m, "SequentialPattern")
        .def(py::init<>())
        .def_readwrite("items", &SequentialPattern::items)
        .def_readwrite("support", &SequentialPattern::support)
        .def_readwrite("n", &SequentialPattern::n)
        .def_readwrite("sup_benign", &SequentialPattern::sup_benign)
        .def_readwrite("sup_malicious", &SequentialPattern::sup_malicious)
        .def(py::self == py::self);

    py::class_<PatternSet>(m, "PatternSet")
        .def(py::init<>())
        .def_readwrite("patterns", &PatternSet::patterns)
        .def_readwrite("n_sequences", &PatternSet::n_sequences);

    py::class_<FeatureParams>(m, "FeatureParams")
        .def(py::init<>())
        .def_readwrite("min_support", &FeatureParams::min_support)
        .def_readwrite("min_class_ratio", &FeatureParams::min_class_ratio)
        .def_readwrite("drop_redundant", &FeatureParams::drop_redundant)
        .def_readwrite("n_sequences", &FeatureParams::n_sequences);

    py::class_<TraceClassifier>(m, "TraceClassifier")
        .def(py::init<>())
        .def_readwrite("features", &TraceClassifier::features)
        .def_readwrite("prior_benign", &TraceClassifier::prior_benign)
        .def_readwrite("prior_malicious", &TraceClassifier::prior_malicious)
        .def_readwrite("likelihoods", &TraceClassifier::likelihoods)
        .def_readwrite("alpha", &TraceClassifier::alpha)
        .def(py::self == py::self);

    py::class_<Classification>(m, "Classification")
        .def(py::init<>())
        .def_readwrite("label", &Classification::label)
        .def_readwrite("likelihood", &Classification::likelihood);

    // -- evaluation -------------------------------------------------------

    py::class_<MetricRow>(m, "MetricRow")
        .def(py::init<>())
        .def_readwrite("threshold", &MetricRow::threshold)
        .def_readwrite("tp", &MetricRow::tp)
        .def_readwrite("fp", &MetricRow::fp)
        .def_readwrite("tn", &MetricRow::tn)
        .def_readwrite("fn", &MetricRow::fn)
        .def_readwrite("tpr", &MetricRow::tpr)
        .def_readwrite("tnr", &MetricRow::tnr)
        .def_readwrite("accuracy", &MetricRow::accuracy)
        .def_readwrite("fpr", &MetricRow::fpr)
        .def_readwrite("precision", &MetricRow::precision)
        .def(py::self == py::self);

    py::class_<Timing>(m, "Timing")
        .def(py::init<>())
        .def_readwrite("baseline_build_seconds", &Timing::baseline_build_seconds)
        .def_readwrite("mean_match_millis", &Timing::mean_match_millis);

    py::class_<EvalReport>(m, "EvalReport")
        .def(py::init<>())
        .def_readwrite("protocol", &EvalReport::protocol)
        .def_readwrite("rows", &EvalReport::rows)
        .def_readwrite("timing", &EvalReport::timing);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("task", &RunConfig::task)
        .def_readwrite("input_events", &RunConfig::input_events)
        .def_readwrite("input_traces", &RunConfig::input_traces)
        .def_readwrite("host_filter", &RunConfig::host_filter)
        .def_readwrite("max_bad_fraction", &RunConfig::max_bad_fraction)
        .def_readwrite("min_nodes", &RunConfig::min_nodes)
        .def_readwrite("min_depth", &RunConfig::min_depth)
        .def_readwrite("stage", &RunConfig::stage)
        .def_readwrite("weight_merge", &RunConfig::weight_merge)
        .def_readwrite("mode", &RunConfig::mode)
        .def_readwrite("anchor", &RunConfig::anchor)
        .def_readwrite("delta_grid", &RunConfig::delta_grid)
        .def_readwrite("seq_thresholds", &RunConfig::seq_thresholds)
        .def_readwrite("min_support", &RunConfig::min_support)
        .def_readwrite("min_class_ratio", &RunConfig::min_class_ratio)
        .def_readwrite("drop_redundant", &RunConfig::drop_redundant)
        .def_readwrite("use_maximal", &RunConfig::use_maximal)
        .def_readwrite("alpha", &RunConfig::alpha)
        .def_readwrite("kfold", &RunConfig::kfold)
        .def_readwrite("loo_level", &RunConfig::loo_level)
        .def_readwrite("seed", &RunConfig::seed)
        .def(py::self == py::self);

    // -- free functions ---------------------------------------------------

    m.def("parse_timestamp", &parse_timestamp, py::arg("text"));
    m.def("format_timestamp", &format_timestamp, py::arg("timestamp_us"));
    m.def("day_index", &day_index, py::arg("timestamp_us"));
    m.def("day_string", &day_string, py::arg("timestamp_us"));

    m.def("parse_event", [](const std::string& line) { return parse_event(line); },
          py::arg("line"));
    m.def("serialize_event", &serialize_event, py::arg("event"));
    m.def("load_events_file", &load_events_file, py::arg("path"),
          py::arg("options") = LoadOptions{});
    m.def(
        "load_events_text",
        [](const std::string& text, const LoadOptions& opts) {
            std::istringstream in(text);
            return load_events(in, opts);
        },
        py::arg("text"), py::arg("options") = LoadOptions{});

    m.def("build_trees", &build_trees, py::arg("batch"));
    m.def("filter_trees", &filter_trees, py::arg("trees"), py::arg("filter"));
    m.def("tree_stats", &tree_stats, py::arg("trees"));

    m.def("structural_identity", &structural_identity, py::arg("tree"));
    m.def("temporal_tree_set", &temporal_tree_set, py::arg("trees"),
          py::arg("weight_merge") = WeightMerge::MAX);
    m.def("cluster_tree", &cluster_tree, py::arg("tree"),
          py::arg("weight_merge") = WeightMerge::MAX);
    m.def("cluster_model", &cluster_model, py::arg("model"));
    m.def("is_induced_subtree", &is_induced_subtree, py::arg("inner"), py::arg("host"),
          "Witness that `inner` embeds in `host`, or None");
    m.def("merge_trees", &merge_trees, py::arg("ta"), py::arg("tb"),
          py::arg("weight_merge") = WeightMerge::MAX);
    m.def("semantic_aggregate", &semantic_aggregate, py::arg("model"));
    m.def("update_baseline", &update_baseline, py::arg("model"), py::arg("tree"));
    m.def("build_baseline", &build_baseline, py::arg("trees"), py::arg("target"),
          py::arg("weight_merge") = WeightMerge::MAX);

    m.def("exact_match", &exact_match, py::arg("pattern"), py::arg("target"),
          py::arg("anchor") = Anchor::ANY_NODE);
    m.def("partial_match", &partial_match, py::arg("pattern"), py::arg("target"),
          py::arg("params"));
    m.def("detect", &detect, py::arg("tree"), py::arg("model"), py::arg("params"),
          py::arg("exhaustive") = false);

    m.def("make_itemset", &make_itemset, py::arg("items"));
    m.def("extract_traces", py::overload_cast<const TaskTree&>(&extract_traces),
          py::arg("tree"));
    m.def("extract_traces", py::overload_cast<const std::vector<TaskTree>&>(&extract_traces),
          py::arg("forest"));
    m.def("contains", &contains, py::arg("big"), py::arg("small"));
    m.def("mine_patterns", &mine_patterns, py::arg("traces"), py::arg("min_support"));
    m.def("maximal_patterns", &maximal_patterns, py::arg("patterns"));
    m.def("select_features", &select_features, py::arg("patterns"), py::arg("params"));
    m.def("train_classifier", &train_classifier, py::arg("traces"), py::arg("features"),
          py::arg("alpha") = 1.0);
    m.def("classify", &classify, py::arg("trace"), py::arg("classifier"), py::arg("threshold"));
    m.def("noise_score", &noise_score, py::arg("trace"), py::arg("baseline"));

    m.def("make_row", &make_row, py::arg("threshold"), py::arg("tp"), py::arg("fp"),
          py::arg("tn"), py::arg("fn"));
    m.def("kfold_indices", &kfold_indices, py::arg("n"), py::arg("k"), py::arg("seed"));
    m.def("worker_count", &worker_count);
    m.def("evaluate_tree_detector", &evaluate_tree_detector, py::arg("benign"),
          py::arg("malicious"), py::arg("config"));
    m.def("evaluate_sequence_classifier", &evaluate_sequence_classifier, py::arg("traces"),
          py::arg("config"));
    m.def("run_pipeline", &run_pipeline, py::arg("config"));
    m.def("report_csv", &report_csv, py::arg("report"));
    m.def("roc_csv", &roc_csv, py::arg("report"));

    m.def("save_forest", &save_forest, py::arg("trees"), py::arg("path"));
    m.def("load_forest", &load_forest, py::arg("path"));
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));
    m.def("save_patterns", &save_patterns, py::arg("patterns"), py::arg("path"));
    m.def("load_patterns", &load_patterns, py::arg("path"));
    m.def("save_classifier", &save_classifier, py::arg("classifier"), py::arg("path"));
    m.def("load_classifier", &load_classifier, py::arg("path"));
    m.def("save_traces", &save_traces, py::arg("traces"), py::arg("path"));
    m.def("load_traces", &load_traces, py::arg("path"));
    m.def("save_report", &save_report, py::arg("report"), py::arg("path"));
    m.def("load_report", &load_report, py::arg("path"));
    m.def("load_config", &load_config, py::arg("path"));

    m.def("synth_baseline_corpus", &synth_baseline_corpus, py::arg("seed"), py::arg("count"));
    m.def("synth_anomalous_trees", &synth_anomalous_trees, py::arg("count"));
    m.def("synth_trace_set", &synth_trace_set, py::arg("benign_count"),
          py::arg("malicious_trees"));
    m.def(
        "synth_event_log",
        [](std::uint64_t seed, std::size_t count, const std::string& path) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot open " + path);
            return synth_event_log(seed, count, out);
        },
        py::arg("seed"), py::arg("count"), py::arg("path"),
        "Write a deterministic JSONL audit log to `path`, returning the line count");
}
