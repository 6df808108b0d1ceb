#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "taptree/baseline.hpp"
#include "taptree/eval.hpp"
#include "taptree/seqmine.hpp"
#include "taptree/tree.hpp"

namespace taptree {

// All artifact files are version-1 JSON objects with a fixed key order, so a
// rebuild from identical inputs reproduces them byte for byte. Model build
// timings are deliberately written as 0 to keep that true.
inline constexpr int kArtifactVersion = 1;

using ojson = nlohmann::ordered_json;

ojson tree_to_json(const TaskTree& t);
TaskTree tree_from_json(const nlohmann::json& j);

ojson forest_to_json(const std::vector<TaskTree>& trees);
std::vector<TaskTree> forest_from_json(const nlohmann::json& j);

ojson model_to_json(const BaselineModel& m);
BaselineModel model_from_json(const nlohmann::json& j);

ojson patterns_to_json(const PatternSet& ps);
PatternSet patterns_from_json(const nlohmann::json& j);

ojson classifier_to_json(const TraceClassifier& c);
TraceClassifier classifier_from_json(const nlohmann::json& j);

ojson traces_to_json(const std::vector<Trace>& traces);
std::vector<Trace> traces_from_json(const nlohmann::json& j);

ojson report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

ojson config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);  // version key optional here

std::string read_text_file(const std::string& path);           // IoError
void write_text_file(const std::string& path, const std::string& content);

// Parse a file into JSON (FormatError on bad syntax) without a version check;
// the typed loaders below layer that on.
nlohmann::json load_json_file(const std::string& path);

void save_forest(const std::vector<TaskTree>& trees, const std::string& path);
std::vector<TaskTree> load_forest(const std::string& path);
void save_model(const BaselineModel& m, const std::string& path);
BaselineModel load_model(const std::string& path);
void save_patterns(const PatternSet& ps, const std::string& path);
PatternSet load_patterns(const std::string& path);
void save_classifier(const TraceClassifier& c, const std::string& path);
TraceClassifier load_classifier(const std::string& path);
void save_traces(const std::vector<Trace>& traces, const std::string& path);
std::vector<Trace> load_traces(const std::string& path);
void save_report(const EvalReport& r, const std::string& path);
EvalReport load_report(const std::string& path);
RunConfig load_config(const std::string& path);

}  // namespace taptree
