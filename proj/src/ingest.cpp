#include "taptree/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <utility>

#include <json.hpp>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Fetch a key under any of its accepted spellings; nullptr when absent.
const json* find_key(const json& j, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        auto it = j.find(n);
        if (it != j.end() && !it->is_null()) return &*it;
    }
    return nullptr;
}

std::string as_string(const json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw SchemaError(key);
}

std::string need_string(const json& j, std::initializer_list<const char*> names) {
    const json* v = find_key(j, names);
    if (!v) throw SchemaError(*names.begin());
    return as_string(*v, *names.begin());
}

std::int64_t need_pid(const json& j, const char* key) {
    const json* v = find_key(j, {key});
    if (!v) throw SchemaError(key);
    std::int64_t out = 0;
    if (v->is_number_integer()) {
        out = v->get<std::int64_t>();
    } else if (v->is_number_unsigned()) {
        out = static_cast<std::int64_t>(v->get<std::uint64_t>());
    } else if (v->is_string()) {
        try {
            out = std::stoll(v->get<std::string>());
        } catch (...) {
            throw SchemaError(key);
        }
    } else {
        throw SchemaError(key);
    }
    if (out < 0) throw SchemaError(key);
    return out;
}

std::string optional_path(const json& j, std::initializer_list<const char*> names) {
    const json* v = find_key(j, names);
    if (!v || !v->is_string()) return "unknown";
    std::string s = v->get<std::string>();
    return s.empty() ? std::string("unknown") : s;
}

}  // namespace

AuditEvent parse_event(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& err) {
        throw ParseError(err.what(), err.byte);
    }
    if (!j.is_object()) throw ParseError("record is not a JSON object", 0);

    AuditEvent e;
    e.id = need_string(j, {"id"});
    e.object = object_kind_from(need_string(j, {"object"}));
    e.action = need_string(j, {"action"});
    e.pid = need_pid(j, "pid");
    e.ppid = need_pid(j, "ppid");
    e.actor_id = need_string(j, {"actorid", "actor_id"});
    e.object_id = need_string(j, {"objectid", "object_id"});
    e.timestamp_us = parse_timestamp(need_string(j, {"timestamp"}));

    if (const json* v = find_key(j, {"principal"}); v && v->is_string())
        e.principal = v->get<std::string>();
    e.file_path = optional_path(j, {"file_path"});
    e.image_path = optional_path(j, {"image_path"});
    e.parent_image_path = optional_path(j, {"parent_image_path"});
    if (const json* v = find_key(j, {"hostname", "host"}); v && v->is_string() &&
                                                           !v->get<std::string>().empty())
        e.host = v->get<std::string>();

    if (const json* v = find_key(j, {"label", "malicious"})) {
        int lab;
        if (v->is_boolean()) {
            lab = v->get<bool>() ? 1 : 0;
        } else if (v->is_number_integer() || v->is_number_unsigned()) {
            lab = static_cast<int>(v->get<std::int64_t>());
        } else {
            throw SchemaError("label");
        }
        if (lab != 0 && lab != 1) throw SchemaError("label");
        e.label = lab;
    }
    return e;
}

std::string serialize_event(const AuditEvent& e) {
    ojson j;
    j["id"] = e.id;
    j["object"] = to_string(e.object);
    j["action"] = e.action;
    j["pid"] = e.pid;
    j["ppid"] = e.ppid;
    j["actorid"] = e.actor_id;
    j["objectid"] = e.object_id;
    if (!e.principal.empty()) j["principal"] = e.principal;
    j["file_path"] = e.file_path;
    j["image_path"] = e.image_path;
    j["parent_image_path"] = e.parent_image_path;
    j["timestamp"] = format_timestamp(e.timestamp_us);
    j["hostname"] = e.host;
    if (e.label) j["label"] = *e.label;
    return j.dump();
}

LoadResult load_events(std::istream& in, const LoadOptions& opts) {
    LoadResult res;
    // Keyed by (host, day) so batch order never depends on how hosts were
    // interleaved in the input.
    std::map<std::pair<std::string, std::int64_t>, std::vector<AuditEvent>> groups;

    std::string line;
    while (std::getline(in, line)) {
        ++res.total_lines;
        AuditEvent e;
        try {
            e = parse_event(line);
        } catch (const Error&) {
            ++res.skipped;
            continue;
        }
        if (!opts.host_filter.empty() && e.host != opts.host_filter) {
            ++res.filtered;
            continue;
        }
        const std::int64_t day = day_index(e.timestamp_us);
        groups[{e.host, day}].push_back(std::move(e));
    }
    if (in.bad()) throw IoError("read failure while loading events");

    if (res.skipped > 0 && res.total_lines > 0) {
        const double bad = static_cast<double>(res.skipped) / static_cast<double>(res.total_lines);
        if (bad > opts.max_bad_fraction)
            throw CorruptInputError("malformed line fraction " + std::to_string(bad) +
                                    " exceeds limit " + std::to_string(opts.max_bad_fraction));
    }

    for (auto& [key, events] : groups) {
        EventBatch b;
        b.host = key.first;
        b.day = key.second;
        // Stable: ties keep input order.
        std::stable_sort(events.begin(), events.end(),
                         [](const AuditEvent& a, const AuditEvent& c) {
                             return a.timestamp_us < c.timestamp_us;
                         });
        b.events = std::move(events);
        b.span_start = b.events.front().timestamp_us;
        b.span_end = b.events.back().timestamp_us;
        res.batches.push_back(std::move(b));
    }
    return res;
}

LoadResult load_events_file(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return load_events(in, opts);
}

}  // namespace taptree
