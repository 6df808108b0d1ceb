#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taptree {

enum class ObjectKind { FILE, PROCESS, FLOW, REGISTRY, OTHER };

const char* to_string(ObjectKind k);
ObjectKind object_kind_from(std::string_view s);  // unrecognized values map to OTHER

// One parsed audit-log record. Optional path fields that the log omitted are
// stored as the sentinel "unknown" so node labels stay total downstream.
struct AuditEvent {
    std::string id;
    ObjectKind object = ObjectKind::OTHER;
    std::string action;  // CREATE, START, READ, ... kept verbatim
    std::int64_t pid = 0;
    std::int64_t ppid = 0;
    std::string actor_id;
    std::string object_id;
    std::string principal;
    std::string file_path = "unknown";
    std::string image_path = "unknown";
    std::string parent_image_path = "unknown";
    std::int64_t timestamp_us = 0;  // UTC microseconds since epoch
    std::string host = "unknown";
    std::optional<int> label;  // 0 benign, 1 malicious, absent when untagged

    friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

// Events for one (host, UTC day), sorted by timestamp.
struct EventBatch {
    std::string host;
    std::int64_t day = 0;  // UTC day index since epoch
    std::vector<AuditEvent> events;
    std::int64_t span_start = 0;
    std::int64_t span_end = 0;

    friend bool operator==(const EventBatch&, const EventBatch&) = default;
};

// ISO-8601 instant -> microseconds since epoch. Accepts an optional 'T' or
// space separator, fractional seconds up to nanoseconds (truncated to micro),
// and an optional Z or +-hh[:]mm offset; a naive timestamp is read as UTC.
// Throws SchemaError("timestamp") on anything else.
std::int64_t parse_timestamp(std::string_view s);

// Inverse of parse_timestamp, always naive UTC with 6 fractional digits.
std::string format_timestamp(std::int64_t us);

std::int64_t day_index(std::int64_t timestamp_us);   // floor to UTC day
std::string day_string(std::int64_t timestamp_us);   // YYYY-MM-DD

}  // namespace taptree
