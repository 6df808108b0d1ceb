#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "taptree/event.hpp"

namespace taptree {

struct LoadOptions {
    std::string host_filter;         // empty = keep every host
    double max_bad_fraction = 0.10;  // CorruptInputError above this share of bad lines
};

struct LoadResult {
    std::vector<EventBatch> batches;  // sorted by (host, day)
    std::size_t total_lines = 0;
    std::size_t skipped = 0;   // lines that failed to parse or validate
    std::size_t filtered = 0;  // valid lines dropped by the host filter
};

// Parse one JSONL record. Alias key spellings from eCAR-style feeds are
// accepted (hostname/host, actorid/actor_id, objectid/object_id,
// label/malicious). Throws ParseError for non-JSON input and SchemaError for
// a missing or unusable mandatory field.
AuditEvent parse_event(std::string_view line);

// Canonical single-line JSON for an event; parse_event(serialize_event(e)) == e.
std::string serialize_event(const AuditEvent& e);

LoadResult load_events(std::istream& in, const LoadOptions& opts = {});
LoadResult load_events_file(const std::string& path, const LoadOptions& opts = {});

}  // namespace taptree
