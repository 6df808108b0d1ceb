#include <doctest.h>

#include <sstream>
#include <string>

#include "taptree/errors.hpp"
#include "taptree/event.hpp"
#include "taptree/ingest.hpp"

using namespace taptree;

TEST_SUITE_BEGIN("ingest");

TEST_CASE("timestamp parsing hits known instants") {
    CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_timestamp("1970-01-02T00:00:00Z") == 86'400'000'000LL);
    CHECK(parse_timestamp("1969-12-31T23:59:59Z") == -1'000'000LL);
    CHECK(parse_timestamp("1970-01-01T00:00:00.123456Z") == 123456);
}

TEST_CASE("timestamp variants are equivalent") {
    const std::int64_t base = parse_timestamp("2026-08-23T10:00:00Z");
    CHECK(parse_timestamp("2026-08-23 10:00:00") == base);       // naive reads as UTC
    CHECK(parse_timestamp("2026-08-23T12:00:00+02:00") == base);
    CHECK(parse_timestamp("2026-08-23T12:00:00+0200") == base);
    CHECK(parse_timestamp("2026-08-23T04:30:00-05:30") == base);
    CHECK(parse_timestamp("  2026-08-23T10:00:00Z  ") == base);
    CHECK(parse_timestamp("2026-08-23T10:00") == base);          // seconds optional
    CHECK(parse_timestamp("2026-08-23") == base - 10 * 3'600'000'000LL);
}

TEST_CASE("timestamp fractions truncate to microseconds") {
    const std::int64_t whole = parse_timestamp("2026-01-01T00:00:00Z");
    CHECK(parse_timestamp("2026-01-01T00:00:00.5Z") == whole + 500000);
    CHECK(parse_timestamp("2026-01-01T00:00:00.1234567Z") == whole + 123456);
    CHECK(parse_timestamp("2026-01-01T00:00:00.000000999Z") == whole);
}

TEST_CASE("timestamp calendar validation") {
    CHECK_NOTHROW(parse_timestamp("2024-02-29"));  // leap year
    CHECK_THROWS_AS(parse_timestamp("2023-02-29"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-13-01"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-00-10"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-01-32"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-01-01T24:00:00"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-01-01T00:61:00"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("not-a-date"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp(""), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("2026-01-01X"), SchemaError);
    // A leap second is clamped, not rejected.
    CHECK(parse_timestamp("2016-12-31T23:59:60Z") == parse_timestamp("2016-12-31T23:59:59Z"));
}

TEST_CASE("format_timestamp inverts parse_timestamp") {
    for (const char* s : {"1970-01-01T00:00:00.000000", "2026-08-23T10:11:12.345678",
                          "1969-07-20T20:17:40.000001", "2100-02-28T23:59:59.999999"}) {
        CHECK(format_timestamp(parse_timestamp(s)) == s);
    }
}

TEST_CASE("day helpers floor correctly") {
    CHECK(day_index(0) == 0);
    CHECK(day_index(1) == 0);
    CHECK(day_index(-1) == -1);
    CHECK(day_index(86'400'000'000LL) == 1);
    CHECK(day_string(0) == "1970-01-01");
    CHECK(day_string(parse_timestamp("2026-08-23T23:59:59Z")) == "2026-08-23");
}

namespace {

const char* kFullRecord =
    R"({"id":"e1","object":"PROCESS","action":"START","pid":42,"ppid":7,)"
    R"("actorid":"a1","objectid":"o1","principal":"S-1-5-18",)"
    R"("file_path":"C:\\f.txt","image_path":"C:\\p.exe",)"
    R"("parent_image_path":"C:\\pp.exe","timestamp":"2026-01-05T08:00:00Z",)"
    R"("hostname":"h1","label":1})";

}  // namespace

TEST_CASE("parse_event reads a full record") {
    AuditEvent e = parse_event(kFullRecord);
    CHECK(e.id == "e1");
    CHECK(e.object == ObjectKind::PROCESS);
    CHECK(e.action == "START");
    CHECK(e.pid == 42);
    CHECK(e.ppid == 7);
    CHECK(e.actor_id == "a1");
    CHECK(e.object_id == "o1");
    CHECK(e.principal == "S-1-5-18");
    CHECK(e.file_path == "C:\\f.txt");
    CHECK(e.image_path == "C:\\p.exe");
    CHECK(e.parent_image_path == "C:\\pp.exe");
    CHECK(e.timestamp_us == parse_timestamp("2026-01-05T08:00:00Z"));
    CHECK(e.host == "h1");
    CHECK(e.label.has_value());
    CHECK(*e.label == 1);
}

TEST_CASE("parse_event accepts alias spellings") {
    AuditEvent e = parse_event(
        R"({"id":"e2","object":"file","action":"read","pid":"10","ppid":0,)"
        R"("actor_id":"a","object_id":"o","timestamp":"2026-01-05","host":"h2",)"
        R"("malicious":true})");
    CHECK(e.object == ObjectKind::FILE);  // case-insensitive kind
    CHECK(e.pid == 10);                   // numeric string accepted
    CHECK(e.actor_id == "a");
    CHECK(e.object_id == "o");
    CHECK(e.host == "h2");
    CHECK(*e.label == 1);
    CHECK(e.file_path == "unknown");      // optional paths default
    CHECK(e.image_path == "unknown");
    CHECK(e.principal.empty());
}

TEST_CASE("parse_event rejects broken records") {
    CHECK_THROWS_AS(parse_event("this is not json"), ParseError);
    CHECK_THROWS_AS(parse_event("[1,2,3]"), ParseError);
    // each mandatory key missing in turn
    CHECK_THROWS_AS(
        parse_event(R"({"object":"FILE","action":"x","pid":1,"ppid":1,"actorid":"a",)"
                    R"("objectid":"o","timestamp":"2026-01-01"})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_event(R"({"id":"e","object":"FILE","action":"x","pid":1,"ppid":1,)"
                    R"("actorid":"a","objectid":"o"})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_event(R"({"id":"e","object":"FILE","action":"x","pid":-3,"ppid":1,)"
                    R"("actorid":"a","objectid":"o","timestamp":"2026-01-01"})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_event(R"({"id":"e","object":"FILE","action":"x","pid":1,"ppid":1,)"
                    R"("actorid":"a","objectid":"o","timestamp":"2026-01-01","label":7})"),
        SchemaError);
    CHECK_THROWS_AS(
        parse_event(R"({"id":"e","object":"FILE","action":"x","pid":1,"ppid":1,)"
                    R"("actorid":"a","objectid":"o","timestamp":"garbage"})"),
        SchemaError);
}

TEST_CASE("unknown object kinds map to OTHER") {
    CHECK(object_kind_from("SHELL") == ObjectKind::OTHER);
    CHECK(object_kind_from("registry") == ObjectKind::REGISTRY);
    CHECK(object_kind_from("Flow") == ObjectKind::FLOW);
}

TEST_CASE("serialize_event round-trips and is stable") {
    AuditEvent e = parse_event(kFullRecord);
    const std::string line = serialize_event(e);
    CHECK(parse_event(line) == e);
    CHECK(serialize_event(parse_event(line)) == line);
    CHECK(line.rfind("{\"id\":", 0) == 0);  // key order is fixed

    // absent principal and label stay absent
    e.principal.clear();
    e.label.reset();
    const std::string bare = serialize_event(e);
    CHECK(bare.find("principal") == std::string::npos);
    CHECK(bare.find("label") == std::string::npos);
    CHECK(parse_event(bare) == e);
}

namespace {

std::string event_line(const char* id, const char* host, const char* ts) {
    AuditEvent e;
    e.id = id;
    e.object = ObjectKind::FILE;
    e.action = "read";
    e.pid = 1;
    e.ppid = 0;
    e.actor_id = "a";
    e.object_id = "o";
    e.timestamp_us = parse_timestamp(ts);
    e.host = host;
    return serialize_event(e);
}

}  // namespace

TEST_CASE("load_events groups by host and day and sorts by time") {
    std::stringstream in;
    in << event_line("e1", "beta", "2026-01-06T01:00:00Z") << "\n";
    in << event_line("e2", "alpha", "2026-01-05T23:00:00Z") << "\n";
    in << event_line("e3", "alpha", "2026-01-05T22:00:00Z") << "\n";
    in << event_line("e4", "alpha", "2026-01-06T00:30:00Z") << "\n";

    LoadResult res = load_events(in);
    CHECK(res.total_lines == 4);
    CHECK(res.skipped == 0);
    REQUIRE(res.batches.size() == 3);
    // map order: (alpha, day5), (alpha, day6), (beta, day6)
    CHECK(res.batches[0].host == "alpha");
    CHECK(res.batches[1].host == "alpha");
    CHECK(res.batches[2].host == "beta");
    CHECK(res.batches[0].day + 1 == res.batches[1].day);
    REQUIRE(res.batches[0].events.size() == 2);
    CHECK(res.batches[0].events[0].id == "e3");  // sorted within the batch
    CHECK(res.batches[0].events[1].id == "e2");
    CHECK(res.batches[0].span_start == res.batches[0].events[0].timestamp_us);
    CHECK(res.batches[0].span_end == res.batches[0].events[1].timestamp_us);
}

TEST_CASE("load_events applies the host filter") {
    std::stringstream in;
    in << event_line("e1", "alpha", "2026-01-05T01:00:00Z") << "\n";
    in << event_line("e2", "beta", "2026-01-05T02:00:00Z") << "\n";
    LoadOptions opts;
    opts.host_filter = "beta";
    LoadResult res = load_events(in, opts);
    CHECK(res.filtered == 1);
    REQUIRE(res.batches.size() == 1);
    CHECK(res.batches[0].events[0].id == "e2");
}

TEST_CASE("load_events tolerates a few bad lines but not many") {
    // 1 bad line in 10 is exactly the 10% limit: allowed, only counted.
    std::stringstream ok;
    for (int i = 0; i < 9; ++i) ok << event_line("e", "h", "2026-01-05T01:00:00Z") << "\n";
    ok << "{broken\n";
    LoadResult res = load_events(ok);
    CHECK(res.total_lines == 10);
    CHECK(res.skipped == 1);
    CHECK(res.batches.size() == 1);

    // 2 bad lines in 10 crosses it.
    std::stringstream bad;
    for (int i = 0; i < 8; ++i) bad << event_line("e", "h", "2026-01-05T01:00:00Z") << "\n";
    bad << "{broken\n{also broken\n";
    CHECK_THROWS_AS(load_events(bad), CorruptInputError);
}

TEST_CASE("load_events on an empty stream") {
    std::stringstream in;
    LoadResult res = load_events(in);
    CHECK(res.total_lines == 0);
    CHECK(res.batches.empty());
}

TEST_CASE("load_events_file reports missing files") {
    CHECK_THROWS_AS(load_events_file("/nonexistent/events.jsonl"), IoError);
}

TEST_SUITE_END();
