#include "taptree/event.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "taptree/errors.hpp"

namespace taptree {

namespace {

constexpr std::int64_t kUsPerDay = 86'400'000'000LL;

// Civil-date conversions on the proleptic Gregorian calendar (the usual
// era-based formulation, valid far beyond any plausible log range).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = static_cast<int>(y - era * 400);
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const int doe = static_cast<int>(z - era * 146097);
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0);
}

[[noreturn]] void bad_timestamp() { throw SchemaError("timestamp"); }

int read_digits(std::string_view s, std::size_t& i, int count) {
    int v = 0;
    for (int k = 0; k < count; ++k) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) bad_timestamp();
        v = v * 10 + (s[i] - '0');
        ++i;
    }
    return v;
}

}  // namespace

const char* to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::FILE: return "FILE";
        case ObjectKind::PROCESS: return "PROCESS";
        case ObjectKind::FLOW: return "FLOW";
        case ObjectKind::REGISTRY: return "REGISTRY";
        case ObjectKind::OTHER: break;
    }
    return "OTHER";
}

ObjectKind object_kind_from(std::string_view s) {
    std::string up(s);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "FILE") return ObjectKind::FILE;
    if (up == "PROCESS") return ObjectKind::PROCESS;
    if (up == "FLOW") return ObjectKind::FLOW;
    if (up == "REGISTRY") return ObjectKind::REGISTRY;
    return ObjectKind::OTHER;
}

std::int64_t parse_timestamp(std::string_view s) {
    // Trim surrounding whitespace, then YYYY-MM-DD[{T| }HH:MM:SS[.frac]][Z|+-hh[:]mm]
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    s = s.substr(b, e - b);
    if (s.empty()) bad_timestamp();

    std::size_t i = 0;
    const int year = read_digits(s, i, 4);
    if (i >= s.size() || s[i] != '-') bad_timestamp();
    ++i;
    const int month = read_digits(s, i, 2);
    if (i >= s.size() || s[i] != '-') bad_timestamp();
    ++i;
    const int day = read_digits(s, i, 2);
    if (month < 1 || month > 12 || day < 1) bad_timestamp();
    // Round-trip check rejects impossible dates like Feb 30 without a table.
    {
        std::int64_t y2;
        int m2, d2;
        civil_from_days(days_from_civil(year, month, day), y2, m2, d2);
        if (y2 != year || m2 != month || d2 != day) bad_timestamp();
    }

    int hour = 0, minute = 0, second = 0;
    std::int64_t frac_us = 0;
    if (i < s.size() && (s[i] == 'T' || s[i] == 't' || s[i] == ' ')) {
        ++i;
        hour = read_digits(s, i, 2);
        if (i >= s.size() || s[i] != ':') bad_timestamp();
        ++i;
        minute = read_digits(s, i, 2);
        if (i < s.size() && s[i] == ':') {
            ++i;
            second = read_digits(s, i, 2);
        }
        if (hour > 23 || minute > 59 || second > 60) bad_timestamp();
        if (second == 60) second = 59;  // clamp leap seconds
        if (i < s.size() && s[i] == '.') {
            ++i;
            if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) bad_timestamp();
            std::int64_t scale = 100000;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                if (scale > 0) frac_us += (s[i] - '0') * scale;
                scale /= 10;
                ++i;
            }
        }
    }

    std::int64_t offset_us = 0;
    if (i < s.size()) {
        const char c = s[i];
        if (c == 'Z' || c == 'z') {
            ++i;
        } else if (c == '+' || c == '-') {
            ++i;
            const int oh = read_digits(s, i, 2);
            if (i < s.size() && s[i] == ':') ++i;
            const int om = (i < s.size()) ? read_digits(s, i, 2) : 0;
            if (oh > 14 || om > 59) bad_timestamp();
            offset_us = (static_cast<std::int64_t>(oh) * 3600 + om * 60) * 1'000'000LL;
            if (c == '-') offset_us = -offset_us;
        }
    }
    if (i != s.size()) bad_timestamp();

    const std::int64_t days = days_from_civil(year, month, day);
    const std::int64_t tod =
        (static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second) * 1'000'000LL + frac_us;
    return days * kUsPerDay + tod - offset_us;
}

std::string format_timestamp(std::int64_t us) {
    const std::int64_t days = floor_div(us, kUsPerDay);
    std::int64_t rem = us - days * kUsPerDay;
    std::int64_t y;
    int m, d;
    civil_from_days(days, y, m, d);
    const int hour = static_cast<int>(rem / 3'600'000'000LL);
    rem %= 3'600'000'000LL;
    const int minute = static_cast<int>(rem / 60'000'000LL);
    rem %= 60'000'000LL;
    const int second = static_cast<int>(rem / 1'000'000LL);
    const int frac = static_cast<int>(rem % 1'000'000LL);
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02d-%02dT%02d:%02d:%02d.%06d",
                  static_cast<long long>(y), m, d, hour, minute, second, frac);
    return std::string(buf.data());
}

std::int64_t day_index(std::int64_t timestamp_us) { return floor_div(timestamp_us, kUsPerDay); }

std::string day_string(std::int64_t timestamp_us) {
    std::int64_t y;
    int m, d;
    civil_from_days(day_index(timestamp_us), y, m, d);
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02d-%02d", static_cast<long long>(y), m, d);
    return std::string(buf.data());
}

}  // namespace taptree
