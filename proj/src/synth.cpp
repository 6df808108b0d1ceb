#include "taptree/synth.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "taptree/event.hpp"
#include "taptree/ingest.hpp"

namespace taptree {

namespace {

constexpr int kTemplateCount = 25;
constexpr int kVariantCount = 6;

const std::array<const char*, 3> kRootImages = {
    "C:\\Windows\\System32\\services.exe",
    "C:\\Windows\\explorer.exe",
    "C:\\Windows\\System32\\svchost.exe",
};

std::string pad(std::size_t v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// Every template carries one marker leaf nothing else uses, so trees from
// different templates never collapse into each other by accident.
std::string marker_label(int k) { return "C:\\tools\\t" + std::to_string(k) + ".exe"; }

std::string app_label(int k, const char* exe) {
    return "C:\\Program Files\\app" + std::to_string(k) + "\\" + exe;
}

// Template k, variant v. Variant 0 is the full shape: root with a marker
// leaf, a main.exe subtree (worker + logger) and a cmd/conhost/ping chain.
// Variants 1-3 repeat the worker or logger leaf, which leaf clustering should
// undo; 4 and 5 are truncations the semantic stage should absorb.
TaskTree template_tree(int k, int v, std::mt19937_64& rng) {
    auto w = [&rng] { return 1 + static_cast<std::uint64_t>(rng() % 5); };
    TaskTree t;
    const int root = t.add_root(kRootImages[static_cast<std::size_t>(k % 3)]);
    t.add_child(root, marker_label(k), w());
    const int main_node = t.add_child(root, app_label(k, "main.exe"), w());
    int n_worker = 1, n_logger = 1;
    bool shell_chain = true;
    switch (v) {
        case 1: n_worker = 2; break;
        case 2: n_worker = 2; n_logger = 2; break;
        case 3: n_worker = 3; break;
        case 4: shell_chain = false; break;
        case 5: n_logger = 0; shell_chain = false; break;
        default: break;
    }
    for (int i = 0; i < n_worker; ++i) t.add_child(main_node, app_label(k, "worker.exe"), w());
    for (int i = 0; i < n_logger; ++i) t.add_child(main_node, app_label(k, "logger.exe"), w());
    if (shell_chain) {
        const int shell = t.add_child(root, "C:\\Windows\\System32\\cmd.exe", w());
        const int con = t.add_child(shell, "C:\\Windows\\System32\\conhost.exe", w());
        t.add_child(con, "C:\\Windows\\System32\\ping.exe", w());
    }
    return t;
}

}  // namespace

std::vector<TaskTree> synth_baseline_corpus(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    constexpr std::size_t cells = kTemplateCount * kVariantCount;
    std::vector<TaskTree> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t cell = i < cells ? i : rng() % cells;
        const int k = static_cast<int>(cell / kVariantCount);
        const int v = static_cast<int>(cell % kVariantCount);
        TaskTree t = template_tree(k, v, rng);
        t.host = "bench";
        t.tree_id = "bench/t" + pad(i, 5);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TaskTree> synth_anomalous_trees(std::size_t count) {
    std::vector<TaskTree> out;
    out.reserve(count);
    const std::size_t quarter = count / 4;
    for (std::size_t i = 0; i < count; ++i) {
        const int k = static_cast<int>(i % kTemplateCount);
        // Payload lengths 6, 3 and 1 put the matched share of the tree at
        // 5/11, 5/8 and 5/6 against a baseline holding the full templates.
        const int payload = i < quarter ? 6 : i + quarter < count ? 3 : 1;
        TaskTree t;
        t.host = "attack";
        t.tree_id = "attack/t" + pad(i, 3);
        t.label = 1;
        const int root = t.add_root(kRootImages[static_cast<std::size_t>(k % 3)]);
        t.add_child(root, marker_label(k));
        const int main_node = t.add_child(root, app_label(k, "main.exe"));
        t.add_child(main_node, app_label(k, "worker.exe"));
        t.add_child(main_node, app_label(k, "logger.exe"));
        int at = root;
        for (int j = 0; j < payload; ++j) {
            at = t.add_child(at, "C:\\Users\\victim\\payload" + std::to_string(i) + "_" +
                                     std::to_string(j) + ".exe");
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Trace> synth_trace_set(std::size_t benign_count, std::size_t malicious_trees) {
    auto body = [](int b) {
        Sequence s;
        for (int i = 0; i < 6; ++i)
            s.push_back({"svc" + std::to_string(b) + "_op" + std::to_string(i)});
        return s;
    };
    std::vector<Trace> out;
    out.reserve(benign_count + malicious_trees * 10);
    for (std::size_t i = 0; i < benign_count; ++i) {
        Trace tr;
        tr.tree_id = "benign/t" + pad(i, 4);
        tr.trace_id = tr.tree_id + "#0";
        tr.items = body(static_cast<int>(i % 10));
        out.push_back(std::move(tr));
    }
    for (std::size_t t = 0; t < malicious_trees; ++t) {
        // The last tree reuses only benign operations: no tail, no feature
        // hits, a deliberate blind spot for the classifier.
        const bool stealth = t + 1 == malicious_trees;
        Sequence items = body(static_cast<int>(t % 10));
        if (!stealth) {
            const int s = static_cast<int>(t % 3);
            for (int i = 0; i < 3; ++i)
                items.push_back({"atk" + std::to_string(s) + "_stage" + std::to_string(i)});
        }
        for (int j = 0; j < 10; ++j) {
            Trace tr;
            tr.tree_id = "mal/t" + pad(t, 3);
            tr.trace_id = tr.tree_id + "#" + std::to_string(j);
            tr.items = items;
            tr.label = 1;
            out.push_back(std::move(tr));
        }
    }
    return out;
}

namespace {

// Stops emitting once the line budget is spent; the generator checks the
// return value and abandons the rest of the instance.
struct EventSink {
    std::ostream& out;
    std::size_t limit;
    std::size_t written = 0;

    bool push(const AuditEvent& e) {
        if (written == limit) return false;
        out << serialize_event(e) << '\n';
        ++written;
        return true;
    }
};

struct InstanceCtx {
    int h = 0;
    std::string hostname;
    std::int64_t base_pid = 0;
    std::int64_t t0 = 0;  // first event timestamp in microseconds
    std::size_t inst = 0;
};

std::string actor(int h, std::int64_t pid) {
    return "h" + std::to_string(h) + "p" + std::to_string(pid);
}

AuditEvent start_event(const InstanceCtx& c, int step, std::int64_t pid, std::int64_t ppid,
                       const std::string& image, const std::string& parent_image,
                       const std::string& principal, std::optional<int> label) {
    AuditEvent e;
    e.id = "evt" + std::to_string(c.inst) + "-" + std::to_string(step);
    e.object = ObjectKind::PROCESS;
    e.action = "start";
    e.pid = pid;
    e.ppid = ppid;
    e.actor_id = actor(c.h, ppid);
    e.object_id = actor(c.h, pid);
    e.principal = principal;
    e.image_path = image;
    e.parent_image_path = parent_image;
    e.timestamp_us = c.t0 + step * 1000000LL;
    e.host = c.hostname;
    e.label = label;
    return e;
}

AuditEvent file_event(const InstanceCtx& c, int step, std::int64_t pid, std::int64_t ppid,
                      const std::string& image, const std::string& path, const char* action,
                      std::optional<int> label) {
    AuditEvent e;
    e.id = "evt" + std::to_string(c.inst) + "-" + std::to_string(step);
    e.object = ObjectKind::FILE;
    e.action = action;
    e.pid = pid;
    e.ppid = ppid;
    e.actor_id = actor(c.h, pid);
    e.object_id = "f" + std::to_string(c.inst) + "-" + std::to_string(step);
    e.file_path = path;
    e.image_path = image;
    e.timestamp_us = c.t0 + step * 1000000LL;
    e.host = c.hostname;
    e.label = label;
    return e;
}

// A service root starting an agent that spawns a sync and a report worker,
// all three touching their usual files. Only the op counts vary per instance,
// so one template always folds to one structural identity.
void benign_instance(const InstanceCtx& c, int g, std::mt19937_64& rng, EventSink& sink) {
    const std::string root_img = kRootImages[static_cast<std::size_t>(g % 3)];
    const std::string suite = "C:\\Program Files\\suite" + std::to_string(g);
    const std::string data_dir = "C:\\ProgramData\\suite" + std::to_string(g);
    const std::string agent = suite + "\\agent.exe";
    const std::string sync = suite + "\\sync.exe";
    const std::string report = suite + "\\report.exe";
    const std::string principal =
        g % 3 == 0 ? "NT AUTHORITY\\SYSTEM" : g % 3 == 1 ? "DESKTOP\\user1" : "";
    const std::int64_t pr = c.base_pid, pa = c.base_pid + 1;
    const std::int64_t pb = c.base_pid + 2, pc = c.base_pid + 3;
    static const char* kFileActions[3] = {"open", "read", "write"};
    int step = 0;
    if (!sink.push(start_event(c, step++, pa, pr, agent, root_img, principal, std::nullopt)))
        return;
    if (!sink.push(start_event(c, step++, pb, pa, sync, agent, principal, std::nullopt))) return;
    if (!sink.push(start_event(c, step++, pc, pa, report, agent, principal, std::nullopt)))
        return;
    // At least two full passes over each file set, so the node set is fixed
    // per template and only the edge weights move.
    const int na = 8 + static_cast<int>(rng() % 5);
    const int nb = 6 + static_cast<int>(rng() % 4);
    const int nc = 2 + static_cast<int>(rng() % 3);
    for (int j = 0; j < na; ++j) {
        const std::string path = data_dir + "\\data" + std::to_string(j % 4) + ".log";
        if (!sink.push(file_event(c, step++, pa, pr, agent, path, kFileActions[j % 3],
                                  std::nullopt)))
            return;
    }
    for (int j = 0; j < nb; ++j) {
        const std::string path = data_dir + "\\state" + std::to_string(j % 3) + ".db";
        if (!sink.push(file_event(c, step++, pb, pa, sync, path, kFileActions[j % 3],
                                  std::nullopt)))
            return;
    }
    const std::string tmp = "C:\\Windows\\Temp\\suite" + std::to_string(g) + ".tmp";
    for (int j = 0; j < nc; ++j) {
        if (!sink.push(file_event(c, step++, pc, pa, report, tmp, "write", std::nullopt))) return;
    }
}

// Explorer spawning powershell spawning a dropped binary that writes staging
// files and sweeps the victim's documents. Every event carries label 1.
void attack_instance(const InstanceCtx& c, std::size_t attack_no, EventSink& sink) {
    const std::string ps = "C:\\Windows\\System32\\WindowsPowerShell\\v1.0\\powershell.exe";
    const std::string mal =
        "C:\\Users\\victim\\AppData\\Local\\Temp\\mal" + std::to_string(attack_no) + ".exe";
    const std::int64_t pr = c.base_pid, pa = c.base_pid + 1, pm = c.base_pid + 2;
    int step = 0;
    if (!sink.push(start_event(c, step++, pa, pr, ps, "C:\\Windows\\explorer.exe",
                               "DESKTOP\\user1", 1)))
        return;
    if (!sink.push(start_event(c, step++, pm, pa, mal, ps, "DESKTOP\\user1", 1))) return;
    for (int j = 0; j < 6; ++j) {
        const std::string path = "C:\\Users\\victim\\AppData\\Local\\Temp\\drop" +
                                 std::to_string(attack_no) + "_" + std::to_string(j) + ".bin";
        if (!sink.push(file_event(c, step++, pm, pa, mal, path, "write", 1))) return;
    }
    for (int j = 0; j < 10; ++j) {
        const std::string path = "C:\\Users\\victim\\Documents\\doc" + std::to_string(j) + ".docx";
        if (!sink.push(file_event(c, step++, pm, pa, mal, path, "read", 1))) return;
    }
    for (int j = 0; j < 2; ++j) {
        if (!sink.push(file_event(c, step++, pa, pr, ps,
                                  "C:\\Users\\victim\\AppData\\Roaming\\ps_history.txt", "write",
                                  1)))
            return;
    }
}

}  // namespace

std::size_t synth_event_log(std::uint64_t seed, std::size_t event_count, std::ostream& out) {
    std::mt19937_64 rng(seed);
    EventSink sink{out, event_count};
    std::array<std::int64_t, 4> next_pid{1000, 1000, 1000, 1000};
    const std::int64_t base_us = parse_timestamp("2026-01-05T00:00:00Z");
    std::size_t attack_no = 0;
    for (std::size_t inst = 0; sink.written < event_count; ++inst) {
        InstanceCtx c;
        c.h = static_cast<int>(inst % 4);
        c.hostname = std::string("host") + static_cast<char>('A' + c.h);
        c.inst = inst;
        c.base_pid = next_pid[static_cast<std::size_t>(c.h)];
        next_pid[static_cast<std::size_t>(c.h)] += 16;
        // 200 instances per UTC day, rotating through seven days. Instances
        // spread 400 s apart inside a day; when the rotation wraps, a small
        // microsecond skew keeps timestamps distinct per host.
        const std::int64_t day = static_cast<std::int64_t>((inst / 200) % 7);
        c.t0 = base_us + day * 86400000000LL +
               static_cast<std::int64_t>(inst % 200) * 400000000LL +
               static_cast<std::int64_t>(inst / 1400) * 1000LL;
        if (inst % 400 == 7) {
            attack_instance(c, attack_no++, sink);
        } else {
            benign_instance(c, static_cast<int>(inst % 6), rng, sink);
        }
    }
    out.flush();
    return sink.written;
}

}  // namespace taptree
