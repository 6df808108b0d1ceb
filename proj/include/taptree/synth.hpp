#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "taptree/seqmine.hpp"
#include "taptree/tree.hpp"

namespace taptree {

// Deterministic synthetic corpora: same seed, same output, on every platform.
// Benchmarks, the acceptance checks and the CLI demo all lean on that.

// Forest drawn from a fixed catalog of 25 host-behavior templates with 6
// variants each. The first 150 trees enumerate every (template, variant) cell
// once, the rest are seeded draws, so any count >= 150 exercises the whole
// catalog. Variants repeat leaf siblings and truncate subtrees in ways the
// clustering and semantic stages are supposed to collapse.
std::vector<TaskTree> synth_baseline_corpus(std::uint64_t seed, std::size_t count);

// Labeled trees that start like a catalog template and then veer off into a
// payload chain the catalog never contains. The share of novel nodes comes in
// three steps (roughly half, a third and a sixth of the tree), so a threshold
// sweep over {0.5, 0.7, 0.9} separates the groups.
std::vector<TaskTree> synth_anomalous_trees(std::size_t count);

// Benign traces cycle through ten six-step service bodies. Each malicious
// tree replays one body and appends one of three attack tails, ten traces per
// tree; the last malicious tree omits the tail, so it reads exactly like
// benign activity and bounds what tail-based features can catch.
std::vector<Trace> synth_trace_set(std::size_t benign_count, std::size_t malicious_trees);

// JSONL audit log across four hosts and seven days, roughly 25 events per
// process-tree instance, with one tagged attack instance per 400. Returns the
// number of lines written, which is always exactly event_count (the last
// instance is cut off mid-flight if needed).
std::size_t synth_event_log(std::uint64_t seed, std::size_t event_count, std::ostream& out);

}  // namespace taptree
