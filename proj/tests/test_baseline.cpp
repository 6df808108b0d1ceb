#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "taptree/baseline.hpp"
#include "taptree/errors.hpp"
#include "taptree/synth.hpp"
#include "taptree/tree.hpp"

using namespace taptree;

namespace {

// A→B→C chain with the given edge weights, nodes named by single labels.
TaskTree chain(const char* id, std::vector<std::pair<std::string, std::uint64_t>> links,
               const std::string& root) {
    TaskTree t;
    t.tree_id = id;
    int at = t.add_root(root);
    for (auto& [label, w] : links) at = t.add_child(at, label, w);
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("baseline");

TEST_CASE("structural identity ignores weights and sibling order") {
    TaskTree a;
    a.add_root("A");
    a.add_child(0, "B", 2);
    a.add_child(0, "C", 9);

    TaskTree b;
    b.add_root("A");
    b.add_child(0, "C", 1);
    b.add_child(0, "B", 1);

    CHECK(structural_identity(a) == structural_identity(b));

    TaskTree c = chain("c", {{"B", 1}, {"C", 1}}, "A");  // A→B→C: different edges
    CHECK(structural_identity(a) != structural_identity(c));

    // length encoding keeps label concatenations apart
    TaskTree d1 = chain("d1", {{"BC", 1}}, "A");
    TaskTree d2 = chain("d2", {{"C", 1}}, "AB");
    CHECK(structural_identity(d1) != structural_identity(d2));
}

TEST_CASE("temporal set folds duplicate shapes, max by default") {
    std::vector<TaskTree> in = {chain("t1", {{"B", 2}}, "A"), chain("t2", {{"B", 5}}, "A")};
    BaselineModel m = temporal_tree_set(in);
    REQUIRE(m.trees.size() == 1);
    CHECK(m.trees[0].tree_id == "t1");  // representative keeps the first id
    CHECK(m.trees[0].nodes[1].weight == 5);
    CHECK(m.build_stats.input_count == 2);
    CHECK(m.build_stats.output_count == 1);
    CHECK(m.provenance.at("t1") == std::vector<std::string>{"t1", "t2"});

    BaselineModel s = temporal_tree_set(in, WeightMerge::SUM);
    CHECK(s.trees[0].nodes[1].weight == 7);
}

TEST_CASE("weight folding walks identical shapes positionally") {
    TaskTree a;
    a.add_root("A");
    a.add_child(0, "B", 2);
    a.add_child(0, "B", 3);

    TaskTree b;
    b.tree_id = "b";
    b.add_root("A");
    b.add_child(0, "B", 10);
    b.add_child(0, "B", 1);

    BaselineModel m = temporal_tree_set({a, b});
    REQUIRE(m.trees.size() == 1);
    CHECK(m.trees[0].nodes[1].weight == 10);  // max(2, 10)
    CHECK(m.trees[0].nodes[2].weight == 3);   // max(3, 1)
}

TEST_CASE("weight folding falls back to label pairs across sibling orders") {
    TaskTree a;
    a.tree_id = "a";
    a.add_root("A");
    a.add_child(0, "B", 2);
    a.add_child(0, "C", 7);

    TaskTree b;
    b.tree_id = "b";
    b.add_root("A");
    b.add_child(0, "C", 9);
    b.add_child(0, "B", 1);

    BaselineModel m = temporal_tree_set({a, b});
    REQUIRE(m.trees.size() == 1);
    const TaskTree& t = m.trees[0];
    CHECK(t.nodes[static_cast<std::size_t>(t.find_child(0, "B"))].weight == 2);  // max(2, 1)
    CHECK(t.nodes[static_cast<std::size_t>(t.find_child(0, "C"))].weight == 9);  // max(7, 9)
}

TEST_CASE("cluster_tree merges duplicate leaf siblings only") {
    TaskTree t;
    t.tree_id = "t";
    t.add_root("P");
    t.add_child(0, "X", 2);
    t.add_child(0, "X", 2);
    t.add_child(0, "X", 4);
    t.add_child(0, "Y", 1);

    TaskTree c = cluster_tree(t);
    CHECK(c.node_count() == 3);  // P, one X, Y
    const int x = c.find_child(0, "X");
    CHECK(c.nodes[static_cast<std::size_t>(x)].weight == 4);  // max(2, 2, 4)
    CHECK(c.nodes[0].children.size() == 2);
    CHECK(c.nodes[static_cast<std::size_t>(c.nodes[0].children[0])].label == "X");

    TaskTree s = cluster_tree(t, WeightMerge::SUM);
    CHECK(s.nodes[static_cast<std::size_t>(s.find_child(0, "X"))].weight == 8);

    // internal duplicates are kept: the X nodes here have children
    TaskTree u;
    u.add_root("P");
    const int x1 = u.add_child(0, "X", 1);
    const int x2 = u.add_child(0, "X", 1);
    u.add_child(x1, "Y", 1);
    u.add_child(x2, "Z", 1);
    CHECK(cluster_tree(u).node_count() == 5);

    // idempotent
    CHECK(cluster_tree(c) == c);
}

TEST_CASE("cluster_model re-deduplicates collapsed shapes") {
    TaskTree a;
    a.tree_id = "a";
    a.add_root("A");
    a.add_child(0, "X", 1);
    a.add_child(0, "X", 3);

    TaskTree b = chain("b", {{"X", 2}}, "A");

    BaselineModel temporal = temporal_tree_set({a, b});
    REQUIRE(temporal.trees.size() == 2);  // different identities before clustering

    BaselineModel clustered = cluster_model(temporal);
    REQUIRE(clustered.trees.size() == 1);
    CHECK(clustered.stage == Stage::CLUSTERED);
    CHECK(clustered.trees[0].nodes[1].weight == 3);  // max(max(1,3), 2)
    CHECK(clustered.provenance.at("a") == std::vector<std::string>{"a", "b"});

    CHECK_THROWS_AS(cluster_model(clustered), StageError);  // wrong stage in
}

TEST_CASE("induced subtrees respect labels, edges and sibling order") {
    TaskTree host;
    host.add_root("A");
    const int b = host.add_child(0, "B", 1);
    host.add_child(0, "C", 1);
    host.add_child(b, "D", 1);

    CHECK(is_induced_subtree(chain("p", {{"B", 1}}, "A"), host).has_value());
    CHECK(is_induced_subtree(chain("p", {{"B", 9}}, "A"), host).has_value());  // weights free
    CHECK(is_induced_subtree(chain("p", {{"D", 1}}, "B"), host).has_value());  // anchored deep
    CHECK_FALSE(is_induced_subtree(chain("p", {{"D", 1}}, "A"), host).has_value());  // no hops

    TaskTree order;
    order.add_root("A");
    order.add_child(0, "C", 1);
    order.add_child(0, "B", 1);
    CHECK_FALSE(is_induced_subtree(order, host).has_value());  // C before B nowhere in host

    // the witness maps pattern ids to host ids consistently
    TaskTree p;
    p.add_root("A");
    p.add_child(0, "B", 1);
    auto w = is_induced_subtree(p, host);
    REQUIRE(w.has_value());
    CHECK(w->verified);
    CHECK(w->mapping.at(0) == 0);
    CHECK(w->mapping.at(1) == b);
}

TEST_CASE("induced subtree checks agree with the brute-force search") {
    std::mt19937_64 rng(411);
    int positives = 0;
    for (int i = 0; i < 300; ++i) {
        TaskTree small = oracles::random_tree(rng, 5, 3, 2);
        TaskTree big = oracles::random_tree(rng, 8, 3, 2);
        const bool lib = is_induced_subtree(small, big).has_value();
        CHECK(lib == oracles::induced_subtree_oracle(small, big));
        positives += lib ? 1 : 0;
    }
    CHECK(positives > 0);  // the generator must actually produce hits
}

TEST_CASE("merging grafts the guest at the host occurrence of its root") {
    // {A→B→C} with {A→B}: same root, B edges coincide
    TaskTree m1 = merge_trees(chain("x", {{"B", 2}, {"C", 1}}, "A"), chain("y", {{"B", 5}}, "A"));
    CHECK(m1.node_count() == 3);
    CHECK(m1.tree_id == "x");  // host id survives
    CHECK(m1.nodes[1].weight == 5);  // max(2, 5)

    // {A→B} with {B→C}: guest root B occurs inside the host
    TaskTree m2 = merge_trees(chain("x", {{"B", 2}}, "A"), chain("y", {{"C", 3}}, "B"));
    CHECK(m2.node_count() == 3);
    CHECK(m2.nodes[0].label == "A");
    const int bb = m2.find_child(0, "B");
    CHECK(m2.find_child(bb, "C") > 0);

    // novel children append after existing ones
    TaskTree host = chain("x", {{"B", 1}}, "A");
    TaskTree guest;
    guest.tree_id = "y";
    guest.add_root("A");
    guest.add_child(0, "Z", 4);
    TaskTree m3 = merge_trees(host, guest);
    REQUIRE(m3.nodes[0].children.size() == 2);
    CHECK(m3.nodes[static_cast<std::size_t>(m3.nodes[0].children[0])].label == "B");
    CHECK(m3.nodes[static_cast<std::size_t>(m3.nodes[0].children[1])].label == "Z");

    CHECK_THROWS_AS(merge_trees(chain("x", {{"B", 1}}, "A"), chain("y", {{"D", 1}}, "C")),
                    MergePreconditionError);
    CHECK_THROWS_AS(merge_trees(TaskTree{}, chain("y", {{"B", 1}}, "A")),
                    MergePreconditionError);
}

namespace {

BaselineModel clustered_of(std::vector<TaskTree> trees) {
    return cluster_model(temporal_tree_set(trees));
}

}  // namespace

TEST_CASE("semantic aggregation fuses the classic trio into one chain") {
    BaselineModel m = semantic_aggregate(clustered_of({
        chain("t1", {{"B", 1}, {"C", 1}}, "A"),
        chain("t2", {{"B", 2}}, "A"),
        chain("t3", {{"C", 3}}, "B"),
    }));
    REQUIRE(m.trees.size() == 1);
    const TaskTree& t = m.trees[0];
    CHECK(t.node_count() == 3);
    CHECK(t.nodes[0].label == "A");
    CHECK(m.build_stats.input_count == 3);
    // all three inputs are accounted for
    CHECK(m.provenance.at(t.tree_id).size() == 3);
}

TEST_CASE("semantic aggregation keeps unrelated trees apart") {
    BaselineModel m = semantic_aggregate(clustered_of({
        chain("t1", {{"B", 1}}, "A"),
        chain("t2", {{"D", 1}}, "C"),
    }));
    CHECK(m.trees.size() == 2);
}

TEST_CASE("semantic output is an antichain under embedding") {
    std::vector<TaskTree> corpus = synth_baseline_corpus(5, 400);
    BaselineModel m = build_baseline(corpus, Stage::SEMANTIC);
    for (std::size_t i = 0; i < m.trees.size(); ++i)
        for (std::size_t j = 0; j < m.trees.size(); ++j)
            if (i != j) CHECK_FALSE(is_induced_subtree(m.trees[i], m.trees[j]).has_value());
}

TEST_CASE("the stage chain strictly compresses the synthetic corpus") {
    std::vector<TaskTree> corpus = synth_baseline_corpus(1, 600);
    BaselineModel temporal = build_baseline(corpus, Stage::TEMPORAL_SET);
    BaselineModel clustered = build_baseline(corpus, Stage::CLUSTERED);
    BaselineModel semantic = build_baseline(corpus, Stage::SEMANTIC);
    CHECK(temporal.trees.size() == 150);  // 25 templates x 6 variants
    CHECK(clustered.trees.size() == 75);  // 3 shapes per template survive
    CHECK(semantic.trees.size() == 3);    // one tree per root image
    CHECK(temporal.build_stats.input_count == 600);
    CHECK(semantic.build_stats.input_count == 600);
    CHECK(semantic.build_stats.output_count == 3);

    CHECK_THROWS_AS(semantic_aggregate(temporal), StageError);
    CHECK_THROWS_AS(semantic_aggregate(semantic), StageError);
}

TEST_CASE("update_baseline folds one new tree into a semantic model") {
    BaselineModel m = semantic_aggregate(clustered_of({chain("t1", {{"B", 1}, {"C", 1}}, "A")}));

    // a known shape changes nothing but the bookkeeping
    BaselineModel same = update_baseline(m, chain("n1", {{"B", 4}}, "A"));
    REQUIRE(same.trees.size() == 1);
    CHECK(same.build_stats.input_count == m.build_stats.input_count + 1);
    CHECK(same.trees[0].nodes[1].weight == 4);  // absorbed with weight merge

    // a shape sharing the root merges in new structure
    TaskTree nt;
    nt.tree_id = "n2";
    nt.add_root("A");
    nt.add_child(0, "X", 2);
    BaselineModel grown = update_baseline(m, nt);
    REQUIRE(grown.trees.size() == 1);
    CHECK(grown.trees[0].has_label("X"));

    // an unrelated shape is appended
    BaselineModel appended = update_baseline(m, chain("n3", {{"Q", 1}}, "P"));
    CHECK(appended.trees.size() == 2);

    CHECK_THROWS_AS(update_baseline(clustered_of({chain("t", {{"B", 1}}, "A")}), nt),
                    StageError);
}

TEST_CASE("baseline stage names round-trip") {
    CHECK(stage_from("temporal") == Stage::TEMPORAL_SET);
    CHECK(stage_from("temporal_set") == Stage::TEMPORAL_SET);
    CHECK(stage_from(to_string(Stage::CLUSTERED)) == Stage::CLUSTERED);
    CHECK(stage_from(to_string(Stage::SEMANTIC)) == Stage::SEMANTIC);
    CHECK_THROWS_AS(stage_from("bogus"), FormatError);
    CHECK(weight_merge_from("sum") == WeightMerge::SUM);
    CHECK_THROWS_AS(weight_merge_from("avg"), FormatError);
}

TEST_SUITE_END();
