#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "taptree/errors.hpp"
#include "taptree/seqmine.hpp"

using namespace taptree;

namespace {

Sequence seq(std::initializer_list<std::vector<std::string>> sets) {
    Sequence s;
    for (const auto& is : sets) s.push_back(make_itemset(is));
    return s;
}

Trace trace_of(std::string id, Sequence s, int label = 0) {
    Trace t;
    t.trace_id = id;
    t.tree_id = id;
    t.items = std::move(s);
    t.label = label;
    return t;
}

SequentialPattern pattern_of(Sequence s, double support, double sb, double sm) {
    SequentialPattern p;
    p.items = std::move(s);
    p.n = 0;
    for (const ItemSet& is : p.items) p.n += static_cast<int>(is.size());
    p.support = support;
    p.sup_benign = sb;
    p.sup_malicious = sm;
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("seqmine");

TEST_CASE("make_itemset sorts and dedupes") {
    CHECK(make_itemset({"c", "a", "b", "a"}) == ItemSet{"a", "b", "c"});
    CHECK(make_itemset({}).empty());
}

TEST_CASE("contains handles subsets, order and repeats") {
    const Sequence big = seq({{"a", "b"}, {"c"}, {"a"}});
    CHECK(contains(big, seq({{"a"}, {"c"}})));
    CHECK(contains(big, seq({{"a", "b"}, {"a"}})));
    CHECK(contains(big, seq({})));  // empty pattern is everywhere
    CHECK_FALSE(contains(big, seq({{"c"}, {"b"}})));      // order matters
    CHECK_FALSE(contains(big, seq({{"a", "c"}})));        // no merged itemsets
    CHECK_FALSE(contains(seq({{"a"}}), seq({{"a"}, {"a"}})));
    // one big itemset serves one pattern itemset only
    CHECK_FALSE(contains(seq({{"a", "b"}}), seq({{"a"}, {"b"}})));
    CHECK(contains(seq({{"b"}, {"a"}, {"b"}, {"c"}}), seq({{"a"}, {"b"}})));
}

TEST_CASE("mining a toy set yields the expected frequent patterns") {
    const std::vector<Trace> traces = {
        trace_of("s0", seq({{"a"}, {"b"}, {"c"}})),
        trace_of("s1", seq({{"a"}, {"c"}})),
        trace_of("s2", seq({{"b"}, {"c"}})),
    };
    PatternSet ps = mine_patterns(traces, 0.6);
    CHECK(ps.n_sequences == 3);
    REQUIRE(ps.patterns.size() == 5);
    CHECK(ps.patterns[0].items == seq({{"a"}}));
    CHECK(ps.patterns[1].items == seq({{"b"}}));
    CHECK(ps.patterns[2].items == seq({{"c"}}));
    CHECK(ps.patterns[3].items == seq({{"a"}, {"c"}}));
    CHECK(ps.patterns[4].items == seq({{"b"}, {"c"}}));
    CHECK(ps.patterns[0].support == doctest::Approx(2.0 / 3.0));
    CHECK(ps.patterns[2].support == doctest::Approx(1.0));
    CHECK(ps.patterns[3].n == 2);
    // unlabeled traces count as benign
    CHECK(ps.patterns[2].sup_benign == doctest::Approx(1.0));
    CHECK(ps.patterns[2].sup_malicious == 0.0);

    auto maximal = maximal_patterns(ps.patterns);
    REQUIRE(maximal.size() == 2);
    CHECK(maximal[0].items == seq({{"a"}, {"c"}}));
    CHECK(maximal[1].items == seq({{"b"}, {"c"}}));
}

TEST_CASE("mining grows itemsets as well as steps") {
    const std::vector<Trace> traces = {
        trace_of("s0", seq({{"a", "b", "c"}})),
        trace_of("s1", seq({{"a", "b", "c"}})),
    };
    PatternSet ps = mine_patterns(traces, 0.6);
    REQUIRE(ps.patterns.size() == 7);  // every non-empty subset of {a,b,c}
    CHECK(ps.patterns[3].items == seq({{"a", "b"}}));
    CHECK(ps.patterns.back().items == seq({{"a", "b", "c"}}));
    CHECK(ps.patterns.back().support == doctest::Approx(1.0));
}

TEST_CASE("per-class supports use per-class denominators") {
    const std::vector<Trace> traces = {
        trace_of("b0", seq({{"x"}}), 0),
        trace_of("b1", seq({{"x"}, {"y"}}), 0),
        trace_of("b2", seq({{"y"}}), 0),
        trace_of("m0", seq({{"x"}, {"z"}}), 1),
    };
    PatternSet ps = mine_patterns(traces, 0.25);
    const SequentialPattern* px = nullptr;
    const SequentialPattern* pz = nullptr;
    for (const SequentialPattern& p : ps.patterns) {
        if (p.items == seq({{"x"}})) px = &p;
        if (p.items == seq({{"z"}})) pz = &p;
    }
    REQUIRE(px != nullptr);
    REQUIRE(pz != nullptr);
    CHECK(px->support == doctest::Approx(0.75));
    CHECK(px->sup_benign == doctest::Approx(2.0 / 3.0));
    CHECK(px->sup_malicious == doctest::Approx(1.0));
    CHECK(pz->sup_benign == 0.0);
    CHECK(pz->sup_malicious == doctest::Approx(1.0));
}

TEST_CASE("mining rejects empty input and bad thresholds") {
    CHECK_THROWS_AS(mine_patterns({}, 0.5), EmptyInputError);
    const std::vector<Trace> one = {trace_of("s", seq({{"a"}}))};
    CHECK_THROWS_AS(mine_patterns(one, 0.0), Error);
    CHECK_THROWS_AS(mine_patterns(one, -0.2), Error);
    CHECK_THROWS_AS(mine_patterns(one, 1.5), Error);
    CHECK_NOTHROW(mine_patterns(one, 1.0));
}

TEST_CASE("mining agrees with exhaustive enumeration") {
    std::mt19937_64 rng(7771);
    const double min_supports[] = {0.25, 0.4, 0.5, 0.75, 1.0};
    for (int round = 0; round < 200; ++round) {
        const auto traces = oracles::random_traces(rng, 6, 4, 4, 2);
        const double ms = min_supports[round % 5];
        const auto expected = oracles::mine_oracle(traces, ms);
        std::size_t nb = 0, nm = 0;
        for (const Trace& t : traces) (t.label == 1 ? nm : nb) += 1;

        PatternSet got = mine_patterns(traces, ms);
        REQUIRE(got.patterns.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            const auto& g = got.patterns[i];
            const auto& e = expected[i];
            REQUIRE(g.items == e.items);
            CHECK(g.support == doctest::Approx(static_cast<double>(e.count) /
                                               static_cast<double>(traces.size())));
            CHECK(g.sup_benign ==
                  doctest::Approx(nb ? static_cast<double>(e.count_benign) /
                                           static_cast<double>(nb)
                                     : 0.0));
            CHECK(g.sup_malicious ==
                  doctest::Approx(nm ? static_cast<double>(e.count_malicious) /
                                           static_cast<double>(nm)
                                     : 0.0));
        }
    }
}

TEST_CASE("feature selection keeps class-skewed frequent patterns") {
    FeatureParams params;
    params.min_support = 0.05;
    params.min_class_ratio = 2.0;
    params.n_sequences = 100;  // epsilon = 0.005

    const auto benign_heavy = pattern_of(seq({{"a"}}), 0.5, 0.8, 0.1);
    const auto balanced = pattern_of(seq({{"b"}}), 0.5, 0.5, 0.4);
    const auto malicious_only = pattern_of(seq({{"c"}}), 0.1, 0.0, 0.3);
    const auto rare = pattern_of(seq({{"d"}}), 0.01, 0.0, 0.9);

    auto kept = select_features({benign_heavy, balanced, malicious_only, rare}, params);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].items == benign_heavy.items);  // ratio 0.8/0.105
    CHECK(kept[1].items == malicious_only.items);  // ratio 0.3/0.005
}

TEST_CASE("feature selection folds a prefix into a close superpattern") {
    FeatureParams params;
    params.min_support = 0.0;
    params.min_class_ratio = 2.0;
    params.n_sequences = 100;

    // ratios 80 vs 76: within 10% of 80, so the contained pattern goes
    const auto small = pattern_of(seq({{"a"}}), 0.4, 0.0, 0.40);
    const auto large = pattern_of(seq({{"a"}, {"b"}}), 0.38, 0.0, 0.38);
    auto kept = select_features({small, large}, params);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].items == large.items);

    params.drop_redundant = false;
    CHECK(select_features({small, large}, params).size() == 2);
    params.drop_redundant = true;

    // ratios 80 vs 40 differ enough; both survive
    const auto far = pattern_of(seq({{"a"}, {"b"}}), 0.2, 0.0, 0.20);
    CHECK(select_features({small, far}, params).size() == 2);
}

TEST_CASE("training produces smoothed per-class feature rates") {
    const std::vector<Trace> traces = {
        trace_of("b0", seq({{"a"}}), 0),
        trace_of("b1", seq({{"a"}}), 0),
        trace_of("b2", seq({{"a"}, {"m"}}), 0),
        trace_of("m0", seq({{"m"}}), 1),
        trace_of("m1", seq({{"m"}, {"b"}}), 1),
    };
    const std::vector<SequentialPattern> features = {pattern_of(seq({{"m"}}), 0.6, 1.0 / 3, 1.0)};
    TraceClassifier clf = train_classifier(traces, features);
    CHECK(clf.prior_benign == doctest::Approx(0.6));
    CHECK(clf.prior_malicious == doctest::Approx(0.4));
    REQUIRE(clf.likelihoods.size() == 1);
    CHECK(clf.likelihoods[0][0] == doctest::Approx(0.4));   // (1+1)/(3+2)
    CHECK(clf.likelihoods[0][1] == doctest::Approx(0.75));  // (2+1)/(2+2)

    // posterior when the feature fires: 0.4*0.75 vs 0.6*0.4
    Classification hit = classify(trace_of("q", seq({{"m"}})), clf, 0.5);
    CHECK(hit.likelihood == doctest::Approx(0.3 / 0.54));
    CHECK(hit.label == 1);
    CHECK(classify(trace_of("q", seq({{"m"}})), clf, 0.6).label == 0);

    // and when it does not: 0.4*0.25 vs 0.6*0.6
    Classification miss = classify(trace_of("q", seq({{"q"}})), clf, 0.5);
    CHECK(miss.likelihood == doctest::Approx(0.1 / 0.46));
    CHECK(miss.label == 0);
}

TEST_CASE("training demands both classes and positive smoothing") {
    const std::vector<Trace> benign_only = {trace_of("b", seq({{"a"}}), 0)};
    CHECK_THROWS_AS(train_classifier(benign_only, {}), SingleClassError);
    CHECK_THROWS_AS(train_classifier({}, {}), SingleClassError);

    const std::vector<Trace> both = {trace_of("b", seq({{"a"}}), 0),
                                     trace_of("m", seq({{"z"}}), 1)};
    CHECK_THROWS_AS(train_classifier(both, {}, 0.0), Error);
    CHECK_THROWS_AS(train_classifier(both, {}, -1.0), Error);
    CHECK_NOTHROW(train_classifier(both, {}, 0.5));
}

TEST_CASE("path traces walk the tree leaf by leaf") {
    TaskTree t;
    t.tree_id = "T";
    t.label = 1;
    const int r = t.add_root("R");
    const int a = t.add_child(r, "A", 5);  // weight does not replicate items
    t.add_child(a, "L1");
    t.add_child(a, "L2");
    t.add_child(r, "B");

    auto traces = extract_traces(t);
    REQUIRE(traces.size() == 3);
    CHECK(traces[0].items == seq({{"R"}, {"A"}, {"L1"}}));
    CHECK(traces[1].items == seq({{"R"}, {"A"}, {"L2"}}));
    CHECK(traces[2].items == seq({{"R"}, {"B"}}));
    CHECK(traces[0].trace_id == "T#0");
    CHECK(traces[2].trace_id == "T#2");
    CHECK(traces[1].tree_id == "T");
    CHECK(traces[1].label == 1);

    TaskTree lone;
    lone.tree_id = "L";
    lone.add_root("only");
    auto single = extract_traces(std::vector<TaskTree>{t, lone});
    CHECK(single.size() == 4);
    CHECK(single.back().items == seq({{"only"}}));
    CHECK(extract_traces(TaskTree{}).empty());
}

TEST_CASE("noise is the share of items no pattern placement reaches") {
    const std::vector<SequentialPattern> base = {pattern_of(seq({{"a"}, {"b"}, {"c"}}), 1, 1, 0)};
    CHECK(noise_score(trace_of("t", seq({{"a"}, {"b"}, {"x"}, {"c"}})), base) ==
          doctest::Approx(0.25));
    CHECK(noise_score(trace_of("t", seq({{"a"}, {"b"}, {"c"}})), base) == doctest::Approx(0.0));
    // pattern does not embed at all: nothing is explained
    CHECK(noise_score(trace_of("t", seq({{"a"}, {"b"}})), base) == doctest::Approx(1.0));
    CHECK(noise_score(trace_of("t", Sequence{}), base) == 0.0);
    // alternative embeddings both count
    const std::vector<SequentialPattern> single = {pattern_of(seq({{"a"}}), 1, 1, 0)};
    CHECK(noise_score(trace_of("t", seq({{"a"}, {"a"}})), single) == doctest::Approx(0.0));
}

TEST_CASE("noise scoring agrees with embedding enumeration") {
    std::mt19937_64 rng(40424);
    for (int round = 0; round < 150; ++round) {
        const auto traces = oracles::random_traces(rng, 4, 5, 3, 2);
        std::vector<SequentialPattern> base;
        for (std::size_t i = 1; i < traces.size(); ++i)
            base.push_back(pattern_of(traces[i].items, 1.0, 1.0, 0.0));
        const double got = noise_score(traces[0], base);
        const double want = oracles::noise_oracle(traces[0], base);
        CHECK(got == doctest::Approx(want));
    }
}

TEST_SUITE_END();
