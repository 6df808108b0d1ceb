"""Exercises the python module end to end against known synthetic answers.

Runs as a plain script (ctest sets PYTHONPATH to the build tree); every check
is an assert, so any failure surfaces as a nonzero exit.
"""

import os
import tempfile

import taptree as tt


def test_event_round_trip():
    e = tt.AuditEvent()
    e.id = "e1"
    e.object = tt.ObjectKind.PROCESS
    e.action = "START"
    e.pid = 4
    e.ppid = 1
    e.image_path = "/bin/sh"
    e.parent_image_path = "/sbin/init"
    e.timestamp_us = tt.parse_timestamp("2026-01-05T08:00:00Z")
    e.host = "hostA"
    assert tt.parse_event(tt.serialize_event(e)) == e

    res = tt.load_events_text(tt.serialize_event(e) + "\n")
    assert res.total_lines == 1 and res.skipped == 0 and len(res.batches) == 1
    trees = tt.build_trees(res.batches[0])
    assert len(trees) == 1 and trees[0].node_count() == 2


def test_tree_matching():
    p = tt.TaskTree()
    p.tree_id = "p"
    root = p.add_root("a")
    p.add_child(root, "b", 2)

    t = tt.TaskTree()
    t.tree_id = "t"
    root = t.add_root("a")
    b = t.add_child(root, "b", 3)
    t.add_child(b, "c")

    assert tt.exact_match(p, t)
    res = tt.partial_match(p, t, tt.MatchParams())
    assert res.k == 2 and res.l == 2 and res.score == 1.0 and res.matched == [0, 1]


def test_baseline_stages():
    corpus = tt.synth_baseline_corpus(1, 300)
    assert len(corpus) == 300
    temporal = tt.build_baseline(corpus, tt.Stage.TEMPORAL_SET)
    clustered = tt.build_baseline(corpus, tt.Stage.CLUSTERED)
    semantic = tt.build_baseline(corpus, tt.Stage.SEMANTIC)
    assert (len(temporal.trees), len(clustered.trees), len(semantic.trees)) == (150, 75, 3)
    assert sum(len(v) for v in temporal.provenance.values()) == 300


def test_detection():
    corpus = tt.synth_baseline_corpus(2, 200)
    model = tt.build_baseline(corpus, tt.Stage.SEMANTIC)
    params = tt.MatchParams()
    for tree in model.trees:
        verdict = tt.detect(tree, model, params, True)
        assert verdict.best_score == 1.0 and not verdict.anomalous
    # corpus trees merged into a wider model tree lose some sibling ordering,
    # but still clear the default threshold comfortably
    for tree in corpus[0:150:6]:
        assert not tt.detect(tree, model, params, True).anomalous

    attack = tt.synth_anomalous_trees(4)[0]  # six-node payload chain
    verdict = tt.detect(attack, model, params, True)
    assert abs(verdict.best_score - 5 / 11) < 1e-12 and verdict.anomalous


def test_trace_classifier():
    traces = tt.synth_trace_set(40, 3)
    assert len(traces) == 70
    mined = tt.mine_patterns(traces, 0.05)
    fp = tt.FeatureParams()
    fp.min_support = 0.05
    fp.n_sequences = mined.n_sequences
    feats = tt.select_features(tt.maximal_patterns(mined.patterns), fp)
    clf = tt.train_classifier(traces, feats)

    tailed = [tr for tr in traces if tr.tree_id in ("mal/t000", "mal/t001")]
    stealth = [tr for tr in traces if tr.tree_id == "mal/t002"]
    assert len(tailed) == 20 and len(stealth) == 10
    assert all(tt.classify(tr, clf, 0.5).label == 1 for tr in tailed)
    # the tail-free tree reads like benign activity, so its posterior sits
    # well below the tailed ones
    assert (tt.classify(stealth[0], clf, 0.5).likelihood
            < tt.classify(tailed[0], clf, 0.5).likelihood)

    # benign bodies never replayed by a malicious tree stay clean
    quiet = [tr for tr in traces if tr.label == 0 and tr.items[0][0][3] in "3456789"]
    assert len(quiet) == 28
    assert all(tt.classify(tr, clf, 0.5).label == 0 for tr in quiet)
    assert 0.0 <= tt.noise_score(traces[0], feats) <= 1.0


def test_artifact_round_trip():
    corpus = tt.synth_baseline_corpus(3, 60)
    model = tt.build_baseline(corpus, tt.Stage.SEMANTIC)
    with tempfile.TemporaryDirectory() as d:
        fpath = os.path.join(d, "forest.json")
        mpath = os.path.join(d, "model.json")
        tt.save_forest(corpus, fpath)
        tt.save_model(model, mpath)
        again = tt.load_forest(fpath)
        assert len(again) == 60 and again[0] == corpus[0]
        back = tt.load_model(mpath)
        assert [t.tree_id for t in back.trees] == [t.tree_id for t in model.trees]

    try:
        tt.load_model(os.path.join("no", "such", "file.json"))
        raise SystemExit("IoError expected")
    except tt.IoError:
        pass


def test_error_mapping():
    corpus = tt.synth_baseline_corpus(4, 30)
    temporal = tt.build_baseline(corpus, tt.Stage.TEMPORAL_SET)
    try:
        tt.detect(corpus[0], temporal, tt.MatchParams())
        raise SystemExit("StageError expected")
    except tt.StageError:
        pass
    try:
        tt.mine_patterns([], 0.5)
        raise SystemExit("EmptyInputError expected")
    except tt.EmptyInputError:
        pass
    assert issubclass(tt.StageError, tt.Error)


def test_eval_bits():
    folds = tt.kfold_indices(10, 3, 7)
    assert sorted(i for f in folds for i in f) == list(range(10))
    cfg = tt.RunConfig()
    assert cfg.delta_grid == [0.5, 0.7, 0.9] and cfg.kfold == 10
    row = tt.make_row(0.5, 8, 2, 90, 0)
    assert row.tpr == 1.0 and row.precision == 0.8


def main():
    test_event_round_trip()
    test_tree_matching()
    test_baseline_stages()
    test_detection()
    test_trace_classifier()
    test_artifact_round_trip()
    test_error_mapping()
    test_eval_bits()
    print("smoke ok")


if __name__ == "__main__":
    main()
