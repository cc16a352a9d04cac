import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import (make_sentence, oracle_source, random_alignment, random_bitext_item, random_heads,
                        random_sentence, sentences)
from oracles import brute_is_tree, oracle_collapse_all_orders, oracle_project, renumbered
from treeproj.alignment import SentenceAlignment
from treeproj.conllu import DepSentence, Token, Treebank, validate
from treeproj.projection import (ProjectionConfig, ProjectionError, ProjectionMode, collapse_dummy_rewrite,
                                 project_corpus, project_sentence, remove_dummy_sentences,
                                 resolve_many_to_one)

RAW = ProjectionConfig(mode="raw")
COLLAPSE = ProjectionConfig(mode="collapse_dummy")
NODUMMY = ProjectionConfig(mode="no_dummy")


def he_runs():
    return DepSentence((
        Token(1, "He", "he", "PRON", "_", {"Case": "Nom"}, 2, "nsubj"),
        Token(2, "runs", "run", "VERB", "_", {"Tense": "Pres"}, 0, "root"),
    ), "s1")


def links(*pairs):
    return SentenceAlignment(frozenset(pairs))


def rows(sent):
    return [t.to_line().split("\t") for t in sent.tokens]


def test_identity_projection():
    out = project_sentence(he_runs(), ["Han", "springer"], SentenceAlignment.identity(2), RAW)
    assert out.heads == [2, 0]
    assert out.deprels == ["nsubj", "root"]
    assert out.forms == ["Han", "springer"]
    assert out.n_dummies == 0
    assert out.tokens[0].upos == "PRON" and out.tokens[0].feats == (("Case", "Nom"),)
    assert out.sent_id == "s1"
    assert out.comments == ("text = Han springer",)


def test_one_to_many_creates_governing_dummy():
    # root verb aligned to targets 2 and 3, its subject to target 1
    out = project_sentence(he_runs(), ["a", "b", "c"], links((1, 1), (2, 2), (2, 3)), RAW)
    d = out.tokens[0]
    assert d.is_dummy and d.head == 0 and d.deprel == "root" and d.upos == "X" and d.lemma == "_"
    assert [(t.form, t.head, t.deprel) for t in out.tokens[1:]] == [
        ("a", 1, "nsubj"), ("b", 1, "dummy"), ("c", 1, "dummy")]
    assert validate(out) == []


def test_one_to_many_custom_dummy_label():
    cfg = ProjectionConfig(mode="raw", dummy_deprel="flat")
    out = project_sentence(he_runs(), ["a", "b", "c"], links((1, 1), (2, 2), (2, 3)), cfg)
    assert out.deprels == ["root", "nsubj", "flat", "flat"]


def test_many_to_one_keeps_highest_source():
    # 3-token chain 1 <- 2 <- 3 (3 is root); both target tokens see every source
    src = make_sentence([2, 3, 0], deprels=["amod", "nsubj", "root"])
    out = project_sentence(src, ["x", "y"], links((1, 1), (2, 1), (3, 2), (2, 2)), RAW)
    # many-to-many group: x keeps s1 (closest), y keeps s2 (closest); then s3 has no
    # link and becomes a dummy root
    expected = oracle_project(oracle_source(src), ["x", "y"], {(1, 1), (2, 1), (3, 2), (2, 2)})
    assert rows(out) == [list(r) for r in expected]


def test_many_to_one_depth_rule():
    src = make_sentence([2, 0, 2], deprels=["nsubj", "root", "obj"])
    # target 1 aligned to source 1 (depth 2) and source 2 (depth 1): source 2 wins
    kept = resolve_many_to_one({(1, 1), (2, 1)}, src.heads)
    assert kept == {(2, 1)}
    # equal depth: leftmost wins
    assert resolve_many_to_one({(3, 1), (1, 1)}, src.heads) == {(1, 1)}


def test_many_to_one_loser_becomes_dummy_leaf():
    src = make_sentence([2, 0, 2], deprels=["nsubj", "root", "obj"])
    out = project_sentence(src, ["x", "y"], links((1, 1), (2, 1), (3, 2)), RAW)
    # x is the root (image of source 2); the dummy for source 1 hangs from it
    assert [(t.form, t.head, t.deprel, t.is_dummy) for t in out.tokens] == [
        ("x", 0, "root", False), ("y", 1, "obj", False), ("<DUMMY>", 1, "nsubj", True)]
    collapsed = project_sentence(src, ["x", "y"], links((1, 1), (2, 1), (3, 2)), COLLAPSE)
    assert collapsed.heads == [0, 1] and collapsed.n_dummies == 0


def test_unaligned_source_with_dependents_takes_its_relations():
    # det -> noun -> verb; noun unaligned
    src = make_sentence([2, 3, 0], deprels=["det", "obj", "root"])
    out = project_sentence(src, ["the", "sees"], links((1, 1), (3, 2)), RAW)
    dummy = next(t for t in out.tokens if t.is_dummy)
    assert dummy.deprel == "obj"
    assert out.tokens[dummy.head - 1].form == "sees"
    the = next(t for t in out.tokens if t.form == "the")
    assert the.head == dummy.id and the.deprel == "det"
    # dummy is placed right before the leftmost target it dominates
    assert dummy.id == the.id - 1
    # collapsing splices it out: "the" takes over head and relation
    col = collapse_dummy_rewrite(out)
    assert [(t.form, t.head, t.deprel) for t in col.tokens] == [("the", 2, "obj"), ("sees", 0, "root")]


def test_unaligned_target_attach_nearest_and_root():
    src = he_runs()
    tgt = ["he", "runs", "fast"]
    out = project_sentence(src, tgt, links((1, 1), (2, 2)), RAW)
    # nearest aligned neighbour is "runs", the root: attach to it
    assert [(t.head, t.deprel) for t in out.tokens] == [(2, "nsubj"), (0, "root"), (2, "dep")]
    assert out.tokens[2].upos == "X"
    out = project_sentence(src, ["well", "he", "runs"], links((1, 2), (2, 3)), RAW)
    # nearest aligned is "he" (right neighbour), whose head is "runs"
    assert out.tokens[0].head == 3
    cfg = ProjectionConfig(mode="raw", unaligned_target_policy="attach_root")
    out = project_sentence(src, ["well", "he", "runs"], links((1, 2), (2, 3)), cfg)
    assert out.tokens[0].head == 3 and out.tokens[0].deprel == "dep"


def test_unaligned_target_prefers_left_neighbour_on_tie():
    src = make_sentence([0, 1, 1], deprels=["root", "obj", "obl"])
    out = project_sentence(src, ["a", "b", "c"], links((1, 1), (2, 1), (3, 3)), RAW)
    # b is unaligned; a (left) and c (right) are both at distance 1; a is root -> attach to a
    b = out.tokens[[t.form for t in out.tokens].index("b")]
    assert out.tokens[b.head - 1].form == "a"


def test_empty_alignment_everything_hangs_from_dummy_root():
    out = project_sentence(he_runs(), ["x", "y"], SentenceAlignment(), RAW)
    assert validate(out) == []
    assert out.n_dummies == 2
    col = project_sentence(he_runs(), ["x", "y"], SentenceAlignment(), COLLAPSE)
    assert validate(col) == []
    # the subject dummy is a leaf and goes; the root dummy still governs both targets
    assert col.n_dummies == 1 and col.tokens[0].is_dummy and col.heads == [0, 1, 1]
    assert project_sentence(he_runs(), ["x", "y"], SentenceAlignment(), NODUMMY) is None


def test_invalid_inputs():
    with pytest.raises(ProjectionError):
        project_sentence(he_runs(), [], SentenceAlignment())
    with pytest.raises(ProjectionError):
        project_sentence(he_runs(), ["a"], links((1, 2)))
    with pytest.raises(ProjectionError):
        project_sentence(make_sentence([0, 0]), ["a"], SentenceAlignment())


def test_mode_aliases():
    assert ProjectionMode.coerce("nodummy") is ProjectionMode.NO_DUMMY
    assert ProjectionMode.coerce("collapse") is ProjectionMode.COLLAPSE_DUMMY
    with pytest.raises(ValueError):
        ProjectionMode.coerce("bogus")
    with pytest.raises(ValueError):
        ProjectionConfig(unaligned_target_policy="attach_left")


# -- oracle equivalence ---------------------------------------------------------

FIXED_TREES = [[0], [2, 0], [0, 1], [2, 0, 2], [2, 3, 0]]


def _src(heads):
    return make_sentence(heads, random.Random(len(heads)), deprels=["nsubj", "obj", "obl"])


@pytest.mark.parametrize("heads", FIXED_TREES)
def test_raw_projection_matches_oracle_exhaustively(heads):
    src = _src(heads)
    for nt in range(1, 4):
        tgt = [f"t{j}" for j in range(1, nt + 1)]
        cells = [(s, t) for s in range(1, len(heads) + 1) for t in range(1, nt + 1)]
        for mask in range(1 << len(cells)):
            al = frozenset(c for k, c in enumerate(cells) if mask >> k & 1)
            got = project_sentence(src, tgt, SentenceAlignment(al), RAW)
            assert rows(got) == [list(r) for r in oracle_project(oracle_source(src), tgt, al)], al


def test_collapse_mode_matches_oracle_collapse():
    rng = random.Random(5)
    for _ in range(300):
        src, tgt, al = random_bitext_item(rng, 5)
        raw = oracle_project(oracle_source(src), tgt, al.links)
        finals = oracle_collapse_all_orders([int(r[6]) for r in raw], [r[7] for r in raw],
                                            [r[1] == "<DUMMY>" for r in raw])
        assert len(finals) == 1
        heads, rels, kept = renumbered(finals.pop())
        got = project_sentence(src, tgt, al, COLLAPSE)
        assert got.heads == heads and got.deprels == rels
        assert got.forms == [raw[k - 1][1] for k in kept]


# -- collapse -------------------------------------------------------------------

def test_collapse_identity_without_dummies():
    s = make_sentence([2, 0, 2])
    assert collapse_dummy_rewrite(s) is s


def test_collapse_root_dummy_single_daughter():
    s = DepSentence((Token.dummy(1, 0, "root"), Token(2, "x", head=1, deprel="dummy")))
    out = collapse_dummy_rewrite(s)
    assert [(t.form, t.head, t.deprel) for t in out.tokens] == [("x", 0, "root")]


def test_collapse_stacked_dummies():
    s = DepSentence((Token(1, "v", head=0, deprel="root"), Token.dummy(2, 1, "obj"),
                     Token.dummy(3, 2, "dummy"), Token(4, "n", head=3, deprel="dummy")))
    out = collapse_dummy_rewrite(s)
    assert [(t.form, t.head, t.deprel) for t in out.tokens] == [("v", 0, "root"), ("n", 1, "obj")]


def test_collapse_keeps_branching_dummy():
    s = DepSentence((Token.dummy(1, 0, "root"), Token(2, "a", head=1, deprel="dummy"),
                     Token(3, "b", head=1, deprel="dummy"), Token.dummy(4, 1, "obj")))
    out = collapse_dummy_rewrite(s)
    assert out.n_dummies == 1 and len(out) == 3


def test_collapse_lone_dummy_sentence_is_kept():
    s = DepSentence((Token.dummy(1, 0, "root"),))
    assert collapse_dummy_rewrite(s) == s


def _dummy_leaf_or_single(sent):
    kids = {t.id: 0 for t in sent.tokens}
    for t in sent.tokens:
        if t.head:
            kids[t.head] += 1
    return [t.id for t in sent.tokens if t.is_dummy and t.head != 0 and kids[t.id] == 0] + \
           [t.id for t in sent.tokens if t.is_dummy and kids[t.id] == 1]


@settings(max_examples=300, deadline=None)
@given(sentences(max_size=9, with_dummies=True))
def test_collapse_properties(sent):
    once = collapse_dummy_rewrite(sent)
    assert validate(once) == []
    assert collapse_dummy_rewrite(once) == once
    assert _dummy_leaf_or_single(once) == []
    # non-dummy tokens survive in order
    assert [t.form for t in once.tokens if not t.is_dummy] == [t.form for t in sent.tokens if not t.is_dummy]


@settings(max_examples=300, deadline=None)
@given(sentences(max_size=9, with_dummies=True))
def test_collapse_leaves_dummy_free_paths_alone(sent):
    heads = sent.heads
    is_dummy = [t.is_dummy for t in sent.tokens]

    def clean_path(i):
        node = heads[i - 1]
        while node:
            if is_dummy[node - 1]:
                return False
            node = heads[node - 1]
        return True

    out = collapse_dummy_rewrite(sent)
    # map old non-dummy ids to new ids via order
    old_real = [t.id for t in sent.tokens if not t.is_dummy]
    new_real = [t.id for t in out.tokens if not t.is_dummy]
    new_of = dict(zip(old_real, new_real))
    new_of[0] = 0
    for t in sent.tokens:
        if not t.is_dummy and clean_path(t.id):
            nt = out.tokens[new_of[t.id] - 1]
            assert nt.deprel == t.deprel
            assert nt.head == new_of[t.head]


# -- invariants over generated inputs ---------------------------------------------

def test_projection_always_valid():
    rng = random.Random(1)
    for _ in range(2000):
        src, tgt, al = random_bitext_item(rng)
        for cfg in (RAW, COLLAPSE, NODUMMY):
            out = project_sentence(src, tgt, al, cfg)
            if out is None:
                assert cfg is NODUMMY
                continue
            assert validate(out) == []
            assert [t.form for t in out.tokens if not t.is_dummy] == tgt
            if cfg is NODUMMY:
                assert out.n_dummies == 0


@given(st.integers(1, 12), st.randoms(use_true_random=False))
def test_identity_alignment_is_isomorphic(n, rnd):
    src = random_sentence(random.Random(rnd.random()), n)
    tgt = [f"w{i}" for i in range(n)]
    for cfg in (RAW, COLLAPSE, NODUMMY):
        out = project_sentence(src, tgt, SentenceAlignment.identity(n), cfg)
        assert out.heads == src.heads and out.deprels == src.deprels


# -- corpus ---------------------------------------------------------------------

def test_project_corpus_identity():
    src = [he_runs()] * 3
    tb, stats = project_corpus(src, [["a", "b"]] * 3, [SentenceAlignment.identity(2)] * 3)
    assert len(tb) == 3
    assert stats.dummies_created == 0 and stats.sentences_out == 3 and stats.discarded == 0


def test_project_corpus_no_dummy_discards():
    src = [he_runs()] * 3
    al = [SentenceAlignment.identity(2), links((1, 1), (2, 2), (2, 3)), SentenceAlignment.identity(2)]
    tgt = [["a", "b"], ["a", "b", "c"], ["a", "b"]]
    tb, stats = project_corpus(src, tgt, al, NODUMMY)
    assert len(tb) == 2 and stats.discarded == 1 and stats.sentences_in == 3


def test_project_corpus_length_mismatch():
    with pytest.raises(ProjectionError, match="length mismatch"):
        project_corpus([he_runs()], [], [])


def test_project_corpus_skips_empty_targets():
    tb, stats = project_corpus([he_runs(), he_runs()], [[], ["a", "b"]], [SentenceAlignment()] * 2)
    assert len(tb) == 1 and stats.empty_targets == 1


def test_project_corpus_stats_match_recount():
    rng = random.Random(8)
    items = [random_bitext_item(rng) for _ in range(100)]
    src, tgt, al = zip(*items)
    for cfg in (RAW, COLLAPSE, NODUMMY):
        tb, stats = project_corpus(src, tgt, al, cfg, chunk_size=7)
        created = collapsed = discarded = 0
        out = []
        for s, t, a in items:
            raw = oracle_project(oracle_source(s), t, a.links)
            n_raw = sum(r[1] == "<DUMMY>" for r in raw)
            created += n_raw
            if cfg is RAW:
                out.append(raw)
                continue
            (final,) = oracle_collapse_all_orders([int(r[6]) for r in raw], [r[7] for r in raw],
                                                  [r[1] == "<DUMMY>" for r in raw])
            left = sum(raw[k - 1][1] == "<DUMMY>" for k in final[0])
            collapsed += n_raw - left
            if cfg is NODUMMY and left:
                discarded += 1
            else:
                out.append(final)
        assert (stats.dummies_created, stats.dummies_collapsed, stats.discarded) == (created, collapsed, discarded)
        assert stats.sentences_out == len(tb) == len(out) == 100 - discarded


def test_project_corpus_parallel_matches_serial():
    rng = random.Random(9)
    items = [random_bitext_item(rng) for _ in range(60)]
    src, tgt, al = zip(*items)
    serial, s1 = project_corpus(src, tgt, al, COLLAPSE)
    parallel, s2 = project_corpus(src, tgt, al, COLLAPSE, threads=2, chunk_size=10)
    assert serial == parallel and s1 == s2


def test_remove_dummy_sentences():
    keep = make_sentence([2, 0])
    drop = DepSentence((Token.dummy(1, 0, "root"), Token(2, "a", head=1, deprel="dummy"),
                        Token(3, "b", head=1, deprel="dummy")))
    tb, dropped = remove_dummy_sentences(Treebank([keep, drop, keep]))
    assert dropped == 1 and len(tb) == 2


def test_random_trees_are_trees():
    rng = random.Random(0)
    for n in range(1, 12):
        assert brute_is_tree(random_heads(rng, n))
        al = random_alignment(rng, n, n)
        assert all(1 <= s <= n for s, _ in al.links)
