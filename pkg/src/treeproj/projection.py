"""Dependency-tree projection through word alignments with dummy nodes.

Each source token gets exactly one image node in the target tree:

* aligned to one target token -> that token;
* aligned to several target tokens -> a dummy that governs all of them;
* unaligned -> a dummy standing in for it.

Images inherit the source token's relation to the image of its head, so the
projected tree is the source tree with some nodes replaced by dummies plus
the split target tokens hanging from their dummy.  Many-to-one links are
reduced beforehand by keeping the link of the source token closest to the
root.  :func:`collapse_dummy_rewrite` then removes dummy leaves and splices
out dummies with a single dependent.
"""
from __future__ import annotations

import enum
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace
from typing import Iterable, Sequence

from .alignment import SentenceAlignment, decompose_many_to_many
from .conllu import EMPTY, DepSentence, Token, Treebank, renumber, validate

log = logging.getLogger(__name__)


class ProjectionError(ValueError):
    pass


class ProjectionMode(str, enum.Enum):
    RAW = "raw"
    COLLAPSE_DUMMY = "collapse_dummy"
    NO_DUMMY = "no_dummy"

    @classmethod
    def coerce(cls, value: "str | ProjectionMode") -> "ProjectionMode":
        if isinstance(value, cls):
            return value
        aliases = {"collapse": cls.COLLAPSE_DUMMY, "collapsedummy": cls.COLLAPSE_DUMMY,
                   "nodummy": cls.NO_DUMMY}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown projection mode {value!r}") from None


UNALIGNED_POLICIES = ("attach_nearest", "attach_root")
UNALIGNED_DEPREL = "dep"


@dataclass(frozen=True)
class ProjectionConfig:
    mode: ProjectionMode = ProjectionMode.COLLAPSE_DUMMY
    dummy_deprel: str = "dummy"
    unaligned_target_policy: str = "attach_nearest"

    def __post_init__(self):
        object.__setattr__(self, "mode", ProjectionMode.coerce(self.mode))
        if self.unaligned_target_policy not in UNALIGNED_POLICIES:
            raise ValueError(f"unaligned_target_policy must be one of {UNALIGNED_POLICIES}, "
                             f"got {self.unaligned_target_policy!r}")


@dataclass
class ProjectionStats:
    sentences_in: int = 0
    sentences_out: int = 0
    dummies_created: int = 0
    dummies_collapsed: int = 0
    discarded: int = 0
    empty_targets: int = 0

    def __iadd__(self, other: "ProjectionStats") -> "ProjectionStats":
        for k, v in asdict(other).items():
            setattr(self, k, getattr(self, k) + v)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        return ("sentences in={sentences_in} out={sentences_out} discarded={discarded} "
                "empty_targets={empty_targets} dummies created={dummies_created} "
                "collapsed={dummies_collapsed}".format(**asdict(self)))


def _depths(heads: Sequence[int]) -> list[int]:
    """Distance from the root for 1-based tokens (root token has depth 1)."""
    n = len(heads)
    depth = [0] * (n + 1)
    for i in range(1, n + 1):
        path = []
        node = i
        while node and not depth[node]:
            path.append(node)
            node = heads[node - 1]
        d = depth[node] if node else 0
        for p in reversed(path):
            d += 1
            depth[p] = d
    return depth


def resolve_many_to_one(links: Iterable[tuple[int, int]], src_heads: Sequence[int]) -> set[tuple[int, int]]:
    """Keep, for every target aligned to several sources, only the highest source.

    "Highest" is smallest distance from the root; ties go to the leftmost
    source token.  An ancestor therefore always wins over its descendants.
    """
    depth = _depths(src_heads)
    best: dict[int, int] = {}
    for s, t in links:
        cur = best.get(t)
        if cur is None or (depth[s], s) < (depth[cur], cur):
            best[t] = s
    return {(s, t) for t, s in best.items()}


def _project(src: DepSentence, tgt_forms: Sequence[str], a: SentenceAlignment,
             cfg: ProjectionConfig) -> tuple[DepSentence | None, int, int]:
    problems = validate(src)
    if problems:
        raise ProjectionError(f"invalid source sentence {src.sent_id!r}: {problems[0].message}")
    ns, nt = len(src), len(tgt_forms)
    if nt == 0:
        raise ProjectionError("empty target sentence")
    for s, t in a.links:
        if s > ns or t > nt:
            raise ProjectionError(f"link {s}-{t} out of range for {ns}x{nt} sentence pair")

    src_heads = src.heads
    kept, _ = decompose_many_to_many(a.links)
    kept = resolve_many_to_one(kept, src_heads)

    targets_of: dict[int, list[int]] = defaultdict(list)
    source_of: dict[int, int] = {}
    for s, t in sorted(kept):
        targets_of[s].append(t)
        source_of[t] = s

    # nodes 1..nt are target tokens, nt + i is the dummy for source token i
    image = [0] * (ns + 1)
    for i in range(1, ns + 1):
        ts = targets_of.get(i, ())
        image[i] = ts[0] if len(ts) == 1 else nt + i
    head: dict[int, int] = {}
    deprel: dict[int, str] = {}
    root_node = 0
    for i, tok in enumerate(src.tokens, 1):
        node = image[i]
        head[node] = image[tok.head] if tok.head else 0
        deprel[node] = tok.deprel
        if tok.head == 0:
            root_node = node
        ts = targets_of.get(i, ())
        if len(ts) > 1:
            for t in ts:
                head[t] = node
                deprel[t] = cfg.dummy_deprel

    unaligned = [j for j in range(1, nt + 1) if j not in source_of]
    if unaligned:
        attach: dict[int, int] = {}
        if cfg.unaligned_target_policy == "attach_root" or len(unaligned) == nt:
            attach = {j: root_node for j in unaligned}
        else:
            for j in unaligned:
                for d in range(1, nt):
                    nb = next((k for k in (j - d, j + d) if 1 <= k <= nt and k in source_of), None)
                    if nb is not None:
                        attach[j] = head[nb] or nb
                        break
        for j in unaligned:
            head[j] = attach[j]
            deprel[j] = UNALIGNED_DEPREL

    dummies = [node for node in head if node > nt]
    order = _surface_order(head, nt, dummies)
    new_id = {node: k for k, node in enumerate(order, 1)}
    new_id[0] = 0

    tokens = []
    for node in order:
        if node > nt:
            tokens.append(Token.dummy(new_id[node], new_id[head[node]], deprel[node]))
            continue
        s = source_of.get(node)
        if s is None:
            lemma, upos, feats = EMPTY, "X", ()
        else:
            st = src.tokens[s - 1]
            lemma, upos, feats = st.lemma, st.upos, st.feats
        tokens.append(Token(new_id[node], tgt_forms[node - 1], lemma, upos, EMPTY, feats,
                            new_id[head[node]], deprel[node]))
    out = DepSentence(tuple(tokens), src.sent_id, ("text = " + " ".join(tgt_forms),))

    created = len(dummies)
    collapsed = 0
    if cfg.mode is not ProjectionMode.RAW:
        out, collapsed = _collapse(out)
        if cfg.mode is ProjectionMode.NO_DUMMY and out.n_dummies:
            return None, created, collapsed
    return out, created, collapsed


def _surface_order(head: dict[int, int], nt: int, dummies: list[int]) -> list[int]:
    """Targets in order; each dummy just before the leftmost target it dominates."""
    if not dummies:
        return list(range(1, nt + 1))
    children: dict[int, list[int]] = defaultdict(list)
    for node, h in head.items():
        children[h].append(node)
    depth = {0: 0}
    leftmost: dict[int, int] = {}
    stack = [0]
    post = []
    while stack:
        node = stack.pop()
        post.append(node)
        for c in children.get(node, ()):
            depth[c] = depth[node] + 1
            stack.append(c)
    for node in reversed(post):
        m = node if 0 < node <= nt else nt + 1
        for c in children.get(node, ()):
            m = min(m, leftmost[c])
        leftmost[node] = m
    keyed = [((j, 1, 0, 0), j) for j in range(1, nt + 1)]
    keyed += [((leftmost[d], 0, depth[d], d), d) for d in dummies]
    keyed.sort()
    return [node for _, node in keyed]


def project_sentence(src: DepSentence, tgt_forms: Sequence[str], a: SentenceAlignment,
                     cfg: ProjectionConfig | None = None) -> DepSentence | None:
    """Project *src* onto *tgt_forms* through alignment *a*.

    Returns ``None`` when ``cfg.mode`` is ``no_dummy`` and dummies survive the
    collapse.  Output token attributes (lemma, UPOS, FEATS) are copied from
    the surviving source link; dummies and unaligned targets get UPOS ``X``.
    """
    return _project(src, tgt_forms, a, cfg or ProjectionConfig())[0]


def _collapse(sent: DepSentence) -> tuple[DepSentence, int]:
    toks = sent.tokens
    if not any(t.is_dummy for t in toks):
        return sent, 0
    head = {t.id: t.head for t in toks}
    deprel = {t.id: t.deprel for t in toks}
    children: dict[int, set[int]] = defaultdict(set)
    for t in toks:
        children[t.head].add(t.id)
    alive = {t.id: True for t in toks}
    dummy_ids = [t.id for t in toks if t.is_dummy]
    removed = 0
    changed = True
    while changed:
        changed = False
        for d in dummy_ids:
            if not alive[d]:
                continue
            kids = children[d]
            h = head[d]
            if not kids:
                if h == 0:
                    # a lone root dummy is the whole sentence
                    continue
                children[h].discard(d)
            elif len(kids) == 1:
                (c,) = kids
                head[c] = h
                deprel[c] = deprel[d]
                children[h].discard(d)
                children[h].add(c)
            else:
                continue
            alive[d] = False
            removed += 1
            changed = True
    if not removed:
        return sent, 0
    updated = [replace(t, head=head[t.id], deprel=deprel[t.id]) for t in toks]
    kept = renumber(updated, [alive[t.id] for t in toks])
    return replace(sent, tokens=kept), removed


def collapse_dummy_rewrite(sent: DepSentence) -> DepSentence:
    """Remove dummy leaves and splice out single-dependent dummies, to fixpoint.

    A spliced dummy's dependent takes over the dummy's head and relation.
    Non-dummy tokens keep their relative order; ids are renumbered.
    """
    return _collapse(sent)[0]


def remove_dummy_sentences(tb: Iterable[DepSentence]) -> tuple[Treebank, int]:
    """Collapse every sentence and drop those that still contain dummies."""
    out = []
    dropped = 0
    for sent in tb:
        sent = collapse_dummy_rewrite(sent)
        if sent.n_dummies:
            dropped += 1
        else:
            out.append(sent)
    return Treebank(out), dropped


def _project_chunk(args):
    items, cfg = args
    results = []
    for src, tgt, a in items:
        if not tgt:
            results.append((None, None))
            continue
        sent, created, collapsed = _project(src, tgt, a, cfg)
        results.append((sent, (created, collapsed)))
    return results


def project_corpus(src_tb: Iterable[DepSentence], tgt_text: Iterable[Sequence[str]],
                   align: Iterable[SentenceAlignment], cfg: ProjectionConfig | None = None,
                   threads: int = 1, chunk_size: int = 2000) -> tuple[Treebank, ProjectionStats]:
    """Project a whole bitext; sentence order is preserved.

    Empty target sentences are skipped and counted in ``empty_targets``.
    With ``threads > 1`` chunks are projected in worker processes
    (``threads=0`` uses one per CPU); output order does not depend on it.
    """
    if threads < 0:
        raise ValueError("threads must be >= 0")
    cfg = cfg or ProjectionConfig()
    src_l, tgt_l, al_l = list(src_tb), list(tgt_text), list(align)
    if not (len(src_l) == len(tgt_l) == len(al_l)):
        raise ProjectionError(
            f"stream length mismatch: {len(src_l)} source sentences, {len(tgt_l)} target "
            f"sentences, {len(al_l)} alignments")
    items = list(zip(src_l, tgt_l, al_l))
    chunks = [(items[i:i + chunk_size], cfg) for i in range(0, len(items), chunk_size)]
    if threads != 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads or None) as pool:
            results = [r for chunk in pool.map(_project_chunk, chunks) for r in chunk]
    else:
        results = [r for chunk in map(_project_chunk, chunks) for r in chunk]

    stats = ProjectionStats(sentences_in=len(items))
    out = []
    for sent, counts in results:
        if counts is None:
            stats.empty_targets += 1
            continue
        stats.dummies_created += counts[0]
        stats.dummies_collapsed += counts[1]
        if sent is None:
            stats.discarded += 1
        else:
            out.append(sent)
    stats.sentences_out = len(out)
    log.info("projection: %s", stats.summary())
    return Treebank(out), stats
