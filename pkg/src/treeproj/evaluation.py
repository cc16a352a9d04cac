"""Attachment scores, corpus slicing and corpus statistics."""
from __future__ import annotations

import json
import logging
import random
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, TypeVar

from .conllu import DepSentence, Treebank
from .constituency import check_projectivity

log = logging.getLogger(__name__)

T = TypeVar("T")


class EvaluationError(ValueError):
    pass


@dataclass
class EvalReport:
    tokens_total: int = 0
    heads_correct: int = 0
    heads_and_labels_correct: int = 0
    sentences: int = 0
    # gold relation -> [gold count, head+label correct count]
    per_deprel: dict[str, list[int]] = field(default_factory=dict)

    @property
    def uas(self) -> float:
        # nothing to score counts as perfect so that score(x, x) is always 1
        return self.heads_correct / self.tokens_total if self.tokens_total else 1.0

    @property
    def las(self) -> float:
        return self.heads_and_labels_correct / self.tokens_total if self.tokens_total else 1.0

    def to_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "tokens": self.tokens_total,
            "heads_correct": self.heads_correct,
            "heads_and_labels_correct": self.heads_and_labels_correct,
            "uas": round(self.uas * 100, 2),
            "las": round(self.las * 100, 2),
            "per_deprel": {k: {"gold": g, "correct": c} for k, (g, c) in sorted(self.per_deprel.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        return f"LAS={self.las * 100:.2f} UAS={self.uas * 100:.2f}"

    def table(self) -> str:
        lines = [self.summary(), f"sentences={self.sentences} tokens={self.tokens_total}",
                 f"{'deprel':<16}{'gold':>8}{'correct':>9}{'acc':>8}"]
        for rel, (g, c) in sorted(self.per_deprel.items()):
            lines.append(f"{rel:<16}{g:>8}{c:>9}{100 * c / g:>8.2f}")
        return "\n".join(lines)


def universal_deprel(label: str) -> str:
    return label.split(":", 1)[0]


def _pair(system: Treebank, gold: Treebank, match: str) -> list[tuple[DepSentence, DepSentence]]:
    if match == "order":
        if len(system) != len(gold):
            raise EvaluationError(f"sentence count mismatch: {len(system)} system vs {len(gold)} gold")
        return list(zip(system, gold))
    if match == "sent_id":
        by_id = {g.sent_id: g for g in gold if g.sent_id is not None}
        pairs = []
        for k, s in enumerate(system, 1):
            if s.sent_id not in by_id:
                raise EvaluationError(f"system sentence {k} (sent_id {s.sent_id!r}) has no gold counterpart")
            pairs.append((s, by_id[s.sent_id]))
        return pairs
    raise ValueError(f"match must be 'order' or 'sent_id', got {match!r}")


def score(system: Treebank, gold: Treebank, include_punct: bool = True,
          universal_deprels: bool = False, match: str = "order") -> EvalReport:
    """LAS/UAS of *system* against *gold*.

    Parameters
    ----------
    include_punct
        When false, tokens whose gold UPOS is ``PUNCT`` are not scored.
    universal_deprels
        Compare relations only up to the first ``:`` (drops subtypes).
    match
        ``"order"`` pairs sentences by position, ``"sent_id"`` looks up the
        gold sentence by id (useful after filtering the system side).
    """
    rep = EvalReport()
    mismatched_forms = 0
    for k, (sys_s, gold_s) in enumerate(_pair(system, gold, match), 1):
        if len(sys_s) != len(gold_s):
            raise EvaluationError(f"sentence {k}: {len(sys_s)} system tokens vs {len(gold_s)} gold tokens")
        rep.sentences += 1
        for st, gt in zip(sys_s.tokens, gold_s.tokens):
            if st.form != gt.form:
                mismatched_forms += 1
            if not include_punct and gt.upos == "PUNCT":
                continue
            g_rel, s_rel = gt.deprel, st.deprel
            if universal_deprels:
                g_rel, s_rel = universal_deprel(g_rel), universal_deprel(s_rel)
            rep.tokens_total += 1
            entry = rep.per_deprel.setdefault(g_rel, [0, 0])
            entry[0] += 1
            if st.head == gt.head:
                rep.heads_correct += 1
                if s_rel == g_rel:
                    rep.heads_and_labels_correct += 1
                    entry[1] += 1
    if mismatched_forms:
        log.warning("%d tokens differ in form between system and gold", mismatched_forms)
    return rep


def _select(n_total: int, n: int, strategy: str, seed: int | None) -> list[int]:
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > n_total:
        warnings.warn(f"requested {n} sentences but corpus has only {n_total}; returning all", stacklevel=3)
        n = n_total
    if strategy == "first_n":
        return list(range(n))
    if strategy == "random_seeded":
        # random.Random is MT19937; the same seed gives the same subset everywhere
        rng = random.Random(seed if seed is not None else 0)
        return sorted(rng.sample(range(n_total), n))
    raise ValueError(f"strategy must be 'first_n' or 'random_seeded', got {strategy!r}")


def sample_corpus(data, n: int, strategy: str = "first_n", seed: int | None = None):
    """Take *n* sentences (or sentence pairs) from a corpus.

    *data* is a :class:`Treebank`, a plain sequence, or a tuple of parallel
    sequences (e.g. source treebank, target text, alignments) which are all
    sliced with the same indices.  ``random_seeded`` draws an order-preserving
    subset with ``random.Random(seed)``.
    """
    if isinstance(data, tuple):
        lengths = {len(part) for part in data}
        if len(lengths) > 1:
            raise ValueError(f"parallel streams differ in length: {sorted(lengths)}")
        idx = _select(lengths.pop() if lengths else 0, n, strategy, seed)
        return tuple(_take(part, idx) for part in data)
    return _take(data, _select(len(data), n, strategy, seed))


def _take(seq, idx: list[int]):
    picked = [seq[i] for i in idx]
    if isinstance(seq, Treebank):
        return Treebank(picked)
    return picked


@dataclass
class StatsReport:
    sentences: int = 0
    tokens: int = 0
    dummies: int = 0
    nonprojective: int = 0
    deprels: Counter = field(default_factory=Counter)
    upos: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "tokens": self.tokens,
            "dummies": self.dummies,
            "nonprojective": self.nonprojective,
            "deprels": dict(sorted(self.deprels.items())),
            "upos": dict(sorted(self.upos.items())),
        }


def corpus_stats(tb: Sequence[DepSentence]) -> StatsReport:
    rep = StatsReport()
    for sent in tb:
        rep.sentences += 1
        rep.tokens += len(sent)
        rep.dummies += sent.n_dummies
        if check_projectivity(sent):
            rep.nonprojective += 1
        rep.deprels.update(t.deprel for t in sent.tokens)
        rep.upos.update(t.upos for t in sent.tokens)
    return rep
