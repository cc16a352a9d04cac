"""Input coercion helpers shared by the estimators and the CLI."""
from __future__ import annotations

from typing import Iterable, Sequence

from .alignment import SentenceAlignment, parse_alignment_line
from .conllu import DepSentence, Treebank

BitextItem = tuple[DepSentence, list[str], SentenceAlignment]


def check_choice(value, choices: Sequence, name: str):
    if value not in choices:
        raise ValueError(f"{name} must be one of {list(choices)}, got {value!r}")
    return value


def check_treebank(X, name: str = "X") -> Treebank:
    """Return *X* as a :class:`Treebank` (accepts any iterable of sentences)."""
    if isinstance(X, Treebank):
        return X
    if isinstance(X, DepSentence):
        return Treebank([X])
    if isinstance(X, (str, bytes)) or not isinstance(X, Iterable):
        raise TypeError(f"{name} must be a Treebank or an iterable of DepSentence, got {type(X).__name__}")
    sents = list(X)
    for k, s in enumerate(sents):
        if not isinstance(s, DepSentence):
            raise TypeError(f"{name}[{k}] is {type(s).__name__}, expected DepSentence")
    return Treebank(sents)


def check_target(tgt, k: int = 0) -> list[str]:
    if isinstance(tgt, str):
        return tgt.split()
    tgt = list(tgt)
    if not all(isinstance(w, str) for w in tgt):
        raise TypeError(f"target sentence {k} must contain strings")
    return tgt


def check_bitext(X) -> list[BitextItem]:
    """Normalize a bitext to a list of ``(source, target_tokens, alignment)``.

    *X* is either an iterable of such triples or a 3-tuple of parallel
    streams.  Targets may be whitespace-tokenized strings, alignments may
    be Pharaoh strings.
    """
    if isinstance(X, tuple) and len(X) == 3 and not isinstance(X[0], DepSentence):
        src, tgt, al = (list(part) for part in X)
        if not (len(src) == len(tgt) == len(al)):
            raise ValueError(f"parallel streams differ in length: {len(src)}, {len(tgt)}, {len(al)}")
        triples = zip(src, tgt, al)
    else:
        triples = X
    out = []
    for k, item in enumerate(triples):
        try:
            src, tgt, al = item
        except (TypeError, ValueError):
            raise TypeError(f"bitext item {k} is not a (source, target, alignment) triple") from None
        if not isinstance(src, DepSentence):
            raise TypeError(f"bitext item {k}: source must be a DepSentence")
        tgt = check_target(tgt, k)
        if isinstance(al, str):
            al = parse_alignment_line(al, len(src), len(tgt))
        elif not isinstance(al, SentenceAlignment):
            al = SentenceAlignment(frozenset(al))
        out.append((src, tgt, al))
    return out
