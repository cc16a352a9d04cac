"""Tag overlay from an independent target-language tagger, delexicalization
and treebank concatenation."""
from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import replace
from typing import Sequence

from .conllu import EMPTY, DepSentence, Treebank

log = logging.getLogger(__name__)


class OverlayError(ValueError):
    def __init__(self, message: str, sentence: int | None = None):
        self.sentence = sentence
        super().__init__(f"sentence {sentence}: {message}" if sentence is not None else message)


class OverlayMode(str, enum.Enum):
    MORPH_ONLY = "morph_only"
    POS_AND_MORPH = "pos_and_morph"

    @classmethod
    def coerce(cls, value: "str | OverlayMode") -> "OverlayMode":
        if isinstance(value, cls):
            return value
        aliases = {"morph": cls.MORPH_ONLY, "pos+morph": cls.POS_AND_MORPH,
                   "posmorph": cls.POS_AND_MORPH}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown overlay mode {value!r}") from None


def _overlay_sentence(proj: DepSentence, tagged: DepSentence, mode: OverlayMode, index: int) -> DepSentence:
    real = [k for k, t in enumerate(proj.tokens) if not t.is_dummy]
    if len(real) != len(tagged):
        raise OverlayError(f"{len(real)} non-dummy projected tokens but {len(tagged)} tagged tokens", index)
    toks = list(proj.tokens)
    for k, tag_tok in zip(real, tagged.tokens):
        tok = toks[k]
        if tok.form != tag_tok.form:
            raise OverlayError(f"form mismatch at token {tok.id}: {tok.form!r} vs {tag_tok.form!r}", index)
        if mode is OverlayMode.POS_AND_MORPH:
            toks[k] = replace(tok, feats=tag_tok.feats, lemma=tag_tok.lemma, upos=tag_tok.upos)
        else:
            toks[k] = replace(tok, feats=tag_tok.feats, lemma=tag_tok.lemma)
    return replace(proj, tokens=tuple(toks))


def overlay_tags(projected: Treebank, tagged: Treebank, mode: OverlayMode | str = OverlayMode.MORPH_ONLY,
                 lenient: bool = False) -> tuple[Treebank, int]:
    """Copy tagger output onto a projected treebank.

    ``morph_only`` replaces FEATS and LEMMA; ``pos_and_morph`` also replaces
    UPOS.  HEAD and DEPREL are never touched and dummy tokens are skipped
    when pairing tokens.  With ``lenient=True`` a sentence whose tokens do
    not line up is left unchanged and counted instead of raising.

    Returns the new treebank and the number of skipped sentences.
    """
    mode = OverlayMode.coerce(mode)
    if len(projected) != len(tagged):
        raise OverlayError(f"sentence count mismatch: {len(projected)} projected vs {len(tagged)} tagged")
    out = []
    skipped = 0
    for i, (p, t) in enumerate(zip(projected, tagged), 1):
        try:
            out.append(_overlay_sentence(p, t, mode, i))
        except OverlayError as exc:
            if not lenient:
                raise
            log.warning("skipping overlay: %s", exc)
            skipped += 1
            out.append(p)
    return Treebank(out), skipped


def delexicalize(tb: Treebank) -> Treebank:
    """Blank FORM and LEMMA of every token.

    Dummy tokens keep their reserved form so they stay recognisable.
    """
    out = []
    for sent in tb:
        toks = tuple(t if t.is_dummy else replace(t, form=EMPTY, lemma=EMPTY) for t in sent.tokens)
        out.append(replace(sent, tokens=toks))
    return Treebank(out)


def concat_treebanks(parts: Sequence[Treebank], labels: Sequence[str] | None = None) -> Treebank:
    """Concatenate treebanks in order, keeping sent_ids unique.

    An id that occurs in more than one part is prefixed with its part label
    (``p0``, ``p1``, ... unless *labels* is given) wherever it occurs.
    """
    if labels is None:
        labels = [f"p{k}" for k in range(len(parts))]
    if len(labels) != len(parts):
        raise ValueError("one label per part is required")
    owners: dict[str, set[int]] = {}
    for k, part in enumerate(parts):
        for s in part:
            if s.sent_id is not None:
                owners.setdefault(s.sent_id, set()).add(k)
    clashing = {sid for sid, ks in owners.items() if len(ks) > 1}

    out = []
    for k, part in enumerate(parts):
        for s in part:
            if s.sent_id in clashing:
                s = replace(s, sent_id=f"{labels[k]}-{s.sent_id}")
            out.append(s)
    counts = Counter(s.sent_id for s in out if s.sent_id is not None)
    if any(c > 1 for c in counts.values()):
        # a prefixed id can still clash with an original one
        seen: Counter = Counter()
        fixed = []
        for s in out:
            if s.sent_id is not None and counts[s.sent_id] > 1:
                seen[s.sent_id] += 1
                if seen[s.sent_id] > 1:
                    s = replace(s, sent_id=f"{s.sent_id}-dup{seen[s.sent_id] - 1}")
            fixed.append(s)
        out = fixed
    return Treebank(out)
