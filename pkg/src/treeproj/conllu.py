"""CoNLL-U reading, writing and tree validation.

Sentences are immutable values (:class:`DepSentence` of :class:`Token`) so they
can be passed freely between pipeline stages.  Projection-created dummy nodes
are stored with ``is_dummy=True`` and serialize as form ``<DUMMY>`` with a
``Dummy=Yes`` entry in MISC, which keeps intermediate files valid CoNLL-U.
"""
from __future__ import annotations

import io
import sys
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Iterator, Mapping, NamedTuple, Sequence

DUMMY_FORM = "<DUMMY>"
DUMMY_MISC = "Dummy=Yes"
EMPTY = "_"

Feats = tuple[tuple[str, str], ...]


class ConlluError(ValueError):
    """Malformed CoNLL-U input."""

    def __init__(self, message: str, lineno: int | None = None, sentence: int | None = None):
        self.lineno = lineno
        self.sentence = sentence
        where = []
        if sentence is not None:
            where.append(f"sentence {sentence}")
        if lineno is not None:
            where.append(f"line {lineno}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def _feat_key(pair: tuple[str, str]) -> tuple[str, str]:
    # UD orders feature names case-insensitively
    return pair[0].lower(), pair[0]


def normalize_feats(feats: Iterable[tuple[str, str]] | Mapping[str, str] | str | None) -> Feats:
    """Return *feats* as a key-sorted tuple of ``(name, value)`` pairs.

    Accepts a mapping, an iterable of pairs or a CoNLL-U FEATS string.
    Duplicate names raise :class:`ValueError`.
    """
    if feats is None:
        return ()
    if isinstance(feats, str):
        return parse_feats(feats)
    pairs = list(feats.items()) if isinstance(feats, Mapping) else [tuple(p) for p in feats]
    names = [k for k, _ in pairs]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate feature name in {pairs!r}")
    return tuple(sorted(pairs, key=_feat_key))


def parse_feats(column: str) -> Feats:
    if column == EMPTY or column == "":
        return ()
    pairs = []
    for item in column.split("|"):
        name, sep, value = item.partition("=")
        if not sep or not name or not value:
            raise ValueError(f"malformed feature {item!r}")
        pairs.append((name, value))
    return normalize_feats(pairs)


def format_feats(feats: Feats) -> str:
    if not feats:
        return EMPTY
    return "|".join(f"{k}={v}" for k, v in feats)


@dataclass(frozen=True)
class Token:
    """One CoNLL-U word line.

    ``head`` is ``None`` only for tag-only files (HEAD column ``_``), which
    :func:`validate` reports as a violation.
    """

    id: int
    form: str
    lemma: str = EMPTY
    upos: str = EMPTY
    xpos: str = EMPTY
    feats: Feats = ()
    head: int | None = 0
    deprel: str = EMPTY
    deps: str = EMPTY
    misc: str = EMPTY
    is_dummy: bool = False

    def __post_init__(self):
        if not (isinstance(self.feats, tuple) and all(type(p) is tuple for p in self.feats)
                and list(self.feats) == sorted(self.feats, key=_feat_key)):
            object.__setattr__(self, "feats", normalize_feats(self.feats))
        elif len({k for k, _ in self.feats}) != len(self.feats):
            raise ValueError(f"duplicate feature name in {self.feats!r}")

    @classmethod
    def dummy(cls, id: int, head: int, deprel: str) -> "Token":
        return cls(id=id, form=DUMMY_FORM, lemma=EMPTY, upos="X", head=head, deprel=deprel, is_dummy=True)

    def to_line(self) -> str:
        misc = self.misc
        if self.is_dummy:
            misc = DUMMY_MISC if misc == EMPTY else f"{DUMMY_MISC}|{misc}"
        return "\t".join((
            str(self.id), self.form, self.lemma, self.upos, self.xpos,
            format_feats(self.feats), EMPTY if self.head is None else str(self.head),
            self.deprel, self.deps, misc,
        ))


@dataclass(frozen=True)
class DepSentence:
    tokens: tuple[Token, ...]
    sent_id: str | None = None
    comments: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if not isinstance(self.comments, tuple):
            object.__setattr__(self, "comments", tuple(self.comments))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def heads(self) -> list[int | None]:
        return [t.head for t in self.tokens]

    @property
    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def n_dummies(self) -> int:
        return sum(t.is_dummy for t in self.tokens)

    def to_conllu(self) -> str:
        lines = []
        if self.sent_id is not None:
            lines.append(f"# sent_id = {self.sent_id}")
        lines.extend(f"# {c}" for c in self.comments)
        lines.extend(t.to_line() for t in self.tokens)
        return "\n".join(lines) + "\n"


@dataclass
class Treebank:
    sentences: list[DepSentence] = field(default_factory=list)

    def __post_init__(self):
        self.sentences = list(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[DepSentence]:
        return iter(self.sentences)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Treebank(self.sentences[i])
        return self.sentences[i]

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


# -- validation -------------------------------------------------------------

class Violation(NamedTuple):
    token_id: int
    kind: str
    message: str


def validate(sent: DepSentence) -> list[Violation]:
    """List every tree-invariant violation of *sent* (empty iff valid).

    Checked: ids are 1..n in order, heads are present and in range, no
    self-loops, exactly one root, no cycles, and dummy tokens carry the
    reserved form.
    """
    out: list[Violation] = []
    toks = sent.tokens
    n = len(toks)
    for pos, tok in enumerate(toks, 1):
        if tok.id != pos:
            out.append(Violation(tok.id, "id-sequence", f"token at position {pos} has id {tok.id}"))
        if tok.is_dummy and tok.form != DUMMY_FORM:
            out.append(Violation(tok.id, "dummy-form", f"dummy token {tok.id} has form {tok.form!r}"))
    # structural checks below index tokens by position
    heads: list[int | None] = [t.head for t in toks]
    roots = []
    for pos, h in enumerate(heads, 1):
        if h is None:
            out.append(Violation(pos, "missing-head", f"token {pos} has no head"))
        elif h == pos:
            out.append(Violation(pos, "self-loop", f"token {pos} is its own head"))
        elif h < 0 or h > n:
            out.append(Violation(pos, "head-range", f"token {pos} has head {h} outside 0..{n}"))
        elif h == 0:
            roots.append(pos)
    if not roots:
        out.append(Violation(0, "no-root", "no token is attached to the root"))
    elif len(roots) > 1:
        for r in roots[1:]:
            out.append(Violation(r, "multiple-roots", f"token {r} is an extra root (first root is {roots[0]})"))

    state = [0] * (n + 1)  # 0 unseen, 1 on current path, 2 done
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        node = start
        while 1 <= node <= n and state[node] == 0:
            state[node] = 1
            path.append(node)
            h = heads[node - 1]
            if h is None or h == node:
                break
            node = h
        if 1 <= node <= n and state[node] == 1 and heads[node - 1] != node:
            cycle = path[path.index(node):]
            out.append(Violation(min(cycle), "cycle", "cycle through tokens " + "->".join(map(str, cycle))))
        for p in path:
            state[p] = 2
    return out


def is_tree(sent: DepSentence) -> bool:
    return not validate(sent)


# -- parsing ----------------------------------------------------------------

def _parse_token(cols: list[str], lineno: int, sent_no: int) -> Token:
    if len(cols) != 10:
        raise ConlluError(f"expected 10 tab-separated columns, found {len(cols)}", lineno, sent_no)
    id_col, form, lemma, upos, xpos, feats, head_col, deprel, deps, misc = cols
    if "-" in id_col:
        raise ConlluError(f"multiword token range {id_col!r} is not supported", lineno, sent_no)
    if "." in id_col:
        raise ConlluError(f"empty node {id_col!r} is not supported", lineno, sent_no)
    try:
        tok_id = int(id_col)
    except ValueError:
        raise ConlluError(f"non-numeric id {id_col!r}", lineno, sent_no) from None
    if head_col == EMPTY:
        head = None
    else:
        try:
            head = int(head_col)
        except ValueError:
            raise ConlluError(f"non-numeric head {head_col!r}", lineno, sent_no) from None
    try:
        feats_t = parse_feats(feats)
    except ValueError as exc:
        raise ConlluError(str(exc), lineno, sent_no) from None
    is_dummy = False
    if misc != EMPTY and DUMMY_MISC in misc.split("|"):
        is_dummy = True
        rest = [m for m in misc.split("|") if m != DUMMY_MISC]
        misc = "|".join(rest) if rest else EMPTY
    return Token(tok_id, form, lemma, upos, xpos, feats_t, head, deprel, deps, misc, is_dummy)


def _check_tree(sent: DepSentence, first_line: int, sent_no: int) -> None:
    problems = validate(sent)
    if not problems:
        return
    v = problems[0]
    lineno = first_line + v.token_id - 1 if v.token_id >= 1 else first_line
    if v.kind == "self-loop":
        msg = f"self-loop at line {lineno} (token {v.token_id} is its own head)"
        raise ConlluError(msg, sentence=sent_no)
    raise ConlluError(f"{v.kind}: {v.message}", lineno, sent_no)


def _lines(source) -> Iterable[str]:
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConlluError(f"invalid UTF-8: {exc}") from None
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def iter_conllu(source: str | bytes | Iterable[str], check_tree: bool = True) -> Iterator[DepSentence]:
    """Yield sentences from CoNLL-U text, a text stream or an iterable of lines.

    With ``check_tree=False`` structurally invalid trees (and ``_`` heads) are
    passed through so they can be inspected with :func:`validate`.
    """
    tokens: list[Token] = []
    comments: list[str] = []
    sent_id = None
    first_line = 0
    sent_no = 0
    seen_ids: set[str] = set()

    def flush():
        sent = DepSentence(tuple(tokens), sent_id, tuple(comments))
        if check_tree:
            _check_tree(sent, first_line, sent_no)
        return sent

    lineno = 0
    try:
        for lineno, raw in enumerate(_lines(source), 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if tokens:
                    yield flush()
                elif comments or sent_id is not None:
                    raise ConlluError("comment block without tokens", lineno, sent_no + 1)
                tokens, comments, sent_id = [], [], None
                continue
            if not tokens and not comments and sent_id is None:
                sent_no += 1
            if line.startswith("#"):
                if tokens:
                    raise ConlluError("comment line inside token block", lineno, sent_no)
                text = line[1:].lstrip(" ")
                key, sep, value = text.partition("=")
                if sep and key.strip() == "sent_id":
                    sent_id = value.strip()
                    if sent_id in seen_ids:
                        raise ConlluError(f"duplicate sent_id {sent_id!r}", lineno, sent_no)
                    seen_ids.add(sent_id)
                else:
                    comments.append(text)
                continue
            if not tokens:
                first_line = lineno
            tokens.append(_parse_token(line.split("\t"), lineno, sent_no))
    except UnicodeDecodeError as exc:
        raise ConlluError(f"invalid UTF-8: {exc}", lineno + 1) from None
    if tokens:
        yield flush()
    elif comments or sent_id is not None:
        raise ConlluError("comment block without tokens", lineno, sent_no)


def parse_conllu(source: str | bytes | Iterable[str], check_tree: bool = True) -> Treebank:
    return Treebank(list(iter_conllu(source, check_tree=check_tree)))


def write_conllu(tb: Treebank | Iterable[DepSentence], stream: IO[str] | None = None) -> str | None:
    """Serialize sentences; return the text, or write it to *stream* if given."""
    if stream is None:
        return "".join(s.to_conllu() + "\n" for s in tb)
    for s in tb:
        stream.write(s.to_conllu())
        stream.write("\n")
    return None


def open_input(path: str) -> IO[str]:
    """Open *path* as UTF-8 text; ``"-"`` reads all of stdin (which stays open)."""
    if path == "-":
        raw = getattr(sys.stdin, "buffer", None)
        return io.StringIO(raw.read().decode("utf-8") if raw is not None else sys.stdin.read())
    return open(path, encoding="utf-8", errors="strict")


def read_conllu(path: str, check_tree: bool = True) -> Treebank:
    with open_input(path) as fh:
        return parse_conllu(fh, check_tree=check_tree)


def renumber(tokens: Sequence[Token], keep: Sequence[bool] | None = None) -> tuple[Token, ...]:
    """Drop tokens where ``keep`` is false and renumber ids/heads 1..n.

    Heads must already point at kept tokens (or 0).
    """
    if keep is None:
        keep = [True] * len(tokens)
    new_id = {0: 0}
    k = 0
    for tok, kp in zip(tokens, keep):
        if kp:
            k += 1
            new_id[tok.id] = k
    return tuple(
        replace(tok, id=new_id[tok.id], head=new_id[tok.head])
        for tok, kp in zip(tokens, keep) if kp
    )
