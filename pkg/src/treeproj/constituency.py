"""Dependency to constituency conversion for tree-to-string MT input.

Every word ``w`` becomes an internal node labelled with its relation whose
span is the yield of ``w``; its children are the nodes of ``w``'s
dependents plus a preterminal ``(UPOS form)`` leaf for ``w`` itself, ordered
by position.  This needs projective trees: each yield must be contiguous.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .conllu import DepSentence

ESCAPES = {"(": "-LRB-", ")": "-RRB-"}


class TreeTransformError(ValueError):
    pass


class NonProjectiveError(TreeTransformError):
    def __init__(self, token_id: int, yield_ids: list[int]):
        self.token_id = token_id
        self.yield_ids = yield_ids
        super().__init__(f"token {token_id} has a discontiguous yield {yield_ids}")


class DummyTokenError(TreeTransformError):
    pass


@dataclass
class ConstituencyNode:
    label: str
    children: list["ConstituencyNode"] = field(default_factory=list)
    leaf_form: str | None = None
    span: tuple[int, int] = (0, 0)

    @property
    def is_leaf(self) -> bool:
        return self.leaf_form is not None

    def leaves(self) -> list["ConstituencyNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def internal_nodes(self) -> list["ConstituencyNode"]:
        if self.is_leaf:
            return []
        return [self] + [n for c in self.children for n in c.internal_nodes()]


def _children(sent: DepSentence) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = defaultdict(list)
    for t in sent.tokens:
        kids[t.head].append(t.id)
    return kids


def yields(sent: DepSentence) -> dict[int, list[int]]:
    """Sorted yield (token plus all transitive dependents) of every token."""
    kids = _children(sent)
    out: dict[int, list[int]] = {}
    order = []
    stack = list(kids.get(0, ()))
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(kids.get(node, ()))
    for node in reversed(order):
        ys = [node]
        for c in kids.get(node, ()):
            ys.extend(out[c])
        out[node] = sorted(ys)
    return out


def check_projectivity(sent: DepSentence) -> list[int]:
    """Ids of tokens whose yield is not a contiguous interval."""
    return sorted(i for i, ys in yields(sent).items() if ys[-1] - ys[0] + 1 != len(ys))


def dep_to_const(sent: DepSentence) -> ConstituencyNode:
    """Convert a projective, dummy-free tree to a :class:`ConstituencyNode`.

    Raises :class:`NonProjectiveError` naming the first offending token.
    """
    dummy = [t.id for t in sent.tokens if t.is_dummy]
    if dummy:
        raise DummyTokenError(f"dummy tokens present: {dummy}")
    ys = yields(sent)
    for i in sorted(ys):
        y = ys[i]
        if y[-1] - y[0] + 1 != len(y):
            raise NonProjectiveError(i, y)
    kids = _children(sent)

    def build(i: int) -> ConstituencyNode:
        tok = sent.tokens[i - 1]
        parts = [build(c) for c in kids.get(i, ())]
        parts.append(ConstituencyNode(tok.upos, [], tok.form, (i, i)))
        parts.sort(key=lambda n: n.span[0])
        return ConstituencyNode(tok.deprel, parts, None, (ys[i][0], ys[i][-1]))

    (root,) = kids[0]
    return build(root)


def escape_form(form: str) -> str:
    for raw, esc in ESCAPES.items():
        form = form.replace(raw, esc)
    return form


def write_bracketed(node: ConstituencyNode) -> str:
    """PTB-style one-line bracketing, e.g. ``(root (nsubj (PRON He)) (VERB runs))``."""
    if node.is_leaf:
        return f"({node.label} {escape_form(node.leaf_form)})"
    return "(" + node.label + " " + " ".join(write_bracketed(c) for c in node.children) + ")"
