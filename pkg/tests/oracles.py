"""Brute-force reference implementations used by the tests.

These deliberately avoid the package's code paths: trees are plain head
lists, subtrees are found by walking every node up to the root, and rewrite
confluence is checked by exploring every rewrite order.
"""
from __future__ import annotations

from collections import Counter


# -- trees ------------------------------------------------------------------

def brute_is_tree(heads) -> bool:
    """heads[k] is the head of token k+1 (None allowed)."""
    n = len(heads)
    if n == 0 or sum(1 for h in heads if h == 0) != 1:
        return False
    for h in heads:
        if h is None or h < 0 or h > n:
            return False
    for i in range(1, n + 1):
        node, steps = i, 0
        while node != 0:
            node = heads[node - 1]
            steps += 1
            if steps > n:
                return False
    return True


def ancestors(heads, i):
    out = []
    node = heads[i - 1]
    while node != 0:
        out.append(node)
        node = heads[node - 1]
    return out


def brute_yield(heads, i):
    return sorted(j for j in range(1, len(heads) + 1) if j == i or i in ancestors(heads, j))


def brute_nonprojective(heads):
    out = []
    for i in range(1, len(heads) + 1):
        y = brute_yield(heads, i)
        if y != list(range(y[0], y[-1] + 1)):
            out.append(i)
    return out


def brute_depth(heads, i):
    return len(ancestors(heads, i)) + 1


# -- alignment --------------------------------------------------------------

def oracle_decompose(links):
    """Closest-source reduction of many-to-many groups via union-find."""
    links = set(links)
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for s, t in links:
        a, b = find(("s", s)), find(("t", t))
        if a != b:
            parent[a] = b
    groups = {}
    for s, t in links:
        groups.setdefault(find(("s", s)), set()).add((s, t))
    kept = set()
    for group in groups.values():
        outdeg = Counter(s for s, _ in group)
        indeg = Counter(t for _, t in group)
        if max(outdeg.values()) >= 2 and max(indeg.values()) >= 2:
            for t in set(indeg):
                cands = [s for s, tt in group if tt == t]
                best = min(cands, key=lambda s: (abs(s - t), s))
                kept.add((best, t))
        else:
            kept |= group
    return kept


def oracle_classes(links, ns, nt):
    """Class name for every index after decomposition: {('s', i): cls, ('t', j): cls}."""
    kept = oracle_decompose(links)
    out = {}
    for i in range(1, ns + 1):
        out[("s", i)] = "unaligned"
    for j in range(1, nt + 1):
        out[("t", j)] = "unaligned"
    for s, t in kept:
        fo = sum(1 for ss, _ in kept if ss == s)
        fi = sum(1 for _, tt in kept if tt == t)
        if fo == 1 and fi == 1:
            cls = "one_to_one"
        elif fo > 1:
            cls = "one_to_many"
        else:
            cls = "many_to_one"
        out[("s", s)] = cls
        out[("t", t)] = cls
    return out


# -- projection ---------------------------------------------------------------

def oracle_project(src, tgt_forms, links, dummy_deprel="dummy", policy="attach_nearest"):
    """Raw projection as a list of CoNLL-U rows (10-tuples of strings).

    *src* is a list of dicts with keys head, deprel, lemma, upos, feats
    (feats as a CoNLL-U string).
    """
    ns, nt = len(src), len(tgt_forms)
    heads = [tok["head"] for tok in src]
    kept = oracle_decompose(links)

    # many-to-one: highest source wins, then leftmost
    surviving = set()
    for t in range(1, nt + 1):
        cands = sorted(s for s, tt in kept if tt == t)
        if cands:
            best = min(cands, key=lambda s: (brute_depth(heads, s), s))
            surviving.add((best, t))

    def image(i):
        ts = [t for s, t in surviving if s == i]
        return f"t{ts[0]}" if len(ts) == 1 else f"d{i}"

    head_of, rel_of, info = {}, {}, {}
    for i in range(1, ns + 1):
        node = image(i)
        h = heads[i - 1]
        head_of[node] = "root" if h == 0 else image(h)
        rel_of[node] = src[i - 1]["deprel"]
        ts = sorted(t for s, t in surviving if s == i)
        if len(ts) >= 2:
            for t in ts:
                head_of[f"t{t}"] = node
                rel_of[f"t{t}"] = dummy_deprel
        for t in ts:
            info[f"t{t}"] = src[i - 1]
    root = next(n for n, h in head_of.items() if h == "root")

    aligned = sorted(t for _, t in surviving)
    for j in range(1, nt + 1):
        name = f"t{j}"
        if name in head_of:
            continue
        if not aligned or policy == "attach_root":
            head_of[name] = root
        else:
            nearest = min(aligned, key=lambda k: (abs(k - j), k))
            h = head_of[f"t{nearest}"]
            head_of[name] = f"t{nearest}" if h == "root" else h
        rel_of[name] = "dep"

    def node_ancestors(n):
        out = []
        while head_of[n] != "root":
            n = head_of[n]
            out.append(n)
        return out

    def position_key(n):
        if n.startswith("t"):
            return (int(n[1:]), 1, 0, 0)
        covered = [int(m[1:]) for m in head_of if m.startswith("t") and n in node_ancestors(m)]
        anchor = min(covered) if covered else nt + 1
        return (anchor, 0, len(node_ancestors(n)), int(n[1:]))

    order = sorted(head_of, key=position_key)
    ids = {n: k for k, n in enumerate(order, 1)}
    ids["root"] = 0
    rows = []
    for n in order:
        if n.startswith("d"):
            rows.append((str(ids[n]), "<DUMMY>", "_", "X", "_", "_", str(ids[head_of[n]]),
                         rel_of[n], "_", "Dummy=Yes"))
        else:
            src_tok = info.get(n)
            lemma, upos, feats = ("_", "X", "_") if src_tok is None else (
                src_tok["lemma"], src_tok["upos"], src_tok["feats"])
            rows.append((str(ids[n]), tgt_forms[int(n[1:]) - 1], lemma, upos, "_", feats,
                         str(ids[head_of[n]]), rel_of[n], "_", "_"))
    return rows


# -- collapse -----------------------------------------------------------------

def _rewrites(state, is_dummy):
    """All states reachable by one rewrite; state = (alive, heads, rels)."""
    alive, heads, rels = state
    out = []
    for d in alive:
        if not is_dummy[d]:
            continue
        kids = [c for c in alive if heads[c] == d]
        if not kids and heads[d] != 0:
            out.append((alive - {d}, heads, rels))
        elif len(kids) == 1:
            c = kids[0]
            h2 = dict(heads)
            r2 = dict(rels)
            h2[c] = heads[d]
            r2[c] = rels[d]
            out.append((alive - {d}, _freeze(h2), _freeze(r2)))
    return out


class _FrozenDict(dict):
    def __hash__(self):
        return hash(tuple(sorted(self.items())))


def _freeze(d):
    return _FrozenDict(d)


def oracle_collapse_all_orders(heads, rels, dummy_flags):
    """Every normal form reachable under any rewrite order, as (ids, heads, rels) tuples.

    Node names are the original 1-based ids; heads of survivors always point
    to survivors.  Returns a set; confluence means it has one element.
    """
    n = len(heads)
    is_dummy = {i: dummy_flags[i - 1] for i in range(1, n + 1)}
    start = (frozenset(range(1, n + 1)), _freeze({i: heads[i - 1] for i in range(1, n + 1)}),
             _freeze({i: rels[i - 1] for i in range(1, n + 1)}))
    seen = {start}
    stack = [start]
    finals = set()
    while stack:
        state = stack.pop()
        nxt = _rewrites(state, is_dummy)
        if not nxt:
            alive, hs, rs = state
            ids = tuple(sorted(alive))
            finals.add((ids, tuple(hs[i] for i in ids), tuple(rs[i] for i in ids)))
        for s in nxt:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return finals


def renumbered(final):
    """Turn an oracle normal form into (head vector, deprels, kept original ids)."""
    ids, hs, rs = final
    pos = {old: k for k, old in enumerate(ids, 1)}
    pos[0] = 0
    return [pos[h] for h in hs], list(rs), list(ids)


# -- evaluation ---------------------------------------------------------------

def recount_scores(sys_rows, gold_rows, include_punct=True):
    """sys_rows/gold_rows: lists of sentences of (head, deprel, upos) triples."""
    total = uh = lh = 0
    for s_sent, g_sent in zip(sys_rows, gold_rows):
        for (sh, sr, _), (gh, gr, gu) in zip(s_sent, g_sent):
            if not include_punct and gu == "PUNCT":
                continue
            total += 1
            uh += sh == gh
            lh += sh == gh and sr == gr
    return total, uh, lh
