"""Pharaoh-format word alignments and their fan-in/fan-out classification."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

Link = tuple[int, int]


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class SentenceAlignment:
    """Links between 1-based source and target token indices."""

    links: frozenset[Link] = frozenset()

    def __post_init__(self):
        if not isinstance(self.links, frozenset):
            object.__setattr__(self, "links", frozenset(self.links))
        for s, t in self.links:
            if s < 1 or t < 1:
                raise AlignmentError(f"alignment indices must be >= 1, got {s}-{t}")

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self) -> Iterator[Link]:
        return iter(sorted(self.links))

    @classmethod
    def identity(cls, n: int) -> "SentenceAlignment":
        return cls(frozenset((i, i) for i in range(1, n + 1)))

    def to_pharaoh(self) -> str:
        return " ".join(f"{s - 1}-{t - 1}" for s, t in sorted(self.links))


@dataclass(frozen=True)
class LinkClassification:
    one_to_one: frozenset[Link]
    one_to_many: dict[int, list[int]]
    many_to_one: dict[int, list[int]]
    unaligned_src: list[int]
    unaligned_tgt: list[int]
    # links removed while decomposing many-to-many groups
    dropped: frozenset[Link] = field(default=frozenset())

    @property
    def links(self) -> set[Link]:
        out = set(self.one_to_one)
        out.update((s, t) for s, ts in self.one_to_many.items() for t in ts)
        out.update((s, t) for t, ss in self.many_to_one.items() for s in ss)
        return out


def parse_alignment_line(line: str, src_len: int, tgt_len: int) -> SentenceAlignment:
    """Parse one line of 0-based ``i-j`` pairs into a 1-based alignment.

    >>> sorted(parse_alignment_line("0-0 1-1", 2, 2).links)
    [(1, 1), (2, 2)]
    """
    links = set()
    for item in line.split():
        i, sep, j = item.partition("-")
        if not sep or not i.isdigit() or not j.isdigit():
            raise AlignmentError(f"malformed alignment pair {item!r}")
        s, t = int(i) + 1, int(j) + 1
        if s > src_len:
            raise AlignmentError(f"source index {i} out of range for {src_len} source tokens")
        if t > tgt_len:
            raise AlignmentError(f"target index {j} out of range for {tgt_len} target tokens")
        links.add((s, t))
    return SentenceAlignment(frozenset(links))


def iter_alignment_lines(stream: IO[str] | Iterable[str]) -> Iterator[str]:
    for line in stream:
        yield line.rstrip("\r\n")


def _components(links: Iterable[Link]) -> list[set[Link]]:
    links = sorted(set(links))
    by_src: dict[int, list[Link]] = defaultdict(list)
    by_tgt: dict[int, list[Link]] = defaultdict(list)
    for link in links:
        by_src[link[0]].append(link)
        by_tgt[link[1]].append(link)
    seen: set[Link] = set()
    comps = []
    for start in links:
        if start in seen:
            continue
        comp = set()
        stack = [start]
        seen.add(start)
        while stack:
            s, t = stack.pop()
            comp.add((s, t))
            for nb in by_src[s] + by_tgt[t]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(comp)
    return comps


def decompose_many_to_many(links: Iterable[Link]) -> tuple[set[Link], set[Link]]:
    """Reduce many-to-many link groups to one source link per target.

    A connected group is many-to-many when some source token in it has more
    than one link and some target token in it has more than one link.  In such
    a group each target keeps only its closest source (smallest ``|s - t|``,
    ties to the smaller source index).  Returns ``(kept, dropped)``.
    """
    kept: set[Link] = set()
    dropped: set[Link] = set()
    for comp in _components(links):
        fan_out: dict[int, int] = defaultdict(int)
        fan_in: dict[int, int] = defaultdict(int)
        for s, t in comp:
            fan_out[s] += 1
            fan_in[t] += 1
        if max(fan_out.values()) > 1 and max(fan_in.values()) > 1:
            best: dict[int, int] = {}
            for s, t in sorted(comp):
                if t not in best or (abs(s - t), s) < (abs(best[t] - t), best[t]):
                    best[t] = s
            keep = {(s, t) for t, s in best.items()}
            kept |= keep
            dropped |= comp - keep
        else:
            kept |= comp
    return kept, dropped


def classify(a: SentenceAlignment, src_len: int, tgt_len: int) -> LinkClassification:
    """Partition links (after many-to-many decomposition) by fan-in/fan-out.

    Every source index 1..src_len and target index 1..tgt_len ends up in
    exactly one class, either as a link member or as unaligned.
    """
    for s, t in a.links:
        if s > src_len or t > tgt_len:
            raise AlignmentError(f"link {s}-{t} out of range for {src_len}x{tgt_len} sentence pair")
    kept, dropped = decompose_many_to_many(a.links)
    fan_out: dict[int, list[int]] = defaultdict(list)
    fan_in: dict[int, list[int]] = defaultdict(list)
    for s, t in sorted(kept):
        fan_out[s].append(t)
        fan_in[t].append(s)
    one_to_one = set()
    one_to_many = {}
    many_to_one = {}
    for s, ts in sorted(fan_out.items()):
        if len(ts) > 1:
            one_to_many[s] = ts
        elif len(fan_in[ts[0]]) == 1:
            one_to_one.add((s, ts[0]))
    for t, ss in sorted(fan_in.items()):
        if len(ss) > 1:
            many_to_one[t] = sorted(ss)
    return LinkClassification(
        one_to_one=frozenset(one_to_one),
        one_to_many=one_to_many,
        many_to_one=many_to_one,
        unaligned_src=[i for i in range(1, src_len + 1) if i not in fan_out],
        unaligned_tgt=[j for j in range(1, tgt_len + 1) if j not in fan_in],
        dropped=frozenset(dropped),
    )
