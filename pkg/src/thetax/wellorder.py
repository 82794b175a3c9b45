"""Parameter well-orderings: a decidable carrier of naturals plus a comparison oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable


class Ordering3(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1

    def flip(self) -> "Ordering3":
        return _FLIP[self]

    @property
    def symbol(self) -> str:
        return {-1: "<", 0: "=", 1: ">"}[self.value]


LT, EQ, GT = Ordering3.LT, Ordering3.EQ, Ordering3.GT
_FLIP = {LT: GT, EQ: EQ, GT: LT}


class CarrierError(ValueError):
    """An element outside the carrier of a well-ordering was used."""


class TableError(ValueError):
    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True, eq=False)
class WellOrdering:
    """A strict total order on a set of naturals.

    ``less_fn(u, v)`` must answer the strict relation u <_X v for carrier
    elements. Well-foundedness is assumed, never checked.
    """

    contains_fn: Callable[[int], bool]
    less_fn: Callable[[int, int], bool]
    description: str
    finite_bound: int | None = None
    members: tuple[int, ...] | None = None
    # per-instance memo used by the term comparator
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def carrier_contains(self, u: int) -> bool:
        return isinstance(u, int) and u >= 0 and bool(self.contains_fn(u))

    def less(self, u: int, v: int) -> Ordering3:
        for w in (u, v):
            if not self.carrier_contains(w):
                raise CarrierError(f"{w} is not in the carrier of {self.description}")
        if u == v:
            return EQ
        return LT if self.less_fn(u, v) else GT

    def carrier_prefix(self, n: int, scan_limit: int = 100_000) -> list[int]:
        """The ``n`` numerically smallest carrier elements (fewer if the carrier is smaller)."""
        if self.members is not None:
            return sorted(self.members)[:n]
        out: list[int] = []
        k = 0
        while len(out) < n and k < scan_limit:
            if self.carrier_contains(k):
                out.append(k)
            k += 1
        return out

    def __repr__(self) -> str:
        return f"WellOrdering({self.description})"


def wo_nat() -> WellOrdering:
    return WellOrdering(lambda u: True, lambda u, v: u < v, "nat")


def wo_finite(n: int) -> WellOrdering:
    if n < 0:
        raise ValueError("finite ordering needs n >= 0")
    return WellOrdering(lambda u: u < n, lambda u, v: u < v, f"finite:{n}",
                        finite_bound=n, members=tuple(range(n)))


def wo_table(pairs: Iterable[tuple[int, int]], description: str = "table") -> WellOrdering:
    """Order given by the transitive closure of ``u < v`` pairs.

    Raises TableError naming the offending pair when the closure is cyclic
    or leaves two mentioned elements incomparable.
    """
    pairs = [(int(u), int(v)) for u, v in pairs]
    elems = sorted({x for p in pairs for x in p})
    above: dict[int, set[int]] = {x: set() for x in elems}
    for u, v in pairs:
        if u == v:
            raise TableError(f"reflexive pair {u} < {v}", (u, v))
        above[u].add(v)
    # Warshall closure
    for k in elems:
        for i in elems:
            if k in above[i]:
                above[i] |= above[k]
    for u, v in pairs:
        if u in above[v]:
            raise TableError(f"cycle through pair {u} < {v}", (u, v))
    for i, u in enumerate(elems):
        for v in elems[i + 1:]:
            if v not in above[u] and u not in above[v]:
                raise TableError(f"elements {u} and {v} are incomparable", (u, v))
    members = frozenset(elems)
    closure = {u: frozenset(s) for u, s in above.items()}
    return WellOrdering(lambda u: u in members, lambda u, v: v in closure[u],
                        description, members=tuple(elems))


def load_table(path: str | Path) -> WellOrdering:
    """Read one ``u < v`` relation per line; ``#`` starts a comment."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            left, right = line.split("<")
            pairs.append((int(left), int(right)))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected 'u < v', got {line!r}") from None
    return wo_table(pairs, description=f"table:{path}")


def parse_wo_spec(spec: str) -> WellOrdering:
    """``nat``, ``finite:<n>`` or ``table:<path>``."""
    if spec == "nat":
        return wo_nat()
    kind, _, arg = spec.partition(":")
    if kind == "finite" and arg.isdigit():
        return wo_finite(int(arg))
    if kind == "table" and arg:
        return load_table(arg)
    raise ValueError(f"unknown well-ordering spec {spec!r}")


def wo_from_kb(tree) -> WellOrdering:
    """Kleene-Brouwer ordering of a finite deduction tree, nodes coded by their ids."""
    from .deduction import kb_compare

    n = len(tree.nodes)
    paths = [node.path for node in tree.nodes]
    return WellOrdering(lambda u: u < n,
                        lambda u, v: kb_compare(tree, paths[u], paths[v]) == LT,
                        f"kb:{n}", finite_bound=n, members=tuple(range(n)))
