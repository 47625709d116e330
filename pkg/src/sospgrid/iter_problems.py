"""ITER and LOCALOPT instances, solution checks, and brute-force oracles.

An ITER instance is a total mapping C on {1, ..., 2^n} with C(1) > 1.  A
node v solves it iff C(v) < v, or C(v) > v and C(C(v)) = C(v).  A LOCALOPT
instance is a potential p and neighbor g over the same index set; v solves
it iff p(g(v)) >= p(v).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class IterInstance:
    """Successor mapping C on [2^n], table-backed or procedure-backed.

    The table is 1-indexed via ``table[v - 1]``.  Procedure-backed instances
    (for large n) must be deterministic and side-effect-free.
    """

    n: int
    table: Optional[tuple[int, ...]] = None
    proc: Optional[Callable[[int], int]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if (self.table is None) == (self.proc is None):
            raise ValueError("exactly one of table/proc must be given")
        if self.table is not None:
            size = 1 << self.n
            if len(self.table) != size:
                raise ValueError(f"table must have 2^n = {size} entries")
            for v, cv in enumerate(self.table, start=1):
                if not 1 <= cv <= size:
                    raise ValueError(f"C({v}) = {cv} out of range [1, {size}]")
            if self.table[0] <= 1:
                raise ValueError("instance requires C(1) > 1")

    @property
    def size(self) -> int:
        return 1 << self.n

    def C(self, v: int) -> int:
        if not 1 <= v <= self.size:
            raise ValueError(f"node {v} out of range [1, {self.size}]")
        if self.table is not None:
            return self.table[v - 1]
        if v not in self._cache:
            cv = self.proc(v)
            if not 1 <= cv <= self.size:
                raise ValueError(f"C({v}) = {cv} out of range [1, {self.size}]")
            self._cache[v] = cv
        return self._cache[v]


@dataclass(frozen=True)
class LocalOptInstance:
    """Potential p and neighbor g, both total on [2^n]."""

    n: int
    p: Callable[[int], object]
    g: Callable[[int], int]

    @property
    def size(self) -> int:
        return 1 << self.n


def iter_is_solution(inst: IterInstance, v: int) -> bool:
    """True iff C(v) < v, or C(v) > v and C(C(v)) = C(v)."""
    cv = inst.C(v)
    if cv < v:
        return True
    if cv > v and inst.C(cv) == cv:
        return True
    return False


def iter_solve_brute(inst: IterInstance) -> int:
    """Least solution node, by exhaustive scan (table instances, n <= 20).

    One always exists: follow C from node 1 (C(1) > 1); the walk either
    steps left at some point or reaches a fixed point from its left.
    """
    if inst.table is None:
        raise ValueError("brute-force scan requires a table-backed instance")
    if inst.n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute-force scan limited to n <= {BRUTE_FORCE_LIMIT}")
    for v in range(1, inst.size + 1):
        if iter_is_solution(inst, v):
            return v
    raise AssertionError("unreachable: every valid instance has a solution")


def localopt_is_solution(inst: LocalOptInstance, v: int) -> bool:
    """True iff p(g(v)) >= p(v)."""
    if not 1 <= v <= inst.size:
        raise ValueError(f"node {v} out of range [1, {inst.size}]")
    return inst.p(inst.g(v)) >= inst.p(v)


def from_mapping(values: Sequence[int]) -> IterInstance:
    """Build a table instance from 1-indexed successor values (len = 2^n)."""
    size = len(values)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError("table length must be a power of two")
    return IterInstance(n=n, table=tuple(values))


def load_instance(path: str | Path) -> IterInstance:
    """Load {"n": int, "C": [1-indexed ints]} from a JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "n" not in data or "C" not in data:
        raise ValueError('instance file must be {"n": int, "C": [ints]}')
    n = data["n"]
    table = data["C"]
    if not isinstance(n, int) or not isinstance(table, list):
        raise ValueError('instance file must be {"n": int, "C": [ints]}')
    if not all(isinstance(v, int) for v in table):
        raise ValueError("C entries must be integers")
    return IterInstance(n=n, table=tuple(table))


def save_instance(inst: IterInstance, path: str | Path) -> None:
    if inst.table is None:
        raise ValueError("only table-backed instances can be serialized")
    with open(path, "w") as fh:
        json.dump({"n": inst.n, "C": list(inst.table)}, fh)
        fh.write("\n")
