"""Integral property descriptors and structured plaintext collections.

A d-th order structure is the set of 2^{8d} plaintexts whose d active
bytes jointly take every combined value exactly once while every other
byte stays at the base constant. Properties predict, after R rounds,
byte positions whose XOR-sum is zero and/or pairs of positions whose
coefficient-weighted XOR-sums are equal.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .cipher import CipherParams
from .gf import gf_mul

Position = tuple[int, int]
# ((row, col, weight), (row, col, weight))
EqPair = tuple[tuple[int, int, int], tuple[int, int, int]]

CONVENTION_FULL = "full"        # all R rounds include MixColumns
CONVENTION_SPECIAL = "special"  # round R omits MixColumns


@dataclass(frozen=True)
class CellSymbol:
    """One cell of a property diagram in multiset notation.

    kind: 'C' constant, 'A' active (member of an order-d group), 'S'
    predictable sum, '?' unknown, 'E' equality class member.
    """

    kind: str
    order: int = 0
    group: int = 0
    multiplicity: int = 1
    weight: int = 1

    def label(self) -> str:
        if self.kind == "A":
            tag = f"A{self.order}_{self.group}" if self.order > 1 else "A"
            return tag if self.multiplicity == 1 else f"({tag})^{self.multiplicity}"
        if self.kind == "E":
            return f"Eq{self.group}" if self.weight == 1 else f"{self.weight:02x}*Eq{self.group}"
        return self.kind


@dataclass
class IntegralProperty:
    block_bits: int
    key_bits: int
    order: int
    rounds: int
    active: list[Position]
    zero_sum: list[Position] = field(default_factory=list)
    eq_pairs: list[EqPair] = field(default_factory=list)
    convention: str = CONVENTION_FULL

    def __post_init__(self):
        t = self.block_bits // 32
        if len(set(self.active)) != len(self.active):
            raise ValueError("active positions must be distinct")
        for r, c in self.active:
            if not (0 <= r < 4 and 0 <= c < t):
                raise ValueError(f"position ({r},{c}) outside 4x{t} state")
        if len(self.active) != self.order:
            raise ValueError("order must equal the number of active positions")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    @property
    def params(self) -> CipherParams:
        return CipherParams.for_sizes(self.block_bits, self.key_bits)

    def to_descriptor(self) -> dict:
        return {
            "block_bits": self.block_bits,
            "key_bits": self.key_bits,
            "order": self.order,
            "rounds": self.rounds,
            "active": [list(p) for p in self.active],
            "zero_sum": [list(p) for p in self.zero_sum],
            "eq_pairs": [[list(a), list(b)] for a, b in self.eq_pairs],
            "convention": self.convention,
        }

    @classmethod
    def from_descriptor(cls, d: dict) -> "IntegralProperty":
        return cls(
            block_bits=int(d["block_bits"]),
            key_bits=int(d["key_bits"]),
            order=int(d["order"]),
            rounds=int(d["rounds"]),
            active=[tuple(p) for p in d["active"]],
            zero_sum=[tuple(p) for p in d.get("zero_sum", [])],
            eq_pairs=[(tuple(a), tuple(b)) for a, b in d.get("eq_pairs", [])],
            convention=d.get("convention", CONVENTION_FULL),
        )

    def grid(self) -> list[list[CellSymbol]]:
        """Input-side diagram: active cells as one A^d group, rest constant."""
        t = self.block_bits // 32
        g = [[CellSymbol("C") for _ in range(t)] for _ in range(4)]
        for r, c in self.active:
            g[r][c] = CellSymbol("A", order=self.order, group=0)
        return g


def generate_structure(base: np.ndarray, positions: list[Position]) -> Iterator[np.ndarray]:
    """Stream the 2^{8d} states of a structure in lexicographic counter order.

    The first listed position is the most significant counter byte. Memory
    stays O(1) per yielded state.
    """
    d = len(positions)
    if d < 1:
        raise ValueError("need at least one active position")
    if len(set(positions)) != d:
        raise ValueError("active positions must be distinct")
    rows, t = base.shape
    for r, c in positions:
        if not (0 <= r < rows and 0 <= c < t):
            raise ValueError(f"position ({r},{c}) outside state")
    for counter in range(1 << (8 * d)):
        st = base.copy()
        v = counter
        for r, c in reversed(positions):
            st[r, c] = v & 0xFF
            v >>= 8
        yield st


def xor_accumulate(states: Iterable[np.ndarray]) -> np.ndarray:
    """Byte-wise XOR over a stream of states; empty streams are an error."""
    acc = None
    for st in states:
        acc = st.copy() if acc is None else acc ^ st
    if acc is None:
        raise ValueError("cannot accumulate an empty stream")
    return acc


def check_expectation(sum_state: np.ndarray, prop: IntegralProperty) -> list[tuple[str, bool]]:
    """Per-item verdicts for a structure's accumulated sum.

    Zero-sum items check the byte is 0; Eq items check the weighted sums
    match: gf_mul(w_p, sum[p]) == gf_mul(w_q, sum[q]).
    """
    verdicts = []
    for r, c in prop.zero_sum:
        verdicts.append((f"zero[{r},{c}]", int(sum_state[r, c]) == 0))
    for (pr, pc, pw), (qr, qc, qw) in prop.eq_pairs:
        lhs = gf_mul(pw, int(sum_state[pr, pc]))
        rhs = gf_mul(qw, int(sum_state[qr, qc]))
        verdicts.append((f"eq[{pr},{pc}]*{pw:02x}=[{qr},{qc}]*{qw:02x}", lhs == rhs))
    return verdicts


def rotate_positions(positions: Iterable[Position], shift: int, t: int) -> tuple[Position, ...]:
    return tuple(sorted((r, (c + shift) % t) for r, c in positions))


def orbit(positions: Iterable[Position], t: int) -> list[tuple[Position, ...]]:
    """Distinct column rotations of a position set."""
    seen = []
    for k in range(t):
        rot = rotate_positions(positions, k, t)
        if rot not in seen:
            seen.append(rot)
    return seen
