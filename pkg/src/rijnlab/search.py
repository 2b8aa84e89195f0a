"""Empirical verification and exhaustive search of integral properties.

The search enumerates active-position sets, encrypts one structure per
candidate per trial under fresh random keys/constants, and keeps
candidates whose zero-sum byte mask (intersected across trials) stays
non-empty. Sums are also scanned for weighted equalities between byte
pairs (the Eq-class properties, weights drawn from the MixColumns
coefficients) that hold in every trial without being jointly zero.

Every discovered set is annotated with whether it is minimal, i.e. does
not contain a lower-order discovered set: any superset of a property is
itself a property (a 2^{8d} structure splits into 2^8 copies of each
contained structure), so supersets carry no new information.
"""

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .batch import structure_xor_sum
from .cipher import CipherParams, key_schedule
from .gf import MUL_TABLE
from .integral import (
    CONVENTION_FULL,
    CONVENTION_SPECIAL,
    IntegralProperty,
    Position,
    rotate_positions,
)

MAX_ENUMERABLE_ORDER = 4

# projectively distinct weight pairs over the MixColumns coefficient set
EQ_WEIGHT_PAIRS = ((1, 1), (1, 2), (1, 3), (2, 1), (3, 1), (2, 3), (3, 2))


@dataclass
class SearchConfig:
    params: CipherParams
    order: int
    rounds: int = 4
    trials: int = 5
    seed: int = 0
    candidates: list[tuple[Position, ...]] | None = None
    eq_scan: bool | None = None   # default: on for order <= 2
    full_eq_weights: bool = False
    convention: str = CONVENTION_FULL

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.order <= MAX_ENUMERABLE_ORDER:
            raise ValueError(
                f"order {self.order} not enumerable; structures need 2^(8d) <= 2^32 texts")

    @property
    def do_eq_scan(self) -> bool:
        return self.order <= 2 if self.eq_scan is None else self.eq_scan


@dataclass
class Discovery:
    prop: IntegralProperty
    minimal: bool = True
    contains: list[tuple[Position, ...]] = field(default_factory=list)


@dataclass
class SearchResult:
    block_bits: int
    key_bits: int
    order: int
    rounds: int
    trials: int
    seed: int
    convention: str
    properties: list[Discovery]
    eq_only: list[Discovery]
    lower_order_sets: dict[int, list[tuple[Position, ...]]]
    candidates_scanned: int
    screen_survivors: int
    encryptions: int
    wall_time: float

    @property
    def minimal_properties(self) -> list[Discovery]:
        return [d for d in self.properties if d.minimal]

    def to_report(self) -> dict:
        return {
            "block_bits": self.block_bits,
            "key_bits": self.key_bits,
            "order": self.order,
            "rounds": self.rounds,
            "trials": self.trials,
            "seed": self.seed,
            "convention": self.convention,
            "property_count": len(self.properties),
            "minimal_property_count": len(self.minimal_properties),
            "eq_only_count": len(self.eq_only),
            "candidates_scanned": self.candidates_scanned,
            "screen_survivors": self.screen_survivors,
            "encryptions": self.encryptions,
            "wall_time_s": round(self.wall_time, 3),
            "properties": [
                dict(d.prop.to_descriptor(), minimal=d.minimal,
                     contains=[[list(p) for p in s] for s in d.contains])
                for d in self.properties
            ],
            "eq_only": [
                dict(d.prop.to_descriptor(), minimal=d.minimal,
                     contains=[[list(p) for p in s] for s in d.contains])
                for d in self.eq_only
            ],
        }

    def csv_rows(self) -> list[str]:
        rows = ["block_bits,order,rounds,kind,minimal,active,zero_sum,eq_pairs"]
        for kind, items in (("zero", self.properties), ("eq", self.eq_only)):
            for d in items:
                p = d.prop
                act = ";".join(f"{r}.{c}" for r, c in p.active)
                zs = ";".join(f"{r}.{c}" for r, c in p.zero_sum)
                eq = ";".join(f"{a[0]}.{a[1]}x{a[2]:02x}={b[0]}.{b[1]}x{b[2]:02x}"
                              for a, b in p.eq_pairs)
                rows.append(f"{self.block_bits},{p.order},{p.rounds},{kind},"
                            f"{int(d.minimal)},{act},{zs},{eq}")
        return rows


@dataclass
class VerifyResult:
    passed: bool
    trials: int
    per_trial: list[list[tuple[str, bool]]]
    encryptions: int
    false_positive_log2: float

    @property
    def confidence(self) -> float:
        return 1.0 - 2.0 ** self.false_positive_log2


def all_positions(t: int) -> list[Position]:
    # column-major, matching the byte numbering of messages
    return [(r, c) for c in range(t) for r in range(4)]


def smoke_candidates(params: CipherParams, order: int) -> list[tuple[Position, ...]]:
    """One column-orbit of the canonical collision shape: rows 0..d-1 placed
    so ShiftRows sends them into a single column."""
    offs = params.shift_offsets
    t = params.block_cols
    shape = [(r, offs[r] % t) for r in range(order)]
    return [rotate_positions(shape, k, t) for k in range(t)]


def _trial_materials(cfg: SearchConfig, trial: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, cfg.rounds, cfg.order, trial]))
    key = rng.bytes(4 * cfg.params.key_cols)
    base = rng.integers(0, 256, size=(4, cfg.params.block_cols), dtype=np.uint8)
    return key_schedule(key, cfg.params), base


def _eq_relations(sums_flat: np.ndarray, weight_pairs, full_weights: bool) -> set:
    """Relations (p, q, wp, wq) with gf(wp)*sum[p] == gf(wq)*sum[q]; p < q."""
    rel = set()
    pairs = [(1, w) for w in range(1, 256)] if full_weights else weight_pairs
    for wp, wq in pairs:
        lhs = MUL_TABLE[wp][sums_flat]
        rhs = MUL_TABLE[wq][sums_flat]
        ps, qs = np.nonzero(np.triu(lhs[:, None] == rhs[None, :], k=1))
        for p, q in zip(ps.tolist(), qs.tolist()):
            rel.add((p, q, wp, wq))
    return rel


def verify_property(prop: IntegralProperty, trials: int = 5, seed: int = 0) -> VerifyResult:
    """Encrypt fresh structures under fresh keys; pass iff every expected
    verdict holds in every trial."""
    if prop.order > MAX_ENUMERABLE_ORDER:
        raise ValueError(f"order {prop.order} not enumerable (needs 2^{8 * prop.order} texts)")
    params = prop.params
    cfg = SearchConfig(params, prop.order, rounds=prop.rounds, trials=trials, seed=seed)
    final_special = prop.convention == CONVENTION_SPECIAL
    from .integral import check_expectation
    per_trial = []
    enc = 0
    ok = True
    for i in range(trials):
        rk, base = _trial_materials(cfg, i)
        s = structure_xor_sum(params, rk, base, prop.active, prop.rounds, final_special)
        enc += 1 << (8 * prop.order)
        verdicts = check_expectation(s, prop)
        per_trial.append(verdicts)
        ok = ok and all(v for _, v in verdicts)
    n_items = max(1, len(prop.zero_sum) + len(prop.eq_pairs))
    return VerifyResult(ok, trials, per_trial, enc, -8.0 * trials * n_items)


def search_properties(cfg: SearchConfig, progress=None) -> SearchResult:
    """Screen every candidate position set with one trial, confirm
    survivors with the remaining trials, intersecting masks and relations."""
    t0 = time.perf_counter()
    params = cfg.params
    t = params.block_cols
    final_special = cfg.convention == CONVENTION_SPECIAL
    positions = all_positions(t)
    cands = (cfg.candidates if cfg.candidates is not None
             else [tuple(c) for c in combinations(positions, cfg.order)])
    per_struct = 1 << (8 * cfg.order)

    materials = [_trial_materials(cfg, i) for i in range(cfg.trials)]

    # candidate -> [mask(4,t) bool, eq relation set, nonzero-witness set]
    state: dict[tuple[Position, ...], list] = {}
    enc = 0
    for ci, cand in enumerate(cands):
        rk, base = materials[0]
        s = structure_xor_sum(params, rk, base, list(cand), cfg.rounds, final_special)
        enc += per_struct
        mask = s == 0
        eq = set()
        witness = set()
        if cfg.do_eq_scan:
            sums = s[tuple(np.array(positions).T)]  # flat, column-major order
            eq = _eq_relations(sums, EQ_WEIGHT_PAIRS, cfg.full_eq_weights)
            witness = {r for r in eq if int(MUL_TABLE[r[2]][sums[r[0]]]) != 0}
        if mask.any() or eq:
            state[cand] = [mask, eq, witness]
        if progress and (ci + 1) % 256 == 0:
            progress(ci + 1, len(cands), len(state), enc)
    screen_survivors = len(state)

    for trial in range(1, cfg.trials):
        rk, base = materials[trial]
        dead = []
        for ci, (cand, st) in enumerate(state.items()):
            s = structure_xor_sum(params, rk, base, list(cand), cfg.rounds, final_special)
            enc += per_struct
            st[0] &= s == 0
            if st[1]:
                sums = s[tuple(np.array(positions).T)]
                rel = _eq_relations(sums, EQ_WEIGHT_PAIRS, cfg.full_eq_weights)
                st[1] &= rel
                st[2] = {r for r in st[1]
                         if r in st[2] or int(MUL_TABLE[r[2]][sums[r[0]]]) != 0}
            if not st[0].any() and not st[1]:
                dead.append(cand)
        for cand in dead:
            del state[cand]
        if progress:
            progress(len(cands), len(cands), len(state), enc, trial)

    lower = _lower_order_property_sets(cfg, progress)
    properties: list[Discovery] = []
    eq_only: list[Discovery] = []
    for cand, (mask, eq, witness) in state.items():
        zero_sum = [(int(r), int(c)) for r, c in zip(*np.nonzero(mask))]
        eq_pairs = sorted(
            ((positions[p][0], positions[p][1], wp), (positions[q][0], positions[q][1], wq))
            for (p, q, wp, wq) in eq if (p, q, wp, wq) in witness)
        contains = [s for order_sets in lower.values() for s in order_sets
                    if set(s) < set(cand)]
        disc = Discovery(
            IntegralProperty(
                block_bits=params.block_bits, key_bits=params.key_bits,
                order=cfg.order, rounds=cfg.rounds, active=list(cand),
                zero_sum=zero_sum, eq_pairs=eq_pairs, convention=cfg.convention),
            minimal=not contains, contains=contains)
        if zero_sum:
            properties.append(disc)
        elif eq_pairs:
            eq_only.append(disc)

    return SearchResult(
        block_bits=params.block_bits, key_bits=params.key_bits,
        order=cfg.order, rounds=cfg.rounds, trials=cfg.trials, seed=cfg.seed,
        convention=cfg.convention,
        properties=properties, eq_only=eq_only, lower_order_sets=lower,
        candidates_scanned=len(cands), screen_survivors=screen_survivors,
        encryptions=enc, wall_time=time.perf_counter() - t0)


def _lower_order_property_sets(cfg: SearchConfig, progress=None) -> dict:
    """Zero-sum and Eq property sets at orders 1..d-1 (for minimality).

    Only run for a full-enumeration search; explicit candidate subsets get
    no containment annotation.
    """
    lower: dict[int, list[tuple[Position, ...]]] = {}
    if cfg.candidates is not None:
        return lower
    for order in range(1, cfg.order):
        sub = SearchConfig(cfg.params, order, rounds=cfg.rounds, trials=cfg.trials,
                           seed=cfg.seed, eq_scan=True, convention=cfg.convention)
        res = search_properties(sub)
        lower[order] = sorted({tuple(sorted(d.prop.active))
                               for d in res.properties + res.eq_only})
    return lower


def find_eq_properties(cfg: SearchConfig) -> SearchResult:
    """Search reporting only Eq-pair findings (pairs never jointly zero)."""
    cfg = SearchConfig(cfg.params, cfg.order, cfg.rounds, cfg.trials, cfg.seed,
                       cfg.candidates, eq_scan=True,
                       full_eq_weights=cfg.full_eq_weights, convention=cfg.convention)
    res = search_properties(cfg)
    res.properties = [d for d in res.properties if d.prop.eq_pairs]
    return res


def shift_closure_holds(result: SearchResult) -> bool:
    """Discovered sets must map to discovered sets under column rotation."""
    t = result.block_bits // 32
    found = {tuple(sorted(d.prop.active)) for d in result.properties}
    for s in found:
        for k in range(1, t):
            if rotate_positions(s, k, t) not in found:
                return False
    return True
