"""Exhaustive search over protocol trees on small blocks.

The value of a block is the best of: hashing it, discarding it, any parity
check that actually splits it, and any local Bell measurement, optionally
preceded by a Bell-preserving label map.  Label maps only matter right before
a measurement: parity checks over all masks and the hashing yield are already
invariant under them.  A relabel-then-measure action reads one bit <x, f> in
the symplectic pairing and destroys a plane K containing f.  The outcome and
the surviving pairs together carry exactly the functionals orthogonal to f,
so every choice of K gives the same remainder up to a label map.  The search
therefore tries one measurement per nonzero f (15 for two pairs).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .bellcore import (
    AMP,
    PHASE,
    BlockDist,
    LabelMap,
    ParityMask,
    apply_label_map,
    enumerate_label_maps,
    mask_parities,
    symplectic_product,
    tensor_power,
    werner_dist,
)
from .protocol import (
    BRANCH_EPS,
    bell_measure,
    best_recurrence_then_hash,
    hashing_yield,
    parity_split,
    rate_2copy,
    rate_asymptotic_recurrence,
    rate_recurrence_then_hash,
)
from .trees import Discard, Hash, Measure, ParityCheck, ProtocolNode, dumps, relabel_then

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_PAIRS = 4
MAX_PAIRS = 6
MAX_CANONICAL_PAIRS = 2
TIE_TOL = 1e-12


class SearchLimitError(ValueError):
    """The block is larger than the configured search supports."""


@dataclass(frozen=True)
class SearchConfig:
    max_pairs: int = MAX_EXHAUSTIVE_PAIRS
    canonicalization: bool = True
    memoize: bool = True
    memo_tolerance: float = 1e-10
    parity_checks: bool = True
    measurements: bool = True
    relabelings: bool = True
    max_depth: Optional[int] = None
    beam_width: Optional[int] = None

    def __post_init__(self):
        if self.max_pairs < 1:
            raise ValueError("max_pairs must be >= 1")
        if self.max_pairs > MAX_PAIRS:
            raise ValueError(f"max_pairs above {MAX_PAIRS} is not supported")
        if self.memo_tolerance <= 0:
            raise ValueError("memo_tolerance must be positive")
        if self.beam_width is not None and self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


# ---------------------------------------------------------------------------
# Action sets


@dataclass(frozen=True)
class MeasureAction:
    g: Optional[LabelMap]
    pair: int
    which: str


def _unit(m: int, t: int) -> int:
    return 1 << (2 * m - 1 - t)


def _symplectic_basis(vectors: list, m: int) -> list:
    """Symplectic basis (e1, f1, e2, f2, ...) of the span of ``vectors``."""
    space = sorted(set(vectors) - {0})
    basis = []
    while space:
        u = space[0]
        v = next(x for x in space if symplectic_product(u, x, m))
        basis += [u, v]
        space = [x for x in space
                 if not symplectic_product(x, u, m) and not symplectic_product(x, v, m)]
    return basis


def _plane_measurement(e: int, f: int, m: int) -> MeasureAction:
    """Relabel so that e -> amp of pair 0 and f -> phase of pair 0, then read the amp bit.

    The bit read is <x, f> in the symplectic pairing.
    """
    for k in range(m):
        amp, phase = _unit(m, 2 * k), _unit(m, 2 * k + 1)
        if {e, f, e ^ f} == {amp, phase, amp ^ phase}:
            if f == phase:
                return MeasureAction(None, k, AMP)
            if f == amp:
                return MeasureAction(None, k, PHASE)
    rest = [x for x in range(1, 4**m)
            if not symplectic_product(x, e, m) and not symplectic_product(x, f, m)]
    basis_cols = [e, f] + _symplectic_basis(rest, m)
    # basis_cols are the images of the standard basis under B; the relabel is B^-1
    b = LabelMap.from_columns(basis_cols, m)
    return MeasureAction(b.inverse(), 0, AMP)


def _coordinate_partner(f: int, m: int) -> Optional[int]:
    """A vector e with <e, f> = 1 in the same pair as f, if f lives on one pair."""
    for k in range(m):
        amp, phase = _unit(m, 2 * k), _unit(m, 2 * k + 1)
        if f in (amp, phase, amp ^ phase):
            return amp if f != amp else phase
    return None


@functools.lru_cache(maxsize=None)
def measurement_actions(m: int, relabelings: bool = True, all_planes: bool = False) -> tuple:
    """Measurement actions on an m-pair block.

    Without relabelings these are the 2m plain amp/phase measurements.  With
    them there is one action per nonzero functional f; ``all_planes`` lists
    every (plane, f) combination instead, which is only useful for checking
    that the plane does not matter.
    """
    if m < 1:
        return ()
    if not relabelings:
        return tuple(MeasureAction(None, k, w) for k in range(m) for w in (AMP, PHASE))
    actions = []
    for f in range(1, 4**m):
        if not all_planes:
            e = _coordinate_partner(f, m)
            if e is None:
                e = next(x for x in range(1, 4**m) if symplectic_product(x, f, m))
            actions.append(_plane_measurement(e, f, m))
            continue
        planes = set()
        for e in range(1, 4**m):
            if symplectic_product(e, f, m):
                plane = frozenset((e, f, e ^ f))
                if plane not in planes:
                    planes.add(plane)
                    actions.append(_plane_measurement(min(plane - {f}), f, m))
    return tuple(actions)


@functools.lru_cache(maxsize=None)
def _all_mask_parities(m: int) -> np.ndarray:
    rows = np.array([mask_parities(mask, m) for mask in range(1, 4**m)], dtype=np.uint8)
    rows.flags.writeable = False
    return rows


def splitting_masks(d: BlockDist) -> list:
    """One mask per distinct nontrivial partition of the support of ``d``.

    Masks whose parity is constant on the support (in particular every mask in
    the span of earlier checks) reveal nothing and cost nothing, so they are
    dropped; masks inducing the same partition are collapsed to the smallest.
    """
    support = d.p > 0
    if support.sum() < 2:
        return []
    par = _all_mask_parities(d.m)
    mu1 = par @ d.p
    useful = (mu1 >= BRANCH_EPS) & (1.0 - mu1 >= BRANCH_EPS)
    patterns = par[:, support]
    patterns = patterns ^ patterns[:, :1]
    idx = np.flatnonzero(useful)
    if idx.size == 0:
        return []
    _, first = np.unique(patterns[idx], axis=0, return_index=True)
    return sorted(int(i) + 1 for i in idx[first])


# ---------------------------------------------------------------------------
# Canonicalization


class CanonicalForm(NamedTuple):
    key: bytes
    g: LabelMap
    stabilizer_order: int


@functools.lru_cache(maxsize=None)
def _affine_tables(m: int):
    """Inverse permutations of every affine group element, one column per element."""
    group = enumerate_label_maps(m)
    lin = group.permutations
    shifts = np.arange(4**m, dtype=np.int64)
    perms = (lin[:, None, :] ^ shifts[None, :, None]).reshape(-1, 4**m)
    inv = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    inv[rows, perms] = np.arange(4**m)[None, :]
    # column-major so that one column of every pushforward is a contiguous read
    inv = np.ascontiguousarray(inv.T)
    inv.flags.writeable = False
    return inv, group, shifts


@functools.lru_cache(maxsize=65536)
def _affine_element(m: int, lin_i: int, shift: int) -> LabelMap:
    return LabelMap.from_columns(enumerate_label_maps(m).codes[lin_i].tolist(), m, translation=shift)


def canonicalize(d: BlockDist, tol: float = 1e-10) -> CanonicalForm:
    """Key shared by all relabellings of ``d``, with the map reaching the representative.

    The representative is the lexicographically smallest pushforward over the
    full affine group (linear maps and translations), after rounding entries
    to multiples of ``tol``.
    """
    if d.m == 0:
        return CanonicalForm(b"m0", None, 1)
    if d.m > MAX_CANONICAL_PAIRS:
        raise SearchLimitError(
            f"canonicalization enumerates the affine group only for m <= {MAX_CANONICAL_PAIRS}")
    inv, group, shifts = _affine_tables(d.m)
    rounded = np.round(d.p / tol).astype(np.int64)
    # lexicographic minimum, gathering one column at a time over the survivors
    cand = None
    for col in range(inv.shape[0]):
        vals = rounded[inv[col] if cand is None else inv[col, cand]]
        keep = np.flatnonzero(vals == vals.min())
        cand = keep if cand is None else cand[keep]
        if cand.size == 1:
            break
    best = int(cand[0])
    stabilizer = int(cand.size)
    if stabilizer > 1:
        logger.debug("canonical form for m=%d has stabilizer of order %d", d.m, stabilizer)
    lin_i, shift_i = divmod(best, shifts.size)
    g = _affine_element(d.m, lin_i, int(shifts[shift_i]))
    key = bytes([d.m]) + rounded[inv[:, best]].tobytes()
    return CanonicalForm(key, g, stabilizer)


# ---------------------------------------------------------------------------
# Optimizer


@dataclass
class _Best:
    value: float
    depth: int
    tree: ProtocolNode
    _text: Optional[str] = field(default=None, repr=False)

    @property
    def text(self) -> str:
        if self._text is None:
            self._text = dumps(self.tree)
        return self._text

    def beats(self, other: "_Best") -> bool:
        if self.value > other.value + TIE_TOL:
            return True
        if self.value < other.value - TIE_TOL:
            return False
        if self.depth != other.depth:
            return self.depth < other.depth
        return self.text < other.text


class OptimizeResult(NamedTuple):
    best_rate: float
    best_tree: ProtocolNode


@dataclass
class SearchStats:
    expanded: int = 0
    memo_hits: int = 0


class Optimizer:
    """Recursive search with optional memoization keyed by canonical forms."""

    def __init__(self, cfg: SearchConfig = SearchConfig()):
        self.cfg = cfg
        self.memo: dict = {}
        self._canon_cache: dict = {}
        self.stats = SearchStats()

    def _use_canonical(self, m: int) -> bool:
        # canonical keys are only sound when the value is invariant under relabelling
        cfg = self.cfg
        return (cfg.canonicalization and cfg.relabelings and cfg.measurements
                and 1 <= m <= MAX_CANONICAL_PAIRS)

    def optimize(self, d: BlockDist) -> OptimizeResult:
        if d.m < 1:
            raise ValueError("cannot optimize an empty block")
        if d.m > self.cfg.max_pairs:
            raise SearchLimitError(f"block of {d.m} pairs exceeds max_pairs={self.cfg.max_pairs}")
        if d.m > MAX_EXHAUSTIVE_PAIRS and self.cfg.beam_width is None:
            raise SearchLimitError(
                f"blocks above {MAX_EXHAUSTIVE_PAIRS} pairs need a beam_width (guess-guided search)")
        best = self._solve(d, self.cfg.max_depth)
        return OptimizeResult(best.value / d.m, best.tree)

    def _solve(self, d: BlockDist, depth_left: Optional[int]) -> _Best:
        if not self.cfg.memoize:
            return self._expand(d, depth_left)
        rounded = np.round(d.p / self.cfg.memo_tolerance).astype(np.int64)
        exact_key = (d.m, rounded.tobytes())
        if self._use_canonical(d.m):
            canon = self._canon_cache.get(exact_key)
            if canon is None:
                canon = self._canon_cache[exact_key] = canonicalize(d, self.cfg.memo_tolerance)
            key = (canon.key, depth_left)
            hit = self.memo.get(key)
            if hit is None:
                hit = self._expand(apply_label_map(canon.g, d), depth_left)
                self.memo[key] = hit
            else:
                self.stats.memo_hits += 1
            return _Best(hit.value, hit.depth, relabel_then(canon.g, hit.tree))
        key = exact_key + (depth_left,)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._expand(d, depth_left)
        else:
            self.stats.memo_hits += 1
        return hit

    def _expand(self, d: BlockDist, depth_left: Optional[int]) -> _Best:
        self.stats.expanded += 1
        best = _Best(0.0, 0, Discard())
        if d.m == 0:
            return best
        hashed = _Best(hashing_yield(d), 0, Hash())
        if hashed.beats(best):
            best = hashed
        if depth_left is not None and depth_left <= 0:
            return best
        child_depth = None if depth_left is None else depth_left - 1

        actions = self._candidate_actions(d)
        for kind, action, branches in actions:
            value = 0.0
            deepest = 0
            children = []
            for weight, child in branches:
                if child is None or child.m == 0:
                    children.append(Discard())
                    continue
                sub = self._solve(child, child_depth)
                value += weight * sub.value
                deepest = max(deepest, sub.depth)
                children.append(sub.tree)
            if kind == "pc":
                mask, cost = action
                value -= cost
                tree = ParityCheck(ParityMask.from_index(mask, d.m), children[0], children[1])
            else:
                tree = Measure(action.pair, action.which, children[0], children[1])
                if action.g is not None:
                    tree = relabel_then(action.g, tree)
            cand = _Best(value, deepest + 1, tree)
            if cand.beats(best):
                best = cand
        return best

    def _candidate_actions(self, d: BlockDist) -> list:
        cfg = self.cfg
        actions = []
        if cfg.parity_checks:
            for mask in splitting_masks(d):
                split = parity_split(d, ParityMask.from_index(mask, d.m))
                actions.append(("pc", (mask, split.cost),
                                [(split.mu0, split.d0), (split.mu1, split.d1)]))
        if cfg.measurements:
            for action in measurement_actions(d.m, cfg.relabelings):
                target = d if action.g is None else apply_label_map(action.g, d)
                meas = bell_measure(target, action.pair, action.which)
                actions.append(("meas", action, [(meas.q0, meas.r0), (meas.q1, meas.r1)]))
        if cfg.beam_width is not None and len(actions) > cfg.beam_width:
            scores = [_one_step_score(kind, action, branches) for kind, action, branches in actions]
            order = sorted(range(len(actions)), key=lambda i: -scores[i])
            actions = [actions[i] for i in sorted(order[: cfg.beam_width])]
        return actions


def _one_step_score(kind, action, branches) -> float:
    score = -action[1] if kind == "pc" else 0.0
    for weight, child in branches:
        if child is not None:
            score += weight * max(0.0, hashing_yield(child))
    return score


def optimize(d: BlockDist, cfg: SearchConfig = SearchConfig()) -> OptimizeResult:
    """Best rate per initial copy over all protocol trees, and a tree achieving it."""
    return Optimizer(cfg).optimize(d)


# ---------------------------------------------------------------------------
# Werner curves

CURVE_COLUMNS = ("f", "hash", "asym_rec", "two_copy", "rec_hash", "optimized")


@dataclass
class CurveTable:
    rows: list
    trees: list
    violations: list

    def column(self, name: str) -> list:
        i = CURVE_COLUMNS.index(name)
        return [row[i] for row in self.rows]


def werner_curve(f_grid, cfg: SearchConfig = SearchConfig(), copies: int = 2) -> CurveTable:
    """Rates of every protocol family along the Werner line.

    Columns: hashing 1 - S, asymptotic recurrence, the two-copy protocol, the
    best recurrence-then-hash schedule, and the search optimum on ``copies``
    copies.  Each column should be nondecreasing in f; violations are logged
    and returned, not raised.
    """
    grid = [float(f) for f in f_grid]
    for f in grid:
        if not 0.5 < f <= 1.0:
            raise ValueError(f"grid point {f} is outside the entangled Werner range (1/2, 1]")
    rows, trees = [], []
    for f in grid:
        d1 = werner_dist(f)
        result = optimize(tensor_power(d1, copies), cfg)
        rows.append((f, hashing_yield(d1), rate_asymptotic_recurrence(d1), rate_2copy(d1),
                     best_recurrence_then_hash(d1).rate, result.best_rate))
        trees.append(result.best_tree)
    violations = []
    order = sorted(range(len(grid)), key=lambda i: grid[i])
    for col in range(1, len(CURVE_COLUMNS)):
        for a, b in zip(order, order[1:]):
            if rows[b][col] < rows[a][col] - TIE_TOL:
                violations.append((CURVE_COLUMNS[col], grid[a], grid[b]))
                logger.warning("column %s decreases between f=%g and f=%g",
                               CURVE_COLUMNS[col], grid[a], grid[b])
    return CurveTable(rows, trees, violations)


def reference_rates(d1: BlockDist) -> dict:
    """Rates of the hand-built two-copy protocols, for comparison with the search."""
    return {
        "hash": hashing_yield(d1),
        "two_copy": rate_2copy(d1),
        "asym_rec": rate_asymptotic_recurrence(d1),
        "rec_hash_1": max(rate_recurrence_then_hash(d1, 0), rate_recurrence_then_hash(d1, 1)),
        "rec_hash_best": best_recurrence_then_hash(d1).rate,
    }


__all__ = [
    "CURVE_COLUMNS",
    "CanonicalForm",
    "CurveTable",
    "MeasureAction",
    "OptimizeResult",
    "Optimizer",
    "SearchConfig",
    "SearchLimitError",
    "canonicalize",
    "measurement_actions",
    "optimize",
    "reference_rates",
    "splitting_masks",
    "werner_curve",
]
