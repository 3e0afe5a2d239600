"""Distillation primitives, the protocol-tree evaluator and reference protocols.

All yields are in ebits.  A tree is evaluated on an m-pair block; the raw
yield is per block and the rate is the raw yield divided by the number of
pairs in the initial block.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .bellcore import (
    AMP,
    BlockDist,
    ParityMask,
    apply_label_map,
    bcnot_map,
    bit_position,
    entropy,
    mask_parities,
    normalized_entropy,
    tensor,
    werner_spectrum,
)
from .trees import Discard, Hash, Measure, ParityCheck, ProtocolNode, Relabel, TreeError, validate

# Branch probabilities below this are treated as exactly zero.
BRANCH_EPS = 1e-15


def _as_dist(d) -> BlockDist:
    if isinstance(d, BlockDist):
        return d
    return BlockDist.from_spectrum(d)


def _as_mask(mask) -> ParityMask:
    if isinstance(mask, ParityMask):
        return mask
    return ParityMask.from_str(str(mask))


def binary_entropy(p0: float, p1: float) -> float:
    return normalized_entropy([p0, p1])


class Split(NamedTuple):
    """Outcome of an asymptotic parity check; empty branches carry ``None``."""

    mu0: float
    d0: Optional[BlockDist]
    mu1: float
    d1: Optional[BlockDist]
    cost: float


class Measurement(NamedTuple):
    q0: float
    r0: Optional[BlockDist]
    q1: float
    r1: Optional[BlockDist]


def _restrict(d: BlockDist, keep: np.ndarray, mass: float) -> BlockDist:
    return BlockDist._trusted(d.m, np.where(keep, d.p, 0.0) / mass)


def parity_split(d: BlockDist, mask) -> Split:
    """Split ``d`` by the parity <x|mask>, paying S(mu0, mu1) ebits per block."""
    mask = _as_mask(mask)
    if mask.m != d.m:
        raise ValueError(f"mask has {2 * mask.m} bits, block needs {2 * d.m}")
    odd = mask_parities(mask.index, d.m).astype(bool)
    mu1 = float(d.p[odd].sum())
    mu0 = float(d.p[~odd].sum())
    if mu1 < BRANCH_EPS:
        return Split(1.0, _restrict(d, ~odd, mu0), 0.0, None, 0.0)
    if mu0 < BRANCH_EPS:
        return Split(0.0, None, 1.0, _restrict(d, odd, mu1), 0.0)
    total = mu0 + mu1
    mu0, mu1 = mu0 / total, mu1 / total
    return Split(mu0, _restrict(d, ~odd, mu0 * total), mu1, _restrict(d, odd, mu1 * total),
                 binary_entropy(mu0, mu1))


@functools.lru_cache(maxsize=None)
def _measure_gather(m: int, axis: int) -> np.ndarray:
    # [outcome, remaining label, unmeasured bit] -> index into the m-pair vector
    idx = np.arange(4**m).reshape((2,) * (2 * m))
    idx = np.moveaxis(idx, (axis, axis ^ 1), (0, -1)).reshape(2, -1, 2)
    idx.flags.writeable = False
    return idx


def bell_measure(d: BlockDist, pair: int, which: str) -> Measurement:
    """Local Bell measurement of one bit of ``pair``; the pair is destroyed.

    ``r_b`` is the distribution of the remaining m-1 pairs given outcome b,
    with the unmeasured bit of the destroyed pair summed out.
    """
    arr = d.p[_measure_gather(d.m, bit_position(d.m, pair, which))].sum(axis=2)
    rest = d.m - 1
    out = []
    for b in (0, 1):
        q = float(arr[b].sum())
        out.append((q, arr[b] / q) if q >= BRANCH_EPS else (0.0, None))
    (q0, r0), (q1, r1) = out
    total = q0 + q1
    return Measurement(
        q0 / total,
        None if r0 is None else BlockDist._trusted(rest, r0),
        q1 / total,
        None if r1 is None else BlockDist._trusted(rest, r1),
    )


def hashing_yield(d: BlockDist) -> float:
    """m - S(d) ebits per block.  Not clamped: negative means hashing loses."""
    nz = d.p[d.p > 0]
    return d.m + float((nz * np.log2(nz)).sum())


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class Branch:
    path: tuple
    probability: float
    cost: float
    terminal_yield: float


@dataclass
class RateReport:
    rate_per_copy: float
    raw_yield: float
    m_initial: int
    branch_log: list = field(default_factory=list)

    @property
    def total_probability(self) -> float:
        return math.fsum(b.probability for b in self.branch_log)


def evaluate(tree: ProtocolNode, d: BlockDist) -> RateReport:
    """Expected yield of ``tree`` on ``d``.

    PC:      -cost + mu0 Y(child0) + mu1 Y(child1)
    MEAS:    q0 Y(child0) + q1 Y(child1)
    RELABEL: Y(child) on the pushforward
    HASH:    m - S;  DISCARD: 0
    """
    d = _as_dist(d)
    if d.m < 1:
        raise TreeError("cannot evaluate a protocol on an empty block")
    validate(tree, d.m)
    log: list = []
    raw = _yield(tree, d, (), 1.0, 0.0, log)
    return RateReport(raw / d.m, raw, d.m, log)


def _yield(node, d, path, prob, cost, log):
    if isinstance(node, Hash):
        y = hashing_yield(d)
        log.append(Branch(path + ("HASH",), prob, cost, y))
        return y
    if isinstance(node, Discard):
        log.append(Branch(path + ("DISCARD",), prob, cost, 0.0))
        return 0.0
    if isinstance(node, ParityCheck):
        split = parity_split(d, node.mask)
        total = -split.cost
        for b, mu, child_d, child in ((0, split.mu0, split.d0, node.child0),
                                      (1, split.mu1, split.d1, node.child1)):
            if child_d is not None:
                step = path + (f"PC {node.mask}={b}",)
                total += mu * _yield(child, child_d, step, prob * mu, cost + split.cost, log)
        return total
    if isinstance(node, Measure):
        meas = bell_measure(d, node.pair, node.which)
        total = 0.0
        for b, q, child_d, child in ((0, meas.q0, meas.r0, node.child0),
                                     (1, meas.q1, meas.r1, node.child1)):
            if child_d is not None:
                step = path + (f"MEAS {node.pair} {node.which}={b}",)
                total += q * _yield(child, child_d, step, prob * q, cost, log)
        return total
    if isinstance(node, Relabel):
        return _yield(node.child, apply_label_map(node.g, d), path + ("RELABEL",), prob, cost, log)
    raise TreeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Reference protocols on two copies


def asymptotic_recurrence_tree() -> ProtocolNode:
    """Check parity 1010 on two copies, hash the even branch, drop the odd one."""
    return ParityCheck(ParityMask.from_str("1010"), Hash(), Discard())


def two_copy_tree() -> ProtocolNode:
    """Asymptotic recurrence whose odd branch is rescued by measuring the second pair.

    In the odd branch i_1 != i_2, so the amplitude outcome of pair 2 fixes i_1:
    outcome 0 leaves pair 1 in span{10, 11}, outcome 1 in span{00, 01}.  Both
    rank-two remainders are hashed; for Werner input the {10, 11} remainder is
    equally weighted and hashes to exactly zero.
    """
    return ParityCheck(ParityMask.from_str("1010"), Hash(), Measure(1, AMP, Hash(), Hash()))


def _parity_weights(lam: np.ndarray):
    a = lam[0] + lam[1]
    b = lam[2] + lam[3]
    return a * a + b * b, 2.0 * a * b


def _norm_entropy_or_zero(weights) -> float:
    return normalized_entropy(weights) if sum(weights) > 0 else 0.0


def rate_asymptotic_recurrence(d1) -> float:
    """-S(p_odd, p_even)/2 + p_even (1 - S(rho_even)/2), per initial copy."""
    d1 = _as_dist(d1)
    if d1.m != 1:
        raise ValueError("closed form is defined for a single-pair spectrum")
    lam = d1.p
    p_even, p_odd = _parity_weights(lam)
    # rho_even is proportional to lambda_ij lambda_il on labels (i, j, i, l)
    even = [lam[2 * i + j] * lam[2 * i + l] for i in (0, 1) for j in (0, 1) for l in (0, 1)]
    cost = binary_entropy(p_odd, p_even) if p_odd > 0 else 0.0
    return -cost / 2 + p_even * (1 - normalized_entropy(even) / 2)


def rate_2copy(spectrum) -> float:
    """1 - S(lambda) + p_odd/4 [S([l00, l01]) + S([l11, l10])], per initial copy."""
    d1 = _as_dist(spectrum)
    if d1.m != 1:
        raise ValueError("closed form is defined for a single-pair spectrum")
    lam = d1.p
    _, p_odd = _parity_weights(lam)
    extra = _norm_entropy_or_zero([lam[0], lam[1]]) + _norm_entropy_or_zero([lam[3], lam[2]])
    return 1 - entropy(lam) + p_odd / 4 * extra


def rate_hashing(spectrum) -> float:
    return hashing_yield(_as_dist(spectrum))


def odd_branch_dist(spectrum) -> Optional[BlockDist]:
    """Two-copy state after failing the 1010 parity check (None if impossible)."""
    d1 = _as_dist(spectrum)
    return parity_split(tensor(d1, d1), "1010").d1


# ---------------------------------------------------------------------------
# Standard recurrence followed by hashing


def recurrence_step(spectrum, twirl: bool = False):
    """One recurrence round on two copies, built from the label primitives.

    Bilateral CNOT (pair 1 source, pair 2 target), amplitude measurement of
    pair 2, keep the source when the outcome is 0.  With ``twirl`` the output is
    projected back onto the Werner line with the same fidelity.

    Returns ``(p_success, spectrum_out)``.
    """
    d1 = _as_dist(spectrum)
    if d1.m != 1:
        raise ValueError("recurrence acts on a single-pair spectrum")
    pair = apply_label_map(bcnot_map(2, 0, 1), tensor(d1, d1))
    meas = bell_measure(pair, 1, AMP)
    if meas.r0 is None:
        raise ValueError("recurrence step succeeds with probability 0")
    out = meas.r0.p
    if twirl:
        out = werner_spectrum(out[0])
    return meas.q0, BlockDist(1, out)


def rate_recurrence_then_hash(spectrum, rounds: int, twirl: bool = False) -> float:
    """(prod_k p_k / 2) * max(0, 1 - S(final)) after ``rounds`` recurrence rounds."""
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    d1 = _as_dist(spectrum)
    factor = 1.0
    for _ in range(rounds):
        p, d1 = recurrence_step(d1, twirl=twirl)
        factor *= p / 2
    return factor * max(0.0, hashing_yield(d1))


class RecurrenceChoice(NamedTuple):
    rate: float
    rounds: int
    twirl: bool


def best_recurrence_then_hash(spectrum, max_rounds: int = 20,
                              twirl: Union[bool, None] = None) -> RecurrenceChoice:
    """Best recurrence-then-hash rate over 0..max_rounds rounds.

    ``twirl=None`` also maximises over both variants; ties prefer fewer rounds
    and the untwirled variant.
    """
    variants = (False, True) if twirl is None else (bool(twirl),)
    best = RecurrenceChoice(-math.inf, 0, False)
    for tw in variants:
        d1 = _as_dist(spectrum)
        factor = 1.0
        for rounds in range(max_rounds + 1):
            if rounds:
                p, d1 = recurrence_step(d1, twirl=tw)
                factor *= p / 2
            rate = factor * max(0.0, hashing_yield(d1))
            if rate > best.rate:
                best = RecurrenceChoice(rate, rounds, tw)
    return best


def werner_threshold(tol: float = 1e-10) -> float:
    """Fidelity f* where the hashing rate 1 - S(werner(f)) crosses zero (bisection)."""
    lo, hi = 0.5, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if hashing_yield(BlockDist(1, werner_spectrum(mid))) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
