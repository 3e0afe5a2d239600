"""Turning an entanglement-assisted rate into a self-contained schedule.

A slow activating protocol of rate k turns ceil(sqrt(n)/k) extra copies into
sqrt(n) ebits.  Those ebits are lent to an assisted protocol of rate r that
processes the n copies in geometrically growing blocks.  Each block of b
copies borrows b ebits and returns (1 + r) b.  The borrowed sqrt(n) ebits are
handed back at the end, so the net output is r n ebits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

BOUND_FORMAT = ".12g"


def _exact(x: float) -> Fraction:
    # shortest decimal repr, so that r = 0.1 gives block sizes 100, 110, 121 exactly
    return Fraction(repr(float(x)))


def _check_positive(name: str, x: float) -> None:
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise ValueError(f"{name} must be a positive finite number, got {x!r}")


def _check_n(n: int) -> int:
    if isinstance(n, float):
        if not n.is_integer():
            raise ValueError(f"n must be an integer, got {n!r}")
        n = int(n)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return n


def activating_copies(n: int, k: float) -> int:
    """ceil(floor(sqrt(n)) / k)."""
    n = _check_n(n)
    _check_positive("k", k)
    return math.ceil(math.isqrt(n) / _exact(k))


@dataclass(frozen=True)
class BootstrapPlan:
    n: int
    k: float
    r: float
    blocks: tuple
    activating_copies: int

    @property
    def seed_ebits(self) -> int:
        return math.isqrt(self.n)

    def replay(self) -> list:
        """Ebit balance before the first block and after every block.

        Raises if a block would borrow more ebits than the pool holds.
        """
        pool = Fraction(self.seed_ebits)
        gain = 1 + _exact(self.r)
        balances = [pool]
        for b in self.blocks:
            if b > pool:
                raise RuntimeError(f"block of {b} copies needs more than the {float(pool)} ebits held")
            pool = pool - b + gain * b
            balances.append(pool)
        return balances

    @property
    def effective_rate(self) -> float:
        """Net ebits (final pool minus the borrowed seed) per copy consumed."""
        net = self.replay()[-1] - self.seed_ebits
        return float(net / (self.n + self.activating_copies))


def make_plan(n: int, k: float, r: float) -> BootstrapPlan:
    """Geometric block schedule for n copies with assisted rate r and activating rate k.

    Block t has floor((1 + r)^t sqrt(n)) copies, capped by the ebits in the
    pool and by the copies left.  Whatever is left once the next block would
    overrun n becomes the last block.
    """
    n = _check_n(n)
    _check_positive("k", k)
    _check_positive("r", r)
    s = math.isqrt(n)
    gain = 1 + _exact(r)
    pool = Fraction(s)
    blocks = []
    remaining = n
    target = Fraction(s)
    while remaining:
        b = min(math.floor(target), math.floor(pool), remaining)
        blocks.append(b)
        remaining -= b
        pool += (gain - 1) * b
        target *= gain
    return BootstrapPlan(n, float(k), float(r), tuple(blocks), activating_copies(n, k))


def effective_rate(n: int, k: float, r: float) -> float:
    """Closed form of ``make_plan(n, k, r).effective_rate``: r n / (n + ceil(sqrt(n) / k)).

    Every copy ends up in some block, so the net gain is r n.
    """
    n = _check_n(n)
    _check_positive("r", r)
    act = activating_copies(n, k)
    return float(_exact(r) * n / (n + act))


def success_bound(n: int, p_activating: Callable[[int], float], k_err: float, c: float) -> float:
    """p(sqrt n) (1 - k_err exp(-c sqrt n))^sqrt(n), with sqrt n = floor(sqrt(n)).

    Evaluated in log space.  When k_err exp(-c sqrt n) >= 1 the typicality
    factor gives no information and the bound is 0.
    """
    n = _check_n(n)
    _check_positive("k_err", k_err)
    _check_positive("c", c)
    s = math.isqrt(n)
    p = float(p_activating(s))
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p_activating({s}) = {p} is not a probability")
    if p == 0.0:
        return 0.0
    log_fail = math.log(k_err) - c * s
    if log_fail >= 0.0:
        return 0.0
    log_bound = math.log(p) + s * math.log1p(-math.exp(log_fail))
    return min(1.0, max(0.0, math.exp(log_bound)))


@dataclass(frozen=True)
class SuccessBound:
    n: int
    p_activating: Callable[[int], float]
    k_err: float
    c: float

    @property
    def bound(self) -> float:
        return success_bound(self.n, self.p_activating, self.k_err, self.c)


def always_succeeds(_: int) -> float:
    return 1.0


BOOTSTRAP_COLUMNS = ("n", "activating_copies", "blocks", "effective_rate", "success_bound")


def bootstrap_row(n: int, k: float, r: float, k_err: float, c: float,
                  p_activating: Callable[[int], float] = always_succeeds) -> tuple:
    plan = make_plan(n, k, r)
    return (plan.n, plan.activating_copies, len(plan.blocks), plan.effective_rate,
            success_bound(n, p_activating, k_err, c))


def bootstrap_csv(rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOOTSTRAP_COLUMNS)
    for n, act, blocks, rate, bound in rows:
        w.writerow([n, act, blocks, format(rate, BOUND_FORMAT), format(bound, BOUND_FORMAT)])
    return buf.getvalue()


__all__ = [
    "BOOTSTRAP_COLUMNS",
    "BootstrapPlan",
    "SuccessBound",
    "activating_copies",
    "always_succeeds",
    "bootstrap_csv",
    "bootstrap_row",
    "effective_rate",
    "make_plan",
    "success_bound",
]
