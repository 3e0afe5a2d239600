"""Finite-copy sampling checks of the parity-check picture.

Random streams come from numpy's ``default_rng`` (PCG64) seeded with a
``SeedSequence`` built from ``[seed, stream]``, where the stream index is the
trial or chunk number.  Results therefore do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .bellcore import (
    BellLabel,
    BlockDist,
    LabelString,
    ParityMask,
    bcnot,
    mask_parities,
    swap_map,
    tensor_power,
)

MAX_ENUM_PAIRS = 10
CHUNK = 1 << 16
EXACT = "exact"
SAMPLED = "sampled"


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator number ``index`` derived from ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


@dataclass(frozen=True)
class SampledEnsemble:
    """n Bell pairs with labels drawn i.i.d. from a single-pair spectrum."""

    n: int
    labels: tuple
    rng_seed: Optional[int] = None

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) != self.n:
            raise ValueError(f"ensemble of {self.n} pairs given {len(labels)} labels")
        if not all(isinstance(x, BellLabel) for x in labels):
            raise TypeError("labels must be BellLabel instances")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def sample(cls, spectrum, n: int, seed: int) -> "SampledEnsemble":
        d = _single_pair(spectrum)
        draws = stream(seed, 0).choice(4, size=n, p=d.p)
        return cls(n, tuple(BellLabel(int(x) >> 1, int(x) & 1) for x in draws), seed)

    @classmethod
    def from_string(cls, s: Union[LabelString, str]) -> "SampledEnsemble":
        if isinstance(s, str):
            s = LabelString.from_str(s)
        return cls(s.m, tuple(s.pairs()))

    def to_string(self) -> LabelString:
        return LabelString.from_pairs((x.amp, x.phase) for x in self.labels)


def _single_pair(spectrum) -> BlockDist:
    d = spectrum if isinstance(spectrum, BlockDist) else BlockDist.from_spectrum(spectrum)
    if d.m != 1:
        raise ValueError(f"expected a single-pair spectrum, got m={d.m}")
    return d


def direct_parity(s: LabelString, mask: ParityMask) -> int:
    """<S|M> mod 2 by plain arithmetic."""
    return sum(a & b for a, b in zip(s.bits, mask.bits)) % 2


def simulate_parity_check(e: SampledEnsemble, mask: Union[ParityMask, str]) -> int:
    """Read the parity <S|M> with bilateral CNOTs into a fresh ancilla pair.

    The ancilla starts in label (0,0) and is always the target, so its phase
    bit stays 0 and the ensemble pairs are never changed.  An amp bit is
    collected directly; a phase bit is first moved into the amp slot with a
    local amp/phase swap on that pair, and swapped back afterwards.
    """
    if isinstance(mask, str):
        mask = ParityMask.from_str(mask)
    if mask.m != e.n:
        raise ValueError(f"mask has {len(mask.bits)} bits, ensemble needs {2 * e.n}")
    original = e.to_string()
    state = LabelString(original.bits + (0, 0))
    ancilla = e.n
    for k in range(e.n):
        if mask.bits[2 * k]:
            state = bcnot(k, ancilla, state)
        if mask.bits[2 * k + 1]:
            swap = swap_map(e.n + 1, k)
            state = swap.apply(bcnot(k, ancilla, swap.apply(state)))
    if state.bits[: 2 * e.n] != original.bits:
        raise RuntimeError("parity check disturbed the ensemble")
    if state.bits[2 * e.n + 1] != 0:
        raise RuntimeError("ancilla phase bit was flipped")
    return state.bits[2 * e.n]


# ---------------------------------------------------------------------------
# Residual entropy after random parity checks


def random_independent_masks(rng: np.random.Generator, n: int, count: int) -> list:
    """``count`` uniformly drawn, linearly independent nonzero masks on 2n bits."""
    if count > 2 * n:
        raise ValueError(f"at most {2 * n} independent masks exist on {n} pairs")
    basis: list = []
    masks: list = []
    while len(masks) < count:
        v = int(rng.integers(1, 4**n))
        r = v
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            masks.append(v)
    return masks


def _conditional_entropy(p: np.ndarray, syndrome: np.ndarray) -> float:
    """H(X | syndrome(X)) for X ~ p, using -sum p log2(p / P(class))."""
    classes = np.bincount(syndrome, weights=p)
    nz = p > 0
    ratio = p[nz] / classes[syndrome[nz]]
    return float(-(p[nz] * np.log2(ratio)).sum())


def _posterior_entropy(p: np.ndarray, consistent: np.ndarray) -> float:
    w = p[consistent]
    w = w[w > 0] / w.sum()
    return float(-(w * np.log2(w)).sum())


def residual_entropy_samples(spectrum, n: int, checks: int, trials: int, seed: int,
                             method: str = EXACT) -> np.ndarray:
    """Residual entropy after k = 0..checks random independent parity checks.

    Returns an array of shape (trials, checks + 1).  Each trial draws its own
    masks.  With ``method="sampled"`` it also draws the hidden string and
    records the entropy of the posterior consistent with the observed
    parities.  With ``method="exact"`` the posterior entropy is averaged over
    outcomes in closed form, i.e. H(X | first k parities), which is the
    expectation of the sampled value.
    """
    if not 1 <= n <= MAX_ENUM_PAIRS:
        raise ValueError(f"n must be in 1..{MAX_ENUM_PAIRS} to enumerate 4^n strings")
    if checks < 0 or trials < 1:
        raise ValueError("checks must be >= 0 and trials >= 1")
    if checks > 2 * n:
        raise ValueError(f"at most {2 * n} independent checks exist on {n} pairs")
    if method not in (EXACT, SAMPLED):
        raise ValueError(f"unknown method {method!r}")
    prior = tensor_power(_single_pair(spectrum), n).p
    out = np.empty((trials, checks + 1))
    for t in range(trials):
        rng = stream(seed, t)
        masks = random_independent_masks(rng, n, checks)
        syndrome = np.zeros(prior.size, dtype=np.int64)
        if method == SAMPLED:
            hidden = int(rng.choice(prior.size, p=prior))
            consistent = np.ones(prior.size, dtype=bool)
            out[t, 0] = _posterior_entropy(prior, consistent)
        else:
            out[t, 0] = _conditional_entropy(prior, syndrome)
        for k, mask in enumerate(masks, 1):
            par = mask_parities(mask, n)
            if method == SAMPLED:
                consistent &= par == par[hidden]
                out[t, k] = _posterior_entropy(prior, consistent)
            else:
                syndrome |= par.astype(np.int64) << (k - 1)
                out[t, k] = _conditional_entropy(prior, syndrome)
    return out


class EntropyCurve(NamedTuple):
    mean: list
    stddev: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "mean_residual_entropy_bits", "stddev"])
        for k, (mu, sd) in enumerate(zip(self.mean, self.stddev)):
            w.writerow([k, f"{mu:.12g}", f"{sd:.12g}"])
        return buf.getvalue()


def entropy_curve(spectrum, n: int, checks: int, trials: int, seed: int,
                  method: str = EXACT) -> EntropyCurve:
    samples = residual_entropy_samples(spectrum, n, checks, trials, seed, method)
    sd = samples.std(axis=0, ddof=1) if trials > 1 else np.zeros(checks + 1)
    return EntropyCurve(samples.mean(axis=0).tolist(), sd.tolist())


def residual_entropy_curve(spectrum, n: int, checks: int, trials: int, seed: int,
                           method: str = EXACT) -> list:
    """Mean residual entropy in bits after k = 0..checks parity checks."""
    return entropy_curve(spectrum, n, checks, trials, seed, method).mean


# ---------------------------------------------------------------------------
# Branch frequencies


def empirical_branch_probabilities(spectrum, mask: Union[ParityMask, str], trials: int,
                                   seed: int) -> tuple:
    """Observed frequencies (mu0, mu1) of the block parity over sampled blocks.

    ``spectrum`` may be a BlockDist on any number of pairs or a single-pair
    spectrum.  Blocks are drawn in chunks of 65536, chunk c from stream c.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = spectrum if isinstance(spectrum, BlockDist) else BlockDist.from_spectrum(spectrum)
    if isinstance(mask, str):
        mask = ParityMask.from_str(mask)
    if mask.m != d.m:
        raise ValueError(f"mask has {len(mask.bits)} bits, block needs {2 * d.m}")
    par = mask_parities(mask.index, d.m)
    odd = 0
    for c in range(math.ceil(trials / CHUNK)):
        size = min(CHUNK, trials - c * CHUNK)
        labels = stream(seed, c).choice(d.p.size, size=size, p=d.p)
        odd += int(par[labels].sum())
    return (trials - odd) / trials, odd / trials


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials)


__all__ = [
    "EXACT",
    "SAMPLED",
    "EntropyCurve",
    "SampledEnsemble",
    "binomial_sigma",
    "direct_parity",
    "empirical_branch_probabilities",
    "entropy_curve",
    "random_independent_masks",
    "residual_entropy_curve",
    "residual_entropy_samples",
    "simulate_parity_check",
    "stream",
]
