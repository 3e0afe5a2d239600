"""Bell-label algebra for blocks of Bell-diagonal pairs.

A block of ``m`` Bell pairs is labelled by the bit string
``(i_1, j_1, ..., i_m, j_m)`` where ``i`` is the amplitude bit and ``j`` the
phase bit of a pair.  Distributions over a block are probability vectors of
length ``4**m``, indexed by the label read as a big-endian binary number: the
amplitude bit of the first pair is the most significant bit.  This interleaved
order is the wire order used everywhere in the package.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

SUM_TOL = 1e-12
MAX_GROUP_PAIRS = 3

AMP = "amp"
PHASE = "phase"


def _check_bit(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class BellLabel:
    """Label ``(i, j)`` of the Bell state psi_ij."""

    amp: int
    phase: int

    def __post_init__(self):
        _check_bit(self.amp, "amp")
        _check_bit(self.phase, "phase")

    @property
    def index(self) -> int:
        return 2 * self.amp + self.phase


@dataclass(frozen=True)
class LabelString:
    """Label of a product of ``m`` Bell states, bits ordered (i1, j1, ..., im, jm)."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(_check_bit(b, "bit") for b in self.bits)
        if len(bits) == 0 or len(bits) % 2:
            raise ValueError(f"label needs an even, nonzero number of bits, got {len(bits)}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "LabelString":
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def from_index(cls, index: int, m: int) -> "LabelString":
        if not 0 <= index < 4**m:
            raise ValueError(f"index {index} out of range for m={m}")
        return cls(index_to_bits(index, m))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "LabelString":
        return cls(tuple(b for pair in pairs for b in pair))

    @property
    def m(self) -> int:
        return len(self.bits) // 2

    @property
    def index(self) -> int:
        return bits_to_index(self.bits)

    def pair(self, k: int) -> BellLabel:
        return BellLabel(self.bits[2 * k], self.bits[2 * k + 1])

    def pairs(self) -> list:
        return [self.pair(k) for k in range(self.m)]

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class ParityMask:
    """Nonzero 2m-bit vector M; a parity check reveals <S|M> mod 2."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(_check_bit(b, "mask bit") for b in self.bits)
        if len(bits) == 0 or len(bits) % 2:
            raise ValueError(f"mask needs an even, nonzero number of bits, got {len(bits)}")
        if not any(bits):
            raise ValueError("parity mask must be nonzero")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "ParityMask":
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def from_index(cls, index: int, m: int) -> "ParityMask":
        return cls(index_to_bits(index, m))

    @property
    def m(self) -> int:
        return len(self.bits) // 2

    @property
    def index(self) -> int:
        return bits_to_index(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, m: int) -> tuple:
    n = 2 * m
    return tuple((index >> (n - 1 - t)) & 1 for t in range(n))


def format_label(index: int, m: int) -> str:
    return "".join(map(str, index_to_bits(index, m))) if m else ""


def bit_position(m: int, pair: int, which: str) -> int:
    """Position of the amp/phase bit of ``pair`` in the label string."""
    if not 0 <= pair < m:
        raise IndexError(f"pair index {pair} out of range for m={m}")
    if which == AMP:
        return 2 * pair
    if which == PHASE:
        return 2 * pair + 1
    raise ValueError(f"which must be 'amp' or 'phase', got {which!r}")


@functools.lru_cache(maxsize=None)
def parity_table(nbits: int) -> np.ndarray:
    """``parity_table(n)[x]`` is the parity of the integer ``x < 2**n``."""
    x = np.arange(2**nbits, dtype=np.uint64)
    table = (np.bitwise_count(x) & 1).astype(np.uint8)
    table.flags.writeable = False
    return table


def mask_parities(mask: int, m: int) -> np.ndarray:
    """Parity <x|mask> for every label index x of an m-pair block."""
    return parity_table(2 * m)[np.arange(4**m) & mask]


def _swap_amp_phase_bits(x: int, m: int) -> int:
    hi = int("10" * m, 2) if m else 0
    lo = int("01" * m, 2) if m else 0
    return ((x & hi) >> 1) | ((x & lo) << 1)


def symplectic_product(x: int, y: int, m: int) -> int:
    """Symplectic pairing of two label vectors: sum over pairs of i_x j_y + j_x i_y (mod 2)."""
    return bin(x & _swap_amp_phase_bits(y, m)).count("1") & 1


# ---------------------------------------------------------------------------
# Probability distributions


def _as_prob_vector(p, tol: float = SUM_TOL) -> np.ndarray:
    arr = np.array(p, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("empty probability vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("probability vector has non-finite entries")
    if np.any(arr < 0):
        raise ValueError(f"negative probability {arr.min()!r}")
    total = arr.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    return arr


@dataclass(frozen=True, eq=False)
class BlockDist:
    """Distribution over the ``4**m`` labels of an m-pair block.

    ``m = 0`` is allowed and denotes the empty block left over after the last
    pair has been measured (``p == [1.0]``).
    """

    m: int
    p: np.ndarray

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        arr = _as_prob_vector(self.p)
        if arr.size != 4**self.m:
            raise ValueError(f"expected {4**self.m} entries for m={self.m}, got {arr.size}")
        arr.flags.writeable = False
        object.__setattr__(self, "p", arr)

    @classmethod
    def _trusted(cls, m: int, p: np.ndarray) -> "BlockDist":
        # skips validation; only for vectors produced by exact mass-preserving operations
        obj = object.__new__(cls)
        p.flags.writeable = False
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "p", p)
        return obj

    @classmethod
    def from_spectrum(cls, spectrum) -> "BlockDist":
        """Single pair with eigenvalues in the order (00, 01, 10, 11)."""
        return cls(1, spectrum)

    @classmethod
    def delta(cls, label: Union[LabelString, str]) -> "BlockDist":
        if isinstance(label, str):
            label = LabelString.from_str(label)
        p = np.zeros(4**label.m)
        p[label.index] = 1.0
        return cls(label.m, p)

    @classmethod
    def uniform(cls, m: int) -> "BlockDist":
        return cls(m, np.full(4**m, 4.0**-m))

    @classmethod
    def empty(cls) -> "BlockDist":
        return cls(0, np.ones(1))

    @classmethod
    def from_weights(cls, m: int, weights) -> "BlockDist":
        """Normalise a nonnegative weight vector into a distribution."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        return cls(m, w / total)

    def prob(self, label: Union[LabelString, str]) -> float:
        if isinstance(label, str):
            label = LabelString.from_str(label)
        if label.m != self.m:
            raise ValueError(f"label has {label.m} pairs, block has {self.m}")
        return float(self.p[label.index])

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.p > 0)

    def allclose(self, other: "BlockDist", atol: float = SUM_TOL) -> bool:
        return self.m == other.m and bool(np.allclose(self.p, other.p, rtol=0, atol=atol))

    def to_text(self) -> str:
        lines = [f"m={self.m}"]
        for idx, prob in enumerate(self.p):
            lines.append(f"{format_label(idx, self.m)}\t{prob:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BlockDist":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("m="):
            raise ValueError("first line must be 'm=<int>'")
        m = int(lines[0][2:])
        p = np.full(4**m, np.nan)
        for ln in lines[1:]:
            label, _, value = ln.partition("\t")
            if len(label) != 2 * m:
                raise ValueError(f"label {label!r} does not have {2 * m} bits")
            p[LabelString.from_str(label).index if m else 0] = float(value)
        if np.isnan(p).any():
            raise ValueError("missing labels in serialized distribution")
        return cls(m, p)

    def __repr__(self) -> str:
        return f"BlockDist(m={self.m}, p={np.array2string(self.p, precision=6)})"


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    arr = _as_prob_vector(p)
    nz = arr[arr > 0]
    return float(-(nz * np.log2(nz)).sum())


def normalized_entropy(weights) -> float:
    """Entropy of ``weights / sum(weights)``."""
    w = np.array(weights, dtype=float).ravel()
    if np.any(w < 0):
        raise ValueError("negative weight")
    total = w.sum()
    if not total > 0:
        raise ValueError("at least one weight must be positive")
    nz = w[w > 0] / total
    return float(-(nz * np.log2(nz)).sum())


@dataclass(frozen=True)
class WernerParams:
    """Werner state ``f P_00 + (1 - f)/3 (1 - P_00)``; ``f`` is the fidelity."""

    f: float

    def __post_init__(self):
        if not 0.25 < self.f <= 1.0:
            raise ValueError(f"Werner fidelity must lie in (1/4, 1], got {self.f!r}")

    @property
    def spectrum(self) -> np.ndarray:
        return werner_spectrum(self.f)

    @property
    def entangled(self) -> bool:
        return self.f > 0.5


def werner_spectrum(f: float) -> np.ndarray:
    """Spectrum (f, (1-f)/3, (1-f)/3, (1-f)/3) without range checks."""
    r = (1.0 - f) / 3.0
    return np.array([f, r, r, r])


def werner_dist(w: Union[WernerParams, float]) -> BlockDist:
    if not isinstance(w, WernerParams):
        w = WernerParams(float(w))
    return BlockDist(1, w.spectrum)


def is_separable_bell_diagonal(d: BlockDist) -> bool:
    """A single-pair Bell-diagonal state is separable iff no eigenvalue exceeds 1/2."""
    if d.m != 1:
        raise ValueError("separability criterion applies to single pairs")
    return bool(d.p.max() <= 0.5)


def tensor(a: BlockDist, b: BlockDist) -> BlockDist:
    """Product distribution; labels of ``a`` come first."""
    return BlockDist(a.m + b.m, np.kron(a.p, b.p))


def tensor_power(d: BlockDist, copies: int) -> BlockDist:
    if copies < 1:
        raise ValueError("copies must be >= 1")
    out = d
    for _ in range(copies - 1):
        out = tensor(out, d)
    return out


# ---------------------------------------------------------------------------
# Bilateral CNOT on labels


def bcnot(source: int, target: int, s: LabelString) -> LabelString:
    """Bilateral CNOT: (i, j) (k, l) -> (i, j + l) (k + i, l) on the source/target pairs."""
    m = s.m
    for idx in (source, target):
        if not 0 <= idx < m:
            raise IndexError(f"pair index {idx} out of range for m={m}")
    if source == target:
        raise ValueError("source and target must differ")
    bits = list(s.bits)
    i, j = bits[2 * source], bits[2 * source + 1]
    k, l = bits[2 * target], bits[2 * target + 1]
    bits[2 * source + 1] = (j + l) % 2
    bits[2 * target] = (k + i) % 2
    return LabelString(tuple(bits))


# ---------------------------------------------------------------------------
# Label maps


def symplectic_form(m: int) -> np.ndarray:
    """Block-diagonal pairing matrix with [[0, 1], [1, 0]] per pair."""
    return np.kron(np.eye(m, dtype=np.uint8), np.array([[0, 1], [1, 0]], dtype=np.uint8))


def _gf2_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivots = np.flatnonzero(aug[col:, col]) + col
        if pivots.size == 0:
            raise ValueError("matrix is singular over GF(2)")
        piv = pivots[0]
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        for row in range(n):
            if row != col and aug[row, col]:
                aug[row] ^= aug[col]
    return aug[:, n:]


@dataclass(frozen=True)
class LabelMap:
    """Affine map x -> L x + t on 2m-bit labels (column-vector convention).

    ``linear`` and ``translation`` are stored as nested tuples so maps are
    hashable and compare by value.
    """

    linear: tuple
    translation: tuple

    def __post_init__(self):
        lin = tuple(tuple(int(v) % 2 for v in row) for row in self.linear)
        n = len(lin)
        if n == 0 or n % 2 or any(len(row) != n for row in lin):
            raise ValueError("linear part must be a square 2m x 2m matrix")
        trans = tuple(int(v) % 2 for v in self.translation)
        if len(trans) != n:
            raise ValueError("translation length must match the matrix size")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", trans)
        _gf2_inverse(np.array(lin, dtype=np.uint8))

    @classmethod
    def from_matrix(cls, linear, translation=None) -> "LabelMap":
        lin = np.asarray(linear, dtype=np.uint8) % 2
        if translation is None:
            translation = np.zeros(lin.shape[0], dtype=np.uint8)
        return cls(tuple(map(tuple, lin.tolist())), tuple(np.asarray(translation).tolist()))

    @classmethod
    def from_columns(cls, columns: Sequence[int], m: int, translation: int = 0) -> "LabelMap":
        """Build from the integer-encoded images of the basis vectors e_0..e_{2m-1}."""
        n = 2 * m
        mat = np.zeros((n, n), dtype=np.uint8)
        for t, col in enumerate(columns):
            mat[:, t] = index_to_bits(int(col), m)
        return cls.from_matrix(mat, index_to_bits(translation, m))

    @classmethod
    def identity(cls, m: int) -> "LabelMap":
        return cls.from_matrix(np.eye(2 * m, dtype=np.uint8))

    @property
    def m(self) -> int:
        return len(self.linear) // 2

    @cached_property
    def matrix(self) -> np.ndarray:
        mat = np.array(self.linear, dtype=np.uint8)
        mat.flags.writeable = False
        return mat

    @cached_property
    def columns(self) -> tuple:
        return tuple(bits_to_index(self.matrix[:, t]) for t in range(2 * self.m))

    @property
    def translation_index(self) -> int:
        return bits_to_index(self.translation)

    def is_symplectic(self) -> bool:
        j = symplectic_form(self.m).astype(np.int64)
        lin = self.matrix.astype(np.int64)
        return bool(np.array_equal((lin.T @ j @ lin) % 2, j))

    def is_identity(self) -> bool:
        return not any(self.translation) and self.linear == _identity_rows(self.m)

    def apply_index(self, x: int) -> int:
        y = self.translation_index
        n = 2 * self.m
        for t, col in enumerate(self.columns):
            if (x >> (n - 1 - t)) & 1:
                y ^= col
        return y

    def apply(self, s: LabelString) -> LabelString:
        if s.m != self.m:
            raise ValueError(f"label has {s.m} pairs, map acts on {self.m}")
        return LabelString.from_index(self.apply_index(s.index), self.m)

    @cached_property
    def permutation(self) -> np.ndarray:
        """``permutation[x]`` is the index of g(x)."""
        perm = linear_permutations(np.array([self.columns], dtype=np.int64), self.m)[0]
        perm ^= self.translation_index
        perm.flags.writeable = False
        return perm

    def compose(self, other: "LabelMap") -> "LabelMap":
        """The map ``self(other(x))``."""
        if other.m != self.m:
            raise ValueError("cannot compose maps on different block sizes")
        lin = (self.matrix.astype(np.int64) @ other.matrix.astype(np.int64)) % 2
        t = (self.matrix.astype(np.int64) @ np.array(other.translation) + self.translation) % 2
        return LabelMap.from_matrix(lin, t)

    def inverse(self) -> "LabelMap":
        inv = _gf2_inverse(self.matrix)
        t = (inv.astype(np.int64) @ np.array(self.translation)) % 2
        return LabelMap.from_matrix(inv, t)

    def transform_mask(self, mask: int) -> int:
        """Mask M' with <g(x)|M'> = <x|M> + const, i.e. M' = L^{-T} M."""
        inv = _gf2_inverse(self.matrix).astype(np.int64)
        bits = np.array(index_to_bits(mask, self.m))
        return bits_to_index((inv.T @ bits) % 2)

    def to_text(self) -> str:
        rows = "".join(str(v) for row in self.linear for v in row)
        return rows + ":" + "".join(map(str, self.translation))

    @classmethod
    def from_text(cls, text: str) -> "LabelMap":
        rows, sep, trans = text.strip().partition(":")
        n = len(trans)
        if not sep or n == 0 or len(rows) != n * n:
            raise ValueError(f"malformed label map {text!r}")
        mat = np.array([int(c) for c in rows], dtype=np.uint8).reshape(n, n)
        return cls.from_matrix(mat, [int(c) for c in trans])


@functools.lru_cache(maxsize=None)
def _identity_rows(m: int) -> tuple:
    n = 2 * m
    return tuple(tuple(int(r == c) for c in range(n)) for r in range(n))


def linear_permutations(codes: np.ndarray, m: int) -> np.ndarray:
    """Label permutations of a batch of linear maps given as (N, 2m) column codes."""
    n = 2 * m
    x = np.arange(4**m, dtype=np.int64)
    perms = np.zeros((codes.shape[0], x.size), dtype=np.int64)
    for t in range(n):
        bit = ((x >> (n - 1 - t)) & 1).astype(bool)
        perms[:, bit] ^= codes[:, t : t + 1]
    return perms


def apply_label_map(g: LabelMap, d: BlockDist) -> BlockDist:
    """Pushforward: the output has probability d.p[x] at label g(x)."""
    if g.m != d.m:
        raise ValueError(f"label map acts on {g.m} pairs, distribution has {d.m}")
    out = np.empty_like(d.p)
    out[g.permutation] = d.p
    return BlockDist._trusted(d.m, out)


def _unit(m: int, t: int) -> int:
    return 1 << (2 * m - 1 - t)


def _identity_columns(m: int) -> list:
    return [_unit(m, t) for t in range(2 * m)]


def bcnot_map(m: int, source: int, target: int) -> LabelMap:
    """Linear label map induced by a bilateral CNOT between two pairs."""
    if source == target:
        raise ValueError("source and target must differ")
    for idx in (source, target):
        if not 0 <= idx < m:
            raise IndexError(f"pair index {idx} out of range for m={m}")
    cols = _identity_columns(m)
    cols[2 * source] = _unit(m, 2 * source) | _unit(m, 2 * target)
    cols[2 * target + 1] = _unit(m, 2 * target + 1) | _unit(m, 2 * source + 1)
    return LabelMap.from_columns(cols, m)


def swap_map(m: int, pair: int) -> LabelMap:
    """Exchange the amplitude and phase bits of one pair."""
    cols = _identity_columns(m)
    cols[2 * pair], cols[2 * pair + 1] = cols[2 * pair + 1], cols[2 * pair]
    return LabelMap.from_columns(cols, m)


def rotation_map(m: int, pair: int) -> LabelMap:
    """(i, j) -> (i, i + j) on one pair: a bilateral quarter rotation swapping psi_10 and psi_11."""
    cols = _identity_columns(m)
    cols[2 * pair] = _unit(m, 2 * pair) | _unit(m, 2 * pair + 1)
    return LabelMap.from_columns(cols, m)


def translation_map(m: int, shift: int) -> LabelMap:
    """One-sided Pauli relabelling x -> x + shift."""
    return LabelMap.from_columns(_identity_columns(m), m, translation=shift)


# ---------------------------------------------------------------------------
# Group enumeration


class LabelMapGroup:
    """A finite group of linear label maps stored as integer column codes.

    Elements are materialised as :class:`LabelMap` lazily, which keeps the
    1.45 million element group for three pairs cheap to hold.
    """

    def __init__(self, m: int, codes: np.ndarray):
        self.m = m
        keys = _pack_codes(codes, m)
        order = np.argsort(keys, kind="stable")
        self.codes = codes[order]
        self.codes.flags.writeable = False
        self._keys = keys[order]

    def __len__(self) -> int:
        return self.codes.shape[0]

    def __iter__(self) -> Iterator[LabelMap]:
        for row in self.codes:
            yield LabelMap.from_columns(row.tolist(), self.m)

    def __getitem__(self, i: int) -> LabelMap:
        return LabelMap.from_columns(self.codes[i].tolist(), self.m)

    def __contains__(self, g: object) -> bool:
        if not isinstance(g, LabelMap) or g.m != self.m or any(g.translation):
            return False
        key = _pack_codes(np.array([g.columns], dtype=np.int64), self.m)[0]
        pos = np.searchsorted(self._keys, key)
        return bool(pos < self._keys.size and self._keys[pos] == key)

    @cached_property
    def permutations(self) -> np.ndarray:
        """(order, 4**m) array of label permutations of the linear elements."""
        return linear_permutations(self.codes, self.m)

    def is_closed(self) -> bool:
        """Closed under composition and inversion (checked exhaustively)."""
        perms = self.permutations
        keys = set(map(bytes, perms.astype(np.int16)))
        for g in perms:
            composed = g[perms]
            if not all(bytes(row) in keys for row in composed.astype(np.int16)):
                return False
            inv = np.empty_like(g)
            inv[g] = np.arange(g.size)
            if bytes(inv.astype(np.int16)) not in keys:
                return False
        return True


def _pack_codes(codes: np.ndarray, m: int) -> np.ndarray:
    width = 2 * m
    keys = np.zeros(codes.shape[0], dtype=np.int64)
    for t in range(codes.shape[1]):
        keys |= codes[:, t].astype(np.int64) << (width * t)
    return keys


def group_generators(m: int) -> list:
    """Bilateral CNOTs between all ordered pairs plus per-pair swaps and rotations."""
    gens = [swap_map(m, k) for k in range(m)] + [rotation_map(m, k) for k in range(m)]
    gens += [bcnot_map(m, a, b) for a in range(m) for b in range(m) if a != b]
    return gens


def closure(generators: Sequence[LabelMap], m: int) -> LabelMapGroup:
    """Group generated by linear label maps, by breadth-first left multiplication."""
    gen_perms = [g.permutation for g in generators]
    identity = np.array([_identity_columns(m)], dtype=np.int64)
    seen = _pack_codes(identity, m)
    frontier = identity
    blocks = [identity]
    while frontier.shape[0]:
        cand = np.concatenate([perm[frontier] for perm in gen_perms])
        keys, first = np.unique(_pack_codes(cand, m), return_index=True)
        fresh = ~np.isin(keys, seen, assume_unique=True)
        frontier = cand[first[fresh]]
        seen = np.union1d(seen, keys[fresh])
        blocks.append(frontier)
    return LabelMapGroup(m, np.concatenate(blocks))


@functools.lru_cache(maxsize=None)
def enumerate_label_maps(m: int) -> LabelMapGroup:
    """Linear parts of all allowed label maps on m pairs (closure of the generators)."""
    if not 1 <= m <= MAX_GROUP_PAIRS:
        raise ValueError(f"group enumeration supported for 1 <= m <= {MAX_GROUP_PAIRS}, got {m}")
    group = closure(group_generators(m), m)
    logger.debug("label-map group for m=%d has order %d", m, len(group))
    return group


def per_pair_subgroup(m: int) -> LabelMapGroup:
    """Maps acting on each pair separately (swaps and rotations only)."""
    gens = [swap_map(m, k) for k in range(m)] + [rotation_map(m, k) for k in range(m)]
    return closure(gens, m)


def local_coset_count(m: int) -> int:
    """Number of cosets of the per-pair subgroup in the full label-map group."""
    group = enumerate_label_maps(m)
    sub = per_pair_subgroup(m)
    assert all(g in group for g in sub)
    return len(group) // len(sub)


def brute_force_symplectic_codes(m: int) -> np.ndarray:
    """All invertible 2m x 2m binary matrices preserving the pairing form.

    Enumerates every one of the ``2**(4 m**2)`` matrices, so only m <= 2 is
    allowed.  Returned as (N, 2m) column codes.
    """
    if m > 2:
        raise ValueError("brute-force enumeration is limited to m <= 2")
    n = 2 * m
    count = 2 ** (n * n)
    ids = np.arange(count, dtype=np.int64)
    mats = ((ids[:, None] >> np.arange(n * n)) & 1).reshape(count, n, n).astype(np.int64)
    j = symplectic_form(m).astype(np.int64)
    prod = np.einsum("nki,kl,nlj->nij", mats, j, mats) % 2
    preserves = np.all(prod == j, axis=(1, 2))
    weights = 1 << np.arange(n - 1, -1, -1)
    codes = np.einsum("nit,i->nt", mats, weights)
    perms = linear_permutations(codes, m)
    invertible = np.all(np.sort(perms, axis=1) == np.arange(4**m), axis=1)
    return codes[preserves & invertible]


def as_label_maps(codes: Iterable[Sequence[int]], m: int) -> list:
    return [LabelMap.from_columns(list(c), m) for c in codes]
