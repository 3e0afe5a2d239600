"""Protocol trees and their plain-text serialization.

A protocol is a finite decision tree whose internal nodes are asymptotic
parity checks, local Bell measurements and label maps, and whose leaves either
hash the remaining block or discard it.  The text format has one node per
line, two spaces of indentation per level, and children in outcome order::

    PC 1010
      HASH
      MEAS 1 amp
        HASH
        HASH

Pair indices are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


from .bellcore import AMP, PHASE, LabelMap, ParityMask

INDENT = "  "


class TreeError(ValueError):
    """A protocol tree is malformed or does not fit the block it is applied to."""


@dataclass(frozen=True)
class Hash:
    """Hash the whole block: m - S ebits per block, possibly negative."""


@dataclass(frozen=True)
class Discard:
    """Throw the block away (yield 0)."""


@dataclass(frozen=True)
class ParityCheck:
    mask: ParityMask
    child0: "ProtocolNode"
    child1: "ProtocolNode"

    def __post_init__(self):
        if not isinstance(self.mask, ParityMask):
            object.__setattr__(self, "mask", ParityMask.from_str(str(self.mask)))


@dataclass(frozen=True)
class Measure:
    pair: int
    which: str
    child0: "ProtocolNode"
    child1: "ProtocolNode"

    def __post_init__(self):
        if self.which not in (AMP, PHASE):
            raise TreeError(f"measurement must be 'amp' or 'phase', got {self.which!r}")
        if self.pair < 0:
            raise TreeError(f"negative pair index {self.pair}")


@dataclass(frozen=True)
class Relabel:
    g: LabelMap
    child: "ProtocolNode"


ProtocolNode = Union[Hash, Discard, ParityCheck, Measure, Relabel]


def depth(node: ProtocolNode) -> int:
    """Number of checks and measurements on the longest root-to-leaf path.

    Relabel nodes are free bookkeeping and do not count.
    """
    if isinstance(node, (ParityCheck, Measure)):
        return 1 + max(depth(node.child0), depth(node.child1))
    if isinstance(node, Relabel):
        return depth(node.child)
    return 0


def size(node: ProtocolNode) -> int:
    if isinstance(node, (ParityCheck, Measure)):
        return 1 + size(node.child0) + size(node.child1)
    if isinstance(node, Relabel):
        return 1 + size(node.child)
    return 1


def _gf2_rank(vectors: list) -> int:
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def validate(node: ProtocolNode, m: int) -> None:
    """Check that ``node`` is a consistent protocol for an m-pair block.

    Masks along every path must be linearly independent.  Earlier masks are
    carried through Relabel nodes; a measurement forgets them because the
    destroyed pair's unmeasured bit no longer exists.
    """
    _validate(node, m, [])


def _validate(node, m, masks):
    if isinstance(node, (Hash, Discard)):
        return
    if isinstance(node, ParityCheck):
        if node.mask.m != m:
            raise TreeError(f"mask {node.mask} has {len(node.mask.bits)} bits, block needs {2 * m}")
        path = masks + [node.mask.index]
        if _gf2_rank(path) < len(path):
            raise TreeError(f"mask {node.mask} is linearly dependent on earlier checks on its path")
        _validate(node.child0, m, path)
        _validate(node.child1, m, path)
    elif isinstance(node, Measure):
        if not 0 <= node.pair < m:
            raise TreeError(f"measurement of pair {node.pair} on a block of {m} pairs")
        _validate(node.child0, m - 1, [])
        _validate(node.child1, m - 1, [])
    elif isinstance(node, Relabel):
        if node.g.m != m:
            raise TreeError(f"label map acts on {node.g.m} pairs, block has {m}")
        _validate(node.child, m, [node.g.transform_mask(x) for x in masks])
    else:
        raise TreeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Text format


def dumps(node: ProtocolNode) -> str:
    lines: list = []
    _dump(node, 0, lines)
    return "\n".join(lines) + "\n"


def _dump(node, level, lines):
    pad = INDENT * level
    if isinstance(node, Hash):
        lines.append(pad + "HASH")
    elif isinstance(node, Discard):
        lines.append(pad + "DISCARD")
    elif isinstance(node, ParityCheck):
        lines.append(f"{pad}PC {node.mask}")
        _dump(node.child0, level + 1, lines)
        _dump(node.child1, level + 1, lines)
    elif isinstance(node, Measure):
        lines.append(f"{pad}MEAS {node.pair} {node.which}")
        _dump(node.child0, level + 1, lines)
        _dump(node.child1, level + 1, lines)
    elif isinstance(node, Relabel):
        lines.append(f"{pad}RELABEL {node.g.to_text()}")
        _dump(node.child, level + 1, lines)
    else:
        raise TreeError(f"unknown node {node!r}")


def loads(text: str) -> ProtocolNode:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % len(INDENT):
            raise TreeError(f"line {lineno}: indentation is not a multiple of {len(INDENT)}")
        entries.append((indent // len(INDENT), stripped.rstrip(), lineno))
    if not entries:
        raise TreeError("empty protocol tree")
    node, pos = _parse(entries, 0, 0)
    if pos != len(entries):
        raise TreeError(f"line {entries[pos][2]}: unexpected trailing node")
    return node


def _parse(entries, pos, level):
    if pos >= len(entries):
        raise TreeError("protocol tree ends before all children were given")
    lvl, text, lineno = entries[pos]
    if lvl != level:
        raise TreeError(f"line {lineno}: expected indentation level {level}, got {lvl}")
    words = text.split()
    head = words[0]
    try:
        if head == "HASH" and len(words) == 1:
            return Hash(), pos + 1
        if head == "DISCARD" and len(words) == 1:
            return Discard(), pos + 1
        if head == "PC" and len(words) == 2:
            mask = ParityMask.from_str(words[1])
            c0, pos = _parse(entries, pos + 1, level + 1)
            c1, pos = _parse(entries, pos, level + 1)
            return ParityCheck(mask, c0, c1), pos
        if head == "MEAS" and len(words) == 3:
            pair = int(words[1])
            c0, pos = _parse(entries, pos + 1, level + 1)
            c1, pos = _parse(entries, pos, level + 1)
            return Measure(pair, words[2], c0, c1), pos
        if head == "RELABEL" and len(words) == 2:
            g = LabelMap.from_text(words[1])
            child, pos = _parse(entries, pos + 1, level + 1)
            return Relabel(g, child), pos
    except TreeError:
        raise
    except ValueError as exc:
        raise TreeError(f"line {lineno}: {exc}") from exc
    raise TreeError(f"line {lineno}: cannot parse node {text!r}")


def relabel_then(g: LabelMap, child: ProtocolNode) -> ProtocolNode:
    """``Relabel(g, child)`` with the no-op cases removed.

    Leaves do not care about labels, nested relabels are merged into one, and
    identity maps are dropped.
    """
    if isinstance(child, (Hash, Discard)):
        return child
    if isinstance(child, Relabel):
        g, child = child.g.compose(g), child.child
    if g.is_identity():
        return child
    return Relabel(g, child)


