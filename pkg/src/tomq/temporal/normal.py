"""Normal form and safety for path queries; peerlessness and truncation for
until queries; block decomposition of gap-separated temporal instances.

The normaliser applies the five rewrites in a fixed order, each to a
fixpoint, so the output is deterministic: drop trivial borders, keep
connectors in single-step form, drop entailed borders next to primitive
blocks under now-or-later, and promote now-or-later to strictly-later when
the adjacent bodies are incompatible. Dropping a body merges the temporal
relations around it; a swallowed next-step turns into one strict step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..dl import Eliq, Ontology, reasoner
from ..domainchar import is_meet_reducible
from ..errors import NotBNormal
from ..verify import CLASS_ELIQ, CLASS_P
from .model import Conn, LEQ, LESS, PathQuery, TInstance, UntilQuery, leq, less, pathquery

_SUC = "swallowed-suc"


def _compose(parts: list) -> Optional[Conn]:
    """Merge adjacent temporal relations (connectors and swallowed next-steps)."""
    strict = 0
    for p in parts:
        if p is _SUC:
            strict += 1
        elif p.kind == LESS:
            strict += p.count
    if strict:
        return less(strict)
    return leq()


def normalize(onto: Ontology, q: PathQuery) -> PathQuery:
    r = reasoner(onto)
    blocks = [list(b) for b in q.blocks]
    conns: list = list(q.connectors)

    def trivial(body: Eliq) -> bool:
        return r.trivial(body)

    def drop_first(i: int):
        if len(blocks[i]) > 1:
            blocks[i].pop(0)
            conns[i - 1] = _compose([conns[i - 1], _SUC])
        else:
            _drop_block(i)

    def drop_last(i: int):
        if len(blocks[i]) > 1:
            blocks[i].pop()
            if i < len(conns):
                conns[i] = _compose([_SUC, conns[i]])
        else:
            _drop_block(i)

    def _drop_block(i: int):
        last = len(blocks) - 1
        del blocks[i]
        if i == 0:
            del conns[0]
        elif i < last:
            left, right = conns[i - 1], conns[i]
            del conns[i]
            conns[i - 1] = _compose([left, right])
        else:
            del conns[i - 1]

    def pass_trivial_borders() -> bool:
        for i in range(len(blocks)):
            first_matters = i > 0
            last_matters = i > 0 or len(blocks[i]) > 1
            if first_matters and trivial(blocks[i][0]):
                drop_first(i)
                return True
            if last_matters and trivial(blocks[i][-1]):
                drop_last(i)
                return True
        return False

    def pass_entailed_next_border() -> bool:
        for i in range(len(conns)):
            if conns[i].kind != LEQ:
                continue
            if len(blocks[i + 1]) == 1 and r.contains(blocks[i][-1], blocks[i + 1][0]):
                _drop_block(i + 1)
                return True
        return False

    def pass_entailed_prev_border() -> bool:
        for i in range(1, len(blocks) - 1):
            if conns[i].kind != LEQ:
                continue
            if len(blocks[i]) == 1 and r.contains(blocks[i + 1][0], blocks[i][0]):
                _drop_block(i)
                return True
        return False

    def pass_incompatible_leq() -> bool:
        for i in range(len(conns)):
            if conns[i].kind == LEQ and not r.compatible(blocks[i][-1], blocks[i + 1][0]):
                conns[i] = less(1)
                return True
        return False

    changed = True
    while changed:
        changed = False
        while pass_trivial_borders():
            changed = True
        while pass_entailed_next_border():
            changed = True
        while pass_entailed_prev_border():
            changed = True
        while pass_incompatible_leq():
            changed = True
    return pathquery(blocks, conns)


def _axiom_uses_roles(ax) -> bool:
    if getattr(ax, "role", None) is not None or getattr(ax, "sub", None) is not None:
        return True
    for side in (getattr(ax, "lhs", None), getattr(ax, "rhs", None)):
        if getattr(side, "kind", "") == "exists":
            return True
    return False


def infer_body_class(onto: Ontology, q: PathQuery) -> str:
    has_roles = bool(onto.signature.role_names) and (
        any(b.role_names for b in q.bodies())
        or any(_axiom_uses_roles(ax) for ax in onto.axioms)
    )
    return CLASS_ELIQ if has_roles else CLASS_P


def is_safe(
    onto: Ontology,
    q: PathQuery,
    size_bound: int = 6,
    qclass: Optional[str] = None,
) -> Optional[bool]:
    """False when the normal form has a lone conjunct (a meet-reducible body
    in a primitive non-initial block); None when meet-reducibility could not
    be decided within the bound."""
    nq = normalize(onto, q)
    if qclass is None:
        qclass = infer_body_class(onto, nq)
    verdict = True
    for i in range(1, len(nq.blocks)):
        if len(nq.blocks[i]) != 1:
            continue
        mr = is_meet_reducible(onto, nq.blocks[i][0], qclass, size_bound)
        if mr is True:
            return False
        if mr is None:
            verdict = None
    return verdict


def lone_conjunct_positions(
    onto: Ontology, q: PathQuery, size_bound: int = 6, qclass: Optional[str] = None
) -> list[int]:
    if qclass is None:
        qclass = infer_body_class(onto, q)
    out = []
    for i in range(1, len(q.blocks)):
        if len(q.blocks[i]) == 1 and is_meet_reducible(onto, q.blocks[i][0], qclass, size_bound) is True:
            out.append(i)
    return out


def is_peerless(onto: Ontology, q: UntilQuery) -> bool:
    """Each domain filler is containment-incomparable with its target; bottom
    fillers are exempt."""
    r = reasoner(onto)
    for filler, target in q.steps:
        if filler is None:
            continue
        if r.contains(target, filler) or r.contains(filler, target):
            return False
    return True


def until_truncate(q: UntilQuery, i: int) -> UntilQuery:
    """Replace the fillers of the first i steps by bottom."""
    steps = tuple(
        (None if j + 1 <= i else filler, target)
        for j, (filler, target) in enumerate(q.steps)
    )
    return UntilQuery(q.head, steps)


@dataclass(frozen=True)
class BlockDecomposition:
    intervals: tuple[tuple[int, int], ...]  # inclusive slice ranges per block
    gap: int

    def block_count(self) -> int:
        return len(self.intervals)


def decompose_blocks(dinst: TInstance, b: int) -> BlockDecomposition:
    """Split the slice sequence into blocks separated by gaps of exactly b
    empty slices; blocks hold at most b slices, their borders are non-empty
    except possibly the very first slice. Raises NotBNormal otherwise."""
    if b < 1:
        raise NotBNormal("gap parameter must be at least 1")
    slices = dinst.slices
    n = len(slices)

    def block_ok(start: int, end: int) -> bool:
        length = end - start + 1
        if length > b:
            return False
        first_may_be_empty = start == 0
        if not first_may_be_empty and slices[start].is_trivial():
            return False
        if (start > 0 or length > 1) and slices[end].is_trivial():
            return False
        return True

    solution: list[tuple[int, int]] = []

    def parse(pos: int, acc: list[tuple[int, int]]) -> bool:
        for end in range(pos, min(pos + b - 1, n - 1) + 1):
            if not block_ok(pos, end):
                continue
            if end == n - 1:
                solution.extend(acc + [(pos, end)])
                return True
            gap_end = end + b
            if gap_end + 1 > n - 1:
                continue
            if all(slices[k].is_trivial() for k in range(end + 1, gap_end + 1)):
                if parse(gap_end + 1, acc + [(pos, end)]):
                    return True
        return False

    if not parse(0, []):
        raise NotBNormal("slice sequence does not split into b-separated blocks")
    return BlockDecomposition(tuple(solution), b)
