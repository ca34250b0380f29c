"""Exact learning of path queries from membership queries.

The learner turns a positive example into the target query in five stages:
make every slice tree-shaped (minimise/unwind), drop redundant timepoints,
close under the gap-introducing rewrite rules, resolve meet-reducible
primitive blocks by frontier-word replacement, and finally read off the
connectors by join and gap probes. Every mutation is committed only after the
teacher confirms the result is still a positive example.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dl import (
    Eliq,
    Instance,
    Ontology,
    Pointed,
    conjoin,
    instance_to_eliq,
    point_component,
    reasoner,
)
from .domainchar import Frontier, frontier, minimal_frontier
from .errors import (
    BudgetExceeded,
    NotPositiveInitialExample,
    NotTreeShaped,
    RuleNotApplicable,
    UnsupportedDialect,
)
from .temporal.eval import SequenceMatcher
from .temporal.model import Conn, PathQuery, TInstance, leq, less, pathquery, tinstance
from .temporal.normal import normalize
from .tempchar import TaggedBNormal, apply_rule, empty_slice, rule_applications
from .verify import CLASS_ELIQ

VARIANT_SAFE = "safe"
VARIANT_DEPTH = "depth"
VARIANT_NEXTDIA = "nextdia"


@dataclass
class Teacher:
    """Answers membership queries about a hidden target truthfully."""

    onto: Ontology
    target: PathQuery
    budget: int = 10_000
    membership_count: int = 0
    max_query_size: int = 0
    transcript: list = field(default_factory=list)

    def __post_init__(self):
        self._matcher = SequenceMatcher(self.onto, self.target)

    def membership(self, dinst: TInstance) -> bool:
        if self.membership_count >= self.budget:
            raise BudgetExceeded(f"budget of {self.budget} membership queries exhausted")
        self.membership_count += 1
        self.max_query_size = max(self.max_query_size, dinst.size)
        answer = self._matcher.run(dinst)
        self.transcript.append((dinst, answer, self.membership_count))
        return answer


@dataclass(frozen=True)
class LearnerConfig:
    variant: str = VARIANT_SAFE
    depth: Optional[int] = None          # known temporal depth, depth variant
    frontier_bound: int = 6
    budget: int = 10_000
    qclass: str = CLASS_ELIQ

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.variant == VARIANT_DEPTH and self.depth is None:
            raise ValueError("the depth variant needs the target depth")


def membership(teacher: Teacher, dinst: TInstance) -> bool:
    return teacher.membership(dinst)


# -------------------------------------------------------------- slice tooling

def saturate_names(onto: Ontology, inst: Instance) -> Instance:
    """Add every entailed concept-name atom; keep the stored role atoms as
    they are so tree-shaped slices stay tree-shaped."""
    sat = reasoner(onto).saturate(inst)
    if not sat.consistent:
        raise NotPositiveInitialExample("instance is unsatisfiable wrt the ontology")
    cat = frozenset(
        (c, a) for a, ns in sat.names.items() for c in ns if c not in ("Top", "bot")
    )
    return Instance(inst.individuals, cat, inst.ratoms)


def _slice_cycle_edge(inst: Instance) -> Optional[tuple[str, str, str]]:
    """A role atom lying on an undirected cycle (self-loops and parallel
    edges included), or None for a forest."""
    atoms = sorted(inst.ratoms)
    seen_pairs = set()
    for r, a, b in atoms:
        if a == b:
            return (r, a, b)
        pair = (min(a, b), max(a, b))
        if pair in seen_pairs:
            return (r, a, b)
        seen_pairs.add(pair)
    parent: dict[str, str] = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    for r, a, b in atoms:
        ra, rb = find(a), find(b)
        if ra == rb:
            return (r, a, b)
        parent[ra] = rb
    return None


def unwind_step(inst: Instance, edge: tuple[str, str, str], fresh_prefix: str) -> Instance:
    """Double the slice along one cycle edge: add a disjoint copy and cross
    the chosen edge between the original and the copy."""
    r, a, b = edge
    copy_of = {ind: f"{fresh_prefix}{ind}" for ind in sorted(inst.individuals)}
    inds = set(inst.individuals) | set(copy_of.values())
    cat = set(inst.catoms)
    rat = set(inst.ratoms)
    for c, x in inst.catoms:
        cat.add((c, copy_of[x]))
    for s, x, y in inst.ratoms:
        rat.add((s, copy_of[x], copy_of[y]))
    a2, b2 = copy_of[a], copy_of[b]
    for s, x, y in list(rat):
        if (x, y) == (a, b):
            rat.discard((s, x, y))
            rat.add((s, a, b2))
        elif (x, y) == (a2, b2):
            rat.discard((s, x, y))
            rat.add((s, a2, b))
    return Instance(frozenset(inds), frozenset(cat), frozenset(rat))


def _prune_bare_individuals(slices: list[Instance], point: str) -> list[Instance]:
    used = {point}
    for s in slices:
        used |= {a for _, a in s.catoms}
        used |= {a for _, a, b in s.ratoms for a in (a, b)}
    return [
        Instance(
            frozenset(used),
            frozenset((c, a) for c, a in s.catoms if a in used),
            frozenset(s.ratoms),
        )
        for s in slices
    ]


class Learner:
    def __init__(self, onto: Ontology, teacher: Teacher, config: LearnerConfig):
        self.onto = onto
        self.teacher = teacher
        self.config = config
        self.r = reasoner(onto)
        self._frontier_cache: dict[str, Optional[Frontier]] = {}
        self.rule_a_commits = 0
        teacher.budget = config.budget

    # ------------------------------------------------------------- plumbing

    def ask(self, slices: list[Instance], point: str) -> bool:
        return self.teacher.membership(tinstance(list(slices), point))

    def frontier_of(self, q: Eliq) -> Optional[Frontier]:
        key = q._key
        if key not in self._frontier_cache:
            self._frontier_cache[key] = frontier(
                self.onto, q, self.config.qclass, self.config.frontier_bound
            )
        return self._frontier_cache[key]

    def negatives_of(self, q: Eliq) -> list[Pointed]:
        front = self.frontier_of(q)
        if front is None:
            raise UnsupportedDialect(
                f"no verified frontier for {q!r} within bound {self.config.frontier_bound}"
            )
        return [self.r.hat(m) for m in front.members]

    # ------------------------------------------------------- step 1: shaping

    def minimise_pass(self, slices: list[Instance], point: str) -> tuple[list[Instance], bool]:
        changed = False
        progress = True
        while progress:
            progress = False
            for i in range(len(slices)):
                for ind in sorted(slices[i].individuals):
                    s = slices[i]
                    keep_c = frozenset((c, a) for c, a in s.catoms if a != ind)
                    keep_r = frozenset(
                        (r, a, b) for r, a, b in s.ratoms if ind not in (a, b)
                    )
                    if keep_c == s.catoms and keep_r == s.ratoms:
                        continue
                    candidate = slices.copy()
                    candidate[i] = Instance(s.individuals, keep_c, keep_r)
                    if self.ask(candidate, point):
                        slices = candidate
                        changed = progress = True
        return slices, changed

    def drop_foreign_components(self, slices: list[Instance], point: str) -> list[Instance]:
        candidate = [point_component(s, point).with_individuals(s.individuals) for s in slices]
        if any(c.catoms != s.catoms or c.ratoms != s.ratoms for c, s in zip(candidate, slices)):
            if not self.ask(candidate, point):
                raise RuntimeError("dropping disconnected slice parts lost positivity")
            return candidate
        return slices

    def treeify(self, slices: list[Instance], point: str) -> list[Instance]:
        slices, _ = self.minimise_pass(slices, point)
        slices = self.drop_foreign_components(slices, point)
        fresh = 0
        while True:
            cyclic = [
                (i, _slice_cycle_edge(point_component(s, point))) for i, s in enumerate(slices)
            ]
            cyclic = [(i, e) for i, e in cyclic if e is not None]
            if not cyclic:
                break
            i, edge = cyclic[0]
            fresh += 1
            slices = slices.copy()
            slices[i] = unwind_step(slices[i], edge, f"w{fresh}_")
            slices = [s.with_individuals(slices[i].individuals) for s in slices]
            slices, _ = self.minimise_pass(slices, point)
            slices = self.drop_foreign_components(slices, point)
        return _prune_bare_individuals(slices, point)

    # ---------------------------------------------------- step 2: timepoints

    def drop_timepoints(self, slices: list[Instance], point: str) -> list[Instance]:
        i = 0
        while i < len(slices) and len(slices) > 1:
            candidate = slices[:i] + slices[i + 1 :]
            if self.ask(candidate, point):
                slices = candidate
            else:
                i += 1
        return slices

    # -------------------------------------------------------- tagged handling

    def tagged_from_slices(
        self, blocks: list[list[Instance]], point: str, b: int
    ) -> TaggedBNormal:
        tags, negs, pblocks = [], [], []
        for blk in blocks:
            row_t, row_n, row_p = [], [], []
            for s in blk:
                s = saturate_names(self.onto, s)
                comp = point_component(s, point)
                try:
                    q = instance_to_eliq(comp, point)
                except NotTreeShaped as exc:  # pragma: no cover - treeify precedes
                    raise RuntimeError("non-tree slice after shaping") from exc
                row_t.append(q)
                row_p.append(Pointed(comp if comp.individuals else s, point))
                if self.r.trivial(q):
                    row_n.append(())
                else:
                    row_n.append(tuple(self.negatives_of(q)))
            tags.append(tuple(row_t))
            negs.append(tuple(row_n))
            pblocks.append(tuple(row_p))
        return TaggedBNormal(
            self.onto, b, tuple(pblocks), tuple(tags), tuple(negs)
        )

    def realise(self, t: TaggedBNormal) -> TInstance:
        return t.to_tinstance()

    def tagged_positive(self, t: TaggedBNormal) -> bool:
        return self.teacher.membership(self.realise(t))

    def tagged_minimise(self, t: TaggedBNormal) -> TaggedBNormal:
        d = self.realise(t)
        slices, _ = self.minimise_pass(list(d.slices), d.point)
        slices = self.drop_foreign_components(slices, d.point)
        slices = _prune_bare_individuals(slices, d.point)
        return self.blocks_from_realised(slices, d.point, t.b)

    def blocks_from_realised(self, slices: list[Instance], point: str, b: int) -> TaggedBNormal:
        """Re-parse a realised slice sequence into gap-normal tagged blocks,
        collapsing over-long empty runs and stripping emptied borders."""
        groups: list[list[Instance]] = []
        cur: list[Instance] = []
        run = 0
        for s in slices:
            if s.is_trivial():
                run += 1
                cur.append(s)
            else:
                if run >= b and cur:
                    body = cur[:-run]
                    if body or not groups:
                        groups.append(body)
                    cur = []
                run = 0
                cur.append(s)
        if cur:
            body = cur[:-run] if run else cur
            if body or not groups:
                groups.append(body)
        blocks = [g for k, g in enumerate(groups) if g or k == 0]
        if not blocks:
            blocks = [[empty_slice()]]
        if not blocks[0]:
            blocks[0] = [empty_slice()]
        cleaned = []
        for k, blk in enumerate(blocks):
            body = list(blk)
            if k > 0:
                while body and body[0].is_trivial():
                    body.pop(0)
            while len(body) > (1 if k == 0 else 0) and body and body[-1].is_trivial():
                body.pop()
            if body:
                cleaned.append(body)
            elif k == 0:
                cleaned.append([empty_slice()])
        return self.tagged_from_slices(cleaned, point, b)

    # --------------------------------------------------------- step 3: rules

    def close_under_rules(self, t: TaggedBNormal) -> TaggedBNormal:
        progress = True
        while progress:
            progress = False
            for rule in ("b", "c"):
                committed, t = self._try_rule(t, rule)
                if committed:
                    progress = True
                    break
        progress = True
        while progress:
            progress = False
            for rule in ("a", "d", "e"):
                committed, t = self._try_rule(t, rule)
                if committed:
                    if rule == "a":
                        self.rule_a_commits += 1
                    progress = True
                    break
        return t

    def _try_rule(self, t: TaggedBNormal, rule: str) -> tuple[bool, TaggedBNormal]:
        for position, choice in rule_applications(t, rule):
            try:
                t2 = apply_rule(t, rule, position, choice)
            except RuleNotApplicable:
                continue
            if self.tagged_positive(t2):
                t2 = self._commit(t2)
                return True, t2
        return False, t

    def _commit(self, t: TaggedBNormal) -> TaggedBNormal:
        """Re-parse the realised sequence into gap-normal blocks, minimise,
        and confirm the result is still a positive example."""
        d = self.realise(t)
        t2 = self.blocks_from_realised(list(d.slices), d.point, t.b)
        if t2.blocks != t.blocks and not self.tagged_positive(t2):
            raise RuntimeError("gap normalisation lost positivity")
        return self.tagged_minimise(t2)

    # ------------------------------------------------- step 4: lone conjuncts

    def star_step(self, t: TaggedBNormal) -> TaggedBNormal:
        if self.config.variant == VARIANT_SAFE:
            return self._star_safe(t)
        exponent = (
            self.config.depth if self.config.variant == VARIANT_DEPTH else t.b
        )
        return self._star_fixed(t, exponent)

    def _eligible_blocks(self, t: TaggedBNormal, need_reducible: bool) -> list[int]:
        out = []
        for i in range(1, len(t.blocks)):
            if len(t.blocks[i]) != 1:
                continue
            q = t.tags[i][0]
            if q is None or self.r.trivial(q):
                continue
            if need_reducible:
                front = self.frontier_of(q)
                if front is None:
                    raise UnsupportedDialect(
                        f"meet-reducibility of {q!r} undecided within the bound"
                    )
                if len(minimal_frontier(self.onto, front.members)) < 2:
                    continue
            out.append(i)
        return out

    def _frontier_word(self, q: Eliq) -> list[Pointed]:
        front = self.frontier_of(q)
        if front is None:
            raise UnsupportedDialect(f"no verified frontier for {q!r}")
        members = minimal_frontier(self.onto, front.members).members or front.members
        return [self.r.hat(m) for m in members]

    def _replace_with_word(self, t: TaggedBNormal, i: int, word: list[Pointed], k: int) -> TaggedBNormal:
        blocks = [list(b) for b in t.blocks]
        tags = [list(b) for b in t.tags]
        negs = [list(b) for b in t.negatives]
        seq = list(word) * k
        blocks[i : i + 1] = [[p] for p in seq]
        tags[i : i + 1] = [[None] for _ in seq]
        negs[i : i + 1] = [[()] for _ in seq]
        return TaggedBNormal(
            t.onto,
            t.b,
            tuple(tuple(b) for b in blocks),
            tuple(tuple(b) for b in tags),
            tuple(tuple(b) for b in negs),
        )

    def _star_safe(self, t: TaggedBNormal) -> TaggedBNormal:
        guard = 0
        while True:
            guard += 1
            if guard > 200:  # pragma: no cover - budget exhausts first
                raise RuntimeError("lone-conjunct elimination failed to stabilise")
            eligible = self._eligible_blocks(t, need_reducible=True)
            if not eligible:
                return t
            i = eligible[0]
            word = self._frontier_word(t.tags[i][0])
            k = 1
            while not self.tagged_positive(self._replace_with_word(t, i, word, k)):
                k *= 2
                if k > 4096:
                    raise RuntimeError("no positive frontier-word exponent found")
            lo, hi = max(1, k // 2), k
            while lo < hi:
                mid = (lo + hi) // 2
                if self.tagged_positive(self._replace_with_word(t, i, word, mid)):
                    hi = mid
                else:
                    lo = mid + 1
            t2 = self._commit(self._replace_with_word(t, i, word, lo))
            t = self.close_under_rules(t2)

    def _star_fixed(self, t: TaggedBNormal, exponent: int) -> TaggedBNormal:
        processed: set = set()
        progress = True
        while progress:
            progress = False
            for i in self._eligible_blocks(t, need_reducible=False):
                key = t.blocks[i][0].instance._key
                if key in processed:
                    continue
                word = self._frontier_word(t.tags[i][0])
                if not word:
                    processed.add(key)
                    continue
                t2 = self._replace_with_word(t, i, word, max(1, exponent))
                if self.tagged_positive(t2):
                    t = self.close_under_rules(self._commit(t2))
                    progress = True
                    break
                processed.add(key)
        return t

    # ------------------------------------------------- step 5: connector read

    def infer_connectors(self, t: TaggedBNormal) -> PathQuery:
        bodies = [[q for q in blk] for blk in t.tags]
        if any(q is None for blk in bodies for q in blk):
            raise RuntimeError("untagged slice at readout")
        conns: list[Conn] = []
        for i in range(len(t.blocks) - 1):
            conns.append(self._connector_at(t, i))
        return pathquery(bodies, conns)

    def _connector_at(self, t: TaggedBNormal, i: int) -> Conn:
        left, right = t.tags[i][-1], t.tags[i + 1][0]
        if self.r.compatible(left, right):
            joined = self._join_blocks(t, i)
            if self.teacher.membership(joined):
                return leq()
        for gap in range(0, t.b + 1):
            cand = _realise_with_gap(t, i, gap)
            if self.teacher.membership(cand):
                return less(gap + 1)
        raise RuntimeError("no connector explains the boundary")

    def _join_blocks(self, t: TaggedBNormal, i: int) -> TInstance:
        joined_body = conjoin(t.tags[i][-1], t.tags[i + 1][0])
        joined = self.r.hat(joined_body)
        slices: list[Instance] = []
        from .tempchar import _point_slice

        tag = 0
        for k, block in enumerate(t.blocks):
            if k == i + 1:
                slices.append(_point_slice(joined, tag))
                tag += 1
                for p in block[1:]:
                    slices.append(_point_slice(p, tag))
                    tag += 1
                continue
            if k:
                slices.extend(empty_slice() for _ in range(t.b))
            if k == i:
                for p in block[:-1]:
                    slices.append(_point_slice(p, tag))
                    tag += 1
            else:
                for p in block:
                    slices.append(_point_slice(p, tag))
                    tag += 1
        return tinstance(slices, "a")

    # ----------------------------------------------------------------- drive

    def run(self, initial: TInstance) -> PathQuery:
        point = initial.point
        slices = [saturate_names(self.onto, s) for s in initial.slices]
        if not self.ask(slices, point):
            raise NotPositiveInitialExample("the teacher rejects the initial example")
        slices = self.treeify(slices, point)
        slices = self.drop_timepoints(slices, point)
        b = len(slices)
        t = self.tagged_from_slices([list(slices)], point, b)
        t = self.close_under_rules(t)
        t = self.star_step(t)
        t = self.close_under_rules(t)
        return normalize(self.onto, self.infer_connectors(t))


def learn(
    onto: Ontology, teacher: Teacher, initial: TInstance, config: LearnerConfig
) -> PathQuery:
    return Learner(onto, teacher, config).run(initial)


def _realise_with_gap(t: TaggedBNormal, boundary: int, gap: int) -> TInstance:
    from .tempchar import _point_slice

    slices: list[Instance] = []
    tag = 0
    for k, block in enumerate(t.blocks):
        if k:
            g = gap if k == boundary + 1 else t.b
            slices.extend(empty_slice() for _ in range(g))
        for p in block:
            slices.append(_point_slice(p, tag))
            tag += 1
    return tinstance(slices, "a")
