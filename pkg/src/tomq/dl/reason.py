"""Reasoning for the Horn dialects: saturation, bounded chase, certain answers,
containment and equivalence.

The saturation engine works on two levels. Named individuals are saturated
directly. Existential obligations are summarised as `witness groups`: the
obligations of one element whose roles share a functional super-role collapse
into a single group, otherwise one group per (role, filler). Group types are
evaluated by `_anon_eval`, a least fixpoint over keys
(fillers, up-roles, parent type); the key space is finite, so chaotic
iteration with in-progress estimates terminates.

The chase materialises the groups as fresh individuals up to a depth bound,
reusing a named successor whenever the obligation's role has a functional
super-role already realised by a named edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import UnsatisfiableQuery
from .eliq import Eliq, conjoin, induced_instance
from .model import (
    BOT,
    TOP,
    Basic,
    ConjLhs,
    Disjoint,
    ExistsLhs,
    ExistsRhs,
    Func,
    Instance,
    Ontology,
    Pointed,
    Role,
    RoleSub,
    SubBasic,
    rename_instance,
)


@dataclass(frozen=True)
class Group:
    """A bundle of existential obligations realised by one anonymous witness."""

    roles: frozenset[Role]
    fillers: frozenset[str]

    def sort_key(self):
        return (tuple(sorted(map(str, self.roles))), tuple(sorted(self.fillers)))


@dataclass
class Saturation:
    consistent: bool
    names: dict[str, set[str]]
    edges: frozenset[tuple[str, str, str]]  # role-closure of the stored atoms
    groups: dict[str, list[Group]]
    group_types: dict[tuple[str, Group], frozenset[str]]

    def instance(self, base: Instance) -> Instance:
        cat = frozenset(
            (c, a) for a, ns in self.names.items() for c in ns if c not in (TOP, BOT)
        )
        return Instance(base.individuals, cat, self.edges)


class Reasoner:
    def __init__(self, onto: Ontology):
        self.onto = onto
        self._rc = self._role_closure()
        self.func_decl = frozenset(ax.role for ax in onto.axioms if isinstance(ax, Func))
        self._sat_cache: dict = {}
        self._chase_cache: dict = {}
        self._hat_cache: dict = {}
        self._certain_cache: dict = {}
        self._contains_cache: dict = {}
        self._anon: dict = {}
        self._anon_stack: set = set()
        self._anon_changed = False
        self._subbasic = onto.axioms_of(SubBasic)
        self._disjoint = onto.axioms_of(Disjoint)
        self._exrhs = onto.axioms_of(ExistsRhs)
        self._exlhs = onto.axioms_of(ExistsLhs)
        self._conjlhs = onto.axioms_of(ConjLhs)

    # ------------------------------------------------------------------ roles

    def _role_closure(self) -> dict[Role, frozenset[Role]]:
        roles = set()
        for name in self.onto.signature.role_names:
            roles.add(Role(name))
            roles.add(Role(name, True))
        subs = [ax for ax in self.onto.axioms if isinstance(ax, RoleSub)]
        out = {}
        for r in roles:
            seen = {r}
            frontier = [r]
            while frontier:
                cur = frontier.pop()
                for ax in subs:
                    for nxt in ((ax.sup,) if ax.sub == cur else ()) + (
                        (ax.sup.inverse,) if ax.sub.inverse == cur else ()
                    ):
                        if nxt not in seen:
                            seen.add(nxt)
                            frontier.append(nxt)
            out[r] = frozenset(seen)
        return out

    def super_roles(self, role: Role) -> frozenset[Role]:
        return self._rc.get(role, frozenset((role,)))

    def functional_supers(self, role: Role) -> frozenset[Role]:
        return self.super_roles(role) & self.func_decl

    def _closed_edges(self, inst: Instance) -> frozenset[tuple[str, str, str]]:
        out = set()
        for p, a, b in inst.ratoms:
            for s in self.super_roles(Role(p)):
                out.add((s.name, b, a) if s.inverted else (s.name, a, b))
        return frozenset(out)

    # ------------------------------------------------------------- saturation

    def saturate(self, inst: Instance) -> Saturation:
        key = inst.key()
        if key in self._sat_cache:
            return self._sat_cache[key]
        result = self._saturate(inst)
        self._sat_cache[key] = result
        return result

    def _saturate(self, inst: Instance) -> Saturation:
        edges = set(self._closed_edges(inst))
        names: dict[str, set[str]] = {a: set() for a in inst.individuals}
        for c, a in inst.catoms:
            names[a].add(c)
        succ: dict[tuple[str, Role], set[str]] = {}

        def add_edge(role: Role, a: str, b: str) -> bool:
            """Record role(a,b) together with its super-roles."""
            added = False
            for s in self.super_roles(role):
                e = (s.name, b, a) if s.inverted else (s.name, a, b)
                if e not in edges:
                    edges.add(e)
                    added = True
                succ.setdefault((e[1], Role(e[0])), set()).add(e[2])
                succ.setdefault((e[2], Role(e[0], True)), set()).add(e[1])
            return added

        for r, a, b in list(edges):
            add_edge(Role(r), a, b)
        consistent = True
        groups: dict[str, list[Group]] = {a: [] for a in inst.individuals}
        gtypes: dict[tuple[str, Group], frozenset[str]] = {}

        def named_succs(a: str, role: Role) -> set[str]:
            return succ.get((a, role), set())

        def func_clash() -> bool:
            return any(
                len(named_succs(a, f)) > 1
                for f in self.func_decl
                for a in inst.individuals
            )

        if func_clash():
            consistent = False

        def has_successor(a: str, role: Role) -> bool:
            if named_succs(a, role):
                return True
            return any(
                role in self.super_roles(r) for g in groups[a] for r in g.roles
            )

        def basic_holds(a: str, b: Basic) -> bool:
            if b.kind == "top":
                return True
            if b.kind == "name":
                return b.name in names[a]
            return has_successor(a, b.role)

        def add_obligation(a: str, role: Role, filler: Optional[str]) -> bool:
            """Place an obligation; returns True when something changed."""
            fset = frozenset() if filler in (None, TOP) else frozenset((filler,))
            fsup = self.functional_supers(role)
            if fsup:
                targets = set()
                for f in fsup:
                    targets |= named_succs(a, f)
                if targets:
                    changed = False
                    for b in sorted(targets):
                        if add_edge(role, a, b):
                            changed = True
                        for x in fset:
                            if x not in names[b]:
                                names[b].add(x)
                                changed = True
                    return changed
                for i, g in enumerate(groups[a]):
                    gf = set()
                    for r in g.roles:
                        gf |= self.functional_supers(r)
                    if gf & fsup:
                        ng = Group(g.roles | {role}, g.fillers | fset)
                        if ng != g:
                            groups[a][i] = ng
                            return True
                        return False
                groups[a].append(Group(frozenset((role,)), fset))
                return True
            g = Group(frozenset((role,)), fset)
            if g in groups[a]:
                return False
            groups[a].append(g)
            return True

        rounds_left = 8 * (
            (len(inst.individuals) + 4)
            * (
                len(self.onto.signature.concept_names)
                + len(self.onto.signature.role_names)
                + len(self.onto.axioms)
                + 4
            )
            + 16
        )
        changed = True
        while changed and consistent:
            changed = False
            rounds_left -= 1
            if rounds_left < 0:  # pragma: no cover - safety net
                raise RuntimeError("saturation did not stabilise")
            self._anon_changed = False
            for a in sorted(inst.individuals):
                t = names[a]
                for ax in self._conjlhs:
                    if (ax.lhs1 in t or ax.lhs1 == TOP) and (
                        ax.lhs2 in t or ax.lhs2 == TOP
                    ):
                        if ax.rhs == BOT:
                            consistent = False
                        elif ax.rhs not in t and ax.rhs != TOP:
                            t.add(ax.rhs)
                            changed = True
                for ax in self._subbasic:
                    if basic_holds(a, ax.lhs):
                        if ax.rhs.kind == "name":
                            if ax.rhs.name not in t:
                                t.add(ax.rhs.name)
                                changed = True
                        elif ax.rhs.kind == "exists":
                            if add_obligation(a, ax.rhs.role, None):
                                changed = True
                for ax in self._disjoint:
                    if basic_holds(a, ax.lhs) and basic_holds(a, ax.rhs):
                        consistent = False
                for ax in self._exrhs:
                    if ax.lhs in t or ax.lhs == TOP:
                        if add_obligation(a, ax.role, ax.filler):
                            changed = True
                for ax in self._exlhs:
                    fired = False
                    for b in named_succs(a, ax.role):
                        if ax.filler == TOP or ax.filler in names[b]:
                            fired = True
                            break
                    if not fired:
                        for g in groups[a]:
                            if any(ax.role in self.super_roles(r) for r in g.roles):
                                gt = gtypes.get((a, g), frozenset())
                                if ax.filler == TOP or ax.filler in gt:
                                    fired = True
                                    break
                    if fired and ax.rhs != TOP and ax.rhs not in t:
                        t.add(ax.rhs)
                        changed = True
                for i, g in enumerate(list(groups[a])):
                    tp, pushed, proles = self._anon_eval(
                        g.fillers, g.roles, frozenset(names[a])
                    )
                    if proles - g.roles:
                        groups[a][i] = Group(g.roles | proles, g.fillers)
                        changed = True
                        continue
                    if gtypes.get((a, g)) != tp:
                        gtypes[(a, g)] = tp
                        changed = True
                    if BOT in tp:
                        consistent = False
                    for x in pushed:
                        if x == BOT:
                            consistent = False
                        elif x not in names[a] and x != TOP:
                            names[a].add(x)
                            changed = True
            if func_clash():
                consistent = False
            if self._anon_changed:
                changed = True
        return Saturation(consistent, names, frozenset(edges), groups, gtypes)

    # ------------------------------------------------ anonymous witness types

    def _anon_eval(
        self, fillers: frozenset[str], uproles: frozenset[Role], ptype: frozenset[str]
    ) -> tuple[frozenset[str], frozenset[str], frozenset[Role]]:
        """Least type of a witness created via `uproles` below a parent of type
        `ptype`. Returns (type, names forced onto the parent, roles the parent
        additionally reaches the witness by, due to functional merges)."""
        key = (fillers, uproles, ptype)
        if key in self._anon_stack:
            got = self._anon.get(key)
            return got[:3] if got else (fillers - {TOP}, frozenset(), frozenset())
        if key in self._anon:
            return self._anon[key][:3]
        self._anon_stack.add(key)
        try:
            t = set(fillers) - {TOP}
            pushed: set[str] = set()
            pushed_roles: set[Role] = set()
            down_roles = frozenset(
                s for u in uproles for s in self.super_roles(u.inverse)
            )
            cgroups: list[Group] = []
            ctypes: dict[Group, frozenset[str]] = {}

            def has_succ(role: Role) -> bool:
                if role in down_roles:
                    return True
                return any(role in self.super_roles(r) for g in cgroups for r in g.roles)

            def basic_holds(b: Basic) -> bool:
                if b.kind == "top":
                    return True
                if b.kind == "name":
                    return b.name in t
                return has_succ(b.role)

            def add_obligation(role: Role, filler: Optional[str]) -> bool:
                fset = frozenset() if filler in (None, TOP) else frozenset((filler,))
                fsup = self.functional_supers(role)
                if fsup and any(f in down_roles for f in fsup):
                    before = (len(pushed), len(pushed_roles))
                    pushed.update(fset)
                    if role not in down_roles:
                        pushed_roles.add(role.inverse)
                    return (len(pushed), len(pushed_roles)) != before
                if fsup:
                    for i, g in enumerate(cgroups):
                        gf = set()
                        for r in g.roles:
                            gf |= self.functional_supers(r)
                        if gf & fsup:
                            ng = Group(g.roles | {role}, g.fillers | fset)
                            if ng != g:
                                cgroups[i] = ng
                                return True
                            return False
                    cgroups.append(Group(frozenset((role,)), fset))
                    return True
                g = Group(frozenset((role,)), fset)
                if g in cgroups:
                    return False
                cgroups.append(g)
                return True

            changed = True
            while changed:
                changed = False
                for ax in self._conjlhs:
                    if (ax.lhs1 in t or ax.lhs1 == TOP) and (
                        ax.lhs2 in t or ax.lhs2 == TOP
                    ):
                        tgt = BOT if ax.rhs == BOT else ax.rhs
                        if tgt != TOP and tgt not in t:
                            t.add(tgt)
                            changed = True
                for ax in self._subbasic:
                    if basic_holds(ax.lhs):
                        if ax.rhs.kind == "name" and ax.rhs.name not in t:
                            t.add(ax.rhs.name)
                            changed = True
                        elif ax.rhs.kind == "exists":
                            if add_obligation(ax.rhs.role, None):
                                changed = True
                for ax in self._disjoint:
                    if basic_holds(ax.lhs) and basic_holds(ax.rhs) and BOT not in t:
                        t.add(BOT)
                        changed = True
                for ax in self._exrhs:
                    if ax.lhs in t or ax.lhs == TOP:
                        if add_obligation(ax.role, ax.filler):
                            changed = True
                for ax in self._exlhs:
                    fired = False
                    if ax.role in down_roles and (ax.filler == TOP or ax.filler in ptype):
                        fired = True
                    if not fired:
                        for g in cgroups:
                            if any(ax.role in self.super_roles(r) for r in g.roles):
                                gt = ctypes.get(g, frozenset())
                                if ax.filler == TOP or ax.filler in gt:
                                    fired = True
                                    break
                    if fired and ax.rhs != TOP and ax.rhs not in t:
                        t.add(ax.rhs)
                        changed = True
                for i, g in enumerate(list(cgroups)):
                    ct, cpushed, croles = self._anon_eval(g.fillers, g.roles, frozenset(t))
                    if croles - g.roles:
                        cgroups[i] = Group(g.roles | croles, g.fillers)
                        changed = True
                        continue
                    if ctypes.get(g) != ct:
                        ctypes[g] = ct
                        changed = True
                    if BOT in ct and BOT not in t:
                        t.add(BOT)
                        changed = True
                    for x in cpushed:
                        if x not in t and x != TOP:
                            t.add(x)
                            changed = True
            result = (
                frozenset(t),
                frozenset(pushed),
                frozenset(pushed_roles),
                tuple(sorted(cgroups, key=Group.sort_key)),
            )
            old = self._anon.get(key)
            if old is None or old != result:
                self._anon[key] = result
                self._anon_changed = True
            return result[:3]
        finally:
            self._anon_stack.discard(key)

    def _anon_children(self, fillers, uproles, ptype):
        self._anon_eval(fillers, uproles, ptype)
        return self._anon[(fillers, uproles, ptype)][3]

    # ------------------------------------------------------------------ chase

    def chase(self, inst: Instance, depth: int) -> Instance:
        key = (inst.key(), depth)
        if key in self._chase_cache:
            return self._chase_cache[key]
        sat = self.saturate(inst)
        if not sat.consistent:
            raise UnsatisfiableQuery("cannot chase an unsatisfiable instance")
        inds = set(inst.individuals)
        cat = {(c, a) for a, ns in sat.names.items() for c in ns if c not in (TOP, BOT)}
        rat = set(sat.edges)
        frontier: list[tuple[str, Group, frozenset[str], int]] = []
        for a in sorted(inst.individuals):
            for g in sorted(sat.groups[a], key=Group.sort_key):
                frontier.append((a, g, frozenset(sat.names[a]), 1))
        while frontier:
            parent, g, ptype, d = frontier.pop(0)
            if d > depth:
                continue
            tp, _, _ = self._anon_eval(g.fillers, g.roles, ptype)
            w = self._witness_name(parent, g, inds)
            inds.add(w)
            for c in sorted(tp):
                if c not in (TOP, BOT):
                    cat.add((c, w))
            for r in sorted(g.roles, key=str):
                for s in sorted(self.super_roles(r), key=str):
                    rat.add((s.name, w, parent) if s.inverted else (s.name, parent, w))
            for cg in self._anon_children(g.fillers, g.roles, ptype):
                frontier.append((w, cg, tp, d + 1))
        out = Instance(frozenset(inds), frozenset(cat), frozenset(rat))
        self._chase_cache[key] = out
        return out

    @staticmethod
    def _witness_name(parent: str, g: Group, taken: set[str]) -> str:
        rtok = "+".join(sorted(str(r) for r in g.roles))
        ftok = "+".join(sorted(g.fillers))
        base = f"{parent}>{rtok}" + (f":{ftok}" if ftok else "")
        name = base
        i = 2
        while name in taken:
            name = f"{base}#{i}"
            i += 1
        return name

    # -------------------------------------------------------- certain answers

    def is_satisfiable(self, inst: Instance) -> bool:
        return self.saturate(inst).consistent

    def certain_answer(self, inst: Instance, point: str, q: Eliq) -> bool:
        ckey = (inst.key(), point, q._key)
        if ckey in self._certain_cache:
            return self._certain_cache[ckey]
        out = self._certain_answer(inst, point, q)
        self._certain_cache[ckey] = out
        return out

    def _certain_answer(self, inst: Instance, point: str, q: Eliq) -> bool:
        if not self.is_satisfiable(inst):
            return True
        if q.is_bottom:
            return False
        if q.is_top:
            return True
        chased = self.chase(inst, q.role_depth)
        return hom_exists(q, chased, point)

    # ------------------------------------------------------------ containment

    def hat(self, q: Eliq) -> Pointed:
        """The containment-reduction instance of q: the induced instance,
        quotiented to a fixpoint by functionality over the role-closed atoms."""
        key = q._key
        if key in self._hat_cache:
            return self._hat_cache[key]
        if q.is_bottom:
            raise UnsatisfiableQuery("the inconsistency query has no reduction instance")
        pointed = induced_instance(q)
        inst, point = pointed.instance, pointed.point
        while True:
            closed = self._closed_edges(inst)
            succ: dict[tuple[str, Role], set[str]] = {}
            for r, a, b in closed:
                succ.setdefault((a, Role(r)), set()).add(b)
                succ.setdefault((b, Role(r, True)), set()).add(a)
            merge = None
            for f in sorted(self.func_decl, key=str):
                for a in sorted(inst.individuals):
                    ss = sorted(succ.get((a, f), ()))
                    if len(ss) > 1:
                        merge = (ss[0], ss[1])
                        break
                if merge:
                    break
            if not merge:
                break
            keep, drop = merge
            if drop == point:
                keep, drop = drop, keep
            inst = rename_instance(inst, {drop: keep})
        out = Pointed(inst, point)
        self._hat_cache[key] = out
        return out

    def query_satisfiable(self, q: Eliq) -> bool:
        if q.is_bottom:
            return False
        return self.is_satisfiable(self.hat(q).instance)

    def contains(self, q1: Eliq, q2: Eliq) -> bool:
        key = (q1._key, q2._key)
        if key in self._contains_cache:
            return self._contains_cache[key]
        out = self._contains(q1, q2)
        self._contains_cache[key] = out
        return out

    def _contains(self, q1: Eliq, q2: Eliq) -> bool:
        if not self.query_satisfiable(q1):
            return True
        if q2.is_top:
            return True
        if q2.is_bottom:
            return False
        h = self.hat(q1)
        return self.certain_answer(h.instance, h.point, q2)

    def equivalent(self, q1: Eliq, q2: Eliq) -> bool:
        return self.contains(q1, q2) and self.contains(q2, q1)

    def compatible(self, q1: Eliq, q2: Eliq) -> bool:
        return self.query_satisfiable(conjoin(q1, q2))

    def trivial(self, q: Eliq) -> bool:
        """q is equivalent to Top wrt the ontology."""
        return q.is_top or self.contains(Eliq(), q)

    # ---------------------------------------------------- pointed entailment

    def pointed_entails(self, src: Pointed, tgt: Pointed) -> bool:
        """Does the pointed instance `src`, read as a query, entail `tgt`'s query?

        Works for arbitrary (possibly cyclic) instances via a backtracking
        homomorphism search into the bounded chase of `src`.
        """
        if not self.is_satisfiable(src.instance):
            return True
        depth = max(1, len(tgt.instance.individuals))
        chased = self.chase(src.instance, depth)
        return general_hom_exists(tgt.instance, tgt.point, chased, src.point)


def hom_exists(q: Eliq, inst: Instance, point: str) -> bool:
    """Tree-homomorphism check of q into inst (no ontology) by dynamic
    programming over (query node, individual)."""
    if q.is_bottom:
        return False
    memo: dict[tuple[str, str], bool] = {}

    def ok(node: Eliq, e: str) -> bool:
        k = (node._key, e)
        if k in memo:
            return memo[k]
        memo[k] = False  # cycle guard; tree queries cannot actually recurse
        res = all((c, e) in inst.catoms for c in node.names) and all(
            any(ok(child, e2) for e2 in sorted(inst.successors(e, role)))
            for role, child in node.edges
        )
        memo[k] = res
        return res

    return ok(q, point)


def general_hom_exists(src: Instance, spoint: str, tgt: Instance, tpoint: str) -> bool:
    """Backtracking homomorphism search from an arbitrary instance into tgt."""
    order = sorted(src.individuals)
    order.remove(spoint)
    order = [spoint] + order
    assignment: dict[str, str] = {}

    def consistent(v: str, e: str) -> bool:
        if any((c, e) not in tgt.catoms for c, x in src.catoms if x == v):
            return False
        for r, x, y in src.ratoms:
            if x == v and y in assignment and (r, e, assignment[y]) not in tgt.ratoms:
                return False
            if y == v and x in assignment and (r, assignment[x], e) not in tgt.ratoms:
                return False
            if x == v and y == v and (r, e, e) not in tgt.ratoms:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        candidates = [tpoint] if v == spoint else sorted(tgt.individuals)
        for e in candidates:
            if consistent(v, e):
                assignment[v] = e
                if search(i + 1):
                    return True
                del assignment[v]
        return False

    return search(0)


_REASONERS: dict[Ontology, Reasoner] = {}


def reasoner(onto: Ontology) -> Reasoner:
    if onto not in _REASONERS:
        _REASONERS[onto] = Reasoner(onto)
    return _REASONERS[onto]
