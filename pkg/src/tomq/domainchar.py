"""Frontiers, split-partners, meet-reducibility and singular-positive
characterisations of domain queries.

Frontier search is generate-and-verify: candidates come from one-step
weakenings plus plain enumeration, and a set is only returned when the
brute-force frontier check passes at the same bound. Split-partners follow
the type/product construction, with type consistency decided through Horn
convexity instead of a tableau.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .dl import (
    BOT,
    TOP,
    TOP_QUERY,
    Basic,
    ConjLhs,
    Disjoint,
    Eliq,
    ExistsLhs,
    ExistsRhs,
    Instance,
    Ontology,
    Pointed,
    Role,
    Signature,
    SubBasic,
    conjoin,
    conjoin_all,
    exists,
    make_eliq,
    merge_instances,
    point_component,
    reasoner,
    rename_instance,
)
from .errors import NoCharacterisationFound, SplitSizeExceeded, UnsatisfiableQuery, UnsupportedDialect
from .verify import CLASS_ELIQ, CLASS_ELQ, CLASS_P, EnumSpec, check_frontier, enum_domain_queries

PREFER_FRONTIER = "prefer-frontier"
PREFER_SPLIT = "prefer-split"


@dataclass(frozen=True)
class Frontier:
    members: tuple[Eliq, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class SplitPartner:
    members: tuple[Pointed, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class SingularPlus:
    positive: Pointed
    negatives: tuple[Pointed, ...]
    provenance: str  # "frontier" | "split"


def _sorted_queries(qs: Iterable[Eliq]) -> list[Eliq]:
    return sorted(set(qs), key=lambda q: (q.size, q._key))


def one_step_weakenings(q: Eliq) -> list[Eliq]:
    """Drop one concept name, drop one leaf edge, or duplicate an edge as a
    zigzag; only syntactic candidates, the verifier decides what survives."""
    out: list[Eliq] = []

    def rebuild(node: Eliq, replacements: dict) -> Eliq:
        return replacements.get(id(node), node)

    def variants(node: Eliq) -> list[Eliq]:
        vs = []
        names = node.names
        for i in range(len(names)):
            vs.append(make_eliq(names[:i] + names[i + 1:], node.edges))
        for i, (role, child) in enumerate(node.edges):
            rest = node.edges[:i] + node.edges[i + 1:]
            if not child.edges and not child.names:
                vs.append(make_eliq(names, rest))
            if not child.edges and child.names:
                vs.append(make_eliq(names, rest + ((role, TOP_QUERY),)))
            zig = conjoin(child, exists(role.inverse, exists(role, child)))
            vs.append(make_eliq(names, rest + ((role, zig),)))
            for sub in variants(child):
                vs.append(make_eliq(names, rest + ((role, sub),)))
        return vs

    out.extend(variants(q))
    return _sorted_queries(out)


def frontier(
    onto: Ontology,
    q: Eliq,
    qclass: str = CLASS_ELIQ,
    size_bound: int = 6,
) -> Optional[Frontier]:
    """A frontier of q within the class, or None when the bounded verified
    search cannot certify one. For the propositional class the construction
    is exact, not merely verified."""
    r = reasoner(onto)
    if not r.query_satisfiable(q):
        raise UnsatisfiableQuery("frontier of an unsatisfiable query")
    if r.trivial(q):
        return Frontier(())
    if qclass == CLASS_P:
        return Frontier(tuple(_prop_frontier(onto, q)))
    pool = set(one_step_weakenings(q))
    pool.update(enum_domain_queries(onto.signature, qclass, size_bound))
    candidates = [
        c for c in _sorted_queries(pool)
        if (not c.has_inverse() if qclass == CLASS_ELQ else True)
        and r.contains(q, c) and not r.contains(c, q)
    ]
    members = _maximal(onto, candidates)
    spec = EnumSpec(onto.signature, qclass, size_bound=size_bound)
    verdict = check_frontier(onto, q, members, spec)
    if verdict.passed and not _path_probe_witness(onto, q, members, size_bound + 3):
        return Frontier(tuple(members))
    return None


def frontier_candidates(onto: Ontology, q: Eliq, qclass: str, size_bound: int) -> list[list[Eliq]]:
    """The candidate sets the bounded search would propose, for inspection."""
    r = reasoner(onto)
    pool = set(one_step_weakenings(q))
    pool.update(enum_domain_queries(onto.signature, qclass, size_bound))
    candidates = [
        c for c in _sorted_queries(pool)
        if r.contains(q, c) and not r.contains(c, q)
    ]
    sets = [_maximal(onto, candidates)]
    weak = [
        c for c in one_step_weakenings(q)
        if r.contains(q, c) and not r.contains(c, q)
    ]
    if weak:
        sets.append(_maximal(onto, weak))
    return sets


MAX_PATH_PROBES = 20000


def path_probes(sig: Signature, max_len: int) -> list[Eliq]:
    """Caterpillar probes: a role chain with optional single names at root and
    tip. Cheap to test at lengths the full enumeration cannot reach; they are
    the shapes that defeat would-be frontiers built over looping ontologies."""
    roles = [Role(r) for r in sorted(sig.role_names)]
    roles += [r.inverse for r in roles]
    roles.sort(key=str)
    names = [None] + sorted(sig.concept_names)
    probes: list[Eliq] = []
    chains: list[tuple[Role, ...]] = [()]
    for _ in range(max_len):
        chains = [c + (r,) for c in chains for r in roles]
        for chain in chains:
            for root_name in names:
                for tip_name in names:
                    tip = TOP_QUERY if tip_name is None else make_eliq([tip_name])
                    node = tip
                    for role in reversed(chain):
                        node = exists(role, node)
                    if root_name is not None:
                        node = conjoin(make_eliq([root_name]), node)
                    probes.append(node)
                    if len(probes) >= MAX_PATH_PROBES:
                        return probes
    return probes


def _path_probe_witness(onto: Ontology, q: Eliq, members: Sequence[Eliq], max_len: int) -> Optional[Eliq]:
    r = reasoner(onto)
    for probe in path_probes(onto.signature, max_len):
        if not r.contains(q, probe) or r.contains(probe, q):
            continue
        if not any(r.contains(m, probe) for m in members):
            return probe
    return None


def _prop_frontier(onto: Ontology, q: Eliq) -> list[Eliq]:
    names = sorted(onto.signature.concept_names)
    r = reasoner(onto)
    candidates = []
    for k in range(len(names) + 1):
        for combo in itertools.combinations(names, k):
            s = make_eliq(combo)
            if r.contains(q, s) and not r.contains(s, q):
                candidates.append(s)
    return _maximal(onto, candidates)


def _maximal(onto: Ontology, candidates: Sequence[Eliq]) -> list[Eliq]:
    """Containment-maximal candidates, one representative per equivalence class."""
    r = reasoner(onto)
    picked: list[Eliq] = []
    for c in _sorted_queries(candidates):
        if any(r.equivalent(c, p) for p in picked):
            continue
        picked.append(c)
    out = []
    for c in picked:
        if not any(
            r.contains(d, c) and not r.contains(c, d) for d in picked if d is not c
        ):
            out.append(c)
    return _sorted_queries(out)


def minimal_frontier(onto: Ontology, members: Iterable[Eliq]) -> Frontier:
    """Exhaustively remove members entailed by a distinct remaining member."""
    r = reasoner(onto)
    current = _sorted_queries(members)
    changed = True
    while changed:
        changed = False
        for i, m in enumerate(current):
            if any(j != i and r.contains(other, m) for j, other in enumerate(current)):
                del current[i]
                changed = True
                break
    return Frontier(tuple(current))


def is_meet_reducible(
    onto: Ontology, q: Eliq, qclass: str = CLASS_ELIQ, size_bound: int = 6
) -> Optional[bool]:
    """True/False via a verified frontier; falls back to a bounded search for
    a witnessing conjunction, returning None when neither path decides."""
    r = reasoner(onto)
    front = frontier(onto, q, qclass, size_bound)
    if front is not None:
        return len(minimal_frontier(onto, front.members)) >= 2
    candidates = [
        c
        for c in enum_domain_queries(onto.signature, qclass, size_bound)
        if r.contains(q, c) and not r.contains(c, q)
    ]
    for q1, q2 in itertools.combinations(candidates, 2):
        both = conjoin(q1, q2)
        if r.contains(both, q):
            return True
    return None


# ------------------------------------------------------------ split-partners

@dataclass(frozen=True)
class TypeAtlas:
    elements: tuple[Eliq, ...]
    types: tuple[frozenset[int], ...]   # positive element indices per type
    type_instance: Instance
    type_ids: tuple[str, ...]

    def positives(self, i: int) -> list[Eliq]:
        return [self.elements[j] for j in sorted(self.types[i])]


def _subconcepts(q: Eliq) -> set[Eliq]:
    out = set()

    def walk(node: Eliq):
        if node.is_top or node.is_bottom:
            return
        out.add(node)
        for n in node.names:
            out.add(make_eliq([n]))
        for role, child in node.edges:
            out.add(make_eliq(edges=[(role, child)]))
            walk(child)

    walk(q)
    return out


def _basic_as_query(b: Basic) -> Optional[Eliq]:
    if b.kind == "top":
        return None
    if b.kind == "name":
        return make_eliq([b.name])
    return exists(b.role)


def _ontology_subconcepts(onto: Ontology) -> set[Eliq]:
    out: set[Eliq] = set()
    for ax in sorted(onto.axioms, key=str):
        if isinstance(ax, (SubBasic, Disjoint)):
            for b in (ax.lhs, ax.rhs):
                q = _basic_as_query(b)
                if q is not None:
                    out.add(q)
        elif isinstance(ax, ExistsRhs):
            if ax.lhs != TOP:
                out.add(make_eliq([ax.lhs]))
            filler = TOP_QUERY if ax.filler == TOP else make_eliq([ax.filler])
            out.add(exists(ax.role, filler))
            if ax.filler != TOP:
                out.add(make_eliq([ax.filler]))
        elif isinstance(ax, ExistsLhs):
            filler = TOP_QUERY if ax.filler == TOP else make_eliq([ax.filler])
            out.add(exists(ax.role, filler))
            if ax.filler != TOP:
                out.add(make_eliq([ax.filler]))
            if ax.rhs != TOP:
                out.add(make_eliq([ax.rhs]))
        elif isinstance(ax, ConjLhs):
            for n in (ax.lhs1, ax.lhs2, ax.rhs):
                if n not in (TOP, BOT):
                    out.add(make_eliq([n]))
    return out


MAX_CLOSURE = 16
DEFAULT_ATOM_BUDGET = 10 ** 6


def type_atlas(onto: Ontology, sig: Signature, queries: Sequence[Eliq]) -> TypeAtlas:
    """Maximal consistent sign assignments over the closure, and the instance
    over them. Consistency of a candidate type is the Horn convexity test:
    the positives are satisfiable and entail no negated member."""
    r = reasoner(onto)
    elements: set[Eliq] = set()
    for name in sorted(sig.concept_names):
        elements.add(make_eliq([name]))
    elements |= _ontology_subconcepts(onto)
    for q in queries:
        if not q.is_bottom:
            elements |= _subconcepts(q)
    elems = _sorted_queries(elements)
    if len(elems) > MAX_CLOSURE:
        raise SplitSizeExceeded(f"closure of {len(elems)} concepts is beyond the atlas budget")
    types: list[frozenset[int]] = []
    for signs in itertools.product((False, True), repeat=len(elems)):
        pos = [e for e, s in zip(elems, signs) if s]
        neg = [e for e, s in zip(elems, signs) if not s]
        posq = conjoin_all(pos)
        if not r.query_satisfiable(posq):
            continue
        if any(r.contains(posq, d) for d in neg):
            continue
        types.append(frozenset(i for i, s in enumerate(signs) if s))
    type_ids = tuple(f"t{i}" for i in range(len(types)))
    catoms = []
    name_index = {e._key: e for e in elems}
    for i, tp in enumerate(types):
        for j in tp:
            e = elems[j]
            if not e.edges and len(e.names) == 1:
                catoms.append((e.names[0], type_ids[i]))
    ratoms = []
    for p in sorted(sig.role_names):
        for i, tp in enumerate(types):
            for k, tp2 in enumerate(types):
                if _edge_possible(onto, elems, tp, tp2, Role(p)):
                    ratoms.append((p, type_ids[i], type_ids[k]))
    inst = Instance(frozenset(type_ids), frozenset(catoms), frozenset(ratoms))
    return TypeAtlas(tuple(elems), tuple(types), inst, type_ids)


def _edge_possible(onto, elems, tp_from, tp_to, role: Role) -> bool:
    r = reasoner(onto)
    left = conjoin_all(elems[j] for j in sorted(tp_from))
    right = conjoin_all(elems[j] for j in sorted(tp_to))
    pattern = _two_element_pattern(onto, left, right, role)
    if pattern is None:
        return False
    if not r.is_satisfiable(pattern):
        return False
    for j, e in enumerate(elems):
        if j not in tp_from and r.certain_answer(pattern, "a", e):
            return False
        if j not in tp_to and r.certain_answer(pattern, "b", e):
            return False
    return True


def _two_element_pattern(onto, left: Eliq, right: Eliq, role: Role) -> Optional[Instance]:
    r = reasoner(onto)
    try:
        hl = r.hat(left)
        hr = r.hat(right)
    except UnsatisfiableQuery:
        return None
    li = rename_instance(hl.instance, _prefix_map(hl.instance, "l", hl.point, "a"))
    ri = rename_instance(hr.instance, _prefix_map(hr.instance, "r", hr.point, "b"))
    base = merge_instances([li, ri])
    ratoms = set(base.ratoms)
    if role.inverted:
        ratoms.add((role.name, "b", "a"))
    else:
        ratoms.add((role.name, "a", "b"))
    return Instance(base.individuals, base.catoms, frozenset(ratoms))


def _prefix_map(inst: Instance, prefix: str, point: str, new_point: str) -> dict:
    out = {point: new_point}
    for ind in sorted(inst.individuals):
        if ind != point:
            out[ind] = f"{prefix}_{ind}"
    return out


def split_partner(
    onto: Ontology,
    sig: Signature,
    queries: Sequence[Eliq],
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> SplitPartner:
    """The n-fold product of the type instance, pointed at every tuple whose
    i-th type refutes the i-th query; components are trimmed to the point."""
    if onto.dialect not in ("dl-lite-h", "dl-lite-f", "dl-lite-f-minus", "elhif-nf"):
        raise UnsupportedDialect(onto.dialect)
    qs = list(queries)
    atlas = type_atlas(onto, sig, qs)
    n = len(qs)
    elems = {e._key: i for i, e in enumerate(atlas.elements)}

    def refutes(tp: frozenset[int], q: Eliq) -> bool:
        if q.is_bottom:
            return True
        if q.is_top:
            return False
        return elems[q._key] not in tp

    tuples = []
    per_query_types = []
    for q in qs:
        ok = [i for i, tp in enumerate(atlas.types) if refutes(tp, q)]
        per_query_types.append(ok)
    est_inds = 1
    for ok in per_query_types:
        est_inds *= max(1, len(atlas.types))
    if n and len(atlas.types) ** n * max(1, len(sig.role_names)) > atom_budget:
        raise SplitSizeExceeded("product instance would exceed the atom budget")
    members: list[Pointed] = []
    seen = set()
    if n == 0:
        return SplitPartner(())
    product_inst, tuple_ids = _product_instance(atlas, n)
    for combo in itertools.product(*per_query_types):
        point = tuple_ids[combo]
        comp = point_component(product_inst, point)
        ren = {point: "a"}
        for k, ind in enumerate(sorted(comp.individuals - {point})):
            ren[ind] = f"u{k}"
        named = rename_instance(comp, ren)
        p = Pointed(named, "a")
        if p.key() not in seen:
            seen.add(p.key())
            members.append(p)
    return SplitPartner(tuple(members))


def _product_instance(atlas: TypeAtlas, n: int):
    ids = {}
    for combo in itertools.product(range(len(atlas.types)), repeat=n):
        ids[combo] = "p" + "_".join(str(c) for c in combo)
    catoms = []
    names_per_type = {
        i: atlas.type_instance.names_at(atlas.type_ids[i]) for i in range(len(atlas.types))
    }
    for combo, ind in ids.items():
        shared = None
        for c in combo:
            ns = names_per_type[c]
            shared = ns if shared is None else (shared & ns)
        for nm in shared or ():
            catoms.append((nm, ind))
    redges = {}
    for r, x, y in atlas.type_instance.ratoms:
        redges.setdefault(r, set()).add((x, y))
    ratoms = []
    index = {tid: i for i, tid in enumerate(atlas.type_ids)}
    for r, pairs in redges.items():
        pairset = {(index[x], index[y]) for x, y in pairs}
        for combo1, i1 in ids.items():
            for combo2, i2 in ids.items():
                if all((c1, c2) in pairset for c1, c2 in zip(combo1, combo2)):
                    ratoms.append((r, i1, i2))
    inst = Instance(frozenset(ids.values()), frozenset(catoms), frozenset(ratoms))
    return inst, ids


# --------------------------------------------------- singular+ constructions

def singular_plus_from_frontier(onto: Ontology, q: Eliq, front: Frontier) -> SingularPlus:
    r = reasoner(onto)
    return SingularPlus(
        r.hat(q), tuple(r.hat(m) for m in front.members), "frontier"
    )


def singular_plus_from_split(onto: Ontology, q: Eliq, split: SplitPartner) -> SingularPlus:
    r = reasoner(onto)
    return SingularPlus(r.hat(q), tuple(split.members), "split")


def negatives_for(
    onto: Ontology,
    q: Eliq,
    sig: Signature,
    policy: str = PREFER_FRONTIER,
    qclass: str = CLASS_ELIQ,
    size_bound: int = 6,
) -> SingularPlus:
    """Negative examples for a singular-positive characterisation of q:
    frontier-backed when a verified frontier exists, else split-backed."""
    def via_frontier():
        front = frontier(onto, q, qclass, size_bound)
        if front is None:
            return None
        return singular_plus_from_frontier(onto, q, front)

    def via_split():
        try:
            split = split_partner(onto, sig, [q])
        except (SplitSizeExceeded, UnsupportedDialect):
            return None
        return singular_plus_from_split(onto, q, split)

    order = (via_frontier, via_split) if policy == PREFER_FRONTIER else (via_split, via_frontier)
    for attempt in order:
        got = attempt()
        if got is not None:
            return got
    raise NoCharacterisationFound(f"no negatives found for {q!r}")
