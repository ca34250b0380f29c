"""Signatures, roles, axioms, ontologies and data instances.

Everything here is immutable and hashable so that reasoning results can be
cached per ontology / instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import UnsupportedAxiom

TOP = "Top"
BOT = "bot"

DL_LITE_H = "dl-lite-h"
DL_LITE_F = "dl-lite-f"
DL_LITE_F_MINUS = "dl-lite-f-minus"
ELHIF_NF = "elhif-nf"

DIALECTS = (DL_LITE_H, DL_LITE_F, DL_LITE_F_MINUS, ELHIF_NF)


@dataclass(frozen=True, order=True)
class Role:
    """A role name or its inverse."""

    name: str
    inverted: bool = False

    @property
    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __str__(self) -> str:
        return self.name + ("-" if self.inverted else "")


@dataclass(frozen=True, order=True)
class Basic:
    """Basic concept: Top, a concept name, or an unqualified existential."""

    kind: str  # "top" | "name" | "exists"
    name: str = ""
    role: Optional[Role] = None

    def __str__(self) -> str:
        if self.kind == "top":
            return TOP
        if self.kind == "name":
            return self.name
        return f"ex {self.role}"


def top_basic() -> Basic:
    return Basic("top")


def name_basic(name: str) -> Basic:
    return Basic("name", name)


def exists_basic(role: Role) -> Basic:
    return Basic("exists", "", role)


@dataclass(frozen=True, order=True)
class SubBasic:
    lhs: Basic
    rhs: Basic


@dataclass(frozen=True, order=True)
class Disjoint:
    lhs: Basic
    rhs: Basic


@dataclass(frozen=True, order=True)
class Func:
    role: Role


@dataclass(frozen=True, order=True)
class RoleSub:
    sub: Role
    sup: Role


@dataclass(frozen=True, order=True)
class ExistsRhs:
    """A [= ex R . A'   (A, A' concept names or Top)"""

    lhs: str
    role: Role
    filler: str


@dataclass(frozen=True, order=True)
class ExistsLhs:
    """ex R . A [= A'"""

    role: Role
    filler: str
    rhs: str


@dataclass(frozen=True, order=True)
class ConjLhs:
    """A & A' [= B   (B a concept name or bot)"""

    lhs1: str
    lhs2: str
    rhs: str


Axiom = object  # union of the dataclasses above


@dataclass(frozen=True)
class Signature:
    concept_names: frozenset[str]
    role_names: frozenset[str]

    def __post_init__(self):
        if not (self.concept_names or self.role_names):
            raise ValueError("signature must be non-empty")
        overlap = self.concept_names & self.role_names
        if overlap:
            raise ValueError(f"identifiers used as both concept and role: {sorted(overlap)}")
        for reserved in (TOP, BOT):
            if reserved in self.concept_names or reserved in self.role_names:
                raise ValueError(f"{reserved!r} is reserved")


def signature(concepts: Iterable[str], roles: Iterable[str] = ()) -> Signature:
    return Signature(frozenset(concepts), frozenset(roles))


_DIALECT_SHAPES = {
    DL_LITE_H: (SubBasic, Disjoint, RoleSub),
    DL_LITE_F: (SubBasic, Disjoint, Func),
    DL_LITE_F_MINUS: (SubBasic, Disjoint, Func),
    ELHIF_NF: (ExistsRhs, ExistsLhs, ConjLhs, Func, RoleSub),
}


@dataclass(frozen=True)
class Ontology:
    signature: Signature
    axioms: frozenset
    dialect: str

    def __post_init__(self):
        validate_ontology(self)

    @property
    def functional_roles(self) -> frozenset[Role]:
        return frozenset(ax.role for ax in self.axioms if isinstance(ax, Func))

    def axioms_of(self, kind) -> list:
        return sorted((ax for ax in self.axioms if isinstance(ax, kind)), key=str)


def _check_name(sig: Signature, name: str, allow_top=False, allow_bot=False):
    if name == TOP:
        if not allow_top:
            raise UnsupportedAxiom("Top not allowed in this position")
        return
    if name == BOT:
        if not allow_bot:
            raise UnsupportedAxiom("bot not allowed in this position")
        return
    if name not in sig.concept_names:
        raise UnsupportedAxiom(f"unknown concept name {name!r}")


def _check_role(sig: Signature, role: Role):
    if role.name not in sig.role_names:
        raise UnsupportedAxiom(f"unknown role name {role.name!r}")


def _check_basic(sig: Signature, b: Basic, allow_top=True):
    if b.kind == "top":
        if not allow_top:
            raise UnsupportedAxiom("Top not allowed here")
    elif b.kind == "name":
        _check_name(sig, b.name)
    else:
        _check_role(sig, b.role)


def validate_ontology(onto: Ontology) -> None:
    """Reject axiom shapes outside the dialect and names outside the signature."""
    if onto.dialect not in DIALECTS:
        raise UnsupportedAxiom(f"unknown dialect {onto.dialect!r}")
    shapes = _DIALECT_SHAPES[onto.dialect]
    sig = onto.signature
    for ax in onto.axioms:
        if not isinstance(ax, shapes):
            raise UnsupportedAxiom(f"{type(ax).__name__} not allowed in dialect {onto.dialect}")
        if isinstance(ax, SubBasic):
            _check_basic(sig, ax.lhs)
            _check_basic(sig, ax.rhs)
        elif isinstance(ax, Disjoint):
            _check_basic(sig, ax.lhs)
            _check_basic(sig, ax.rhs)
        elif isinstance(ax, Func):
            _check_role(sig, ax.role)
        elif isinstance(ax, RoleSub):
            _check_role(sig, ax.sub)
            _check_role(sig, ax.sup)
        elif isinstance(ax, ExistsRhs):
            _check_name(sig, ax.lhs, allow_top=True)
            _check_role(sig, ax.role)
            _check_name(sig, ax.filler, allow_top=True)
        elif isinstance(ax, ExistsLhs):
            _check_role(sig, ax.role)
            _check_name(sig, ax.filler, allow_top=True)
            _check_name(sig, ax.rhs, allow_top=True)
        elif isinstance(ax, ConjLhs):
            _check_name(sig, ax.lhs1, allow_top=True)
            _check_name(sig, ax.lhs2, allow_top=True)
            _check_name(sig, ax.rhs, allow_top=True, allow_bot=True)
    if onto.dialect == DL_LITE_F_MINUS:
        func = {ax.role for ax in onto.axioms if isinstance(ax, Func)}
        for ax in onto.axioms:
            if isinstance(ax, SubBasic) and ax.rhs.kind == "exists" and ax.rhs.role.inverse in func:
                raise UnsupportedAxiom(
                    f"{DL_LITE_F_MINUS} forbids B [= ex {ax.rhs.role} with func {ax.rhs.role.inverse}"
                )


def ontology(axioms: Iterable, dialect: str, sig: Signature | None = None) -> Ontology:
    axioms = frozenset(axioms)
    if sig is None:
        concepts, roles = set(), set()
        for ax in axioms:
            for part in _axiom_names(ax):
                concepts.add(part)
            for role in _axiom_roles(ax):
                roles.add(role.name)
        if not (concepts or roles):
            concepts = {"A"}
        sig = Signature(frozenset(concepts), frozenset(roles))
    return Ontology(sig, axioms, dialect)


def _axiom_names(ax):
    if isinstance(ax, (SubBasic, Disjoint)):
        for b in (ax.lhs, ax.rhs):
            if b.kind == "name":
                yield b.name
    elif isinstance(ax, ExistsRhs):
        yield from (n for n in (ax.lhs, ax.filler) if n not in (TOP, BOT))
    elif isinstance(ax, ExistsLhs):
        yield from (n for n in (ax.filler, ax.rhs) if n not in (TOP, BOT))
    elif isinstance(ax, ConjLhs):
        yield from (n for n in (ax.lhs1, ax.lhs2, ax.rhs) if n not in (TOP, BOT))


def _axiom_roles(ax):
    if isinstance(ax, (SubBasic, Disjoint)):
        for b in (ax.lhs, ax.rhs):
            if b.kind == "exists":
                yield b.role
    elif isinstance(ax, Func):
        yield ax.role
    elif isinstance(ax, RoleSub):
        yield ax.sub
        yield ax.sup
    elif isinstance(ax, (ExistsRhs, ExistsLhs)):
        yield ax.role


EMPTY_ONTOLOGY_CACHE: dict[Signature, Ontology] = {}


def empty_ontology(sig: Signature) -> Ontology:
    if sig not in EMPTY_ONTOLOGY_CACHE:
        EMPTY_ONTOLOGY_CACHE[sig] = Ontology(sig, frozenset(), DL_LITE_H)
    return EMPTY_ONTOLOGY_CACHE[sig]


@dataclass(frozen=True)
class Instance:
    """A data instance: unary and binary atoms over a finite individual set.

    Inverse role atoms are normalised away: P-(a,b) is stored as (P,b,a).
    Top(a) holds implicitly for every individual.
    """

    individuals: frozenset[str]
    catoms: frozenset[tuple[str, str]] = frozenset()         # (concept, individual)
    ratoms: frozenset[tuple[str, str, str]] = frozenset()    # (role name, from, to)

    def __post_init__(self):
        for _, a in self.catoms:
            if a not in self.individuals:
                raise ValueError(f"individual {a!r} not declared")
        for _, a, b in self.ratoms:
            if a not in self.individuals or b not in self.individuals:
                raise ValueError("role atom over undeclared individual")

    @property
    def size(self) -> int:
        bare = sum(1 for a in self.individuals if not self._touched(a))
        return len(self.catoms) + len(self.ratoms) + bare

    def _touched(self, a: str) -> bool:
        return any(x == a for _, x in self.catoms) or any(
            a in (x, y) for _, x, y in self.ratoms
        )

    def names_at(self, a: str) -> frozenset[str]:
        return frozenset(c for c, x in self.catoms if x == a)

    def successors(self, a: str, role: Role) -> frozenset[str]:
        if role.inverted:
            return frozenset(x for r, x, y in self.ratoms if r == role.name and y == a)
        return frozenset(y for r, x, y in self.ratoms if r == role.name and x == a)

    def role_pairs(self, role: Role):
        for r, x, y in self.ratoms:
            if r == role.name:
                yield (y, x) if role.inverted else (x, y)

    def with_individuals(self, more: Iterable[str]) -> "Instance":
        inds = self.individuals | frozenset(more)
        if inds == self.individuals:
            return self
        return Instance(inds, self.catoms, self.ratoms)

    def is_trivial(self) -> bool:
        return not self.catoms and not self.ratoms

    @property
    def _key(self) -> tuple:
        cached = self.__dict__.get("_key_cache")
        if cached is None:
            cached = (
                tuple(sorted(self.individuals)),
                tuple(sorted(self.catoms)),
                tuple(sorted(self.ratoms)),
            )
            object.__setattr__(self, "_key_cache", cached)
        return cached

    def key(self) -> tuple:
        return self._key


def instance(individuals: Iterable[str], catoms=(), ratoms=()) -> Instance:
    """Build an instance, normalising inverse role atoms given as (Role, a, b)."""
    cat, rat = set(), set()
    inds = set(individuals)
    for c, a in catoms:
        if c == TOP:
            inds.add(a)
            continue
        cat.add((c, a))
        inds.add(a)
    for r, a, b in ratoms:
        if isinstance(r, Role):
            if r.inverted:
                a, b = b, a
            r = r.name
        rat.add((r, a, b))
        inds.update((a, b))
    return Instance(frozenset(inds), frozenset(cat), frozenset(rat))


def empty_instance(individuals: Iterable[str] = ("a",)) -> Instance:
    return Instance(frozenset(individuals))


@dataclass(frozen=True)
class Pointed:
    instance: Instance
    point: str

    def __post_init__(self):
        if self.point not in self.instance.individuals:
            raise ValueError(f"point {self.point!r} not in the instance")

    def key(self):
        return (self.instance.key(), self.point)


def merge_instances(parts: Iterable[Instance]) -> Instance:
    inds, cat, rat = set(), set(), set()
    for p in parts:
        inds |= p.individuals
        cat |= p.catoms
        rat |= p.ratoms
    return Instance(frozenset(inds), frozenset(cat), frozenset(rat))


def rename_instance(inst: Instance, mapping: dict[str, str]) -> Instance:
    f = lambda x: mapping.get(x, x)
    return Instance(
        frozenset(f(a) for a in inst.individuals),
        frozenset((c, f(a)) for c, a in inst.catoms),
        frozenset((r, f(a), f(b)) for r, a, b in inst.ratoms),
    )
