"""Seeded random generators for ontologies, instances and queries."""
from __future__ import annotations

import random

from tomq.dl import (
    BOT,
    DL_LITE_F,
    DL_LITE_F_MINUS,
    DL_LITE_H,
    ELHIF_NF,
    TOP,
    ConjLhs,
    Disjoint,
    Eliq,
    ExistsLhs,
    ExistsRhs,
    Func,
    Instance,
    Ontology,
    Role,
    RoleSub,
    Signature,
    SubBasic,
    atom,
    conjoin,
    exists,
    exists_basic,
    instance,
    make_eliq,
    name_basic,
    ontology,
    signature,
    top_basic,
)
from tomq.errors import UnsupportedAxiom


def rand_role(rng: random.Random, sig: Signature) -> Role:
    return Role(rng.choice(sorted(sig.role_names)), rng.random() < 0.4)


def rand_basic(rng: random.Random, sig: Signature):
    if sig.role_names and rng.random() < 0.4:
        return exists_basic(rand_role(rng, sig))
    if rng.random() < 0.1:
        return top_basic()
    return name_basic(rng.choice(sorted(sig.concept_names)))


def rand_name(rng: random.Random, sig: Signature, top_ok=True) -> str:
    names = sorted(sig.concept_names)
    if top_ok and rng.random() < 0.15:
        return TOP
    return rng.choice(names)


def rand_ontology(
    rng: random.Random, sig: Signature, dialect: str, max_axioms: int = 6
) -> Ontology:
    axioms = []
    n = rng.randint(0, max_axioms)
    for _ in range(n):
        if dialect == ELHIF_NF:
            kind = rng.choice(["exrhs", "exlhs", "conj", "conj", "func", "rsub"])
            if kind == "exrhs" and sig.role_names:
                axioms.append(
                    ExistsRhs(rand_name(rng, sig), rand_role(rng, sig), rand_name(rng, sig))
                )
            elif kind == "exlhs" and sig.role_names:
                axioms.append(
                    ExistsLhs(rand_role(rng, sig), rand_name(rng, sig), rand_name(rng, sig, top_ok=False))
                )
            elif kind == "conj":
                rhs = rand_name(rng, sig, top_ok=False)
                if rng.random() < 0.15:
                    rhs = BOT
                axioms.append(ConjLhs(rand_name(rng, sig), rand_name(rng, sig), rhs))
            elif kind == "func" and sig.role_names:
                axioms.append(Func(rand_role(rng, sig)))
            elif kind == "rsub" and sig.role_names:
                axioms.append(RoleSub(rand_role(rng, sig), rand_role(rng, sig)))
        else:
            kind = rng.choice(["sub", "sub", "sub", "disj", "extra"])
            if kind == "sub":
                axioms.append(SubBasic(rand_basic(rng, sig), rand_basic(rng, sig)))
            elif kind == "disj":
                axioms.append(Disjoint(rand_basic(rng, sig), rand_basic(rng, sig)))
            elif dialect == DL_LITE_H and sig.role_names:
                axioms.append(RoleSub(rand_role(rng, sig), rand_role(rng, sig)))
            elif dialect in (DL_LITE_F, DL_LITE_F_MINUS) and sig.role_names:
                axioms.append(Func(rand_role(rng, sig)))
    try:
        return Ontology(sig, frozenset(axioms), dialect)
    except UnsupportedAxiom:
        return rand_ontology(rng, sig, dialect, max_axioms)


def rand_instance(rng: random.Random, sig: Signature, max_inds=4, max_atoms=7) -> Instance:
    inds = [f"i{k}" for k in range(rng.randint(1, max_inds))]
    cat, rat = [], []
    for _ in range(rng.randint(0, max_atoms)):
        if sig.role_names and rng.random() < 0.45 and len(inds) > 1:
            rat.append(
                (rng.choice(sorted(sig.role_names)), rng.choice(inds), rng.choice(inds))
            )
        else:
            cat.append((rng.choice(sorted(sig.concept_names)), rng.choice(inds)))
    return instance(inds, cat, rat)


def rand_eliq(rng: random.Random, sig: Signature, max_size=5) -> Eliq:
    budget = rng.randint(1, max_size)

    def build(budget: int) -> Eliq:
        names = []
        edges = []
        while budget > 0:
            if sig.role_names and rng.random() < 0.4 and budget >= 2:
                sub_budget = rng.randint(1, budget - 1)
                budget -= sub_budget + 1
                edges.append((rand_role(rng, sig), build(sub_budget - 1)))
            elif rng.random() < 0.8:
                names.append(rng.choice(sorted(sig.concept_names)))
                budget -= 1
            else:
                break
        return make_eliq(names, edges)

    return build(budget)


SMALL_SIG = signature(["A", "B"], ["R"])
PROP_SIG = signature(["A", "B"])
