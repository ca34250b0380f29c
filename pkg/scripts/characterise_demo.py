"""Build and verify example sets for a small tour of queries and ontologies.

Run from the repository root:  python3 scripts/characterise_demo.py
"""
import time

from tomq.dl import (
    ELHIF_NF,
    TOP_QUERY,
    atom,
    conjoin,
    empty_ontology,
    ontology,
    signature,
)
from tomq.dl.model import ConjLhs
from tomq.tempchar import MODE_DEPTH, MODE_SAFE, characterise_dia, characterise_until
from tomq.temporal.model import pathquery_from_ops, untilquery
from tomq.textio import print_exampleset, print_pathquery, print_untilquery
from tomq.verify import EnumSpec, check_unique_characterisation

A, B = atom("A"), atom("B")
SIG = signature(["A", "B"])
OE = empty_ontology(SIG)
ALGEBRA = ontology(
    [ConjLhs("A", "Top", "B"), ConjLhs("A", "Top", "C"), ConjLhs("B", "C", "A")],
    ELHIF_NF,
    signature(["A", "B", "C"]),
)


def show(title, onto, q, es, spec):
    print("=" * 60)
    print(title)
    print(print_exampleset(es))
    t0 = time.time()
    verdict = check_unique_characterisation(onto, q, es, spec)
    print(f"unique within bounds: {verdict.passed}  ({time.time() - t0:.1f}s)")
    if not verdict.passed:
        print("witnesses:", [str(w) for w in verdict.witnesses[:3]])


def main():
    dia = pathquery_from_ops([TOP_QUERY, A], ["F"])
    es = characterise_dia(OE, dia, SIG, mode=(MODE_SAFE,))
    show(
        f"later query {print_pathquery(dia)} wrt the empty ontology",
        OE,
        dia,
        es,
        EnumSpec(SIG, "dia", size_bound=2, depth_bound=3),
    )

    chain = pathquery_from_ops([A, B, A], ["X", "F"])
    es2 = characterise_dia(OE, chain, SIG, mode=(MODE_SAFE,))
    show(
        f"mixed query {print_pathquery(chain)} wrt the empty ontology",
        OE,
        chain,
        es2,
        EnumSpec(SIG, "dia", size_bound=2, depth_bound=3),
    )

    dia3 = pathquery_from_ops([TOP_QUERY, A], ["F"])
    es3 = characterise_dia(
        ALGEBRA, dia3, signature(["A", "B", "C"]), mode=(MODE_DEPTH, 1)
    )
    show(
        f"unsafe query {print_pathquery(dia3)} wrt the conjunction algebra, depth-1 class",
        ALGEBRA,
        dia3,
        es3,
        EnumSpec(signature(["A", "B", "C"]), "dia", size_bound=3, depth_bound=1),
    )

    until = untilquery(TOP_QUERY, [(B, A)])
    es4 = characterise_until(OE, until, SIG)
    show(
        f"until query {print_untilquery(until)} wrt the empty ontology",
        OE,
        until,
        es4,
        EnumSpec(SIG, "until", size_bound=2, depth_bound=2),
    )


if __name__ == "__main__":
    main()
