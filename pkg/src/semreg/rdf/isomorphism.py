"""Blank-node-aware graph isomorphism.

Two graphs are isomorphic when some bijection over their blank nodes maps one
triple set onto the other; ground triples must match exactly. Candidate
mappings are pruned by a signature built from each blank node's ground
neighborhood, then completed by backtracking — graphs here are small
(descriptor-sized), so this stays cheap.
"""

from __future__ import annotations

from collections import Counter

from .graph import Graph
from .terms import BlankNode, Term, Triple


def _is_ground(t: Triple) -> bool:
    return not isinstance(t.subject, BlankNode) and not isinstance(t.object, BlankNode)


def _marker(term: Term) -> object:
    return ("?blank",) if isinstance(term, BlankNode) else term


def _signature(node: BlankNode, triples: list[Triple]) -> tuple:
    """Position/predicate/ground-neighbor profile, invariant under relabeling."""
    sig: Counter = Counter()
    for t in triples:
        if t.subject == node:
            sig[("s", t.predicate, _marker(t.object))] += 1
        if t.object == node:
            sig[("o", t.predicate, _marker(t.subject))] += 1
    return tuple(sorted(sig.items(), key=repr))


def isomorphic(a: Graph, b: Graph) -> bool:
    """True iff a bijection over blank nodes maps a's triples onto b's."""
    a_triples = list(a)
    b_triples = list(b)
    if len(a_triples) != len(b_triples):
        return False

    a_ground = {t for t in a_triples if _is_ground(t)}
    b_ground = {t for t in b_triples if _is_ground(t)}
    if a_ground != b_ground:
        return False

    a_open = [t for t in a_triples if not _is_ground(t)]
    b_open = [t for t in b_triples if not _is_ground(t)]
    if len(a_open) != len(b_open):
        return False
    if not a_open:
        return True

    a_blanks = sorted({n for t in a_open for n in (t.subject, t.object) if isinstance(n, BlankNode)})
    b_blanks = sorted({n for t in b_open for n in (t.subject, t.object) if isinstance(n, BlankNode)})
    if len(a_blanks) != len(b_blanks):
        return False

    a_sigs = {n: _signature(n, a_open) for n in a_blanks}
    b_sigs = {n: _signature(n, b_open) for n in b_blanks}
    if sorted(a_sigs.values(), key=repr) != sorted(b_sigs.values(), key=repr):
        return False

    candidates = {n: [m for m in b_blanks if b_sigs[m] == a_sigs[n]] for n in a_blanks}
    b_open_set = set(b_open)
    # most-constrained node first keeps the search shallow
    order = sorted(a_blanks, key=lambda n: len(candidates[n]))

    def substitute(t: Triple, mapping: dict[BlankNode, BlankNode]) -> Triple:
        s = mapping.get(t.subject, t.subject) if isinstance(t.subject, BlankNode) else t.subject
        o = mapping.get(t.object, t.object) if isinstance(t.object, BlankNode) else t.object
        return Triple(s, t.predicate, o)

    def consistent(mapping: dict[BlankNode, BlankNode]) -> bool:
        # every a-triple whose blanks are all mapped must exist in b
        for t in a_open:
            terms = [n for n in (t.subject, t.object) if isinstance(n, BlankNode)]
            if all(n in mapping for n in terms):
                if substitute(t, mapping) not in b_open_set:
                    return False
        return True

    def backtrack(index: int, mapping: dict[BlankNode, BlankNode], used: set[BlankNode]) -> bool:
        if index == len(order):
            return True
        node = order[index]
        for target in candidates[node]:
            if target in used:
                continue
            mapping[node] = target
            used.add(target)
            if consistent(mapping) and backtrack(index + 1, mapping, used):
                return True
            del mapping[node]
            used.discard(target)
        return False

    return backtrack(0, {}, set())
