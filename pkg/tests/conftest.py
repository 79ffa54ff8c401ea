"""Shared fixtures and independent test oracles.

The oracles here deliberately re-derive results by the dumbest possible
means (full enumeration, literal triple loops) so they stay independent of
the production code paths they are used to check.
"""

import itertools

import numpy as np
import pytest

from qubolin import QuboMatrix


@pytest.fixture
def example_q() -> QuboMatrix:
    """Three-variable worked example used across the suite.

    Diagonal (-3, -5, -8), couplings 2, 7, 7; it has two single-flip local
    minima and admits exactly the precedence edges (0, 1) and (0, 2).
    """
    return QuboMatrix.from_entries(
        3, [(0, 0, -3), (0, 1, 2), (0, 2, 7), (1, 1, -5), (1, 2, 7), (2, 2, -8)]
    )


@pytest.fixture
def example_q_linearized() -> QuboMatrix:
    """The example above after rewriting both admitted edges."""
    return QuboMatrix.from_entries(3, [(0, 0, 6), (1, 1, -5), (1, 2, 7), (2, 2, -8)])


def exhaustive_energy(q: QuboMatrix, bits) -> float:
    """Term-by-term energy evaluation, no numpy."""
    return float(sum(v * bits[i] * bits[j] for (i, j), v in q.terms.items()))


def exhaustive_minimum(q: QuboMatrix):
    """(min energy, list of argmins) by plain enumeration; small n only."""
    best = None
    argmins = []
    for bits in itertools.product((0, 1), repeat=q.n):
        e = exhaustive_energy(q, bits)
        if best is None or e < best:
            best, argmins = e, [bits]
        elif e == best:
            argmins.append(bits)
    return best, argmins


def reference_extraction(q: QuboMatrix, prune: bool = True):
    """Literal scalar transcription of the row-major extraction scan.

    This single-threaded triple loop defines the ground-truth edge set the
    vectorized implementation must reproduce.
    """
    n = q.n
    a = q.dense_symmetric()
    diag = a.diagonal().copy()
    edges: set[tuple[int, int]] = set()
    ordered: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(n):
            if j == i or (j, i) in edges or diag[j] > diag[i]:
                continue
            s = diag[j] - diag[i]
            admit = True
            for k in range(n):
                if k == i or k == j:
                    continue
                d = a[j, k] - a[i, k]
                if d > 0:
                    s += d
                    if prune and s > 0:
                        admit = False
                        break
            if admit and s <= 0:
                edges.add((i, j))
                ordered.append((i, j))
    return tuple(ordered)


def random_integer_qubo(rng: np.random.Generator, n: int, density: float = 0.5,
                        low: int = -10, high: int = 10) -> QuboMatrix:
    """Random sparse integer matrix in canonical form."""
    entries = []
    for i in range(n):
        for j in range(i, n):
            if rng.random() < density:
                v = int(rng.integers(low, high + 1))
                if v:
                    entries.append((i, j, v))
    return QuboMatrix.from_entries(n, entries)


def qubo_with_symmetric_block(rng: np.random.Generator, n: int, block: list[int]) -> QuboMatrix:
    """Random matrix where the given variables are mutually interchangeable.

    All block members share one diagonal value, one intra-block coupling and
    identical couplings to every outside variable, so permuting them leaves
    the objective unchanged.
    """
    base = random_integer_qubo(rng, n, density=0.4)
    terms = dict(base.terms)
    members = sorted(block)
    diag_value = int(rng.integers(-6, 0))
    intra = int(rng.integers(-4, 5))
    outside_row = {k: int(rng.integers(-4, 5)) for k in range(n) if k not in members}
    for g in members:
        terms.pop((g, g), None)
        if diag_value:
            terms[(g, g)] = float(diag_value)
        for k, v in outside_row.items():
            key = (min(g, k), max(g, k))
            terms.pop(key, None)
            if v:
                terms[key] = float(v)
    for a, b in itertools.combinations(members, 2):
        terms.pop((a, b), None)
        if intra:
            terms[(a, b)] = float(intra)
    return QuboMatrix(n, terms)
