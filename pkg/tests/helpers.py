"""Shared test oracles, independent of the package's index-chasing paths.

The dense helpers realize matrices as plain 0/1 numpy arrays and define
the semi-tensor product directly through its Kronecker-expansion
formula.  The search oracles replay sequences exhaustively; they only
lean on the fact that input values with identical transition and output
blocks act identically, which makes the enumeration spaces tractable.
"""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from bcnkit.network import Bcn
from bcnkit.observability import input_classes
from bcnkit.stp import CanonicalVector, LogicalMatrix


def dense(m: LogicalMatrix) -> np.ndarray:
    out = np.zeros((m.rows, m.cols), dtype=np.int64)
    for j, i in enumerate(m.col_index):
        out[i - 1, j] = 1
    return out


def from_dense(arr: np.ndarray) -> LogicalMatrix:
    cols = []
    for j in range(arr.shape[1]):
        (nz,) = np.nonzero(arr[:, j])
        assert len(nz) == 1 and arr[nz[0], j] == 1, "not a logical matrix"
        cols.append(int(nz[0]) + 1)
    return LogicalMatrix(arr.shape[0], tuple(cols))


def dense_stp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    t = math.lcm(a.shape[1], b.shape[0])
    left = np.kron(a, np.eye(t // a.shape[1], dtype=np.int64))
    right = np.kron(b, np.eye(t // b.shape[0], dtype=np.int64))
    return left @ right


def random_logical(rng: random.Random, rows: int, cols: int) -> LogicalMatrix:
    return LogicalMatrix(rows, tuple(rng.randint(1, rows) for _ in range(cols)))


def random_bcn(rng: random.Random, n: int, m: int, p: int) -> Bcn:
    return Bcn(
        n_states=n,
        n_inputs=m,
        n_outputs=p,
        transitions=tuple(random_logical(rng, n, n) for _ in range(m)),
        outputs=tuple(random_logical(rng, p, n) for _ in range(m)),
    )


def replay_outputs(b: Bcn, x0: int, inputs) -> tuple[int, ...]:
    return b.simulate(CanonicalVector(x0, b.n_states), tuple(inputs)).outputs


def equal_output_path_exists(b: Bcn, i: int, j: int, length: int) -> bool:
    """Whether some input sequence keeps the two output tracks equal for
    `length` steps, by backward dynamic programming over state pairs."""
    nodes = {
        (x, y) for x in range(1, b.n_states + 1) for y in range(x, b.n_states + 1)
    }
    # after k rounds: nodes admitting k equal-output steps in a row
    alive = set(nodes)
    for _ in range(length):
        alive = {
            (x, y)
            for (x, y) in nodes
            if any(
                b.output_index(x, u) == b.output_index(y, u)
                and _canon(b.step_index(x, u), b.step_index(y, u)) in alive
                for u in range(1, b.n_inputs + 1)
            )
        }
    return _canon(i, j) in alive


def _canon(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x <= y else (y, x)


def enumerate_equal_output_seq(b: Bcn, i: int, j: int, length: int) -> bool:
    """Direct enumeration variant of equal_output_path_exists (tiny models)."""
    reps = input_classes(b)
    for seq in itertools.product(reps, repeat=length):
        if replay_outputs(b, i, seq) == replay_outputs(b, j, seq):
            return True
    return False


def reconstruction_horizon_oracle(b: Bcn, cap: int) -> int | None:
    """Least uniform horizon by partition-refinement over output histories.

    Initial states sharing an output history form one part; observing at
    depth d refines parts by the current output, and a branch is settled
    once every part holds a single state value.  The answer is the worst
    settling depth over all branches, None when some branch exceeds cap.
    Enumeration over input classes, no sharing between branches.
    """
    reps = input_classes(b)
    sentinel = cap + 1

    def explore(parts: tuple[frozenset[int], ...], depth: int) -> int:
        worst = 0
        for u in reps:
            fragments: list[frozenset[int]] = []
            settled = True
            for part in parts:
                by_out: dict[int, set[int]] = {}
                for s in part:
                    by_out.setdefault(b.output_index(s, u), set()).add(s)
                for frag in by_out.values():
                    if len(frag) > 1:
                        settled = False
                        fragments.append(frozenset(frag))
            if settled:
                worst = max(worst, depth)
                continue
            if depth == cap:
                return sentinel
            stepped = tuple(
                child
                for child in (
                    frozenset(b.step_index(s, u) for s in frag) for frag in fragments
                )
                if len(child) > 1
            )
            sub = explore(stepped, depth + 1)
            if sub >= sentinel:
                return sentinel
            worst = max(worst, sub)
        return worst

    full = frozenset(range(1, b.n_states + 1))
    if len(full) == 1:
        return 0
    result = explore((full,), 0)
    return None if result >= sentinel else result
