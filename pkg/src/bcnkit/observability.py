"""Observability and reconstructibility of control networks.

Observability is read uniformly over input sequences: the network is
observable when some finite window of inputs and outputs pins down the
initial state no matter which inputs were applied.  Its failure is
witnessed by a pair of states that some input sequence keeps
output-identical forever; those pairs are the greatest fixpoint computed
by `indistinguishable_pairs`.  Weak observability asks only that for
every pair some input sequence tells the two states apart, and
reconstructibility asks for the final state instead of the initial one.

All three properties reduce to fixpoints over unordered state pairs,
with `brute_force_distinguish` as the exhaustive cross-check.  The
reconstruction horizon is found by searching the uncertainty-set
automaton: the observer refines its state set by the current output
before stepping, because the output may depend on the current input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .network import Bcn

__all__ = [
    "Witness",
    "IndistinguishabilityResult",
    "WeakObservabilityResult",
    "ReconstructibilityVerdict",
    "indistinguishable_pairs",
    "is_weakly_observable",
    "is_reconstructible",
    "brute_force_distinguish",
]

Pair = tuple[int, int]


def _all_pairs(n: int) -> set[Pair]:
    return {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}


def _canon(i: int, j: int) -> Pair:
    return (i, j) if i <= j else (j, i)


def input_classes(b: Bcn) -> list[int]:
    """Representatives of input values with identical transition and output blocks.

    Inputs sharing both blocks act identically on every trajectory, so
    exhaustive searches only need one of each class.
    """
    seen: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
    for u in range(1, b.n_inputs + 1):
        key = (b.transitions[u - 1].col_index, b.outputs[u - 1].col_index)
        seen.setdefault(key, u)
    return sorted(seen.values())


@dataclass(frozen=True)
class Witness:
    """A replayable certificate that two states cannot be told apart.

    Feeding `inputs` to the network from either state of `pair` produces
    the same `outputs`; `constant_inputs` lists every input value whose
    constant repetition also works as a witness.
    """

    pair: Pair
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    constant_inputs: tuple[int, ...]


@dataclass(frozen=True)
class IndistinguishabilityResult:
    """Greatest set of state pairs some input sequence keeps output-equal forever."""

    pairs: frozenset[Pair]
    witness: Witness | None

    @property
    def observable(self) -> bool:
        return not self.pairs


def indistinguishable_pairs(b: Bcn) -> IndistinguishabilityResult:
    """Pairs of initial states that defeat observability.

    A pair {i, j} survives iff some input value keeps the instantaneous
    outputs equal and either merges the successors or sends them to a
    surviving pair; pruning from all pairs converges to the greatest such
    set.  The network is observable iff the set is empty.
    """
    pairs = _all_pairs(b.n_states)
    changed = True
    while changed:
        changed = False
        for p in sorted(pairs):
            if not _can_stay_equal(b, p, pairs):
                pairs.discard(p)
                changed = True
    result = frozenset(pairs)
    witness = _build_witness(b, min(result), result) if result else None
    return IndistinguishabilityResult(result, witness)


def _can_stay_equal(b: Bcn, p: Pair, pairs: set[Pair]) -> bool:
    i, j = p
    for u in range(1, b.n_inputs + 1):
        if b.output_index(i, u) != b.output_index(j, u):
            continue
        ni, nj = b.step_index(i, u), b.step_index(j, u)
        if ni == nj or _canon(ni, nj) in pairs:
            return True
    return False


def _constant_keeps_equal(b: Bcn, p: Pair, u: int) -> tuple[int, ...] | None:
    """Common output sequence of the constant-u run, or None if outputs split.

    The run is followed until the (unordered) state pair repeats, which
    certifies equal outputs forever by periodicity.
    """
    outs: list[int] = []
    cur = p
    seen: set[Pair] = set()
    while cur not in seen:
        seen.add(cur)
        i, j = cur
        if b.output_index(i, u) != b.output_index(j, u):
            return None
        outs.append(b.output_index(i, u))
        cur = _canon(b.step_index(i, u), b.step_index(j, u))
    return tuple(outs)


def _build_witness(b: Bcn, p: Pair, pairs: frozenset[Pair]) -> Witness:
    constant = []
    first: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for u in range(1, b.n_inputs + 1):
        outs = _constant_keeps_equal(b, p, u)
        if outs is not None:
            constant.append(u)
            if first is None:
                first = ((u,) * len(outs), outs)
    if first is not None:
        inputs, outputs = first
        return Witness(p, inputs, outputs, tuple(constant))
    # no single input works forever: walk the surviving-pair graph instead
    inputs: list[int] = []
    outputs: list[int] = []
    cur = p
    seen: set[Pair] = set()
    while cur not in seen:
        seen.add(cur)
        i, j = cur
        for u in range(1, b.n_inputs + 1):
            if b.output_index(i, u) != b.output_index(j, u):
                continue
            ni, nj = b.step_index(i, u), b.step_index(j, u)
            if ni == nj or _canon(ni, nj) in pairs:
                inputs.append(u)
                outputs.append(b.output_index(i, u))
                cur = _canon(ni, nj)
                break
        else:  # pragma: no cover - contradicts fixpoint membership
            raise AssertionError(f"pair {cur} has no surviving continuation")
    return Witness(p, tuple(inputs), tuple(outputs), tuple(constant))


@dataclass(frozen=True)
class WeakObservabilityResult:
    """Outcome of the pairwise distinguishability search up to a horizon cap.

    `weakly_observable` is None when the cap ran out before the fixpoint
    settled, in which case `undistinguished` holds the pairs still open.
    """

    weakly_observable: bool | None
    undistinguished: frozenset[Pair]
    horizon_cap: int


def is_weakly_observable(b: Bcn, t_max: int) -> WeakObservabilityResult:
    """Whether every pair of initial states is separable by some input choice.

    Least fixpoint over pairs: a pair is distinguishable if some input
    splits the outputs now, or keeps them equal while mapping to a
    distinct already-distinguishable pair.  Round r settles exactly the
    pairs needing input sequences of length r, so the cap bounds the
    witness length.
    """
    if t_max < 1:
        raise ValueError("horizon cap must be at least 1")
    n = b.n_states
    todo = _all_pairs(n)
    done: set[Pair] = set()
    rounds = 0
    while todo and rounds < t_max:
        rounds += 1
        newly = {p for p in todo if _distinguishable_step(b, p, done)}
        if not newly:
            return WeakObservabilityResult(False, frozenset(todo), t_max)
        done |= newly
        todo -= newly
    if not todo:
        return WeakObservabilityResult(True, frozenset(), t_max)
    # still shrinking when the cap ran out
    return WeakObservabilityResult(None, frozenset(todo), t_max)


def _distinguishable_step(b: Bcn, p: Pair, done: set[Pair]) -> bool:
    i, j = p
    for u in range(1, b.n_inputs + 1):
        if b.output_index(i, u) != b.output_index(j, u):
            return True
        ni, nj = b.step_index(i, u), b.step_index(j, u)
        if ni != nj and _canon(ni, nj) in done:
            return True
    return False


@dataclass(frozen=True)
class ReconstructibilityVerdict:
    """Verdict plus the least horizon at which the final state is pinned down.

    `reconstructible` is decided exactly by a pair fixpoint.  The horizon
    search over uncertainty sets is bounded by the cap and a node budget;
    when it gives out, `horizon` stays None and `horizon_capped` is set,
    which is distinct from the network not being reconstructible at all.
    """

    reconstructible: bool
    horizon: int | None
    certificate: str
    indistinct_pairs: frozenset[Pair]
    horizon_capped: bool = False


def is_reconstructible(
    b: Bcn, t_max: int, node_budget: int = 1 << 18
) -> ReconstructibilityVerdict:
    """Decide reconstructibility and search for the least horizon.

    The fixpoint keeps pairs that some input holds output-equal while
    their successors stay distinct; any surviving pair can evade final-
    state identification forever.  When none survives, a breadth-first
    search over output-refined uncertainty sets finds the least T at
    which every consistent observation of length T leaves a singleton.
    """
    if t_max < 1:
        raise ValueError("horizon cap must be at least 1")
    pairs = _all_pairs(b.n_states)
    changed = True
    while changed:
        changed = False
        for p in sorted(pairs):
            if not _can_stay_equal_distinct(b, p, pairs):
                pairs.discard(p)
                changed = True
    if pairs:
        return ReconstructibilityVerdict(
            reconstructible=False,
            horizon=None,
            certificate=(
                f"{len(pairs)} state pair(s) can remain output-equal with "
                "distinct successors indefinitely"
            ),
            indistinct_pairs=frozenset(pairs),
        )
    horizon, capped = _horizon_search(b, t_max, node_budget)
    if horizon is None:
        cert = f"uncertainty sets still not singletons at the cap T={t_max}"
    else:
        cert = (
            "every input/output sequence of length "
            f"{horizon} leaves a single consistent final state"
        )
    return ReconstructibilityVerdict(
        reconstructible=True,
        horizon=horizon,
        certificate=cert,
        indistinct_pairs=frozenset(),
        horizon_capped=capped,
    )


def _can_stay_equal_distinct(b: Bcn, p: Pair, pairs: set[Pair]) -> bool:
    i, j = p
    for u in range(1, b.n_inputs + 1):
        if b.output_index(i, u) != b.output_index(j, u):
            continue
        ni, nj = b.step_index(i, u), b.step_index(j, u)
        if ni != nj and _canon(ni, nj) in pairs:
            return True
    return False


def _horizon_search(
    b: Bcn, t_max: int, node_budget: int
) -> tuple[int | None, bool]:
    """Least T at which all output-refined uncertainty sets are singletons.

    Level T holds the possible state sets before the observation at time
    T.  For each input the set splits by output; if every fragment of
    every level-T set is a singleton, T observations always pin the
    state.  Singleton sets are dropped since their futures stay pinned.
    """
    reps = input_classes(b)
    full = frozenset(range(1, b.n_states + 1))
    level: set[frozenset[int]] = {full} if len(full) > 1 else set()
    visited_budget = node_budget
    for t in range(t_max + 1):
        if not level:
            return t, False
        pinned = True
        nxt: set[frozenset[int]] = set()
        for uset in level:
            for u in reps:
                by_output: dict[int, set[int]] = {}
                for s in uset:
                    by_output.setdefault(b.output_index(s, u), set()).add(s)
                for fragment in by_output.values():
                    if len(fragment) > 1:
                        pinned = False
                    child = frozenset(b.step_index(s, u) for s in fragment)
                    if len(child) > 1:
                        nxt.add(child)
        if pinned:
            return t, False
        visited_budget -= len(nxt)
        if visited_budget < 0:
            return None, True
        level = nxt
    return None, True


def brute_force_distinguish(
    b: Bcn, i: int, j: int, t_max: int
) -> tuple[int, ...] | None:
    """Shortest-first exhaustive search for a sequence separating i from j.

    Returns an input sequence whose two output sequences differ at some
    step, or None when none of length up to t_max exists.  Enumeration
    runs over one representative per input class, which loses nothing
    because equal blocks act equally.
    """
    if i == j:
        raise ValueError("states must be distinct")
    reps = input_classes(b)
    for length in range(1, t_max + 1):
        for seq in itertools.product(reps, repeat=length):
            si, sj = i, j
            for t, u in enumerate(seq):
                if b.output_index(si, u) != b.output_index(sj, u):
                    return seq[: t + 1]
                si, sj = b.step_index(si, u), b.step_index(sj, u)
    return None
