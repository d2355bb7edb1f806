"""Equilibria, attractors and constant-input behaviour of control networks.

Under a constant input value k a network degenerates to the functional
graph of its k-th transition block.  Equilibria are the diagonal fixed
points of that block; an equilibrium is globally attractive exactly when
all columns of the block's N-th power coincide with it.  The attractor
decomposition splits the functional graph into its cycles and basins in
linear time, which is what rules out limit cycles (and with them
oscillating outputs) once every attractor turns out to be a fixed point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .network import Bcn, Cascade
from .stp import mat_pow

__all__ = [
    "AttractorReport",
    "EquilibriumRow",
    "EquilibriumTable",
    "TableGroup",
    "equilibria",
    "is_globally_attractive",
    "attractivity_horizon",
    "attractors",
    "equilibrium_table",
]


def _check_input(b: Bcn, k: int) -> None:
    if not 1 <= k <= b.n_inputs:
        raise ValueError(f"input value {k} out of range [1, {b.n_inputs}]")


def equilibria(b: Bcn, k: int) -> list[int]:
    """States fixed by the transition block of constant input k."""
    _check_input(b, k)
    blk = b.transitions[k - 1]
    return [i for i, target in enumerate(blk.col_index, start=1) if target == i]


def is_globally_attractive(b: Bcn, k: int, e: int) -> bool:
    """Whether equilibrium e attracts every state under constant input k.

    Implemented as the power test: all columns of L_k**N must equal e.
    Raises if e is not an equilibrium for k in the first place.
    """
    _check_input(b, k)
    if e not in equilibria(b, k):
        raise ValueError(f"state {e} is not an equilibrium for input {k}")
    power = mat_pow(b.transitions[k - 1], b.n_states)
    return all(i == e for i in power.col_index)


def attractivity_horizon(b: Bcn, k: int, e: int) -> int | None:
    """Least T with all columns of L_k**T equal to e, or None if not attractive.

    The horizon is the worst-case number of steps until every initial
    state has settled on e; it never exceeds N when it exists.
    """
    _check_input(b, k)
    if e not in equilibria(b, k):
        raise ValueError(f"state {e} is not an equilibrium for input {k}")
    blk = b.transitions[k - 1]
    cur = tuple(range(1, b.n_states + 1))
    for t in range(b.n_states + 1):
        if all(i == e for i in cur):
            return t
        cur = tuple(blk.col_index[i - 1] for i in cur)
    return None


@dataclass(frozen=True)
class AttractorReport:
    """Cycle decomposition of one transition block's functional graph.

    Cycles are listed in traversal order starting from their smallest
    state; basin sizes count every state that eventually enters the
    cycle, cycle states included, so they sum to N.  A cycle of length
    one is an equilibrium; it is globally attractive when its basin is
    the whole state set.
    """

    input_index: int
    cycles: tuple[tuple[int, ...], ...]
    basin_sizes: tuple[int, ...]

    @property
    def equilibria(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.cycles if len(c) == 1)

    @property
    def globally_attractive(self) -> tuple[bool, ...]:
        total = sum(self.basin_sizes)
        return tuple(
            len(c) == 1 and size == total
            for c, size in zip(self.cycles, self.basin_sizes)
        )

    @property
    def has_limit_cycle(self) -> bool:
        return any(len(c) > 1 for c in self.cycles)


def attractors(b: Bcn, k: int) -> AttractorReport:
    """Decompose the functional graph of input k into cycles and basins."""
    _check_input(b, k)
    succ = b.transitions[k - 1].col_index
    n = b.n_states
    # cycle_of[i] = cycle id once known; 0 = unvisited
    cycle_of = [0] * (n + 1)
    cycles: list[tuple[int, ...]] = []
    for start in range(1, n + 1):
        if cycle_of[start]:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        cur = start
        while cycle_of[cur] == 0 and cur not in pos:
            pos[cur] = len(path)
            path.append(cur)
            cur = succ[cur - 1]
        if cycle_of[cur] == 0:
            # new cycle discovered inside the current walk
            cyc = path[pos[cur] :]
            lo = cyc.index(min(cyc))
            cycles.append(tuple(cyc[lo:] + cyc[:lo]))
            cid = len(cycles)
            for s in cyc:
                cycle_of[s] = cid
        cid = cycle_of[cur]
        for s in path:
            if cycle_of[s] == 0:
                cycle_of[s] = cid
    sizes = [0] * len(cycles)
    for s in range(1, n + 1):
        sizes[cycle_of[s] - 1] += 1
    return AttractorReport(k, tuple(cycles), tuple(sizes))


@dataclass(frozen=True)
class EquilibriumRow:
    """Equilibrium pairs and constant outputs for one constant external input.

    `inputs` holds one value per external channel in declared order.
    Each pair couples an upstream equilibrium with a downstream
    equilibrium of the input induced by that upstream equilibrium's
    output; `outputs` and `attractive` align with `pairs`.
    """

    inputs: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]
    attractive: tuple[bool, ...]


@dataclass(frozen=True)
class TableGroup:
    """Rows of an equilibrium table merged under one rendering condition."""

    condition: str
    rows: tuple[EquilibriumRow, ...]
    pairs: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]


@dataclass(frozen=True)
class EquilibriumTable:
    """Per-combination equilibrium rows for every constant external input."""

    channels: tuple[str, ...]
    channel_dims: tuple[int, ...]
    rows: tuple[EquilibriumRow, ...]

    def grouped_by_pairs(self) -> tuple[TableGroup, ...]:
        """Rows merged by their equilibrium pair set (component view)."""
        return self._grouped(lambda row: row.pairs)

    def grouped_by_outputs(self) -> tuple[TableGroup, ...]:
        """Rows merged by their constant output set (combined view)."""
        return self._grouped(lambda row: tuple(sorted(set(row.outputs))))

    def _grouped(self, key) -> tuple[TableGroup, ...]:
        buckets: dict[object, list[EquilibriumRow]] = {}
        for row in self.rows:
            buckets.setdefault(key(row), []).append(row)
        groups = sorted(
            buckets.values(), key=lambda rows: (len(rows), rows[0].inputs)
        )
        described = _describe_groups(self.channels, self.channel_dims, groups)
        out = []
        for cond, rows in zip(described, groups):
            pairs = sorted({p for r in rows for p in r.pairs})
            outs = sorted({o for r in rows for o in r.outputs})
            out.append(TableGroup(cond, tuple(rows), tuple(pairs), tuple(outs)))
        return tuple(out)


def _describe_groups(
    channels: Sequence[str],
    dims: Sequence[int],
    groups: list[list[EquilibriumRow]],
) -> list[str]:
    """Condition strings for row groups, catch-all for the one odd group out.

    A group whose input combinations form a product of per-channel value
    sets is described channel by channel (full-range channels omitted,
    all-but-one sets written as !=).  At most one non-product group is
    expected in practice; it is labelled as the remainder.
    """
    described: list[str | None] = []
    for rows in groups:
        described.append(_product_condition(channels, dims, rows))
    missing = [i for i, d in enumerate(described) if d is None]
    for i in missing:
        if len(missing) == 1 and len(groups) > 1:
            described[i] = "all other inputs"
        else:
            described[i] = f"{len(groups[i])} input combinations"
    return [d for d in described if d is not None]


def _product_condition(
    channels: Sequence[str], dims: Sequence[int], rows: list[EquilibriumRow]
) -> str | None:
    value_sets = [sorted({row.inputs[i] for row in rows}) for i in range(len(channels))]
    size = 1
    for vs in value_sets:
        size *= len(vs)
    if size != len(rows):
        return None
    parts: list[str] = []
    for name, dim, vs in zip(channels, dims, value_sets):
        if len(vs) == dim:
            continue
        if len(vs) == 1:
            parts.append(f"{name}={vs[0]}")
        elif len(vs) == dim - 1:
            (excluded,) = sorted(set(range(1, dim + 1)) - set(vs))
            parts.append(f"{name}!={excluded}")
        else:
            parts.append(f"{name} in {{{','.join(map(str, vs))}}}")
    return " ".join(parts) if parts else "any inputs"


def equilibrium_table(cascade: Cascade) -> EquilibriumTable:
    """Equilibrium pairs and constant outputs for all constant external inputs.

    For each combination the upstream equilibria are computed first; each
    one fixes the upstream output, hence the downstream constant input,
    under which the downstream equilibria are read off.  A pair is marked
    attractive when both components are globally attractive under their
    respective constant inputs.
    """
    channels = cascade.channels
    dims = cascade.channel_dims
    n_up_factors = len(cascade.upstream_factors)
    rows: list[EquilibriumRow] = []
    for combo in itertools.product(*(range(1, d + 1) for d in dims)):
        u = cascade.pack_upstream_input(combo[:n_up_factors])
        pairs: list[tuple[int, int]] = []
        outs: list[int] = []
        attr: list[bool] = []
        for e_up in equilibria(cascade.upstream, u):
            v_up = cascade.upstream.output_index(e_up, u)
            v = cascade.pack_downstream_input(combo[n_up_factors:], v_up)
            up_attractive = is_globally_attractive(cascade.upstream, u, e_up)
            for e_down in equilibria(cascade.downstream, v):
                pairs.append((e_up, e_down))
                outs.append(cascade.downstream.output_index(e_down, v))
                attr.append(
                    up_attractive
                    and is_globally_attractive(cascade.downstream, v, e_down)
                )
        rows.append(EquilibriumRow(combo, tuple(pairs), tuple(outs), tuple(attr)))
    return EquilibriumTable(channels, dims, tuple(rows))
