"""Boolean/multi-valued control networks and cascade composition.

A control network here is the algebraic form of a logic state-space
model: one transition block and one output block per input value, all
logical matrices.  The state update under input value u is x(t+1) =
L_u x(t) and the output is y(t) = H_u x(t); the output may depend on
the current input (proper form), so models whose output ignores the
input simply repeat the same H block.

A cascade wires two networks so that the upstream output becomes one
factor of the downstream input, the usual context-to-functional split
of a context-aware system.  Cascades can be simulated directly or
flattened into a single product-state network.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .stp import CanonicalVector, LogicalMatrix, decode, pack

__all__ = [
    "Bcn",
    "InputFactor",
    "external",
    "upstream_output",
    "Cascade",
    "Trace",
    "CascadeTrace",
]


@dataclass(frozen=True)
class Bcn:
    """A control network with N states, M input values and P output values.

    `transitions` and `outputs` hold one block per input value: block u
    maps the current state index to the next state index (N x N) and to
    the output index (P x N).  Construction does not cross-check the
    blocks against the declared dimensions; `validate` reports every
    violation instead, so ill-formed models read from files can be
    diagnosed rather than rejected wholesale.
    """

    n_states: int
    n_inputs: int
    n_outputs: int
    transitions: tuple[LogicalMatrix, ...]
    outputs: tuple[LogicalMatrix, ...]

    def validate(self) -> list[str]:
        """Return a list of invariant violations, empty iff the model is well formed."""
        problems: list[str] = []
        if self.n_states < 1 or self.n_inputs < 1 or self.n_outputs < 1:
            problems.append(
                f"dimensions must be positive: N={self.n_states} "
                f"M={self.n_inputs} P={self.n_outputs}"
            )
            return problems
        problems.extend(
            self._check_blocks("transition", self.transitions, self.n_states)
        )
        problems.extend(self._check_blocks("output", self.outputs, self.n_outputs))
        return problems

    def _check_blocks(
        self, kind: str, blocks: tuple[LogicalMatrix, ...], target_dim: int
    ) -> list[str]:
        problems: list[str] = []
        if len(blocks) != self.n_inputs:
            problems.append(
                f"{kind}: {len(blocks)} blocks for M={self.n_inputs} input values"
            )
        for k, blk in enumerate(blocks, start=1):
            if blk.cols != self.n_states:
                problems.append(
                    f"{kind} block {k}: {blk.cols} columns, expected N={self.n_states}"
                )
            bad_cols = [
                (j, i) for j, i in enumerate(blk.col_index, start=1) if i > target_dim
            ]
            for j, i in bad_cols:
                problems.append(
                    f"{kind} block {k}, column {j}: index {i} exceeds {target_dim}"
                )
            if not bad_cols and blk.rows != target_dim:
                problems.append(
                    f"{kind} block {k}: {blk.rows} rows, expected {target_dim}"
                )
        return problems

    def step(self, x: CanonicalVector, u: int) -> CanonicalVector:
        """Next state L_u x."""
        if x.dim != self.n_states:
            raise ValueError(f"state dimension {x.dim}, model has N={self.n_states}")
        self._check_input(u)
        return self.transitions[u - 1].apply(x)

    def output(self, x: CanonicalVector, u: int) -> CanonicalVector:
        """Current output H_u x."""
        if x.dim != self.n_states:
            raise ValueError(f"state dimension {x.dim}, model has N={self.n_states}")
        self._check_input(u)
        return self.outputs[u - 1].apply(x)

    def _check_input(self, u: int) -> None:
        if not 1 <= u <= self.n_inputs:
            raise ValueError(f"input value {u} out of range [1, {self.n_inputs}]")

    def step_index(self, i: int, u: int) -> int:
        """Index-level state update, for tight analysis loops."""
        return self.transitions[u - 1].col_index[i - 1]

    def output_index(self, i: int, u: int) -> int:
        """Index-level output map."""
        return self.outputs[u - 1].col_index[i - 1]

    def simulate(self, x0: CanonicalVector, inputs: Sequence[int]) -> "Trace":
        """Run the network from x0 under the given input value sequence.

        The trace holds states x(0..T) and outputs y(0..T-1) where T is
        the number of inputs; an empty input sequence yields just x0.
        """
        if x0.dim != self.n_states:
            raise ValueError(f"state dimension {x0.dim}, model has N={self.n_states}")
        states = [x0.index]
        outs: list[int] = []
        cur = x0.index
        for t, u in enumerate(inputs):
            try:
                self._check_input(u)
            except ValueError as exc:
                raise ValueError(f"t={t}: {exc}") from None
            outs.append(self.output_index(cur, u))
            cur = self.step_index(cur, u)
            states.append(cur)
        return Trace(tuple(inputs), tuple(states), tuple(outs))


@dataclass(frozen=True)
class Trace:
    """Time-indexed record of one single-network run, all indices 1-based."""

    inputs: tuple[int, ...]
    states: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.inputs) + 1:
            raise ValueError("states must be one longer than inputs")
        if len(self.outputs) != len(self.inputs):
            raise ValueError("one output per input step required")

    @property
    def length(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class InputFactor:
    """One factor of a network's packed input.

    Either an external channel with its own dimension, or the slot fed
    by the upstream network's output inside a cascade.
    """

    name: str
    dim: int
    from_upstream: bool = False


def external(name: str, dim: int) -> InputFactor:
    if dim < 2:
        raise ValueError(f"external channel {name!r}: dimension {dim} must be >= 2")
    return InputFactor(name, dim)


def upstream_output() -> InputFactor:
    # dim 0 is a placeholder, resolved against the upstream model by Cascade
    return InputFactor("upstream_output", 0, from_upstream=True)


@dataclass(frozen=True)
class Cascade:
    """Two networks with the upstream output wired into the downstream input.

    The upstream input is the packed product of its external factors; the
    downstream input packs external factors plus exactly one upstream
    output slot, in declared order, leftmost most significant.  At every
    instant the upstream output feeds the downstream input of the same
    instant, there is no interconnection delay.
    """

    upstream: Bcn
    downstream: Bcn
    upstream_factors: tuple[InputFactor, ...]
    downstream_factors: tuple[InputFactor, ...]

    def __post_init__(self) -> None:
        if any(f.from_upstream for f in self.upstream_factors):
            raise ValueError("upstream factors must all be external")
        n_up = sum(1 for f in self.downstream_factors if f.from_upstream)
        if n_up != 1:
            raise ValueError(
                f"downstream factors must contain exactly one upstream output slot, got {n_up}"
            )
        up_prod = 1
        for f in self.upstream_factors:
            up_prod *= f.dim
        if up_prod != self.upstream.n_inputs:
            raise ValueError(
                f"upstream factor dimensions multiply to {up_prod}, "
                f"model expects M={self.upstream.n_inputs}"
            )
        down_prod = 1
        for f in self.downstream_factors:
            down_prod *= self.upstream.n_outputs if f.from_upstream else f.dim
        if down_prod != self.downstream.n_inputs:
            raise ValueError(
                f"downstream factor dimensions multiply to {down_prod}, "
                f"model expects M={self.downstream.n_inputs}"
            )
        names = [f.name for f in self.external_factors]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate external channel names in {names}")

    @property
    def external_factors(self) -> tuple[InputFactor, ...]:
        return self.upstream_factors + tuple(
            f for f in self.downstream_factors if not f.from_upstream
        )

    @property
    def channels(self) -> tuple[str, ...]:
        """External channel names, upstream factors first."""
        return tuple(f.name for f in self.external_factors)

    @property
    def channel_dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.external_factors)

    @property
    def downstream_dims(self) -> tuple[int, ...]:
        """Downstream factor dimensions with the upstream slot resolved."""
        return tuple(
            self.upstream.n_outputs if f.from_upstream else f.dim
            for f in self.downstream_factors
        )

    def pack_upstream_input(self, values: Sequence[int]) -> int:
        """Pack the upstream external channel values into one input index."""
        dims = tuple(f.dim for f in self.upstream_factors)
        if not dims:
            return 1
        return pack(values, dims).index

    def pack_downstream_input(
        self, ext_values: Sequence[int], upstream_value: int
    ) -> int:
        """Pack downstream externals plus the upstream output value, declared order."""
        vals: list[int] = []
        it = iter(ext_values)
        consumed = 0
        for f in self.downstream_factors:
            if f.from_upstream:
                vals.append(upstream_value)
            else:
                try:
                    vals.append(next(it))
                except StopIteration:
                    raise ValueError(
                        "too few external values for the downstream factors"
                    ) from None
                consumed += 1
        if consumed != len(ext_values):
            raise ValueError(
                f"{len(ext_values)} external values for "
                f"{consumed} downstream external factors"
            )
        return pack(vals, self.downstream_dims).index

    def pack_external_inputs(
        self, values: Mapping[str, int], upstream_value: int
    ) -> int:
        """pack_downstream_input with values given per channel name."""
        ext = [values[f.name] for f in self.downstream_factors if not f.from_upstream]
        return self.pack_downstream_input(ext, upstream_value)

    def _channel_values_at(
        self, ext: Mapping[str, Sequence[int]], t: int
    ) -> dict[str, int]:
        return {name: ext[name][t] for name in self.channels}

    def step_pair(
        self, x_up: int, x_down: int, values: Mapping[str, int]
    ) -> tuple[int, int, int, int]:
        """One cascade instant from component state indices.

        Returns (next upstream state, next downstream state, upstream
        output, downstream output) for the external channel values of
        the instant.
        """
        u = self.pack_upstream_input([values[f.name] for f in self.upstream_factors])
        v_up = self.upstream.output_index(x_up, u)
        v = self.pack_external_inputs(values, v_up)
        y = self.downstream.output_index(x_down, v)
        return (
            self.upstream.step_index(x_up, u),
            self.downstream.step_index(x_down, v),
            v_up,
            y,
        )

    def simulate(
        self,
        external_inputs: Mapping[str, Sequence[int]],
        x0_up: int = 1,
        x0_down: int = 1,
    ) -> "CascadeTrace":
        """Run the cascade under per-channel external input sequences.

        All sequences must have equal length T; initial states default to
        the first state of each component (counters at zero for the
        bundled alert models).
        """
        lengths = {name: len(external_inputs[name]) for name in self.channels}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"external sequences differ in length: {lengths}")
        horizon = next(iter(lengths.values())) if lengths else 0
        self._check_initial(x0_up, x0_down)
        dims = dict(zip(self.channels, self.channel_dims))
        for name in self.channels:
            for t, v in enumerate(external_inputs[name]):
                if not 1 <= v <= dims[name]:
                    raise ValueError(
                        f"t={t}: channel {name} value {v} out of range [1, {dims[name]}]"
                    )
        up_states = [x0_up]
        down_states = [x0_down]
        up_outs: list[int] = []
        outs: list[int] = []
        cu, cd = x0_up, x0_down
        for t in range(horizon):
            cu, cd, v_up, y = self.step_pair(
                cu, cd, self._channel_values_at(external_inputs, t)
            )
            up_states.append(cu)
            down_states.append(cd)
            up_outs.append(v_up)
            outs.append(y)
        return CascadeTrace(
            channels=self.channels,
            external={
                name: tuple(external_inputs[name]) for name in self.channels
            },
            up_states=tuple(up_states),
            down_states=tuple(down_states),
            up_outputs=tuple(up_outs),
            outputs=tuple(outs),
        )

    def _check_initial(self, x0_up: int, x0_down: int) -> None:
        if not 1 <= x0_up <= self.upstream.n_states:
            raise ValueError(
                f"upstream initial state {x0_up} out of range "
                f"[1, {self.upstream.n_states}]"
            )
        if not 1 <= x0_down <= self.downstream.n_states:
            raise ValueError(
                f"downstream initial state {x0_down} out of range "
                f"[1, {self.downstream.n_states}]"
            )

    def flat_state(self, x_up: int, x_down: int) -> int:
        """Product-state index of a component state pair (upstream major)."""
        return (x_up - 1) * self.downstream.n_states + x_down

    def split_flat_state(self, s: int) -> tuple[int, int]:
        nd = self.downstream.n_states
        return (s - 1) // nd + 1, (s - 1) % nd + 1

    def flatten(self) -> Bcn:
        """Collapse the cascade into one network over the product state.

        The flat input packs every external channel (upstream factors
        first); the upstream output slot disappears because it is a
        function of the flat state, making the flat output depend on the
        flat state and external input only.  Flat simulation agrees step
        for step with `simulate`.
        """
        n_flat = self.upstream.n_states * self.downstream.n_states
        dims = self.channel_dims
        m_flat = 1
        for d in dims:
            m_flat *= d
        if n_flat * m_flat > 50_000_000:
            raise ValueError(
                f"flattened model would need {n_flat * m_flat} matrix entries"
            )
        channels = self.channels
        transitions: list[LogicalMatrix] = []
        outputs: list[LogicalMatrix] = []
        for w in range(1, m_flat + 1):
            values = dict(
                zip(channels, decode(CanonicalVector(w, m_flat), dims) if dims else ())
            )
            tcols: list[int] = []
            ycols: list[int] = []
            for s in range(1, n_flat + 1):
                xu, xd = self.split_flat_state(s)
                nu, nd_, _, y = self.step_pair(xu, xd, values)
                tcols.append(self.flat_state(nu, nd_))
                ycols.append(y)
            transitions.append(LogicalMatrix(n_flat, tuple(tcols)))
            outputs.append(LogicalMatrix(self.downstream.n_outputs, tuple(ycols)))
        return Bcn(
            n_states=n_flat,
            n_inputs=m_flat,
            n_outputs=self.downstream.n_outputs,
            transitions=tuple(transitions),
            outputs=tuple(outputs),
        )


@dataclass(frozen=True)
class CascadeTrace:
    """Record of a cascade run: externals, both state tracks, both outputs.

    `observed` carries the logged downstream outputs of a field trace and
    is absent for pure simulations.
    """

    channels: tuple[str, ...]
    external: Mapping[str, tuple[int, ...]]
    up_states: tuple[int, ...]
    down_states: tuple[int, ...]
    up_outputs: tuple[int, ...]
    outputs: tuple[int, ...]
    observed: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        t = len(self.outputs)
        for name in self.channels:
            if len(self.external[name]) != t:
                raise ValueError(f"channel {name}: length != {t}")
        if len(self.up_states) != t + 1 or len(self.down_states) != t + 1:
            raise ValueError("state tracks must be one longer than the outputs")
        if len(self.up_outputs) != t:
            raise ValueError("one upstream output per step required")
        if self.observed is not None and len(self.observed) != t:
            raise ValueError("observed outputs must match the trace length")

    @property
    def length(self) -> int:
        return len(self.outputs)
