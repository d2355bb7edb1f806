"""Stuck-at fault injection and detection for cascades.

The fault model freezes one component's state variable from an onset
time on, either at whatever value it holds then or at an explicitly
forced value; everything downstream of the frozen variable keeps
running on its outputs.  Detection runs a set-valued observer driven by
the external inputs alone: each component set is mapped forward through
the known dynamics, and once both sets have collapsed to singletons the
predicted system output is compared with the logged one.  The first
mismatch flags a fault; replaying the single-fault hypothesis families
against the log then attributes it to a component, honestly reporting
ambiguity when both families explain the data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .network import Cascade, CascadeTrace

__all__ = [
    "CONTEXT",
    "FUNCTIONAL",
    "FaultSpec",
    "ObserverState",
    "DetectionVerdict",
    "initial_observer",
    "observer_step",
    "predict_output",
    "inject_stuck_fault",
    "detect",
]

CONTEXT = "context"
FUNCTIONAL = "functional"


@dataclass(frozen=True)
class FaultSpec:
    """One stuck-at fault: which component, when, and at what value.

    stuck_value None means the component freezes at the value it holds
    at the onset; a concrete value forces the state there instead, which
    is a strict superset of behaviours useful for test coverage.
    """

    component: str
    onset: int
    stuck_value: int | None = None

    def __post_init__(self) -> None:
        if self.component not in (CONTEXT, FUNCTIONAL):
            raise ValueError(f"unknown component {self.component!r}")
        if self.onset < 0:
            raise ValueError(f"onset must be non-negative, got {self.onset}")


def inject_stuck_fault(
    cascade: Cascade,
    external_inputs: Mapping[str, Sequence[int]],
    fault: FaultSpec,
    x0_up: int = 1,
    x0_down: int = 1,
) -> CascadeTrace:
    """Simulate the cascade with the fault active from its onset.

    The trace is identical to the nominal one before the onset; from the
    onset on the faulted component's state column is constant and the
    outputs are computed from the frozen value.  An onset beyond the
    trace length reproduces the nominal run.
    """
    dim = (
        cascade.upstream.n_states
        if fault.component == CONTEXT
        else cascade.downstream.n_states
    )
    if fault.stuck_value is not None and not 1 <= fault.stuck_value <= dim:
        raise ValueError(
            f"stuck value {fault.stuck_value} out of range [1, {dim}] "
            f"for the {fault.component} component"
        )
    lengths = {name: len(external_inputs[name]) for name in cascade.channels}
    if len(set(lengths.values())) > 1:
        raise ValueError(f"external sequences differ in length: {lengths}")
    horizon = next(iter(lengths.values())) if lengths else 0
    cascade._check_initial(x0_up, x0_down)

    up_states, down_states = [0] * (horizon + 1), [0] * (horizon + 1)
    up_outs, outs = [0] * horizon, [0] * horizon
    cu, cd = x0_up, x0_down
    for t in range(horizon + 1):
        if t == fault.onset and fault.stuck_value is not None:
            if fault.component == CONTEXT:
                cu = fault.stuck_value
            else:
                cd = fault.stuck_value
        up_states[t], down_states[t] = cu, cd
        if t == horizon:
            break
        values = {name: external_inputs[name][t] for name in cascade.channels}
        nu, nd, v_up, y = cascade.step_pair(cu, cd, values)
        up_outs[t], outs[t] = v_up, y
        if t >= fault.onset:
            if fault.component == CONTEXT:
                nu = cu
            else:
                nd = cd
        cu, cd = nu, nd
    return CascadeTrace(
        channels=cascade.channels,
        external={n: tuple(external_inputs[n]) for n in cascade.channels},
        up_states=tuple(up_states),
        down_states=tuple(down_states),
        up_outputs=tuple(up_outs),
        outputs=tuple(outs),
    )


@dataclass(frozen=True)
class ObserverState:
    """Set-valued estimate of both component states at time t.

    In fault-free operation the true states are members of their sets at
    every instant; exact_from records when a set first became a
    singleton.  inconsistent_at is set when an output restriction
    emptied a set, which is itself a fault symptom.
    """

    t: int
    context_set: frozenset[int]
    functional_set: frozenset[int]
    context_exact_from: int | None = None
    functional_exact_from: int | None = None
    inconsistent_at: int | None = None

    @property
    def pinned(self) -> bool:
        return len(self.context_set) == 1 and len(self.functional_set) == 1


def initial_observer(
    cascade: Cascade, x0_up: int | None = None, x0_down: int | None = None
) -> ObserverState:
    """Full-uncertainty observer, or partially pinned when a state is known."""
    ctx = (
        frozenset(range(1, cascade.upstream.n_states + 1))
        if x0_up is None
        else frozenset({x0_up})
    )
    fun = (
        frozenset(range(1, cascade.downstream.n_states + 1))
        if x0_down is None
        else frozenset({x0_down})
    )
    return ObserverState(
        t=0,
        context_set=ctx,
        functional_set=fun,
        context_exact_from=0 if len(ctx) == 1 else None,
        functional_exact_from=0 if len(fun) == 1 else None,
    )


def _predictions(
    cascade: Cascade,
    ctx_set: frozenset[int],
    fun_set: frozenset[int],
    values: Mapping[str, int],
) -> dict[tuple[int, int], int]:
    """Output predicted for every (context, functional) state pair."""
    u = cascade.pack_upstream_input(
        [values[f.name] for f in cascade.upstream_factors]
    )
    out: dict[tuple[int, int], int] = {}
    for c in ctx_set:
        v = cascade.pack_external_inputs(values, cascade.upstream.output_index(c, u))
        for a in fun_set:
            out[(c, a)] = cascade.downstream.output_index(a, v)
    return out


def predict_output(
    cascade: Cascade, state: ObserverState, values: Mapping[str, int]
) -> frozenset[int]:
    """Set of outputs compatible with the observer sets at this instant."""
    return frozenset(
        _predictions(cascade, state.context_set, state.functional_set, values).values()
    )


def observer_step(
    cascade: Cascade,
    state: ObserverState,
    values: Mapping[str, int],
    observed: int | None = None,
    use_outputs: bool = False,
) -> ObserverState:
    """Advance the observer by one instant.

    Both sets are mapped forward through their dynamics under the known
    external inputs, the functional set with the context output ranging
    over the whole context set.  With use_outputs the sets are first
    restricted to the states consistent with the observed output; an
    empty restriction is surfaced via inconsistent_at, not swallowed.
    """
    ctx_set, fun_set = state.context_set, state.functional_set
    if use_outputs and observed is not None:
        consistent = {
            pair
            for pair, y in _predictions(cascade, ctx_set, fun_set, values).items()
            if y == observed
        }
        ctx_set = frozenset(c for c, _ in consistent)
        fun_set = frozenset(a for _, a in consistent)
        if not consistent:
            return replace(state, t=state.t + 1, inconsistent_at=state.t)
    u = cascade.pack_upstream_input(
        [values[f.name] for f in cascade.upstream_factors]
    )
    next_ctx = frozenset(cascade.upstream.step_index(c, u) for c in ctx_set)
    v_values = {cascade.upstream.output_index(c, u) for c in ctx_set}
    next_fun = frozenset(
        cascade.downstream.step_index(
            a, cascade.pack_external_inputs(values, v_up)
        )
        for a in fun_set
        for v_up in v_values
    )
    t1 = state.t + 1
    return ObserverState(
        t=t1,
        context_set=next_ctx,
        functional_set=next_fun,
        context_exact_from=(
            state.context_exact_from
            if state.context_exact_from is not None
            else (t1 if len(next_ctx) == 1 else None)
        ),
        functional_exact_from=(
            state.functional_exact_from
            if state.functional_exact_from is not None
            else (t1 if len(next_fun) == 1 else None)
        ),
        inconsistent_at=state.inconsistent_at,
    )


@dataclass(frozen=True)
class DetectionVerdict:
    """Outcome of residual-based detection over one logged trace.

    identified_component is only present after a detection and is one of
    "context", "functional", "ambiguous" (both hypothesis families
    reproduce the log) or "unmodeled" (neither does).
    """

    status: str
    detection_time: int | None = None
    identified_component: str | None = None

    @property
    def fault_detected(self) -> bool:
        return self.status == "fault-detected"


def detect(
    cascade: Cascade,
    external_inputs: Mapping[str, Sequence[int]],
    observed: Sequence[int],
    x0_up: int | None = None,
    x0_down: int | None = None,
    use_outputs: bool = False,
) -> DetectionVerdict:
    """Check a logged output sequence against the input-driven estimate.

    The observer runs on inputs alone (output filtering is available for
    experimentation but off by default); no verdict is issued while a
    component set is still ambiguous, which confines detection to the
    window where the estimate is exact.  On the first mismatch the two
    freeze-at-onset hypothesis families are replayed against the log,
    over all initial states unless the true ones are supplied.
    """
    horizon = len(observed)
    for name in cascade.channels:
        if len(external_inputs[name]) != horizon:
            raise ValueError(
                f"channel {name}: {len(external_inputs[name])} inputs for "
                f"{horizon} observed outputs"
            )
    state = initial_observer(cascade, x0_up, x0_down)
    detection_time: int | None = None
    for t in range(horizon):
        values = {name: external_inputs[name][t] for name in cascade.channels}
        if state.pinned:
            predicted = predict_output(cascade, state, values)
            if observed[t] not in predicted:
                detection_time = t
                break
        state = observer_step(cascade, state, values, observed[t], use_outputs)
    if detection_time is None:
        return DetectionVerdict("consistent")
    component = _identify(cascade, external_inputs, observed, x0_up, x0_down)
    return DetectionVerdict("fault-detected", detection_time, component)


def _identify(
    cascade: Cascade,
    external_inputs: Mapping[str, Sequence[int]],
    observed: Sequence[int],
    x0_up: int | None,
    x0_down: int | None,
) -> str:
    """Attribute a detected fault by hypothesis replay.

    A hypothesis freezes one component at the value it holds at some
    onset and is accepted when the replayed outputs match the log
    exactly.  Freezing at the held value is the fault model itself;
    allowing arbitrary forced values would let either family explain
    any alarm-free log and void identification altogether.
    """
    horizon = len(observed)
    ups = (
        range(1, cascade.upstream.n_states + 1) if x0_up is None else (x0_up,)
    )
    downs = (
        range(1, cascade.downstream.n_states + 1) if x0_down is None else (x0_down,)
    )
    target = tuple(observed)
    fits: list[str] = []
    for component in (CONTEXT, FUNCTIONAL):
        if any(
            inject_stuck_fault(
                cascade, external_inputs, FaultSpec(component, onset), cu, cd
            ).outputs
            == target
            for cu in ups
            for cd in downs
            for onset in range(horizon)
        ):
            fits.append(component)
    if len(fits) == 1:
        return fits[0]
    return "ambiguous" if fits else "unmodeled"
