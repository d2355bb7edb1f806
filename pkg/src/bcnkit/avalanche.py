"""Parametric builder for the bundled avalanche alert system.

The system is a two-stage cascade.  The context network counts
consecutive simultaneous earthquake-and-snow alerts and raises a danger
flag once the count reaches a threshold; the functional network counts
consecutive high accelerometer readings and classifies every instant as
alarm, attention or normal from the local sensors plus the context
flag.  Default parameters give five context states (counter 0..4,
saturating) and three accelerometer states (counter 0..2).

Binary channels use 1 for the asserted reading (high / danger) and 2
for the other one; the classified output uses 1 = alarm, 2 = attention,
3 = normal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import Bcn, Cascade, external, upstream_output
from .stp import CanonicalVector, LogicalMatrix, decode

__all__ = [
    "ALARM",
    "ATTENTION",
    "NORMAL",
    "HIGH",
    "LOW",
    "DANGER",
    "QUIET",
    "RESET_TO_ZERO",
    "DECREMENT",
    "AvalancheParams",
    "output_class",
    "build_context",
    "build_functional",
    "build_cascade",
]

ALARM, ATTENTION, NORMAL = 1, 2, 3
HIGH, LOW = 1, 2
DANGER, QUIET = 1, 2

RESET_TO_ZERO = "reset"
DECREMENT = "decrement"


@dataclass(frozen=True)
class AvalancheParams:
    """Design knobs of the alert system.

    ctx_threshold is the number of consecutive simultaneous alerts that
    flips the context to danger; acc_threshold plays the same role for
    the accelerometer counter.  Raising either makes the alarm more
    conservative.  reset_policy decides what a non-alert instant does to
    the context counter: drop it to zero, or only decrement it, which is
    more robust to isolated disturbances on the context inputs.
    """

    ctx_threshold: int = 4
    acc_threshold: int = 2
    reset_policy: str = RESET_TO_ZERO

    def __post_init__(self) -> None:
        if self.ctx_threshold < 1:
            raise ValueError(f"ctx_threshold must be >= 1, got {self.ctx_threshold}")
        if self.acc_threshold < 1:
            raise ValueError(f"acc_threshold must be >= 1, got {self.acc_threshold}")
        if self.reset_policy not in (RESET_TO_ZERO, DECREMENT):
            raise ValueError(f"unknown reset policy {self.reset_policy!r}")


def _saturating_increment(n: int) -> LogicalMatrix:
    return LogicalMatrix(n, tuple(min(i + 1, n) for i in range(1, n + 1)))


def build_context(params: AvalancheParams = AvalancheParams()) -> Bcn:
    """Context network: a saturating counter over the packed (INGV, METEO) input.

    States 1..N encode counter values 0..ctx_threshold.  Input value 1
    (earthquake and snow) increments; every other value resets to zero
    or decrements, depending on the policy.  The output is danger
    exactly at the saturated state, whatever the input.
    """
    n = params.ctx_threshold + 1
    increment = _saturating_increment(n)
    if params.reset_policy == RESET_TO_ZERO:
        relax = LogicalMatrix(n, (1,) * n)
    else:
        relax = LogicalMatrix(n, tuple(max(i - 1, 1) for i in range(1, n + 1)))
    out = LogicalMatrix(2, (QUIET,) * (n - 1) + (DANGER,))
    return Bcn(
        n_states=n,
        n_inputs=4,
        n_outputs=2,
        transitions=(increment, relax, relax, relax),
        outputs=(out,) * 4,
    )


def output_class(
    temp: int, snow: int, counter_at_threshold: bool, acc: int, ctx: int
) -> int:
    """Classify one instant from the sensor values and the context flag.

    Normal needs both weather channels low; the alarm needs everything
    high, the accelerometer counter at threshold and the context in
    danger; every other combination only deserves attention.
    """
    if temp == LOW and snow == LOW:
        return NORMAL
    if (
        temp == HIGH
        and snow == HIGH
        and counter_at_threshold
        and acc == HIGH
        and ctx == DANGER
    ):
        return ALARM
    return ATTENTION


def build_functional(params: AvalancheParams = AvalancheParams()) -> Bcn:
    """Functional network over the packed (temp, snow, acc, context) input.

    The accelerometer counter saturates at acc_threshold and is reset by
    a low accelerometer reading; the other three input factors only
    matter for the classified output.
    """
    n = params.acc_threshold + 1
    increment = _saturating_increment(n)
    reset = LogicalMatrix(n, (1,) * n)
    transitions = []
    outputs = []
    for w in range(1, 17):
        temp, snow, acc, ctx = decode(CanonicalVector(w, 16), (2, 2, 2, 2))
        transitions.append(increment if acc == HIGH else reset)
        outputs.append(
            LogicalMatrix(
                3,
                tuple(
                    output_class(temp, snow, a == n, acc, ctx)
                    for a in range(1, n + 1)
                ),
            )
        )
    return Bcn(
        n_states=n,
        n_inputs=16,
        n_outputs=3,
        transitions=tuple(transitions),
        outputs=tuple(outputs),
    )


def build_cascade(params: AvalancheParams = AvalancheParams()) -> Cascade:
    """The full alert system: context output wired as the fourth sensor factor."""
    return Cascade(
        upstream=build_context(params),
        downstream=build_functional(params),
        upstream_factors=(external("u", 4),),
        downstream_factors=(
            external("v1", 2),
            external("v2", 2),
            external("v3", 2),
            upstream_output(),
        ),
    )
