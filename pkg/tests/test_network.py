"""Model validation, simulation, cascade wiring and flattening."""

import itertools
import random

import pytest

from bcnkit.avalanche import build_cascade, build_context, build_functional
from bcnkit.network import Bcn, Cascade, external, upstream_output
from bcnkit.stp import LogicalMatrix, delta, pack

CTX = build_context()
FUN = build_functional()
CASCADE = build_cascade()


def test_validate_accepts_generated_models():
    assert CTX.validate() == []
    assert FUN.validate() == []


def test_validate_reports_out_of_range_column():
    bad = Bcn(
        n_states=5,
        n_inputs=4,
        n_outputs=2,
        transitions=(LogicalMatrix(6, (2, 3, 4, 5, 6)),) + CTX.transitions[1:],
        outputs=CTX.outputs,
    )
    problems = bad.validate()
    assert len(problems) == 1
    assert "transition block 1" in problems[0]
    assert "column 5" in problems[0]


def test_validate_reports_block_count_mismatch():
    bad = Bcn(5, 4, 2, CTX.transitions[:3], CTX.outputs)
    problems = bad.validate()
    assert any("3 blocks for M=4" in p for p in problems)


def test_validate_reports_wrong_column_count():
    short = LogicalMatrix(5, (1, 1, 1, 1))
    bad = Bcn(5, 4, 2, (short,) + CTX.transitions[1:], CTX.outputs)
    assert any("4 columns, expected N=5" in p for p in bad.validate())


def test_step_counter_increments_and_resets():
    assert CTX.step(delta(4, 5), 1) == delta(5, 5)
    assert CTX.step(delta(5, 5), 3) == delta(1, 5)


def test_step_functional_reset():
    # input 3 has the accelerometer factor low
    assert FUN.step(delta(3, 3), 3) == delta(1, 3)


def test_output_examples():
    for u in range(1, 5):
        assert CTX.output(delta(5, 5), u) == delta(1, 2)
    assert FUN.output(delta(3, 3), 1) == delta(1, 3)
    assert FUN.output(delta(1, 3), 13) == delta(3, 3)


def test_step_rejects_bad_arguments():
    with pytest.raises(ValueError):
        CTX.step(delta(1, 4), 1)
    with pytest.raises(ValueError):
        CTX.step(delta(1, 5), 5)
    with pytest.raises(ValueError):
        CTX.output(delta(1, 5), 0)


def test_simulate_counter_ramp():
    trace = CTX.simulate(delta(1, 5), (1, 1, 1, 1))
    assert trace.states == (1, 2, 3, 4, 5)
    assert trace.outputs == (2, 2, 2, 2)
    # one more alert instant and the output turns to danger
    trace = CTX.simulate(delta(1, 5), (1, 1, 1, 1, 1))
    assert trace.outputs[-1] == 1


def test_simulate_with_reset():
    trace = CTX.simulate(delta(3, 5), (1, 2, 1))
    assert trace.states == (3, 4, 1, 2)


def test_simulate_empty_inputs():
    trace = CTX.simulate(delta(2, 5), ())
    assert trace.states == (2,)
    assert trace.outputs == ()
    assert trace.length == 0


def test_simulate_error_carries_time_index():
    with pytest.raises(ValueError, match="t=1"):
        CTX.simulate(delta(1, 5), (1, 9))


def test_pack_external_inputs_table():
    assert CASCADE.pack_downstream_input((1, 1, 1), 1) == 1
    assert CASCADE.pack_downstream_input((2, 2, 2), 2) == 16
    assert CASCADE.pack_downstream_input((1, 1, 1), 2) == 2
    assert CASCADE.pack_external_inputs({"v1": 1, "v2": 2, "v3": 1}, 1) == 5


def test_pack_external_inputs_range_errors():
    with pytest.raises(ValueError):
        CASCADE.pack_downstream_input((1, 1, 3), 1)
    with pytest.raises(ValueError):
        CASCADE.pack_downstream_input((1, 1), 1)


def test_cascade_rejects_bad_wiring():
    with pytest.raises(ValueError, match="exactly one upstream output"):
        Cascade(CTX, FUN, (external("u", 4),), (external("v1", 2),) * 4)
    with pytest.raises(ValueError, match="multiply to"):
        Cascade(
            CTX,
            FUN,
            (external("u", 5),),
            (external("v1", 2), external("v2", 2), external("v3", 2), upstream_output()),
        )


def test_simulate_cascade_cold_start_alarm_onset():
    T = 8
    ext = {"u": [1] * T, "v1": [1] * T, "v2": [1] * T, "v3": [1] * T}
    trace = CASCADE.simulate(ext)
    assert trace.outputs[:4] == (2, 2, 2, 2)
    assert all(m == 1 for m in trace.outputs[4:])


def test_simulate_cascade_from_equilibrium():
    ext = {"u": [1] * 5, "v1": [1] * 5, "v2": [1] * 5, "v3": [1] * 5}
    trace = CASCADE.simulate(ext, x0_up=5, x0_down=3)
    assert trace.outputs == (1, 1, 1, 1, 1)


def test_simulate_cascade_weather_low_is_normal():
    rng = random.Random(11)
    ext = {
        "u": [rng.randint(1, 4) for _ in range(6)],
        "v1": [2] * 6,
        "v2": [2] * 6,
        "v3": [rng.randint(1, 2) for _ in range(6)],
    }
    trace = CASCADE.simulate(ext, x0_up=rng.randint(1, 5), x0_down=rng.randint(1, 3))
    assert all(m == 3 for m in trace.outputs)


def test_simulate_cascade_validates_lengths_and_ranges():
    with pytest.raises(ValueError, match="length"):
        CASCADE.simulate({"u": [1], "v1": [1, 1], "v2": [1], "v3": [1]})
    with pytest.raises(ValueError, match="channel u"):
        CASCADE.simulate({"u": [5], "v1": [1], "v2": [1], "v3": [1]})


def test_determinism():
    rng = random.Random(12)
    ext = {
        name: [rng.randint(1, d) for _ in range(10)]
        for name, d in zip(CASCADE.channels, CASCADE.channel_dims)
    }
    first = CASCADE.simulate(ext, 2, 1)
    second = CASCADE.simulate(ext, 2, 1)
    assert first == second


def test_properness_output_depends_on_current_input():
    # same state, different input, different instantaneous output
    assert FUN.output_index(3, 1) != FUN.output_index(3, 13)


def test_context_output_is_input_independent():
    assert len(set(CTX.outputs)) == 1


def test_flatten_dimensions():
    flat = CASCADE.flatten()
    assert (flat.n_states, flat.n_inputs, flat.n_outputs) == (15, 32, 3)
    assert flat.validate() == []


def test_flatten_agrees_stepwise_everywhere():
    # exhaustive one-step agreement over all (state, input) pairs; by
    # induction this covers input sequences of every length
    flat = CASCADE.flatten()
    dims = CASCADE.channel_dims
    for w, combo in enumerate(
        itertools.product(*(range(1, d + 1) for d in dims)), start=1
    ):
        values = dict(zip(CASCADE.channels, combo))
        for xu in range(1, 6):
            for xd in range(1, 4):
                s = CASCADE.flat_state(xu, xd)
                nu, nd, _, y = CASCADE.step_pair(xu, xd, values)
                assert flat.step_index(s, w) == CASCADE.flat_state(nu, nd)
                assert flat.output_index(s, w) == y


def test_flatten_matches_cascade_on_random_sequences():
    flat = CASCADE.flatten()
    dims = CASCADE.channel_dims
    rng = random.Random(13)
    for _ in range(500):
        T = 10
        ext = {
            name: [rng.randint(1, d) for _ in range(T)]
            for name, d in zip(CASCADE.channels, dims)
        }
        xu, xd = rng.randint(1, 5), rng.randint(1, 3)
        cascade_trace = CASCADE.simulate(ext, xu, xd)
        flat_inputs = [
            pack([ext[name][t] for name in CASCADE.channels], dims).index
            for t in range(T)
        ]
        flat_trace = flat.simulate(
            delta(CASCADE.flat_state(xu, xd), 15), flat_inputs
        )
        assert flat_trace.outputs == cascade_trace.outputs
        assert flat_trace.states == tuple(
            CASCADE.flat_state(u, d)
            for u, d in zip(cascade_trace.up_states, cascade_trace.down_states)
        )


def test_flatten_degenerate_upstream_freezes_context_value():
    one_state_up = Bcn(
        n_states=1,
        n_inputs=2,
        n_outputs=2,
        transitions=(LogicalMatrix(1, (1,)), LogicalMatrix(1, (1,))),
        outputs=(LogicalMatrix(2, (2,)), LogicalMatrix(2, (2,))),
    )
    cascade = Cascade(
        one_state_up,
        FUN,
        (external("w", 2),),
        (external("v1", 2), external("v2", 2), external("v3", 2), upstream_output()),
    )
    flat = cascade.flatten()
    assert (flat.n_states, flat.n_inputs) == (3, 16)
    # context output frozen at quiet: the alarm row never appears
    assert all(1 not in blk.col_index for blk in flat.outputs)
