import math

import pytest
from hypothesis import given, strategies as st

from manetmob.core import (
    TWO_PI,
    Area,
    BoundaryPolicy,
    NodeState,
    Phase,
    Position,
    SimulationClock,
    Trace,
    Velocity,
    advance,
    apply_boundary,
    normalize_heading,
    record,
)

finite = st.floats(-1e4, 1e4, allow_nan=False)
headings = st.floats(0, TWO_PI, allow_nan=False)
policies = st.sampled_from(list(BoundaryPolicy))


def node(x=0.0, y=0.0, speed=0.0, heading=0.0, id=0):
    return NodeState(id, Position(x, y), Velocity(speed, heading))


def test_advance_unit_motion():
    s = advance(node(speed=1.0), 1.0)
    assert (s.position.x, s.position.y) == (1.0, 0.0)


def test_advance_zero_speed():
    s = advance(node(3.0, 4.0, speed=0.0, heading=2.1), 5.0)
    assert s.position == Position(3.0, 4.0)


def test_advance_quarter_turn():
    s = advance(node(speed=1.0, heading=math.pi / 2), 2.0)
    assert s.position.x == pytest.approx(0.0, abs=1e-12)
    assert s.position.y == pytest.approx(2.0, abs=1e-12)


def test_advance_keeps_velocity_and_phase():
    n = NodeState(3, Position(1, 1), Velocity(0.7, 1.0), Phase.PAUSED, pause_remaining=2.0)
    s = advance(n, 0.5)
    assert s.velocity == n.velocity and s.phase is Phase.PAUSED and s.pause_remaining == 2.0


@pytest.mark.parametrize("dt", [0.0, -1.0, math.inf, math.nan])
def test_advance_rejects_bad_dt(dt):
    with pytest.raises(ValueError):
        advance(node(speed=1.0), dt)


def test_non_finite_state_rejected():
    with pytest.raises(ValueError):
        Position(math.nan, 0.0)
    with pytest.raises(ValueError):
        Velocity(math.inf, 0.0)
    with pytest.raises(ValueError):
        Velocity(-1.0, 0.0)


def test_heading_normalized():
    assert Velocity(1.0, -math.pi / 2).heading == pytest.approx(3 * math.pi / 2)
    assert Velocity(1.0, 5 * math.pi).heading == pytest.approx(math.pi)
    assert normalize_heading(-1e-300) == 0.0


def test_reflect_mirror():
    area = Area(10, 10, BoundaryPolicy.REFLECT)
    p, h = apply_boundary(Position(-1, 5), area, heading=math.pi)
    assert p == Position(1, 5)
    # heading pi has x-component -1; after reflection it points +x
    assert math.cos(h) == pytest.approx(1.0)
    assert math.sin(h) == pytest.approx(0.0, abs=1e-12)


def test_reflect_negates_only_offending_component():
    area = Area(10, 10)
    heading = math.radians(200)
    _, h = apply_boundary(Position(3, -2), area, heading)
    assert math.cos(h) == pytest.approx(math.cos(heading))
    assert math.sin(h) == pytest.approx(-math.sin(heading))


def test_wrap_modulo():
    p, h = apply_boundary(Position(11, 5), Area(10, 10, BoundaryPolicy.WRAP), heading=0.3)
    assert p == Position(1, 5) and h == 0.3


def test_clamp_pins():
    p, _ = apply_boundary(Position(12, -3), Area(10, 10, BoundaryPolicy.CLAMP))
    assert p == Position(10, 0)


def test_inside_positions_untouched():
    for policy in BoundaryPolicy:
        area = Area(10, 10, policy)
        for q in (Position(0, 0), Position(10, 10), Position(4.2, 9.9)):
            assert apply_boundary(q, area, 1.0) == (q, 1.0)


def test_area_validation():
    with pytest.raises(ValueError):
        Area(0, 10)
    with pytest.raises(ValueError):
        Area(10, -1)


@given(finite, finite, st.floats(0, 50), headings, st.floats(0.01, 20), policies)
def test_advance_then_boundary_contained(x, y, speed, heading, dt, policy):
    area = Area(100.0, 60.0, policy)
    s = advance(node(x, y, speed, heading), dt)
    p, h = apply_boundary(s.position, area, heading)
    assert area.contains(p)
    assert 0.0 <= h < TWO_PI


@given(st.floats(0, 100), st.floats(0, 100), st.floats(0, 20), headings,
       st.floats(0.01, 10), st.floats(0.01, 10))
def test_advance_linear_in_dt(x, y, speed, heading, a, b):
    s = node(x, y, speed, heading)
    one = advance(s, a + b).position
    two = advance(advance(s, a), b).position
    assert one.distance_to(two) <= 1e-9


@given(finite, finite, headings)
def test_reflect_preserves_speed_and_wrap_preserves_heading(x, y, heading):
    v = Velocity(3.5, heading)
    _, h = apply_boundary(Position(x, y), Area(50, 50, BoundaryPolicy.REFLECT), v.heading)
    assert Velocity(v.speed, h).speed == v.speed
    _, h = apply_boundary(Position(x, y), Area(50, 50, BoundaryPolicy.WRAP), v.heading)
    assert h == v.heading


def test_clock():
    c = SimulationClock(0.5, 4)
    assert c.time_at(3) == 1.5 and c.duration == 2.0
    with pytest.raises(ValueError):
        SimulationClock(0.0, 4)
    with pytest.raises(ValueError):
        SimulationClock(1.0, 0)


def test_record_appends_in_order():
    trace = Trace(SimulationClock(1.0, 2))
    states = [node(id=0), node(id=1)]
    record(trace, 0.0, states)
    assert len(trace) == 1
    trace.record(1.0, states)
    assert len(trace) == 2 and trace.times == [0.0, 1.0]


def test_record_rejects_out_of_order():
    trace = Trace(SimulationClock())
    record(trace, 1.0, [node()])
    with pytest.raises(ValueError):
        record(trace, 0.0, [node()])
    with pytest.raises(ValueError):
        record(trace, 1.0, [node()])


def test_record_rejects_changed_ids():
    trace = Trace(SimulationClock())
    record(trace, 0.0, [node(id=0), node(id=1)])
    with pytest.raises(ValueError):
        record(trace, 1.0, [node(id=0), node(id=2)])
    with pytest.raises(ValueError):
        record(Trace(SimulationClock()), 0.0, [node(id=4), node(id=4)])


def test_trace_arrays():
    trace = Trace(SimulationClock())
    record(trace, 0.0, [node(1, 2, 1.0, 0.0, id=0), node(3, 4, 2.0, math.pi / 2, id=1)])
    pos = trace.positions()
    vel = trace.velocities()
    assert pos.shape == (1, 2, 2) and pos[0, 1].tolist() == [3.0, 4.0]
    assert vel[0, 1, 0] == pytest.approx(0.0, abs=1e-12) and vel[0, 1, 1] == pytest.approx(2.0)
    assert trace.speeds().tolist() == [[1.0, 2.0]]
