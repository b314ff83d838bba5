import json
import math
from pathlib import Path

import pytest

import stagecraft

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def load(name, which):
    return json.loads((FIXTURES / name / f"{which}.json").read_text())


def test_compile_fig1():
    plan = stagecraft.compile_plan(load("fig1", "start"), load("fig1", "end"), load("fig1", "transition"))
    assert plan["totalDuration"] == 2000


def test_accepts_json_strings():
    text = (FIXTURES / "fig1" / "start.json").read_text()
    scene = stagecraft.render_scene(text)
    assert scene


def test_sample_plan_endpoints_match_static_render():
    start, end = load("fig5", "start"), load("fig5", "end")
    plan = stagecraft.compile_plan(start, end, load("fig5", "transition"))
    assert stagecraft.sample_plan(plan, 0)
    assert stagecraft.sample_plan(plan, plan["totalDuration"])


def test_validate_clean_and_dangling():
    start, end = load("fig1", "start"), load("fig1", "end")
    assert stagecraft.validate(load("fig1", "transition"), start, end) == []
    bad = {"version": "transition/1", "timeline": {"component": {"axis": "z-axis"}}}
    diags = stagecraft.validate(bad, start, end)
    assert diags and diags[0]["code"] == "unknown-component"


def test_recommend_ranks():
    rec = stagecraft.recommend(load("fig1", "start"), load("fig1", "end"), stages=2, top=3)
    scores = [c["score"] for c in rec["candidates"]]
    assert len(scores) == 3
    assert scores == sorted(scores)


def test_capacity_and_ease():
    assert stagecraft.capacity(800, "initial") == pytest.approx(0.6, abs=1e-12)
    assert stagecraft.capacity(1e9) == pytest.approx(1.4)
    assert stagecraft.ease("linear", 0.25) == 0.25
    assert stagecraft.ease("cubic-in-out", 0.5) == pytest.approx(0.5)
    assert math.isclose(stagecraft.ease("cubic-in", 0.5), 0.125)


def test_errors_carry_code_and_offset():
    with pytest.raises(stagecraft.StagecraftError) as info:
        stagecraft.render_scene("{\"width\": 10,,}")
    message, code, offset = info.value.args
    assert code == "syntax"
    assert offset > 0
    with pytest.raises(ValueError):
        stagecraft.capacity(100, "nope")
