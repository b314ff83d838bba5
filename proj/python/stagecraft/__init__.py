"""Python access to the stagecraft planner.

Charts, transition specs and plans may be passed as dicts or JSON strings.
Results come back as plain Python objects.
"""

import json

from . import _stagecraft
from ._stagecraft import StagecraftError

__all__ = [
    "StagecraftError",
    "capacity",
    "compile_plan",
    "ease",
    "recommend",
    "render_scene",
    "sample_plan",
    "validate",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def compile_plan(start, end, spec):
    return json.loads(_stagecraft.compile_plan(_text(start), _text(end), _text(spec)))


def validate(spec, start, end):
    """Diagnostics for a transition spec; an empty list means it is clean."""
    return json.loads(_stagecraft.validate(_text(spec), _text(start), _text(end)))


def recommend(start, end, stages=3, total_ms=2000, top=5, preset="tuned"):
    raw = _stagecraft.recommend(_text(start), _text(end), stages, total_ms, top, preset)
    return json.loads(raw)


def render_scene(chart):
    return json.loads(_stagecraft.render_scene(_text(chart)))


def sample_plan(plan, t):
    return json.loads(_stagecraft.sample_plan(_text(plan), float(t)))


capacity = _stagecraft.capacity
ease = _stagecraft.ease
