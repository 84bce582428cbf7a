#!/usr/bin/env python3
"""Generates the committed rendered-prompt fixtures for the pair (car, wheel)
by plain placeholder substitution over the template files. Run from the
repository root:

    python3 tests/oracle/render_fixtures.py
"""

import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
TEMPLATES = ROOT / "templates"
FIXTURES = ROOT / "tests" / "fixtures"

PREVIOUS = (
    "1) A car is a road vehicle. "
    "2) A wheel is a circular component that rotates on an axle. "
    "3) Every car rolls on wheels. "
    "4) A car is-broader-than a wheel because a wheel is a component used in "
    "the context of a car."
)


def substitute(body: str, previous: str | None = None) -> str:
    out = body.replace("[TOPIC-A]", "car").replace("[TOPIC-B]", "wheel")
    if previous is not None:
        out = out.replace("[PREVIOUS-RESPONSE]", previous)
    return out


def main() -> None:
    cases = [
        ("standard.txt", "prompt_standard_car_wheel.txt", None),
        ("cot_phase1.txt", "prompt_cot_phase1_car_wheel.txt", None),
        ("cot_phase2.txt", "prompt_cot_phase2_car_wheel.txt", PREVIOUS),
    ]
    for template_name, fixture_name, previous in cases:
        body = (TEMPLATES / template_name).read_text(encoding="utf-8")
        (FIXTURES / fixture_name).write_text(substitute(body, previous), encoding="utf-8")
        print("wrote", FIXTURES / fixture_name)


if __name__ == "__main__":
    main()
