"""Deliberate rule-breaking hooks for the verify-paper fault-injection check.

Production code never sets these; the CLI flag --inject-fault and the test
suite flip one rule at a time to prove the paper-example table fails loudly.
"""

from __future__ import annotations

from contextlib import contextmanager

KNOWN = ("delta-beta-halfcircle", "r-pair-rule")

_active: set[str] = set()


def inject(name: str) -> None:
    if name not in KNOWN:
        raise ValueError(f"unknown fault {name!r}; known: {KNOWN}")
    _active.add(name)


def clear() -> None:
    _active.clear()


def active(name: str) -> bool:
    return name in _active


@contextmanager
def injected(name: str):
    inject(name)
    try:
        yield
    finally:
        _active.discard(name)
