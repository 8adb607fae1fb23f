"""Numerical tolerances shared by every module."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-12
    reconstruction: float = 1e-10
    simplex: float = 1e-12
    boundary: float = 1e-12
    kernel_residual: float = 1e-10
    vertex_dedup: float = 1e-10
    imaginary_residue: float = 1e-10
    gradient: float = 1e-10


TOL = Tolerances()


def with_overrides(overrides: dict[str, float] | None) -> Tolerances:
    if not overrides:
        return TOL
    unknown = set(overrides) - set(Tolerances.__dataclass_fields__)
    if unknown:
        raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
    return replace(TOL, **{k: float(v) for k, v in overrides.items()})


@contextmanager
def tolerance_scope(overrides: dict[str, float] | None):
    """Temporarily change the shared ``TOL`` instance in place.

    Code that reads ``TOL.<name>`` at call time sees the new values.  Default
    arguments bound at import time keep their original values.
    """
    new = with_overrides(overrides)
    old = replace(TOL)
    for name in Tolerances.__dataclass_fields__:
        object.__setattr__(TOL, name, getattr(new, name))
    try:
        yield TOL
    finally:
        for name in Tolerances.__dataclass_fields__:
            object.__setattr__(TOL, name, getattr(old, name))
