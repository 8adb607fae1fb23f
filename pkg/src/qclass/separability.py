"""Separability of two-qubit states: PPT test and the X-state closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .hermitian import descending, eigvalsh, partial_transpose, validate_density
from .xstate import XParams


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    margin: float


def ppt_separable(m, tol: float = TOL.boundary) -> SeparabilityVerdict:
    """Peres-Horodecki test; exact for two qubits.

    The margin is the smallest eigenvalue of the partial transpose.
    """
    rho = validate_density(m)
    margin = float(eigvalsh(partial_transpose(rho), check=False)[-1])
    return SeparabilityVerdict(margin >= -tol, margin)


def inequality_slacks(p: XParams) -> tuple[float, float]:
    """Slacks (rhs - lhs) of the two spectral/angle separability inequalities.

    Outer: (r1-r2)^2 cos^2 phi1 + (r3-r4)^2 sin^2 phi2 <= (r1+r2)^2
    Inner: (r3-r4)^2 cos^2 phi2 + (r1-r2)^2 sin^2 phi1 <= (r3+r4)^2
    """
    r1, r2, r3, r4 = p.r
    d12 = (r1 - r2) ** 2
    d34 = (r3 - r4) ** 2
    c1, s1 = math.cos(p.phi1) ** 2, math.sin(p.phi1) ** 2
    c2, s2 = math.cos(p.phi2) ** 2, math.sin(p.phi2) ** 2
    outer = (r1 + r2) ** 2 - (d12 * c1 + d34 * s2)
    inner = (r3 + r4) ** 2 - (d34 * c2 + d12 * s1)
    return outer, inner


def x_separable_inequalities(p: XParams, tol: float = TOL.boundary) -> SeparabilityVerdict:
    margin = min(inequality_slacks(p.validate()))
    return SeparabilityVerdict(margin >= -tol, margin)


def absolutely_separable(r1: float, r2: float, r3: float, r4: float, tol: float = TOL.boundary) -> bool:
    """Separable for every pair of block mixing angles.

    Takes the spectrum block-paired: (r1, r2) from the outer block and
    (r3, r4) from the inner one.
    """
    return (r1 - r2) ** 2 <= 4.0 * r3 * r4 + tol and (r3 - r4) ** 2 <= 4.0 * r1 * r2 + tol


def absolutely_separable_sorted(spectrum, tol: float = TOL.boundary) -> bool:
    """Same test after sorting the whole spectrum into r1 >= r2 >= r3 >= r4.

    This is the view drawn over the ordered simplex.  For an X state whose
    blocks pair its eigenvalues differently the two functions can disagree.
    """
    r = descending(spectrum)
    return absolutely_separable(*r, tol=tol)


def absolute_separability_margin(r1: float, r2: float, r3: float, r4: float) -> float:
    return min(4.0 * r3 * r4 - (r1 - r2) ** 2, 4.0 * r1 * r2 - (r3 - r4) ** 2)


def worst_angles(r1: float, r2: float, r3: float, r4: float) -> tuple[float, float]:
    """Angle pair (phi1, phi2) that minimises the separability margin."""
    if 4.0 * r3 * r4 - (r1 - r2) ** 2 <= 4.0 * r1 * r2 - (r3 - r4) ** 2:
        return math.pi / 2, 0.0
    return 0.0, math.pi / 2


def angle_grid_scan(r, n: int = 50, refine: bool = True, tol: float = TOL.boundary) -> np.ndarray:
    """Entangled (phi1, phi2) points on an ``n x n`` grid over [0, pi]^2.

    With ``refine`` the extremal points (pi/2, 0), (0, pi/2) and their
    mirror images, each with a small neighbourhood, are added to the grid.
    Returns an ``(k, 2)`` array of the offending angle pairs.
    """
    phis = np.linspace(0.0, math.pi, n)
    a, b = (x.ravel() for x in np.meshgrid(phis, phis, indexing="ij"))
    if refine:
        h = math.pi / (4 * n)
        extra = [
            (a0 + da, b0 + db)
            for a0, b0 in ((math.pi / 2, 0.0), (0.0, math.pi / 2), (math.pi / 2, math.pi), (math.pi, math.pi / 2))
            for da in (-h, 0.0, h)
            for db in (-h, 0.0, h)
        ]
        ea, eb = np.clip(np.array(extra).T, 0.0, math.pi)
        a, b = np.concatenate([a, ea]), np.concatenate([b, eb])
    r1, r2, r3, r4 = r
    d12, d34 = (r1 - r2) ** 2, (r3 - r4) ** 2
    outer = (r1 + r2) ** 2 - (d12 * np.cos(a) ** 2 + d34 * np.sin(b) ** 2)
    inner = (r3 + r4) ** 2 - (d34 * np.cos(b) ** 2 + d12 * np.sin(a) ** 2)
    bad = np.minimum(outer, inner) < -tol
    return np.column_stack([a[bad], b[bad]])
