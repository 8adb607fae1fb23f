"""X-shaped two-qubit states in matrix and in spectral/angle coordinates.

The outer block sits on rows {1, 4} and the inner block on rows {2, 3}
(1-based).  Each block is written as

    [[m + h cos(phi),          h sin(phi) e^{i psi}],
     [h sin(phi) e^{-i psi},   m - h cos(phi)       ]]

with ``m`` the mean and ``h`` half the gap of its two eigenvalues.  The outer
block carries eigenvalues (r1, r2) and angles (phi1, psi1); the inner block
carries (r3, r4) and (phi2, psi2).  Each pair is sorted descending, but no
order across pairs is imposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .hermitian import ValidationError, as_hermitian, block_eig_2x2

TWO_PI = 2.0 * math.pi
# positions (0-based) that must vanish for an X state
ANTI_PATTERN = ((0, 1), (0, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class XState:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0j
    rho23: complex = 0j

    def __post_init__(self):
        for name in ("rho11", "rho22", "rho33", "rho44"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("rho14", "rho23"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def validate(self, tol: float = TOL.simplex) -> "XState":
        diag = (self.rho11, self.rho22, self.rho33, self.rho44)
        if not all(math.isfinite(x) for x in diag) or not all(
            math.isfinite(z.real) and math.isfinite(z.imag) for z in (self.rho14, self.rho23)
        ):
            raise ValidationError("non-finite X-state entry")
        tr = sum(diag)
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"trace is {tr:.12g}; residual {tr - 1.0:+.3e} exceeds {tol:g}")
        for name, x in zip(("rho11", "rho22", "rho33", "rho44"), diag):
            if x < -tol:
                raise ValidationError(f"{name} = {x:.3e} is negative")
        if self.rho11 * self.rho44 < abs(self.rho14) ** 2 - tol:
            raise ValidationError("outer block {1,4} is not positive semidefinite")
        if self.rho22 * self.rho33 < abs(self.rho23) ** 2 - tol:
            raise ValidationError("inner block {2,3} is not positive semidefinite")
        return self

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.rho11, self.rho22, self.rho33, self.rho44
        m[0, 3], m[3, 0] = self.rho14, self.rho14.conjugate()
        m[1, 2], m[2, 1] = self.rho23, self.rho23.conjugate()
        return m

    @classmethod
    def from_matrix(cls, m, tol: float = TOL.hermiticity) -> "XState":
        a = as_hermitian(m, dim=4)
        if not is_x_shape(a, tol):
            raise ValidationError("matrix is not X-shaped")
        return cls(a[0, 0].real, a[1, 1].real, a[2, 2].real, a[3, 3].real, a[0, 3], a[1, 2])

    def to_json(self) -> dict:
        return {
            "rho11": self.rho11,
            "rho22": self.rho22,
            "rho33": self.rho33,
            "rho44": self.rho44,
            "rho14": [self.rho14.real, self.rho14.imag],
            "rho23": [self.rho23.real, self.rho23.imag],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "XState":
        """Parse the ``{"rho11": .., "rho14": [re, im], ..}`` object form."""
        missing = [k for k in ("rho11", "rho22", "rho33", "rho44") if k not in obj]
        if missing:
            raise KeyError(f"missing field(s): {', '.join(missing)}")
        vals = {}
        for k in ("rho11", "rho22", "rho33", "rho44"):
            if not isinstance(obj[k], (int, float)) or isinstance(obj[k], bool):
                raise TypeError(f"field {k!r} must be a real number")
            vals[k] = float(obj[k])
        for k in ("rho14", "rho23"):
            v = obj.get(k, [0.0, 0.0])
            if (
                not isinstance(v, list)
                or len(v) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
            ):
                raise TypeError(f"field {k!r} must be a two-element [re, im] array")
            vals[k] = complex(v[0], v[1])
        return cls(**vals)


@dataclass(frozen=True)
class XParams:
    """Block-paired spectrum plus the Euler angles of each block."""

    r: tuple[float, float, float, float]
    phi1: float = 0.0
    phi2: float = 0.0
    psi1: float = 0.0
    psi2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))

    def validate(self, tol: float = TOL.simplex) -> "XParams":
        if len(self.r) != 4:
            raise ValidationError("spectrum must have four entries")
        r1, r2, r3, r4 = self.r
        if min(self.r) < -tol:
            raise ValidationError(f"negative eigenvalue in {self.r}")
        if abs(sum(self.r) - 1.0) > tol:
            raise ValidationError(f"eigenvalues sum to {sum(self.r):.12g}, not 1")
        if r1 < r2 - tol or r3 < r4 - tol:
            raise ValidationError("block pairs must be sorted descending (r1>=r2, r3>=r4)")
        for name in ("phi1", "phi2"):
            if not -tol <= getattr(self, name) <= math.pi + tol:
                raise ValidationError(f"{name} must lie in [0, pi]")
        return self


def _block(hi: float, lo: float, phi: float, psi: float) -> tuple[float, float, complex]:
    mean = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    return (
        mean + half * math.cos(phi),
        mean - half * math.cos(phi),
        half * math.sin(phi) * complex(math.cos(psi), math.sin(psi)),
    )


def x_from_params(p: XParams) -> XState:
    p.validate()
    r1, r2, r3, r4 = p.r
    a11, a44, c14 = _block(r1, r2, p.phi1, p.psi1)
    a22, a33, c23 = _block(r3, r4, p.phi2, p.psi2)
    return XState(a11, a22, a33, a44, c14, c23)


def x_to_params(s: XState) -> XParams:
    """Invert :func:`x_from_params`; degenerate blocks get zero angles."""
    s.validate()
    r1, r2, phi1, psi1 = block_eig_2x2(s.rho11, s.rho44, s.rho14)
    r3, r4, phi2, psi2 = block_eig_2x2(s.rho22, s.rho33, s.rho23)
    return XParams((r1, r2, r3, r4), phi1, phi2, psi1, psi2)


def is_x_shape(m, tol: float = TOL.hermiticity) -> bool:
    a = np.asarray(m, dtype=complex)
    if a.shape != (4, 4):
        return False
    return all(abs(a[i, j]) <= tol and abs(a[j, i]) <= tol for i, j in ANTI_PATTERN)


def werner_params(p: float) -> XParams:
    """Werner state ``p |Phi+><Phi+| + (1 - p) I/4`` in block coordinates."""
    hi = (1.0 + 3.0 * p) / 4.0
    lo = (1.0 - p) / 4.0
    return XParams((hi, lo, lo, lo), math.pi / 2, 0.0, 0.0, 0.0)
