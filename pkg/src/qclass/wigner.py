"""Wigner functions of two-qubit states, spectral bounds and the positivity polytope.

A phase-space point is a unitary ``U``; the Wigner function of ``rho`` for a
kernel ``Delta`` at that point is ``tr(rho U Delta U^H)``.  Local points are
two SU(2) factors in Z-Y-Z Euler angles.  Full points cover SU(4) with six
complex Givens rotations followed by a diagonal phase matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import Delaunay, QhullError

from .config import TOL
from .hermitian import ValidationError, ascending, descending
from .kernel import SWKernel

TWO_PI = 2.0 * math.pi
# planes of the six Givens factors, in product order
GIVENS_PLANES = ((2, 3), (1, 2), (0, 1), (2, 3), (1, 2), (2, 3))
# corners of the ordered simplex r1 >= r2 >= r3 >= r4 >= 0
ORDERED_SIMPLEX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [1 / 3, 1 / 3, 1 / 3, 0.0],
        [0.25, 0.25, 0.25, 0.25],
    ]
)


def wrap_angle(x):
    """Reduce into [0, 2 pi); a tiny negative input must not land on 2 pi."""
    y = np.mod(x, TWO_PI)
    return np.where(y >= TWO_PI, 0.0, y) if isinstance(y, np.ndarray) else (0.0 if y >= TWO_PI else float(y))


def su2(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """``Rz(alpha) Ry(beta) Rz(gamma)`` with ``Rz(a) = diag(e^{-ia/2}, e^{ia/2})``."""
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    em = complex(math.cos((alpha + gamma) / 2), -math.sin((alpha + gamma) / 2))
    ed = complex(math.cos((alpha - gamma) / 2), -math.sin((alpha - gamma) / 2))
    return np.array([[em * c, -ed * s], [ed.conjugate() * s, em.conjugate() * c]])


def su2_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Euler angles of an SU(2) matrix, up to the overall sign of ``u``."""
    beta = 2.0 * math.atan2(abs(u[1, 0]), abs(u[0, 0]))
    half_sum = float(np.angle(u[1, 1])) if abs(u[1, 1]) > 1e-12 else 0.0
    half_diff = float(np.angle(u[1, 0])) if abs(u[1, 0]) > 1e-12 else 0.0
    return wrap_angle(half_sum + half_diff), beta, wrap_angle(half_sum - half_diff)


@dataclass(frozen=True)
class PhasePointLU:
    alpha1: float = 0.0
    beta1: float = 0.0
    gamma1: float = 0.0
    alpha2: float = 0.0
    beta2: float = 0.0
    gamma2: float = 0.0

    def unitary(self) -> np.ndarray:
        return np.kron(
            su2(self.alpha1, self.beta1, self.gamma1), su2(self.alpha2, self.beta2, self.gamma2)
        )

    def as_tuple(self) -> tuple[float, ...]:
        return (self.alpha1, self.beta1, self.gamma1, self.alpha2, self.beta2, self.gamma2)

    @classmethod
    def from_factors(cls, ua: np.ndarray, ub: np.ndarray) -> "PhasePointLU":
        return cls(*su2_angles(ua), *su2_angles(ub))

    @classmethod
    def from_unit_cube(cls, x) -> "PhasePointLU":
        """Map six numbers in [0, 1) onto the invariant SU(2) x SU(2) measure."""
        x = np.asarray(x, dtype=float)
        b1 = math.acos(1.0 - 2.0 * x[1])
        b2 = math.acos(1.0 - 2.0 * x[4])
        return cls(TWO_PI * x[0], b1, TWO_PI * x[2], TWO_PI * x[3], b2, TWO_PI * x[5])


def givens(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -s * e.conjugate()], [s * e, c]])


@dataclass(frozen=True)
class PhasePointFull:
    """SU(4) element ``G1 ... G6 D``.

    ``params`` holds ``(theta_k, phi_k)`` for the six Givens factors followed
    by three phases ``chi``; ``D = diag(e^{i chi1}, e^{i chi2}, e^{i chi3},
    e^{-i (chi1 + chi2 + chi3)})``.  Ranges: theta in [0, pi/2], phi and chi
    in [0, 2 pi).
    """

    params: tuple[float, ...] = (0.0,) * 15

    def __post_init__(self):
        if len(self.params) != 15:
            raise ValueError("a full phase point needs 15 parameters")
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))

    def unitary(self) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        for k, (p, q) in enumerate(GIVENS_PLANES):
            g = givens(self.params[2 * k], self.params[2 * k + 1])
            u[:, [p, q]] = u[:, [p, q]] @ g
        chi = self.params[12:]
        phases = np.exp(1j * np.array([chi[0], chi[1], chi[2], -sum(chi)]))
        return u * phases[None, :]

    @classmethod
    def from_unitary(cls, u) -> "PhasePointFull":
        """Decompose a unitary by zeroing its lower triangle column by column.

        The result reproduces ``u`` up to a global phase.
        """
        w = np.array(u, dtype=complex)
        det = np.linalg.det(w)
        if abs(abs(det) - 1.0) > 1e-9 or np.linalg.norm(w.conj().T @ w - np.eye(4)) > 1e-9:
            raise ValidationError("matrix is not unitary")
        w = w / det ** 0.25
        params = [0.0] * 12
        columns = (0, 0, 0, 1, 1, 2)
        for k, (col, (p, q)) in enumerate(zip(columns, GIVENS_PLANES)):
            a, b = w[p, col], w[q, col]
            theta = math.atan2(abs(b), abs(a))
            phi = wrap_angle(np.angle(b) - np.angle(a)) if abs(b) > 1e-15 else 0.0
            g = givens(theta, phi)
            w[[p, q], :] = g.conj().T @ w[[p, q], :]
            params[2 * k], params[2 * k + 1] = theta, phi
        # w is now diagonal; drop its mean phase so the result has det 1
        chi = np.angle(np.diag(w))
        shift = chi.sum() / 4.0
        chi = wrap_angle(chi[:3] - shift)
        return cls(tuple(params) + tuple(chi))

    @classmethod
    def from_unit_cube(cls, x) -> "PhasePointFull":
        x = np.asarray(x, dtype=float)
        out = []
        for k in range(6):
            out += [0.5 * math.pi * x[2 * k], TWO_PI * x[2 * k + 1]]
        out += [TWO_PI * t for t in x[12:15]]
        return cls(tuple(out))


def point_unitary(point) -> np.ndarray:
    if isinstance(point, (PhasePointLU, PhasePointFull)):
        return point.unitary()
    raise TypeError(f"not a phase point: {type(point).__name__}")


def wigner_value(rho, kernel: SWKernel, point) -> float:
    """``tr(rho U Delta U^H)`` at the phase point ``point``."""
    if isinstance(point, PhasePointLU) and kernel.kind != "pair":
        raise ValueError("local phase points only apply to two-qubit (pair) kernels")
    u = point_unitary(point)
    val = np.trace(np.asarray(rho) @ u @ kernel.matrix @ u.conj().T)
    if abs(val.imag) > TOL.imaginary_residue:
        raise ValidationError(f"Wigner value has imaginary residue {val.imag:.3e}")
    return float(val.real)


@dataclass(frozen=True)
class WignerBounds:
    lower: float
    upper: float


def wf_bounds(r, pi) -> WignerBounds:
    """Range of ``tr(rho U Delta U^H)`` over all unitaries ``U``.

    Pairing the descending state spectrum with the ascending kernel spectrum
    gives the minimum; pairing both descending gives the maximum.
    """
    rd = descending(r)
    return WignerBounds(float(rd @ ascending(pi)), float(rd @ descending(pi)))


def polytope_contains(r, pi, tol: float = TOL.boundary) -> bool:
    return wf_bounds(r, pi).lower >= -tol


@dataclass(frozen=True, eq=False)
class PositivityPolytope:
    vertices: np.ndarray
    kernel_spectrum: np.ndarray

    def contains_hull(self, points) -> np.ndarray:
        """Barycentric membership of ordered-simplex points in the vertex hull."""
        return hull_contains(self.vertices, points)


def polytope_vertices(pi, dedup: float = TOL.vertex_dedup) -> PositivityPolytope:
    """Clip the ordered simplex by the halfspace ``r . pi_ascending >= 0``.

    Keeps corners on the nonnegative side and adds the crossing point of
    every edge whose ends straddle the plane.
    """
    pa = ascending(pi)
    f = ORDERED_SIMPLEX @ pa
    verts = [ORDERED_SIMPLEX[i] for i in range(4) if f[i] >= -dedup]
    for i in range(4):
        for j in range(i + 1, 4):
            if (f[i] < -dedup and f[j] > dedup) or (f[j] < -dedup and f[i] > dedup):
                t = f[i] / (f[i] - f[j])
                verts.append((1.0 - t) * ORDERED_SIMPLEX[i] + t * ORDERED_SIMPLEX[j])
    uniq: list[np.ndarray] = []
    for v in verts:
        if all(np.abs(v - u).max() > dedup for u in uniq):
            uniq.append(v)
    return PositivityPolytope(np.array(uniq).reshape(-1, 4), descending(pi))


def hull_contains(vertices, points, tol: float = 1e-10) -> np.ndarray:
    """Whether each point is a convex combination of ``vertices``.

    Uses a Delaunay triangulation of the first three coordinates (the fourth
    is fixed by the unit sum); falls back to a linear program per point when
    the vertex set is flat.
    """
    v = np.asarray(vertices, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(v) == 0:
        return np.zeros(len(pts), dtype=bool)
    if len(v) >= 4:
        try:
            tri = Delaunay(v[:, :3])
            return tri.find_simplex(pts[:, :3], tol=tol) >= 0
        except QhullError:
            pass
    out = np.empty(len(pts), dtype=bool)
    a_eq = np.vstack([v.T, np.ones(len(v))])
    for i, p in enumerate(pts):
        res = linprog(
            np.zeros(len(v)), A_eq=a_eq, b_eq=np.append(p, 1.0), bounds=(0, None), method="highs"
        )
        out[i] = res.status == 0
    return out
