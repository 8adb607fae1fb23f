"""Minimise a Wigner function over a unitary orbit of the kernel.

The cost ``f(U) = tr(rho U Delta U^H)`` is descended along one-parameter
subgroups ``U <- exp(t Y) U``.  With generators ``X_k = (i/2) P_k`` built from
Pauli products, the directional derivatives are ``g_k = tr(rho [X_k, M])``
with ``M = U Delta U^H``, and the steepest-descent direction is
``Y = -sum_k g_k X_k``.  The local group uses the six products that carry an
identity factor; the full group uses all fifteen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .kernel import SWKernel
from .wigner import PhasePointFull, PhasePointLU

_PAULI = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
# (a, b) labels of sigma_a (x) sigma_b, identity excluded
_LABELS = [(a, b) for a, b in itertools.product(range(4), repeat=2) if (a, b) != (0, 0)]
_LOCAL = [(a, b) for a, b in _LABELS if a == 0 or b == 0]
GENERATORS = {
    "full": np.array([0.5j * np.kron(_PAULI[a], _PAULI[b]) for a, b in _LABELS]),
    "LU": np.array([0.5j * np.kron(_PAULI[a], _PAULI[b]) for a, b in _LOCAL]),
}
# row k holds X_k^T flattened, so g = (rows @ C.ravel()).real = tr(X_k C)
_TRACE_ROWS = {k: np.array([x.T.ravel() for x in v]) for k, v in GENERATORS.items()}
_FLAT = {k: v.reshape(len(v), 16) for k, v in GENERATORS.items()}


@dataclass(frozen=True)
class OrbitMinimum:
    min_value: float
    point: PhasePointLU | PhasePointFull
    converged: bool
    restarts_used: int
    iterations: int
    gradient_norm: float

    def to_json(self) -> dict:
        params = self.point.as_tuple() if isinstance(self.point, PhasePointLU) else self.point.params
        return {
            "min_value": self.min_value,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "argmin_parameters": list(params),
        }


def _expm_ah(y: np.ndarray, t: float, cache: dict) -> np.ndarray:
    # exp(t Y) for anti-Hermitian Y = iH through one eigendecomposition of H.
    if "vec" not in cache:
        lam, vec = np.linalg.eigh(-1j * y)
        cache["lam"], cache["vec"] = lam, vec
    vec = cache["vec"]
    return (vec * np.exp(1j * t * cache["lam"])[None, :]) @ vec.conj().T


def _su2_exp(coef: np.ndarray, t: float) -> np.ndarray:
    # exp(-t (i/2) coef . sigma) = cos(a) I - i sin(a) n . sigma, a = t |coef| / 2
    norm = float(np.sqrt(coef @ coef))
    if norm == 0.0:
        return np.eye(2, dtype=complex)
    a = 0.5 * t * norm
    c, s = np.cos(a), np.sin(a) / norm
    x, y, z = coef
    return np.array([[c - 1j * s * z, -s * (1j * x + y)], [s * (y - 1j * x), c + 1j * s * z]])


def _kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


def _gradient(rho: np.ndarray, m: np.ndarray, rows: np.ndarray) -> np.ndarray:
    c = m @ rho - rho @ m
    return (rows @ c.ravel()).real


def _descend(rho, delta, u0, group, budget, gtol, memory: int = 10):
    # Barzilai-Borwein steps with a nonmonotone Armijo backtracking test
    # against the worst of the last ``memory`` values; the best iterate is kept.
    local = group == "LU"
    rows, flat = _TRACE_ROWS[group], _FLAT[group]
    u = u0.copy()
    m = u @ delta @ u.conj().T
    f = float((rho * m.T).sum().real)
    g = _gradient(rho, m, rows)
    best = (u, f, float(np.sqrt(g @ g)))
    history = [f]
    step = 1.0
    prev = None
    for it in range(budget):
        gn2 = float(g @ g)
        if gn2 <= gtol * gtol:
            return u, f, float(np.sqrt(gn2)), True, it
        if prev is not None:
            s_vec, y_vec = prev
            sy = float(s_vec @ y_vec)
            step = float(s_vec @ s_vec) / sy if sy > 1e-300 else 1.0
            step = min(max(step, 1e-3), 50.0)
        if not local:
            y = -(g @ flat).reshape(4, 4)
        cache: dict = {}
        ref = max(history[-memory:])
        t = step
        while True:
            if local:
                # Y = Y_A (x) I + I (x) Y_B; exponentiate each factor separately
                u_new = _kron2(_su2_exp(g[3:], t), _su2_exp(g[:3], t)) @ u
            else:
                u_new = _expm_ah(y, t, cache) @ u
            m_new = u_new @ delta @ u_new.conj().T
            f_new = float((rho * m_new.T).sum().real)
            if f_new <= ref - 1e-4 * t * gn2:
                break
            t *= 0.5
            if t < 1e-14:
                # no acceptable step: numerically stationary
                return best[0], best[1], best[2], best[2] <= gtol, it
        g_new = _gradient(rho, m_new, rows)
        prev = (-t * g, g_new - g)
        u, m, f, g = u_new, m_new, f_new, g_new
        history.append(f)
        if f < best[1]:
            best = (u, f, float(np.sqrt(g @ g)))
    gn = float(np.sqrt(g @ g))
    if gn <= gtol:
        return u, f, gn, True, budget
    return best[0], best[1], best[2], False, budget


def min_over_orbit(
    rho,
    kernel: SWKernel,
    group: str = "full",
    restarts: int = 20,
    budget: int = 2000,
    seed: int = 0,
    gtol: float = 1e-7,
) -> OrbitMinimum:
    """Multistart descent of ``tr(rho U Delta U^H)`` over the chosen orbit.

    ``group`` is ``"LU"`` (SU(2) x SU(2), pair kernels only) or ``"full"``
    (SU(4)).  Starting points come from a scrambled Halton sequence seeded by
    ``seed``.  The value returned is an upper bound on the true orbit minimum;
    it is never larger than the value at any starting point.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if group not in GENERATORS:
        raise ValueError(f"group must be 'LU' or 'full', got {group!r}")
    if group == "LU" and kernel.kind != "pair":
        raise ValueError("the local orbit is only defined for pair kernels")
    rho = np.asarray(rho, dtype=complex)
    delta = kernel.matrix
    local = group == "LU"
    dim = 6 if local else 15
    starts = qmc.Halton(d=dim, scramble=True, seed=seed).random(restarts)

    best = None
    total_iter = 0
    for x in starts:
        if local:
            p0 = PhasePointLU.from_unit_cube(x)
        else:
            p0 = PhasePointFull.from_unit_cube(x)
        u, f, gnorm, conv, nit = _descend(rho, delta, p0.unitary(), group, budget, gtol)
        total_iter += nit
        if best is None or f < best[1]:
            best = (u, f, gnorm, conv)
    u, f, gnorm, conv = best
    if local:
        ua, ub = _factor_local(u)
        point = PhasePointLU.from_factors(ua, ub)
    else:
        point = PhasePointFull.from_unitary(u)
    return OrbitMinimum(f, point, conv, restarts, total_iter, gnorm)


def _factor_local(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``u = ua (x) ub`` into SU(2) factors (exact for local unitaries)."""
    t = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    left, sv, right = np.linalg.svd(t)
    ua = (left[:, 0] * np.sqrt(sv[0])).reshape(2, 2)
    ub = (right[0, :] * np.sqrt(sv[0])).reshape(2, 2)
    da = np.linalg.det(ua)
    ua = ua / np.sqrt(da)
    ub = ub * np.sqrt(da)
    if np.linalg.det(ub).real < 0:
        ub = -1j * ub  # absorbs a global phase i into the product
    return ua, ub
