"""Small fixed-size Hermitian linear algebra for one- and two-qubit operators.

Matrices are plain complex ``numpy`` arrays of shape (2, 2) or (4, 4).  The
two-qubit basis ordering is |00>, |01>, |10>, |11>, i.e. ``kron(A, B)``.
"""

from __future__ import annotations

import math

import numpy as np

from .config import TOL


class ValidationError(ValueError):
    """Input violates a physical or structural invariant."""


def as_hermitian(m, dim: int | None = None, tol: float = TOL.hermiticity) -> np.ndarray:
    """Return ``m`` as a complex array after checking it is Hermitian.

    Raises ValidationError naming the first offending entry pair.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise ValidationError(f"expected a 2x2 or 4x4 matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValidationError(f"expected dimension {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise ValidationError(f"non-finite entry at ({i}, {j})")
    diag_im = np.abs(a.diagonal().imag)
    if diag_im.max() > tol:
        i = int(np.argmax(diag_im))
        raise ValidationError(f"diagonal entry ({i}, {i}) has imaginary part {a[i, i].imag:.3e}")
    asym = np.triu(np.abs(a - a.conj().T), 1)
    if asym.max() > tol:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise ValidationError(
            f"entries ({i}, {j}) and ({j}, {i}) are not conjugate: {a[i, j]} vs {a[j, i]}"
        )
    return a


def _jacobi_sweeps(a: list, v: list | None, n: int, max_sweeps: int) -> None:
    # Cyclic complex Jacobi on nested lists: a <- J^H a J, v <- v J per pivot.
    # With v=None only eigenvalues are produced.
    scale = max(abs(x) for row in a for x in row) or 1e-300
    for _ in range(max_sweeps):
        off = sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(i + 1, n))
        if off <= (1e-17 * scale) ** 2:
            return
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p][q]
                b = abs(g)
                if b <= 1e-18 * scale:
                    continue
                ec = (g / b).conjugate()
                tau = (a[q][q].real - a[p][p].real) / (2.0 * b)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # J restricted to (p, q): [[c, s], [-s ec, c ec]]
                j10 = -s * ec
                j11 = c * ec
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = akp * c + akq * j10
                    a[k][q] = akp * s + akq * j11
                if v is not None:
                    for k in range(n):
                        vkp, vkq = v[k][p], v[k][q]
                        v[k][p] = vkp * c + vkq * j10
                        v[k][q] = vkp * s + vkq * j11
                j10c = j10.conjugate()
                j11c = j11.conjugate()
                rp, rq = a[p], a[q]
                for k in range(n):
                    apk, aqk = rp[k], rq[k]
                    rp[k] = c * apk + j10c * aqk
                    rq[k] = s * apk + j11c * aqk
                a[p][q] = a[q][p] = 0j


def _normalize_phases(v: np.ndarray) -> np.ndarray:
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            v[:, k] = col / ph
    return v


def eigh(m, max_sweeps: int = 50, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(w, V)`` with ``w`` sorted descending and ``m = V diag(w) V^H``.
    The first non-negligible component of each eigenvector is made real
    positive so the output is deterministic.
    """
    arr = as_hermitian(m) if check else np.asarray(m, dtype=complex)
    n = arr.shape[0]
    a = arr.tolist()
    v = np.eye(n, dtype=complex).tolist()
    _jacobi_sweeps(a, v, n, max_sweeps)
    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(-w, kind="stable")
    return w[order], _normalize_phases(np.array(v)[:, order])


def eigh_4(m) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi eigendecomposition restricted to 4x4 input."""
    return eigh(as_hermitian(m, dim=4))


def eigvalsh(m, check: bool = True) -> np.ndarray:
    """Eigenvalues only, descending; skips eigenvector accumulation."""
    arr = as_hermitian(m) if check else np.asarray(m, dtype=complex)
    n = arr.shape[0]
    a = arr.tolist()
    _jacobi_sweeps(a, None, n, 50)
    return np.sort(np.array([a[i][i].real for i in range(n)]))[::-1]


def block_eig_2x2(a: float, d: float, c: complex) -> tuple[float, float, float, float]:
    """Closed-form eigensystem of ``[[a, c], [conj(c), d]]``.

    Returns ``(lam_plus, lam_minus, mixing_angle, phase)`` where the block
    equals ``mean + half_gap * [[cos t, sin t e^{i phase}], [., -cos t]]``
    with ``t`` the mixing angle in [0, pi] and ``phase = arg(c)`` in [0, 2 pi).
    """
    c = complex(c)
    mean = 0.5 * (a + d)
    r = abs(c)
    half_gap = math.hypot(0.5 * (a - d), r)
    mixing = math.atan2(2.0 * r, a - d) if (r > 0.0 or a != d) else 0.0
    phase = math.atan2(c.imag, c.real) % (2.0 * math.pi) if r > 0.0 else 0.0
    if phase >= 2.0 * math.pi:  # a tiny negative angle rounds up to 2 pi
        phase = 0.0
    return mean + half_gap, mean - half_gap, mixing, phase


def partial_transpose(m, subsystem: str = "B") -> np.ndarray:
    """Partial transpose of a two-qubit operator on subsystem ``"A"`` or ``"B"``."""
    a = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    if subsystem == "B":
        out = a.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        out = a.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return out.reshape(4, 4).copy()


def partial_trace(m, keep: str = "A") -> np.ndarray:
    a = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", a)
    if keep == "B":
        return np.einsum("ijil->jl", a)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def tensor_product(x, y) -> np.ndarray:
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def hs_distance(x, y) -> float:
    """Hilbert-Schmidt (Frobenius) distance between two matrices."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.linalg.norm(x - y))


def validate_density(m, tol: float = TOL.simplex) -> np.ndarray:
    """Check that ``m`` is a unit-trace positive semidefinite Hermitian matrix."""
    a = as_hermitian(m)
    tr = a.trace().real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"trace is {tr:.12g}; residual {tr - 1.0:+.3e} exceeds {tol:g}")
    lam_min = eigvalsh(a, check=False)[-1]
    if lam_min < -tol:
        raise ValidationError(f"not positive semidefinite: minimum eigenvalue {lam_min:.3e}")
    return a


def descending(x) -> np.ndarray:
    return np.sort(np.asarray(x, dtype=float))[::-1]


def ascending(x) -> np.ndarray:
    return np.sort(np.asarray(x, dtype=float))
