"""Stratonovich-Weyl kernels of a four-level system.

Two families are built here.  Quatrit kernels are only required to have a
spectrum with sum 1 and sum of squares 4.  Two-qubit kernels must also have
partially reduced kernels with ``tr(Delta_A^2) = tr(Delta_B^2) = 2``; their
X-shaped representatives are parameterized by the off-diagonal moduli
``d14 = |Delta_14|`` and ``d23 = |Delta_23|``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .hermitian import as_hermitian, descending, eigvalsh, partial_trace

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
D14_MAX = 3.0 / (2.0 * SQRT2)
# extreme kernel eigenvalues allowed by sum 1 and sum of squares 4
PI_MIN = (1.0 - 3.0 * math.sqrt(5.0)) / 4.0
PI_MAX = (1.0 + 3.0 * math.sqrt(5.0)) / 4.0


class ModuliError(ValueError):
    """Kernel moduli fall outside their admissible domain.

    ``bound`` names the violated inequality and ``limit`` holds the value it
    was compared against (``nan`` when the limit is undefined).
    """

    def __init__(self, message: str, bound: str, limit: float):
        super().__init__(message)
        self.bound = bound
        self.limit = limit


@dataclass(frozen=True)
class QuatritModuli:
    pi1: float
    pi2: float

    @property
    def disc(self) -> float:
        return discriminant(self.pi1, self.pi2)


@dataclass(frozen=True)
class PairModuli:
    d14: float
    d23: float

    @property
    def delta(self) -> float:
        return math.hypot(self.d14, self.d23)

    def d23_limit(self) -> float:
        """Upper bound on ``d23`` at this ``d14`` (nan past the ``d14`` bound)."""
        arg = 9.0 - 8.0 * self.d14**2
        return math.sqrt(arg) / (2.0 * SQRT2) if arg >= 0 else float("nan")

    def validate(self, tol: float = TOL.boundary) -> "PairModuli":
        if not (math.isfinite(self.d14) and math.isfinite(self.d23)):
            raise ModuliError("moduli must be finite", "finite", float("nan"))
        if self.d14 < -tol or self.d23 < -tol:
            raise ModuliError("moduli are absolute values and must be >= 0", "nonnegative", 0.0)
        if self.d14 > D14_MAX + tol:
            raise ModuliError(
                f"|Delta14| = {self.d14:.9g} exceeds 3/(2 sqrt 2) = {D14_MAX:.9g}", "d14", D14_MAX
            )
        lim = self.d23_limit()
        if self.d23 > lim + tol:
            raise ModuliError(
                f"|Delta23| = {self.d23:.9g} exceeds sqrt(9 - 8 |Delta14|^2)/(2 sqrt 2) = {lim:.9g}",
                "d23",
                lim,
            )
        return self

    def on_boundary(self, tol: float = TOL.boundary) -> bool:
        return abs(self.d14 - D14_MAX) <= tol or abs(self.d23 - self.d23_limit()) <= tol


@dataclass(frozen=True, eq=False)
class SWKernel:
    matrix: np.ndarray
    spectrum: np.ndarray  # descending
    kind: str  # "quatrit" | "pair"
    moduli: tuple[float, float] = field(default=(0.0, 0.0))

    @classmethod
    def from_matrix(cls, m, kind: str) -> "SWKernel":
        a = as_hermitian(m, dim=4)
        return cls(a, eigvalsh(a), kind)

    def to_json(self) -> dict:
        return {"kind": self.kind, "moduli": list(self.moduli)}


@dataclass(frozen=True)
class KernelResiduals:
    trace: float
    trace_sq: float
    reduced_a: float | None = None
    reduced_b: float | None = None
    tol: float = TOL.kernel_residual

    @property
    def passed(self) -> bool:
        vals = [self.trace, self.trace_sq, self.reduced_a, self.reduced_b]
        return all(v <= self.tol for v in vals if v is not None)

    def to_json(self) -> dict:
        return {
            "trace": self.trace,
            "trace_sq": self.trace_sq,
            "reduced_a": self.reduced_a,
            "reduced_b": self.reduced_b,
            "passed": self.passed,
        }


def discriminant(pi1: float, pi2: float) -> float:
    return 7.0 + 2.0 * (pi1 + pi2 - pi1 * pi2) - 3.0 * (pi1**2 + pi2**2)


def quatrit_spectrum(m: QuatritModuli, tol: float = TOL.boundary) -> np.ndarray:
    """Return ``(pi1, pi2, pi3, pi4)`` with pi3 the plus root, pi4 the minus root."""
    disc = m.disc
    if disc < -tol:
        raise ModuliError(
            f"discriminant {disc:.9g} < 0 at (pi1, pi2) = ({m.pi1:.9g}, {m.pi2:.9g})", "disc", 0.0
        )
    root = math.sqrt(max(disc, 0.0))
    half = 0.5 * (1.0 - m.pi1 - m.pi2)
    return np.array([m.pi1, m.pi2, half + 0.5 * root, half - 0.5 * root])


def build_quatrit_kernel(m: QuatritModuli) -> SWKernel:
    pis = quatrit_spectrum(m)
    return SWKernel(np.diag(pis).astype(complex), descending(pis), "quatrit", (m.pi1, m.pi2))


def _q(m: PairModuli) -> float:
    return math.sqrt(max(9.0 - 8.0 * (m.d14**2 + m.d23**2), 0.0))


def pair_spectrum(m: PairModuli) -> np.ndarray:
    """Kernel eigenvalues in the labelling ``(pi1, pi2, pi3, pi4)``.

    pi1,3 = 1/4 +- d14 + q/4 and pi2,4 = (1 +- 2 sqrt(3 + 4 d23^2) - q)/4 with
    q = sqrt(9 - 8 delta^2).  These labels are not sorted in general; use
    :func:`descending` for the ordered view.
    """
    m.validate()
    q = _q(m)
    s = math.sqrt(3.0 + 4.0 * m.d23**2)
    return np.array(
        [
            0.25 + m.d14 + 0.25 * q,
            0.25 * (1.0 + 2.0 * s - q),
            0.25 - m.d14 + 0.25 * q,
            0.25 * (1.0 - 2.0 * s - q),
        ]
    )


def pair_diagonal(m: PairModuli) -> np.ndarray:
    q = _q(m)
    return np.array([(1 + q) / 4, (1 + 2 * SQRT3 - q) / 4, (1 - 2 * SQRT3 - q) / 4, (1 + q) / 4])


def build_pair_kernel(m: PairModuli) -> SWKernel:
    """Canonical X-shaped two-qubit kernel with real nonnegative off-diagonals.

    The diagonal is fixed by Delta11 = Delta44 and Delta22 - Delta33 = sqrt 3,
    i.e. Delta11 + Delta22 = (1 + sqrt 3)/2 and Delta11 + Delta33 = (1 - sqrt 3)/2.
    """
    m.validate()
    a = np.diag(pair_diagonal(m)).astype(complex)
    a[0, 3] = a[3, 0] = m.d14
    a[1, 2] = a[2, 1] = m.d23
    return SWKernel(a, descending(pair_spectrum(m)), "pair", (m.d14, m.d23))


def build_kernel(kind: str, a: float, b: float) -> SWKernel:
    if kind == "pair":
        return build_pair_kernel(PairModuli(a, b))
    if kind == "quatrit":
        return build_quatrit_kernel(QuatritModuli(a, b))
    raise ValueError(f"unknown kernel kind {kind!r}")


def pair_constraint_residuals(k: SWKernel) -> dict[str, float]:
    """Residuals of the four diagonal constraints of an X-shaped pair kernel."""
    d = k.matrix.diagonal().real
    delta2 = abs(k.matrix[0, 3]) ** 2 + abs(k.matrix[1, 2]) ** 2
    return {
        "sum": abs(d.sum() - 1.0),
        "sum_sq": abs((d**2).sum() - (4.0 - 2.0 * delta2)),
        "rows": abs((d[0] + d[1]) ** 2 + (d[2] + d[3]) ** 2 - 2.0),
        "cols": abs((d[0] + d[2]) ** 2 + (d[1] + d[3]) ** 2 - 2.0),
    }


def validate_kernel(k: SWKernel, tol: float = TOL.kernel_residual) -> KernelResiduals:
    """Report master-equation residuals of a kernel.

    The spectrum-level checks always run; reduced-kernel purity only for
    ``kind == "pair"``.
    """
    spec = np.asarray(k.spectrum, dtype=float)
    trace = float(abs(spec.sum() - 1.0))
    trace_sq = float(abs((spec**2).sum() - 4.0))
    if k.kind != "pair":
        return KernelResiduals(trace, trace_sq, tol=tol)
    da = partial_trace(k.matrix, keep="A")
    db = partial_trace(k.matrix, keep="B")
    ra = float(abs(np.trace(da @ da).real - 2.0))
    rb = float(abs(np.trace(db @ db).real - 2.0))
    return KernelResiduals(trace, trace_sq, ra, rb, tol=tol)


def reduced_purities(m) -> tuple[float, float]:
    """``(tr(Delta_A^2), tr(Delta_B^2))`` of a two-qubit operator."""
    da = partial_trace(m, keep="A")
    db = partial_trace(m, keep="B")
    return float(np.trace(da @ da).real), float(np.trace(db @ db).real)


def embed_pair_in_quatrit(m: PairModuli) -> QuatritModuli:
    """Quatrit moduli (two largest kernel eigenvalues) of a pair kernel."""
    s = descending(pair_spectrum(m))
    return QuatritModuli(float(s[0]), float(s[1]))


def pair_moduli_from_spectrum(spectrum, tol: float = 1e-9) -> PairModuli | None:
    """Find pair moduli whose kernel has the given eigenvalue multiset.

    A pair kernel splits its spectrum into an outer couple with sum
    (1 + q)/2 >= 1/2 and gap 2 d14, and an inner couple with gap
    sqrt(3 + 4 d23^2) >= sqrt 3.  Every split of the four values is tried.
    Returns ``None`` when no split fits.
    """
    vals = [float(x) for x in spectrum]
    for i, j in itertools.combinations(range(4), 2):
        k, l = (t for t in range(4) if t not in (i, j))
        x, y, u, v = vals[i], vals[j], vals[k], vals[l]
        q = 2.0 * (x + y) - 1.0
        gap2 = (u - v) ** 2
        if q < -tol or gap2 < 3.0 - tol:
            continue
        d14 = 0.5 * abs(x - y)
        d23 = 0.5 * math.sqrt(max(gap2 - 3.0, 0.0))
        cand = PairModuli(d14, d23)
        try:
            cand.validate(tol)
        except ModuliError:
            continue
        if np.allclose(np.sort(pair_spectrum(cand)), np.sort(vals), atol=1e-7):
            return cand
    return None


def in_pair_image(spectrum) -> bool:
    return pair_moduli_from_spectrum(spectrum) is not None


def quatrit_moduli_grid(resolution: int) -> np.ndarray:
    """Spectra of quatrit kernels on a uniform (pi1, pi2) grid with Disc >= 0.

    Rows are descending spectra; both roots of each admissible grid point are
    included once (as a multiset the two branches coincide).
    """
    g = np.linspace(PI_MIN, PI_MAX, resolution)
    p1, p2 = (x.ravel() for x in np.meshgrid(g, g, indexing="ij"))
    disc = 7.0 + 2.0 * (p1 + p2 - p1 * p2) - 3.0 * (p1**2 + p2**2)
    ok = disc >= 0.0
    p1, p2, root = p1[ok], p2[ok], np.sqrt(disc[ok])
    half = 0.5 * (1.0 - p1 - p2)
    spec = np.column_stack([p1, p2, half + 0.5 * root, half - 0.5 * root])
    return -np.sort(-spec, axis=1)


def pair_moduli_grid(resolution: int, include_boundary: bool = True) -> np.ndarray:
    """Uniform (d14, d23) grid clipped to the admissible region; rows ``(d14, d23)``."""
    g = np.linspace(0.0, D14_MAX, resolution)
    d14, d23 = (x.ravel() for x in np.meshgrid(g, g, indexing="ij"))
    lim = np.sqrt(np.maximum(9.0 - 8.0 * d14**2, 0.0)) / (2.0 * SQRT2)
    ok = d23 <= lim + (TOL.boundary if include_boundary else -TOL.boundary)
    return np.column_stack([d14[ok], np.minimum(d23[ok], lim[ok])])


def pair_spectra_grid(resolution: int) -> np.ndarray:
    rows = [descending(pair_spectrum(PairModuli(a, b))) for a, b in pair_moduli_grid(resolution)]
    return np.array(rows)
