"""Random states, joint classification and Monte Carlo estimates.

Random streams come from numpy's PCG64.  Work is split into fixed-size
chunks; chunk ``c`` of a run seeded with ``seed`` draws from
``SeedSequence(seed, spawn_key=(c,))``.  Chunk results are folded in chunk
order, so the output does not depend on how many worker processes ran.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from .config import TOL
from .hermitian import (
    ValidationError,
    descending,
    eigh,
    eigvalsh,
    partial_transpose,
    validate_density,
)
from .kernel import (
    PI_MAX,
    PI_MIN,
    SWKernel,
    discriminant,
    in_pair_image,
    pair_moduli_grid,
    pair_spectra_grid,
    pair_spectrum,
    PairModuli,
    quatrit_moduli_grid,
)
from .orbit import min_over_orbit
from .separability import absolutely_separable, absolutely_separable_sorted
from .wigner import ORDERED_SIMPLEX, polytope_vertices, wf_bounds
from .xstate import XParams, XState, x_from_params, x_to_params

CHUNK = 256
FLAGS = ("separable", "absolutely_separable", "polytope_positive", "lu_orbit_positive", "doubly_classical")
# reference kernel spectrum for the polytope figure; the last value closes the trace
CAPTION_KERNEL = (0.94, 0.93, 0.51, 1.0 - 0.94 - 0.93 - 0.51)
MAX_HS_RADIUS = math.sqrt(3.0) / 2.0


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def sample_hs_state(seed_or_rng) -> np.ndarray:
    """Hilbert-Schmidt random state ``G G^H / tr(G G^H)`` with Ginibre ``G``."""
    rng = _as_rng(seed_or_rng)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / rho.trace().real


def sample_x_state(seed_or_rng) -> XParams:
    """X state with a flat spectrum on the simplex and invariant block angles."""
    rng = _as_rng(seed_or_rng)
    e = rng.exponential(size=4)
    r = e / e.sum()
    r1, r2 = sorted(r[:2], reverse=True)
    r3, r4 = sorted(r[2:], reverse=True)
    phi1, phi2 = np.arccos(rng.uniform(-1.0, 1.0, size=2))
    psi1, psi2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    return XParams((r1, r2, r3, r4), float(phi1), float(phi2), float(psi1), float(psi2))


def random_direction(rng: np.random.Generator) -> np.ndarray:
    """Traceless Hermitian 4x4 matrix of unit Hilbert-Schmidt norm."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = 0.5 * (g + g.conj().T)
    h -= np.trace(h).real / 4.0 * np.eye(4)
    return h / np.linalg.norm(h)


@dataclass
class ClassifyConfig:
    orbit_check: bool = False
    c_plus: str = "polytope"  # or "lu_orbit"
    orbit_restarts: int = 8
    orbit_budget: int = 2000
    orbit_seed: int = 0


@dataclass(frozen=True)
class Classification:
    separable: bool
    absolutely_separable: bool
    polytope_positive: bool
    lu_orbit_positive: bool | None
    doubly_classical: bool
    ppt_margin: float = float("nan")
    wigner_lower: float = float("nan")
    wigner_upper: float = float("nan")
    lu_orbit_min: float | None = None

    def flags(self) -> dict[str, bool | None]:
        return {k: getattr(self, k) for k in FLAGS}

    def to_json(self) -> dict:
        return asdict(self)


def _state_and_spectrum(state) -> tuple[np.ndarray, np.ndarray, bool]:
    """Return (matrix, spectrum, absolutely-separable flag) for any state form."""
    if isinstance(state, XParams):
        xs = x_from_params(state)
        p = state
    elif isinstance(state, XState):
        xs = state
        p = x_to_params(state)
    else:
        rho = validate_density(state)
        spec = eigvalsh(rho, check=False)
        return rho, spec, bool(absolutely_separable_sorted(spec))
    rho = validate_density(xs.matrix())
    # an X state keeps the pairing of its own blocks
    return rho, np.array(p.r), bool(absolutely_separable(*p.r))


def classify(state, kernel: SWKernel, config: ClassifyConfig | None = None) -> Classification:
    """Joint separability / Wigner-positivity classification.

    ``state`` may be a density matrix, an :class:`XState` or :class:`XParams`.
    X states are tested for absolute separability on their own block pairing,
    dense matrices on the sorted spectrum.
    """
    cfg = config or ClassifyConfig()
    rho, spec, abs_sep = _state_and_spectrum(state)
    margin = float(eigvalsh(partial_transpose(rho), check=False)[-1])
    separable = margin >= -TOL.boundary
    bounds = wf_bounds(spec, kernel.spectrum)
    poly = bounds.lower >= -TOL.boundary
    lu_pos = None
    lu_min = None
    if cfg.orbit_check or cfg.c_plus == "lu_orbit":
        if kernel.kind != "pair":
            raise ValueError("the local-orbit check needs a pair kernel")
        res = min_over_orbit(
            rho, kernel, "LU", restarts=cfg.orbit_restarts, budget=cfg.orbit_budget, seed=cfg.orbit_seed
        )
        lu_min = res.min_value
        lu_pos = lu_min >= -1e-6
    c_plus = lu_pos if cfg.c_plus == "lu_orbit" else poly
    return Classification(
        bool(separable),
        abs_sep,
        bool(poly),
        lu_pos,
        bool(separable and c_plus),
        margin,
        bounds.lower,
        bounds.upper,
        lu_min,
    )


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float, float]:
    """Return ``(low, high, halfwidth)`` of the Wilson score interval."""
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half), half


@dataclass
class EnsembleReport:
    n_samples: int
    ensemble: str
    seed: int
    counts: dict[str, int]
    fractions: dict[str, float]
    intervals: dict[str, list[float]]
    wilson_halfwidth: float
    kernel: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _classify_chunk(args) -> dict[str, int]:
    seed, chunk, count, ensemble, kernel, cfg = args
    rng = chunk_rng(seed, chunk)
    tally = {k: 0 for k in FLAGS}
    for _ in range(count):
        state = sample_hs_state(rng) if ensemble == "hs" else sample_x_state(rng)
        c = classify(state, kernel, cfg)
        for k, v in c.flags().items():
            tally[k] += bool(v)
    return tally


def estimate_fractions(
    n: int,
    ensemble: str,
    kernel: SWKernel,
    seed: int,
    config: ClassifyConfig | None = None,
    workers: int = 1,
) -> EnsembleReport:
    """Classify ``n`` random states and report per-flag fractions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if ensemble not in ("hs", "xstate"):
        raise ValueError(f"ensemble must be 'hs' or 'xstate', got {ensemble!r}")
    cfg = config or ClassifyConfig()
    jobs = []
    for c, start in enumerate(range(0, n, CHUNK)):
        jobs.append((seed, c, min(CHUNK, n - start), ensemble, kernel, cfg))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_classify_chunk, jobs))
    else:
        tallies = [_classify_chunk(j) for j in jobs]
    counts = {k: 0 for k in FLAGS}
    for t in tallies:
        for k in FLAGS:
            counts[k] += t[k]
    if not cfg.orbit_check and cfg.c_plus != "lu_orbit":
        counts.pop("lu_orbit_positive")
    fractions, intervals, widest = {}, {}, 0.0
    for k, v in counts.items():
        lo, hi, half = wilson_interval(v, n)
        fractions[k] = v / n
        intervals[k] = [lo, hi]
        widest = max(widest, half)
    return EnsembleReport(
        n, ensemble, seed, counts, fractions, intervals, widest, kernel.to_json()
    )


# --- ball radii -------------------------------------------------------------


@dataclass
class RadiusEstimate:
    property: str
    radius_hs: float
    directions_tested: int
    bisection_tol: float
    kernel_family: str | None = None
    kernel_count: int | None = None
    worst_direction_eigenvalues: list[float] = field(default_factory=list)
    quoted_convention: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _quoted_convention(prop: str, radius: float, n: int = 4) -> dict:
    # Closed-form ball radii quoted in the literature for dimension n and the
    # rescaling sqrt(n / (n - 1)) that maps HS radii onto them.
    scale = math.sqrt(n / (n - 1))
    quoted = 1.0 / (n - 1) if prop == "separability" else math.sqrt(n + 1) / (n * n - 1)
    return {
        "quoted_value": quoted,
        "hs_to_quoted_scale": scale,
        "radius_rescaled": radius * scale,
        "hs_closed_form": quoted / scale,
    }


class _Predicate:
    """Membership test along rays ``I/4 + t D`` plus a descent direction."""

    def __init__(self, prop: str, kernel_spectra: np.ndarray | None = None):
        self.prop = prop
        if kernel_spectra is not None:
            self.pi_asc = np.sort(np.asarray(kernel_spectra), axis=1)
        else:
            self.pi_asc = None

    def __call__(self, rho: np.ndarray) -> bool:
        lam = eigvalsh(rho)
        if lam[-1] < -TOL.boundary:
            return False
        if self.prop == "separability":
            return eigvalsh(partial_transpose(rho), check=False)[-1] >= -TOL.boundary
        return bool((self.pi_asc @ lam).min() >= -TOL.boundary)

    def active_gradient(self, rho: np.ndarray) -> np.ndarray:
        """Gradient (w.r.t. the direction) of the most nearly violated constraint."""
        lam, vec = eigh(rho)
        scores = [(lam[-1], np.outer(vec[:, -1], vec[:, -1].conj()))]
        if self.prop == "separability":
            w, wv = eigh(partial_transpose(rho))
            p = np.outer(wv[:, -1], wv[:, -1].conj())
            scores.append((w[-1], partial_transpose(p)))
        else:
            vals = self.pi_asc @ lam
            k = int(np.argmin(vals))
            grad = sum(self.pi_asc[k, i] * np.outer(vec[:, i], vec[:, i].conj()) for i in range(4))
            scores.append((vals[k], grad))
        return min(scores, key=lambda s: s[0])[1]


def _bisect(pred: _Predicate, d: np.ndarray, tol: float, t_max: float = MAX_HS_RADIUS) -> float:
    centre = np.eye(4) / 4.0
    lo, hi = 0.0, t_max
    if pred(centre + hi * d):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(centre + mid * d):
            lo = mid
        else:
            hi = mid
    return lo


def _tangent(d: np.ndarray, grad: np.ndarray) -> np.ndarray:
    g = grad - np.trace(grad).real / 4.0 * np.eye(4)
    g -= np.vdot(d, g).real * d
    return g


def absolute_classicality_spectra(family: str, resolution: int) -> np.ndarray:
    if family == "quatrit":
        return quatrit_moduli_grid(resolution)
    if family == "pair":
        return pair_spectra_grid(resolution)
    raise ValueError(f"kernel family must be 'quatrit' or 'pair', got {family!r}")


def estimate_ball_radius(
    prop: str,
    n_directions: int = 200,
    bisection_tol: float = 1e-6,
    kernel_scan_resolution: int = 64,
    seed: int = 0,
    kernel_family: str = "quatrit",
    refine_top: int = 3,
    refine_steps: int = 40,
) -> RadiusEstimate:
    """Inscribed-ball radius around I/4 in Hilbert-Schmidt distance.

    Each random unit traceless direction is bisected for the largest ``t``
    keeping ``I/4 + t D`` a valid state with the property.  The best few
    directions are then pushed along the gradient of their active
    constraint, keeping a step only if the bisected radius shrinks.  The
    minimum over every direction tried is returned.
    """
    if n_directions < 1:
        raise ValueError("n_directions must be >= 1")
    if prop == "separability":
        pred = _Predicate(prop)
        family, n_kernels = None, None
    elif prop == "absolute_classicality":
        spectra = absolute_classicality_spectra(kernel_family, kernel_scan_resolution)
        pred = _Predicate(prop, spectra)
        family, n_kernels = kernel_family, len(spectra)
    else:
        raise ValueError(f"unknown property {prop!r}")
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(n_directions):
        d = random_direction(rng)
        found.append((_bisect(pred, d, bisection_tol), d))
    tested = n_directions
    found.sort(key=lambda x: x[0])
    for t, d in found[:refine_top]:
        eta = 0.5
        for _ in range(refine_steps):
            grad = pred.active_gradient(np.eye(4) / 4.0 + t * d)
            cand = d - eta * _tangent(d, grad)
            cand -= np.trace(cand).real / 4.0 * np.eye(4)
            cand /= np.linalg.norm(cand)
            tc = _bisect(pred, cand, bisection_tol)
            tested += 1
            if tc < t:
                t, d = tc, cand
            else:
                eta *= 0.5
                if eta < 1e-6:
                    break
        found.append((t, d))
    t_best, d_best = min(found, key=lambda x: x[0])
    return RadiusEstimate(
        prop,
        float(t_best),
        tested,
        bisection_tol,
        family,
        n_kernels,
        [float(x) for x in eigvalsh(0.5 * (d_best + d_best.conj().T))],
        _quoted_convention(prop, float(t_best)),
    )


# --- figure data ------------------------------------------------------------

FIGURES = ("fig1_right", "fig2_left", "fig2_right", "moduli_scan")


def ordered_simplex_grid(resolution: int) -> np.ndarray:
    """Points ``sum_k w_k V_k`` with integer barycentric weights summing to ``resolution``."""
    n = resolution
    rows = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            for k in range(n + 1 - i - j):
                l = n - i - j - k
                rows.append(np.array([i, j, k, l]) @ ORDERED_SIMPLEX / n)
    return np.array(rows)


def moduli_row(pi1: float, pi2: float) -> list:
    """``[pi1, pi2, disc, in_P4, in_P2x2]`` for one quatrit moduli point."""
    disc = discriminant(pi1, pi2)
    inside = disc >= 0.0
    pair = False
    if inside:
        half = 0.5 * (1.0 - pi1 - pi2)
        root = 0.5 * math.sqrt(disc)
        pair = in_pair_image([pi1, pi2, half + root, half - root])
    return [float(pi1), float(pi2), float(disc), bool(inside), bool(pair)]


def figure_grids(which: str, resolution: int = 32, kernel_spectrum=None) -> tuple[list[str], list[list]]:
    """Tabular data behind the figures: ``(header, rows)``."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if which == "fig1_right":
        header = ["r1", "r2", "r3", "r4", "absolutely_separable"]
        rows = [[*map(float, r), bool(absolutely_separable(*r))] for r in ordered_simplex_grid(resolution)]
        return header, rows
    if which == "fig2_left":
        header = ["pi1", "pi2", "disc", "in_P4", "in_P2x2"]
        g = np.linspace(PI_MIN, PI_MAX, resolution)
        return header, [moduli_row(a, b) for a in g for b in g]
    if which == "moduli_scan":
        header = ["d14", "d23", "pi1", "pi2", "disc", "in_P4"]
        rows = []
        for d14, d23 in pair_moduli_grid(resolution):
            s = descending(pair_spectrum(PairModuli(d14, d23)))
            disc = discriminant(s[0], s[1])
            rows.append([float(d14), float(d23), float(s[0]), float(s[1]), float(disc), bool(disc >= -1e-10)])
        return header, rows
    if which == "fig2_right":
        pi = CAPTION_KERNEL if kernel_spectrum is None else kernel_spectrum
        header = ["r1", "r2", "r3", "r4"]
        return header, [list(map(float, v)) for v in polytope_vertices(pi).vertices]
    raise ValueError(f"unknown figure {which!r}; choose from {', '.join(FIGURES)}")


__all__ = [
    "CAPTION_KERNEL",
    "Classification",
    "ClassifyConfig",
    "EnsembleReport",
    "FIGURES",
    "RadiusEstimate",
    "ValidationError",
    "classify",
    "estimate_ball_radius",
    "estimate_fractions",
    "figure_grids",
    "sample_hs_state",
    "sample_x_state",
    "wilson_interval",
]
