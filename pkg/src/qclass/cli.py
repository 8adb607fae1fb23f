"""Command-line entry point.

Exit codes: 0 success, 2 malformed input (JSON schema, argument syntax),
3 invalid density matrix, 4 kernel moduli outside their domain, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import __version__
from .config import Tolerances, tolerance_scope
from .ensemble import (
    CAPTION_KERNEL,
    FIGURES,
    ClassifyConfig,
    classify,
    estimate_ball_radius,
    estimate_fractions,
    figure_grids,
)
from .hermitian import ValidationError, as_hermitian, descending, eigvalsh, validate_density
from .io import SUMMARY_DIGITS, config_hash, csv_text, dumps, matrix_to_json, parse_state
from .kernel import (
    ModuliError,
    PairModuli,
    QuatritModuli,
    SWKernel,
    build_kernel,
    pair_spectrum,
    quatrit_spectrum,
    validate_kernel,
)
from .orbit import min_over_orbit
from .wigner import polytope_contains, polytope_vertices, wf_bounds
from .xstate import XState

EXIT_SCHEMA, EXIT_PHYSICS, EXIT_MODULI, EXIT_IO = 2, 3, 4, 5
SEED_ENV = "QCLASS_SEED"

# built-in defaults for every setting a config file may provide
DEFAULTS = {
    "seed": 0,
    "samples": 10000,
    "ensemble": "hs",
    "kernel": "pair:0,0",
    "grid_resolution": 64,
    "orbit_restarts": 20,
    "orbit_budget": 2000,
    "orbit_check": False,
    "c_plus": "polytope",
    "directions": 200,
    "bisection_tol": 1e-6,
    "kernel_family": "quatrit",
    "tolerances": {},
}
# settings that change how work is scheduled or where it lands, not the result
RUNTIME_KEYS = ("threads", "output_path")


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --- argument parsing -------------------------------------------------------


def parse_kernel(spec: str) -> SWKernel:
    """``pair:<d14>,<d23>``, ``quatrit:<pi1>,<pi2>`` or a kernel JSON file."""
    if ":" not in spec and os.path.exists(spec):
        obj = _load_json(spec)
        if not isinstance(obj, dict) or "kind" not in obj or "moduli" not in obj:
            raise CLIError(f"{spec}: kernel JSON needs fields 'kind' and 'moduli'", EXIT_SCHEMA)
        mod = obj["moduli"]
        if not isinstance(mod, list) or len(mod) != 2 or not all(isinstance(x, (int, float)) for x in mod):
            raise CLIError(f"{spec}: field 'moduli' must be two numbers", EXIT_SCHEMA)
        kind, a, b = obj["kind"], float(mod[0]), float(mod[1])
    else:
        kind, _, rest = spec.partition(":")
        parts = rest.split(",")
        try:
            a, b = (float(x) for x in parts)
        except ValueError:
            raise CLIError(
                f"kernel spec {spec!r} must look like pair:<d14>,<d23> or quatrit:<pi1>,<pi2>", EXIT_SCHEMA
            ) from None
    if kind not in ("pair", "quatrit"):
        raise CLIError(f"kernel kind must be 'pair' or 'quatrit', got {kind!r}", EXIT_SCHEMA)
    return build_kernel(kind, a, b)


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != n:
        raise CLIError(f"{what} must be {n} comma-separated numbers, got {text!r}", EXIT_SCHEMA)
    return vals


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", EXIT_SCHEMA) from None


def _tol_pair(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} needs a number, got {value!r}") from None


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=_seed, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    g.add_argument("--config", metavar="FILE", help="JSON config file; flags override its values")
    g.add_argument("--output", metavar="PATH", help="write the artifact here instead of stdout")
    g.add_argument("--threads", type=_positive, help="maximum worker processes (default 1)")
    g.add_argument(
        "--tol", type=_tol_pair, action="append", metavar="NAME=VALUE", help="override a numerical tolerance"
    )

    p = argparse.ArgumentParser(
        prog="qclass",
        description="Separability and Wigner-positivity classification of two-qubit states.",
    )
    p.add_argument("--version", action="version", version=f"qclass {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("classify", parents=[common], help="classify one state")
    c.add_argument("state", help="state JSON file (X-state fields or a 'matrix' entry)")
    c.add_argument("--kernel", help="kernel spec, e.g. pair:0,0 (default pair:0,0)")
    c.add_argument("--orbit-check", action="store_true", default=None, help="also minimise over the local orbit")
    c.add_argument("--c-plus", choices=["polytope", "lu_orbit"], help="predicate used for Wigner positivity")
    c.add_argument("--restarts", type=_positive, help="orbit restarts (default 20)")

    k = sub.add_parser("kernel", parents=[common], help="build and validate a kernel")
    k.add_argument("kind", choices=["pair", "quatrit"])
    k.add_argument("a", type=float, help="d14 (pair) or pi1 (quatrit)")
    k.add_argument("b", type=float, help="d23 (pair) or pi2 (quatrit)")

    y = sub.add_parser("polytope", parents=[common], help="vertices of the Wigner-positivity polytope")
    y.add_argument("--kernel", help="kernel spec (default: the reference spectrum 0.94, 0.93, 0.51, -1.38)")
    y.add_argument("--spectrum", metavar="P1,P2,P3,P4", help="kernel spectrum given directly")
    y.add_argument("--point", metavar="R1,R2,R3,R4", help="also test this state spectrum for membership")

    m = sub.add_parser("minimize", parents=[common], help="minimise the Wigner function over an orbit")
    m.add_argument("state", help="state JSON file")
    m.add_argument("--kernel", help="kernel spec (default pair:0,0)")
    m.add_argument("--group", choices=["LU", "full"], default="full", help="orbit group (default full)")
    m.add_argument("--restarts", type=_positive, help="multistart count (default 20)")
    m.add_argument("--budget", type=_positive, help="iterations per start (default 2000)")

    s = sub.add_parser("sample", parents=[common], help="Monte Carlo fractions over an ensemble")
    s.add_argument("--n", type=_positive, help="number of samples (default 10000)")
    s.add_argument("--ensemble", choices=["hs", "xstate"], help="state ensemble (default hs)")
    s.add_argument("--kernel", help="kernel spec (default pair:0,0)")
    s.add_argument("--orbit-check", action="store_true", default=None, help="also run the local-orbit test")
    s.add_argument("--c-plus", choices=["polytope", "lu_orbit"], help="predicate used for Wigner positivity")
    s.add_argument("--restarts", type=_positive, help="orbit restarts (default 20)")

    r = sub.add_parser("radius", parents=[common], help="inscribed-ball radius around I/4")
    r.add_argument("--property", choices=["separability", "absolute_classicality"], required=True)
    r.add_argument("--directions", type=_positive, help="random directions (default 200)")
    r.add_argument("--bisection-tol", type=float, help="bisection tolerance (default 1e-6)")
    r.add_argument("--resolution", type=_positive, help="kernel scan resolution (default 64)")
    r.add_argument("--kernel-family", choices=["quatrit", "pair"], help="kernels scanned (default quatrit)")

    f = sub.add_parser("figures", parents=[common], help="CSV data behind the figures")
    f.add_argument("figure", choices=FIGURES)
    f.add_argument("--resolution", type=_positive, help="grid resolution (default 64)")
    f.add_argument("--spectrum", metavar="P1,P2,P3,P4", help="kernel spectrum for fig2_right")
    return p


# --- configuration ----------------------------------------------------------


class Settings:
    """Resolved run configuration with the origin of every value."""

    def __init__(self, args: argparse.Namespace, file_cfg: dict):
        self.args, self.file_cfg = args, file_cfg
        self.values: dict = {}
        self.sources: dict = {}

    def get(self, key: str, flag: str | None = None):
        flag = flag or key
        val = getattr(self.args, flag, None)
        if val is not None:
            src = "flag"
        elif key in self.file_cfg:
            val, src = self.file_cfg[key], "file"
        elif key == "seed" and os.environ.get(SEED_ENV):
            try:
                val, src = _seed(os.environ[SEED_ENV]), "env"
            except argparse.ArgumentTypeError as exc:
                raise CLIError(f"${SEED_ENV}: {exc}", EXIT_SCHEMA) from None
        else:
            val, src = DEFAULTS[key], "default"
        self.values[key], self.sources[key] = val, src
        return val

    def metadata(self, command: str) -> dict:
        cfg = {k: v for k, v in self.values.items() if k not in RUNTIME_KEYS}
        return {
            "command": command,
            "seed": self.values.get("seed"),
            "config": cfg,
            "config_sources": {k: v for k, v in self.sources.items() if k not in RUNTIME_KEYS},
            "config_hash": config_hash({"command": command, **cfg}),
            "versions": module_versions(),
        }


def module_versions() -> dict:
    out = {"qclass": __version__, "numpy": np.__version__}
    try:
        out["scipy"] = version("scipy")
    except PackageNotFoundError:
        pass
    return out


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise CLIError(f"{path}: config must be a JSON object", EXIT_SCHEMA)
    unknown = set(obj) - set(DEFAULTS) - set(RUNTIME_KEYS)
    if unknown:
        raise CLIError(f"{path}: unknown config field(s): {', '.join(sorted(unknown))}", EXIT_SCHEMA)
    return obj


def _tolerances(settings: Settings) -> dict:
    tol = dict(settings.file_cfg.get("tolerances", {}))
    tol.update(dict(settings.args.tol or []))
    unknown = set(tol) - set(Tolerances.__dataclass_fields__)
    if unknown:
        raise CLIError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}", EXIT_SCHEMA)
    settings.values["tolerances"] = tol
    settings.sources["tolerances"] = "flag" if settings.args.tol else ("file" if "tolerances" in settings.file_cfg else "default")
    return tol


# --- commands ---------------------------------------------------------------


def _load_state(path: str):
    obj = _load_json(path)
    try:
        state = parse_state(obj)
    except (KeyError, TypeError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise CLIError(f"{path}: {msg}", EXIT_SCHEMA) from None
    if isinstance(state, XState):
        state.validate()
        return state
    if state.shape != (4, 4):
        raise CLIError(f"{path}: field 'matrix' must be 4x4, got {state.shape[0]}x{state.shape[1]}", EXIT_SCHEMA)
    return validate_density(as_hermitian(state, dim=4))


def _state_matrix(state) -> np.ndarray:
    return state.matrix() if isinstance(state, XState) else state


def cmd_classify(args, st: Settings):
    kernel = parse_kernel(st.get("kernel"))
    cfg = ClassifyConfig(
        orbit_check=bool(st.get("orbit_check")),
        c_plus=st.get("c_plus"),
        orbit_restarts=st.get("orbit_restarts", "restarts"),
        orbit_seed=st.get("seed"),
    )
    state = _load_state(args.state)
    res = classify(state, kernel, cfg).to_json()
    res["kernel"] = kernel.to_json()
    summary = f"separable={res['separable']} doubly_classical={res['doubly_classical']}"
    return res, summary


def cmd_kernel(args, st: Settings):
    k = build_kernel(args.kind, args.a, args.b)
    if args.kind == "pair":
        raw = pair_spectrum(PairModuli(args.a, args.b))
    else:
        raw = quatrit_spectrum(QuatritModuli(args.a, args.b))
    resid = validate_kernel(k)
    res = {
        **k.to_json(),
        "matrix": matrix_to_json(k.matrix),
        "spectrum_raw": raw,
        "spectrum_sorted": descending(raw),
        "residuals": resid.to_json(),
    }
    summary = "spectrum " + " ".join(f"{x:.{SUMMARY_DIGITS}g}" for x in descending(raw))
    return res, summary


def cmd_polytope(args, st: Settings):
    if args.spectrum:
        pi = np.array(_floats(args.spectrum, 4, "--spectrum"))
        ref = {"spectrum": pi}
    elif args.kernel or "kernel" in st.file_cfg:
        k = parse_kernel(st.get("kernel"))
        pi, ref = k.spectrum, k.to_json()
    else:
        pi = np.array(CAPTION_KERNEL)
        ref = {"spectrum": pi}
    poly = polytope_vertices(pi)
    res = {"kernel": ref, "kernel_spectrum": poly.kernel_spectrum, "vertices": poly.vertices}
    if args.point:
        r = _floats(args.point, 4, "--point")
        b = wf_bounds(r, pi)
        res["point"] = {"spectrum": r, "contains": polytope_contains(r, pi), "lower": b.lower, "upper": b.upper}
    return res, f"{len(poly.vertices)} vertices"


def cmd_minimize(args, st: Settings):
    kernel = parse_kernel(st.get("kernel"))
    state = _load_state(args.state)
    rho = _state_matrix(state)
    out = min_over_orbit(
        rho,
        kernel,
        args.group,
        restarts=st.get("orbit_restarts", "restarts"),
        budget=st.get("orbit_budget", "budget"),
        seed=st.get("seed"),
    )
    res = out.to_json()
    res["group"] = args.group
    res["analytic_lower_bound"] = wf_bounds(eigvalsh(rho), kernel.spectrum).lower
    return res, f"min {out.min_value:.{SUMMARY_DIGITS}g} (converged={out.converged})"


def cmd_sample(args, st: Settings):
    kernel = parse_kernel(st.get("kernel"))
    cfg = ClassifyConfig(
        orbit_check=bool(st.get("orbit_check")),
        c_plus=st.get("c_plus"),
        orbit_restarts=st.get("orbit_restarts", "restarts"),
        orbit_seed=st.get("seed"),
    )
    rep = estimate_fractions(
        st.get("samples", "n"), st.get("ensemble"), kernel, st.get("seed"), cfg, workers=args.threads or 1
    )
    fr = " ".join(f"{k}={v:.{SUMMARY_DIGITS}g}" for k, v in rep.fractions.items())
    return rep.to_json(), fr


def cmd_radius(args, st: Settings):
    est = estimate_ball_radius(
        args.property,
        n_directions=st.get("directions"),
        bisection_tol=st.get("bisection_tol"),
        kernel_scan_resolution=st.get("grid_resolution", "resolution"),
        seed=st.get("seed"),
        kernel_family=st.get("kernel_family"),
    )
    return est.to_json(), f"{args.property} radius_hs={est.radius_hs:.{SUMMARY_DIGITS}g}"


def cmd_figures(args, st: Settings):
    spec = _floats(args.spectrum, 4, "--spectrum") if args.spectrum else None
    header, rows = figure_grids(args.figure, st.get("grid_resolution", "resolution"), spec)
    return (header, rows), f"{args.figure}: {len(rows)} rows"


COMMANDS = {
    "classify": cmd_classify,
    "kernel": cmd_kernel,
    "polytope": cmd_polytope,
    "minimize": cmd_minimize,
    "sample": cmd_sample,
    "radius": cmd_radius,
    "figures": cmd_figures,
}


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        st = Settings(args, _read_config(args.config))
        st.get("seed")
        tol = _tolerances(st)
        with tolerance_scope(tol):
            payload, summary = COMMANDS[args.command](args, st)
        meta = st.metadata(args.command)
        if args.command == "figures":
            header, rows = payload
            text = csv_text(header, rows)
        else:
            text = dumps({**payload, "metadata": meta}) + "\n"
        if args.output:
            _write(args.output, text)
            if args.command == "figures":
                _write(args.output + ".meta.json", dumps(meta) + "\n")
            print(f"{args.output}: {summary}")
        else:
            sys.stdout.write(text)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ModuliError as exc:
        print(f"error: moduli out of domain ({exc.bound}): {exc}", file=sys.stderr)
        return EXIT_MODULI
    except ValidationError as exc:
        print(f"error: invalid state: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
