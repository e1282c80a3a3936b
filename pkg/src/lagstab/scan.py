"""Command-line front end: parameter-plane scans, curves, indices, verification.

Subcommands
-----------
scan       classify the monodromy over a (beta, e) grid; writes CSV + PPM raster
curves     trace the degeneracy/hyperbolicity curves over the e grid; CSV + overlay
index      print the omega-index of one (beta, e, omega) by both methods
monodromy  integrate one (beta, e) and print the endpoint and its classification
verify     run the acceptance suite; JSON-lines report, nonzero exit on failure

Configuration is a flat ``key=value`` text file (# comments allowed); every
key is optional.  Defaults::

    beta_min=0  beta_max=9  beta_steps=46
    e_min=0     e_max=0.9   e_steps=19
    class_tol=1e-6  rel_tol=1e-11  abs_tol=1e-12
    n_modes=128     bisection_tol=1e-6
    threads=0       (0 = all cores)
    out_dir=out     cache_dir=cache
    index_layer=0   (1 = also write the i_-1 PGM layer)
    fan_thetas=     (comma-separated omega angles for the degeneracy fan)

Exit codes: 0 ok, 1 verification criterion failed, 2 usage error,
3 numerical failure.

Scan outputs are deterministic: rows are ordered by (e index, beta index)
and floats are written with 17 significant digits, so identical configs
produce byte-identical CSV regardless of thread count.  Completed scans
are cached under ``cache_dir`` keyed by a sha256 digest of the canonical
config text; cache writes are atomic (write temp, then rename).
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .curves import (
    LABEL_GAMMA_K,
    CurveTable,
    gamma_k,
    minus_one_curves,
    omega_fan,
    write_curve_csv,
)
from .indices import omega_index_from_operator, omega_index_from_path
from .model import Params
from .monodromy import IntegratorOptions, integrate_gamma, write_path_csv
from .spectral import assemble_A, morse_and_nullity
from .symplectic import classify

CLASS_COLORS = {
    "EE": (0, 160, 0),
    "EH": (255, 210, 0),
    "HH": (40, 90, 220),
    "CS": (220, 30, 30),
    "DEGENERATE": (0, 0, 0),
    "ERR": (128, 128, 128),
}

CURVE_COLORS = {
    "GAMMA_S": (0, 120, 0),
    "GAMMA_M": (230, 120, 0),
    "GAMMA_K": (120, 0, 160),
    "E1": (0, 0, 0),
    "E2": (90, 90, 90),
    "BETA1": (0, 0, 255),
    "BETA2": (255, 0, 0),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ScanConfig:
    beta_min: float = 0.0
    beta_max: float = 9.0
    beta_steps: int = 46
    e_min: float = 0.0
    e_max: float = 0.9
    e_steps: int = 19
    class_tol: float = 1e-6
    rel_tol: float = 1e-11
    abs_tol: float = 1e-12
    n_modes: int = 128
    bisection_tol: float = 1e-6
    threads: int = 0
    out_dir: str = "out"
    cache_dir: str = "cache"
    index_layer: int = 0
    fan_thetas: str = ""

    def __post_init__(self):
        if not (0.0 <= self.beta_min < self.beta_max <= 9.0):
            raise UsageError(
                f"beta range [{self.beta_min}, {self.beta_max}] must sit in [0, 9]"
            )
        if not (-0.99 < self.e_min < self.e_max < 0.99):
            raise UsageError(
                f"e range [{self.e_min}, {self.e_max}] must sit in (-0.99, 0.99)"
            )
        if self.beta_steps < 2 or self.e_steps < 2:
            raise UsageError("beta_steps and e_steps must be at least 2")

    @classmethod
    def from_file(cls, path: str) -> "ScanConfig":
        values = {}
        casts = {f.name: type(f.default) for f in fields(cls)}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, _, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if key not in casts:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    values[key] = casts[key](val)
                except ValueError as exc:
                    raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}")
        return cls(**values)

    def canonical_text(self) -> str:
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            val = getattr(self, f.name)
            if isinstance(val, float):
                parts.append(f"{f.name}={val:.17g}")
            else:
                parts.append(f"{f.name}={val}")
        return "\n".join(parts) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def beta_grid(self) -> np.ndarray:
        return np.linspace(self.beta_min, self.beta_max, self.beta_steps)

    def e_grid(self) -> np.ndarray:
        return np.linspace(self.e_min, self.e_max, self.e_steps)

    def integrator(self) -> IntegratorOptions:
        return IntegratorOptions(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def worker_count(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class RegionGrid:
    """Per-cell classification of a parameter-plane scan."""

    config: ScanConfig
    classes: tuple          # e_steps rows, beta_steps entries each
    eigenvalues: tuple      # same shape, 4 complex values per cell (nan on ERR)
    i_minus_one: tuple | None = None


def _atomic_write(path: str, data: bytes) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_ppm(path: str, pixels: np.ndarray) -> None:
    """Binary P6 image from an (h, w, 3) uint8 array."""
    h, w, _ = pixels.shape
    _atomic_write(path, b"P6\n%d %d\n255\n" % (w, h) + pixels.tobytes())


def write_pgm(path: str, pixels: np.ndarray) -> None:
    """Binary P5 image from an (h, w) uint8 array."""
    h, w = pixels.shape
    _atomic_write(path, b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes())


def _classify_cell(beta: float, e: float, opts: IntegratorOptions, class_tol: float):
    try:
        endpoint = integrate_gamma(Params(beta, e), opts).endpoint
        report = classify(endpoint, class_tol)
        return report.stability_class, tuple(report.eigenvalues)
    except Exception:
        nan = complex(float("nan"), float("nan"))
        return "ERR", (nan, nan, nan, nan)


def _scan_cells(config: ScanConfig):
    betas = config.beta_grid()
    es = config.e_grid()
    opts = config.integrator()
    cells = [(ie, ib) for ie in range(len(es)) for ib in range(len(betas))]
    results = [None] * len(cells)
    with ThreadPoolExecutor(max_workers=config.worker_count()) as pool:
        futures = [
            pool.submit(_classify_cell, float(betas[ib]), float(es[ie]), opts,
                        config.class_tol)
            for ie, ib in cells
        ]
        for k, fut in enumerate(futures):
            results[k] = fut.result()
    n_b = len(betas)
    classes = tuple(
        tuple(results[ie * n_b + ib][0] for ib in range(n_b)) for ie in range(len(es))
    )
    eigenvalues = tuple(
        tuple(results[ie * n_b + ib][1] for ib in range(n_b)) for ie in range(len(es))
    )
    return classes, eigenvalues


def _scan_csv_text(config: ScanConfig, classes, eigenvalues) -> str:
    betas = config.beta_grid()
    es = config.e_grid()
    lines = ["beta,e,class,ev1_re,ev1_im,ev2_re,ev2_im,ev3_re,ev3_im,ev4_re,ev4_im"]
    for ie, e in enumerate(es):
        for ib, beta in enumerate(betas):
            evs = eigenvalues[ie][ib]
            parts = [f"{beta:.17g}", f"{e:.17g}", classes[ie][ib]]
            for ev in evs:
                parts.append(f"{ev.real:.17g}")
                parts.append(f"{ev.imag:.17g}")
            lines.append(",".join(parts))
    return "\n".join(lines) + "\n"


def _parse_scan_csv(text: str, config: ScanConfig):
    rows = text.strip().split("\n")[1:]
    n_b = config.beta_steps
    classes = []
    eigenvalues = []
    for ie in range(config.e_steps):
        crow, erow = [], []
        for ib in range(n_b):
            parts = rows[ie * n_b + ib].split(",")
            crow.append(parts[2])
            erow.append(tuple(
                complex(float(parts[3 + 2 * k]), float(parts[4 + 2 * k]))
                for k in range(4)
            ))
        classes.append(tuple(crow))
        eigenvalues.append(tuple(erow))
    return tuple(classes), tuple(eigenvalues)


def _class_raster(classes) -> np.ndarray:
    h, w = len(classes), len(classes[0])
    img = np.zeros((h, w, 3), dtype=np.uint8)
    for ie in range(h):
        for ib in range(w):
            # top row = largest e, so the raster reads like a plot
            img[h - 1 - ie, ib] = CLASS_COLORS.get(classes[ie][ib], (128, 128, 128))
    return img


def cmd_scan(config: ScanConfig) -> RegionGrid:
    os.makedirs(config.out_dir, exist_ok=True)
    cache_path = os.path.join(config.cache_dir, f"scan-{config.digest()[:16]}.csv")
    if os.path.exists(cache_path):
        with open(cache_path) as fh:
            csv_text = fh.read()
        classes, eigenvalues = _parse_scan_csv(csv_text, config)
    else:
        classes, eigenvalues = _scan_cells(config)
        csv_text = _scan_csv_text(config, classes, eigenvalues)
        _atomic_write(cache_path, csv_text.encode())
    _atomic_write(os.path.join(config.out_dir, "scan.csv"), csv_text.encode())
    write_ppm(os.path.join(config.out_dir, "scan_classes.ppm"), _class_raster(classes))

    layer = None
    if config.index_layer:
        betas = config.beta_grid()
        es = config.e_grid()
        n_modes = min(config.n_modes, 64) if max(abs(es)) <= 0.9 else config.n_modes

        def one(e, beta):
            try:
                spec = morse_and_nullity(assemble_A(Params(beta, e), -1.0, n_modes))
                return spec.morse_index
            except Exception:
                return 255

        with ThreadPoolExecutor(max_workers=config.worker_count()) as pool:
            futs = [
                pool.submit(one, float(e), float(b)) for e in es for b in betas
            ]
            vals = [f.result() for f in futs]
        layer = tuple(
            tuple(vals[ie * len(betas) + ib] for ib in range(len(betas)))
            for ie in range(len(es))
        )
        img = np.zeros((len(es), len(betas)), dtype=np.uint8)
        for ie in range(len(es)):
            for ib in range(len(betas)):
                v = layer[ie][ib]
                img[len(es) - 1 - ie, ib] = 255 if v == 255 else min(250, 50 * v)
        write_pgm(os.path.join(config.out_dir, "scan_i_minus1.pgm"), img)

    return RegionGrid(config=config, classes=classes, eigenvalues=eigenvalues,
                      i_minus_one=layer)


def _curves_raster(config: ScanConfig, tables, width=540, height=400) -> np.ndarray:
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    e_lo, e_hi = config.e_min, config.e_max
    for table in tables:
        color = CURVE_COLORS.get(table.label, (0, 0, 0))
        for p in table.points:
            if not (e_lo <= p.e <= e_hi and 0.0 <= p.beta <= 9.0):
                continue
            col = int(round((p.beta / 9.0) * (width - 1)))
            row = int(round((e_hi - p.e) / (e_hi - e_lo) * (height - 1)))
            img[row, col] = color
    return img


def cmd_curves(config: ScanConfig):
    os.makedirs(config.out_dir, exist_ok=True)
    e_grid = config.e_grid()
    tables = minus_one_curves(e_grid, n_modes=config.n_modes)
    beta_m_by_e = {p.e: p.beta for p in tables["GAMMA_M"].points}

    gk_points = []
    failed = []
    for e in e_grid:
        e = float(e)
        try:
            gk_points.append(
                gamma_k(
                    e,
                    n_modes=config.n_modes,
                    bisection_tol=config.bisection_tol,
                    class_tol=config.class_tol,
                    integrator=config.integrator(),
                    beta_m=beta_m_by_e.get(e),
                )
            )
        except Exception as exc:
            failed.append((e, f"{type(exc).__name__}: {exc}"))
    meta = {
        "n_modes": config.n_modes,
        "bisection_tol": config.bisection_tol,
        "e_grid": [float(e) for e in e_grid],
    }
    if failed:
        meta["failed_points"] = failed
    tables[LABEL_GAMMA_K] = CurveTable(
        label=LABEL_GAMMA_K, points=tuple(gk_points), metadata=meta
    )

    all_tables = list(tables.values())
    if config.fan_thetas.strip():
        thetas = [float(s) for s in config.fan_thetas.split(",") if s.strip()]
        all_tables.extend(omega_fan(e_grid, thetas, n_modes=config.n_modes))

    write_curve_csv(os.path.join(config.out_dir, "curves.csv"), all_tables)
    write_ppm(
        os.path.join(config.out_dir, "curves_overlay.ppm"),
        _curves_raster(config, all_tables),
    )
    return tables


def cmd_index(beta: float, e: float, omega_theta: float, n_modes: int = 128) -> None:
    omega = cmath.exp(1j * omega_theta)
    p = Params(beta, e)
    op = omega_index_from_operator(p, omega, n_modes=n_modes)
    print(
        f"operator method: i_omega = {op.i_omega}, nu_omega = {op.nu_omega}"
        + ("" if op.converged else "  [WARNING: truncation not converged]")
    )
    path = integrate_gamma(p)
    try:
        pa = omega_index_from_path(path, omega)
    except ValueError as exc:
        print(f"path method: skipped (degenerate endpoint: {exc})")
        return
    print(f"path method:     i_omega = {pa.i_omega}, nu_omega = {pa.nu_omega}")
    for t, sign in pa.crossings:
        print(f"  crossing at t = {t:.6f}, sign {sign:+d}")
    if op.i_omega != pa.i_omega:
        print("WARNING: methods disagree")


def cmd_monodromy(beta: float, e: float, out_dir: str | None = None) -> None:
    path = integrate_gamma(Params(beta, e))
    print(f"monodromy at beta={beta:.17g}, e={e:.17g} (residual {path.sp_residual:.3e}):")
    for row in path.endpoint:
        print("  [" + "  ".join(f"{v:+.12e}" for v in row) + "]")
    report = classify(path.endpoint)
    print(f"class: {report.stability_class}, unit-circle count {report.unit_circle_count}")
    for ev in report.eigenvalues:
        print(f"  eigenvalue {ev.real:+.12e} {ev.imag:+.12e}j  (|.| = {abs(ev):.12f})")
    for ev, sign in report.krein:
        print(f"  krein sign {sign:+d} at {ev:+.6f}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        dest = os.path.join(out_dir, f"monodromy_{beta:g}_{e:g}.csv")
        write_path_csv(path, dest)
        print(f"path samples written to {dest}")


def cmd_verify(out_dir: str | None = None) -> int:
    from .acceptance import run_all

    results = run_all()
    lines = []
    for r in results:
        lines.append(r.json_line())
        print(r.json_line())
        print(r.text_line(), file=sys.stderr)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        _atomic_write(
            os.path.join(out_dir, "verify.jsonl"), ("\n".join(lines) + "\n").encode()
        )
    n_fail = sum(1 for r in results if not r.passed)
    print(
        f"{len(results) - n_fail}/{len(results)} criteria passed", file=sys.stderr
    )
    return 1 if n_fail else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagstab",
        description="Linear stability of elliptic triangle configurations: "
        "scans, curves, and indices over the (beta, e) rectangle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("scan", "curves"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        p.add_argument("--threads", type=int, help="worker threads (0 = all cores)")
        p.add_argument("--n-modes", type=int, help="spectral truncation level")
    p = sub.add_parser("index")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--omega-theta", type=float, required=True,
                   help="angle of omega on the unit circle")
    p.add_argument("--n-modes", type=int, default=128)
    p = sub.add_parser("monodromy")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--out", help="also write the sampled path as CSV here")
    p = sub.add_parser("verify")
    p.add_argument("--out", help="also write verify.jsonl here")
    return parser


def _load_config(args) -> ScanConfig:
    config = ScanConfig.from_file(args.config) if args.config else ScanConfig()
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    if getattr(args, "n_modes", None) is not None:
        overrides["n_modes"] = args.n_modes
    return replace(config, **overrides) if overrides else config


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            cmd_scan(_load_config(args))
            return 0
        if args.command == "curves":
            cmd_curves(_load_config(args))
            return 0
        if args.command == "index":
            cmd_index(args.beta, args.e, args.omega_theta, args.n_modes)
            return 0
        if args.command == "monodromy":
            cmd_monodromy(args.beta, args.e, args.out)
            return 0
        if args.command == "verify":
            return cmd_verify(args.out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
