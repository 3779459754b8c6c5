"""Command-line front end.

    kernelpde converge|run|stability|compare|probe --config FILE [--out DIR] [--threads N]

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up.
Every command writes CSV into ``--out`` (default: current directory) and
echoes a short table on stdout.
"""
from __future__ import annotations

import argparse
import io
import logging
import math
import os
import sys
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import legacy, stability
from .config import COMMANDS, HarnessConfig, parse_config
from .problems import preset
from .solver import BlowUpError, RunConfig, convergence_order, integrate
from .timestep import ConfigurationError

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP = 0, 2, 3


def paper_sci(x: float) -> str:
    """Two significant digits with a mantissa in [0.1, 1), e.g. ``0.14E-05``."""
    if not math.isfinite(x):
        return "inf" if x > 0 else "nan"
    if x == 0:
        return "0.00E+00"
    e = math.floor(math.log10(abs(x))) + 1
    m = round(x / 10.0**e, 2)
    if abs(m) >= 1.0:
        m, e = m / 10.0, e + 1
    return f"{m:.2f}E{e:+03d}"


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _csv(header: str, rows: Iterable[Sequence[str]], footer: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    for line in footer:
        buf.write(line + "\n")
    return buf.getvalue()


def _g(x: float) -> str:
    return f"{x:.10g}"


def _e(x: float) -> str:
    return f"{x:.12e}" if math.isfinite(x) else ("inf" if x > 0 else "nan")


def _map(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- converge ---------------------------------------------------------------

def _converge_one(job):
    name, run = job
    try:
        return integrate(preset(name), run).linf
    except BlowUpError as exc:
        log.warning("%s n=%d cfl=%g: %s", name, run.n, run.cfl, exc)
        return math.inf


def run_convergence(cfg: HarnessConfig, threads: int = 1) -> list[tuple[float, int, float, float | None]]:
    """``(cfl, n, linf_error, order)`` rows, one refinement sequence per CFL value."""
    jobs = [(cfg.preset, RunConfig(n=n, k=cfg.k, cfl=cfl, t_end=cfg.t_end, variant=cfg.variant,
                                   beta1=cfg.beta1, beta2=cfg.beta2))
            for cfl in cfg.cfl for n in cfg.grids]
    errors = _map(_converge_one, jobs, threads)
    rows = []
    for (_, run), err in zip(jobs, errors):
        prev = rows[-1] if rows and rows[-1][0] == run.cfl else None
        order = None
        if prev is not None and math.isfinite(prev[2]) and math.isfinite(err) and err > 0:
            order = convergence_order(prev[2], err)
        rows.append((run.cfl, run.n, err, order))
    return rows


def format_convergence(rows) -> str:
    return _csv("cfl,n,linf_error,order",
                ([_g(c), str(n), paper_sci(e), "" if o is None else f"{o:.2f}"] for c, n, e, o in rows))


# --- run --------------------------------------------------------------------

def _tlabel(t: float) -> str:
    return f"{t:g}"


def run_simulation(cfg: HarnessConfig, out: Path) -> list[Path]:
    """Integrate the preset and write one CSV per (component, snapshot time)."""
    problem = preset(cfg.preset)
    times = cfg.snapshots or (cfg.t_end,)
    run = RunConfig(n=cfg.n, k=cfg.k, cfl=cfg.cfl[0], t_end=cfg.t_end, variant=cfg.variant,
                    beta1=cfg.beta1, beta2=cfg.beta2, snapshots=tuple(times))
    res = integrate(problem, run)
    grid = res.grid
    x, y = grid.coords()
    shape = grid.shape
    xs = np.broadcast_to(x, shape).ravel()
    ys = np.broadcast_to(0.0 if y is None else y, shape).ravel()
    nx, ny = (shape[-1], shape[0]) if len(shape) == 2 else (shape[0], 1)
    written = []
    for t in sorted(res.snapshots):
        snap = res.snapshots[t]
        for name in snap.names:
            vals = snap[name].ravel()
            text = _csv(f"# t={_tlabel(t)} nx={nx} ny={ny}\nx,y,{name}",
                        ([_e(a), _e(b), _e(v)] for a, b, v in zip(xs, ys, vals)))
            path = out / f"{cfg.preset}_{name}_t{_tlabel(t)}.csv"
            write_atomic(path, text)
            written.append(path)
    return written


# --- stability --------------------------------------------------------------

def run_stability_scan(cfg: HarnessConfig) -> tuple[str, str]:
    """CSV text and the summary line for the configured scan."""
    k, beta = cfg.k, cfg.beta
    bmax = stability.beta_max_semi(k)
    if cfg.mode == "semi1d":
        z, s, q = stability.scan_semi_1d(k, beta, cfg.points or 10_000)
        body = _csv("z,s_k,q", ([_e(a), _e(b), _e(c)] for a, b, c in zip(z, s, q)))
        summary = f"# k={k} beta={_g(beta)} beta_max={bmax:.6f} min_q={_e(q.min())} max_q={_e(q.max())}"
    elif cfg.mode == "semi2d":
        z1, z2, q = stability.scan_semi_2d(k, beta, cfg.cross_ratio, cfg.points or 200)
        body = _csv("z1,z2,q", ([_e(a), _e(b), _e(c)] for a, b, c in zip(z1.ravel(), z2.ravel(), q.ravel())))
        summary = (f"# k={k} beta={_g(beta)} cross_ratio={_g(cfg.cross_ratio)} beta_max={bmax:.6f} "
                   f"min_q={_e(q.min())} max_q={_e(q.max())}")
    else:
        rows = stability.scan_full_1d(k, beta, modes=cfg.points or stability.RING_NODES)
        body = _csv("kappa_dx,dt_over_dx2,abs_lambda", ([_e(a), _e(b), _e(c)] for a, b, c in rows))
        summary = (f"# k={k} beta={_g(beta)} beta_max={bmax:.6f} "
                   f"max_abs_lambda={_e(max(r[2] for r in rows))}")
    return body + summary + "\n", summary


# --- compare / probe --------------------------------------------------------

def _compare_one(job):
    k, grids, variant, repeats = job
    return legacy.compare_efficiency(k, grids, (variant,), repeats=repeats)


def run_compare(cfg: HarnessConfig, threads: int = 1) -> list[legacy.ComparisonRecord]:
    jobs = [(k, cfg.grids, v, cfg.repeats) for k in cfg.ks for v in cfg.variants]
    return [rec for recs in _map(_compare_one, jobs, threads) for rec in recs]


def format_compare(records) -> str:
    return _csv("variant,k,n,cpu_seconds,linf_error",
                ([r.variant, str(r.k), str(r.n), f"{r.cpu_seconds:.6f}", _e(r.linf_error)] for r in records))


def run_probe(cfg: HarnessConfig) -> list[tuple[str, int, float, float]]:
    rows = []
    for v in cfg.variants:
        for alpha, err in legacy.monotonicity_probe(v, cfg.k, cfg.test_function, cfg.alphas):
            rows.append((v, cfg.k, alpha, err))
    return rows


def format_probe(rows, test_function: str) -> str:
    return _csv("variant,k,test_function,alpha,linf_error",
                ([v, str(k), test_function, _g(a), _e(e)] for v, k, a, e in rows))


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kernelpde", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML config file")
    ap.add_argument("--out", default=".", help="output directory (created if missing)")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for independent runs")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _execute(args) -> int:
    cfg = parse_config(args.config)
    # beta-bound warnings were already shown once while parsing
    warnings.filterwarnings("ignore", message=r"beta\d? ?=.*exceeds the A-stability bound")
    if cfg.command != args.command:
        raise ConfigurationError(f"{args.config}: command: file says {cfg.command!r} but {args.command!r} was requested")
    if args.threads < 1:
        raise ConfigurationError("--threads must be at least 1")
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"--out {out}: cannot create directory ({exc.strerror})") from None
    if not os.access(out, os.W_OK):
        raise ConfigurationError(f"--out {out}: directory is not writable")

    if cfg.command == "converge":
        text = format_convergence(run_convergence(cfg, args.threads))
        write_atomic(out / f"{cfg.preset}_k{cfg.k}_converge.csv", text)
        print(text, end="")
    elif cfg.command == "run":
        for path in run_simulation(cfg, out):
            print(path)
    elif cfg.command == "stability":
        text, summary = run_stability_scan(cfg)
        write_atomic(out / f"stability_{cfg.mode}_k{cfg.k}.csv", text)
        print(summary)
    elif cfg.command == "compare":
        text = format_compare(run_compare(cfg, args.threads))
        write_atomic(out / "compare.csv", text)
        print(text, end="")
    else:
        text = format_probe(run_probe(cfg), cfg.test_function)
        write_atomic(out / f"probe_{cfg.test_function}_k{cfg.k}.csv", text)
        print(text, end="")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _execute(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
