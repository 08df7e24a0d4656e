"""Command-line front-end.

Subcommands:
    spectrum    enumerate a primitive length spectrum into a cache file
    eval        evaluate Z / phi / ups / det / tau on an s-grid (CSV)
    resonances  produce a resonance catalog (closed form or located)
    verify      run a named identity suite, machine-readable report
    invert      inverse-spectral asymptotic fit (chi, n_C)

Every task writes its delimited artifact and, unless --no-plot is given, a
companion .png figure next to it. HYPERZETA_THREADS caps the worker pool
used for grid sweeps.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import plots, store, verify
from .errors import ConfigError, HyperzetaError
from .groups import Cylinder, Funnel, Horn, enumerate_primitive_classes, pants_from_lengths
from .locator import (ContourBox, cylinder_zeta_handle, funnel_zeta_handle,
                      invert_asymptotics, locate_zeros)
from .scattering import det_laplacian_log, phi_cylinder, phi_funnel, tau_zratio, upsilon_cylinder, upsilon_funnel
from .zeta import (TruncationPolicy, cylinder_resonances, funnel_resonances,
                   log_zeta_cylinder, log_zeta_funnel, log_zeta_infinity,
                   zeta_selberg)


@dataclass(frozen=True)
class EvalGrid:
    re_start: float
    re_stop: float
    re_step: float
    im_start: float
    im_stop: float
    im_step: float

    def __post_init__(self):
        if self.re_step <= 0 or self.im_step <= 0:
            raise ConfigError("grid steps must be positive")
        if not self.points():
            raise ConfigError("grid contains no points")

    def points(self):
        res = np.arange(self.re_start, self.re_stop + 1e-12, self.re_step)
        ims = np.arange(self.im_start, self.im_stop + 1e-12, self.im_step)
        return [complex(r, i) for i in ims for r in res]


@dataclass(frozen=True)
class JobConfig:
    task: str
    model: str = ""
    lmax: float = 8.0
    grid: EvalGrid | None = None
    box: tuple | None = None
    policy: TruncationPolicy = TruncationPolicy()
    what: str = "Z"
    suite: str = "appendix"
    method: str = "closedform"
    srange: tuple = (15.0, 40.0, 26)
    oriented: bool = True
    out: str = ""
    fmt: str = "json"
    plot: bool = True


def thread_count(n_tasks=None):
    env = os.environ.get("HYPERZETA_THREADS", "")
    try:
        cap = int(env) if env else (os.cpu_count() or 1)
    except ValueError:
        raise ConfigError(f"HYPERZETA_THREADS must be an integer, got {env!r}")
    cap = max(1, cap)
    if n_tasks is not None:
        cap = min(cap, n_tasks)
    return cap


def parse_model(text):
    if not text:
        raise ConfigError("missing --model")
    name, _, params = text.partition(":")
    vals = [float(p) for p in params.split(",") if p] if params else []
    if name == "cylinder":
        if len(vals) != 1:
            raise ConfigError("cylinder needs one length, e.g. cylinder:1")
        return Cylinder(vals[0])
    if name == "funnel":
        if len(vals) != 1:
            raise ConfigError("funnel needs one length, e.g. funnel:2")
        return Funnel(vals[0])
    if name == "horn":
        return Horn()
    if name == "pants":
        if len(vals) != 3:
            raise ConfigError("pants needs three lengths, e.g. pants:2,2,2")
        return pants_from_lengths(*vals)
    raise ConfigError(f"unknown model type {name!r}")


def parse_grid(text):
    try:
        re_spec, im_spec = text.split(",")
        r0, r1, rs = (float(v) for v in re_spec.split(":"))
        i0, i1, is_ = (float(v) for v in im_spec.split(":"))
    except ValueError:
        raise ConfigError(f"bad --grid {text!r}; want re0:re1:step,im0:im1:step")
    return EvalGrid(r0, r1, rs, i0, i1, is_)


def parse_box(text):
    try:
        r0, r1, i0, i1 = (float(v) for v in text.split(":"))
    except ValueError:
        raise ConfigError(f"bad --box {text!r}; want re0:re1:im0:im1")
    return (r0, r1, i0, i1)


def parse_policy(text):
    try:
        kmax, tol, radius = text.split(",")
        return TruncationPolicy(k_max=int(kmax), tail_tol=float(tol), radius=float(radius))
    except (ValueError, TypeError):
        raise ConfigError(f"bad --policy {text!r}; want kmax,tol,R")


# ----------------------------------------------------------------------
# task implementations


def _out_path(config, default):
    return config.out or default


def _sidecar_png(path):
    stem, _ = os.path.splitext(path)
    return stem + ".png"


def run_spectrum(config):
    model = parse_model(config.model)
    spectrum = enumerate_primitive_classes(model, config.lmax, oriented=config.oriented)
    path = _out_path(config, "spectrum.json")
    store.save_spectrum(spectrum, path, model_descriptor=config.model)
    print(f"wrote {path}: {len(spectrum.entries)} distinct lengths, "
          f"complete={spectrum.complete}")
    if config.plot:
        print("wrote " + plots.plot_spectrum(spectrum, _sidecar_png(path),
                                             title=f"{config.model}, L <= {config.lmax:g}"))
    return 0


def _eval_one(model, what, s, policy):
    """returns (value, tail bound) at one grid point."""
    if isinstance(model, Cylinder):
        if what == "Z":
            lz, tail = log_zeta_cylinder(s, model.length, policy)
            return np.exp(lz), tail
        if what == "phi":
            return phi_cylinder(s, model.length, policy), 0.0
        if what == "ups":
            return upsilon_cylinder(s, model.length, policy), 0.0
        if what == "det":
            return np.exp(det_laplacian_log(s, model, policy)), 0.0
        if what == "tau":
            return np.exp(tau_zratio(s, model, policy)), 0.0
    if isinstance(model, Funnel):
        if what == "Z":
            lz, tail = log_zeta_funnel(s, model.length, policy)
            return np.exp(lz), tail
        if what == "phi":
            return phi_funnel(s, model.length, policy), 0.0
        if what == "ups":
            return upsilon_funnel(s, model.length, policy), 0.0
    if hasattr(model, "generators"):
        spectrum = enumerate_primitive_classes(model, policy.word_L_max)
        if what == "Z":
            ev = zeta_selberg(s, spectrum, policy)
            return ev.value, ev.k_tail_bound + ev.length_tail_estimate
        if what == "Zinf":
            return np.exp(log_zeta_infinity(s, model.chi)), 0.0
        if what == "det":
            return np.exp(det_laplacian_log(s, model, policy)), 0.0
    raise ConfigError(f"--what {what!r} unsupported for model {type(model).__name__}")


def run_eval(config):
    model = parse_model(config.model)
    if config.grid is None:
        raise ConfigError("eval needs --grid")
    pts = config.grid.points()

    def work(s):
        v, tail = _eval_one(model, config.what, s, config.policy)
        v = complex(v)
        return (s.real, s.imag, v.real, v.imag, float(tail))

    with ThreadPoolExecutor(max_workers=thread_count(len(pts))) as pool:
        rows = list(pool.map(work, pts))
    path = _out_path(config, "eval.csv")
    store.save_eval_csv(rows, path)
    print(f"wrote {path}: {len(rows)} rows")
    if config.plot:
        print("wrote " + plots.plot_eval_grid(rows, _sidecar_png(path), what=config.what,
                                              title=f"{config.what} on {config.model}"))
    return 0


def run_resonances(config):
    model = parse_model(config.model)
    box = config.box or (-4.0, 0.5, -10.0, 10.0)
    if config.method == "closedform":
        if isinstance(model, Funnel):
            rset = funnel_resonances(model.length, box)
        elif isinstance(model, Cylinder):
            rset = cylinder_resonances(model.length, box)
        else:
            raise ConfigError("closed-form catalogs exist for funnel and cylinder only")
    elif config.method == "locate":
        pol = config.policy
        if isinstance(model, Funnel):
            handle = funnel_zeta_handle(model.length, pol)
        elif isinstance(model, Cylinder):
            handle = cylinder_zeta_handle(model.length, pol)
        else:
            raise ConfigError("locating resonances is supported for funnel and cylinder "
                              "(no continuation method exists for Schottky models)")
        rset = locate_zeros(handle, ContourBox(*box), tol=1e-9)
    else:
        raise ConfigError(f"unknown --method {config.method!r}")
    path = _out_path(config, "resonances.json")
    store.save_catalog(rset, path, model_descriptor=config.model)
    print(f"wrote {path}: {len(rset.points)} points, total multiplicity "
          f"{rset.total_multiplicity()}")
    if config.plot:
        print("wrote " + plots.plot_resonances(rset, _sidecar_png(path),
                                               title=f"{config.model} ({rset.source})"))
    return 0


def run_verify(config):
    results = verify.run_suite(config.suite)
    path = _out_path(config, f"verify-{config.suite}.json")
    store.save_verify_report(results, path, config.suite, model_descriptor=config.model)
    for r in results:
        mark = "PASS" if r["passed"] else "FAIL"
        print(f"[{mark}] {r['identity']}: residual {r['residual']:.3e} "
              f"(tol {r['tolerance']:.1e})")
    print(f"wrote {path}")
    if config.plot:
        print("wrote " + plots.plot_verify(results, _sidecar_png(path), suite=config.suite))
    return 0 if all(r["passed"] for r in results) else 1


def run_invert(config):
    model = parse_model(config.model)
    s0, s1, n = config.srange
    svals = np.linspace(s0, s1, int(n))
    pol = config.policy

    def logp(s):
        if isinstance(model, Cylinder):
            lz, _ = log_zeta_cylinder(s, model.length, pol)
            return lz.real
        spectrum = enumerate_primitive_classes(model, pol.word_L_max)
        ev = zeta_selberg(s, spectrum, pol)
        return (ev.log_value + log_zeta_infinity(s, model.chi)).real

    samples = [(s, logp(s)) for s in svals]
    fit = invert_asymptotics(samples)
    path = _out_path(config, "invert.json")
    store.save_fit_json(fit, path, model_descriptor=config.model)
    print(f"chi_est = {fit.chi_est:+.4f}, n_C_est = {fit.n_c_est:+.4f} "
          f"(fit residual {fit.residual:.2e})")
    print(f"wrote {path}")
    if config.plot:
        print("wrote " + plots.plot_fit(samples, fit, _sidecar_png(path),
                                        title=f"asymptotics of {config.model}"))
    return 0


TASKS = {
    "spectrum": run_spectrum,
    "eval": run_eval,
    "resonances": run_resonances,
    "verify": run_verify,
    "invert": run_invert,
}


def run(config: JobConfig) -> int:
    if config.task not in TASKS:
        raise ConfigError(f"unknown task {config.task!r}")
    return TASKS[config.task](config)


def build_parser():
    p = argparse.ArgumentParser(prog="hyperzeta",
                                description="Selberg zeta / resonance toolkit")
    sub = p.add_subparsers(dest="task", required=True)

    def common(sp):
        sp.add_argument("--model", default="", help="type:params, e.g. cylinder:1, "
                                                    "funnel:2, horn, pants:2,2,2")
        sp.add_argument("--policy", default="", help="kmax,tol,R truncation policy")
        sp.add_argument("--out", default="", help="output path")
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        sp.add_argument("--no-plot", action="store_true", help="skip the companion figure")

    sp = sub.add_parser("spectrum", help="enumerate a length spectrum")
    common(sp)
    sp.add_argument("--lmax", type=float, default=8.0)
    sp.add_argument("--oriented", default="true", choices=("true", "false"))

    sp = sub.add_parser("eval", help="evaluate a function on an s-grid")
    common(sp)
    sp.add_argument("--what", default="Z", choices=("Z", "Zinf", "phi", "ups", "det", "tau"))
    sp.add_argument("--grid", required=True, help="re0:re1:step,im0:im1:step")

    sp = sub.add_parser("resonances", help="resonance catalog")
    common(sp)
    sp.add_argument("--box", default="", help="re0:re1:im0:im1")
    sp.add_argument("--method", default="closedform", choices=("closedform", "locate"))

    sp = sub.add_parser("verify", help="run an identity suite")
    common(sp)
    sp.add_argument("--suite", default="appendix",
                    choices=tuple(verify.SUITES) + ("all",))

    sp = sub.add_parser("invert", help="inverse-spectral asymptotic fit")
    common(sp)
    sp.add_argument("--srange", default="15:40:26", help="s0:s1:npoints on the real ray")

    return p


def config_from_args(args) -> JobConfig:
    kw = dict(task=args.task, model=args.model, out=args.out, fmt=args.fmt,
              plot=not args.no_plot)
    if args.policy:
        kw["policy"] = parse_policy(args.policy)
    if getattr(args, "lmax", None) is not None and args.task == "spectrum":
        kw["lmax"] = args.lmax
        kw["oriented"] = args.oriented == "true"
    if args.task == "eval":
        kw["grid"] = parse_grid(args.grid)
        kw["what"] = args.what
    if args.task == "resonances":
        kw["box"] = parse_box(args.box) if args.box else None
        kw["method"] = args.method
    if args.task == "verify":
        kw["suite"] = args.suite
    if args.task == "invert":
        try:
            s0, s1, n = args.srange.split(":")
            kw["srange"] = (float(s0), float(s1), int(n))
        except ValueError:
            raise ConfigError(f"bad --srange {args.srange!r}; want s0:s1:npoints")
    return JobConfig(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except HyperzetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
