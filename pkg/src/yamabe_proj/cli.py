"""Command-line interface.

    yamabe-proj spectrum     --space cp --n 2 --q 3 --kmax 3
    yamabe-proj eigenfunction --space hp --n 1 --k 2
    yamabe-proj scan         --space cp --n 2 --q 3 --lambda 13
    yamabe-proj multiplicity --space hp --n 1 --q 3 --lambda 17
    yamabe-proj branch       --space cp --n 2 --q 3 --k 1 --steps 50 --ds 0.05 --format csv
    yamabe-proj degenerate   --space cp --n 2 --q 3

JSON output has the layout {"config": ..., "results": [...], "diagnostics": ...}.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass

from . import bvp, continuation, spectral
from .errors import (ConfigError, FoldNotFoundError, InvalidExponentError, NumericalError,
                     YamabeError)
from .model import ProblemSpec, SpaceSpec, bifurcation_eigenvalue, check_exponent
from .shooting import IntegratorConfig

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

BRANCH_FIELDS = ["s", "lambda", "a", "b", "sup_norm", "zero_count", "lin_miss"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    space: str
    n: int
    q: float | None = None
    lam: float | None = None
    k: int | None = None
    kmax: int | None = None
    a_min: float = bvp.DEFAULT_A_RANGE[0]
    a_max: float = bvp.DEFAULT_A_RANGE[1]
    grid: int = bvp.DEFAULT_GRID
    steps: int = 200
    ds: float = 0.02
    direction: int = 1
    samples: int = 0
    eps: float = 1e-6
    tol: float = 1e-10
    format: str = "json"

    def validate(self) -> None:
        sp = self.space_spec()
        if self.command != "eigenfunction":
            if self.q is None:
                raise ConfigError(f"{self.command} requires --q")
            if self.command == "spectrum":
                # the table is plain arithmetic in gap(k) / (q - 2); it is
                # also meaningful at and above the critical exponent
                if not (math.isfinite(self.q) and self.q > 2):
                    raise InvalidExponentError(f"q must satisfy q > 2, got q = {self.q}")
            else:
                check_exponent(sp, self.q)
        if self.command in {"scan", "multiplicity"}:
            if self.lam is None:
                raise ConfigError(f"{self.command} requires --lambda")
            if not (math.isfinite(self.lam) and self.lam > 0):
                raise ConfigError(f"--lambda must be a positive real, got {self.lam}")
            if not -1 < self.a_min < self.a_max:
                raise ConfigError("scan range must satisfy -1 < a-min < a-max")
            if self.grid < 2:
                raise ConfigError("--grid must be >= 2")
        if self.command == "spectrum" and (self.kmax is None or self.kmax < 0):
            raise ConfigError("spectrum requires --kmax >= 0")
        if self.command == "eigenfunction" and (self.k is None or self.k < 0):
            raise ConfigError("eigenfunction requires --k >= 0")
        if self.command in {"branch", "degenerate"}:
            if self.k is None or self.k < 1:
                raise ConfigError(f"{self.command} requires --k >= 1")
            if not self.ds > 0:
                raise ConfigError("--ds must be positive")
            if self.steps < 1:
                raise ConfigError("--steps must be >= 1")
        if self.samples < 0:
            raise ConfigError("--samples must be >= 0")
        self.integrator()

    def space_spec(self) -> SpaceSpec:
        return SpaceSpec(self.space, self.n)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(eps_endpoint=self.eps, rel_tol=self.tol, abs_tol=self.tol * 1e-2)


def _f(x) -> float:
    return float(x)


def _profile_row(p: bvp.SolutionProfile) -> dict:
    return {
        "a": _f(p.a),
        "b": _f(p.b),
        "u_at_0": _f(p.a + 1),
        "u_at_pi2": _f(p.b + 1),
        "zero_count": int(p.zero_count),
        "sup_norm": _f(p.sup_norm),
        "miss_residual": _f(p.miss_residual),
        "ode_residual": _f(bvp.ode_residual(p)),
    }


def _point_row(p: continuation.BranchPoint) -> dict:
    return {
        "s": _f(p.s),
        "lambda": _f(p.lam),
        "a": _f(p.a),
        "b": _f(p.b),
        "sup_norm": _f(p.sup_norm),
        "zero_count": int(p.zero_count),
        "lin_miss": _f(p.lin_miss),
    }


def cmd_spectrum(cfg: RunConfig):
    sp = cfg.space_spec()
    rows = [{"k": k, "gap": sp.gap(k), "lambda_k": bifurcation_eigenvalue(sp, cfg.q, k)}
            for k in range(1, cfg.kmax + 1)]
    p_d = sp.critical_exponent
    # null when the real dimension is 2 (no critical exponent)
    return rows, {"critical_exponent": p_d if math.isfinite(p_d) else None}


def cmd_eigenfunction(cfg: RunConfig):
    sp = cfg.space_spec()
    p = spectral.eigenfunction(sp, cfg.k)
    zc = spectral.count_zeros(p)
    row = {
        "k": cfg.k,
        "coefficients": [str(c) for c in p.coeffs],
        "coefficients_float": p.as_floats(),
        "zeros": zc.count,
        "all_simple": zc.all_simple,
        "eigenvalue_gap": sp.gap(cfg.k),
    }
    if cfg.samples:
        rs = [math.pi / 2 * i / (cfg.samples - 1) for i in range(cfg.samples)] if cfg.samples > 1 else [0.0]
        row["table"] = [{"r": r, "value": spectral.evaluate(p, r)} for r in rs]
    return [row], {"variable": "x = cos^2 r", "normalization": "p_k(1) = 1"}


def cmd_scan(cfg: RunConfig):
    prob = ProblemSpec(cfg.space_spec(), cfg.q, cfg.lam)
    res = bvp.scan(prob, (cfg.a_min, cfg.a_max), cfg.grid, cfg=cfg.integrator())
    rows = [_profile_row(p) for p in res]
    diag = dict(res.diagnostics)
    diag.update(found=len(rows), bound=bvp.theorem_bound(prob.space, prob.q, prob.lam),
                trivial_found=res.trivial_found)
    return rows, diag


cmd_multiplicity = cmd_scan


def cmd_branch(cfg: RunConfig):
    br = continuation.branch_from(cfg.space_spec(), cfg.q, cfg.k, cfg.steps, cfg.ds,
                                  direction=cfg.direction, cfg=cfg.integrator())
    rows = [_point_row(p) for p in br.points]
    diag = {"lambda_k": br.lambda_k, "points": len(rows), "aborted": br.aborted}
    return rows, diag


def cmd_degenerate(cfg: RunConfig):
    d = continuation.find_degenerate(cfg.space_spec(), cfg.q, cfg.k, ds=cfg.ds,
                                     steps=cfg.steps, cfg=cfg.integrator())
    row = _point_row(d.point)
    row.update(dlambda_ds=_f(d.point.dlam_ds), lin_miss_before=_f(d.lin_miss_before),
               lin_miss_after=_f(d.lin_miss_after), ode_residual=_f(bvp.ode_residual(d.profile)))
    diag = {"lambda_k": d.branch.lambda_k, "below_lambda_k": d.lam < d.branch.lambda_k,
            "branch_direction": d.branch.direction}
    return [row], diag


COMMANDS = {
    "spectrum": cmd_spectrum,
    "eigenfunction": cmd_eigenfunction,
    "scan": cmd_scan,
    "multiplicity": cmd_multiplicity,
    "branch": cmd_branch,
    "degenerate": cmd_degenerate,
}


def render(cfg: RunConfig, rows: list, diag: dict) -> str:
    if cfg.format == "json":
        doc = {"config": asdict(cfg), "results": rows, "diagnostics": diag}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    if cfg.command == "branch":
        fields = BRANCH_FIELDS
    else:
        fields = [k for k in rows[0] if not isinstance(rows[0][k], list)] if rows else []
    w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="yamabe-proj", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", required=True, choices=["cp", "hp"])
    common.add_argument("--n", type=int, required=True)
    common.add_argument("--q", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--k", type=int)
    common.add_argument("--kmax", type=int)
    common.add_argument("--a-min", type=float, default=bvp.DEFAULT_A_RANGE[0])
    common.add_argument("--a-max", type=float, default=bvp.DEFAULT_A_RANGE[1])
    common.add_argument("--grid", type=int, default=bvp.DEFAULT_GRID)
    common.add_argument("--steps", type=int, default=200)
    common.add_argument("--ds", type=float, default=0.02)
    common.add_argument("--direction", type=int, choices=[1, -1], default=1)
    common.add_argument("--samples", type=int, default=0,
                        help="eigenfunction: also tabulate p_k(cos^2 r) at this many points")
    common.add_argument("--eps", type=float, default=1e-6)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write to this path instead of stdout")
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).strip())
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k != "out"}
    if fields["k"] is None and fields["command"] in {"branch", "degenerate"}:
        fields["k"] = 1
    try:
        cfg = RunConfig(**fields)
        cfg.validate()
    except ConfigError as exc:
        print(f"yamabe-proj: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows, diag = COMMANDS[cfg.command](cfg)
    except FoldNotFoundError as exc:
        print(f"yamabe-proj: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NumericalError, YamabeError) as exc:
        print(f"yamabe-proj: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        text = render(cfg, rows, diag)
    except ValueError as exc:
        print(f"yamabe-proj: non-finite value in results: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
