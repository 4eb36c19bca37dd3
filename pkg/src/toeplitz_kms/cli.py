"""Command line front end: ``analyze``, ``eval``, ``scan`` and ``verify``.

Exit codes: 0 success, 1 a verification failed, 2 malformed input,
3 a mathematical precondition does not hold.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Sequence

from .config import SCHEMA, ConfigError, PreconditionError, ProblemConfig
from .kms import (EvalReport, StateSpec, ground_state_eval, kms_series_oracle, kms_state_eval,
                  kms_zero_eval, kms_zero_plus_eval, phase_scan, scan_csv)
from .lattice import (AdaptedBasis, box_oracle, degeneracy_group, in_degeneracy_group,
                      in_invariant_lattice, invariant_lattice)
from .suites import SUITES, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_SCHEMA, EXIT_PRECONDITION = 0, 1, 2, 3


def default_radius(dim: int) -> int:
    return 4 if dim <= 4 else 2


def load_config(path: str | None) -> ProblemConfig:
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ProblemConfig.from_json(data)


def _lattice_summary(basis: AdaptedBasis, member, radius: int) -> dict:
    bad = box_oracle(basis, member, radius)
    return {**basis.to_json(), "box_check": {"radius": radius, "disagreements": len(bad),
                                             "examples": [list(x) for x in bad[:5]]}}


def cmd_analyze(cfg: ProblemConfig) -> dict:
    dyn = cfg.dynamics()
    theta = cfg.theta_matrix()
    theta_d = theta.restrict(range(dyn.k, theta.n))
    radius = cfg.box_radius
    out = {"n": theta.n, "k": dyn.k, "d": dyn.d, "permutation": list(dyn.perm)}
    out["theta_d"] = _lattice_summary(degeneracy_group(theta_d), lambda x: in_degeneracy_group(theta_d, x),
                                      default_radius(dyn.d) if radius is None else radius)
    out["theta_full"] = _lattice_summary(degeneracy_group(theta), lambda x: in_degeneracy_group(theta, x),
                                         default_radius(theta.n) if radius is None else radius)
    if cfg.r_is_exact and cfg.r:
        r = cfg.exact_r()
        out["invariant_lattice"] = _lattice_summary(
            invariant_lattice(theta, r), lambda x: in_invariant_lattice(theta, r, x),
            default_radius(theta.n) if radius is None else radius)
    else:
        out["invariant_lattice"] = None
    return out


def _value_row(name: str, beta, rep: EvalReport) -> dict:
    return {"element_id": name, "beta": beta, "re": rep.value.real, "im": rep.value.imag,
            "method": rep.method, "tail_bound": rep.tail_bound}


def cmd_eval(cfg: ProblemConfig, cutoff: int | None = None) -> dict:
    dyn = cfg.dynamics()
    theta = cfg.theta_matrix()
    elements = cfg.element_list(theta)
    cutoff = cfg.cutoff if cutoff is None else cutoff
    rows = []
    if cfg.family == "kms0":
        basis = invariant_lattice(theta, cfg.exact_r())
        measure = cfg.measure_for(basis.m, invariant=True)
        for name, x in elements:
            rows.append(_value_row(name, None, EvalReport(kms_zero_eval(x, measure, cfg.exact_r(), basis),
                                                          "closed-form")))
    else:
        basis = degeneracy_group(theta.restrict(range(dyn.k, theta.n)))
        measure = cfg.measure_for(basis.m)
        if cfg.family == "kms":
            if not cfg.beta:
                raise PreconditionError("family 'kms' needs a beta grid")
            for beta in cfg.beta:
                spec = StateSpec(beta, dyn, measure, basis)
                for name, x in elements:
                    if cfg.method == "series":
                        rep = kms_series_oracle(x, spec, cutoff=cutoff)
                    else:
                        rep = EvalReport(kms_state_eval(x, spec), "closed-form")
                    rows.append(_value_row(name, beta, rep))
        else:
            for name, x in elements:
                if cfg.family == "ground":
                    value = ground_state_eval(x, measure, dyn.k, basis)
                else:
                    value = kms_zero_plus_eval(x, measure, dyn, basis)
                rows.append(_value_row(name, None, EvalReport(value, "closed-form")))
    return {"family": cfg.family, "permutation": list(dyn.perm), "results": rows}


def cmd_scan(cfg: ProblemConfig, cutoff: int | None = None) -> str:
    dyn = cfg.dynamics()
    theta = cfg.theta_matrix()
    basis = degeneracy_group(theta.restrict(range(dyn.k, theta.n)))
    if not cfg.beta:
        raise PreconditionError("scan needs a nonempty beta grid")
    template = StateSpec(cfg.beta[0], dyn, cfg.measure_for(basis.m), basis)
    try:
        rows = phase_scan(cfg.beta, cfg.element_list(theta), template, cfg.method,
                          cfg.cutoff if cutoff is None else cutoff)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    return scan_csv(rows)


def cmd_verify(suite: str, seed: int, trials: int | None, cutoff: int) -> dict:
    return run_suites(suite, seed, trials, cutoff)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toeplitz-kms", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["analyze", "eval", "scan", "verify", "schema"])
    parser.add_argument("--config", help="problem description (JSON)")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=None, help="override every suite's trial count")
    parser.add_argument("--cutoff", type=int, default=None, help="series cutoff per axis")
    parser.add_argument("--family", choices=["kms", "ground", "kms0plus", "kms0"],
                        help="override the config's state family for eval")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "schema":
            _emit(_dump(SCHEMA), args.out)
            return EXIT_OK
        if args.command == "verify":
            if args.config:
                load_config(args.config)
            if args.trials is not None and args.trials < 1:
                raise ConfigError("--trials must be positive")
            report = cmd_verify(args.suite, args.seed, args.trials, args.cutoff or 40)
            _emit(_dump(report), args.out)
            return EXIT_OK if report["passed"] else EXIT_VERIFY
        cfg = load_config(args.config)
        if args.family:
            cfg = dataclasses.replace(cfg, family=args.family)
        if args.command == "analyze":
            _emit(_dump(cmd_analyze(cfg)), args.out)
        elif args.command == "eval":
            _emit(_dump(cmd_eval(cfg, args.cutoff)), args.out)
        else:
            _emit(cmd_scan(cfg, args.cutoff), args.out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (PreconditionError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
