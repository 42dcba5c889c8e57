"""``kernelconv <command> <config.json> [--out DIR] [--band N] [--seed N]``

Every command writes ``report.json`` (plus any PGM artifacts) to the output
directory and prints the report.  Exit status: 0 on success, 2 when the
verdict is negative (e.g. no convergence), 1 on error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .errors import KernelConvError, ValidationError
from .grid import PointedMask, masks_equal_within_band
from .kernel import (convergence_check, kernel, kernel_monotone, liminf_set, normal_limit_verify,
                     pre_kernel, residue_subsequence, select_subsequence)
from .metrics import closure, hausdorff_distance
from .pgm import write_pgm
from .sequences import domain_at, tameness_check
from .shapes import rasterize_shape, shape_from_dict
from .sublevel import (boundary_condition_diagnostic, capital_psi_report, cross_check_sublevel,
                       kernel_from_psi)

logger = logging.getLogger("kernelconv")

COMMANDS = ("tame", "kernel", "prekernel", "liminf", "converge", "select", "normal-verify",
            "psi", "psi-kernel", "cross-check", "hausdorff", "render")


class Run:
    """Collects verdicts, diagnostics and artifacts for one command."""

    def __init__(self, command: str, cfg: RunConfig, out: Path):
        self.command = command
        self.cfg = cfg
        self.out = out
        self.verdict = {}
        self.diagnostics = {}
        self.artifacts = []
        self.ok = True

    def pgm(self, name: str, obj) -> None:
        meta = write_pgm(obj, self.out / name)
        meta["path"] = name
        self.artifacts.append(meta)

    def require_sequence(self):
        if self.cfg.sequence is None:
            raise ValidationError("/sequence", f"command {self.command!r} needs a sequence section")
        return self.cfg.sequence

    def require_field(self):
        if self.cfg.field_seq is None:
            raise ValidationError("/field", f"command {self.command!r} needs a field section")
        return self.cfg.field_seq


def _tame(run: Run):
    report = tameness_check(run.require_sequence(), run.cfg.params.get("k_max"))
    run.verdict = report.as_dict()
    run.ok = report.tamed


def _kernel(run: Run):
    seq = run.require_sequence()
    result = kernel(seq)
    run.verdict = {"empty": result.pointed.is_empty, "cells": result.mask.count,
                   "cell": list(result.pointed.point) if result.pointed.point else None}
    run.diagnostics["stabilization"] = result.stabilization.as_dict()
    direction = run.cfg.params.get("direction")
    if direction:
        shortcut = kernel_monotone(seq, direction)
        equal, mismatches = masks_equal_within_band(shortcut.mask, result.mask, 0)
        run.verdict["monotone_shortcut_equal"] = equal
        run.diagnostics["monotone_mismatches"] = mismatches
        run.ok = equal
    run.pgm("kernel.pgm", result.mask)


def _prekernel(run: Run):
    mask = pre_kernel(run.require_sequence())
    run.verdict = {"cells": mask.count}
    run.pgm("prekernel.pgm", mask)


def _liminf(run: Run):
    mask = liminf_set(run.require_sequence())
    run.verdict = {"cells": mask.count}
    run.pgm("liminf.pgm", mask)


def _converge(run: Run):
    verdict = convergence_check(run.require_sequence())
    run.verdict = verdict.as_dict()
    for r, k in verdict.residue_kernels.items():
        run.pgm(f"residue_{r}.pgm", k.mask)
    run.ok = verdict.converges


def _select(run: Run):
    seq = run.require_sequence()
    residue, pointed = select_subsequence(seq)
    sub = convergence_check(residue_subsequence(seq, residue))
    run.verdict = {"residue": residue, "cells": pointed.mask.count,
                   "subsequence_converges": sub.converges}
    run.pgm("selected.pgm", pointed.mask)
    run.ok = sub.converges


def _normal_verify(run: Run):
    seq = run.require_sequence()
    params = run.cfg.params
    if "candidate" in params:
        mask = rasterize_shape(shape_from_dict(params["candidate"]), seq.grid)
        q = seq.limit_cell
        candidate = PointedMask(mask, q) if mask[q] else PointedMask.empty(seq.grid)
        source = "params.candidate"
    else:
        candidate, source = kernel(seq).pointed, "kernel"
    report = normal_limit_verify(seq, candidate, params["trials"], params["seed"])
    run.verdict = {"holds": report.holds, "candidate": source}
    run.diagnostics.update(condition1_failures=report.condition1_failures,
                           condition2_failures=report.condition2_failures, tested=report.tested)
    run.ok = report.holds


def _psi(run: Run):
    result = capital_psi_report(run.require_field(), run.cfg.grid)
    values = result.psi.values
    finite = values[abs(values) != float("inf")]
    run.verdict = {"negative_cells": int((values < 0).sum())}
    run.diagnostics["stabilization"] = result.stabilization.as_dict()
    run.diagnostics["finite_range"] = [float(finite.min()), float(finite.max())] if finite.size else None
    delta = run.cfg.params.get("delta")
    diag = boundary_condition_diagnostic(result.psi, *([delta] if delta else []))
    run.diagnostics["plateau_cells"] = diag.count
    run.pgm("psi.pgm", result.psi)


def _psi_kernel(run: Run):
    result = capital_psi_report(run.require_field(), run.cfg.grid)
    pointed = kernel_from_psi(run.cfg.field_seq, run.cfg.field_limit, run.cfg.grid, psi=result.psi)
    run.verdict = {"cells": pointed.mask.count, "cell": list(pointed.point)}
    run.diagnostics["stabilization"] = result.stabilization.as_dict()
    run.pgm("psi_kernel.pgm", pointed.mask)


def _cross_check(run: Run):
    fseq = run.require_field()
    report = cross_check_sublevel(fseq, run.cfg.field_limit, run.cfg.grid,
                                  band=run.cfg.params["band"], point_track=run.cfg.field_track)
    run.verdict = report.as_dict()
    run.ok = report.status != "fail"


def _hausdorff(run: Run):
    seq = run.require_sequence()
    spec = run.cfg.params.get("hausdorff")
    if spec is None:
        raise ValidationError("/params/hausdorff", "hausdorff command needs params.hausdorff")
    reference = closure(rasterize_shape(shape_from_dict(spec["reference"]), seq.grid))
    distances = {}
    for j in spec["indices"]:
        distances[str(j)] = hausdorff_distance(closure(domain_at(seq, j)), reference)
    values = [distances[str(j)] for j in spec["indices"]]
    run.verdict = {"distances": distances,
                   "nonincreasing": all(b <= a for a, b in zip(values, values[1:]))}


def _render(run: Run):
    seq = run.require_sequence()
    for j in run.cfg.params.get("render_indices", [1]):
        run.pgm(f"domain_{j:04d}.pgm", domain_at(seq, j))
    run.verdict = {"rendered": len(run.artifacts)}


HANDLERS = {
    "tame": _tame, "kernel": _kernel, "prekernel": _prekernel, "liminf": _liminf,
    "converge": _converge, "select": _select, "normal-verify": _normal_verify, "psi": _psi,
    "psi-kernel": _psi_kernel, "cross-check": _cross_check, "hausdorff": _hausdorff,
    "render": _render,
}


def run(command: str, cfg: RunConfig, out) -> tuple:
    """Execute one command; returns ``(exit_status, report_dict)``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    r = Run(command, cfg, out)
    started = time.perf_counter()
    HANDLERS[command](r)
    report = {
        "command": command,
        "version": __version__,
        "config_digest": cfg.digest,
        "params": {k: cfg.params[k] for k in ("band", "seed", "trials")},
        "verdict": r.verdict,
        "diagnostics": r.diagnostics,
        "artifacts": r.artifacts,
        "timings": {"seconds": round(time.perf_counter() - started, 6)},
    }
    _write_report(out, report)
    return (0 if r.ok else 2), report


def _write_report(out: Path, report: dict) -> None:
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kernelconv", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("config", help="JSON configuration (or the name of a bundled one)")
    parser.add_argument("--out", default="kernelconv-out", help="output directory")
    parser.add_argument("--band", type=int, help="tolerance band in cells (overrides params.band)")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides params.seed)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        cfg = load_config(args.config)
        if args.band is not None:
            cfg.params["band"] = args.band
        if args.seed is not None:
            cfg.params["seed"] = args.seed
        status, report = run(args.command, cfg, out)
    except KernelConvError as err:
        report = {"command": args.command, "error": {"type": type(err).__name__, "message": str(err)}}
        if isinstance(err, ValidationError):
            report["error"].update(path=err.path, message=err.message)
        out.mkdir(parents=True, exist_ok=True)
        _write_report(out, report)
        print(json.dumps(report, indent=2, sort_keys=True), file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
