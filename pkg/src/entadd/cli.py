"""Command-line front end: ``entadd {measure,table,additivity,scan,state}``.

Every command prints JSON (``--json``) or an aligned text rendering, and
embeds a run manifest with the command line, configuration, seeds, library
version, wall-clock time and a checksum of each result. Values are in bits.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .additivity_lab import VOptions, additivity_gap, two_copy_gm_via_V
from .gm_solver import GmOptions, gm
from .random_lab import ScanConfig, nonadditivity_scan
from .ree_lgr import ReeOptions, lgr_bounds, ree_frank_wolfe
from .state_zoo import UNKNOWN, SpecParseError, closed_form, parse_spec
from .tables import TABLES, run_table
from .tensor_core import DEFAULT_MAX_DIM, StateError, copies, entropy, state_to_json

EXIT_PARSE = 2
EXIT_STATE = 3
REE_MAX_DIM = 64


@dataclass
class RunManifest:
    command_line: list
    config: dict
    seeds: dict
    version: str = __version__
    units: str = "bits"
    log_base: int = 2
    started: float = field(default_factory=time.time)
    wall_clock_s: float = 0.0
    checksums: dict = field(default_factory=dict)
    python: str = field(default_factory=platform.python_version)
    numpy: str = np.__version__

    def add_result(self, key: str, doc) -> None:
        blob = json.dumps(doc, sort_keys=True, default=_json_default).encode()
        self.checksums[key] = hashlib.sha256(blob).hexdigest()

    def finish(self) -> "RunManifest":
        self.wall_clock_s = time.time() - self.started
        return self


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _finite(x):
    # JSON has no infinity; keep it readable
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


# -- commands ---------------------------------------------------------------


def _gm_opts(args) -> GmOptions:
    kw = {"seed": args.seed}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if args.tol is not None:
        kw["tol"] = args.tol
    return GmOptions(**kw)


def _compare(doc: dict, spec, measure: str, n_copies: int) -> dict:
    ref = closed_form(spec, measure, n_copies)
    if ref == UNKNOWN:
        doc["closed_form"] = None
    else:
        doc["closed_form"] = ref
        doc["abs_diff"] = abs(doc["value_bits"] - ref)
    return doc


def cmd_measure(args) -> dict:
    spec = parse_spec(args.state)
    state = spec.build()
    measure = args.measure.upper()
    opts = _gm_opts(args)
    joint = copies(state, 2, max_dim=args.max_dim) if args.copies == 2 else state
    if measure == "GM":
        if args.copies == 2 and len(set(state.layout.dims)) == 1:
            res = two_copy_gm_via_V(state, opts=VOptions(seed=args.seed))
        else:
            res = gm(joint, opts)
        doc = res.to_json()
    elif measure == "REE":
        if joint.dim <= REE_MAX_DIM:
            ro = ReeOptions(seed=args.seed, **({"gap_tol": args.tol} if args.tol is not None else {}))
            doc = ree_frank_wolfe(joint, ro).to_json()
        else:
            # Frank-Wolfe is too slow here; report the general lower bound G - S
            if args.copies == 2 and len(set(state.layout.dims)) == 1:
                g = two_copy_gm_via_V(state, opts=VOptions(seed=args.seed)).gm_bits
            else:
                g = gm(joint, opts).gm_bits
            doc = {"measure": "REE", "kind": "lower_bound_g_minus_s", "value_bits": g - entropy(joint),
                   "units": "bits", "notes": [f"d_T = {joint.dim} above the Frank-Wolfe cap {REE_MAX_DIM}"]}
    else:
        doc = lgr_bounds(joint, spec if args.copies == 1 else None).to_json()
    doc["state"] = spec.to_string()
    doc["copies"] = args.copies
    return _compare(doc, spec, measure, args.copies)


def cmd_table(args) -> dict:
    rep = run_table(args.which, _gm_opts(args))
    doc = rep.to_json()
    doc["text"] = rep.render()
    return doc


def cmd_additivity(args) -> dict:
    a = parse_spec(args.a).build()
    b = parse_spec(args.b).build()
    rep = additivity_gap(a, b, args.measure, _gm_opts(args), max_dim=args.max_dim)
    doc = rep.to_json()
    doc.update(a=args.a, b=args.b)
    return doc


def cmd_scan(args) -> dict:
    layout = (2,) * args.qubits if args.qubits else tuple(int(d) for d in args.dims.split(","))
    ens = {"real": "haar_real", "complex": "haar_complex"}.get(args.ensemble, args.ensemble)
    cfg = ScanConfig(layout, samples=args.samples, seed=args.seed, ensemble=ens, gm_opts=_gm_opts(args))
    rep = nonadditivity_scan(cfg)
    if args.csv:
        rep.write_csv(args.csv)
    doc = rep.to_json()
    doc["rows"] = [asdict(r) for r in rep.rows]
    return doc


def cmd_state(args) -> dict:
    spec = parse_spec(args.state)
    s = spec.build()
    if s.dim > args.max_dim:
        raise StateError(f"d_T = {s.dim} exceeds the cap {args.max_dim}")
    return {"spec": spec.to_json(), "state": state_to_json(s)}


def _render(doc: dict) -> str:
    if "text" in doc:
        return doc["text"]
    keys = ("state", "a", "b", "measure", "value_bits", "closed_form", "abs_diff", "gap", "classification",
            "converged", "witness_fraction", "excluded", "summary")
    lines = []
    for k in keys:
        if k in doc:
            lines.append(f"{k:<18} {doc[k]}")
    if not lines:
        return json.dumps(_finite(doc), indent=2, default=_json_default)
    return "\n".join(lines) + "\nunits              bits"


# -- parser -----------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="base seed (default 0)")
    p.add_argument("--restarts", type=int, default=d(None), help="GM solver restarts")
    p.add_argument("--tol", type=float, default=d(None), help="solver tolerance")
    p.add_argument("--json", action="store_true", default=d(False), help="print JSON")
    p.add_argument("--out", default=d(None), metavar="FILE", help="also write JSON to FILE")
    p.add_argument("--max-dim", type=int, default=d(DEFAULT_MAX_DIM), help="cap on the total dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entadd", description="Multipartite entanglement measures in bits.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="GM, REE or LGR of a family state")
    p.add_argument("--state", required=True, help="family spec, e.g. 'iso:d=3,lambda=0.6'")
    p.add_argument("--measure", required=True, type=str.lower, choices=("gm", "ree", "lgr"))
    p.add_argument("--copies", type=int, default=1, choices=(1, 2))
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("table", parents=[common], help="recompute a summary table")
    p.add_argument("which", choices=TABLES)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("additivity", parents=[common], help="additivity gap of a pair of states")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--measure", default="gm", type=str.lower, choices=("gm", "ree", "lgr"))
    p.set_defaults(func=cmd_additivity)

    p = sub.add_parser("scan", parents=[common], help="random-state GM scan with two-copy witnesses")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--qubits", type=int)
    g.add_argument("--dims", help="comma-separated local dimensions")
    p.add_argument("--ensemble", default="real", choices=("real", "complex", "haar_real", "haar_complex"))
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--csv", metavar="FILE", help="per-sample CSV output")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("state", parents=[common], help="construct a state and print it as JSON")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_state)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = RunManifest(["entadd"] + argv, config, {"seed": args.seed})
    try:
        doc = args.func(args)
    except SpecParseError as exc:
        print(f"entadd: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StateError as exc:
        print(f"entadd: {exc}", file=sys.stderr)
        return EXIT_STATE
    doc = _finite(json.loads(json.dumps(doc, default=_json_default)))
    manifest.add_result(args.command, doc)
    doc["manifest"] = asdict(manifest.finish())
    text = json.dumps(doc, indent=2, sort_keys=False)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text if args.json else _render(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
