"""``hybrid-betti`` command line.

Results go to stdout (or ``--out``) and never contain timings, so reruns are
byte-identical.  ``--manifest`` writes a separate JSON record holding the
full argument set, input digests, library versions, per-stage timings and
the digest of the output; ``hybrid-betti rerun MANIFEST`` replays it and
checks the digest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .block_encoding import (
    compose_lcu,
    compose_product,
    compose_tensor,
    dilate,
    encode_gram,
    scale,
    verify_action,
)
from .chain import boundary_matrix, exact_kernel_dim
from .cliques import build_simplex_sets, choose_strategy, enumerate_arboricity_style, enumerate_degeneracy_style
from .pipelines import (
    DistanceGraphSpec,
    cost_model,
    entanglement_distances,
    filtration_sweep,
    mutual_information_matrix,
)
from .rank import RankEstimatorConfig, estimate_betti_from_sets
from .readers import FIXTURE_PREFIX, load_graph, load_image, load_points, load_state

log = logging.getLogger("hybrid_betti")

EXACT_MODE_MAX_N = 25
VERSION = "0.1.0"


class UsageError(ValueError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    args: dict
    inputs: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    output_sha256: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


class _Timer:
    def __init__(self):
        self.stages: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        yield
        self.stages[name] = self.stages.get(name, 0.0) + time.perf_counter() - t0


def _digest(source: str | None) -> str | None:
    if not source or source.startswith(FIXTURE_PREFIX) or not Path(source).is_file():
        return None
    return hashlib.sha256(Path(source).read_bytes()).hexdigest()


def _config(a) -> RankEstimatorConfig:
    return RankEstimatorConfig(
        epsilon=a.epsilon, eta=a.eta, threshold=a.theta, degree=a.degree, probes=a.probes, seed=a.seed
    )


def _mode(a, n: int) -> str:
    if a.mode:
        return a.mode
    return "exact" if n <= EXACT_MODE_MAX_N else "stochastic"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- subcommands: each returns the output text ---------------------------------


def cmd_cliques(a, timer: _Timer) -> str:
    if a.k is None:
        raise UsageError("cliques needs --k")
    with timer.stage("load"):
        g = load_graph(a.graph)
    with timer.stage("enumerate"):
        strategy = choose_strategy(g, a.strategy)
        fn = enumerate_degeneracy_style if strategy == "degeneracy" else enumerate_arboricity_style
        cl = fn(g, a.k)
    return cl.to_json() + "\n" if a.format == "json" else cl.to_csv()


def cmd_betti(a, timer: _Timer) -> str:
    with timer.stage("load"):
        g = load_graph(a.graph)
    with timer.stage("enumerate"):
        sets = build_simplex_sets(g, a.r + 1, a.strategy)
    mode = _mode(a, g.n)
    with timer.stage("estimate"):
        est = estimate_betti_from_sets(sets, a.r, _config(a), mode=mode)
    doc = est.to_dict()
    doc["n"] = g.n
    doc["strategy"] = sets[0].source
    if a.format == "csv":
        return "r,mode,normalized,absolute,stderr,size_r,size_r_plus_1\n" + (
            f"{a.r},{mode},{est.normalized!r},{est.absolute!r},{est.stderr!r},{est.sizes[0]},{est.sizes[1]}\n"
        )
    return _dump(doc)


def _sweep_source(a):
    given = [x for x in (a.graph, a.image, a.points, a.state) if x]
    if len(given) != 1:
        raise UsageError("sweep needs exactly one of --image, --points, --state")
    if a.image:
        return load_image(a.image, a.connectivity)
    if a.points:
        return load_points(a.points)
    if a.state:
        rho = load_state(a.state)
        d = entanglement_distances(mutual_information_matrix(rho), rho.local_dims)
        return DistanceGraphSpec(d)
    raise UsageError("sweep does not take --graph; use --image, --points or --state")


def _parse_thresholds(text: str | None) -> list[float]:
    if not text:
        raise UsageError("sweep needs --thresholds as a comma-separated list")
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --thresholds: {exc}") from exc


def cmd_sweep(a, timer: _Timer) -> str:
    thresholds = _parse_thresholds(a.thresholds)
    with timer.stage("load"):
        source = _sweep_source(a)
    largest, _ = source.build(max(thresholds)) if thresholds else (None, None)
    mode = _mode(a, largest.n if largest is not None else 0)
    with timer.stage("sweep"):
        curve = filtration_sweep(source, thresholds, a.r, _config(a), mode=mode, strategy=a.strategy)
    return curve.to_csv() if a.format == "csv" else curve.to_json() + "\n"


def cmd_verify(a, timer: _Timer) -> str:
    with timer.stage("load"):
        g = load_graph(a.graph)
    with timer.stage("enumerate"):
        sets = build_simplex_sets(g, a.r, a.strategy)
    m = boundary_matrix(sets[a.r])
    with timer.stage("encode"):
        be = encode_gram(m)
    rng = np.random.default_rng(a.seed)
    report = {
        "r": a.r,
        "simplices": len(sets[a.r]),
        "subnormalization": be.subnormalization,
        "metadata": be.metadata,
        "checks": {},
    }
    checks = report["checks"]
    if be.dim:
        phi = rng.normal(size=be.dim)
        phi /= np.linalg.norm(phi)
        res, orth = verify_action(be, phi)
        w = np.linalg.eigvalsh(be.encoded)
        checks["gram"] = {
            "unitarity_defect": be.unitarity_defect(),
            "block_defect": be.block_defect(),
            "action_residual": res,
            "garbage_overlap": orth,
            "kernel_dim_encoded": int(np.sum(w <= 1e-8)),
            "kernel_dim_exact": exact_kernel_dim(m),
        }
        with timer.stage("compose"):
            ident = dilate(np.eye(be.dim))
            composites = {
                "product": compose_product(be, be),
                "lcu": compose_lcu([be, ident], [1, -1]),
                "tensor": compose_tensor([be, dilate(np.array([[0.5]]))]),
                "scale": scale(be, 2.0),
            }
        for name, c in composites.items():
            checks[name] = {"unitarity_defect": c.unitarity_defect(), "block_defect": c.block_defect()}
    tol = 1e-10
    ok = all(
        v["unitarity_defect"] < tol and v["block_defect"] < tol for v in checks.values()
    ) and (not checks or checks["gram"]["kernel_dim_encoded"] == checks["gram"]["kernel_dim_exact"])
    report["passed"] = bool(ok)
    # defects are floating-point noise; round so reports are stable across BLAS builds
    for v in checks.values():
        for key in ("unitarity_defect", "block_defect", "action_residual", "garbage_overlap"):
            if key in v:
                v[key] = float(f"{v[key]:.3e}")
    return _dump(report)


def cmd_cost(a, timer: _Timer) -> str:
    for name in ("n", "s_r", "edges"):
        if getattr(a, name) is None:
            raise UsageError(f"cost needs --{name.replace('_', '-')}")
    report = cost_model(
        a.n,
        a.r,
        a.s_r,
        a.edges,
        a.epsilon,
        s_r_plus_1=a.s_r_plus_1,
        arboricity=a.arboricity,
        degeneracy=a.degeneracy_value,
        eta=a.eta,
    )
    return _dump(report)


COMMANDS = {
    "cliques": cmd_cliques,
    "betti": cmd_betti,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "cost": cmd_cost,
}


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge-list path or fixture:<name>")
    p.add_argument("--image", help="image CSV/PGM path or fixture:<name>")
    p.add_argument("--points", help="point-cloud CSV path or fixture:<name>")
    p.add_argument("--state", help="bell, ghz(N), product(N), random_pure(N,seed), or a JSON path")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--mode", choices=["exact", "stochastic"])
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--theta", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--probes", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=["auto", "arboricity", "degeneracy"], default="auto")
    p.add_argument("--thresholds")
    p.add_argument("--connectivity", type=int, choices=[4, 8], default=4)
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--out")
    p.add_argument("--manifest", help="write a run manifest to this path")
    # cost-model inputs
    p.add_argument("--n", type=int)
    p.add_argument("--s-r", type=int)
    p.add_argument("--s-r-plus-1", type=int)
    p.add_argument("--edges", type=int)
    p.add_argument("--arboricity", type=float)
    p.add_argument("--degeneracy-value", type=float, help="degeneracy d for the cost model")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybrid-betti", description="Betti numbers of clique complexes, exact and stochastic.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, help_text in [
        ("cliques", "list k-cliques of a graph"),
        ("betti", "estimate the r-th Betti number"),
        ("sweep", "Betti curve over a filtration"),
        ("verify", "check block-encoding contracts for a graph's Gram operator"),
        ("cost", "evaluate the cost model"),
    ]:
        _common(sub.add_parser(name, help=help_text))
    rerun = sub.add_parser("rerun", help="replay a run manifest and check its output digest")
    rerun.add_argument("manifest_path")
    rerun.add_argument("--out")
    rerun.add_argument("-v", "--verbose", action="store_true")
    return parser


def _default_format(subcommand: str) -> str:
    return "csv" if subcommand in ("cliques", "sweep") else "json"


def _fail(kind: str, message: str, code: int = 2):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    raise SystemExit(code)


def _versions() -> dict:
    return {
        "hybrid_betti": VERSION,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def execute(args: dict) -> tuple[str, dict]:
    """Run one subcommand from a plain argument dict; returns (output, timings)."""
    a = argparse.Namespace(**args)
    if a.format is None:
        a.format = _default_format(a.subcommand)
    timer = _Timer()
    out = COMMANDS[a.subcommand](a, timer)
    return out, timer.stages


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr)
    try:
        if ns.subcommand == "rerun":
            manifest = RunManifest.from_json(Path(ns.manifest_path).read_text())
            text, _ = execute(manifest.args)
            _emit(text, ns.out)
            got = hashlib.sha256(text.encode()).hexdigest()
            if manifest.output_sha256 and got != manifest.output_sha256:
                _fail("DeterminismError", f"output digest {got} differs from manifest {manifest.output_sha256}", 3)
            return 0
        args = {k: v for k, v in vars(ns).items() if k not in ("verbose", "manifest", "out")}
        text, timings = execute(args)
        _emit(text, ns.out)
        if ns.manifest:
            manifest = RunManifest(
                subcommand=ns.subcommand,
                args=args,
                inputs={k: {"source": args[k], "sha256": _digest(args[k])} for k in ("graph", "image", "points", "state") if args.get(k)},
                versions=_versions(),
                timings=timings,
                output_sha256=hashlib.sha256(text.encode()).hexdigest(),
            )
            Path(ns.manifest).write_text(manifest.to_json() + "\n")
        log.info("timings: %s", timings)
        return 0
    except (ValueError, OSError, KeyError) as exc:
        _fail(type(exc).__name__, str(exc))
    return 1


if __name__ == "__main__":
    sys.exit(main())
