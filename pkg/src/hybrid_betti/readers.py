"""File and fixture loaders for graphs, images, point clouds and density matrices.

Any path argument may also be written ``fixture:<name>`` to load one of the
files bundled under ``hybrid_betti/fixtures``.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .graph import Graph, parse_edge_list
from .pipelines import (
    DensityMatrix,
    ImageGrid,
    PipelineError,
    PointCloud,
    bell_state,
    ghz_state,
    product_state,
    random_pure_state,
)

FIXTURE_PREFIX = "fixture:"
_FIXTURE_EXT = {"graph": ".edges", "image": ".csv", "points": ".csv", "state": ".json"}


def fixture_names(kind: str = "graph") -> list[str]:
    ext = _FIXTURE_EXT[kind]
    root = resources.files("hybrid_betti") / "fixtures"
    return sorted(p.name[: -len(ext)] for p in root.iterdir() if p.name.endswith(ext))


def _read_text(source: str, kind: str) -> str:
    if source.startswith(FIXTURE_PREFIX):
        name = source[len(FIXTURE_PREFIX) :]
        res = resources.files("hybrid_betti") / "fixtures" / (name + _FIXTURE_EXT[kind])
        if not res.is_file():
            raise FileNotFoundError(f"no bundled {kind} fixture named {name!r}; have {fixture_names(kind)}")
        return res.read_text()
    return Path(source).read_text()


def load_graph(source: str) -> Graph:
    return parse_edge_list(_read_text(source, "graph"))


def _parse_matrix_csv(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        data = [[float(x) for x in ln.split(",")] for ln in rows]
    except ValueError as exc:
        raise PipelineError(f"malformed numeric CSV: {exc}") from exc
    if not data or len({len(r) for r in data}) != 1:
        raise PipelineError("CSV rows must be nonempty and of equal length")
    return np.asarray(data, dtype=float)


def load_image(source: str, connectivity: int = 4) -> ImageGrid:
    """CSV of intensities in [0, 1], or an 8-bit PGM (P2/P5) scaled by 1/255."""
    if not source.startswith(FIXTURE_PREFIX) and Path(source).suffix.lower() == ".pgm":
        with Image.open(source) as im:
            if im.mode != "L":
                raise PipelineError(f"expected 8-bit grayscale PGM, got mode {im.mode}")
            pixels = np.asarray(im, dtype=float) / 255.0
        return ImageGrid(pixels, connectivity)
    return ImageGrid(_parse_matrix_csv(_read_text(source, "image")), connectivity)


def load_points(source: str) -> PointCloud:
    return PointCloud(_parse_matrix_csv(_read_text(source, "points")))


_NAMED = re.compile(r"^\s*(bell|ghz|product|random_pure)\s*(?:\(([^)]*)\))?\s*$")


def load_state(source: str) -> DensityMatrix:
    """``bell``, ``ghz(N)``, ``product(N)``, ``random_pure(N, seed)``, a fixture, or a JSON file."""
    m = _NAMED.match(source)
    if m:
        name, args = m.group(1), [int(a) for a in (m.group(2) or "").split(",") if a.strip()]
        if name == "bell":
            return bell_state()
        if name == "ghz" and len(args) == 1:
            return ghz_state(*args)
        if name == "product" and len(args) == 1:
            return product_state(*args)
        if name == "random_pure" and len(args) in (1, 2):
            return random_pure_state(*args)
        raise PipelineError(f"bad arguments for named state {source!r}")
    return parse_state_json(_read_text(source, "state"))


def parse_state_json(text: str) -> DensityMatrix:
    doc = json.loads(text)
    try:
        dims = tuple(int(d) for d in doc.get("local_dims", [2] * int(doc["num_subsystems"])))
        real = np.asarray(doc["real"], dtype=float)
        imag = np.asarray(doc.get("imag", np.zeros_like(real)), dtype=float)
        return DensityMatrix(int(doc["num_subsystems"]), dims, real + 1j * imag)
    except KeyError as exc:
        raise PipelineError(f"density-matrix JSON missing field {exc}") from exc


def state_to_json(rho: DensityMatrix) -> str:
    return json.dumps(
        {
            "num_subsystems": rho.num_subsystems,
            "local_dims": list(rho.local_dims),
            "real": rho.matrix.real.tolist(),
            "imag": rho.matrix.imag.tolist(),
        }
    )
