"""CSV serialization for solutions and probes, plus content digests.

Values are written with 17 significant digits, so float64 round-trips
exactly.  Vertex ids may contain commas (lattice coordinates), hence the
csv module with standard quoting rather than naive joins.
"""

from __future__ import annotations

import csv
import hashlib
import json

import numpy as np

from .errors import DimensionMismatch, UnknownVertex
from .graph import WeightedGraph


def _fmt(v: float) -> str:
    # fixed 17 significant digits; exact float64 round-trip
    return format(float(v), ".16e")


def write_solution_csv(path, G: WeightedGraph, u) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex_id", "value"])
        for i, vid in enumerate(G.vertex_ids):
            w.writerow([vid, _fmt(u[i])])


def read_solution_csv(path, G: WeightedGraph) -> np.ndarray:
    values = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["vertex_id", "value"]:
            raise DimensionMismatch(f"{path}: expected header vertex_id,value")
        for row in reader:
            if not row:
                continue
            vid, val = row[0], float(row[1])
            if vid not in G.index:
                raise UnknownVertex(f"{path}: vertex {vid!r} not in graph")
            values[vid] = val
    if len(values) != G.n_vertices:
        raise DimensionMismatch(
            f"{path}: has {len(values)} vertices, graph has {G.n_vertices}"
        )
    return np.array([values[vid] for vid in G.vertex_ids])


def write_ray_csv(path, probe) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "J"])
        for tk, Jk in zip(probe.t, probe.energies):
            w.writerow([_fmt(tk), _fmt(Jk)])


def write_rim_csv(path, probe) -> None:
    header = {
        "radius": probe.radius,
        "tau": probe.tau,
        "rho": probe.rho,
        "delta": probe.delta,
    }
    if probe.r_eps is not None:
        header["r_eps"] = probe.r_eps
        header["delta_eps"] = probe.delta_eps
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["sample_index", "J"])
        for i, Jk in enumerate(probe.energies):
            w.writerow([i, _fmt(Jk)])


def sha256_of_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
