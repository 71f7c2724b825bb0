"""File formats: edge lists, feature matrices, chain outputs, reports.

All formats are plain text (whitespace edge lists, CSV, JSON) so runs can
be diffed and the weight plots reproduced from the sample files alone.
Vertex ids are 0-based everywhere.
"""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .graph import LabelledNetwork, network_from_edges


class DataFormatError(ValueError):
    """Malformed input data (maps to exit code 2 in the CLI)."""


def parse_edge_list(path):
    """Read 'u v [multiplicity]' lines; '#' comments and blanks are skipped.

    Repeated pairs accumulate multiplicity; u v and v u are the same edge.
    """
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise DataFormatError(f"{path}:{lineno}: expected 'u v [m]', got {raw.rstrip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                m = int(parts[2]) if len(parts) == 3 else 1
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-integer token in {raw.rstrip()!r}") from None
            if u < 0 or v < 0:
                raise DataFormatError(f"{path}:{lineno}: negative vertex id")
            if m <= 0:
                raise DataFormatError(f"{path}:{lineno}: multiplicity must be positive, got {m}")
            edges.append((u, v, m))
    return edges


def _read_feature_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty feature file") from None
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not header or header[0].strip() != "vertex":
        raise DataFormatError(f"{path}: first header column must be 'vertex'")
    return [h.strip() for h in header[1:]], rows


def _vertex_id(path, row, num_vertices, seen):
    try:
        vid = int(row[0])
    except ValueError:
        raise DataFormatError(f"{path}: non-integer vertex id {row[0]!r}") from None
    if not 0 <= vid < num_vertices:
        raise DataFormatError(f"{path}: vertex id {vid} outside [0, {num_vertices})")
    if vid in seen:
        raise DataFormatError(f"{path}: duplicate vertex id {vid}")
    seen.add(vid)
    return vid


def parse_features(path, num_vertices: int):
    """Read a binary feature CSV with header 'vertex,<name1>,...,<nameD>'.

    Every vertex in [0, N) must appear exactly once; entries must be 0 or 1.
    Returns (matrix, names).
    """
    names, rows = _read_feature_rows(path)
    matrix = np.zeros((num_vertices, len(names)), dtype=np.int8)
    seen = set()
    for row in rows:
        if len(row) != len(names) + 1:
            raise DataFormatError(f"{path}: row has {len(row)} cells, expected {len(names) + 1}")
        vid = _vertex_id(path, row, num_vertices, seen)
        for d, cell in enumerate(row[1:]):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise DataFormatError(f"{path}: entry {cell!r} for vertex {vid} is not a binary flag")
            matrix[vid, d] = int(cell)
    if len(seen) != num_vertices:
        missing = sorted(set(range(num_vertices)) - seen)[:5]
        raise DataFormatError(f"{path}: missing vertices {missing}")
    return matrix, tuple(names)


def parse_categorical_features(path, num_vertices: int):
    """Read a categorical CSV and one-hot expand it into binary flags.

    Each column c with observed values v becomes flags named 'c-v'; flag
    order is column order, then sorted values within a column.
    """
    columns, rows = _read_feature_rows(path)
    seen = set()
    values = {}
    for row in rows:
        if len(row) != len(columns) + 1:
            raise DataFormatError(f"{path}: row has {len(row)} cells, expected {len(columns) + 1}")
        vid = _vertex_id(path, row, num_vertices, seen)
        values[vid] = [cell.strip() for cell in row[1:]]
    if len(seen) != num_vertices:
        missing = sorted(set(range(num_vertices)) - seen)[:5]
        raise DataFormatError(f"{path}: missing vertices {missing}")

    names = []
    index = {}
    for c, col in enumerate(columns):
        for val in sorted({values[v][c] for v in range(num_vertices)}):
            index[(c, val)] = len(names)
            names.append(f"{col}-{val}")
    matrix = np.zeros((num_vertices, len(names)), dtype=np.int8)
    for vid in range(num_vertices):
        for c in range(len(columns)):
            matrix[vid, index[(c, values[vid][c])]] = 1
    return matrix, tuple(names)


def load_network(edges_path, features_path=None, categorical_path=None,
                 num_vertices=None) -> LabelledNetwork:
    """Assemble a network from an edge list and optional feature files.

    The vertex count comes from the feature file when given, otherwise from
    num_vertices, otherwise from the largest edge endpoint.
    """
    edges = parse_edge_list(edges_path)
    if num_vertices is None and features_path is None and categorical_path is None:
        num_vertices = 1 + max((max(u, v) for u, v, _ in edges), default=-1)

    feats, names = None, None
    if features_path is not None or categorical_path is not None:
        if num_vertices is None:
            with open(features_path or categorical_path, newline="") as fh:
                num_vertices = max(sum(1 for line in fh if line.strip()) - 1, 0)
        blocks = []
        all_names = []
        if features_path is not None:
            m, n = parse_features(features_path, num_vertices)
            blocks.append(m)
            all_names.extend(n)
        if categorical_path is not None:
            m, n = parse_categorical_features(categorical_path, num_vertices)
            blocks.append(m)
            all_names.extend(n)
        feats = np.hstack(blocks)
        names = tuple(all_names)

    try:
        return network_from_edges(num_vertices, edges, feats, names)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None


def builtin_path(name: str) -> Path:
    """Path to a bundled dataset file."""
    path = resources.files("ffbm").joinpath("data", name)
    if not path.is_file():
        raise DataFormatError(f"no bundled data file named {name!r}")
    return Path(str(path))


def load_polbooks() -> LabelledNetwork:
    """The bundled political-books co-purchasing network with affiliation flags."""
    return load_network(builtin_path("polbooks_edges.txt"),
                        builtin_path("polbooks_features.csv"))


# ---------------------------------------------------------------- writers

def write_edge_list(path, edges, comment=None):
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for u, v, m in edges:
            fh.write(f"{u} {v}\n" if m == 1 else f"{u} {v} {m}\n")


def write_features(path, matrix, names):
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", *names])
        for vid in range(matrix.shape[0]):
            writer.writerow([vid, *(int(x) for x in matrix[vid])])


def write_block_samples(path, samples, retained):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        n = len(samples[0]) if samples else 0
        writer.writerow(["t", *(f"v{i}" for i in range(n))])
        for t, sample in zip(retained, samples):
            writer.writerow([t, *(int(x) for x in sample)])


def write_trace(path, values, column):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", column])
        for t, val in enumerate(values):
            writer.writerow([t, repr(float(val))])


def write_responsibilities(path, matrix):
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", *(f"block{j}" for j in range(matrix.shape[1]))])
        for vid in range(matrix.shape[0]):
            writer.writerow([vid, *(repr(float(x)) for x in matrix[vid])])


def weight_column_names(num_blocks, feature_names):
    return [f"{r}.{name}" for r in range(num_blocks) for name in feature_names]


def write_weight_samples(path, samples, retained, feature_names):
    """Flattened weight samples, one row per retained iteration.

    Columns are named 'block.feature' so the weight plots can be rebuilt
    from this file alone.
    """
    num_blocks = samples[0].shape[0] if samples else 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *weight_column_names(num_blocks, feature_names)])
        for t, w in zip(retained, samples):
            writer.writerow([t, *(repr(float(x)) for x in np.asarray(w).ravel())])


def read_weight_samples(path):
    """Inverse of write_weight_samples: returns (samples, retained, feature_names)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty weight sample file") from None
        if not header or header[0] != "t":
            raise DataFormatError(f"{path}: expected a 't' column first")
        cols = header[1:]
        split_cols = []
        for col in cols:
            blk, _, name = col.partition(".")
            try:
                split_cols.append((int(blk), name))
            except ValueError:
                raise DataFormatError(f"{path}: column {col!r} is not 'block.feature'") from None
        num_blocks = 1 + max(b for b, _ in split_cols)
        names = [name for blk, name in split_cols if blk == 0]
        num_features = len(names)
        if num_blocks * num_features != len(cols):
            raise DataFormatError(f"{path}: inconsistent weight columns")
        samples, retained = [], []
        for row in reader:
            if not row:
                continue
            retained.append(int(row[0]))
            flat = np.array([float(x) for x in row[1:]])
            samples.append(flat.reshape(num_blocks, num_features))
    if not samples:
        raise DataFormatError(f"{path}: no weight samples")
    return samples, retained, tuple(names)


def write_reduction(path, reduction, feature_names):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "name", "score", "kept"])
        kept = set(int(k) for k in reduction.kept)
        for d, score in enumerate(reduction.scores):
            writer.writerow([d, feature_names[d], repr(float(score)), int(d in kept)])


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
