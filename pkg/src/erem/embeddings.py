"""Embedding tables, the EREMEMB1 file format, and cosine cost matrices.

EREMEMB1 layout: 8-byte ASCII magic ``EREMEMB1``, little-endian uint32
row count, little-endian uint32 dimension, then ``count * dim`` IEEE-754
float32 values in row-major order (row order = graph index order).  The
text fallback is ``index<TAB>comma-separated decimals`` with every index
``0..count-1`` present exactly once.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DataError, FormatError
from .kg import KnowledgeGraph

MAGIC = b"EREMEMB1"
_HEADER = struct.Struct("<8sII")

_KIND_CODES = {"entity": 0, "relation": 1}


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EmbeddingTable:
    """Dense real vectors, one row per entity or relation index."""

    vectors: np.ndarray

    def __post_init__(self):
        v = self.vectors
        if v.ndim != 2:
            raise ValueError(f"embedding table must be 2-D, got shape {v.shape}")
        if not np.isfinite(v).all():
            bad = int(np.argwhere(~np.isfinite(v).all(axis=1))[0][0])
            raise DataError(f"non-finite value in embedding row {bad}")
        object.__setattr__(self, "vectors", _freeze(v))

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class CostMatrix:
    """A dense m-by-n alignment cost matrix with finite entries."""

    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {e.shape}")
        if not np.isfinite(e).all():
            raise DataError("non-finite entry in cost matrix")
        object.__setattr__(self, "entries", _freeze(e))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Serialize a 2-D float array in the EREMEMB1 container."""
    m = np.asarray(matrix, dtype=np.float32)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {m.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, m.shape[0], m.shape[1]))
        fh.write(m.tobytes(order="C"))


def read_matrix(path: str | Path) -> np.ndarray:
    """Read an EREMEMB1 container back into a float64 array."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size or blob[:8] != MAGIC:
        raise FormatError(f"{path}: missing EREMEMB1 magic")
    _, count, dim = _HEADER.unpack_from(blob)
    expected = _HEADER.size + 4 * count * dim
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {count}x{dim}, found {len(blob)}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.astype(np.float64).reshape(count, dim)


def _parse_text_table(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: neither EREMEMB1 binary nor UTF-8 text table") from None
    rows: dict[int, list[float]] = {}
    dim: int | None = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise FormatError(f"{path}: line {line_no}: expected 'index<TAB>values'")
        try:
            index = int(cols[0])
            values = [float(v) for v in cols[1].split(",")]
        except ValueError:
            raise FormatError(f"{path}: line {line_no}: malformed row") from None
        if index in rows:
            raise FormatError(f"{path}: line {line_no}: duplicate index {index}")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise FormatError(f"{path}: line {line_no}: expected {dim} values, got {len(values)}")
        rows[index] = values
    if not rows:
        raise FormatError(f"{path}: empty embedding table")
    count = len(rows)
    if sorted(rows) != list(range(count)):
        raise ConsistencyError(f"{path}: row indices do not cover 0..{count - 1}")
    return np.array([rows[i] for i in range(count)], dtype=np.float64)


def load_embedding_table(path: str | Path, expected_count: int) -> EmbeddingTable:
    """Load an embedding table, checking the row count against the graph.

    Binary EREMEMB1 is detected by magic; anything else is parsed as the
    text fallback.
    """
    blob_head = Path(path).open("rb").read(8)
    if blob_head == MAGIC:
        vectors = read_matrix(path)
    else:
        vectors = _parse_text_table(path)
    if vectors.shape[0] != expected_count:
        raise ConsistencyError(
            f"{path}: expected {expected_count} rows, file holds {vectors.shape[0]}"
        )
    if not np.isfinite(vectors).all():
        bad = int(np.argwhere(~np.isfinite(vectors).all(axis=1))[0][0])
        raise DataError(f"{path}: non-finite value in row {bad}")
    return EmbeddingTable(vectors)


def save_embedding_table(path: str | Path, table: EmbeddingTable) -> None:
    write_matrix(path, table.vectors)


def save_embedding_text(path: str | Path, table: EmbeddingTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, row in enumerate(table.vectors):
            fh.write(f"{i}\t{','.join(repr(float(v)) for v in row)}\n")


def _unit_rows(vectors: np.ndarray, side: str) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise DataError(f"zero-norm row {int(zero[0])} in {side} embedding table")
    return vectors / norms[:, None]


def cosine_cost_matrix(src: EmbeddingTable, tgt: EmbeddingTable) -> CostMatrix:
    """Pairwise ``1 - cosine`` costs between two tables.

    Computed as half the squared distance between unit-normalized rows,
    which is algebraically identical and keeps the cost of bitwise-equal
    rows at exactly zero.  Entries land in [0, 2].
    """
    if src.dim != tgt.dim:
        raise ValueError(f"dimension mismatch: {src.dim} vs {tgt.dim}")
    u = _unit_rows(src.vectors, "source")
    w = _unit_rows(tgt.vectors, "target")
    m, n = u.shape[0], w.shape[0]
    out = np.empty((m, n), dtype=np.float64)
    # chunk source rows so the (chunk, n, dim) difference tensor stays small
    chunk = max(1, int(2**24 // max(1, n * u.shape[1])))
    for start in range(0, m, chunk):
        block = u[start : start + chunk]
        diff = block[:, None, :] - w[None, :, :]
        out[start : start + chunk] = 0.5 * np.einsum("ijk,ijk->ij", diff, diff)
    np.minimum(out, 2.0, out=out)
    return CostMatrix(out)


def _rng(seed: int, kind: str, role: int) -> np.random.Generator:
    # Philox4x64-10 counter-based stream; stream key = (seed, kind, role)
    ss = np.random.SeedSequence(seed, spawn_key=(_KIND_CODES[kind], role))
    return np.random.Generator(np.random.Philox(ss))


def synth_embedding_table(
    g: KnowledgeGraph,
    kind: str,
    seed: int,
    dim: int,
    noise_sigma: float = 0.0,
    twin_of: tuple[EmbeddingTable, Sequence[int]] | None = None,
) -> EmbeddingTable:
    """Deterministic synthetic embeddings for one side of a graph pair.

    Without ``twin_of``, rows are unit-sphere samples from a Philox
    counter-based stream keyed by (seed, kind).  With ``twin_of =
    (base, perm)``, row ``i`` is ``base[perm[i]]`` plus isotropic gaussian
    noise of scale ``noise_sigma``, so ``perm`` is the ground-truth map
    from this table's rows back to the base table's rows.
    """
    if kind not in _KIND_CODES:
        raise ValueError(f"kind must be 'entity' or 'relation', got {kind!r}")
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")
    count = g.num_entities if kind == "entity" else g.num_relations

    if twin_of is None:
        rng = _rng(seed, kind, role=0)
        rows = rng.standard_normal((count, dim))
        rows /= np.linalg.norm(rows, axis=1)[:, None]
        return EmbeddingTable(rows)

    base, perm = twin_of
    perm = np.asarray(perm, dtype=np.int64)
    if base.dim != dim:
        raise ValueError(f"twin dim {dim} differs from base dim {base.dim}")
    if perm.shape != (count,) or not np.array_equal(np.sort(perm), np.arange(count)):
        raise ValueError("permutation must be a bijection onto the graph's index space")
    if base.count != count:
        raise ValueError(f"base table has {base.count} rows, graph needs {count}")
    rows = base.vectors[perm].copy()
    if noise_sigma > 0:
        rng = _rng(seed, kind, role=1)
        rows += rng.normal(0.0, noise_sigma, size=(count, dim))
    return EmbeddingTable(rows)
