"""The retrieval dictionary: a dense matrix of unit-normalized question columns.

Duplicate questions are collapsed before the matrix is built, each
surviving embedding is scaled to unit L2 norm, and the original norms
are kept for audit.  Columns are stored contiguously (column-major)
because the solver iterates over them.  A built dictionary is immutable
and safe to share across concurrent solves.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .encoder import QuestionRecord
from .errors import InvalidInputError, ParseError, ShapeError

__all__ = [
    "QuestionRecord",
    "Dictionary",
    "build_dictionary",
    "normalize_question_text",
    "save_dictionary_cache",
    "load_dictionary_cache",
]

CACHE_MAGIC = b"BQDICT"
CACHE_VERSION = 1

UNIT_NORM_TOL = 1e-9


def normalize_question_text(text):
    """Dedup key: trim, collapse whitespace runs, compare case-insensitively."""
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class Dictionary:
    """Unit-column matrix plus parallel id/text/original-norm bookkeeping."""

    matrix: np.ndarray
    ids: tuple
    texts: tuple
    column_norms_original: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ShapeError(f"matrix must be 2-D, got shape {m.shape}")
        dim, n = m.shape
        if n < 1 or dim < 1:
            raise ShapeError("matrix must have at least one row and one column")
        if not m.flags.f_contiguous:
            m = np.asfortranarray(m)
        norms = np.sqrt(np.einsum("ij,ij->j", m, m))
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise InvalidInputError(
                f"column {worst} has norm {norms[worst]!r}, expected 1 within {UNIT_NORM_TOL}"
            )
        ids = tuple(self.ids)
        texts = tuple(self.texts)
        if len(ids) != n or len(texts) != n:
            raise ShapeError("ids and texts must each have one entry per column")
        if len(set(ids)) != n:
            raise InvalidInputError("ids must be unique")
        orig = np.asarray(self.column_norms_original, dtype=np.float64)
        if orig.shape != (n,):
            raise ShapeError("column_norms_original must have one entry per column")
        m.setflags(write=False)
        orig = orig.copy()
        orig.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "texts", texts)
        object.__setattr__(self, "column_norms_original", orig)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_columns(self):
        return self.matrix.shape[1]

    def lookup(self, column_index):
        """Return the (id, text, column vector) triple at a column index."""
        n = self.n_columns
        if not 0 <= column_index < n:
            raise IndexError(f"column index {column_index} out of range [0, {n})")
        return self.ids[column_index], self.texts[column_index], self.matrix[:, column_index]


def build_dictionary(records, dedup="normalized"):
    """Build a Dictionary from question records.

    Records whose text collapses to the same dedup key keep only the
    first occurrence, in input order.  ``dedup`` is ``"normalized"``
    (trim/collapse/case-insensitive) or ``"exact"`` (byte equality).
    """
    if dedup not in ("normalized", "exact"):
        raise InvalidInputError(f"unknown dedup mode {dedup!r}")
    records = list(records)
    if not records:
        raise InvalidInputError("cannot build a dictionary from zero records")
    key_of = normalize_question_text if dedup == "normalized" else (lambda t: t)

    survivors = []
    seen_keys = set()
    seen_ids = set()
    dim = None
    for rec in records:
        if not rec.id:
            raise InvalidInputError("record with empty id")
        if not rec.text.strip():
            raise InvalidInputError(f"record {rec.id!r} has empty text")
        vec = np.asarray(rec.vector, dtype=np.float64)
        if vec.ndim != 1:
            raise ShapeError(f"record {rec.id!r}: vector must be 1-D")
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ShapeError(
                f"record {rec.id!r}: vector length {vec.shape[0]} != {dim} of earlier records"
            )
        if not np.all(np.isfinite(vec)):
            raise InvalidInputError(f"record {rec.id!r}: non-finite vector")
        key = key_of(rec.text)
        if key in seen_keys:
            continue
        seen_keys.add(key)
        if rec.id in seen_ids:
            raise InvalidInputError(f"duplicate record id {rec.id!r}")
        seen_ids.add(rec.id)
        survivors.append((rec.id, rec.text, vec))

    n = len(survivors)
    matrix = np.empty((dim, n), dtype=np.float64, order="F")
    norms = np.empty(n, dtype=np.float64)
    for j, (rec_id, _, vec) in enumerate(survivors):
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise InvalidInputError(f"record {rec_id!r} has a zero-norm vector")
        matrix[:, j] = vec / norm
        norms[j] = norm
    return Dictionary(
        matrix=matrix,
        ids=tuple(s[0] for s in survivors),
        texts=tuple(s[1] for s in survivors),
        column_norms_original=norms,
    )


def _pack_str(s):
    b = s.encode("utf-8")
    return struct.pack("<I", len(b)) + b


def save_dictionary_cache(d, path):
    """Serialize a dictionary to a binary cache file.

    Matrix and norms are stored as raw little-endian float64 so a reload
    reproduces them bit-identically.
    """
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<HII", CACHE_VERSION, d.dim, d.n_columns))
        for rec_id, text in zip(d.ids, d.texts):
            fh.write(_pack_str(rec_id))
            fh.write(_pack_str(text))
        fh.write(np.asarray(d.column_norms_original, dtype="<f8").tobytes())
        fh.write(np.asarray(d.matrix, dtype="<f8").tobytes(order="F"))


def load_dictionary_cache(path):
    """Load a dictionary cache written by ``save_dictionary_cache``."""
    with open(path, "rb") as fh:
        blob = fh.read()
    pos = 0

    def take(n, what):
        nonlocal pos
        if pos + n > len(blob):
            raise ParseError(f"{path}: truncated while reading {what}")
        out = blob[pos : pos + n]
        pos += n
        return out

    if take(len(CACHE_MAGIC), "magic") != CACHE_MAGIC:
        raise ParseError(f"{path}: bad magic, not a dictionary cache")
    version, dim, n = struct.unpack("<HII", take(10, "header"))
    if version != CACHE_VERSION:
        raise ParseError(f"{path}: unsupported cache version {version}")
    ids = []
    texts = []
    for i in range(n):
        (id_len,) = struct.unpack("<I", take(4, f"column {i}: id length"))
        ids.append(take(id_len, f"column {i}: id").decode("utf-8"))
        (text_len,) = struct.unpack("<I", take(4, f"column {i}: text length"))
        texts.append(take(text_len, f"column {i}: text").decode("utf-8"))
    norms = np.frombuffer(take(8 * n, "norms"), dtype="<f8").copy()
    matrix = (
        np.frombuffer(take(8 * dim * n, "matrix"), dtype="<f8")
        .reshape((dim, n), order="F")
        .copy(order="F")
    )
    if pos != len(blob):
        raise ParseError(f"{path}: {len(blob) - pos} trailing bytes")
    return Dictionary(
        matrix=matrix, ids=tuple(ids), texts=tuple(texts), column_norms_original=norms
    )
