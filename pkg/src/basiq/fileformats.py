"""Low-level readers and writers for the on-disk formats.

Two formats live here:

* Embedding files hold ``(id, text, vector)`` records.  The text variant
  starts with a header line ``dim=<D> count=<N>`` followed by one
  tab-separated record per line: ``id<TAB>text<TAB>v1 v2 ... vD``.  The
  binary variant carries the same logical fields with little-endian
  32-bit float payloads (see ``EMBEDDING_MAGIC`` below for the exact
  layout).  Both reject dimension mismatches, duplicate ids, and
  non-finite values.

* Matrix-section files hold named real matrices under the same
  header-plus-payload convention: ``sections=<N>`` followed by blocks of
  ``name=<s> rows=<R> cols=<C>`` and R lines of C values.  They back the
  loadable-parameter paths of the encoder and the attention kernel.
"""

import re
import struct

import numpy as np

from .errors import ParseError

EMBEDDING_MAGIC = b"QEMB"
EMBEDDING_VERSION = 1

_HEADER_RE = re.compile(r"^dim=(\d+) count=(\d+)$")
_SECTIONS_RE = re.compile(r"^sections=(\d+)$")
_SECTION_HEADER_RE = re.compile(r"^name=(\S+) rows=(\d+) cols=(\d+)$")


def _parse_values(parts, dim, path, lineno):
    if len(parts) != dim:
        raise ParseError(
            f"{path}: line {lineno}: expected {dim} values, got {len(parts)}"
        )
    try:
        vec = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if not np.all(np.isfinite(vec)):
        raise ParseError(f"{path}: line {lineno}: non-finite value")
    return vec


def read_embeddings_text(path):
    """Parse a text embedding file into a list of (id, text, vector) tuples."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file, expected 'dim=<D> count=<N>' header")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ParseError(f"{path}: line 1: malformed header {lines[0]!r}")
    dim, count = int(m.group(1)), int(m.group(2))
    if dim < 1:
        raise ParseError(f"{path}: line 1: dim must be >= 1")
    body = lines[1:]
    if len(body) != count:
        raise ParseError(
            f"{path}: header declares {count} records but file has {len(body)} lines"
        )
    records = []
    seen = set()
    for i, line in enumerate(body):
        lineno = i + 2
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"{path}: line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        rec_id, text, payload = fields
        if not rec_id:
            raise ParseError(f"{path}: line {lineno}: empty id")
        if rec_id in seen:
            raise ParseError(f"{path}: line {lineno}: duplicate id {rec_id!r}")
        seen.add(rec_id)
        if not text.strip():
            raise ParseError(f"{path}: line {lineno}: empty text")
        vec = _parse_values(payload.split(), dim, path, lineno)
        records.append((rec_id, text, vec))
    return records


def write_embeddings_text(path, records, dim):
    """Write (id, text, vector) tuples as a text embedding file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"dim={dim} count={len(records)}\n")
        for rec_id, text, vec in records:
            if len(vec) != dim:
                raise ValueError(f"record {rec_id!r}: vector length {len(vec)} != dim {dim}")
            payload = " ".join(repr(float(v)) for v in vec)
            fh.write(f"{rec_id}\t{text}\t{payload}\n")


def read_embeddings_binary(path):
    """Parse a binary embedding file into a list of (id, text, vector) tuples.

    Layout: 4-byte magic ``QEMB``, uint16 version, uint32 dim, uint32
    count, then per record a uint32-length-prefixed UTF-8 id, a
    uint32-length-prefixed UTF-8 text, and dim little-endian float32
    values.  Vectors are widened to float64 on load.
    """
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

    if take(4, "magic") != EMBEDDING_MAGIC:
        raise ParseError(f"{path}: bad magic, not a binary embedding file")
    (version,) = struct.unpack("<H", take(2, "version"))
    if version != EMBEDDING_VERSION:
        raise ParseError(f"{path}: unsupported version {version}")
    dim, count = struct.unpack("<II", take(8, "header"))
    if dim < 1:
        raise ParseError(f"{path}: dim must be >= 1")
    records = []
    seen = set()
    for i in range(count):
        (id_len,) = struct.unpack("<I", take(4, f"record {i}: id length"))
        rec_id = take(id_len, f"record {i}: id").decode("utf-8")
        (text_len,) = struct.unpack("<I", take(4, f"record {i}: text length"))
        text = take(text_len, f"record {i}: text").decode("utf-8")
        payload = take(4 * dim, f"record {i}: values")
        vec = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        if not rec_id:
            raise ParseError(f"{path}: record {i}: empty id")
        if rec_id in seen:
            raise ParseError(f"{path}: record {i}: duplicate id {rec_id!r}")
        seen.add(rec_id)
        if not text.strip():
            raise ParseError(f"{path}: record {i}: empty text")
        if not np.all(np.isfinite(vec)):
            raise ParseError(f"{path}: record {i}: non-finite value")
        records.append((rec_id, text, vec))
    if pos != len(blob):
        raise ParseError(f"{path}: {len(blob) - pos} trailing bytes after last record")
    return records


def write_embeddings_binary(path, records, dim):
    """Write (id, text, vector) tuples as a binary embedding file."""
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<H", EMBEDDING_VERSION))
        fh.write(struct.pack("<II", dim, len(records)))
        for rec_id, text, vec in records:
            if len(vec) != dim:
                raise ValueError(f"record {rec_id!r}: vector length {len(vec)} != dim {dim}")
            id_bytes = rec_id.encode("utf-8")
            text_bytes = text.encode("utf-8")
            fh.write(struct.pack("<I", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(struct.pack("<I", len(text_bytes)))
            fh.write(text_bytes)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def read_embeddings(path):
    """Read an embedding file, sniffing text vs binary from the magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == EMBEDDING_MAGIC:
        return read_embeddings_binary(path)
    return read_embeddings_text(path)


def read_matrix_sections(path):
    """Parse a matrix-section file into an ordered dict of name -> 2-D array."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file, expected 'sections=<N>' header")
    m = _SECTIONS_RE.match(lines[0])
    if m is None:
        raise ParseError(f"{path}: line 1: malformed header {lines[0]!r}")
    n_sections = int(m.group(1))
    sections = {}
    lineno = 1
    pos = 1
    for _ in range(n_sections):
        if pos >= len(lines):
            raise ParseError(f"{path}: expected {n_sections} sections, found {len(sections)}")
        header = lines[pos]
        lineno = pos + 1
        mh = _SECTION_HEADER_RE.match(header)
        if mh is None:
            raise ParseError(f"{path}: line {lineno}: malformed section header {header!r}")
        name, rows, cols = mh.group(1), int(mh.group(2)), int(mh.group(3))
        if name in sections:
            raise ParseError(f"{path}: line {lineno}: duplicate section {name!r}")
        if rows < 1 or cols < 1:
            raise ParseError(f"{path}: line {lineno}: rows and cols must be >= 1")
        pos += 1
        if pos + rows > len(lines):
            raise ParseError(f"{path}: section {name!r}: truncated payload")
        data = np.empty((rows, cols), dtype=np.float64)
        for r in range(rows):
            data[r] = _parse_values(lines[pos + r].split(), cols, path, pos + r + 1)
        pos += rows
        sections[name] = data
    if pos != len(lines):
        raise ParseError(f"{path}: {len(lines) - pos} extra lines after last section")
    return sections


def write_matrix_sections(path, sections):
    """Write a dict of name -> array (1-D or 2-D) as a matrix-section file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"sections={len(sections)}\n")
        for name, arr in sections.items():
            a = np.atleast_2d(np.asarray(arr, dtype=np.float64))
            fh.write(f"name={name} rows={a.shape[0]} cols={a.shape[1]}\n")
            for row in a:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def write_jsonl(path, lines):
    """Write pre-serialized JSON lines, one per record, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def read_jsonl(path):
    """Yield (line_number, raw_line) pairs for non-empty lines of a JSON-lines file."""
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line:
                yield i, line
