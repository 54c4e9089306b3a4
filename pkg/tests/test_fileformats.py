"""Embedding, matrix-section, and JSON-lines file format contracts."""

import struct

import numpy as np
import pytest

from basiq import fileformats
from basiq.errors import ParseError


def _sample_records(dim=16, count=3, seed=5):
    rng = np.random.default_rng(seed)
    return [
        (f"q{i}", f"is sample {i} ready?", rng.standard_normal(dim))
        for i in range(count)
    ]


def test_text_round_trip_exact(tmp_path):
    path = tmp_path / "emb.txt"
    records = _sample_records()
    fileformats.write_embeddings_text(path, records, 16)
    loaded = fileformats.read_embeddings_text(path)
    assert len(loaded) == 3
    for (wid, wtext, wvec), (rid, rtext, rvec) in zip(records, loaded):
        assert (wid, wtext) == (rid, rtext)
        assert np.array_equal(np.asarray(wvec), rvec)


def test_text_reader_shapes(tmp_path):
    path = tmp_path / "emb.txt"
    fileformats.write_embeddings_text(path, _sample_records(dim=16), 16)
    loaded = fileformats.read_embeddings_text(path)
    assert all(vec.shape == (16,) for _, _, vec in loaded)


def test_text_empty_body(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("dim=16 count=0\n", encoding="utf-8")
    assert fileformats.read_embeddings_text(path) == []


def test_text_wrong_value_count(tmp_path):
    path = tmp_path / "short.txt"
    values = " ".join(["0.5"] * 15)
    path.write_text(f"dim=16 count=1\nq0\thello?\t{values}\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 2"):
        fileformats.read_embeddings_text(path)


def test_text_malformed_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("dims=16 n=1\n", encoding="utf-8")
    with pytest.raises(ParseError, match="header"):
        fileformats.read_embeddings_text(path)


def test_text_count_mismatch(tmp_path):
    path = tmp_path / "miscount.txt"
    path.write_text("dim=2 count=2\nq0\ta?\t1 2\n", encoding="utf-8")
    with pytest.raises(ParseError):
        fileformats.read_embeddings_text(path)


def test_text_duplicate_id(tmp_path):
    path = tmp_path / "dup.txt"
    path.write_text("dim=1 count=2\nq0\ta?\t1\nq0\tb?\t2\n", encoding="utf-8")
    with pytest.raises(ParseError, match="q0"):
        fileformats.read_embeddings_text(path)


def test_text_non_finite_rejected(tmp_path):
    path = tmp_path / "inf.txt"
    path.write_text("dim=2 count=1\nq0\ta?\t1 inf\n", encoding="utf-8")
    with pytest.raises(ParseError):
        fileformats.read_embeddings_text(path)


def test_binary_round_trip(tmp_path):
    path = tmp_path / "emb.bin"
    records = _sample_records()
    fileformats.write_embeddings_binary(path, records, 16)
    loaded = fileformats.read_embeddings_binary(path)
    assert [(r[0], r[1]) for r in loaded] == [(r[0], r[1]) for r in records]
    # payload is 32-bit; loaded values match to float32 precision
    for (_, _, wvec), (_, _, rvec) in zip(records, loaded):
        assert np.array_equal(np.asarray(wvec, dtype=np.float32).astype(np.float64), rvec)


def test_binary_truncation_rejected(tmp_path):
    path = tmp_path / "trunc.bin"
    fileformats.write_embeddings_binary(path, _sample_records(), 16)
    raw = path.read_bytes()
    path.write_bytes(raw[:-7])
    with pytest.raises(ParseError):
        fileformats.read_embeddings_binary(path)


def test_binary_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "trail.bin"
    fileformats.write_embeddings_binary(path, _sample_records(), 16)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(ParseError, match="trailing"):
        fileformats.read_embeddings_binary(path)


def test_binary_bad_magic(tmp_path):
    path = tmp_path / "magic.bin"
    fileformats.write_embeddings_binary(path, _sample_records(), 16)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(ParseError, match="magic"):
        fileformats.read_embeddings_binary(path)


def test_binary_version_check(tmp_path):
    path = tmp_path / "ver.bin"
    fileformats.write_embeddings_binary(path, _sample_records(), 16)
    raw = bytearray(path.read_bytes())
    raw[4:6] = struct.pack("<H", 99)
    path.write_bytes(bytes(raw))
    with pytest.raises(ParseError, match="version"):
        fileformats.read_embeddings_binary(path)


def test_read_embeddings_sniffs_format(tmp_path):
    records = _sample_records(dim=4)
    tpath = tmp_path / "a.txt"
    bpath = tmp_path / "a.bin"
    fileformats.write_embeddings_text(tpath, records, 4)
    fileformats.write_embeddings_binary(bpath, records, 4)
    assert [r[0] for r in fileformats.read_embeddings(tpath)] == ["q0", "q1", "q2"]
    assert [r[0] for r in fileformats.read_embeddings(bpath)] == ["q0", "q1", "q2"]


def test_matrix_sections_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    path = tmp_path / "params.txt"
    sections = {"w_a": rng.standard_normal((3, 4)), "w_b": rng.standard_normal((1, 5))}
    fileformats.write_matrix_sections(path, sections)
    loaded = fileformats.read_matrix_sections(path)
    assert list(loaded) == ["w_a", "w_b"]
    for name, mat in sections.items():
        assert np.array_equal(loaded[name], mat)


def test_matrix_sections_shape_enforced(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("sections=1\nname=w rows=2 cols=2\n1 2\n3\n", encoding="utf-8")
    with pytest.raises(ParseError):
        fileformats.read_matrix_sections(path)


def test_jsonl_round_trip(tmp_path):
    path = tmp_path / "rows.jsonl"
    fileformats.write_jsonl(path, ['{"a": 1}', '{"b": 2}'])
    assert path.read_bytes().endswith(b"\n")
    assert [line for _, line in fileformats.read_jsonl(path)] == ['{"a": 1}', '{"b": 2}']
