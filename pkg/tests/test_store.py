import numpy as np
import pytest

from pnarc.exceptions import LevelCodeError, StoreFormatError
from pnarc.store import (
    EmbeddingStore,
    default_levels,
    pack_embeddings,
    read_store,
    store_from_bytes,
    store_to_bytes,
    unpack_embeddings,
    write_store,
)


def test_paper_storage_arithmetic_17136_bits():
    # 51 embeddings of 112 values at 3 bits each.
    rng = np.random.default_rng(0)
    levels = default_levels(3)
    values = rng.choice(levels, size=(51, 112))
    store = pack_embeddings(values, q=3)
    assert store.payload_bits == 17136


def test_empty_store_zero_bits():
    store = pack_embeddings(np.zeros((0, 0)), q=3)
    assert store.payload_bits == 0
    assert unpack_embeddings(store).size == 0


def test_binary_round_trip_1000_trials():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        t = int(rng.integers(1, 8))
        d = int(rng.integers(1, 40))
        values = rng.choice([-1.0, 1.0], size=(t, d))
        store = pack_embeddings(values, q=1)
        assert np.array_equal(unpack_embeddings(store), values)


def test_multilevel_round_trip_all_q():
    rng = np.random.default_rng(7)
    for q in range(1, 9):
        levels = default_levels(q)
        values = rng.choice(levels, size=(13, 9))
        store = pack_embeddings(values, q=q)
        assert np.array_equal(unpack_embeddings(store), values)


def test_value_outside_level_set_rejected():
    with pytest.raises(LevelCodeError):
        pack_embeddings(np.array([[0.5, -1.0]]), q=1)


def test_payload_bit_length_exact():
    values = np.ones((7, 11))
    store = pack_embeddings(values, q=3, levels=(0.0, 1.0))
    assert store.payload_bits == 7 * 11 * 3
    assert len(store.payload) == (store.payload_bits + 7) // 8


def test_file_format_magic_and_version(tmp_path):
    values = np.random.default_rng(1).choice([-1.0, 1.0], size=(5, 8))
    store = pack_embeddings(values, q=1, topology="square", m=7)
    path = tmp_path / "emb.pnae"
    write_store(store, path)
    raw = path.read_bytes()
    assert raw[:4] == b"PNAE"
    assert raw[4] == 1
    back = read_store(path)
    assert back == store
    assert np.array_equal(unpack_embeddings(back), values)


def test_bad_magic_rejected():
    with pytest.raises(StoreFormatError):
        store_from_bytes(b"XXXX" + b"\x00" * 30)


def test_bytes_round_trip_preserves_header_fields():
    values = np.random.default_rng(3).choice(default_levels(3), size=(4, 6))
    store = pack_embeddings(values, q=3, topology="pinwheel", m=4)
    back = store_from_bytes(store_to_bytes(store))
    assert back.topology == "pinwheel" and back.m == 4
    assert back.q == 3 and back.series_length == 4 and back.n_values == 6
    assert back.levels == store.levels


def test_little_endian_bit_order_within_bytes():
    # Single value 1.0 with levels (-1, 1) is code 1 -> lowest bit of byte 0.
    store = pack_embeddings(np.array([[1.0]]), q=1)
    assert store.payload[0] == 0b00000001
    store2 = pack_embeddings(np.array([[-1.0, 1.0]]), q=1)
    assert store2.payload[0] == 0b00000010


def test_store_invariant_property():
    s = EmbeddingStore(series_length=3, n_values=4, q=2,
                       levels=(0.0, 1.0), payload=b"\x00" * 3)
    assert s.payload_bits == 24
