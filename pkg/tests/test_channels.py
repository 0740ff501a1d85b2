"""Substitution, deletion, and insertion channels plus the quaternary split."""

import itertools
import math

import numpy as np
import pytest

from genoweave.channels import (
    ERASURE,
    ChannelSpec,
    ReceivedStrand,
    apply_channel_pool,
    bsc_apply,
    bsc_pool,
    delete_apply,
    delete_at,
    delete_pool,
    delete_pool_coincident,
    dna_pool_from_text,
    dna_pool_to_text,
    insert_apply,
    insert_at,
    insert_pool,
    llr_of,
    llr_table,
    pool_from_text,
    pool_to_text,
    quaternary_merge,
    quaternary_split,
    symbols_to_llrs,
)
from genoweave.rates import binom_cdf


def _is_subsequence(short, long):
    it = iter(long)
    return all(any(x == y for y in it) for x in short)


class _ForcedRng:
    """Stands in for a Generator; replays scripted random() and integers()."""

    def __init__(self, uniforms, ints=()):
        self._uniforms = list(uniforms)
        self._ints = list(ints)

    def random(self, size):
        assert size == len(self._uniforms)
        return np.array(self._uniforms)

    def integers(self, low, high, size=None, dtype=int):
        assert size == len(self._ints)
        return np.array(self._ints, dtype=dtype)


# ---------------------------------------------------------------------------
# per-strand channels


def test_bsc_identity_at_zero():
    s = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    out = bsc_apply(s, 0.0, np.random.default_rng(0))
    assert (out == s).all()


def test_bsc_flip_fraction_concentrates():
    rng = np.random.default_rng(10)
    s = np.zeros(100_000, dtype=np.uint8)
    out = bsc_apply(s, 0.5, rng)
    sigma = math.sqrt(100_000 * 0.25)
    assert abs(int(out.sum()) - 50_000) <= 3 * sigma


def test_bsc_rejects_delta_one():
    with pytest.raises(ValueError):
        bsc_apply(np.zeros(4, dtype=np.uint8), 1.0, np.random.default_rng(0))


def test_delete_identity_at_zero():
    s = np.array([1, 0, 1], dtype=np.uint8)
    r = delete_apply(s, 0.0, np.random.default_rng(0))
    assert (r.symbols == s).all()
    assert len(r) == 3 and r.original_length == 3


def test_delete_output_is_subsequence():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = rng.integers(0, 2, size=256, dtype=np.uint8)
        r = delete_apply(s, 0.2, rng)
        assert _is_subsequence(r.symbols.tolist(), s.tolist())


def test_delete_count_concentrates():
    # 10^4 strands of length 256 at 1 percent
    rng = np.random.default_rng(12)
    total = removed = 0
    for _ in range(10_000 // 100):
        pool = rng.integers(0, 2, size=(100, 256), dtype=np.uint8)
        _, lengths = delete_pool(pool, 0.01, rng)
        removed += int((256 - lengths).sum())
        total += 100 * 256
    mean = total * 0.01
    sigma = math.sqrt(total * 0.01 * 0.99)
    assert abs(removed - mean) <= 3 * sigma


def test_delete_run_collapses():
    # a run of zeros loses one symbol: same run, one shorter
    s = np.zeros(6, dtype=np.uint8)
    r = delete_at(s, 3)
    assert (r.symbols == 0).all() and len(r) == 5
    assert (r.padded() == [0, 0, 0, 0, 0, ERASURE]).all()


def test_delete_at_exact_position():
    s = np.array([0, 1, 0, 0, 1], dtype=np.uint8)
    assert delete_at(s, 1).symbols.tolist() == [0, 0, 0, 1]
    assert delete_at(s, 4).symbols.tolist() == [0, 1, 0, 0]
    with pytest.raises(ValueError):
        delete_at(s, 5)


def test_insert_identity_at_zero():
    s = np.array([1, 0, 1], dtype=np.uint8)
    r = insert_apply(s, 0.0, np.random.default_rng(0))
    assert (r.symbols == s).all()


def test_insert_placement_is_before_the_slot():
    # forced pattern: insertions before slots 0 and 2 of 0101
    rng = _ForcedRng(uniforms=[0.0, 0.9, 0.0, 0.9], ints=[1, 0, 1, 0])
    r = insert_apply(np.array([0, 1, 0, 1], dtype=np.uint8), 0.5, rng)
    assert r.symbols.tolist() == [1, 0, 1, 1, 0, 1]
    assert r.original_length == 4


def test_insert_before_first_position_shifts_all():
    # one insertion before position 0: original symbol 1 shows up at index 1
    s = np.array([1, 0, 1, 1], dtype=np.uint8)
    r = insert_at(s, 0, 0)
    assert r.symbols.tolist() == [0, 1, 0, 1, 1]
    assert r.symbols[1] == s[0]


def test_insert_input_is_subsequence():
    rng = np.random.default_rng(13)
    for _ in range(50):
        s = rng.integers(0, 2, size=256, dtype=np.uint8)
        r = insert_apply(s, 0.2, rng)
        assert len(r) >= 256
        assert _is_subsequence(s.tolist(), r.symbols.tolist())


def test_insert_count_concentrates():
    rng = np.random.default_rng(14)
    total = added = 0
    for _ in range(100):
        pool = rng.integers(0, 2, size=(100, 256), dtype=np.uint8)
        _, lengths = insert_pool(pool, 0.01, rng)
        added += int((lengths - 256).sum())
        total += 100 * 256
    mean = total * 0.01
    sigma = math.sqrt(total * 0.01 * 0.99)
    assert abs(added - mean) <= 3 * sigma


def test_deletion_length_distribution_chi_square():
    # |output| = 256 - Bin(256, delta); chi-square against the binomial law
    rng = np.random.default_rng(15)
    for delta, seedless_crit in ((0.01, 16.27), (0.1, 16.27)):
        pool = rng.integers(0, 2, size=(2000, 256), dtype=np.uint8)
        _, lengths = delete_pool(pool, delta, rng)
        counts = 256 - lengths
        # five bins with edges at the quartile-ish deletion counts
        mean = 256 * delta
        sd = math.sqrt(256 * delta * (1 - delta))
        edges = [mean - 1.5 * sd, mean - 0.5 * sd, mean + 0.5 * sd, mean + 1.5 * sd]
        edges = [int(round(e)) for e in edges]
        observed = np.zeros(5)
        expected = np.zeros(5)
        prev_cdf = 0.0
        prev_edge = -1
        for i, edge in enumerate(edges + [256]):
            observed[i] = ((counts > prev_edge) & (counts <= edge)).sum()
            cdf = binom_cdf(256, delta, edge)
            expected[i] = 2000 * (cdf - prev_cdf)
            prev_cdf, prev_edge = cdf, edge
        assert expected.min() > 5
        chi2 = float((((observed - expected) ** 2) / expected).sum())
        # chi-square df=4, 99.7th percentile
        assert chi2 < seedless_crit, (delta, chi2)


# ---------------------------------------------------------------------------
# LLRs


def test_llr_known_value():
    assert llr_of(0, 0.01) == pytest.approx(math.log(99.0), rel=1e-14)


def test_llr_sign_symmetry_and_erasure():
    for delta in (0.001, 0.01, 0.1, 0.4999):
        assert llr_of(0, delta) == -llr_of(1, delta)
        assert llr_of(ERASURE, delta) == 0.0
    assert llr_of(0, 0.4999) == pytest.approx(0.0, abs=1e-3)


def test_llr_table_layout():
    t = llr_table(0.01)
    assert t[0] == llr_of(0, 0.01)
    assert t[1] == llr_of(1, 0.01)
    assert t[2] == 0.0


def test_llr_rejects_out_of_domain():
    for bad in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(ValueError):
            llr_of(0, bad)
    with pytest.raises(ValueError):
        llr_of(3, 0.01)


def test_symbols_to_llrs_vectorized():
    sym = np.array([[0, 1], [ERASURE, 0]], dtype=np.uint8)
    out = symbols_to_llrs(sym, 0.1)
    assert out.shape == (2, 2)
    assert out[0, 0] == llr_of(0, 0.1)
    assert out[1, 0] == 0.0
    with pytest.raises(ValueError):
        symbols_to_llrs(np.array([5]), 0.1)


# ---------------------------------------------------------------------------
# quaternary decomposition


def test_quaternary_split_known_mapping():
    real, imag = quaternary_split("ACGT")
    assert real.tolist() == [0, 1, 0, 1]
    assert imag.tolist() == [0, 0, 1, 1]
    assert quaternary_merge(real, imag) == "ACGT"


def test_quaternary_all_a_is_all_zero():
    real, imag = quaternary_split("AAAA")
    assert not real.any() and not imag.any()


def test_quaternary_bijection_exhaustive_length4():
    for letters in itertools.product("ACGT", repeat=4):
        s = "".join(letters)
        assert quaternary_merge(*quaternary_split(s)) == s


def test_quaternary_bijection_randomized_length256():
    rng = np.random.default_rng(16)
    letters = np.array(list("ACGT"))
    for _ in range(100):
        s = "".join(rng.choice(letters, size=256))
        real, imag = quaternary_split(s)
        assert quaternary_merge(real, imag) == s


def test_quaternary_merge_then_split_roundtrip():
    rng = np.random.default_rng(17)
    real = rng.integers(0, 2, size=64, dtype=np.uint8)
    imag = rng.integers(0, 2, size=64, dtype=np.uint8)
    r2, i2 = quaternary_split(quaternary_merge(real, imag))
    assert (r2 == real).all() and (i2 == imag).all()


def test_quaternary_split_rejects_other_letters():
    with pytest.raises(ValueError):
        quaternary_split("ACGU")


# ---------------------------------------------------------------------------
# pool channels


def test_pool_channels_identity_at_zero():
    rng = np.random.default_rng(18)
    pool = rng.integers(0, 2, size=(8, 32), dtype=np.uint8)
    obs, lengths = bsc_pool(pool, 0.0, np.random.default_rng(1))
    assert (obs == pool).all() and (lengths == 32).all()
    obs, lengths = delete_pool(pool, 0.0, np.random.default_rng(1))
    assert (obs == pool).all() and (lengths == 32).all()
    obs, lengths = insert_pool(pool, 0.0, np.random.default_rng(1))
    assert (obs[:, :32] == pool).all() and (lengths == 32).all()
    assert (obs[:, 32:] == ERASURE).all()


def test_delete_pool_rows_are_padded_subsequences():
    rng = np.random.default_rng(19)
    pool = rng.integers(0, 2, size=(20, 64), dtype=np.uint8)
    obs, lengths = delete_pool(pool, 0.15, rng)
    assert obs.shape == pool.shape
    for row, sent, ln in zip(obs, pool, lengths):
        assert (row[ln:] == ERASURE).all()
        assert (row[:ln] != ERASURE).all()
        assert _is_subsequence(row[:ln].tolist(), sent.tolist())


def test_insert_pool_rows_contain_input():
    rng = np.random.default_rng(20)
    pool = rng.integers(0, 2, size=(20, 64), dtype=np.uint8)
    obs, lengths = insert_pool(pool, 0.15, rng)
    assert obs.shape == (20, 128)
    for row, sent, ln in zip(obs, pool, lengths):
        assert ln >= 64
        assert (row[ln:] == ERASURE).all()
        assert _is_subsequence(sent.tolist(), row[:ln].tolist())


def test_delete_pool_coincident_shares_the_kept_set():
    rng = np.random.default_rng(21)
    letters = np.array(list("ACGT"))
    strands = ["".join(rng.choice(letters, size=32)) for _ in range(16)]
    parts = [quaternary_split(s) for s in strands]
    real = np.stack([p[0] for p in parts])
    imag = np.stack([p[1] for p in parts])
    (obs_r, len_r), (obs_i, len_i) = delete_pool_coincident(real, imag, 0.2,
                                                            np.random.default_rng(3))
    assert (len_r == len_i).all()
    for k, sent in enumerate(strands):
        got = quaternary_merge(obs_r[k, :len_r[k]], obs_i[k, :len_i[k]])
        # whole letters disappear: the merged residue is a letter subsequence
        assert _is_subsequence(got, sent)


def test_apply_channel_pool_dispatch_matches_components():
    rng = np.random.default_rng(22)
    pool = rng.integers(0, 2, size=(6, 16), dtype=np.uint8)
    for kind, func in (("substitution", bsc_pool), ("deletion", delete_pool),
                       ("insertion", insert_pool)):
        a = apply_channel_pool(pool, ChannelSpec(kind, 0.1), np.random.default_rng(9))
        b = func(pool, 0.1, np.random.default_rng(9))
        assert (a[0] == b[0]).all() and (a[1] == b[1]).all()


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec("duplication", 0.1)
    with pytest.raises(ValueError):
        ChannelSpec("deletion", 1.0)


# ---------------------------------------------------------------------------
# received strands and text round trips


def test_received_strand_padding_and_len():
    r = ReceivedStrand(symbols=np.array([1, 0], dtype=np.uint8), original_length=4)
    assert len(r) == 2
    assert r.padded().tolist() == [1, 0, ERASURE, ERASURE]
    assert r.padded(6).tolist() == [1, 0, ERASURE, ERASURE, ERASURE, ERASURE]


def test_received_strand_longer_than_nominal_keeps_all():
    r = ReceivedStrand(symbols=np.array([1, 0, 1], dtype=np.uint8), original_length=2)
    assert r.padded().tolist() == [1, 0, 1]


def test_received_strand_rejects_nonbinary():
    with pytest.raises(ValueError):
        ReceivedStrand(symbols=np.array([0, 2], dtype=np.uint8), original_length=2)


def test_pool_text_roundtrip_with_erasures():
    rng = np.random.default_rng(23)
    pool = rng.integers(0, 2, size=(5, 12), dtype=np.uint8)
    obs, _ = delete_pool(pool, 0.3, rng)
    text = pool_to_text(obs)
    assert set(text) <= {"0", "1", "?", "\n"}
    back = pool_from_text(text)
    assert (back == obs).all()


def test_pool_text_rejects_ragged_and_bad_chars():
    with pytest.raises(ValueError):
        pool_from_text("01\n011\n")
    with pytest.raises(ValueError):
        pool_from_text("01\n0x\n")


def test_dna_pool_text_roundtrip():
    strands = ["ACGT", "TTAA", "CGCG"]
    text = dna_pool_to_text(strands)
    assert dna_pool_from_text(text) == strands
    with pytest.raises(ValueError):
        dna_pool_from_text("ACGT\nACGU\n")
