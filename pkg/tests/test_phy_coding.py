import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltebench.phy import crc, qpp, ratematch, segmentation, turbo
from oracles import bytes_to_bits, crc24a_long_division, qpp_direct, rate_match_direct, rsc_direct

bitlists = st.lists(st.integers(0, 1), min_size=1, max_size=600)

# frozen outputs of the independent oracles (tests/oracles.py)
CRC_A5X5 = 0xECE653
RSC_IMPULSE_PARITY = [1, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0,
                      1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0]
RSC_IMPULSE_TAIL_X = [0, 0, 1]
RSC_IMPULSE_TAIL_Z = [0, 1, 1]


# --- CRC-24A -------------------------------------------------------------

@given(bitlists)
def test_crc_attach_then_check(bits):
    assert crc.crc24a_check(crc.crc24a_attach(np.array(bits, np.uint8)))


def test_crc_zero_message():
    out = crc.crc24a_attach(np.zeros(100, np.uint8))
    assert out.size == 124 and not out.any()


def test_crc_long_division_oracle():
    bits = np.array(bytes_to_bits(b"\xa5" * 5), np.uint8)
    assert crc24a_long_division(list(bits)) == CRC_A5X5
    assert crc.crc24a_remainder(bits) == CRC_A5X5


@given(bitlists)
@settings(max_examples=50)
def test_crc_matches_oracle(bits):
    assert crc.crc24a_remainder(np.array(bits, np.uint8)) == crc24a_long_division(bits)


def test_crc_single_bit_detection_exhaustive(rng):
    block = crc.crc24a_attach(rng.integers(0, 2, 152, dtype=np.uint8))
    for i in range(block.size):
        bad = block.copy()
        bad[i] ^= 1
        assert not crc.crc24a_check(bad), i


# --- segmentation ---------------------------------------------------------

def test_single_code_block_for_all_tbs():
    from ltebench.params import tbs_for_mcs

    for mcs in range(29):
        c, k, filler = segmentation.segmentation_sizes(tbs_for_mcs(mcs) + 24)
        assert c == 1 and filler == 0 and k == tbs_for_mcs(mcs) + 24


def test_filler_rule():
    assert segmentation.segmentation_sizes(1024) == (1, 1024, 0)
    assert segmentation.segmentation_sizes(1021) == (1, 1024, 3)
    blocks = segmentation.segment_code_blocks(np.ones(1021, np.uint8))
    assert len(blocks) == 1 and blocks[0].filler == 3 and blocks[0].k == 1024
    assert not blocks[0].bits[:3].any()


@given(st.integers(1, 14000))
@settings(max_examples=40)
def test_segment_desegment(n):
    bits = np.random.default_rng(n).integers(0, 2, n, dtype=np.uint8)
    blocks = segmentation.segment_code_blocks(bits)
    assert all(b.k in qpp.valid_block_sizes() for b in blocks)
    np.testing.assert_array_equal(segmentation.desegment(blocks), bits)


# --- QPP ------------------------------------------------------------------

def test_qpp_k40():
    f1, f2 = qpp.qpp_coefficients()[40]
    assert (f1, f2) == (3, 10)
    pi = qpp.qpp_permutation(40)
    assert pi[0] == 0
    assert pi.tolist() == qpp_direct(40, f1, f2)


def test_qpp_bijective_for_all_k():
    sizes = qpp.valid_block_sizes()
    assert len(sizes) == 188 and sizes[0] == 40 and sizes[-1] == 6144
    for k, (f1, f2) in qpp.qpp_coefficients().items():
        pi = qpp.qpp_permutation(k)
        assert np.array_equal(np.sort(pi), np.arange(k)), k
        assert pi.tolist() == qpp_direct(k, f1, f2)


@given(st.sampled_from(qpp.valid_block_sizes()[:60]))
@settings(max_examples=30)
def test_qpp_inverse(k):
    x = np.random.default_rng(k).normal(size=k)
    np.testing.assert_array_equal(qpp.qpp_deinterleave(qpp.qpp_interleave(x)), x)


def test_qpp_unknown_k():
    with pytest.raises(ValueError):
        qpp.qpp_permutation(41)


# --- turbo ----------------------------------------------------------------

def test_turbo_zero_input():
    cw = turbo.turbo_encode(np.zeros(40, np.uint8))
    assert cw.flat().size == 132 and not cw.flat().any()


def test_turbo_impulse_against_recursion_oracle():
    u = np.zeros(40, np.uint8)
    u[0] = 1
    _, z, tail = rsc_direct(list(u))
    assert z == RSC_IMPULSE_PARITY and tail == RSC_IMPULSE_TAIL_X + RSC_IMPULSE_TAIL_Z
    cw = turbo.turbo_encode(u)
    assert cw.parity1[:40].tolist() == RSC_IMPULSE_PARITY
    _, z2, tail2 = rsc_direct(list(u[qpp.qpp_permutation(40)]))
    assert cw.parity2[:40].tolist() == z2
    # 36.212 tail layout: x_K, z_K, x_K+1, z_K+1, ... spread over d0, d1, d2
    d0, d1, d2 = cw.systematic, cw.parity1, cw.parity2
    x1, z1 = tail[:3], tail[3:]
    x2, zz2 = tail2[:3], tail2[3:]
    assert [d0[40], d1[40], d2[40], d0[41], d1[41], d2[41]] == [x1[0], z1[0], x1[1], z1[1], x1[2], z1[2]]
    assert [d0[42], d1[42], d2[42], d0[43], d1[43], d2[43]] == [x2[0], zz2[0], x2[1], zz2[1], x2[2], zz2[2]]


@given(st.sampled_from([40, 48, 104, 512]), st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_turbo_encoder_matches_oracle(k, seed):
    u = np.random.default_rng(seed).integers(0, 2, k, dtype=np.uint8)
    cw = turbo.turbo_encode(u)
    x, z, _ = rsc_direct(list(u))
    assert cw.systematic[:k].tolist() == x and cw.parity1[:k].tolist() == z


def test_turbo_decode_noiseless_k40_exhaustive():
    rng = np.random.default_rng(64)
    for _ in range(64):
        x = rng.integers(0, 2, 40, dtype=np.uint8)
        llr = 20.0 * (1.0 - 2.0 * turbo.turbo_encode(x).flat())
        res = turbo.turbo_decode(llr, max_iterations=1, check_crc=False)
        np.testing.assert_array_equal(res.bits, x)


def test_turbo_decode_all_zero_llrs_tie_rule():
    res = turbo.turbo_decode(np.zeros(132), max_iterations=3, check_crc=False)
    assert not res.bits.any()
    again = turbo.turbo_decode(np.zeros(132), max_iterations=3, check_crc=False)
    np.testing.assert_array_equal(res.llr, again.llr)


def test_turbo_decode_invalid_length():
    with pytest.raises(ValueError):
        turbo.turbo_decode(np.zeros(131))


def test_turbo_iterations_help(rng):
    # K = 1024, rate 1/3, Eb/N0 around 0.5 dB: iterating must not hurt
    k = 1024
    err = {1: 0, 5: 0}
    for _ in range(20):
        x = rng.integers(0, 2, k, dtype=np.uint8)
        s = 1.0 - 2.0 * turbo.turbo_encode(x).flat()
        var = 1.4
        y = s + rng.normal(scale=np.sqrt(var), size=s.size)
        for it in err:
            err[it] += int(np.count_nonzero(turbo.turbo_decode(2 * y / var, it, check_crc=False).bits != x))
    assert err[5] < err[1]


# --- rate matching ----------------------------------------------------------

def test_column_permutation():
    from oracles import subblock_perm_direct

    assert ratematch.column_permutation().tolist() == subblock_perm_direct()


@pytest.mark.parametrize("k", [40, 48, 176])
@pytest.mark.parametrize("rv", [0, 1, 2, 3])
def test_rate_match_indices_vs_oracle(k, rv):
    for e in (100, 3 * k + 12, 2 * (3 * k + 12), 5 * k):
        flat = [s * (k + 4) + p for s, p in rate_match_direct(k, e, rv)]
        assert ratematch.rate_match_indices(k, e, rv).tolist() == flat


def test_rate_match_full_coverage_k40():
    n = 3 * 40 + 12
    idx = ratematch.rate_match_indices(40, n)
    assert np.array_equal(np.sort(idx), np.arange(n))


def test_rate_match_double_repetition_k40():
    n = 3 * 40 + 12
    counts = np.bincount(ratematch.rate_match_indices(40, 2 * n), minlength=n)
    assert (counts == 2).all()


def test_rate_dematch_inverse(rng):
    k = 40
    coded = rng.normal(size=3 * k + 12)
    np.testing.assert_allclose(ratematch.rate_dematch(ratematch.rate_match(coded, 3 * k + 12), k), coded)


def test_rate_dematch_sums_repeats(rng):
    k = 40
    coded = rng.normal(size=3 * k + 12)
    np.testing.assert_allclose(ratematch.rate_dematch(ratematch.rate_match(coded, 2 * coded.size), k), 2 * coded)


def test_rate_dematch_punctured_zeros(rng):
    k = 40
    coded = rng.normal(size=3 * k + 12)
    e = 80
    out = ratematch.rate_dematch(ratematch.rate_match(coded, e), k)
    idx = ratematch.rate_match_indices(k, e)
    missing = np.setdiff1d(np.arange(coded.size), idx)
    assert missing.size == coded.size - e
    assert not out[missing].any()
    np.testing.assert_allclose(out[idx], coded[idx])


def test_rate_match_rejects_bad_length():
    with pytest.raises(ValueError):
        ratematch.rate_match(np.zeros(131), 100)
