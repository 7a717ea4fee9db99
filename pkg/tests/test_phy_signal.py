import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltebench.params import GridConfig
from ltebench.phy import modulation, ofdm, resources, scrambling
from ltebench.phy.resources import ReClass
from oracles import constellation_direct, gold_direct, maxlog_llr_direct

GOLD_CINIT1_16 = [0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 1]  # frozen two-LFSR oracle output


# --- scrambling -------------------------------------------------------------

def test_gold_first_bits_vs_lfsr_oracle():
    assert gold_direct(1, 16) == GOLD_CINIT1_16
    assert scrambling.gold_sequence(1, 16).tolist() == GOLD_CINIT1_16


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=20)
def test_gold_matches_oracle(c_init):
    assert scrambling.gold_sequence(c_init, 200).tolist() == gold_direct(c_init, 200)


@given(st.integers(0, 2**31 - 1), st.integers(1, 5000))
@settings(max_examples=30)
def test_scrambler_involution(c_init, n):
    x = np.random.default_rng(n).integers(0, 2, n, dtype=np.uint8)
    np.testing.assert_array_equal(scrambling.gold_scramble(scrambling.gold_scramble(x, c_init), c_init), x)


def test_scramble_zero_is_sequence():
    c = scrambling.pdsch_c_init(3)
    np.testing.assert_array_equal(scrambling.gold_scramble(np.zeros(500, np.uint8), c),
                                  scrambling.gold_sequence(c, 500))


def test_soft_descramble_flips_signs(rng):
    c = scrambling.pdsch_c_init(0)
    llr = rng.normal(size=300)
    out = scrambling.gold_descramble(llr, c)
    np.testing.assert_allclose(out, np.where(scrambling.gold_sequence(c, 300) == 1, -llr, llr))


def test_c_init_formula():
    assert scrambling.pdsch_c_init(5, rnti=0x3C, q=0, cell_id=1) == 0x3C * 2**14 + 5 * 2**9 + 1


# --- modulation -------------------------------------------------------------

def test_qpsk_00():
    assert modulation.modulate(np.array([0, 0], np.uint8), 2)[0] == pytest.approx((1 + 1j) / np.sqrt(2))


@pytest.mark.parametrize("qm", [2, 4, 6])
def test_constellation_matches_table(qm):
    ref = constellation_direct(qm)
    for label, point in ref.items():
        got = modulation.modulate(np.array(label, np.uint8), qm)[0]
        assert abs(got - point) < 1e-12


@pytest.mark.parametrize("qm", [2, 4, 6])
def test_unit_energy(qm):
    pts = modulation.constellation(qm)
    assert pts.size == 2**qm
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("qm", [2, 4, 6])
def test_gray_adjacency(qm):
    ref = constellation_direct(qm)
    labels = list(ref)
    pts = np.array([ref[lab] for lab in labels])
    dmin = min(abs(a - b) for a, b in itertools.combinations(pts, 2))
    pairs = 0
    for (la, a), (lb, b) in itertools.combinations(zip(labels, pts), 2):
        if abs(abs(a - b) - dmin) < 1e-9:
            pairs += 1
            assert sum(x != y for x, y in zip(la, lb)) == 1
    side = 2 ** (qm // 2)
    assert pairs == 2 * side * (side - 1)


def test_modulate_length_error():
    with pytest.raises(ValueError):
        modulation.modulate(np.zeros(5, np.uint8), 4)
    with pytest.raises(ValueError):
        modulation.modulate(np.zeros(6, np.uint8), 3)


def test_llr_qpsk_closed_form():
    y = np.array([(1 + 1j) / np.sqrt(2)])
    np.testing.assert_allclose(modulation.soft_demodulate(y, 2, 1.0), [2.0, 2.0])


@pytest.mark.parametrize("qm", [2, 4, 6])
def test_llr_signs_on_points(qm):
    pts = modulation.constellation(qm)
    llr = modulation.soft_demodulate(pts, qm, 1e-3).reshape(-1, qm)
    bits = modulation.hard_demodulate(pts, qm).reshape(-1, qm)
    assert ((llr > 0) == (bits == 0)).all()
    np.testing.assert_array_equal(modulation.modulate(bits.ravel(), qm), pts)


@pytest.mark.parametrize("qm", [4, 6])
def test_llr_exhaustive_two_minima(qm, rng):
    ys = np.concatenate([modulation.constellation(qm), rng.normal(size=40) + 1j * rng.normal(size=40)])
    got = modulation.soft_demodulate(ys, qm, 0.7).reshape(-1, qm)
    for y, row in zip(ys, got):
        np.testing.assert_allclose(row, maxlog_llr_direct(complex(y), qm, 0.7), atol=1e-9)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("qm", [2, 4, 6])
def test_llr_scale_invariance(qm, lam, rng):
    y = rng.normal(size=500) + 1j * rng.normal(size=500)
    a = modulation.soft_demodulate(y, qm, 0.3)
    b = modulation.soft_demodulate(y, qm, 0.3 / lam)
    np.testing.assert_allclose(b, lam * a, rtol=1e-12)
    np.testing.assert_array_equal(a > 0, b > 0)


def test_soft_demod_rejects_bad_noise():
    with pytest.raises(ValueError):
        modulation.soft_demodulate(np.ones(4, complex), 2, 0.0)


# --- resource grid ------------------------------------------------------------

def test_re_layout_defaults():
    lay = resources.re_layout(GridConfig())
    assert lay.shape == (72, 14)
    assert (lay == ReClass.DATA).sum() == 756
    assert not (lay[:, :3] == ReClass.DATA).any()
    # 6 reference REs per PRB outside the control region, plus those inside it
    assert (lay[:, 3:] == ReClass.REFERENCE).sum() == 36
    assert (lay[:, :3] == ReClass.REFERENCE).sum() == 12


def test_map_demap_roundtrip(rng):
    x = modulation.modulate(rng.integers(0, 2, 1512, dtype=np.uint8), 2)
    g = resources.map_resources(x, GridConfig(), c_init=7)
    assert g.values.shape == (72, 14)
    data, control = resources.demap_resources(g)
    np.testing.assert_array_equal(data, x)
    assert control.size == 72 * 3 - 12


def test_map_resources_count_mismatch():
    with pytest.raises(ValueError):
        resources.map_resources(np.zeros(755, complex), GridConfig())


# --- OFDM -----------------------------------------------------------------------

def _random_grid(rng, cfg=GridConfig()):
    x = modulation.modulate(rng.integers(0, 2, 756 * 4, dtype=np.uint8), 4)
    return resources.map_resources(x, cfg, c_init=3)


def test_ofdm_length_and_roundtrip(rng):
    g = _random_grid(rng)
    s = ofdm.ofdm_modulate(g)
    assert s.size == 1920
    back = ofdm.ofdm_demodulate(s, g.cfg)
    assert np.sqrt(np.mean(np.abs(back.values - g.values) ** 2)) <= 1e-9


def test_ofdm_cyclic_prefix(rng):
    s = ofdm.ofdm_modulate(_random_grid(rng))
    cps = ofdm.cp_lengths()
    pos = 0
    for cp in cps:
        np.testing.assert_allclose(s[pos:pos + cp], s[pos + 128:pos + 128 + cp])
        pos += cp + 128
    assert pos == 1920


def test_single_subcarrier_constant_modulus():
    v = np.zeros((72, 14), complex)
    v[5, :] = 1.0
    s = ofdm.strip_cp(ofdm.ofdm_modulate(resources.ResourceGrid(v, GridConfig())))
    np.testing.assert_allclose(np.abs(s), 1 / np.sqrt(128), atol=1e-12)


def test_bin_mapping():
    bins = ofdm.subcarrier_bins()
    assert bins[0] == 92 and bins[35] == 127 and bins[36] == 1 and bins[71] == 36
    assert 0 not in bins


def test_parseval_noise_energy(rng):
    noise = rng.normal(size=1920) + 1j * rng.normal(size=1920)
    g = ofdm.ofdm_demodulate(noise)
    body = ofdm.strip_cp(noise)
    # unitary FFT: occupied bins hold the in-band share of the CP-stripped energy
    assert body.shape == (128, 14)
    full = np.fft.fft(body, axis=0, norm="ortho")
    np.testing.assert_allclose(np.sum(np.abs(full) ** 2), np.sum(np.abs(body) ** 2))
    np.testing.assert_allclose(np.sum(np.abs(g.values) ** 2), np.sum(np.abs(full[ofdm.subcarrier_bins()]) ** 2))
    ratio = np.sum(np.abs(g.values) ** 2) / np.sum(np.abs(body) ** 2)
    assert abs(ratio - 72 / 128) < 0.05


def test_ofdm_wrong_length():
    with pytest.raises(ValueError):
        ofdm.ofdm_demodulate(np.zeros(1919, complex))
