"""Transforms, convolution, norms, and large-spectrum extraction.

The normalization puts the 1/|G| on the forward transform and on
convolution, so means and integrals coincide and Plancherel reads
||f||_{L2} = ||fhat||_{l2} with no extra factor.
"""

import numpy as np
import pytest

from cornerlab import (
    BohrSet,
    CapExceededError,
    GroupFunction,
    Spectrum,
    ValidationError,
    convolve,
    convolve_direct,
    dft,
    dft_direct,
    inverse_dft,
    large_spectrum,
    lp_dual_norm,
    lp_norm,
    parse_group_spec,
)
from fractions import Fraction

GROUPS = ("Z16", "Z2xZ3xZ5", "Z5xZ5", "Z2xZ2xZ2xZ2")


def random_function(G, rng):
    return GroupFunction(G, rng.random(G.order))


def test_dft_of_constant_is_a_point_mass_at_zero():
    G = parse_group_spec("Z9")
    spec = dft(GroupFunction.constant(G, 0.7))
    assert abs(spec.coefficients[0] - 0.7) <= 1e-10
    assert np.max(np.abs(spec.coefficients[1:])) <= 1e-10


def test_dft_of_point_mass_is_flat():
    G = parse_group_spec("Z11")
    mask = np.zeros(11, dtype=bool)
    mask[0] = True
    spec = dft(GroupFunction.indicator(G, mask))
    assert np.max(np.abs(spec.coefficients - 1 / 11)) <= 1e-12


def test_fast_transform_matches_direct_oracle():
    rng = np.random.default_rng(41)
    G = parse_group_spec("Z6xZ5")
    for _ in range(5):
        f = random_function(G, rng)
        fast = dft(f).coefficients
        slow = dft_direct(f).coefficients
        assert np.max(np.abs(fast - slow)) <= 1e-10


def test_round_trips():
    rng = np.random.default_rng(5)
    G = parse_group_spec("Z8")
    f = random_function(G, rng)
    back = inverse_dft(dft(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-9
    spec = Spectrum(G, rng.random(8) + 1j * rng.random(8))
    again = dft(inverse_dft(spec))
    assert np.max(np.abs(again.coefficients - spec.coefficients)) <= 1e-9


def test_inverse_of_zero_and_pure_constant_spectra():
    G = parse_group_spec("Z10")
    zero = inverse_dft(Spectrum(G, np.zeros(10, dtype=complex)))
    assert np.max(np.abs(zero.values)) == 0
    coeffs = np.zeros(10, dtype=complex)
    coeffs[0] = 0.3
    const = inverse_dft(Spectrum(G, coeffs))
    assert np.max(np.abs(const.values - 0.3)) <= 1e-12


def test_plancherel_seeded_sweep():
    for spec_str in GROUPS:
        G = parse_group_spec(spec_str)
        rng = np.random.default_rng(hash(spec_str) % 2**32)
        for _ in range(10):
            f = random_function(G, rng)
            assert abs(lp_norm(f, 2) - lp_dual_norm(dft(f), 2)) <= 1e-9


def test_convolution_identity_element():
    # The normalized point mass (value |G| at 0) is the convolution unit.
    rng = np.random.default_rng(17)
    G = parse_group_spec("Z12")
    f = random_function(G, rng)
    delta = np.zeros(12)
    delta[0] = 12.0
    out = convolve(f, GroupFunction(G, delta))
    assert np.max(np.abs(out.values - f.values)) <= 1e-9


def test_convolution_of_constants():
    G = parse_group_spec("Z7")
    out = convolve(GroupFunction.constant(G, 0.5), GroupFunction.constant(G, 0.4))
    assert np.max(np.abs(out.values - 0.2)) <= 1e-12


def test_convolution_matches_double_loop_oracle():
    rng = np.random.default_rng(23)
    G = parse_group_spec("Z12")
    for _ in range(5):
        f, g = random_function(G, rng), random_function(G, rng)
        fast = convolve(f, g).values
        slow = convolve_direct(f, g).values
        assert np.max(np.abs(fast - slow)) <= 1e-9


def test_convolution_theorem():
    rng = np.random.default_rng(29)
    for spec_str in ("Z16", "Z3xZ4"):
        G = parse_group_spec(spec_str)
        f, g = random_function(G, rng), random_function(G, rng)
        lhs = dft(convolve(f, g)).coefficients
        rhs = dft(f).coefficients * dft(g).coefficients
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_large_spectrum_of_constant():
    G = parse_group_spec("Z9")
    hits = large_spectrum(GroupFunction.constant(G, 0.6), 0.3)
    assert {xi.coeffs for xi in hits} == {(0,)}


def test_large_spectrum_empty_above_sup():
    G = parse_group_spec("Z9")
    f = GroupFunction.constant(G, 0.2)
    assert large_spectrum(f, 0.9) == set()


def test_large_spectrum_even_indicator():
    # 1_{even} on Z8 has exactly two coefficients of size 1/2 (at 0 and 4).
    G = parse_group_spec("Z8")
    f = GroupFunction.indicator(G, np.arange(8) % 2 == 0)
    hits = large_spectrum(f, 0.3)
    assert {xi.coeffs for xi in hits} == {(0,), (4,)}


def test_large_spectrum_count_bound():
    rng = np.random.default_rng(31)
    G = parse_group_spec("Z5xZ7")
    for _ in range(10):
        f = random_function(G, rng)
        theta = float(rng.uniform(0.05, 0.5))
        hits = large_spectrum(f, theta)
        assert len(hits) <= lp_norm(f, 2) ** 2 / theta**2 + 1e-9


def test_large_spectrum_rejects_nonpositive_threshold():
    G = parse_group_spec("Z4")
    with pytest.raises(ValidationError):
        large_spectrum(GroupFunction.constant(G, 1.0), 0.0)


def test_lp_norms():
    G = parse_group_spec("Z10")
    ones = GroupFunction.constant(G, 1.0)
    for p in (1, 2, np.inf):
        assert abs(lp_norm(ones, p) - 1.0) <= 1e-12
    mask = np.arange(10) < 3
    assert abs(lp_norm(GroupFunction.indicator(G, mask), 1) - 0.3) <= 1e-12
    rng = np.random.default_rng(37)
    f = random_function(G, rng)
    assert abs(lp_norm(f, 2) - lp_dual_norm(dft(f), 2)) <= 1e-10
    with pytest.raises(ValidationError):
        lp_norm(f, 3)


def test_normalized_indicator_has_mean_one():
    G = parse_group_spec("Z20")
    mu = GroupFunction.normalized_indicator(G, np.arange(20) % 4 == 0)
    assert abs(mu.mean() - 1.0) <= 1e-12


def test_bohr_measure_spectrum_is_bounded_by_one():
    G = parse_group_spec("Z64")
    B = BohrSet(G, [G.characters()[1]], Fraction(1, 8))
    spec = dft(B.mu())
    assert np.max(np.abs(spec.coefficients)) <= 1 + 1e-12


def test_transform_cap():
    G = parse_group_spec("Z32")
    f = GroupFunction.constant(G, 1.0)
    with pytest.raises(CapExceededError):
        dft(f, cap=16)
