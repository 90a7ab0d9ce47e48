import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heightlab import MultiPoly, normalize_projective, parse_rational
from heightlab.arakelov import lemma42_e
from heightlab.archimedean import MCParams
from heightlab.errors import PolarizationError, PoleError
from heightlab.heights import (PolarizationChoice, height_number_field, naive_height,
                               nevanlinna_T, nevanlinna_parts)

ARITH = PolarizationChoice.arithmetic()
GEOM = PolarizationChoice.geometric()
PARAMS = MCParams(100_000, 2, 20_000)


def point(texts, d):
    return normalize_projective([parse_rational(t, d) for t in texts])


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_number_field_height(a, b):
    if a == 0 and b == 0:
        return
    g = math.gcd(a, b)
    h = height_number_field([Fraction(a), Fraction(b)])
    assert h.total == math.log(max(abs(a), abs(b)) // g)
    assert h.stderr == 0


def test_arith_with_no_variables_is_number_field_height():
    assert naive_height(point(["3", "2"], 0)).total == math.log(3)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_power_of_z(m):
    h = naive_height(point([f"z1^{m}", "1"], 1), ARITH, PARAMS)
    assert h.exact_part == 0
    assert abs(h.total - m * math.log(2) / 2) <= 4 * h.stderr


def test_constant_point_d1():
    h = naive_height(point(["3", "5"], 1), ARITH, PARAMS)
    assert h.total == pytest.approx(math.log(5)) and h.stderr == 0


def test_constant_point_d2_carries_total_mass():
    # c_1(H)^2 has total mass 2! for the all-FS polarization on (P^1)^2
    h = naive_height(point(["3", "5"], 2), ARITH, PARAMS)
    assert h.total == pytest.approx(2 * math.log(5))


def test_d2_exact_part():
    h = naive_height(point(["z1^2*z2", "z2 + 1"], 2), ARITH, PARAMS)
    assert h.exact_part == (2 + 1) * 0.5


def test_geometric_is_degree():
    assert naive_height(point(["t^3 + 5", "t - 1"], 1), GEOM).total == 3
    assert naive_height(point(["17", "4"], 1), GEOM).total == 0


def test_auxiliary():
    pol = PolarizationChoice.auxiliary(2, 0.5)
    h = naive_height(point(["z1*z2^3", "z1 + 1"], 2), pol)
    assert h.total == pytest.approx(3 * lemma42_e(0.5, 2)) and h.stderr == 0


def test_auxiliary_d1_c_inv_e_is_geometric():
    P = point(["t^4 - t", "3"], 1)
    aux = naive_height(P, PolarizationChoice.auxiliary(1, 1 / math.e))
    assert aux.total == pytest.approx(naive_height(P, GEOM).total)


@settings(max_examples=15)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3).filter(any),
       st.lists(st.integers(-5, 5), min_size=1, max_size=3).filter(any))
def test_projective_invariance(fa, fb):
    P = point(["t^2 - 3", "2*t + 1"], 1)
    a = MultiPoly.from_dense(fa, 1, 1)
    b = MultiPoly.from_dense(fb, 1, 1)
    Q = normalize_projective([parse_rational("t^2 - 3", 1), parse_rational("2*t + 1", 1)])
    scaled = normalize_projective([p * a for p in P.coords])
    scaled = normalize_projective([p * b for p in scaled.coords])
    assert scaled == Q
    for pol in (ARITH, GEOM, PolarizationChoice.auxiliary(1, 2.0)):
        assert naive_height(scaled, pol, PARAMS) == naive_height(P, pol, PARAMS)


@pytest.mark.parametrize("text", ["bogus", "aux:1", "aux:x:1", "aux:1:-2", "nf:1"])
def test_bad_polarization_text(text):
    with pytest.raises(PolarizationError):
        PolarizationChoice.parse(text)


def test_polarization_dimension_checks():
    with pytest.raises(PolarizationError):
        naive_height(point(["z1", "z2"], 2), GEOM)
    with pytest.raises(PolarizationError):
        naive_height(point(["z1", "1"], 1), PolarizationChoice.number_field())
    with pytest.raises(PolarizationError):
        naive_height(point(["z1", "1"], 1), PolarizationChoice.auxiliary(2, 1.0))


def test_parse_roundtrip():
    for text in ("arith", "geom", "nf", "aux:2:0.5"):
        assert str(PolarizationChoice.parse(text)) == text


NEV = MCParams(1 << 14, 0, 1 << 14)


def test_nevanlinna_identity():
    assert nevanlinna_T(parse_rational("t", 1), 2.0, NEV) == pytest.approx(math.log(2), abs=1e-9)


def test_nevanlinna_polynomial_large_radius():
    # |z^2 + 1| > 1 on |z| = 10, so T = mean log|f| = 2 log 10 by Jensen
    assert nevanlinna_T(parse_rational("t^2 + 1", 1), 10.0, NEV) == pytest.approx(
        2 * math.log(10), abs=1e-9)


def test_nevanlinna_counting_term():
    counting, prox = nevanlinna_parts(parse_rational("2/(2*t - 1)", 1), 2.0, NEV)
    assert counting == pytest.approx(math.log(4))


def test_nevanlinna_pole_at_origin():
    with pytest.raises(PoleError):
        nevanlinna_T(parse_rational("1/t", 1), 2.0, NEV)


def test_nevanlinna_monotone():
    f = parse_rational("(t^3 - 2*t + 7)/(3*t^2 + t - 5)", 1)
    values = [nevanlinna_T(f, r, NEV) for r in (1.1, 2, 5, 10)]
    assert values == sorted(values)


def test_listed_examples():
    assert naive_height(point(["t^3 + 1", "t"], 1), GEOM).total == 3
    aux = PolarizationChoice.auxiliary(1, 1 / math.e)
    assert naive_height(point(["t", "1"], 1), aux).total == pytest.approx(1.0)
    assert naive_height(point(["6", "4"], 0)).total == pytest.approx(math.log(3))
    assert naive_height(point(["1", "0"], 0)).total == 0


@settings(max_examples=20)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4).filter(any))
def test_geometric_height_zero_iff_constant(coeffs):
    f = MultiPoly.from_dense(coeffs, 1, 1)
    P = normalize_projective([f, MultiPoly.constant(1, 1)])
    h = naive_height(P, GEOM).total
    assert h == int(h) >= 0
    assert (h == 0) == f.is_constant()


@settings(max_examples=10)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3).filter(any),
       st.lists(st.integers(-4, 4), min_size=1, max_size=3).filter(any))
def test_segre_additivity(a, b):
    f, g = MultiPoly.from_dense(a, 1, 1), MultiPoly.from_dense(b, 1, 1)
    one = MultiPoly.constant(1, 1)
    hf, hg, hfg = (naive_height(normalize_projective([p, one]), ARITH, PARAMS)
                   for p in (f, g, f * g))
    # log max(|fg|, 1) <= log max(|f|, 1) + log max(|g|, 1) pointwise
    slack = 4 * math.sqrt(hf.stderr ** 2 + hg.stderr ** 2 + hfg.stderr ** 2)
    assert hfg.total <= hf.total + hg.total + math.log(2) + slack


def test_nevanlinna_small_radius_and_constant():
    assert nevanlinna_T(parse_rational("t", 1), 0.5, NEV) == 0
    assert nevanlinna_T(parse_rational("5", 1), 3.0, NEV) == pytest.approx(math.log(5))


def test_nevanlinna_polynomial_growth():
    f = parse_rational("3*t^3 - t + 11", 1)
    gaps = [nevanlinna_T(f, r, NEV) - 3 * math.log(r) for r in (10.0, 100.0, 1000.0)]
    assert max(gaps) - min(gaps) < 0.05
