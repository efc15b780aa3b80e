from fractions import Fraction

import numpy as np
import pytest

from foelner import ops, weyl
from foelner.errors import DegreeExceedsWindow, InvalidSpec
from foelner.weyl import GaussianRational, WeylElement

P = WeylElement.p()
Q = WeylElement.q()
ONE = WeylElement.one()
I = WeylElement.imaginary_unit()


def mono(k, l, c=1):
    return WeylElement({(k, l): GaussianRational.of(c)})


# ---------------------------------------------------------------- scalars

def test_gaussian_rational_field_ops():
    a = GaussianRational(Fraction(1), Fraction(2))
    b = GaussianRational(Fraction(3), Fraction(-4))
    assert a + b == GaussianRational(Fraction(4), Fraction(-2))
    assert a - b == GaussianRational(Fraction(-2), Fraction(6))
    assert a * b == GaussianRational(Fraction(11), Fraction(2))
    assert (a / b) * b == a
    assert -a == GaussianRational(Fraction(-1), Fraction(-2))
    assert not GaussianRational.of(0)
    assert a


def test_gaussian_rational_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianRational.of(1) / GaussianRational.of(0)


def test_gaussian_rational_str():
    assert str(GaussianRational.of(1)) == "1"
    assert str(GaussianRational(Fraction(0), Fraction(1))) == "i"
    assert str(GaussianRational(Fraction(0), Fraction(-1))) == "-i"
    assert str(GaussianRational(Fraction(0), Fraction(2))) == "2i"
    assert str(GaussianRational(Fraction(1, 2), Fraction(-3, 4))) == "(1/2-3/4i)"
    assert str(GaussianRational.of(Fraction(-5, 3))) == "-5/3"


# ---------------------------------------------------------------- algebra

def test_canonical_commutation():
    assert Q * P - P * Q == I
    assert weyl.to_text(Q * P) == "p*q + i"
    assert weyl.to_text(P * Q) == "p*q"


def test_normal_ordering_q2p2():
    got = (Q * Q) * (P * P)
    want = mono(2, 2) + WeylElement({(1, 1): GaussianRational(Fraction(0), Fraction(4))}) - mono(0, 0, 2)
    assert got == want
    assert weyl.to_text(got) == "p^2*q^2 + 4i*p*q - 2"


def test_degree_and_zero():
    assert WeylElement.zero().degree() is None
    assert ONE.degree() == 0
    assert (P * P * Q).degree() == 3
    assert (P - P).is_zero()


def _random_element(rng, max_deg=3, terms=3):
    x = WeylElement.zero()
    for _ in range(rng.integers(1, terms + 1)):
        k = int(rng.integers(0, max_deg + 1))
        l = int(rng.integers(0, max_deg + 1 - k))
        c = GaussianRational(Fraction(int(rng.integers(-3, 4))),
                             Fraction(int(rng.integers(-3, 4))))
        x = x + WeylElement({(k, l): c})
    return x


def test_multiplication_associative_and_distributive():
    rng = np.random.default_rng(21)
    for _ in range(15):
        x, y, z = (_random_element(rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z


def test_scalars_are_central():
    rng = np.random.default_rng(22)
    for _ in range(10):
        x = _random_element(rng)
        assert x * I == I * x
        assert x * ONE == x


# ---------------------------------------------------------------- parsing

def test_parse_round_trip():
    for text in ("p", "q^3", "2*p^2*q - i*q^3", "1/2*p + 3*q", "i", "-p*q + 5"):
        e = weyl.parse_element(text)
        assert weyl.parse_element(weyl.to_text(e)) == e


def test_parse_errors():
    for bad in ("", "p^", "z", "2*", "p q", "i*", "3/0"):
        with pytest.raises(InvalidSpec):
            weyl.parse_element(bad)


def test_parse_power_zero_is_scalar():
    assert weyl.parse_element("p^0") == ONE


# ---------------------------------------------------------------- growth

def test_subspace_dimensions():
    for n in range(31):
        assert weyl.MonomialSubspace.total_degree(n).dimension() == (n + 1) * (n + 2) // 2


def test_ratio_for_generators():
    for n in (0, 1, 5, 10, 40):
        # pV_n adds the n+1 monomials p^{k+1}q^l with k+l = n and nothing else
        want = 1 + Fraction(2, n + 2)
        assert weyl.foelner_ratio(P, n) == want
        assert weyl.foelner_ratio(Q, n) == want
    assert weyl.foelner_ratio(P, 5) == Fraction(9, 7)


def test_ratio_of_scalars_is_one():
    assert weyl.foelner_ratio(ONE, 7) == Fraction(1)
    assert weyl.foelner_ratio(I.scaled(GaussianRational.of(Fraction(2, 3))), 4) == Fraction(1)


def _ratio_all_monomials(a, n):
    prods = [weyl.multiply(a, mono(k, l)) for k, l in weyl.degree_monomials(n)]
    dim = weyl.MonomialSubspace.total_degree(n).extended(prods).dimension()
    return Fraction(dim, (n + 1) * (n + 2) // 2)


def test_ratio_matches_bruteforce():
    rng = np.random.default_rng(23)
    cases = [P, Q, P * Q, P + Q, Q * Q] + [_random_element(rng, max_deg=2) for _ in range(4)]
    for a in cases:
        if a.is_zero():
            continue
        for n in range(7):
            assert weyl.foelner_ratio(a, n) == _ratio_all_monomials(a, n), (weyl.to_text(a), n)


def test_witness_generators_eps_one():
    w = weyl.amenability_witness([P, Q], Fraction(1))
    assert w.n == 0
    assert w.ratios == (Fraction(2), Fraction(2))
    assert w.cap >= w.n


def test_witness_generators_tight():
    w = weyl.amenability_witness([P, Q], Fraction(1, 10))
    assert w.n == 18
    assert all(r <= Fraction(11, 10) for r in w.ratios)


def test_witness_with_product():
    w = weyl.amenability_witness([P, Q, P * Q], Fraction(1, 10))
    assert w.n == 38
    assert w.cap == 82
    assert w.ratios == (Fraction(21, 20), Fraction(21, 20), Fraction(857, 780))


def test_witness_validation():
    with pytest.raises(ValueError):
        weyl.amenability_witness([], Fraction(1, 2))
    with pytest.raises(ValueError):
        weyl.amenability_witness([P], Fraction(0))


# ---------------------------------------------------------------- windows

def test_represent_matches_operator_windows():
    for N in (4, 9, 16):
        assert np.array_equal(weyl.represent(Q, N).entries,
                              ops.compress(ops.OperatorSpec.hermite_q(), N).entries)
    assert np.array_equal(weyl.represent(P, 9).entries,
                          ops.compress(ops.OperatorSpec.hermite_p(), 9).entries)


def test_represent_identity_and_commutator():
    assert np.array_equal(weyl.represent(ONE, 5).entries, np.eye(5))
    W = weyl.represent(weyl.parse_element("q*p - p*q"), 6).entries
    assert np.array_equal(W, 1j * np.eye(6))


def test_represent_window_too_small():
    with pytest.raises(DegreeExceedsWindow):
        weyl.represent(weyl.parse_element("p^3"), 3)
    assert weyl.represent(weyl.parse_element("p^3"), 4).dim == 4


def test_represent_is_a_homomorphism_on_interior():
    # products agree on the block the enlarged windows protect
    rng = np.random.default_rng(24)
    N = 24
    for _ in range(6):
        x, y = _random_element(rng, max_deg=2), _random_element(rng, max_deg=2)
        d = (x.degree() or 0) + (y.degree() or 0)
        if d >= N:
            continue
        lhs = weyl.represent(x * y, N).entries
        rhs = weyl.represent(x, N).entries @ weyl.represent(y, N).entries
        m = N - d
        scale = max(1.0, np.max(np.abs(lhs[:m, :m])))
        assert np.max(np.abs(lhs[:m, :m] - rhs[:m, :m])) / scale < 1e-12
