import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from ltlab import DomainError
from ltlab.ground_state import soliton_1d
from ltlab.sphere import ggm_integral
from ltlab.spectral import PotentialSpec, SchrodingerSpectrum, parse_potential, two_bump_integrals
from ltlab.spectral.potentials import two_bump_exponent


def test_poschl_teller_integral():
    # int (6 sech^2)^{3/2} dx = 6^{3/2} int sech^3 = 6^{3/2} pi / 2 = 3 sqrt(6) pi
    V = PotentialSpec("poschl_teller", {"nu": 2})
    assert V.negative_part_integral(1.5) == pytest.approx(3 * math.sqrt(6) * math.pi, rel=1e-10)


def test_square_well_integral():
    V = PotentialSpec("square_well", {"depth": 2.0, "width": 1.5})
    assert V.negative_part_integral(1.0) == pytest.approx(2.0 * 3.0, rel=1e-10)
    assert V.negative_part_integral(0.5) == pytest.approx(math.sqrt(2.0) * 3.0, rel=1e-10)


def test_radial_integral_3d_gaussian():
    V = PotentialSpec("gaussian", {"depth": 1.0}, dim=3, radial=True)
    # int exp(-3|x|^2/2) d^3x = (2 pi / 3)^{3/2}
    assert V.negative_part_integral(1.5) == pytest.approx((2 * math.pi / 3) ** 1.5, rel=1e-10)


@pytest.mark.parametrize("L", [0, 1, 3])
def test_ggm_closed_form_vs_quadrature(L):
    V = PotentialSpec("ggm_sphere_image", {"L": L}, dim=3, radial=True)
    closed = V.negative_part_integral(1.5)
    quad = V.negative_part_integral(1.5, closed_form=False)
    assert closed == pytest.approx(quad, rel=1e-8)
    assert closed == pytest.approx(ggm_integral(3, L), rel=1e-14)
    if L == 0:
        assert closed == pytest.approx(0.75**1.5 * 2 * math.pi**2, rel=1e-12)


def test_ggm_profile_3d_L0():
    V = PotentialSpec("ggm_sphere_image", {"L": 0}, dim=3, radial=True)
    r = np.linspace(0, 5, 11)
    np.testing.assert_allclose(V(r), -3 / (1 + r**2) ** 2, rtol=1e-14)


def test_two_bump_closed_form_vs_quadrature():
    V = PotentialSpec("two_bump", {"gamma": 2.0, "R": 6.0})
    closed = V.negative_part_integral(2.5)
    quad = V.negative_part_integral(2.5, closed_form=False)
    assert closed == pytest.approx(quad, rel=1e-8)


def test_two_bump_integrals_large_R():
    g = 2.0
    p = two_bump_exponent(g)
    assert p / (p - 1) == pytest.approx(g + 0.5, rel=1e-14)
    info = two_bump_integrals(g, 30.0)
    m = integrate.quad(lambda x: soliton_1d(x, p) ** 2, -np.inf, np.inf, epsabs=0, epsrel=1e-12)[0]
    assert info["mass"] == pytest.approx(m, rel=1e-10)
    assert info["A"] > 0 and info["A"] < 1e-6 * info["norm2p"]
    assert info["norm_V"] == pytest.approx(2 * info["norm2p"] + 2 * info["A"], rel=1e-14)


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_alpha_scale_parameters(alpha, scale):
    V = PotentialSpec("gaussian", {"alpha": alpha, "scale": scale})
    x = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(V(x), -alpha * np.exp(-((scale * x) ** 2)), rtol=1e-13)


def test_square_well_mean_value_at_jump():
    V = PotentialSpec("square_well", {"depth": 2.0, "width": 1.0})
    assert float(V(1.0)) == -1.0
    assert float(V(0.5)) == -2.0 and float(V(1.5)) == 0.0


def test_tabulated_from_csv(tmp_path):
    xs = np.linspace(-12, 12, 4801)
    vs = -6 / np.cosh(xs) ** 2
    path = tmp_path / "pt.csv"
    with open(path, "w") as fh:
        fh.write("x,V\n")
        for a, b in zip(xs, vs):
            fh.write(f"{float(a)!r},{float(b)!r}\n")
    V = parse_potential(f"tabulated file={path}")
    est = SchrodingerSpectrum(extent=15.0, step=0.005, levels=1).fit(V)
    np.testing.assert_allclose(est.eigenvalues_, [-4.0, -1.0], atol=2e-3)
    assert V.negative_part_integral(1.5) == pytest.approx(3 * math.sqrt(6) * math.pi, rel=1e-4)


def test_tabulated_rejects_unsorted(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,V\n0,-1\n-1,-1\n1,0\n")
    with pytest.raises(DomainError):
        PotentialSpec("tabulated", {"file": str(path)})


def test_parse_examples():
    V = parse_potential("poschl_teller nu=2")
    assert V.params["nu"] == 2.0 and V.dim == 1 and not V.radial
    W = parse_potential("ggm_sphere_image L=1 dim=3")
    assert W.dim == 3 and W.radial
    assert parse_potential("two_bump gamma=2 R=6").params["R"] == 6.0


@pytest.mark.parametrize("text", [
    "", "banana depth=1", "gaussian depth", "gaussian depth=1 depth=2", "gaussian depth=abc",
    "gaussian height=1", "gaussian depth=1 dim=2 radial=0", "ggm_sphere_image L=1", "two_bump gamma=1.2",
    "ggm_sphere_image L=0.5 dim=3", "gaussian depth=-1", "tabulated",
])
def test_parse_errors(text):
    with pytest.raises(DomainError):
        parse_potential(text)


def test_describe_round_trip():
    V = PotentialSpec("gaussian", {"depth": 3.0, "alpha": 2.0})
    assert parse_potential(V.describe()) == V
