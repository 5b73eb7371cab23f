import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from identities import IDENTITIES, Z_VALUES
from rfuwoc.specfn import (
    BivarFoxHParams,
    ContourInfeasible,
    ContourSpec,
    FoxHParams,
    NotConverged,
    fox_h,
    fox_h_bivariate,
    ln_gamma_complex,
    upper_incomplete_gamma,
)


# ---------------------------------------------------------------- gamma helpers

def test_ln_gamma_complex_against_mpmath():
    z = 3 + 4j
    ref = complex(mpmath.loggamma(mpmath.mpc(3, 4)))
    assert abs(ln_gamma_complex(z) - ref) <= 1e-13 * abs(ref)


@given(st.floats(0.05, 30), st.floats(-40, 40))
@settings(max_examples=60, deadline=None)
def test_ln_gamma_complex_real_part_matches_mpmath(x, y):
    got = ln_gamma_complex(complex(x, y))
    ref = complex(mpmath.loggamma(mpmath.mpc(x, y)))
    assert abs(got.real - ref.real) <= 1e-11 * max(1.0, abs(ref.real))


@pytest.mark.parametrize("z", [0, -1, -7])
def test_ln_gamma_complex_rejects_poles(z):
    with pytest.raises(ValueError):
        ln_gamma_complex(complex(z, 0))


def test_upper_incomplete_gamma_against_quadrature():
    ref, _ = integrate.quad(lambda t: t ** -0.2 * math.exp(-t), 2.5, math.inf, epsabs=1e-14)
    assert upper_incomplete_gamma(0.8, 2.5) == pytest.approx(ref, rel=1e-12)


def test_upper_incomplete_gamma_domain():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(0.0, 1.0)
    assert upper_incomplete_gamma(2.0, 0.0) == pytest.approx(1.0)


# ---------------------------------------------------------------- univariate

@pytest.mark.parametrize("name,params,target", IDENTITIES, ids=[i[0] for i in IDENTITIES])
@pytest.mark.parametrize("z", Z_VALUES)
def test_identity_suite(name, params, target, z):
    assert fox_h(params, z) == pytest.approx(target(z), rel=1e-8, abs=0)


@pytest.mark.parametrize("name,params,target", IDENTITIES[:6], ids=[i[0] for i in IDENTITIES[:6]])
def test_imaginary_part_vanishes(name, params, target):
    info = fox_h(params, 0.7, full_output=True)
    assert abs(info.imag) <= 1e-10 * max(abs(info.value), 1e-300)
    assert info.converged


def test_result_stable_under_doubling_half_height():
    params = FoxHParams(2, 0, [(1, 1)], [(0, 1), (0.5, 1 / 1.2)])
    a = fox_h(params, 0.3, ContourSpec(half_height=40.0, rel_tol=1e-12))
    b = fox_h(params, 0.3, ContourSpec(half_height=80.0, rel_tol=1e-12))
    assert a == pytest.approx(b, rel=1e-10, abs=0)


@pytest.mark.parametrize("c", [0.05, 0.5, 2.0, 10.0])
def test_value_independent_of_contour_position(c):
    params = FoxHParams(2, 0, [(1, 1)], [(0, 1), (1.5, 1 / 0.9)])
    assert fox_h(params, 2.0, ContourSpec(real_part=c)) == pytest.approx(fox_h(params, 2.0), rel=1e-8, abs=0)


def test_contour_outside_strip_is_rejected():
    params = FoxHParams(1, 1, [(0, 1)], [(0, 1)])
    with pytest.raises(ContourInfeasible):
        fox_h(params, 1.0, ContourSpec(real_part=1.5))


def test_overlapping_poles_are_rejected():
    # Left poles at s = -b - k reach s = 2, right poles start at 1 - a = 0.
    params = FoxHParams(1, 1, [(1.0, 1)], [(-2.0, 1)])
    with pytest.raises(ContourInfeasible):
        fox_h(params, 1.0)


def test_budget_exhaustion_raises_with_estimate():
    params = FoxHParams(2, 0, [(1, 1)], [(0, 1), (0.5, 1)])
    with pytest.raises(NotConverged) as exc:
        fox_h(params, 1.0, ContourSpec(rel_tol=1e-14, max_nodes=60))
    assert math.isfinite(exc.value.estimate)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_argument_must_be_positive(bad):
    with pytest.raises(ValueError):
        fox_h(FoxHParams(1, 0, [], [(0, 1)]), bad)


def test_invalid_orders_and_weights():
    with pytest.raises(ValueError):
        FoxHParams(2, 0, [], [(0, 1)])
    with pytest.raises(ValueError):
        FoxHParams(1, 0, [], [(0, -1)])


@given(st.floats(0.3, 3.0), st.floats(0.2, 3.0), st.floats(0.02, 20.0))
@settings(max_examples=25, deadline=None)
def test_alpha_mu_kernel_property(alpha, mu, z):
    from scipy import special
    params = FoxHParams(2, 0, [(1, 1)], [(0, 1), (mu, 1 / alpha)])
    target = math.gamma(mu) * special.gammaincc(mu, z ** alpha)
    if target < 1e-250:
        return
    assert fox_h(params, z) == pytest.approx(target, rel=1e-7, abs=0)


# ---------------------------------------------------------------- bivariate

_KERNELS = [
    lambda r: (FoxHParams(1, 0, [], [(0, 1 / r.uniform(0.6, 2.5))]), None),
    lambda r: (FoxHParams(2, 0, [(1, 1)], [(0, 1), (r.uniform(0.3, 3.0), 1 / r.uniform(0.6, 2.5))]), None),
    lambda r: (FoxHParams(1, 1, [(1 - r.uniform(0.5, 3.0), 1)], [(0, 1)]), None),
]


def random_decoupled_sets(n=20, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        kx = _KERNELS[rng.integers(len(_KERNELS))](rng)[0]
        ky = _KERNELS[rng.integers(len(_KERNELS))](rng)[0]
        x, y = 10 ** rng.uniform(-1.5, 1.0), 10 ** rng.uniform(-1.5, 1.0)
        out.append((BivarFoxHParams(0, [], [], kx, ky), x, y))
    return out


@pytest.mark.parametrize("case", range(20))
def test_decoupled_bivariate_is_product(case):
    params, x, y = random_decoupled_sets()[case]
    product = fox_h(params.x, x, ContourSpec(rel_tol=1e-12)) * fox_h(params.y, y, ContourSpec(rel_tol=1e-12))
    assert fox_h_bivariate(params, x, y) == pytest.approx(product, rel=1e-8, abs=0)


def test_coupled_bivariate_against_closed_form():
    # Double Mellin-Barnes form of a multinomial integral:
    # (2 pi i)^-2 int int G(s) G(t) G(1-a-s-t) x^-s y^-t ds dt = G(1-a) (1+x+y)^(a-1)
    a = 0.3
    params = BivarFoxHParams(1, [(a, 1, 1)], [], FoxHParams(1, 0, [], [(0, 1)]),
                             FoxHParams(1, 0, [], [(0, 1)]))
    for x, y in [(0.2, 0.5), (1.0, 1.0), (3.0, 0.1)]:
        target = math.gamma(1 - a) * (1 + x + y) ** (a - 1)
        assert fox_h_bivariate(params, x, y) == pytest.approx(target, rel=1e-8, abs=0)


def test_bivariate_infeasible_fixed_contour():
    params = BivarFoxHParams(1, [(0.3, 1, 1)], [], FoxHParams(1, 0, [], [(0, 1)]),
                             FoxHParams(1, 0, [], [(0, 1)]))
    with pytest.raises(ContourInfeasible):
        fox_h_bivariate(params, 1.0, 1.0, ContourSpec(real_part=0.5), ContourSpec(real_part=0.5))


def test_bivariate_fixed_contour_agrees_with_automatic():
    params = BivarFoxHParams(1, [(0.3, 1, 1)], [], FoxHParams(1, 0, [], [(0, 1)]),
                             FoxHParams(1, 0, [], [(0, 1)]))
    auto = fox_h_bivariate(params, 0.5, 2.0)
    fixed = fox_h_bivariate(params, 0.5, 2.0, ContourSpec(real_part=0.2, rel_tol=1e-9),
                            ContourSpec(real_part=0.2, rel_tol=1e-9))
    assert fixed == pytest.approx(auto, rel=1e-7, abs=0)
