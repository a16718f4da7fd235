"""Shared example patches and specifications for the test suite."""

import numpy as np
import pytest

from lagcal.core import NULL_PLANE_BASIS, Signature
from lagcal.families import (
    Catenoid,
    Curve,
    EvolvingQuadric,
    Equivariant,
    Hopf,
    PairCurve,
    ProductNullCurves,
    RadialProfile,
    SphereCurve,
    build_family,
)
from lagcal.immersion import ImmersionPatch, reparametrize

ROTATION_GENERATOR = np.array([[0.0, -1.0], [1.0, 0.0]])


def catenoid_combinations():
    """All (sig, epsilon) pairs with n in {2, 3}, p in {0, 1} and a nonempty quadric."""
    combos = []
    for n in (2, 3):
        for p in (0, 1):
            for eps in (1, -1):
                if eps == 1 and p == n:
                    continue
                if eps == -1 and p == 0:
                    continue
                combos.append((Signature(p, n), eps))
    return combos


def rotation_quadric_spec(c: float = 2.0, half_width: float = 0.6) -> EvolvingQuadric:
    """Minimal evolving quadric driven by the rotation generator, p = 1.

    The hyperbola 2 x1 x2 = c is charted around (e^t0, (c/2) e^-t0) with
    t0 = 0.8, keeping clear of the degenerate locus |M x|_p = 0 at t = 0.
    """
    t0 = 0.8
    center = np.array([np.exp(t0), (c / 2.0) * np.exp(-t0)])
    return EvolvingQuadric(
        sig=Signature(1, 2), matrix=ROTATION_GENERATOR, c=c,
        r=RadialProfile.constant(), s_interval=(-0.35, 0.35),
        chart_center=center, chart_half_width=half_width)


def hyperbola_product_spec(c: float = 2.0) -> ProductNullCurves:
    """Product-of-null-curves picture of the rotation quadric example.

    In the basis (1, i), (i, 1) of the totally null plane x1 = y2,
    x2 = y1, the two branches have real coefficients
    (e^u / 2, e^-u / c) and (-e^v / c, -e^-v / 2).
    """
    g1 = PairCurve.real_exponential((0.5, 1.0), (1.0 / c, -1.0), (0.05, 1.5))
    g2 = PairCurve.real_exponential((-1.0 / c, 1.0), (-0.5, -1.0), (-1.5, -0.05))
    return ProductNullCurves(sig=Signature(1, 2), plane=NULL_PLANE_BASIS,
                             gamma1=g1, gamma2=g2)


def traceless_diag_quadric_spec() -> EvolvingQuadric:
    """Minimal evolving quadric with M = diag(1, -1) in definite signature."""
    return EvolvingQuadric(
        sig=Signature(0, 2), matrix=np.diag([1.0, -1.0]), c=1.0,
        r=RadialProfile.constant(), s_interval=(-0.4, 0.4),
        chart_center=np.array([1.0, 0.0]), chart_half_width=0.3)


def expanding_quadric_spec() -> EvolvingQuadric:
    """Non-minimal evolving quadric: M = identity, tr M = 2, r constant."""
    return EvolvingQuadric(
        sig=Signature(0, 2), matrix=np.eye(2), c=1.0,
        r=RadialProfile.constant(), s_interval=(-0.4, 0.4),
        chart_center=np.array([0.0, 1.0]), chart_half_width=0.3)


def varying_profile_quadric_spec() -> EvolvingQuadric:
    """Evolving quadric with a genuinely varying radial profile."""
    return EvolvingQuadric(
        sig=Signature(0, 2), matrix=np.eye(2), c=1.0,
        r=RadialProfile.exponential(0.3), s_interval=(-0.4, 0.4),
        chart_center=np.array([0.0, 1.0]), chart_half_width=0.3)


def spiral_equivariant_spec(psi: float = 0.6) -> Equivariant:
    """Lorentzian equivariant patch with spiral profile |gamma'| = |gamma|."""
    rate = complex(np.cos(psi), np.sin(psi))
    return Equivariant(sig=Signature(1, 2), epsilon=1,
                       gamma=Curve.exponential(1.0, rate, (-0.5, 0.5)))


def circle_equivariant_spec(n: int = 2) -> Equivariant:
    return Equivariant(sig=Signature(0, n), epsilon=1, gamma=Curve.circle((0.1, 1.4)))


def line_equivariant_spec() -> Equivariant:
    """The non-minimal profile gamma(s) = 1 + i s in definite signature."""
    return Equivariant(sig=Signature(0, 2), epsilon=1,
                       gamma=Curve.line(1.0, 1.0j, (-0.8, 0.8)))


def small_circle_hopf_spec() -> Hopf:
    return Hopf(gamma=SphereCurve.torus(np.pi / 4, 1.0, 2.0, (0.0, 2.0 * np.pi)))


def great_circle_hopf_spec() -> Hopf:
    return Hopf(gamma=SphereCurve.great_circle((0.1, 1.4)))


def spiral_lorentzian_surface(psi: float = 0.6) -> ImmersionPatch:
    """Conformal Lorentzian Lagrangian surface gamma(s) (sinh t, cosh t).

    With |gamma'| = |gamma| the coordinates (s, t) are conformal, so
    u = s + t, v = s - t are null; the angle varies unless the spiral
    is radial, making this the standard non-minimal null-coordinate
    test surface.
    """
    rate = complex(np.cos(psi), np.sin(psi))

    def gamma(s):
        return np.exp(rate * np.asarray(s, dtype=float))

    def x(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.sinh(t).astype(complex), np.cosh(t).astype(complex)], axis=-1)

    def xd(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cosh(t).astype(complex), np.sinh(t).astype(complex)], axis=-1)

    def f(u):
        u = np.asarray(u, dtype=float)
        return gamma(u[..., 0])[..., None] * x(u[..., 1])

    def d1(u):
        s, t = u
        return np.stack([rate * gamma(s) * x(t), gamma(s) * xd(t)])

    def d2(u):
        s, t = u
        out = np.empty((2, 2, 2), dtype=complex)
        out[0, 0] = rate * rate * gamma(s) * x(t)
        out[0, 1] = out[1, 0] = rate * gamma(s) * xd(t)
        out[1, 1] = gamma(s) * x(t)
        return out

    return ImmersionPatch(sig=Signature(1, 2), domain=[[-0.5, 0.5], [-0.6, 0.6]],
                          f=f, d1=d1, d2=d2, vectorized=True,
                          meta={"family": "spiral-lorentzian"})


def null_reparametrized_spiral(psi: float = 0.6) -> ImmersionPatch:
    """The spiral Lorentzian surface in null coordinates u = s + t, v = s - t."""
    base = spiral_lorentzian_surface(psi)
    a = np.array([[0.5, 0.5], [0.5, -0.5]])
    domain = [[-0.45, 0.45], [-0.45, 0.45]]
    patch = reparametrize(base, a, np.zeros(2), domain)
    patch.meta["null_coordinates"] = True
    return patch


def lagrangian_family_catalog():
    """Named Lagrangian generator patches covering every family variant."""
    from lagcal.families import make_flat_plane

    catalog = [
        ("flat(1,3)", make_flat_plane(Signature(1, 3))),
        ("equivariant-circle", build_family(circle_equivariant_spec())),
        ("equivariant-line", build_family(line_equivariant_spec())),
        ("equivariant-spiral", build_family(spiral_equivariant_spec())),
        ("quadric-rotation", build_family(rotation_quadric_spec())),
        ("quadric-traceless-diag", build_family(traceless_diag_quadric_spec())),
        ("quadric-expanding", build_family(expanding_quadric_spec())),
        ("quadric-varying-r", build_family(varying_profile_quadric_spec())),
        ("product-null", build_family(hyperbola_product_spec())),
        ("hopf-small", build_family(small_circle_hopf_spec())),
        ("hopf-great", build_family(great_circle_hopf_spec())),
    ]
    for sig, eps in catenoid_combinations():
        name = f"catenoid(p={sig.p},n={sig.n},eps={eps:+d})"
        catalog.append((name, build_family(Catenoid(sig=sig, epsilon=eps, c=1.0, sector=0))))
    return catalog


@pytest.fixture(scope="session")
def family_catalog():
    return lagrangian_family_catalog()
