"""Cross-validation of the curvature routes."""

import numpy as np
import pytest

from conftest import (
    expanding_quadric_spec,
    hyperbola_product_spec,
    line_equivariant_spec,
    null_reparametrized_spiral,
    rotation_quadric_spec,
)
from lagcal.core import Signature, metric
from lagcal.curvature import (
    MinimalityReport,
    NotLagrangianError,
    curvature_sample,
    mean_curvature_angle,
    mean_curvature_sff,
    minimality_residual,
    normal_projection,
    surface_H_null_coords,
)
from lagcal.families import Catenoid, build_family
from lagcal.immersion import (
    ImmersionPatch,
    induced_metric,
    interior_samples,
    make_flat_patch,
    tangent_frame,
)


def circle_patch():
    """Round unit circle in C^1: curvature vector -e^{is}."""
    sig = Signature(0, 1)

    def f(u):
        u = np.asarray(u, dtype=float)
        return np.exp(1j * u)

    def d1(u):
        return np.array([[1j * np.exp(1j * u[0])]])

    def d2(u):
        return np.array([[[-np.exp(1j * u[0])]]])

    return ImmersionPatch(sig=sig, domain=[[0.0, 2.0 * np.pi]], f=f, d1=d1, d2=d2,
                          vectorized=True)


def test_flat_patch_curvature_vanishes():
    patch = make_flat_patch(Signature(1, 2))
    u = np.array([0.4, 0.6])
    assert np.linalg.norm(mean_curvature_angle(patch, u)) < 1e-10
    assert np.linalg.norm(mean_curvature_sff(patch, u)) < 1e-12


def test_circle_curvature_frozen_value():
    patch = circle_patch()
    for s in (0.3, 1.1, 2.9):
        u = np.array([s])
        expected = -np.exp(1j * s)
        assert np.allclose(mean_curvature_sff(patch, u), expected, atol=1e-12)
        assert np.allclose(mean_curvature_angle(patch, u), expected, atol=1e-8)


def test_two_routes_agree_on_every_family(family_catalog):
    rng = np.random.default_rng(0)
    for name, patch in family_catalog:
        worst = 0.0
        for u in interior_samples(patch, 25, rng, margin=0.08):
            sample = curvature_sample(patch, u)
            worst = max(worst, sample.discrepancy)
        assert worst < 1e-5, f"{name}: {worst:.2e}"


def test_line_profile_is_not_minimal_but_routes_agree():
    patch = build_family(line_equivariant_spec())
    rng = np.random.default_rng(1)
    norms = []
    for u in interior_samples(patch, 20, rng, margin=0.08):
        sample = curvature_sample(patch, u)
        assert sample.discrepancy < 1e-5
        norms.append(np.linalg.norm(sample.H_angle))
    assert max(norms) > 1e-2


def test_mean_curvature_is_normal(family_catalog):
    rng = np.random.default_rng(2)
    for name, patch in family_catalog:
        for u in interior_samples(patch, 10, rng, margin=0.08):
            frame = tangent_frame(patch, u)
            h = mean_curvature_sff(patch, u)
            h_norm = np.linalg.norm(h)
            if h_norm < 1e-12:
                continue
            scale = h_norm * np.linalg.norm(frame, axis=1)
            pair = np.array([metric(h, x, patch.sig) for x in frame])
            assert np.max(np.abs(pair) / scale) < 1e-7, name


def test_j_of_h_is_tangent_on_lagrangian_patches(family_catalog):
    # J exchanges tangent and normal bundles on a Lagrangian patch, so
    # J H must be tangential: projecting it on the normal space kills it.
    rng = np.random.default_rng(3)
    for name, patch in family_catalog:
        for u in interior_samples(patch, 6, rng, margin=0.08):
            frame = tangent_frame(patch, u)
            g = induced_metric(patch, u)
            h = mean_curvature_angle(patch, u)
            if np.linalg.norm(h) < 1e-12:
                continue
            residual = normal_projection(1j * h, frame, g, patch.sig)
            assert np.linalg.norm(residual) < 1e-7 * max(1.0, np.linalg.norm(1j * h)), name


def test_angle_route_requires_lagrangian():
    sig = Signature(0, 2)

    def f(u):
        u = np.asarray(u, dtype=float)
        return np.stack([u[..., 0] + 1j * u[..., 1],
                         u[..., 1] + 0.5j * u[..., 0]], axis=-1)

    patch = ImmersionPatch(sig=sig, domain=[[0, 1], [0, 1]], f=f, vectorized=True)
    with pytest.raises(NotLagrangianError):
        mean_curvature_angle(patch, np.array([0.5, 0.5]))


def test_null_coordinate_formula_on_product_patch():
    patch = build_family(hyperbola_product_spec())
    rng = np.random.default_rng(4)
    for u in interior_samples(patch, 10, rng, margin=0.08):
        h = surface_H_null_coords(patch, u)
        assert np.linalg.norm(h) < 1e-12
        assert np.linalg.norm(mean_curvature_sff(patch, u)) < 1e-12


def test_null_coordinate_formula_matches_sff_on_nonminimal_surface():
    patch = null_reparametrized_spiral(0.6)
    rng = np.random.default_rng(5)
    worst = 0.0
    h_norms = []
    for u in interior_samples(patch, 20, rng, margin=0.08):
        h_null = surface_H_null_coords(patch, u)
        h_sff = mean_curvature_sff(patch, u)
        worst = max(worst, float(np.linalg.norm(h_null - h_sff)))
        h_norms.append(np.linalg.norm(h_sff))
    assert worst < 1e-5
    assert max(h_norms) > 1e-2


def test_null_coordinate_formula_rejects_non_null_charts():
    patch = build_family(expanding_quadric_spec())
    with pytest.raises(NotLagrangianError):
        surface_H_null_coords(patch, np.array([0.0, 0.0]))


def test_minimality_residuals():
    minimal = [
        build_family(Catenoid(sig=Signature(0, 2), epsilon=1, c=1.0, sector=0)),
        build_family(rotation_quadric_spec()),
        build_family(hyperbola_product_spec()),
    ]
    for patch in minimal:
        report = minimality_residual(patch, sample_count=200, seed=6)
        assert isinstance(report, MinimalityReport)
        assert report.residual < 1e-6

    report = minimality_residual(build_family(expanding_quadric_spec()),
                                 sample_count=200, seed=7)
    assert report.residual > 0.1
