"""Mean curvature of immersed patches by independent routes.

Route one differentiates the Lagrangian angle: for a Lagrangian patch,
n H = J grad(beta), with the gradient taken in the induced (possibly
indefinite) metric.  Route two is the classical trace of the second
fundamental form, H = (1/n) sum g^{jk} (d^2 f / du_j du_k)^perp, which
needs no Lagrangian assumption and serves as the reference
implementation.  A third formula applies to surfaces in null
coordinates: H = (f_uv)^perp / <f_u, f_v>.

Angle differentiation lifts stencil values to a continuous branch
before differencing, since beta lives on the circle.
"""

from dataclasses import dataclass

import numpy as np

from .core import GeometryError, Signature, circ_mean, circ_spread, wrap_angle
from .immersion import (
    DegenerateFrame,
    ImmersionPatch,
    induced_metric,
    interior_samples,
    lagrangian_angle_at,
    lagrangian_defect,
    second_derivatives,
    tangent_frame,
)

DEFECT_TOL = 1e-8
BETA_STEP = 1e-4


class NotLagrangianError(GeometryError):
    """Angle-based curvature requested on a non-Lagrangian patch."""


def _solve_gram(g: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(g))
    if scale == 0.0 or abs(np.linalg.det(g)) < 1e-12 * scale ** g.shape[0]:
        raise DegenerateFrame("induced metric is numerically degenerate")
    return np.linalg.solve(g, rhs)


def normal_projection(vector: np.ndarray, frame: np.ndarray, g: np.ndarray,
                      sig: Signature) -> np.ndarray:
    """Split off the tangential part of an ambient vector using the Gram solve.

    Works in indefinite signature where an orthonormal normal basis may
    not exist: the tangential component solves g a = [<V, X_m>].
    """
    pair = (frame * sig.eps) @ np.conj(vector)
    coeffs = _solve_gram(g, pair.real)
    return vector - coeffs @ frame


def _unwrap(values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    out[0] = values[0]
    for k in range(1, len(values)):
        out[k] = out[k - 1] + wrap_angle(values[k] - out[k - 1])
    return out


def angle_gradient(patch: ImmersionPatch, u, beta_step: float = BETA_STEP) -> np.ndarray:
    """Partial derivatives of the Lagrangian angle by a 5-point stencil.

    Stencil values are unwrapped to a continuous branch before the
    fourth-order central difference is applied.
    """
    u = np.asarray(u, dtype=float)
    h = beta_step * patch.widths
    grad = np.empty(patch.n)
    for j in range(patch.n):
        e = np.zeros(patch.n)
        e[j] = h[j]
        betas = np.array([lagrangian_angle_at(patch, u + k * e) for k in (-2, -1, 0, 1, 2)])
        b = _unwrap(betas)
        grad[j] = (b[0] - 8.0 * b[1] + 8.0 * b[3] - b[4]) / (12.0 * h[j])
    return grad


def mean_curvature_angle(patch: ImmersionPatch, u, defect_tol: float = DEFECT_TOL,
                         beta_step: float = BETA_STEP) -> np.ndarray:
    """Mean curvature from the angle formula H = (1/n) J grad(beta)."""
    u = np.asarray(u, dtype=float)
    defect = lagrangian_defect(patch, u)
    if defect > defect_tol:
        raise NotLagrangianError(
            f"defect {defect:.3e} above {defect_tol:.1e}: angle route needs a Lagrangian patch")
    frame = tangent_frame(patch, u)
    g = induced_metric(patch, u)
    dbeta = angle_gradient(patch, u, beta_step)
    coeffs = _solve_gram(g, dbeta)
    grad_beta = coeffs @ frame
    return 1j * grad_beta / patch.n


def mean_curvature_sff(patch: ImmersionPatch, u) -> np.ndarray:
    """Mean curvature as the metric trace of the second fundamental form."""
    u = np.asarray(u, dtype=float)
    frame = tangent_frame(patch, u)
    g = induced_metric(patch, u)
    sec = second_derivatives(patch, u)
    ginv = _solve_gram(g, np.eye(patch.n))
    traced = np.einsum("jk,jkz->z", ginv, sec)
    return normal_projection(traced, frame, g, patch.sig) / patch.n


def surface_H_null_coords(patch: ImmersionPatch, u, null_tol: float = DEFECT_TOL) -> np.ndarray:
    """Mean curvature of a surface parametrized by null coordinates.

    Requires |f_u|^2 = |f_v|^2 = 0 at u; then H = (f_uv)^perp / <f_u, f_v>,
    normalized to agree with the trace convention of mean_curvature_sff.
    """
    if patch.n != 2:
        raise GeometryError("null-coordinate formula applies to surfaces only")
    u = np.asarray(u, dtype=float)
    frame = tangent_frame(patch, u)
    g = induced_metric(patch, u)
    norms = np.linalg.norm(frame, axis=1) ** 2
    if abs(g[0, 0]) > null_tol * norms[0] or abs(g[1, 1]) > null_tol * norms[1]:
        raise NotLagrangianError(
            f"coordinates are not null: |f_u|^2={g[0, 0]:.3e}, |f_v|^2={g[1, 1]:.3e}")
    cross = g[0, 1]
    if abs(cross) < 1e-12 * max(np.sqrt(norms[0] * norms[1]), 1e-300):
        raise DegenerateFrame("vanishing cross pairing <f_u, f_v>")
    f_uv = second_derivatives(patch, u)[0, 1]
    return normal_projection(f_uv, frame, g, patch.sig) / cross


@dataclass(frozen=True)
class CurvatureSample:
    """Both curvature routes at one point and their Euclidean discrepancy."""

    u: np.ndarray
    H_angle: np.ndarray
    H_sff: np.ndarray
    beta_gradient: np.ndarray
    discrepancy: float


def curvature_sample(patch: ImmersionPatch, u) -> CurvatureSample:
    u = np.asarray(u, dtype=float)
    h_angle = mean_curvature_angle(patch, u)
    h_sff = mean_curvature_sff(patch, u)
    return CurvatureSample(
        u=u,
        H_angle=h_angle,
        H_sff=h_sff,
        beta_gradient=angle_gradient(patch, u),
        discrepancy=float(np.linalg.norm(h_angle - h_sff)),
    )


@dataclass(frozen=True)
class MinimalityReport:
    """Sampled minimality diagnostics of a Lagrangian patch."""

    max_h_norm: float
    beta_mean: float
    beta_spread: float
    residual: float
    samples: int


def minimality_residual(patch: ImmersionPatch, sample_count: int = 1000, seed=0,
                        margin: float = 0.05) -> MinimalityReport:
    """Max |H| over sampled points together with the circular spread of beta.

    The residual is the larger of the two figures; both vanish exactly
    on minimal patches, where the angle is constant.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = interior_samples(patch, sample_count, rng, margin=margin)
    betas = np.empty(sample_count)
    max_h = 0.0
    for k, u in enumerate(pts):
        betas[k] = lagrangian_angle_at(patch, u)
        max_h = max(max_h, float(np.linalg.norm(mean_curvature_angle(patch, u))))
    spread = circ_spread(betas)
    return MinimalityReport(
        max_h_norm=max_h,
        beta_mean=circ_mean(betas),
        beta_spread=spread,
        residual=max(max_h, spread),
        samples=sample_count,
    )
