"""Generators for the explicit Lagrangian families.

Every generator returns an :class:`~lagcal.immersion.ImmersionPatch`
with closed-form first and second jets, so defect and curvature tests
run at analytic accuracy:

* flat plane             f(u) = sum u_j e_j
* equivariant            f(t, s) = gamma(s) x(t), x on the quadric <x,x>_p = eps
* catenoid               equivariant with the polar curve Im gamma^n = c
* evolving quadric       f(t, s) = r(s) exp(i M s) x(t), M self-adjoint,
                         x on <x, M x>_p = c
* product of null curves f(u, v) = gamma_1(u) + J gamma_2(v) inside a
                         totally null plane P and J P
* circle-rotation torus  f(s, t) = (gamma_1(s) e^{it}, gamma_2(s) e^{it}),
                         gamma on the unit 3-sphere

Quadric hypersurfaces are charted in graph coordinates: one coordinate
is solved from the quadratic equation, the rest stay free, and the jets
come from implicit differentiation.  Charts are oriented so that the
real determinant of (chart tangents, position) is positive, which pins
the sign conventions of the Lagrangian angle formulas.
"""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .core import (
    GeometryError,
    DimensionMismatch,
    Signature,
    matrix_exp,
    metric,
    plane_props,
    wrap_angle,
)
from .immersion import ImmersionPatch, make_flat_patch

SELF_ADJOINT_TOL = 1e-10
CHART_HALF_WIDTH = 0.35
SECTOR_MARGIN = 0.05


class FamilySpecError(GeometryError):
    """A family specification violates its constraints."""


# --- scalar curve and radial-profile specs ----------------------------------

@dataclass(frozen=True, eq=False)
class Curve:
    """Planar curve gamma: I -> C with closed-form jets."""

    val: Callable
    d1: Callable
    d2: Callable
    interval: tuple[float, float]

    @staticmethod
    def circle(interval=(0.0, 2.0 * np.pi)) -> "Curve":
        return Curve(
            val=lambda s: np.exp(1j * np.asarray(s, dtype=float)),
            d1=lambda s: 1j * np.exp(1j * np.asarray(s, dtype=float)),
            d2=lambda s: -np.exp(1j * np.asarray(s, dtype=float)),
            interval=tuple(interval),
        )

    @staticmethod
    def line(z0: complex, z1: complex, interval) -> "Curve":
        return Curve(
            val=lambda s: z0 + z1 * np.asarray(s, dtype=float),
            d1=lambda s: z1 * np.ones_like(np.asarray(s, dtype=float), dtype=complex),
            d2=lambda s: np.zeros_like(np.asarray(s, dtype=float), dtype=complex),
            interval=tuple(interval),
        )

    @staticmethod
    def exponential(z0: complex, rate: complex, interval) -> "Curve":
        def val(s):
            return z0 * np.exp(rate * np.asarray(s, dtype=float))

        return Curve(
            val=val,
            d1=lambda s: rate * val(s),
            d2=lambda s: rate * rate * val(s),
            interval=tuple(interval),
        )

    @staticmethod
    def from_samples(s, values) -> "Curve":
        s = np.asarray(s, dtype=float)
        spline = CubicSpline(s, np.asarray(values, dtype=complex), bc_type="not-a-knot")
        return Curve(
            val=spline,
            d1=spline.derivative(1),
            d2=spline.derivative(2),
            interval=(float(s[0]), float(s[-1])),
        )


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Positive scale profile r(s) with jets."""

    val: Callable
    d1: Callable
    d2: Callable

    @staticmethod
    def constant(value: float = 1.0) -> "RadialProfile":
        if value <= 0:
            raise FamilySpecError("radial profile must stay positive")
        return RadialProfile(
            val=lambda s: value * np.ones_like(np.asarray(s, dtype=float)),
            d1=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            d2=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        )

    @staticmethod
    def exponential(rate: float, scale: float = 1.0) -> "RadialProfile":
        if scale <= 0:
            raise FamilySpecError("radial profile must stay positive")

        def val(s):
            return scale * np.exp(rate * np.asarray(s, dtype=float))

        return RadialProfile(val=val, d1=lambda s: rate * val(s),
                             d2=lambda s: rate * rate * val(s))


@dataclass(frozen=True, eq=False)
class SphereCurve:
    """Curve on the unit 3-sphere of C^2, with jets; values shape (..., 2)."""

    val: Callable
    d1: Callable
    d2: Callable
    interval: tuple[float, float]

    @staticmethod
    def great_circle(interval=(0.0, 2.0 * np.pi)) -> "SphereCurve":
        def val(s):
            s = np.asarray(s, dtype=float)
            return np.stack([np.cos(s).astype(complex), np.sin(s).astype(complex)], axis=-1)

        def d1(s):
            s = np.asarray(s, dtype=float)
            return np.stack([-np.sin(s).astype(complex), np.cos(s).astype(complex)], axis=-1)

        return SphereCurve(val=val, d1=d1, d2=lambda s: -val(s), interval=tuple(interval))

    @staticmethod
    def torus(alpha: float, k1: float, k2: float, interval=(0.0, 2.0 * np.pi)) -> "SphereCurve":
        c, s0 = np.cos(alpha), np.sin(alpha)

        def val(s):
            s = np.asarray(s, dtype=float)
            return np.stack([c * np.exp(1j * k1 * s), s0 * np.exp(1j * k2 * s)], axis=-1)

        def d1(s):
            s = np.asarray(s, dtype=float)
            return np.stack([1j * k1 * c * np.exp(1j * k1 * s),
                             1j * k2 * s0 * np.exp(1j * k2 * s)], axis=-1)

        def d2(s):
            s = np.asarray(s, dtype=float)
            return np.stack([-(k1 ** 2) * c * np.exp(1j * k1 * s),
                             -(k2 ** 2) * s0 * np.exp(1j * k2 * s)], axis=-1)

        return SphereCurve(val=val, d1=d1, d2=d2, interval=tuple(interval))


@dataclass(frozen=True, eq=False)
class PairCurve:
    """Real coefficient pair (a(u), b(u)) with jets; values shape (..., 2).

    Used to keep curves inside a fixed real 2-plane: the curve is
    a(u) * b_0 + b(u) * b_1 in the plane's basis.
    """

    val: Callable
    d1: Callable
    d2: Callable
    interval: tuple[float, float]

    @staticmethod
    def real_exponential(c1, c2, interval) -> "PairCurve":
        a0, la = c1
        b0, mu = c2

        def val(u):
            u = np.asarray(u, dtype=float)
            return np.stack([a0 * np.exp(la * u), b0 * np.exp(mu * u)], axis=-1)

        def d1(u):
            u = np.asarray(u, dtype=float)
            return np.stack([a0 * la * np.exp(la * u), b0 * mu * np.exp(mu * u)], axis=-1)

        def d2(u):
            u = np.asarray(u, dtype=float)
            return np.stack([a0 * la * la * np.exp(la * u), b0 * mu * mu * np.exp(mu * u)], axis=-1)

        return PairCurve(val=val, d1=d1, d2=d2, interval=tuple(interval))

    @staticmethod
    def from_samples(u, values) -> "PairCurve":
        u = np.asarray(u, dtype=float)
        spline = CubicSpline(u, np.asarray(values, dtype=float), bc_type="not-a-knot")
        return PairCurve(val=spline, d1=spline.derivative(1), d2=spline.derivative(2),
                         interval=(float(u[0]), float(u[-1])))


# --- quadric machinery --------------------------------------------------------

def check_self_adjoint(M, sig: Signature) -> float:
    """Asymmetry residual of diag(eps) @ M; zero iff M is <.,.>_p self-adjoint."""
    M = np.asarray(M, dtype=float)
    if M.shape != (sig.n, sig.n):
        raise DimensionMismatch(f"matrix shape {M.shape} does not match n={sig.n}")
    q = sig.eps[:, None] * M
    return float(np.max(np.abs(q - q.T)))


def mat_exp_iMs(M, s: float) -> np.ndarray:
    """exp(i s M) by scaling and squaring; valid for non-diagonalizable M."""
    return matrix_exp(1j * float(s) * np.asarray(M, dtype=float))


def quadric_rhs(M, sig: Signature, x) -> np.ndarray:
    """Quadratic form <x, M x>_p, broadcast over stacked points."""
    x = np.asarray(x, dtype=float)
    q = sig.eps[:, None] * np.asarray(M, dtype=float)
    return np.einsum("...i,ij,...j->...", x, q, x)


def sample_quadric(M, c: float, sig: Signature, count: int, seed) -> np.ndarray:
    """Points on <x, M x>_p = c by sphere rejection with radial rescaling."""
    if c == 0.0:
        raise FamilySpecError("sampling the cone c = 0 is unsupported; use explicit linear pieces")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count + 1000:
            raise FamilySpecError("quadric sampler failed: sign of the form never matches c")
        y = rng.normal(size=sig.n)
        y /= np.linalg.norm(y)
        q = float(quadric_rhs(M, sig, y))
        if np.sign(q) != np.sign(c):
            continue
        out.append(y * np.sqrt(c / q))
    return np.asarray(out)


@dataclass(frozen=True, eq=False)
class QuadricChart:
    """Graph-coordinate chart of { x : <x, M x>_p = c } around a center point.

    value() broadcasts over stacked chart coordinates; jacobian() and
    hessian() are pointwise and come from implicit differentiation of
    the defining quadratic.  The chart is oriented: the stacked real
    determinant det(tangents, x) is positive at the center.
    """

    M: np.ndarray
    c: float
    sig: Signature
    center: np.ndarray
    solve_index: int
    branch: float
    box: np.ndarray
    flip: np.ndarray

    @property
    def free(self) -> np.ndarray:
        return np.array([j for j in range(self.sig.n) if j != self.solve_index])

    @property
    def center_coords(self) -> np.ndarray:
        return self.center[self.free]

    def _q(self) -> np.ndarray:
        return self.sig.eps[:, None] * self.M

    def _free_to_point(self, y) -> np.ndarray:
        q = self._q()
        m = self.solve_index
        free = self.free
        y = np.asarray(y, dtype=float)
        a = q[m, m]
        b = y @ q[m, free]
        cc = np.einsum("...i,ij,...j->...", y, q[np.ix_(free, free)], y) - self.c
        x = np.zeros(y.shape[:-1] + (self.sig.n,))
        x[..., free] = y
        if abs(a) > 1e-13:
            disc = b * b - a * cc
            if np.any(disc <= 0.0):
                raise FamilySpecError("quadric chart left its validity region (no real root)")
            x[..., m] = (-b + self.branch * np.sqrt(disc)) / a
        else:
            if np.any(np.abs(b) < 1e-13):
                raise FamilySpecError("quadric chart degenerates (vanishing gradient)")
            x[..., m] = -cc / (2.0 * b)
        return x

    def _to_free(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.center_coords + self.flip * (t - self.center_coords)

    def value(self, t) -> np.ndarray:
        return self._free_to_point(self._to_free(t))

    def jacobian(self, t) -> np.ndarray:
        """Rows dx/dt_a, shape (n-1, n)."""
        x = self.value(t)
        q = self._q()
        grad = 2.0 * q @ x
        m = self.solve_index
        if abs(grad[m]) < 1e-12 * max(np.linalg.norm(grad), 1e-300):
            raise FamilySpecError("quadric chart degenerates (vanishing gradient component)")
        free = self.free
        rows = np.zeros((self.sig.n - 1, self.sig.n))
        slope = -grad[free] / grad[m]
        for a in range(self.sig.n - 1):
            rows[a, free[a]] = 1.0
            rows[a, m] = slope[a]
        return self.flip[:, None] * rows

    def hessian(self, t) -> np.ndarray:
        """Array d^2 x / dt_a dt_b, shape (n-1, n-1, n)."""
        x = self.value(t)
        q = self._q()
        qx = q @ x
        m = self.solve_index
        free = self.free
        jac = self.jacobian(t)
        out = np.zeros((self.sig.n - 1, self.sig.n - 1, self.sig.n))
        for b in range(self.sig.n - 1):
            qv = q @ jac[b]
            num = qv[free] * qx[m] - qx[free] * qv[m]
            out[:, b, m] = -self.flip * num / qx[m] ** 2
        return out


def quadric_chart(M, c: float, sig: Signature, center,
                  half_width: float = CHART_HALF_WIDTH) -> QuadricChart:
    """Build an oriented graph chart of the quadric around a center point."""
    M = np.asarray(M, dtype=float)
    center = np.asarray(center, dtype=float)
    if center.shape != (sig.n,):
        raise DimensionMismatch(f"center must have shape ({sig.n},)")
    q = sig.eps[:, None] * M
    residual = float(quadric_rhs(M, sig, center)) - c
    scale = max(abs(c), float(np.dot(center, center)), 1.0)
    if abs(residual) > 1e-9 * scale:
        raise FamilySpecError(f"chart center misses the quadric by {residual:.3e}")
    grad = 2.0 * q @ center
    m = int(np.argmax(np.abs(grad)))
    if abs(grad[m]) < 1e-9 * max(np.linalg.norm(center), 1.0):
        raise FamilySpecError("chart center has vanishing quadric gradient")
    free = np.array([j for j in range(sig.n) if j != m])

    a = q[m, m]
    branch = 1.0
    if abs(a) > 1e-13:
        b = center[free] @ q[m, free]
        branch = 1.0 if a * center[m] + b >= 0.0 else -1.0

    box = np.stack([center[free] - half_width, center[free] + half_width], axis=-1)
    chart = QuadricChart(M=M, c=float(c), sig=sig, center=center, solve_index=m,
                         branch=branch, box=box, flip=np.ones(sig.n - 1))
    # Orientation: det(tangent rows, position) > 0 at the center.
    det = np.linalg.det(np.vstack([chart.jacobian(chart.center_coords), center]))
    if abs(det) < 1e-12:
        raise FamilySpecError("chart orientation is undefined (position tangent to quadric)")
    if det < 0.0:
        flip = np.ones(sig.n - 1)
        flip[0] = -1.0
        chart = QuadricChart(M=M, c=float(c), sig=sig, center=center, solve_index=m,
                             branch=branch, box=box, flip=flip)
    return chart


def find_quadric_point(M, c: float, sig: Signature) -> np.ndarray:
    """Deterministic point on <x, M x>_p = c avoiding degenerate loci.

    Prefers points where the hypersurface is non-degenerate, i.e.
    |<M x, M x>_p| is bounded away from zero.
    """
    for x in sample_quadric(M, c, sig, 64, seed=20240):
        mx = np.asarray(M, dtype=float) @ x
        if abs(float(np.sum(sig.eps * mx * mx))) > 0.1 * float(mx @ mx):
            return x
    raise FamilySpecError("could not locate a non-degenerate quadric point")


# --- family specifications ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlatPlane:
    sig: Signature


@dataclass(frozen=True, eq=False)
class Equivariant:
    sig: Signature
    epsilon: int
    gamma: Curve
    chart_center: np.ndarray | None = None
    chart_half_width: float = CHART_HALF_WIDTH


@dataclass(frozen=True, eq=False)
class Catenoid:
    sig: Signature
    epsilon: int
    c: float
    sector: int
    chart_center: np.ndarray | None = None
    chart_half_width: float = CHART_HALF_WIDTH


@dataclass(frozen=True, eq=False)
class EvolvingQuadric:
    sig: Signature
    matrix: np.ndarray
    c: float
    r: RadialProfile = field(default_factory=RadialProfile.constant)
    s_interval: tuple[float, float] = (-0.4, 0.4)
    chart_center: np.ndarray | None = None
    chart_half_width: float = CHART_HALF_WIDTH


@dataclass(frozen=True, eq=False)
class ProductNullCurves:
    sig: Signature
    plane: np.ndarray
    gamma1: PairCurve
    gamma2: PairCurve


@dataclass(frozen=True, eq=False)
class Hopf:
    gamma: SphereCurve


# --- generators ----------------------------------------------------------------

def make_flat_plane(sig: Signature) -> ImmersionPatch:
    return make_flat_patch(sig)


def _equivariant_patch(sig: Signature, gamma: Curve, chart: QuadricChart,
                       meta: dict) -> ImmersionPatch:
    """Common assembly for gamma(s) * x(t) patches (chart axes first, s last)."""
    n = sig.n
    lo, hi = gamma.interval
    domain = np.vstack([chart.box, [lo, hi]])

    def f(u):
        u = np.asarray(u, dtype=float)
        t, s = u[..., :n - 1], u[..., n - 1]
        x = chart.value(t)
        g = np.asarray(gamma.val(s))
        return g[..., None] * x

    def d1(u):
        t, s = u[:n - 1], u[n - 1]
        g, dg = complex(gamma.val(s)), complex(gamma.d1(s))
        rows = np.empty((n, n), dtype=complex)
        rows[:n - 1] = g * chart.jacobian(t)
        rows[n - 1] = dg * chart.value(t)
        return rows

    def d2(u):
        t, s = u[:n - 1], u[n - 1]
        g = complex(gamma.val(s))
        dg = complex(gamma.d1(s))
        ddg = complex(gamma.d2(s))
        jac = chart.jacobian(t)
        out = np.empty((n, n, n), dtype=complex)
        out[:n - 1, :n - 1] = g * chart.hessian(t)
        out[:n - 1, n - 1] = dg * jac
        out[n - 1, :n - 1] = dg * jac
        out[n - 1, n - 1] = ddg * chart.value(t)
        return out

    return ImmersionPatch(sig=sig, domain=domain, f=f, d1=d1, d2=d2, vectorized=True,
                          meta=meta)


def make_equivariant(spec: Equivariant) -> ImmersionPatch:
    sig = spec.sig
    if spec.epsilon not in (-1, 1):
        raise FamilySpecError("epsilon must be +1 or -1")
    if spec.epsilon == 1 and sig.p == sig.n:
        raise FamilySpecError("the quadric <x,x>_p = 1 is empty for p = n")
    if spec.epsilon == -1 and sig.p == 0:
        raise FamilySpecError("the quadric <x,x>_p = -1 is empty for p = 0")
    lo, hi = spec.gamma.interval
    samples = np.asarray(spec.gamma.val(np.linspace(lo, hi, 64)))
    if np.min(np.abs(samples)) < 1e-12:
        raise FamilySpecError("the profile curve must avoid the origin")
    if spec.chart_center is not None:
        center = np.asarray(spec.chart_center, dtype=float)
    else:
        center = np.zeros(sig.n)
        center[0 if spec.epsilon == -1 else sig.n - 1] = 1.0
    chart = quadric_chart(np.eye(sig.n), float(spec.epsilon), sig, center,
                          spec.chart_half_width)
    meta = {"family": "equivariant", "epsilon": spec.epsilon, "chart": chart,
            "gamma": spec.gamma}
    return _equivariant_patch(sig, spec.gamma, chart, meta)


def catenoid_curve(n: int, c: float, sector: int, margin: float = SECTOR_MARGIN) -> Curve:
    """Polar branch rho = (c / sin(n phi))^(1/n) inside one angular sector.

    Along the branch Im(gamma^n) = c exactly, so the associated
    equivariant patch has constant Lagrangian angle.
    """
    if c == 0.0:
        raise FamilySpecError("the catenoid constant c must be nonzero")
    if not 0 <= sector < 2 * n:
        raise FamilySpecError(f"sector must lie in [0, {2 * n})")
    if (1 if sector % 2 == 0 else -1) != np.sign(c):
        raise FamilySpecError(
            f"sector {sector} carries sin(n phi) of sign {(-1) ** sector}; "
            f"no branch exists there for c = {c}")
    lo = sector * np.pi / n + margin
    hi = (sector + 1) * np.pi / n - margin
    if lo >= hi:
        raise FamilySpecError("sector too narrow for the requested margin")

    def parts(phi):
        phi = np.asarray(phi, dtype=float)
        sin_n = np.sin(n * phi)
        rho = (c / sin_n) ** (1.0 / n)
        cot = np.cos(n * phi) / sin_n
        return rho, cot

    def val(phi):
        phi = np.asarray(phi, dtype=float)
        rho, _ = parts(phi)
        return rho * np.exp(1j * phi)

    def d1(phi):
        phi = np.asarray(phi, dtype=float)
        rho, cot = parts(phi)
        return (-rho * cot + 1j * rho) * np.exp(1j * phi)

    def d2(phi):
        phi = np.asarray(phi, dtype=float)
        rho, cot = parts(phi)
        drho = -rho * cot
        ddrho = rho * ((n + 1) * cot ** 2 + n)
        return (ddrho + 2j * drho - rho) * np.exp(1j * phi)

    return Curve(val=val, d1=d1, d2=d2, interval=(lo, hi))


def make_catenoid(spec: Catenoid) -> ImmersionPatch:
    curve = catenoid_curve(spec.sig.n, spec.c, spec.sector)
    patch = make_equivariant(Equivariant(
        sig=spec.sig, epsilon=spec.epsilon, gamma=curve,
        chart_center=spec.chart_center, chart_half_width=spec.chart_half_width))
    patch.meta.update({"family": "catenoid", "c": spec.c, "sector": spec.sector})
    return patch


def make_evolving_quadric(spec: EvolvingQuadric) -> ImmersionPatch:
    sig = spec.sig
    M = np.asarray(spec.matrix, dtype=float)
    residual = check_self_adjoint(M, sig)
    if residual > SELF_ADJOINT_TOL:
        raise FamilySpecError(
            f"matrix is not <.,.>_p self-adjoint (residual {residual:.3e})")
    if abs(np.linalg.det(M)) < 1e-12 * max(np.max(np.abs(M)) ** sig.n, 1e-300):
        raise FamilySpecError("matrix must be invertible")
    center = (np.asarray(spec.chart_center, dtype=float)
              if spec.chart_center is not None else find_quadric_point(M, spec.c, sig))
    chart = quadric_chart(M, spec.c, sig, center, spec.chart_half_width)
    n = sig.n
    r = spec.r
    domain = np.vstack([chart.box, list(spec.s_interval)])

    def f(u):
        u = np.asarray(u, dtype=float)
        t, s = u[..., :n - 1], u[..., n - 1]
        x = chart.value(t)
        e = matrix_exp(1j * np.asarray(s)[..., None, None] * M)
        rx = np.einsum("...jk,...k->...j", e, x.astype(complex))
        return np.asarray(r.val(s))[..., None] * rx

    def d1(u):
        t, s = u[:n - 1], u[n - 1]
        x = chart.value(t)
        e = mat_exp_iMs(M, s)
        rv, rd = float(r.val(s)), float(r.d1(s))
        rows = np.empty((n, n), dtype=complex)
        rows[:n - 1] = rv * (chart.jacobian(t) @ e.T)
        rows[n - 1] = e @ (rd * x + 1j * rv * (M @ x))
        return rows

    def d2(u):
        t, s = u[:n - 1], u[n - 1]
        x = chart.value(t)
        jac = chart.jacobian(t)
        e = mat_exp_iMs(M, s)
        rv, rd, rdd = float(r.val(s)), float(r.d1(s)), float(r.d2(s))
        out = np.empty((n, n, n), dtype=complex)
        out[:n - 1, :n - 1] = rv * (chart.hessian(t) @ e.T)
        mixed = (rd * jac + 1j * rv * (jac @ M.T)) @ e.T
        out[:n - 1, n - 1] = mixed
        out[n - 1, :n - 1] = mixed
        out[n - 1, n - 1] = e @ (rdd * x + 2j * rd * (M @ x) - rv * (M @ (M @ x)))
        return out

    meta = {"family": "evolving-quadric", "matrix": M, "c": spec.c, "chart": chart,
            "r": r}
    return ImmersionPatch(sig=sig, domain=domain, f=f, d1=d1, d2=d2, vectorized=True,
                          meta=meta)


def evolving_quadric_angle(spec: EvolvingQuadric, s: float, x) -> float:
    """Closed-form Lagrangian angle law of the evolving-quadric family.

    beta(s, x) = tr(M) s + arg(c r'/r + i |M x|_p^2) + pi/2, up to a
    chart-dependent constant fixed by orientation conventions.
    """
    M = np.asarray(spec.matrix, dtype=float)
    x = np.asarray(x, dtype=float)
    mx = M @ x
    mx2 = float(np.sum(spec.sig.eps * mx * mx))
    rv, rd = float(spec.r.val(s)), float(spec.r.d1(s))
    inner = complex(spec.c * rd / rv, mx2)
    if abs(inner) < 1e-300:
        raise FamilySpecError("angle law undefined at a degenerate quadric point")
    return float(wrap_angle(np.trace(M) * s + np.angle(inner) + np.pi / 2.0))


def make_product_null_curves(spec: ProductNullCurves) -> ImmersionPatch:
    sig = spec.sig
    plane = np.asarray(spec.plane, dtype=complex)
    props = plane_props(plane, sig)
    if not props.totally_null:
        raise FamilySpecError("the carrier plane must be totally null")
    b0, b1 = plane

    def embed(coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        return coeffs[..., :1] * b0 + coeffs[..., 1:] * b1

    def f(u):
        u = np.asarray(u, dtype=float)
        return embed(spec.gamma1.val(u[..., 0])) + 1j * embed(spec.gamma2.val(u[..., 1]))

    def d1(u):
        return np.stack([embed(spec.gamma1.d1(u[0])), 1j * embed(spec.gamma2.d1(u[1]))])

    def d2(u):
        out = np.zeros((2, 2, 2), dtype=complex)
        out[0, 0] = embed(spec.gamma1.d2(u[0]))
        out[1, 1] = 1j * embed(spec.gamma2.d2(u[1]))
        return out

    domain = np.array([list(spec.gamma1.interval), list(spec.gamma2.interval)])
    meta = {"family": "product-null-curves", "plane": plane}

    # Sampled non-degeneracy of the cross pairing <gamma_1', J gamma_2'>.
    uu = np.linspace(*spec.gamma1.interval, 12)
    vv = np.linspace(*spec.gamma2.interval, 12)
    pairings = []
    for u0 in uu:
        du = embed(spec.gamma1.d1(u0))
        for v0 in vv:
            dv = embed(spec.gamma2.d1(v0))
            norm = np.linalg.norm(du) * np.linalg.norm(dv)
            pairings.append(abs(metric(du, 1j * dv, sig)) / max(norm, 1e-300))
    meta["min_cross_pairing"] = float(np.min(pairings))
    if meta["min_cross_pairing"] < 1e-8:
        meta["degenerate_pairing_warning"] = True

    return ImmersionPatch(sig=sig, domain=domain, f=f, d1=d1, d2=d2, vectorized=True,
                          meta=meta)


def make_hopf(spec: Hopf) -> ImmersionPatch:
    """Doubly rotated sphere curve f(s, t) = (gamma_1 e^{it}, gamma_2 e^{it})."""
    sig = Signature(0, 2)
    gamma = spec.gamma
    lo, hi = gamma.interval
    ss = np.linspace(lo, hi, 64)
    vals = np.asarray(gamma.val(ss))
    norms = np.linalg.norm(vals, axis=-1)
    if np.max(np.abs(norms - 1.0)) > 1e-9:
        raise FamilySpecError("the profile curve must lie on the unit sphere |gamma| = 1")
    ders = np.asarray(gamma.d1(ss))
    pairing = np.sum((ders * np.conj(1j * vals)), axis=-1).real
    speed2 = np.sum(np.abs(ders) ** 2, axis=-1)
    det_g = speed2 - pairing ** 2
    if np.min(np.abs(det_g)) < 1e-10 * max(np.max(speed2), 1.0):
        raise FamilySpecError("degenerate immersion: the curve follows the circle action")

    def f(u):
        u = np.asarray(u, dtype=float)
        s, t = u[..., 0], u[..., 1]
        return np.asarray(gamma.val(s)) * np.exp(1j * t)[..., None]

    def d1(u):
        s, t = u
        phase = np.exp(1j * t)
        return np.stack([np.asarray(gamma.d1(s)) * phase,
                         1j * np.asarray(gamma.val(s)) * phase])

    def d2(u):
        s, t = u
        phase = np.exp(1j * t)
        out = np.empty((2, 2, 2), dtype=complex)
        out[0, 0] = np.asarray(gamma.d2(s)) * phase
        out[0, 1] = out[1, 0] = 1j * np.asarray(gamma.d1(s)) * phase
        out[1, 1] = -np.asarray(gamma.val(s)) * phase
        return out

    domain = np.array([[lo, hi], [0.0, 2.0 * np.pi]])
    meta = {"family": "hopf", "min_circle_pairing": float(np.min(np.abs(pairing)))}
    if meta["min_circle_pairing"] < 1e-8:
        meta["tangential_circle_pairing_warning"] = True
    return ImmersionPatch(sig=sig, domain=domain, f=f, d1=d1, d2=d2, vectorized=True,
                          meta=meta)


def build_family(spec) -> ImmersionPatch:
    """Dispatch a family specification to its generator."""
    if isinstance(spec, FlatPlane):
        return make_flat_plane(spec.sig)
    if isinstance(spec, Equivariant):
        return make_equivariant(spec)
    if isinstance(spec, Catenoid):
        return make_catenoid(spec)
    if isinstance(spec, EvolvingQuadric):
        return make_evolving_quadric(spec)
    if isinstance(spec, ProductNullCurves):
        return make_product_null_curves(spec)
    if isinstance(spec, Hopf):
        return make_hopf(spec)
    raise FamilySpecError(f"unknown family specification: {type(spec).__name__}")
