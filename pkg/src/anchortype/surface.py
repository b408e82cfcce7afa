"""Anchor-ring geometry: metric, Beltrami operator, Gauss map, curvatures.

The torus is ``x(t, phi) = (g cos phi, g sin phi, r sin t)`` with
``g = a + r cos t`` and ``a > r > 0``.  Functions of (t, phi) are carried as
:class:`PhiHarmonic` triples, which the Laplacian maps to themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .exactnum import R, ParamRational
from .trigring import (
    COS,
    GAMMA,
    INV_GAMMA,
    SIN,
    PhiHarmonic,
    TrigPoly,
    ddt,
)

Triple = tuple[PhiHarmonic, PhiHarmonic, PhiHarmonic]


@dataclass(frozen=True)
class DiffOp:
    """``a_tt d^2/dt^2 + a_t d/dt + a_pp d^2/dphi^2`` with t-only coefficients."""

    a_tt: TrigPoly
    a_t: TrigPoly
    a_pp: TrigPoly

    def apply(self, f: TrigPoly | PhiHarmonic):
        if isinstance(f, PhiHarmonic):
            return apply_op(self, f)
        return self._apply_channel(f, harmonic=False)

    def _apply_channel(self, f: TrigPoly, harmonic: bool) -> TrigPoly:
        if f.is_zero():
            return TrigPoly()
        d1 = ddt(f)
        out = self.a_tt * ddt(d1) + self.a_t * d1
        if harmonic and not self.a_pp.is_zero():
            # d^2/dphi^2 cos(phi) = -cos(phi)
            out = out - self.a_pp * f
        return out


def apply_op(L: DiffOp, f: PhiHarmonic) -> PhiHarmonic:
    return PhiHarmonic(
        L._apply_channel(f.f0, harmonic=False),
        L._apply_channel(f.fc, harmonic=True),
        L._apply_channel(f.fs, harmonic=True),
    )


def beltrami_from_metric(g_tt: TrigPoly, g_pp: TrigPoly, sqrt_g: TrigPoly) -> DiffOp:
    """Beltrami operator -(1/sqrt g) d_j(sqrt g g^ij d_i) for a t-only diagonal metric.

    ``sqrt_g`` must square to ``g_tt * g_pp``.
    """
    if sqrt_g * sqrt_g != g_tt * g_pp:
        raise ValueError("sqrt_g does not square to det g")
    inv_tt = g_tt.inv()
    inv_pp = g_pp.inv()
    a_t = -(sqrt_g.inv() * ddt(sqrt_g * inv_tt))
    # coefficients do not depend on phi, so the phi-derivative of sqrt(g) g^pp drops
    return DiffOp(a_tt=-inv_tt, a_t=a_t, a_pp=-inv_pp)


@dataclass(frozen=True)
class SurfaceContext:
    position: Triple
    gauss: Triple
    g_tt: TrigPoly
    g_tp: TrigPoly
    g_pp: TrigPoly
    H: TrigPoly
    K: TrigPoly
    laplacian: DiffOp


def _r_inv(power: int = 1) -> ParamRational:
    return ParamRational(1, R**power)


def anchor_laplacian() -> DiffOp:
    return DiffOp(
        a_tt=TrigPoly.const(-_r_inv(2)),
        a_t=SIN * INV_GAMMA * _r_inv(),
        a_pp=-(INV_GAMMA * INV_GAMMA),
    )


def diagnostic_operator() -> DiffOp:
    """``-(1/r^2) d^2/dt^2`` alone; sin t is an eigenfunction (eigenvalue 1/r^2)."""
    zero = TrigPoly()
    return DiffOp(a_tt=TrigPoly.const(-_r_inv(2)), a_t=zero, a_pp=zero)


def build_anchor_ring() -> SurfaceContext:
    position = (
        PhiHarmonic(fc=GAMMA),
        PhiHarmonic(fs=GAMMA),
        PhiHarmonic(f0=SIN * R),
    )
    gauss = (
        PhiHarmonic(fc=-COS),
        PhiHarmonic(fs=-COS),
        PhiHarmonic(f0=-SIN),
    )
    g_tt = TrigPoly.const(R * R)
    g_pp = GAMMA * GAMMA
    # second fundamental form against n: b_tt = r, b_tp = 0, b_pp = g cos t
    H, K = curvatures_from_forms(g_tt, g_pp, TrigPoly.const(R), GAMMA * COS)
    return SurfaceContext(
        position=position,
        gauss=gauss,
        g_tt=g_tt,
        g_tp=TrigPoly(),
        g_pp=g_pp,
        H=H,
        K=K,
        laplacian=anchor_laplacian(),
    )


def curvatures_from_forms(
    g_tt: TrigPoly, g_pp: TrigPoly, b_tt: TrigPoly, b_pp: TrigPoly
) -> tuple[TrigPoly, TrigPoly]:
    """(H, K) from diagonal first and second fundamental forms."""
    H = (b_tt * g_pp + b_pp * g_tt) / (g_tt * g_pp * 2)
    K = (b_tt * b_pp) / (g_tt * g_pp)
    return H, K


def grad_t(f: TrigPoly) -> Triple:
    """Surface gradient of a t-only function: (f'/r^2) * x_t."""
    w = ddt(f) * ParamRational(1, R * R)
    x_t = (
        PhiHarmonic(fc=-SIN * R),
        PhiHarmonic(fs=-SIN * R),
        PhiHarmonic(f0=COS * R),
    )
    return tuple(comp * w for comp in x_t)  # type: ignore[return-value]


def laplace_position_residual(ctx: SurfaceContext) -> Triple:
    L = ctx.laplacian
    return tuple(
        apply_op(L, x) + n * (ctx.H * 2) for x, n in zip(ctx.position, ctx.gauss)
    )  # type: ignore[return-value]


def laplace_gauss_rhs(ctx: SurfaceContext) -> Triple:
    """grad(2H) + (4H^2 - 2K) n, componentwise."""
    grad = grad_t(ctx.H * 2)
    factor = ctx.H * ctx.H * 4 - ctx.K * 2
    return tuple(gi + n * factor for gi, n in zip(grad, ctx.gauss))  # type: ignore[return-value]


def laplace_gauss_residual(ctx: SurfaceContext) -> Triple:
    L = ctx.laplacian
    rhs = laplace_gauss_rhs(ctx)
    return tuple(apply_op(L, n) - v for n, v in zip(ctx.gauss, rhs))  # type: ignore[return-value]


def check_laplace_position(ctx: SurfaceContext) -> bool:
    """Delta x = -2 H n on all three coordinates, as exact zero normal forms."""
    return all(v.is_zero() for v in laplace_position_residual(ctx))


def check_laplace_gauss(ctx: SurfaceContext) -> bool:
    """Delta n = grad(2H) + (4H^2 - 2K) n on all three coordinates."""
    return all(v.is_zero() for v in laplace_gauss_residual(ctx))


def check_operator_derivation(ctx: SurfaceContext) -> bool:
    """The stored Laplacian equals the one built from the metric."""
    derived = beltrami_from_metric(ctx.g_tt, ctx.g_pp, GAMMA * R)
    L = ctx.laplacian
    return derived.a_tt == L.a_tt and derived.a_t == L.a_t and derived.a_pp == L.a_pp


def perturbed(ctx: SurfaceContext, dH=0, dK=0) -> SurfaceContext:
    """Copy with H and K shifted; used as falsification controls."""
    return replace(ctx, H=ctx.H + dH, K=ctx.K + dK)
