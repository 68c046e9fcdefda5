"""Independent route to F2(x): the Fredholm determinant of the Airy-kernel
integral operator on (x, inf),

    F2(x) = det(1 - A_x),   A(u, v) = (Ai(u) Ai'(v) - Ai'(u) Ai(v)) / (u - v),

discretized by Nystrom quadrature.  The half-line is mapped algebraically to
a finite interval and truncated where Ai(u)^2 drops below 1e-40 (the kernel
decays super-exponentially, so Gauss nodes on the mapped interval converge
spectrally).  The symmetrized matrix delta_ij - sqrt(w_i w_j) A(u_i, u_j) is
positive definite with eigenvalues in (0, 1]; its determinant comes from a
Cholesky factorization, which positive definiteness makes unconditionally
stable.

This module is the cross-validation oracle for the Painleve route and never
calls into it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

from mpmath import mp, mpf

from . import specialfn
from .errors import DomainError, InternalConsistencyError, PrecisionError
from .precision import PrecisionContext, round_to
from .quadrature import gauss_legendre

_MAP_SCALE = 10.0
_TRUNC_AI_SQ = 1e-40
_DIAGONAL_SWITCH = 1e-6


@dataclass(frozen=True)
class QuadratureRule:
    """Mapped Nystrom rule on (x, u_cut): nodes ascending, weights positive."""

    nodes: List[mpf]
    weights: List[mpf]
    size: int


def _truncation_point(x: float) -> float:
    """u beyond which Ai(u)^2 < _TRUNC_AI_SQ (fixed-point on the decay law)."""
    target = -0.5 * math.log(_TRUNC_AI_SQ)  # bound on -log Ai(u)
    u = (1.5 * target) ** (2.0 / 3.0)
    for _ in range(8):
        u = (1.5 * (target - math.log(2 * math.sqrt(math.pi) * u ** 0.25))) ** (2.0 / 3.0)
    return max(u, x + 1.0)


def build_rule(x, m: int, ctx: PrecisionContext) -> QuadratureRule:
    """m-point Gauss-Legendre rule pushed through u = x + 10 (1+s)/(1-s)."""
    if m < 20:
        raise DomainError("quadrature size m must be >= 20")
    xf = float(x)
    u_cut = _truncation_point(xf)
    prec = ctx.precision_bits + 32
    with mp.workprec(prec):
        x = mpf(x)
        scale = mpf(_MAP_SCALE)
        span = mpf(u_cut) - x
        s_max = (span - scale) / (span + scale)
        xs, ws = gauss_legendre(m, prec)
        half = (s_max + 1) / 2
        mid = (s_max - 1) / 2
        nodes: List[mpf] = []
        weights: List[mpf] = []
        for s_ref, w_ref in zip(xs, ws):
            s = mid + half * s_ref
            u = x + scale * (1 + s) / (1 - s)
            du_ds = 2 * scale / (1 - s) ** 2
            nodes.append(u)
            weights.append(w_ref * half * du_ds)
    return QuadratureRule(nodes=nodes, weights=weights, size=m)


def airy_kernel(u, v, ctx: PrecisionContext) -> mpf:
    """Airy kernel value.  Near the diagonal the displayed quotient cancels,
    so |u - v| below the switch threshold uses the exact diagonal value
    Ai'(z)^2 - z Ai(z)^2 at the midpoint plus the first Taylor correction
    h^2 (Ai Ai'/3 + (2z/3)(Ai'^2 - z Ai^2)), h = (u - v)/2."""
    with mp.workprec(ctx.precision_bits + 16):
        u, v = mpf(u), mpf(v)
        if abs(u - v) < _DIAGONAL_SWITCH:
            z = (u + v) / 2
            h = (u - v) / 2
            ai, aip = specialfn.airy_ai(z, ctx)
            diag = aip * aip - z * ai * ai
            corr = ai * aip / 3 + 2 * z / 3 * (aip * aip - z * ai * ai)
            return round_to(diag + h * h * corr, ctx.precision_bits)
        aiu, aipu = specialfn.airy_ai(u, ctx)
        aiv, aipv = specialfn.airy_ai(v, ctx)
        return round_to((aiu * aipv - aipu * aiv) / (u - v), ctx.precision_bits)


def nystrom_matrix(x, m: int, ctx: PrecisionContext) -> List[List[mpf]]:
    """The symmetrized matrix delta_ij - sqrt(w_i w_j) A(u_i, u_j)."""
    rule = build_rule(x, m, ctx)
    prec = ctx.precision_bits + 32
    with mp.workprec(prec):
        airy: List[Tuple[mpf, mpf]] = []
        for u in rule.nodes:
            airy.append(specialfn.airy_ai(u, ctx))
        sq = [mp.sqrt(w) for w in rule.weights]
        mat = [[mpf(0)] * m for _ in range(m)]
        for i in range(m):
            ui = rule.nodes[i]
            aii, aipi = airy[i]
            for j in range(i + 1):
                uj = rule.nodes[j]
                if i == j:
                    k = aipi * aipi - ui * aii * aii
                else:
                    aij, aipj = airy[j]
                    k = (aii * aipj - aipi * aij) / (ui - uj)
                val = sq[i] * sq[j] * k
                mat[i][j] = -val
                mat[j][i] = -val
            mat[i][i] += 1
        return mat


def _f2_once(x, m: int, ctx: PrecisionContext) -> mpf:
    mat = nystrom_matrix(x, m, ctx)
    prec = ctx.precision_bits + 32
    with mp.workprec(prec):
        # Cholesky pivots; det = product of pivots
        logdet = mpf(0)
        for k in range(m):
            pivot = mat[k][k]
            if pivot <= 0:
                raise InternalConsistencyError(
                    "Nystrom matrix lost positive definiteness; the operator "
                    "norm must stay below 1")
            logdet += mp.log(pivot)
            inv = 1 / pivot
            col = [mat[i][k] for i in range(k + 1, m)]
            for a, i in enumerate(range(k + 1, m)):
                f = col[a] * inv
                if f != 0:
                    mi = mat[i]
                    for b, j in enumerate(range(k + 1, i + 1)):
                        mi[j] -= f * col[b]
        return mp.exp(logdet)


def f2_fredholm(x, m: int, ctx: PrecisionContext,
                verify_convergence: bool = True) -> mpf:
    """F2(x) = det(1 - A_x) by Nystrom discretization with m nodes.

    With verify_convergence, the value is recomputed at 2m nodes and a
    PrecisionError is raised if the two disagree beyond ctx.tolerance."""
    try:
        xf = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"x must be a finite real, got {x!r}")
    if not math.isfinite(xf):
        raise DomainError(f"x must be a finite real, got {x!r}")
    val = _f2_once(x, m, ctx)
    if verify_convergence:
        ref = _f2_once(x, 2 * m, ctx)
        if abs(val - ref) > ctx.tol():
            raise PrecisionError(
                f"Nystrom size m={m} is too small for tolerance "
                f"{ctx.tolerance} at x={x}: |f2(m) - f2(2m)| = {abs(val - ref)}")
        val = ref
    return round_to(val, ctx.precision_bits)
