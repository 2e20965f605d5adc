"""Mechanical verification of the subdifferential calculus.

Every rule is checked on concrete instances by computing both sides with
independent recipes and measuring their distance in the directed-set norm:
the left side always goes through the engine applied to the combined
expression, the right side through directed-set arithmetic on the operand
subdifferentials.  Reports carry the distance, the tolerance and both sides.

Verifiers guard against razor-edge active-set classifications: whenever some
max/min or sup/inf member sat within the borderline band, the computation is
repeated with a tenfold tolerance and a verdict flip is logged and recorded
in the report metadata.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .deriv import ACTIVE_RTOL, dirderiv_transform
from .dirset import (
    ActiveSetInfo,
    DirectedInterval,
    DirectedSet,
    SphereGrid,
    directed_zero,
    distance,
    inf,
    leq,
    linear_combination,
    norm,
    scale,
    sup,
)
from .engine import as_point, directed_subdiff, smooth_gradient
from .expr import (
    Affine,
    DomainError,
    Expr,
    LinComb,
    Max,
    Min,
    Product,
    Quotient,
    compose,
    evaluate,
    has_kinks,
)

logger = logging.getLogger(__name__)

#: relative scale of rule tolerances: tol = RULE_RTOL * (1 + |lhs| + |rhs|)
RULE_RTOL = 1e-9
#: absolute tolerance of the transform fixpoint identity
FIXPOINT_TOL = 1e-12
#: absolute tolerance of chain-rule and linearization-invariance checks
COMPOSITION_TOL = 1e-10


class VerificationError(RuntimeError):
    """An identity that must hold exactly failed beyond tolerance."""


class WitnessNotFoundError(RuntimeError):
    """Scan plus bisection found no admissible mean-value point.

    Existence is guaranteed for the supported instances, so this signals
    insufficient scan resolution, not a falsified theorem.
    """


@dataclass
class VerificationReport:
    """Outcome of one rule check with both sides attached."""

    rule: str
    passed: bool
    distance: float
    tolerance: float
    point: tuple
    lhs: DirectedSet
    rhs: DirectedSet
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "rule": self.rule,
            "pass": self.passed,
            "distance": self.distance,
            "tolerance": self.tolerance,
            "point": list(self.point),
            "lhs": self.lhs.to_json_dict(),
            "rhs": self.rhs.to_json_dict(),
        }
        if self.metadata:
            out["metadata"] = {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.metadata.items()
            }
        return out


def rule_tolerance(lhs: DirectedSet, rhs: DirectedSet, rtol: float = RULE_RTOL) -> float:
    return rtol * (1.0 + norm(lhs) + norm(rhs))


def _guarded_report(
    rule: str,
    compute,
    point,
    tolerance: float | None = None,
    metadata: dict | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """Run ``compute(active_rtol, info) -> (lhs, rhs)`` with the borderline guard."""
    info = ActiveSetInfo()
    lhs, rhs = compute(active_rtol, info)
    dist = distance(lhs, rhs)
    tol = rule_tolerance(lhs, rhs) if tolerance is None else tolerance
    passed = dist <= tol
    meta = dict(metadata or {})
    if info.ties:
        meta["active_set_ties"] = True
    if guard and info.borderline:
        meta["borderline_active_set"] = True
        lhs2, rhs2 = compute(active_rtol * 10.0, ActiveSetInfo())
        dist2 = distance(lhs2, rhs2)
        tol2 = rule_tolerance(lhs2, rhs2) if tolerance is None else tolerance
        if (dist2 <= tol2) != passed:
            meta["active_guard_flip"] = True
            logger.warning(
                "verdict of %s at %s flips under a tenfold active-set tolerance", rule, point
            )
    return VerificationReport(rule, passed, dist, tol, tuple(point), lhs, rhs, meta)


# ---------------------------------------------------------------------------
# exact calculus rules


def verify_sum_rule(
    f1: Expr,
    f2: Expr,
    alpha: float,
    beta: float,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """``D(alpha f1 + beta f2) = alpha D(f1) + beta D(f2)`` at ``x``."""
    xs = as_point(x)
    alpha, beta = float(alpha), float(beta)

    def compute(rtol, info):
        s1 = directed_subdiff(f1, xs, grid, rtol, info)
        s2 = directed_subdiff(f2, xs, grid, rtol, info)
        lhs = directed_subdiff(LinComb(alpha, f1, beta, f2), xs, grid, rtol, info)
        return lhs, linear_combination(alpha, s1, beta, s2)

    return _guarded_report(
        "sum", compute, xs, metadata={"alpha": alpha, "beta": beta},
        active_rtol=active_rtol, guard=guard,
    )


def verify_product_rule(
    f1: Expr,
    f2: Expr,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """``D(f1 f2) = f1(x) D(f2) + f2(x) D(f1)`` at ``x``."""
    xs = as_point(x)
    v1 = evaluate(f1, xs)
    v2 = evaluate(f2, xs)

    def compute(rtol, info):
        s1 = directed_subdiff(f1, xs, grid, rtol, info)
        s2 = directed_subdiff(f2, xs, grid, rtol, info)
        lhs = directed_subdiff(Product(f1, f2), xs, grid, rtol, info)
        return lhs, linear_combination(v1, s2, v2, s1)

    return _guarded_report("product", compute, xs, active_rtol=active_rtol, guard=guard)


def verify_quotient_rule(
    f1: Expr,
    f2: Expr,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """``D(f1/f2) = -(f1(x) D(f2) - f2(x) D(f1)) / f2(x)^2`` at ``x``."""
    xs = as_point(x)
    v1 = evaluate(f1, xs)
    v2 = evaluate(f2, xs)
    if v2 == 0.0:
        raise DomainError("quotient rule needs f2(x) != 0")

    def compute(rtol, info):
        s1 = directed_subdiff(f1, xs, grid, rtol, info)
        s2 = directed_subdiff(f2, xs, grid, rtol, info)
        lhs = directed_subdiff(Quotient(f1, f2), xs, grid, rtol, info)
        rhs = scale(-1.0 / (v2 * v2), linear_combination(v1, s2, -v2, s1))
        return lhs, rhs

    return _guarded_report("quotient", compute, xs, active_rtol=active_rtol, guard=guard)


def _extreme_actives(values, rtol, pick_max, info):
    m = max(values) if pick_max else min(values)
    eps = rtol * (1.0 + abs(m))
    gaps = [(m - v) if pick_max else (v - m) for v in values]
    idx = [i for i, gap in enumerate(gaps) if gap <= eps]
    if info is not None:
        if len(idx) > 1:
            info.ties = True
        if any(eps < gap <= 10.0 * eps for gap in gaps):
            info.borderline = True
    return idx


def verify_max_rule(
    fs,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """``D(max fs) = sup of D(f_i)`` over the members active at ``x``."""
    fs = tuple(fs)
    xs = as_point(x)
    values = [evaluate(f, xs) for f in fs]

    def compute(rtol, info):
        idx = _extreme_actives(values, rtol, True, info)
        subs = [directed_subdiff(fs[i], xs, grid, rtol, info) for i in idx]
        lhs = directed_subdiff(Max(fs), xs, grid, rtol, info)
        rhs = subs[0] if len(subs) == 1 else sup(subs, rtol, info)
        return lhs, rhs

    meta = {"values": tuple(values)}
    return _guarded_report("max", compute, xs, metadata=meta, active_rtol=active_rtol, guard=guard)


def verify_min_rule(
    fs,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """``D(min fs) = inf of D(f_i)`` over the members active at ``x``."""
    fs = tuple(fs)
    xs = as_point(x)
    values = [evaluate(f, xs) for f in fs]

    def compute(rtol, info):
        idx = _extreme_actives(values, rtol, False, info)
        subs = [directed_subdiff(fs[i], xs, grid, rtol, info) for i in idx]
        lhs = directed_subdiff(Min(fs), xs, grid, rtol, info)
        rhs = subs[0] if len(subs) == 1 else inf(subs, rtol, info)
        return lhs, rhs

    meta = {"values": tuple(values)}
    return _guarded_report("min", compute, xs, metadata=meta, active_rtol=active_rtol, guard=guard)


def verify_dirderiv_fixpoint(
    f: Expr,
    x,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """The transform is a fixpoint: ``D[f'(x; .)](0) = D[f](x)``.

    The derivative transform is positively homogeneous, so its own
    subdifferential at the origin must reproduce the original one to
    :data:`FIXPOINT_TOL`.
    """
    xs = as_point(x)
    origin = (0.0,) * len(xs)

    def compute(rtol, info):
        g = dirderiv_transform(f, xs, rtol, info)
        lhs = directed_subdiff(g, origin, grid, rtol, info)
        rhs = directed_subdiff(f, xs, grid, rtol, info)
        return lhs, rhs

    return _guarded_report(
        "fixpoint", compute, xs, tolerance=FIXPOINT_TOL,
        active_rtol=active_rtol, guard=guard,
    )


# ---------------------------------------------------------------------------
# optimality conditions


def check_min_condition(
    f: Expr,
    x,
    grid: SphereGrid | None = None,
    eps: float = 1e-9,
    active_rtol: float = ACTIVE_RTOL,
) -> bool:
    """Necessary minimum condition: the directed zero lies below ``D(f)(x)``."""
    xs = as_point(x)
    s = directed_subdiff(f, xs, grid, active_rtol)
    return leq(directed_zero(len(xs), grid), s, eps)


def check_max_condition(
    f: Expr,
    x,
    grid: SphereGrid | None = None,
    eps: float = 1e-9,
    active_rtol: float = ACTIVE_RTOL,
) -> bool:
    """Necessary maximum condition: the directed zero lies below ``-D(f)(x)``."""
    xs = as_point(x)
    s = directed_subdiff(f, xs, grid, active_rtol)
    return leq(directed_zero(len(xs), grid), scale(-1.0, s), eps)


# ---------------------------------------------------------------------------
# compositions along curves and segments


def _smooth_components(phi):
    phi = tuple(phi)
    if not phi:
        raise ValueError("need at least one inner component")
    for i, p in enumerate(phi):
        if has_kinks(p):
            raise ValueError(f"inner component {i} contains max/min and is not smooth")
    return phi


def chain_rule_1d(
    g: Expr,
    phi,
    t0: float,
    active_rtol: float = ACTIVE_RTOL,
    check: bool = True,
) -> DirectedInterval:
    """Directed subdifferential of ``t -> g(phi(t))`` at ``t0`` by the chain rule.

    Returns the stored pair ``(g'(phi(t0); -phi'(t0)), g'(phi(t0); phi'(t0)))``.
    With ``check`` enabled the value is compared against the engine applied
    to the composite expression and a mismatch beyond
    :data:`COMPOSITION_TOL` raises :class:`VerificationError`.
    """
    report = verify_chain_rule_1d(g, phi, t0, active_rtol=active_rtol)
    if check and not report.passed:
        raise VerificationError(
            f"chain rule mismatch at t0={t0!r}: distance {report.distance!r} "
            f"exceeds {report.tolerance!r}"
        )
    return report.rhs.interval


def verify_chain_rule_1d(
    g: Expr,
    phi,
    t0: float,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """Chain-rule formula against the engine on the composite expression."""
    phi = _smooth_components(phi)
    t0 = float(t0)
    values = tuple(evaluate(p, (t0,)) for p in phi)
    rates = tuple(smooth_gradient(p, (t0,))[0] for p in phi)
    neg_rates = tuple(-r for r in rates)

    def compute(rtol, info):
        transform = dirderiv_transform(g, values, rtol, info)
        formula = DirectedSet.leaf(
            evaluate(transform, neg_rates), evaluate(transform, rates)
        )
        direct = directed_subdiff(compose(g, phi), (t0,), None, rtol, info)
        return direct, formula

    meta = {"inner_values": values, "inner_rates": rates}
    return _guarded_report(
        "chain1d", compute, (t0,), tolerance=COMPOSITION_TOL,
        metadata=meta, active_rtol=active_rtol, guard=guard,
    )


def segment_subdiff(
    g: Expr,
    x0,
    x1,
    t: float,
    active_rtol: float = ACTIVE_RTOL,
) -> DirectedInterval:
    """Subdifferential pair of ``t -> g(x0 + t (x1 - x0))`` at parameter ``t``."""
    a = as_point(x0)
    b = as_point(x1)
    if len(a) != len(b):
        raise ValueError("segment endpoints must share a dimension")
    d = tuple(bv - av for av, bv in zip(a, b))
    xt = tuple(av + float(t) * dv for av, dv in zip(a, d))
    transform = dirderiv_transform(g, xt, active_rtol)
    neg_d = tuple(-dv for dv in d)
    return DirectedInterval(evaluate(transform, neg_d), evaluate(transform, d))


def verify_taylor_invariance(
    g: Expr,
    phi,
    x0,
    grid: SphereGrid | None = None,
    active_rtol: float = ACTIVE_RTOL,
    guard: bool = True,
) -> VerificationReport:
    """Replacing smooth inner maps by their linearization leaves the result.

    Compares the subdifferential of ``g(phi(.))`` at ``x0`` with that of
    ``g(phi(x0) + J(x0) (. - x0))``; first-order data at the point is all
    that can matter.
    """
    phi = _smooth_components(phi)
    xs = as_point(x0)
    n = len(xs)
    values = [evaluate(p, xs) for p in phi]
    jac = [smooth_gradient(p, xs) for p in phi]
    offsets = tuple(
        v - sum(jrow[j] * xs[j] for j in range(n)) for v, jrow in zip(values, jac)
    )
    linearized = Affine(g, tuple(tuple(jrow) for jrow in jac), offsets)

    def compute(rtol, info):
        lhs = directed_subdiff(compose(g, phi), xs, grid, rtol, info)
        rhs = directed_subdiff(linearized, xs, grid, rtol, info)
        return lhs, rhs

    meta = {"inner_values": tuple(values)}
    return _guarded_report(
        "taylor", compute, xs, tolerance=COMPOSITION_TOL,
        metadata=meta, active_rtol=active_rtol, guard=guard,
    )


# ---------------------------------------------------------------------------
# mean-value witness


@dataclass(frozen=True)
class MvtWitness:
    """Admissible mean-value point on the open segment.

    ``residual`` is the largest violation of the two one-sided conditions at
    ``t_hat`` (zero when both hold outright);  ``interval`` is the segment
    subdifferential pair at ``t_hat``.
    """

    t_hat: float
    residual: float
    interval: DirectedInterval


def mvt_witness(
    g: Expr,
    x0,
    x1,
    scan_points: int = 99,
    eps: float = 1e-8,
    active_rtol: float = ACTIVE_RTOL,
    refine_width: float = 1e-12,
) -> MvtWitness:
    """Find ``t_hat`` in (0, 1) with ``u(t_hat) >= -eps`` and ``v(t_hat) >= -eps``.

    Here ``u(t) = g'(x(t); d) - c`` and ``v(t) = g'(x(t); -d) + c`` with
    ``c = g(x1) - g(x0)`` and ``d = x1 - x0``; the two conditions say the
    embedded increment lies below the segment subdifferential at ``t_hat``.
    A uniform interior scan is tried first, then bisection refines every
    sign change of ``u`` down to ``refine_width``, which lands inside the
    active-set snap window of a kink.  Raises
    :class:`WitnessNotFoundError` when both stages fail.
    """
    a = as_point(x0)
    b = as_point(x1)
    if len(a) != len(b):
        raise ValueError("segment endpoints must share a dimension")
    d = tuple(bv - av for av, bv in zip(a, b))
    if all(dv == 0.0 for dv in d):
        raise ValueError("segment endpoints coincide")
    neg_d = tuple(-dv for dv in d)
    c = evaluate(g, b) - evaluate(g, a)
    if scan_points < 1:
        raise ValueError("scan_points must be >= 1")

    def uv(t: float):
        xt = tuple(av + t * dv for av, dv in zip(a, d))
        transform = dirderiv_transform(g, xt, active_rtol)
        return evaluate(transform, d) - c, evaluate(transform, neg_d) + c

    def witness(t, u, v):
        residual = max(0.0, -u, -v)
        return MvtWitness(t, residual, segment_subdiff(g, a, b, t, active_rtol))

    ts = sorted({1e-6, 1.0 - 1e-6} | {(i + 1) / (scan_points + 1) for i in range(scan_points)})
    scan = [(t, *uv(t)) for t in ts]
    admissible = [(min(u, v), t, u, v) for t, u, v in scan if min(u, v) >= -eps]
    if admissible:
        _, t, u, v = max(admissible, key=lambda item: item[0])
        return witness(t, u, v)

    for (ta, ua, va), (tb, ub, vb) in zip(scan, scan[1:]):
        if (ua < 0.0) == (ub < 0.0):
            continue
        lo, lo_uv = ta, (ua, va)
        hi, hi_uv = tb, (ub, vb)
        while hi - lo > refine_width:
            mid = 0.5 * (lo + hi)
            mid_uv = uv(mid)
            if (mid_uv[0] < 0.0) == (lo_uv[0] < 0.0):
                lo, lo_uv = mid, mid_uv
            else:
                hi, hi_uv = mid, mid_uv
        for t, (u, v) in ((hi, hi_uv), (lo, lo_uv)):
            if min(u, v) >= -eps:
                return witness(t, u, v)

    raise WitnessNotFoundError(
        f"no admissible point after scanning {len(ts)} interior points and "
        "refining all sign changes; increase scan_points"
    )
