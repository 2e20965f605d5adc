"""Directed subdifferentials with an exactly verified calculus.

The package builds nonsmooth functions from a small expression language,
computes their directed subdifferentials recursively over dimensions, and
mechanically verifies every calculus rule, optimality condition, chain rule
and mean-value statement on concrete instances.
"""

from .basis import Basis, orthobasis
from .deriv import dirderiv, dirderiv_transform, restrict
from .dirset import (
    ActiveSetInfo,
    DirectedInterval,
    DirectedSet,
    GridMismatchError,
    SphereGrid,
    directed_zero,
    distance,
    embed_interval,
    embed_point,
    embed_polygon,
    inf,
    leq,
    linear_combination,
    norm,
    scale,
    sup,
)
from .engine import KinkError, default_grid, directed_subdiff, embed_gradient, smooth_gradient
from .expr import (
    Affine,
    ArityError,
    Const,
    DomainError,
    Expr,
    ExprError,
    LinComb,
    Max,
    Min,
    Product,
    Quotient,
    SmoothCompose,
    SmoothUnary,
    Var,
    compose,
    const,
    evaluate,
    has_kinks,
    powk,
    sqr,
    vabs,
    var,
    vmax,
    vmin,
)
from .oracle import FdSchedule, dini_fd
from .parser import ParseError, parse
from .theorems import (
    MvtWitness,
    VerificationError,
    VerificationReport,
    WitnessNotFoundError,
    chain_rule_1d,
    check_max_condition,
    check_min_condition,
    mvt_witness,
    segment_subdiff,
    verify_chain_rule_1d,
    verify_dirderiv_fixpoint,
    verify_max_rule,
    verify_min_rule,
    verify_product_rule,
    verify_quotient_rule,
    verify_sum_rule,
    verify_taylor_invariance,
)
from .viz import Segment, viz_segments, write_segments_csv, write_segments_svg

__version__ = "0.1.0"

__all__ = [
    "ActiveSetInfo",
    "Affine",
    "ArityError",
    "Basis",
    "Const",
    "DirectedInterval",
    "DirectedSet",
    "DomainError",
    "Expr",
    "ExprError",
    "FdSchedule",
    "GridMismatchError",
    "KinkError",
    "LinComb",
    "Max",
    "Min",
    "MvtWitness",
    "ParseError",
    "Product",
    "Quotient",
    "Segment",
    "SmoothCompose",
    "SmoothUnary",
    "SphereGrid",
    "Var",
    "VerificationError",
    "VerificationReport",
    "WitnessNotFoundError",
    "chain_rule_1d",
    "check_max_condition",
    "check_min_condition",
    "compose",
    "const",
    "default_grid",
    "dini_fd",
    "dirderiv",
    "dirderiv_transform",
    "directed_subdiff",
    "directed_zero",
    "distance",
    "embed_gradient",
    "embed_interval",
    "embed_point",
    "embed_polygon",
    "evaluate",
    "has_kinks",
    "inf",
    "leq",
    "linear_combination",
    "mvt_witness",
    "norm",
    "orthobasis",
    "parse",
    "powk",
    "restrict",
    "scale",
    "segment_subdiff",
    "smooth_gradient",
    "sqr",
    "sup",
    "vabs",
    "var",
    "verify_chain_rule_1d",
    "verify_dirderiv_fixpoint",
    "verify_max_rule",
    "verify_min_rule",
    "verify_product_rule",
    "verify_quotient_rule",
    "verify_sum_rule",
    "verify_taylor_invariance",
    "viz_segments",
    "vmax",
    "vmin",
    "write_segments_csv",
    "write_segments_svg",
]
