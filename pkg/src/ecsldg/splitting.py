"""Operator-splitting schemes over the two exact substep maps.

The base maps are TRANSPORT (free streaming in x, field frozen) and ACCEL
(velocity advection coupled to the field update).  The first-order
composition applies TRANSPORT then ACCEL; its adjoint is the reverse.
Available compositions: Lie (1st order), Strang (2nd), the triple-jump
family SS_{2m+1} (4th), and the ten-stage Lie/adjoint product "10Lie"
(4th).  Negative substep coefficients are first-class.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

TRANSPORT = "transport"
ACCEL = "accel"

_SQRT19 = math.sqrt(19.0)
# ten-stage fourth-order coefficients; b is a reversed (a1=b5 etc.)
TEN_LIE_A = (
    (146.0 + 5.0 * _SQRT19) / 540.0,
    (-2.0 + 10.0 * _SQRT19) / 135.0,
    1.0 / 5.0,
    (-23.0 - 20.0 * _SQRT19) / 270.0,
    (14.0 - _SQRT19) / 108.0,
)
TEN_LIE_B = tuple(reversed(TEN_LIE_A))

MAX_TRIPLE_JUMP_M = 19  # stability stops improving past m ~ 19


@dataclass(frozen=True)
class SplittingScheme:
    """Tagged scheme choice; expand() yields the fused substep sequence."""

    tag: str  # lie | strang | ss | tenlie
    m: int = 0  # order parameter for the ss family (SS_{2m+1})

    def __post_init__(self):
        if self.tag not in ("lie", "strang", "ss", "tenlie"):
            raise ValueError(f"unknown splitting tag {self.tag!r}")
        if self.tag == "ss" and not 1 <= self.m <= MAX_TRIPLE_JUMP_M:
            raise ValueError(
                f"SS_(2m+1) needs 1 <= m <= {MAX_TRIPLE_JUMP_M}, got m={self.m}"
            )

    @property
    def name(self) -> str:
        return f"ss{2 * self.m + 1}" if self.tag == "ss" else self.tag

    @property
    def order(self) -> int:
        return {"lie": 1, "strang": 2, "ss": 4, "tenlie": 4}[self.tag]

    def expand(self):
        return expand_scheme(self)


def parse_scheme(name: str) -> SplittingScheme:
    """Parse a scheme name: lie, strang, ss3, ss13, ..., tenlie/10lie."""
    s = name.strip().lower()
    if s == "lie":
        return SplittingScheme("lie")
    if s == "strang":
        return SplittingScheme("strang")
    if s in ("tenlie", "10lie"):
        return SplittingScheme("tenlie")
    match = re.fullmatch(r"ss(\d+)", s)
    if match:
        stages = int(match.group(1))
        if stages < 3 or stages % 2 == 0:
            raise ValueError(f"ss schemes are odd-stage (ss3, ss5, ...), got {name!r}")
        return SplittingScheme("ss", m=(stages - 1) // 2)
    raise ValueError(f"unknown splitting scheme {name!r}")


def triple_jump_coefficients(m: int) -> tuple[float, float]:
    """alpha = 1/(2m - (2m)^(1/3)) and beta = 1 - 2 m alpha."""
    alpha = 1.0 / (2 * m - (2.0 * m) ** (1.0 / 3.0))
    return alpha, 1.0 - 2 * m * alpha


def _fuse(steps):
    """Merge adjacent transport substeps; never merge accel substeps.

    Transport is an exact translation, so consecutive applications compose
    exactly in dt and merging only changes the re-projection cadence.  The
    accel map is a midpoint solve: two solves over c1 and c2 differ from
    one solve over c1+c2 at O(dt^3), so merging would cap compositions at
    second order.
    """
    out = []
    for kind, coeff in steps:
        if coeff == 0.0:
            continue
        if out and out[-1][0] == kind == TRANSPORT:
            out[-1] = (kind, out[-1][1] + coeff)
        else:
            out.append((kind, coeff))
    return out


def expand_scheme(scheme: SplittingScheme) -> list[tuple[str, float]]:
    """Ordered (kind, coefficient) substeps; executed left to right.

    Coefficients of each kind sum to 1: every scheme advances both
    subsystems by exactly one step.
    """
    if scheme.tag == "lie":
        steps = [(TRANSPORT, 1.0), (ACCEL, 1.0)]
    elif scheme.tag == "strang":
        steps = [(TRANSPORT, 0.5), (ACCEL, 1.0), (TRANSPORT, 0.5)]
    elif scheme.tag == "ss":
        alpha, beta = triple_jump_coefficients(scheme.m)

        def strang_at(c):
            return [(TRANSPORT, 0.5 * c), (ACCEL, c), (TRANSPORT, 0.5 * c)]

        steps = []
        for c in [alpha] * scheme.m + [beta] + [alpha] * scheme.m:
            steps += strang_at(c)
    else:  # tenlie: phi*(b1) phi(a1) ... phi*(b5) phi(a5), phi = transport-then-accel
        steps = []
        for a_i, b_i in zip(TEN_LIE_A, TEN_LIE_B):
            steps += [(ACCEL, b_i), (TRANSPORT, b_i)]   # adjoint factor
            steps += [(TRANSPORT, a_i), (ACCEL, a_i)]   # direct factor
    fused = _fuse(steps)
    for kind in (TRANSPORT, ACCEL):
        total = math.fsum(c for knd, c in fused if knd == kind)
        if abs(total - 1.0) > 1e-14:
            raise AssertionError(f"{scheme.name}: {kind} coefficients sum to {total!r}")
    return fused
