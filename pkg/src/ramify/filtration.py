"""Ramification filtrations in lower and upper numbering on finite p-groups.

A filtration assigns every non-identity element a positive break value
(the identity sits above everything); the level set at height v collects
the identity and all elements with value >= v + 1.  Each level set must be
a normal subgroup.  The transition function between the two numberings is
built by integrating subgroup indices across unit levels, yielding an exact
piecewise-linear function, and quotients inherit their filtration through
the image identity: the quotient's upper level set at u is the image of
the ambient one at u, with the quotient's own lower numbering recomputed
from its own transition function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError
from .herbrand import PLFunc, identity_func, invert
from .pcgroup import Element, PcGroup, Subgroup
from .ratio import parse_rat

__all__ = [
    "RamFiltration",
    "CosetGroup",
    "ValidationReport",
    "quotient_filtration",
]

_INF = None  # internal marker for the identity's value


class CosetGroup:
    """Quotient G/H on canonical coset representatives (minimal exponent tuple)."""

    def __init__(self, group: PcGroup, kernel: Subgroup):
        if kernel.group is not group:
            raise InputError("kernel must be a subgroup of the given group")
        if not kernel.is_normal():
            raise InputError("kernel must be a normal subgroup")
        self.ambient = group
        self.kernel = kernel
        rep_of: dict[Element, Element] = {}
        reps: list[Element] = []
        kernel_sorted = sorted(kernel.elements)
        for x in group.elements():
            if x in rep_of:
                continue
            coset = sorted(group.product(x, h) for h in kernel_sorted)
            rep = coset[0]
            reps.append(rep)
            for y in coset:
                rep_of[y] = rep
        self._rep_of = rep_of
        self._reps = sorted(reps)

    @property
    def order(self) -> int:
        return len(self._reps)

    def elements(self) -> list[Element]:
        return list(self._reps)

    def identity(self) -> Element:
        return self.ambient.identity()

    def project(self, x: Element) -> Element:
        return self._rep_of[x]

    def product(self, x: Element, y: Element) -> Element:
        return self._rep_of[self.ambient.product(x, y)]

    def inverse(self, x: Element) -> Element:
        return self._rep_of[self.ambient.inverse(x)]

    def pc_generators(self) -> list[Element]:
        images = {self.project(a) for a in self.ambient.pc_generators()}
        images.discard(self.identity())
        return sorted(images)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    level: Fraction | None = None
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class RamFiltration:
    """Break-value assignment with normal-subgroup level sets.

    ``ig`` maps non-identity elements to their value; ``default`` fills any
    element not listed.  User-supplied values must be positive integers;
    quotient construction may introduce rational values, which are kept
    exact.
    """

    def __init__(
        self,
        group,
        ig: Mapping[Element, object],
        default=None,
        require_integer: bool = True,
        check: bool = True,
    ):
        self.group = group
        identity = group.identity()
        members = set(group.elements())
        values: dict[Element, Fraction] = {}
        for x, v in dict(ig).items():
            x = tuple(x)
            if x == identity:
                raise InputError("the identity carries no finite value")
            if x not in members:
                raise InputError(f"element {x} does not belong to the group")
            v = parse_rat(v)
            values[x] = v
        for x in group.elements():
            if x == identity or x in values:
                continue
            if default is None:
                raise InputError(f"no value for element {x} and no default given")
            values[x] = parse_rat(default)
        for x, v in values.items():
            if v <= 0:
                raise InputError(f"value for {x} must be positive, got {v}")
            if require_integer and v.denominator != 1:
                raise InputError(f"value for {x} must be an integer, got {v}")
        self.ig = values
        if check:
            report = self.validate()
            if not report.ok:
                raise InputError(
                    f"level set at {report.level} is not a normal subgroup; "
                    f"witness {report.witness} ({report.reason})"
                )

    # -- level sets -------------------------------------------------------

    def value_of(self, x: Element):
        """Break value of x; None for the identity (above every level)."""
        x = tuple(x)
        if x == self.group.identity():
            return _INF
        try:
            return self.ig[x]
        except KeyError:
            raise InputError(f"element {x} does not belong to the group") from None

    def distinct_values(self) -> list[Fraction]:
        return sorted(set(self.ig.values()))

    def level_set(self, t) -> Subgroup:
        """Elements of value >= t + 1, plus the identity."""
        t = parse_rat(t)
        members = {x for x, v in self.ig.items() if v >= t + 1}
        members.add(self.group.identity())
        return Subgroup(self.group, frozenset(members), ())

    def lower_breaks(self) -> list[Fraction]:
        """Levels t where the level set properly drops just above t."""
        return [v - 1 for v in self.distinct_values()]

    # -- validation --------------------------------------------------------

    def validate(self) -> ValidationReport:
        g = self.group
        identity = g.identity()
        gens = g.pc_generators()
        gen_inv = {a: g.inverse(a) for a in gens}
        for v in self.distinct_values():
            level = v - 1
            members = frozenset(
                {x for x, val in self.ig.items() if val >= v} | {identity}
            )
            for x in members:
                for y in members:
                    if g.product(x, y) not in members:
                        return ValidationReport(False, level, (x, y), "not closed under product")
            for x in members:
                for a in gens:
                    if g.product(g.product(gen_inv[a], x), a) not in members:
                        return ValidationReport(False, level, (a, x), "not normal")
        return ValidationReport(True)

    # -- transition functions -----------------------------------------------

    def herbrand_func(self) -> PLFunc:
        """Lower-to-upper transition: integrate 1/(G_0 : G_t) across levels."""
        order = self.group.order
        if order == 1 or not self.ig:
            return identity_func()
        values = self.distinct_values()
        counts = []
        for v in values:
            counts.append(1 + sum(1 for val in self.ig.values() if val >= v))
        # segment boundaries in lower numbering and the slope after each
        xs: list[Fraction] = []
        slopes: list[Fraction] = [Fraction(1)]
        for k, v in enumerate(values):
            tau = v - 1
            after = Fraction(counts[k + 1], order) if k + 1 < len(values) else Fraction(1, order)
            if tau == 0:
                slopes[0] = after
                continue
            xs.append(tau)
            slopes.append(after)
        ys: list[Fraction] = []
        prev_x, prev_y = Fraction(0), Fraction(0)
        for k, x in enumerate(xs):
            y = prev_y + slopes[k] * (x - prev_x)
            ys.append(y)
            prev_x, prev_y = x, y
        # merge collinear segments to keep the representation normalized
        bps, kept = [], [slopes[0]]
        for k in range(len(xs)):
            if slopes[k + 1] == kept[-1]:
                continue
            bps.append((xs[k], ys[k]))
            kept.append(slopes[k + 1])
        return PLFunc(tuple(bps), tuple(kept))

    def upper_breaks(self) -> list[Fraction]:
        phi = self.herbrand_func()
        return [phi.eval(t) for t in self.lower_breaks()]

    def upper_level(self, u) -> Subgroup:
        """Level set in upper numbering: lower level at psi(u)."""
        u = parse_rat(u)
        if u < 0:
            raise InputError(f"upper level must be >= 0, got {u}")
        psi = invert(self.herbrand_func())
        return self.level_set(psi.eval(u))


def quotient_filtration(rf: RamFiltration, kernel: Subgroup) -> RamFiltration:
    """Filtration on G/H whose upper level sets are the images of G's.

    Each coset inherits the largest upper level at which it still meets the
    ambient level set; the quotient's lower numbering is then recomputed by
    integrating indices along its own upper filtration.
    """
    group = rf.group
    if not isinstance(group, PcGroup):
        raise InputError("quotients are taken of presented groups only")
    quot = CosetGroup(group, kernel)
    identity_coset = quot.identity()
    phi = rf.herbrand_func()
    # largest upper level containing each non-identity coset
    last_level: dict[Element, Fraction] = {}
    for x in group.elements():
        v = rf.value_of(x)
        if v is _INF:
            continue
        c = quot.project(x)
        if c == identity_coset:
            continue
        u = phi.eval(v - 1)
        if c not in last_level or last_level[c] < u:
            last_level[c] = u
    if not last_level:
        return RamFiltration(quot, {}, require_integer=False, check=False)
    # psi of the quotient: slope (Q : Q^t) between its upper jump points
    levels = sorted(set(last_level.values()))
    qorder = quot.order
    ig_q: dict[Element, Fraction] = {}
    psi_at: dict[Fraction, Fraction] = {}
    prev_u, prev_psi = Fraction(0), Fraction(0)
    for u in levels:
        size = 1 + sum(1 for lv in last_level.values() if lv >= u)
        prev_psi = prev_psi + Fraction(qorder, size) * (u - prev_u)
        psi_at[u] = prev_psi
        prev_u = u
    for c, u in last_level.items():
        ig_q[c] = psi_at[u] + 1
    return RamFiltration(quot, ig_q, require_integer=False)
