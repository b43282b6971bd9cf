"""Finite p-groups given by power-commutator presentations.

A presentation on generators a_1 < ... < a_n over a prime p stores, for
each j, the word a_j^p as an exponent vector over the later generators,
and for each pair i < j the commutator [a_j, a_i] = a_j^-1 a_i^-1 a_j a_i,
again over generators strictly after a_j.  Elements are normal forms
a_1^e1 ... a_n^en with 0 <= e < p, written as plain exponent tuples; the
product is computed by collection from the left.

Consistency (the collected product being associative on all p^n normal
forms) is decided by the standard overlap tests on generator and power
triples; small groups are additionally verified against the full product
table.  All failure paths report an explicit witness triple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CapExceededError, InconsistentPresentationError, InputError
from .ratio import require_prime

__all__ = [
    "PcPresentation",
    "PcGroup",
    "Subgroup",
    "ConsistencyResult",
    "consistency_check",
    "build_heisenberg",
    "build_tower_truncation",
    "shipped_truncations",
]

Element = tuple[int, ...]

DEFAULT_CAP = 2**20
# full multiplication-table verification is only attempted at desk scale
_TABLE_VERIFY_LIMIT = 256
_TRIPLE_VERIFY_LIMIT = 32
_MAX_COLLECT_STEPS = 2_000_000


def _clean_rhs(rhs, j: int, n: int, p: int, what: str) -> tuple[tuple[int, int], ...]:
    """Validate an exponent map {k: e} with k > j, 0 < e < p; return sorted items."""
    items = []
    for k, e in sorted(dict(rhs).items()):
        if not isinstance(k, int) or k <= j or k > n:
            raise InputError(f"{what}: right-hand side index {k} must lie in ({j}, {n}]")
        if not isinstance(e, int) or not 0 < e < p:
            raise InputError(f"{what}: exponent {e} for a_{k} must lie in [1, {p})")
        items.append((k, e))
    return tuple(items)


@dataclass(frozen=True)
class PcPresentation:
    """Power-commutator data; structurally validated, not consistency-checked."""

    p: int
    n: int
    power: tuple[tuple[tuple[int, int], ...], ...]
    comm: tuple[tuple[tuple[int, int], ...], ...]  # row (j, i), i < j, flattened

    @classmethod
    def build(
        cls,
        p: int,
        n: int,
        power: Mapping[int, Mapping[int, int]] | None = None,
        comm: Mapping[tuple[int, int], Mapping[int, int]] | None = None,
    ) -> "PcPresentation":
        """Build from sparse maps: power[j] = {k: e}, comm[(j, i)] = {k: e}.

        Unspecified right-hand sides are trivial (a_j^p = 1, [a_j, a_i] = 1).
        """
        p = require_prime(p)
        if not isinstance(n, int) or n < 1:
            raise InputError(f"generator count must be a positive integer, got {n!r}")
        power = dict(power or {})
        comm = dict(comm or {})
        pow_rows = []
        for j in range(1, n + 1):
            pow_rows.append(_clean_rhs(power.pop(j, {}), j, n, p, f"power a_{j}^{p}"))
        if power:
            raise InputError(f"power relations for unknown generators: {sorted(power)}")
        comm_rows = []
        for j in range(1, n + 1):
            for i in range(1, j):
                comm_rows.append(
                    _clean_rhs(comm.pop((j, i), {}), j, n, p, f"comm [a_{j}, a_{i}]")
                )
        if comm:
            raise InputError(f"commutator relations for bad pairs: {sorted(comm)}")
        return cls(p, n, tuple(pow_rows), tuple(comm_rows))

    def _comm_index(self, j: int, i: int) -> int:
        # rows are stored for j = 2..n, i = 1..j-1 in that order
        return (j - 1) * (j - 2) // 2 + (i - 1)

    def power_rhs(self, j: int) -> tuple[tuple[int, int], ...]:
        return self.power[j - 1]

    def comm_rhs(self, j: int, i: int) -> tuple[tuple[int, int], ...]:
        if not 1 <= i < j <= self.n:
            raise InputError(f"commutator pair ({j}, {i}) out of range")
        return self.comm[self._comm_index(j, i)]

    @property
    def order(self) -> int:
        return self.p**self.n

    def identity(self) -> Element:
        return (0,) * self.n

    def generator(self, j: int) -> Element:
        if not 1 <= j <= self.n:
            raise InputError(f"generator index {j} out of range")
        return tuple(1 if k == j - 1 else 0 for k in range(self.n))

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "power": [
                {"j": j, "rhs": {str(k): e for k, e in self.power_rhs(j)}}
                for j in range(1, self.n + 1)
            ],
            "comm": [
                {"j": j, "i": i, "rhs": {str(k): e for k, e in self.comm_rhs(j, i)}}
                for j in range(2, self.n + 1)
                for i in range(1, j)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PcPresentation":
        if not isinstance(data, dict):
            raise InputError("presentation must be a JSON object")
        extra = set(data) - {"p", "n", "power", "comm"}
        if extra:
            raise InputError(f"unknown presentation fields: {sorted(extra)}")
        try:
            p, n = data["p"], data["n"]
            power = {
                int(row["j"]): {int(k): int(e) for k, e in row.get("rhs", {}).items()}
                for row in data.get("power", [])
            }
            comm = {
                (int(row["j"]), int(row["i"])): {
                    int(k): int(e) for k, e in row.get("rhs", {}).items()
                }
                for row in data.get("comm", [])
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad presentation: {exc}") from exc
        return cls.build(p, n, power, comm)


class _Collector:
    """Collection from the left; usable on inconsistent presentations too."""

    def __init__(self, pres: PcPresentation):
        self.pres = pres
        self._cache: dict[tuple[Element, Element], Element] = {}
        self._inv_cache: dict[Element, Element] = {}

    def _collect(self, word: list[list[int]]) -> Element:
        """Rewrite [gen, exp] pairs to the normal form exponent tuple."""
        p = self.pres.p
        steps = 0
        pos = 0
        while True:
            steps += 1
            if steps > _MAX_COLLECT_STEPS:
                raise CapExceededError("collection step limit exceeded")
            if pos > 0 and (pos >= len(word) or word[pos - 1][0] >= word[pos][0]):
                pos -= 1  # re-examine the junction a rewrite may have disturbed
            # find first violation at or after pos
            k = pos
            while k < len(word):
                g, e = word[k]
                if e >= p:
                    break
                if k + 1 < len(word) and word[k + 1][0] <= g:
                    break
                k += 1
            else:
                break  # normal
            pos = k
            g, e = word[k]
            if e >= p:
                # a_g^e = a_g^(e-p) * (a_g^p as a word in later generators)
                rhs = [[gk, ge] for gk, ge in self.pres.power_rhs(g)]
                if e - p > 0:
                    word[k][1] = e - p
                    word[k + 1 : k + 1] = rhs
                else:
                    word[k : k + 1] = rhs
                continue
            g2, e2 = word[k + 1]
            if g2 == g:
                word[k][1] = e + e2
                del word[k + 1]
                continue
            # g > g2: peel one a_g2 to the left across one a_g
            rhs = [[gk, ge] for gk, ge in self.pres.comm_rhs(g, g2)]
            repl = []
            if e - 1 > 0:
                repl.append([g, e - 1])
            repl.append([g2, 1])
            repl.append([g, 1])
            repl.extend(rhs)
            if e2 - 1 > 0:
                repl.append([g2, e2 - 1])
            word[k : k + 2] = repl
        out = [0] * self.pres.n
        for g, e in word:
            out[g - 1] = e
        return tuple(out)

    @staticmethod
    def _word_of(x: Element) -> list[list[int]]:
        return [[j + 1, e] for j, e in enumerate(x) if e]

    def product(self, x: Element, y: Element) -> Element:
        key = (x, y)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._collect(self._word_of(x) + self._word_of(y))
        self._cache[key] = result
        return result

    def inverse(self, x: Element) -> Element:
        # kill coordinates left to right: right-multiplying by a_k^(p - e)
        # only touches coordinates >= k
        cached = self._inv_cache.get(x)
        if cached is not None:
            return cached
        p, n = self.pres.p, self.pres.n
        inv = self.pres.identity()
        acc = x
        for k in range(1, n + 1):
            e = acc[k - 1]
            if e == 0:
                continue
            step = tuple((p - e) if j == k - 1 else 0 for j in range(n))
            acc = self.product(acc, step)
            inv = self.product(inv, step)
        self._inv_cache[x] = inv
        return inv


@dataclass(frozen=True)
class ConsistencyResult:
    ok: bool
    witness: tuple[Element, Element, Element] | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _overlap_triples(pres: PcPresentation) -> Iterable[tuple[Element, Element, Element]]:
    """Associativity instances that decide consistency for collection.

    These are the classical overlap tests: generator triples a_k, a_j, a_i
    (k > j > i) and the power overlaps a_j^p against neighbours and itself.
    """
    n, p = pres.n, pres.p
    gen = pres.generator

    def power_word(j: int) -> Element:
        return tuple((p - 1) if k == j - 1 else 0 for k in range(n))

    for j in range(1, n + 1):
        yield gen(j), power_word(j), gen(j)
    for j in range(2, n + 1):
        for i in range(1, j):
            yield power_word(j), gen(j), gen(i)
            yield gen(j), power_word(i), gen(i)
    for k in range(3, n + 1):
        for j in range(2, k):
            for i in range(1, j):
                yield gen(k), gen(j), gen(i)


def consistency_check(
    pres: PcPresentation, exhaustive: bool | None = None, cap: int = DEFAULT_CAP
) -> ConsistencyResult:
    """Decide whether collection defines a group of order p^n.

    Overlap triples are always checked; they are decisive.  When the group
    is small (or ``exhaustive=True``) the full product table is also built
    and verified, which re-checks associativity across every element through
    generator middles.  Any failure carries a witness triple.
    """
    coll = _Collector(pres)
    prod = coll.product
    for x, y, z in _overlap_triples(pres):
        if prod(prod(x, y), z) != prod(x, prod(y, z)):
            return ConsistencyResult(False, (x, y, z), "overlap test failed")
    order = pres.order
    do_table = exhaustive if exhaustive is not None else order <= _TABLE_VERIFY_LIMIT
    if do_table:
        if order > cap or order > 2**12:
            raise CapExceededError(
                f"exhaustive verification needs a table of {order}^2 products"
            )
        elements = list(itertools.product(range(pres.p), repeat=pres.n))
        table = {(x, y): prod(x, y) for x in elements for y in elements}
        gens = [pres.generator(j) for j in range(1, pres.n + 1)]
        # Light's test: middles restricted to generators decide associativity
        for g in gens:
            for a in elements:
                ag = table[(a, g)]
                for b in elements:
                    if table[(ag, b)] != table[(a, table[(g, b)])]:
                        return ConsistencyResult(False, (a, g, b), "table verification failed")
        if order <= _TRIPLE_VERIFY_LIMIT:
            for x in elements:
                for y in elements:
                    xy = table[(x, y)]
                    for z in elements:
                        if table[(xy, z)] != table[(x, table[(y, z)])]:
                            return ConsistencyResult(False, (x, y, z), "triple scan failed")
    return ConsistencyResult(True, None, "consistent")


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its full element set plus the generators used."""

    group: "PcGroup"
    elements: frozenset
    gens: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def sorted_elements(self) -> list:
        return sorted(self.elements)

    def is_normal(self) -> bool:
        g = self.group
        for a in g.pc_generators():
            a_inv = g.inverse(a)
            for x in self.elements:
                if g.product(g.product(a_inv, x), a) not in self.elements:
                    return False
        return True


class PcGroup:
    """A consistency-checked presentation with group operations on normal forms."""

    def __init__(self, pres: PcPresentation, cap: int = DEFAULT_CAP, _checked: bool = False):
        self.pres = pres
        self.cap = cap
        self._coll = _Collector(pres)
        self._elements: list[Element] | None = None
        if not _checked:
            result = consistency_check(pres, cap=cap)
            if not result.ok:
                raise InconsistentPresentationError(
                    f"inconsistent presentation: {result.detail}; witness {result.witness}",
                    witness=result.witness,
                )

    # -- basic operations -------------------------------------------------

    @property
    def p(self) -> int:
        return self.pres.p

    @property
    def order(self) -> int:
        return self.pres.order

    def identity(self) -> Element:
        return self.pres.identity()

    def pc_generators(self) -> list[Element]:
        return [self.pres.generator(j) for j in range(1, self.pres.n + 1)]

    def generator(self, j: int) -> Element:
        return self.pres.generator(j)

    def element(self, exponents: Sequence[int]) -> Element:
        exps = tuple(exponents)
        if len(exps) != self.pres.n:
            raise InputError(f"element needs {self.pres.n} exponents, got {len(exps)}")
        if any(not isinstance(e, int) or not 0 <= e < self.p for e in exps):
            raise InputError(f"exponents must lie in [0, {self.p}), got {exps}")
        return exps

    def product(self, x: Element, y: Element) -> Element:
        return self._coll.product(x, y)

    def inverse(self, x: Element) -> Element:
        return self._coll.inverse(x)

    def commutator(self, x: Element, y: Element) -> Element:
        # [x, y] = x^-1 y^-1 x y
        p = self.product
        return p(p(p(self.inverse(x), self.inverse(y)), x), y)

    def power_p(self, x: Element) -> Element:
        acc = x
        for _ in range(self.p - 1):
            acc = self.product(acc, x)
        return acc

    def elements(self) -> list[Element]:
        if self._elements is None:
            if self.order > self.cap:
                raise CapExceededError(
                    f"group order {self.order} exceeds enumeration cap {self.cap}"
                )
            self._elements = list(itertools.product(range(self.p), repeat=self.pres.n))
        return self._elements

    # -- subgroups ---------------------------------------------------------

    def subgroup(self, gens: Iterable[Element], normal: bool = False) -> Subgroup:
        """Closure of ``gens`` under products (and conjugation when ``normal``).

        In a finite group the product closure of a finite set is already a
        subgroup; with ``normal=True`` the generating set is first closed
        under conjugation by the ambient generators, so the result is the
        normal closure.  The stored ``gens`` always generate the element set.
        """
        gens = [self.element(g) for g in gens]
        seed = list(dict.fromkeys(gens))
        if normal:
            pcg = self.pc_generators()
            pcg_inv = [self.inverse(a) for a in pcg]
            seen = set(seed)
            queue = list(seed)
            while queue:
                x = queue.pop()
                for a, a_inv in zip(pcg, pcg_inv):
                    conj = self.product(self.product(a_inv, x), a)
                    if conj not in seen:
                        if len(seen) >= self.cap:
                            raise CapExceededError("normal closure exceeds enumeration cap")
                        seen.add(conj)
                        queue.append(conj)
            seed = sorted(seen)
        closure = {self.identity()}
        queue = [self.identity()]
        while queue:
            x = queue.pop()
            for g in seed:
                y = self.product(x, g)
                if y not in closure:
                    if len(closure) >= self.cap:
                        raise CapExceededError("subgroup closure exceeds enumeration cap")
                    closure.add(y)
                    queue.append(y)
        return Subgroup(self, frozenset(closure), tuple(seed))

    def full_subgroup(self) -> Subgroup:
        return Subgroup(self, frozenset(self.elements()), tuple(self.pc_generators()))

    def trivial_subgroup(self) -> Subgroup:
        return Subgroup(self, frozenset({self.identity()}), ())

    def normal_closure(self, gens: Iterable[Element]) -> Subgroup:
        return self.subgroup(gens, normal=True)

    # -- series -------------------------------------------------------------

    def _commutator_span(self, h: Subgroup) -> Subgroup:
        """[H, G] as the normal closure of commutators of generators."""
        gens = h.gens if h.gens else tuple(sorted(h.elements))
        comms = []
        for x in gens:
            for a in self.pc_generators():
                c = self.commutator(x, a)
                if c != self.identity():
                    comms.append(c)
        if not comms:
            return self.trivial_subgroup()
        return self.subgroup(comms, normal=True)

    def lower_central_series(self) -> list[Subgroup]:
        """G = gamma_1 >= gamma_2 = [G, G] >= ... down to the trivial subgroup."""
        series = [self.full_subgroup()]
        current = Subgroup(self, series[0].elements, tuple(self.pc_generators()))
        while True:
            nxt = self._commutator_span(current)
            if nxt.elements == current.elements:
                raise InconsistentPresentationError("lower central series does not descend")
            series.append(nxt)
            if nxt.order == 1:
                return series
            current = nxt

    def lower_p_series(self) -> list[Subgroup]:
        """P_0 = G, P_{m+1} = P_m^p [P_m, G], down to the trivial subgroup."""
        series = [self.full_subgroup()]
        current = series[0]
        while current.order > 1:
            gens = [self.power_p(x) for x in current.elements]
            for x in (current.gens if current.gens else sorted(current.elements)):
                for a in self.pc_generators():
                    gens.append(self.commutator(x, a))
            gens = [g for g in gens if g != self.identity()]
            nxt = self.subgroup(gens, normal=True) if gens else self.trivial_subgroup()
            if nxt.order >= current.order:
                raise InconsistentPresentationError("lower p-series does not descend")
            series.append(nxt)
            current = nxt
        return series

    def series_equality_check(self) -> dict:
        """Compare the lower central series with the lower p-series levelwise.

        Also reports whether every p-th power lies in the derived subgroup,
        the condition under which the two series coincide for these groups.
        """
        gamma = self.lower_central_series()
        pser = self.lower_p_series()
        depth = max(len(gamma), len(pser))
        trivial = self.trivial_subgroup()
        levels = []
        for k in range(depth):
            g = gamma[k] if k < len(gamma) else trivial
            q = pser[k] if k < len(pser) else trivial
            levels.append(
                {"gamma_order": g.order, "p_order": q.order, "equal": g.elements == q.elements}
            )
        derived = gamma[1] if len(gamma) > 1 else trivial
        gp_in_derived = all(self.power_p(x) in derived.elements for x in self.elements())
        return {
            "levels": levels,
            "all_equal": all(level["equal"] for level in levels),
            "gp_in_derived": gp_in_derived,
        }

    # -- invariants of subgroups ---------------------------------------------

    def frattini_subgroup(self, h: Subgroup) -> Subgroup:
        """H^p [H, H]: p-th powers of every element plus the commutator span."""
        if h.order == 1:
            return self.trivial_subgroup()
        hgens = h.gens if h.gens else tuple(sorted(h.elements))
        gens = {self.power_p(x) for x in h.elements}
        gens.update(self.commutator(x, a) for x in h.elements for a in hgens)
        gens.discard(self.identity())
        if not gens:
            return self.trivial_subgroup()
        # close under conjugation inside H so the span is normal in H
        seen = set(gens)
        queue = list(gens)
        h_inv = {a: self.inverse(a) for a in hgens}
        while queue:
            x = queue.pop()
            for a in hgens:
                conj = self.product(self.product(h_inv[a], x), a)
                if conj not in seen:
                    seen.add(conj)
                    queue.append(conj)
        return self.subgroup(sorted(seen))

    def min_generators(self, h: Subgroup) -> int:
        """Minimal size of a generating set: dim of H modulo H^p [H, H]."""
        if h.order == 1:
            return 0
        phi = self.frattini_subgroup(h)
        quot = h.order // phi.order
        dim = 0
        while quot > 1:
            if quot % self.p:
                raise InconsistentPresentationError("generator-count quotient not a p-power")
            quot //= self.p
            dim += 1
        return dim

    def element_length(self, x: Element) -> int:
        """Largest k with x in gamma_k; the identity gets class + 1 as sentinel."""
        x = self.element(x)
        series = self.lower_central_series()
        if x == self.identity():
            return len(series)  # nilpotency class + 1
        best = 0
        for k, term in enumerate(series, start=1):
            if x in term.elements:
                best = k
        return best

    # -- probes ----------------------------------------------------------------

    def just_infinite_probe(self, tower_indices: Sequence[int]) -> dict:
        """For each listed generator, check its normal closure swallows the
        later commutator-generated tower elements.

        The finite shadow of being just infinite: a normal subgroup that
        contains a tower generator must contain every deeper element of the
        commutator chain.  The first two tower positions are independent
        generators, so only positions from the third on count as "later".
        Returns per-pair verdicts and the overall flag.
        """
        idx = list(tower_indices)
        if any(not isinstance(j, int) or not 1 <= j <= self.pres.n for j in idx):
            raise InputError(f"tower indices must lie in [1, {self.pres.n}]")
        pairs = []
        ok = True
        for pos, j in enumerate(idx[:-1]):
            closure = self.normal_closure([self.pres.generator(j)])
            for later_pos in range(max(pos + 1, 2), len(idx)):
                later = idx[later_pos]
                contained = self.pres.generator(later) in closure.elements
                ok = ok and contained
                pairs.append({"generator": j, "later": later, "contained": contained})
        return {"pairs": pairs, "ok": ok}

    def rank_growth_probe(self, k: int) -> dict:
        """Minimal generator count of the subgroup omitting a_1 and a_2k.

        The subgroup is generated by a_2 ... a_{2k-1} together with all
        a_{2k+1} ... a_n; requires depth n >= 2k + 2.
        """
        if not isinstance(k, int) or k < 1:
            raise InputError(f"k must be a positive integer, got {k!r}")
        if self.pres.n < 2 * k + 2:
            raise InputError(
                f"depth {self.pres.n} too small for k={k}; need at least {2 * k + 2}"
            )
        indices = list(range(2, 2 * k)) + list(range(2 * k + 1, self.pres.n + 1))
        sub = self.subgroup([self.pres.generator(j) for j in indices])
        return {
            "indices": indices,
            "order": sub.order,
            "min_generators": self.min_generators(sub),
        }


# -- builders -------------------------------------------------------------------


def build_heisenberg(p: int) -> PcPresentation:
    """Order p^3, two generators, central commutator: a_3 = [a_2, a_1]."""
    return PcPresentation.build(p, 3, comm={(2, 1): {3: 1}})


def build_tower_truncation(
    p: int,
    depth: int,
    policy: str = "trivial-fill",
    power: Mapping[int, Mapping[int, int]] | None = None,
    comm: Mapping[tuple[int, int], Mapping[int, int]] | None = None,
    cap: int = DEFAULT_CAP,
) -> PcPresentation:
    """Depth-d truncation of the iterated-commutator tower a_{k+1} = [a_k, a_{k-1}].

    With the trivial-fill policy every unspecified relation is trivial; the
    table policy lets the caller supply the remaining assignments.  The
    result is consistency-checked and the verdict surfaced: an inconsistent
    fill raises with its witness triple.
    """
    p = require_prime(p)
    if not isinstance(depth, int) or depth < 2:
        raise InputError(f"depth must be an integer >= 2, got {depth!r}")
    if policy not in ("trivial-fill", "table"):
        raise InputError(f"unknown policy {policy!r}")
    if policy == "trivial-fill" and (power or comm):
        raise InputError("trivial-fill policy does not accept assignments")
    comm_map = dict(comm or {})
    for j in range(2, depth):
        key = (j, j - 1)
        if key in comm_map:
            raise InputError(f"tower relation [a_{j}, a_{j-1}] cannot be overridden")
        comm_map[key] = {j + 1: 1}
    pres = PcPresentation.build(p, depth, power, comm_map)
    result = consistency_check(pres, cap=cap)
    if not result.ok:
        raise InconsistentPresentationError(
            f"{policy} truncation at p={p}, depth={depth} is inconsistent; "
            f"witness {result.witness}",
            witness=result.witness,
        )
    return pres


def shipped_truncations() -> list[tuple[int, int]]:
    """(p, depth) pairs whose trivial-fill truncation is consistent.

    The list is fixed by running the consistency oracle, not by theory:
    depth 3 passes for every listed p; depth 4 passes for every odd listed
    p (only generator p-th powers are pinned, so no exponent-p obstruction
    applies) and fails for p = 2; depth 5 fails for all of 2, 3, 5, 7.
    """
    return [(2, 3), (3, 3), (5, 3), (7, 3), (3, 4), (5, 4), (7, 4)]
