"""Boundary-field machinery for consistent measure families.

A family of finite-volume measures indexed by depth is consistent exactly
when the per-vertex field values satisfy, at every vertex x,

    h_x = sum over children y of F(h_y)  with
    F(h) = (1/2) log( (a exp(2h) + b) / (c exp(2h) + d) ),

where (a, b, c, d) are the exponentials of the edge's interaction table.
Fields are produced by propagating inward from seed values on the outermost
level.  Under the uniqueness conditions the edge map contracts differences
by a factor 1/p (odd p) resp. 1/2 (p = 2), which is what makes the
consistent family unique; this module also verifies those contraction
ratios numerically on concrete field pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping

from .padic import (
    ConfigurationError,
    DomainError,
    IndeterminateValueError,
    NoConvergenceError,
    NormValue,
    PadicNumber,
    difference_norm,
    hensel_solve,
    in_exp_domain,
    iterate_contraction,
    padic_exp,
    padic_log,
    padic_sum,
    poly_mul,
    poly_pow,
    poly_sub,
)
from .model import EdgeWeights, LambdaSpec, SPIN_PAIRS
from .tree import Address, TreeSlice, direct_successors, format_address, parse_address


@dataclass
class BoundaryField:
    """Per-vertex field values, organized by tree level.

    `default` supplies the value at any address not stored explicitly and is
    how the constant (translation-invariant) and zero families cover every
    level at once.  `consistent` marks families produced by inward
    propagation, for which adjacent levels satisfy the consistency equation
    by construction.
    """

    prime: int
    precision: int
    levels: dict[int, dict[Address, PadicNumber]] = dc_field(default_factory=dict)
    consistent: bool = False
    default: PadicNumber | None = None

    def value_at(self, addr: Address) -> PadicNumber:
        level = self.levels.get(len(addr))
        if level is not None and addr in level:
            return level[addr]
        if self.default is not None:
            return self.default
        raise DomainError(f"no field value at {format_address(addr)}")

    def on_level(self, n: int) -> dict[Address, PadicNumber]:
        return dict(self.levels.get(n, {}))

    def with_value(self, addr: Address, value: PadicNumber) -> "BoundaryField":
        """Copy with one value replaced (the copy is no longer consistent)."""
        levels = {n: dict(vals) for n, vals in self.levels.items()}
        levels.setdefault(len(addr), {})[addr] = value
        return BoundaryField(self.prime, self.precision, levels,
                             consistent=False, default=self.default)

    def validate_admissible(self) -> None:
        values: Iterable[PadicNumber] = (
            v for level in self.levels.values() for v in level.values()
        )
        for v in values:
            if not in_exp_domain(v):
                raise DomainError(
                    f"field value of norm {self.prime}**{-v.valuation} violates "
                    "the admissibility bound"
                )
        if self.default is not None and not in_exp_domain(self.default):
            raise DomainError("default field value violates the admissibility bound")

    @classmethod
    def zeros(cls, prime: int, precision: int) -> "BoundaryField":
        return cls(prime, precision, default=PadicNumber.zero(prime, precision))

    @classmethod
    def constant(cls, value: PadicNumber) -> "BoundaryField":
        field = cls(value.prime, value.precision, default=value)
        field.validate_admissible()
        return field

    def to_dict(self) -> dict:
        data = {
            "levels": {
                str(n): {format_address(a): v.to_dict() for a, v in vals.items()}
                for n, vals in sorted(self.levels.items())
            },
            "consistent": self.consistent,
        }
        if self.default is not None:
            data["default"] = self.default.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict, prime: int, precision: int) -> "BoundaryField":
        levels = {
            int(n): {parse_address(a): PadicNumber.from_dict(v)
                     for a, v in vals.items()}
            for n, vals in data.get("levels", {}).items()
        }
        default = data.get("default")
        return cls(prime, precision, levels,
                   consistent=bool(data.get("consistent", False)),
                   default=PadicNumber.from_dict(default) if default else None)


def edge_field_map(h: PadicNumber, weights: EdgeWeights) -> PadicNumber:
    """The one-edge field map F(h) = (1/2) log((a e + b)/(c e + d)), e = exp(2h).

    A log-domain failure here signals that the interaction or field left the
    region where consistent families exist.
    """
    p = h.prime
    two = PadicNumber.from_int(2, p, h.precision)
    e = padic_exp(two * h)
    numerator = padic_sum([weights.a * e, weights.b], p, h.precision)
    denominator = padic_sum([weights.c * e, weights.d], p, h.precision)
    if denominator.is_zero:
        raise DomainError("edge map denominator vanishes at working precision")
    ratio = numerator / denominator
    half = PadicNumber.from_rational(1, 2, p, h.precision)
    return half * padic_log(ratio)


def propagate_inward(seed: Mapping[Address, PadicNumber], lam: LambdaSpec,
                     slice_: TreeSlice) -> BoundaryField:
    """Field family on the whole slice from seed values on the outer level.

    Levels are filled outside in: each vertex receives the sum of the edge
    map over its children, so the result satisfies the consistency equation
    between every adjacent pair of levels (with k+1 summands at the root and
    k elsewhere).  Admissibility is re-verified per vertex; division by 2
    raises norms when p = 2, so it is not automatic there.
    """
    n = slice_.depth
    boundary = slice_.level(n)
    if set(seed) != set(boundary):
        raise DomainError("seed must assign a value to exactly the outer level")
    for addr, value in seed.items():
        if value.prime != lam.prime:
            raise DomainError("seed prime does not match the interaction")
        if not in_exp_domain(value):
            raise DomainError(
                f"seed at {format_address(addr)} violates the admissibility bound"
            )
    levels: dict[int, dict[Address, PadicNumber]] = {n: dict(seed)}
    for m in range(n - 1, -1, -1):
        row: dict[Address, PadicNumber] = {}
        for x in slice_.level(m):
            terms = []
            for y in direct_successors(x, slice_):
                weights = lam.weights_for(x, y)
                terms.append(edge_field_map(levels[m + 1][y], weights))
            value = padic_sum(terms, lam.prime, lam.precision)
            if not in_exp_domain(value):
                raise DomainError(
                    f"propagated value at {format_address(x)} has norm "
                    f"{lam.prime}**{-value.valuation}, violating admissibility"
                )
            row[x] = value
        levels[m] = row
    return BoundaryField(lam.prime, lam.precision, levels, consistent=True)


@dataclass(frozen=True)
class UniquenessVerdict:
    condition: str                      # "condition_i" | "condition_ii" | "neither"
    witness_exponents: dict[str, int | None]
    worst_edge: str | None = None

    @property
    def holds(self) -> bool:
        return self.condition != "neither"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "witness_exponents": self.witness_exponents,
            "worst_edge": self.worst_edge,
        }


def uniqueness_conditions(lam: LambdaSpec) -> UniquenessVerdict:
    """Which no-phase-transition hypothesis the interaction satisfies.

    Odd p: every entry must have norm at most 1/p.  p = 2: on every edge the
    alternating entry combination lambda(1,1) + lambda(-1,-1) - lambda(1,-1)
    - lambda(-1,1) must have norm at most 1/8.
    """
    p = lam.prime
    if p >= 3:
        worst = None
        worst_edge = None
        for key, tab in lam.entries():
            for value in tab.values():
                e = None if value.is_zero else value.valuation
                if e is not None and (worst is None or e < worst):
                    worst, worst_edge = e, key
        if worst is None or worst >= 1:
            return UniquenessVerdict("condition_i", {"max_entry_norm": worst})
        return UniquenessVerdict("neither", {"max_entry_norm": worst}, worst_edge)

    worst = None
    worst_edge = None
    for key, tab in lam.entries():
        combo = padic_sum(
            [tab[(1, 1)], tab[(-1, -1)], -tab[(1, -1)], -tab[(-1, 1)]],
            p, lam.precision,
        )
        e = None if combo.is_zero else combo.valuation
        if e is not None and (worst is None or e < worst):
            worst, worst_edge = e, key
    if worst is None or worst >= 3:
        return UniquenessVerdict("condition_ii", {"max_combination_norm": worst})
    return UniquenessVerdict("neither", {"max_combination_norm": worst}, worst_edge)


def contraction_rate_exponent(prime: int) -> int:
    """Guaranteed per-level contraction of field differences: 1/p for odd
    primes under condition (i), 1/2 under condition (ii)."""
    return 1


@dataclass(frozen=True)
class VertexRatio:
    address: str
    parent_gap_exponent: int | None      # None: difference below working precision
    child_gap_exponent: int | None
    ok: bool


@dataclass(frozen=True)
class ContractionReport:
    passed: bool
    rate_exponent: int
    per_vertex: tuple[VertexRatio, ...]
    max_ratio_exponent: int | None       # smallest observed gap improvement

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rate_exponent": self.rate_exponent,
            "max_ratio_exponent": self.max_ratio_exponent,
            "vertices": [vr.__dict__ for vr in self.per_vertex],
        }


def contraction_ratio_check(lam: LambdaSpec, field_a: BoundaryField,
                            field_b: BoundaryField,
                            slice_: TreeSlice) -> ContractionReport:
    """Verify |h_x - s_x| <= rate * max over children |h_y - s_y| at every
    inner vertex of two consistent families on the same slice."""
    verdict = uniqueness_conditions(lam)
    if not verdict.holds:
        raise DomainError(
            "contraction ratios are only guaranteed under the uniqueness "
            f"conditions; this interaction satisfies neither (worst edge "
            f"{verdict.worst_edge})"
        )
    rate = contraction_rate_exponent(lam.prime)
    rows: list[VertexRatio] = []
    passed = True
    max_ratio = None
    for m in range(slice_.depth):
        for x in slice_.level(m):
            dx_definite, dx = difference_norm(field_a.value_at(x), field_b.value_at(x))
            child_exps = []
            child_definite = False
            for y in direct_successors(x, slice_):
                dy_definite, dy = difference_norm(field_a.value_at(y), field_b.value_at(y))
                if dy_definite and not dy.is_zero:
                    child_definite = True
                    child_exps.append(dy.exponent)
                else:
                    child_exps.append(dy.exponent)   # upper bound only
            child_best = min(child_exps) if child_exps else None
            if not dx_definite or dx.is_zero:
                ok = True
                parent_exp = None
            else:
                parent_exp = dx.exponent
                if not child_definite:
                    # children indistinguishable, parent definitely differs
                    ok = child_best is not None and parent_exp >= child_best + rate
                else:
                    ok = parent_exp >= child_best + rate
                if ok and child_definite:
                    ratio = parent_exp - child_best
                    if max_ratio is None or ratio < max_ratio:
                        max_ratio = ratio
            if not ok:
                passed = False
            rows.append(VertexRatio(format_address(x), parent_exp if dx_definite and not dx.is_zero else None,
                                    child_best, ok))
    return ContractionReport(passed, rate, tuple(rows), max_ratio)


@dataclass(frozen=True)
class TranslationInvariantSolution:
    z: PadicNumber                        # fixed point of the one-variable map
    h: PadicNumber                        # half its logarithm
    residual_definite: bool
    residual: NormValue
    lift_checked: bool                    # Newton lifting reproduced the digits

    def to_dict(self) -> dict:
        return {
            "z": self.z.to_dict(),
            "h": self.h.to_dict(),
            "residual_exponent": self.residual.to_json(),
            "residual_definite": self.residual_definite,
            "lift_checked": self.lift_checked,
        }


def _ratio_map_polynomial(weights: EdgeWeights, k: int, prime: int,
                          precision: int) -> list[PadicNumber]:
    """Coefficients of z*(c z + d)**k - (a z + b)**k, whose unit root is the
    fixed point of z -> ((a z + b)/(c z + d))**k."""
    zero = PadicNumber.zero(prime, precision)
    one = PadicNumber.one(prime, precision)
    den = poly_pow([weights.d, weights.c], k, prime, precision)
    num = poly_pow([weights.b, weights.a], k, prime, precision)
    z_den = poly_mul([zero, one], den, prime, precision)
    return poly_sub(z_den, num, prime, precision)


def translation_invariant_solve(lam: LambdaSpec, k: int) -> TranslationInvariantSolution:
    """Constant-field solution: solves z = ((a z + b)/(c z + d))**k on the
    unit ball around 1 and returns z and h = (1/2) log z.

    The fixed point is found by contraction iteration from 1 and
    cross-checked by Newton lifting of the cleared-denominator polynomial;
    the two must agree digit for digit.  The constant family h_x = h
    satisfies the consistency equation at every non-root vertex (the root
    sums one extra child, so full-tree families come from inward
    propagation).
    """
    if lam.mode != "homogeneous":
        raise DomainError("a constant-field solve needs a homogeneous interaction")
    if k < 1:
        raise ConfigurationError(f"tree order must be >= 1, got {k}")
    verdict = uniqueness_conditions(lam)
    if not verdict.holds:
        raise DomainError("uniqueness conditions do not hold; no certified contraction")
    p, precision = lam.prime, lam.precision
    weights = lam.weights_for((), (1,))

    def step(z: PadicNumber) -> PadicNumber:
        numerator = padic_sum([weights.a * z, weights.b], p, precision)
        denominator = padic_sum([weights.c * z, weights.d], p, precision)
        if denominator.is_zero:
            raise DomainError("map denominator vanished during iteration")
        return (numerator / denominator) ** k

    start = PadicNumber.one(p, precision)
    bound = NormValue(1)
    z = iterate_contraction(step, start, bound)

    lift_checked = False
    try:
        lifted = hensel_solve(_ratio_map_polynomial(weights, k, p, precision), 1,
                              precision=precision)
    except NoConvergenceError:
        if z != start:
            raise
        lifted = None     # symmetric model: the polynomial degenerates at 1
    if lifted is not None:
        if lifted != z:
            raise NoConvergenceError(
                "contraction iteration and Newton lifting disagree; "
                "the interaction violates the solver's hypotheses"
            )
        lift_checked = True

    residual_definite, residual = difference_norm(step(z), z)
    if residual_definite and not residual.is_zero and residual.exponent < precision:
        raise NoConvergenceError(
            f"fixed-point residual has norm {p}**{-residual.exponent}, "
            f"larger than {p}**{-precision}"
        )
    half = PadicNumber.from_rational(1, 2, p, precision)
    h = half * padic_log(z)
    if not in_exp_domain(h):
        raise DomainError(
            "constant field from the fixed point violates the admissibility bound"
        )
    return TranslationInvariantSolution(z, h, residual_definite, residual, lift_checked)
