"""Two-spin coupling model with external fields (the Ising special case).

The interaction of an edge is J*u*v + u*eta_x + v*eta_y with |J| and |eta|
inside the admissibility ball.  For the homogeneous model the consistent
constant field is governed by the one-variable map

    f(x) = ((alpha x + 1)/(x + beta))**k,
    alpha = exp(2J + 2eta), beta = exp(2J - 2eta),

which contracts the unit ball around 1 at rate 1/p for every prime, so it
has a unique fixed point zeta with |zeta - 1| <= 1/p.  The coupling-only
model (eta = 0 everywhere, couplings possibly edge-dependent) has the zero
field as its consistent family.  Either way there is a single consistent
measure family, and it is norm-bounded exactly when p is odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .padic import (
    DomainError,
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
from .model import (
    LambdaSpec,
    SPIN_PAIRS,
    check_compatibility,
    measure_norm_profile,
)
from .recursion import BoundaryField, propagate_inward
from .tree import Address, TreeSlice, build_slice, format_address


class IsingSpec:
    """Couplings and external fields, homogeneous or per edge/vertex.

    Homogeneous mode holds a single (J, eta) pair and precomputes
    alpha = exp(2J + 2eta), beta = exp(2J - 2eta).  Inhomogeneous mode
    holds per-edge couplings keyed by child address and optional per-vertex
    external fields (zero by default).  All values must satisfy the
    admissibility bound.
    """

    def __init__(self, prime: int, precision: int,
                 coupling: PadicNumber | Mapping[Address, PadicNumber],
                 external: PadicNumber | Mapping[Address, PadicNumber] | None = None):
        self.prime = prime
        self.precision = precision
        if isinstance(coupling, PadicNumber):
            self.homogeneous = True
            self._coupling = coupling
            self._couplings = None
        else:
            self.homogeneous = False
            self._coupling = None
            self._couplings = dict(coupling)
        zero = PadicNumber.zero(prime, precision)
        if external is None:
            external = zero
        if isinstance(external, PadicNumber):
            self._external = external
            self._externals = None
        else:
            if self.homogeneous:
                raise DomainError("homogeneous mode takes a single external field value")
            self._external = zero
            self._externals = dict(external)
        for value in self._iter_values():
            if value.prime != prime:
                raise DomainError("coupling/field prime mismatch")
            if not in_exp_domain(value):
                raise DomainError(
                    f"coupling or external field of norm {prime}**{-value.valuation} "
                    "violates the admissibility bound"
                )
        if self.homogeneous:
            two = PadicNumber.from_int(2, prime, precision)
            self.alpha = padic_exp(two * (self._coupling + self._external))
            self.beta = padic_exp(two * (self._coupling - self._external))

    def _iter_values(self):
        if self._coupling is not None:
            yield self._coupling
        else:
            yield from self._couplings.values()
        if self._externals is not None:
            yield from self._externals.values()
        else:
            yield self._external

    @property
    def coupling(self) -> PadicNumber:
        if not self.homogeneous:
            raise DomainError("inhomogeneous model has per-edge couplings")
        return self._coupling

    @property
    def external(self) -> PadicNumber:
        return self._external

    def coupling_for(self, x: Address, y: Address) -> PadicNumber:
        if self._coupling is not None:
            return self._coupling
        child = y if len(y) == len(x) + 1 else x
        J = self._couplings.get(child)
        if J is None:
            raise DomainError(f"no coupling for edge ending at {format_address(child)}")
        return J

    def external_for(self, x: Address) -> PadicNumber:
        if self._externals is not None:
            return self._externals.get(x, PadicNumber.zero(self.prime, self.precision))
        return self._external

    @property
    def has_external(self) -> bool:
        if self._externals is not None:
            return any(not v.is_zero for v in self._externals.values())
        return not self._external.is_zero


def ising_lambda(spec: IsingSpec, edge: tuple[Address, Address]) -> dict[tuple[int, int], PadicNumber]:
    """Four-entry interaction table J*u*v + u*eta_x + v*eta_y for one edge."""
    x, y = edge
    J = spec.coupling_for(x, y)
    ex = spec.external_for(x)
    ey = spec.external_for(y)
    table = {}
    for u, v in SPIN_PAIRS:
        terms = [J if u * v == 1 else -J, ex if u == 1 else -ex, ey if v == 1 else -ey]
        table[(u, v)] = padic_sum(terms, spec.prime, spec.precision)
    return table


def to_lambda_spec(spec: IsingSpec, slice_: TreeSlice) -> LambdaSpec:
    """Materialize the interaction tables over a slice."""
    if spec.homogeneous:
        table = ising_lambda(spec, ((), (1,)))
        return LambdaSpec(spec.prime, spec.precision, table=table)
    per_edge = {child: ising_lambda(spec, (parent, child))
                for parent, child in slice_.edges}
    return LambdaSpec(spec.prime, spec.precision, per_edge=per_edge)


@dataclass(frozen=True)
class IsingUniquenessVerdict:
    unique: bool
    condition: str
    reason: str
    worst_exponent: int | None = None

    def to_dict(self) -> dict:
        return {
            "unique": self.unique,
            "condition": self.condition,
            "reason": self.reason,
            "worst_exponent": self.worst_exponent,
        }


def ising_uniqueness_check(spec: IsingSpec) -> IsingUniquenessVerdict:
    """The no-phase-transition conditions, specialized to this model.

    Odd p: every table entry has norm at most max(|J|, |eta|) <= 1/p.  For
    p = 2 the alternating table combination collapses to 4J, so the check is
    |4J| <= 1/16 on every edge; both follow from the admissibility bounds,
    which is why a valid model always has a unique consistent family.
    """
    p = spec.prime
    if p >= 3:
        worst = None
        for value in spec._iter_values():
            if not value.is_zero and (worst is None or value.valuation < worst):
                worst = value.valuation
        ok = worst is None or worst >= 1
        return IsingUniquenessVerdict(
            ok, "condition_i" if ok else "neither",
            "every interaction entry has norm at most 1/p" if ok
            else "an interaction entry has norm 1",
            worst,
        )
    worst = None
    four = PadicNumber.from_int(4, 2, spec.precision)
    couplings = ([spec._coupling] if spec._coupling is not None
                 else list(spec._couplings.values()))
    for J in couplings:
        combo = four * J
        if not combo.is_zero and (worst is None or combo.valuation < worst):
            worst = combo.valuation
    ok = worst is None or worst >= 4
    return IsingUniquenessVerdict(
        ok, "condition_ii" if ok else "neither",
        "the alternating combination 4J has norm at most 1/16 on every edge"
        if ok else "|4J| exceeds 1/16 on some edge",
        worst,
    )


@dataclass(frozen=True)
class FixedPointResult:
    zeta: PadicNumber
    h_star: PadicNumber
    lift_checked: bool
    residual_definite: bool
    residual: NormValue

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta.to_dict(),
            "h_star": self.h_star.to_dict(),
            "lift_checked": self.lift_checked,
            "residual_exponent": self.residual.to_json(),
        }


def _fixed_point_polynomial(alpha: PadicNumber, beta: PadicNumber, k: int,
                            prime: int, precision: int) -> list[PadicNumber]:
    """Coefficients of x*(x + beta)**k - (alpha x + 1)**k."""
    zero = PadicNumber.zero(prime, precision)
    one = PadicNumber.one(prime, precision)
    den = poly_pow([beta, one], k, prime, precision)
    num = poly_pow([one, alpha], k, prime, precision)
    return poly_sub(poly_mul([zero, one], den, prime, precision), num, prime, precision)


def homogeneous_fixed_point(spec: IsingSpec, k: int) -> FixedPointResult:
    """Unique fixed point zeta of f on the unit ball around 1, plus the
    corresponding constant field h = (1/2) log zeta.

    Found by contraction iteration from 1 at the certified rate 1/p and
    cross-checked by Newton lifting of the cleared-denominator polynomial.
    For p = 2 with k >= 3 the polynomial's derivative at the seed is too
    small for the lifting hypothesis, so the cross-check falls back to the
    residual bound alone.
    """
    if not spec.homogeneous:
        raise DomainError("the fixed-point solve exists for the homogeneous model")
    if k < 1:
        raise DomainError(f"tree order must be >= 1, got {k}")
    p, precision = spec.prime, spec.precision
    if spec.external.is_zero:
        # alpha = beta makes f(1) = 1 by the spin-flip symmetry
        return FixedPointResult(
            PadicNumber.one(p, precision), PadicNumber.zero(p, precision),
            lift_checked=True, residual_definite=True, residual=NormValue(None),
        )
    alpha, beta = spec.alpha, spec.beta
    one = PadicNumber.one(p, precision)

    def step(x: PadicNumber) -> PadicNumber:
        numerator = padic_sum([alpha * x, one], p, precision)
        denominator = padic_sum([x, beta], p, precision)
        if denominator.is_zero:
            raise DomainError("map denominator vanished during iteration")
        return (numerator / denominator) ** k

    zeta = iterate_contraction(step, one, NormValue(1))
    lift_checked = False
    try:
        lifted = hensel_solve(_fixed_point_polynomial(alpha, beta, k, p, precision),
                              1, precision=precision)
        if lifted != zeta:
            raise NoConvergenceError(
                "contraction iteration and Newton lifting disagree on the fixed point"
            )
        lift_checked = True
    except NoConvergenceError:
        if not (p == 2 and k >= 3):
            raise
    residual_definite, residual = difference_norm(step(zeta), zeta)
    if residual_definite and not residual.is_zero and residual.exponent < precision:
        raise NoConvergenceError(
            f"fixed-point residual has norm {p}**{-residual.exponent}"
        )
    half = PadicNumber.from_rational(1, 2, p, precision)
    h_star = half * padic_log(zeta)
    if not in_exp_domain(h_star):
        raise DomainError("fixed-point field violates the admissibility bound")
    return FixedPointResult(zeta, h_star, lift_checked, residual_definite, residual)


@dataclass(frozen=True)
class IsingReport:
    prime: int
    order: int
    depth: int
    unique: dict
    bounded: dict
    zeta: PadicNumber | None
    h_star: PadicNumber | None
    compatibility: tuple
    profile: object
    ok: bool

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "order": self.order,
            "depth": self.depth,
            "unique": self.unique,
            "bounded": self.bounded,
            "zeta": self.zeta.to_dict() if self.zeta is not None else None,
            "h_star": self.h_star.to_dict() if self.h_star is not None else None,
            "compatibility": [c.to_dict() for c in self.compatibility],
            "norm_profile": self.profile.to_dict(),
            "ok": self.ok,
        }


def gibbs_report(spec: IsingSpec, k: int, depth: int,
                 normalization: str = "row",
                 vertex_cap: int = 20_000,
                 enum_cap_log2: int = 20) -> IsingReport:
    """End-to-end construction and verification for one model.

    Builds the interaction, resolves the consistent field (fixed point for
    the homogeneous model, zero-seed propagation otherwise), constructs the
    measures up to the requested depth, and verifies consistency and the
    norm bookkeeping behind the boundedness verdict.
    """
    slice_ = build_slice(k, depth, vertex_cap)
    lam = to_lambda_spec(spec, slice_)
    verdict = ising_uniqueness_check(spec)
    zeta = h_star = None
    if spec.homogeneous:
        fp = homogeneous_fixed_point(spec, k)
        zeta, h_star = fp.zeta, fp.h_star
        seed = {x: h_star for x in slice_.level(depth)}
        extension = h_star       # the constant family continues past the slice
        window_max = 5
    else:
        zero = PadicNumber.zero(spec.prime, spec.precision)
        seed = {x: zero for x in slice_.level(depth)}
        extension = zero
        window_max = depth       # per-edge tables only exist inside the slice
    field = propagate_inward(seed, lam, slice_)
    compat = tuple(check_compatibility(m, lam, field, slice_, enum_cap_log2)
                   for m in range(1, depth + 1))
    extended = BoundaryField(spec.prime, spec.precision, field.levels,
                             consistent=field.consistent, default=extension)
    profile = measure_norm_profile(lam, extended, slice_, n_max=depth,
                                   window_max=window_max,
                                   normalization=normalization,
                                   enum_cap_log2=enum_cap_log2)
    if spec.prime != 2:
        theory_ok = all(lo == 0 == hi for lo, hi in profile.weight_norm_exponents.values())
        bounded = {"verdict": True,
                   "reason": "every finite-volume weight is a p-adic unit"}
    else:
        theory_ok = (profile.factor_max_entry_exponent is not None
                     and profile.factor_max_entry_exponent <= -2
                     and bool(profile.marginal_strictly_increasing))
        bounded = {"verdict": False,
                   "reason": "literal transition factors have norm >= 4, so marginal "
                             "path weights grow without bound"}
    unique = {"verdict": verdict.unique, "reason": verdict.reason,
              "condition": verdict.condition}
    ok = verdict.unique and all(c.passed for c in compat) and theory_ok
    return IsingReport(spec.prime, k, depth, unique, bounded, zeta, h_star,
                       compat, profile, ok)
