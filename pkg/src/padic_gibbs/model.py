"""Two-spin nearest-neighbor models on tree slices with p-adic weights.

The energy of a configuration is the sum of per-edge interaction values
lambda(u, v) over nearest-neighbor pairs; finite-volume measures weight each
configuration by exp of the energy tilted by boundary-field terms on the
outermost level, normalized by the partition function.  All interaction and
field values must satisfy the admissibility bound (they lie inside the
convergence ball of the exponential), which guarantees that every weight is
well defined and, for odd p, a p-adic unit.

Configurations over a slice are enumerated little-endian over the dense
vertex index: bit i of the configuration integer is the spin of vertex i
(bit 1 is spin +1, bit 0 is spin -1).  This order is fixed so that emitted
reports are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Sequence

from .padic import (
    DomainError,
    IndeterminateValueError,
    NormValue,
    PadicNumber,
    ResourceLimitError,
    _ppow,
    _val_residue,
    difference_norm,
    in_exp_domain,
    padic_exp,
    padic_sum,
)
from .tree import Address, TreeGeometryError, TreeSlice, default_path_window, distance, format_address

if TYPE_CHECKING:  # the boundary-field family lives one module up the stack
    from .recursion import BoundaryField

SPINS = (1, -1)
SPIN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

DEFAULT_ENUMERATION_CAP_LOG2 = 20


def pair_key(u: int, v: int) -> str:
    return ("+" if u > 0 else "-") + ("+" if v > 0 else "-")


@dataclass(frozen=True)
class EdgeWeights:
    """exp of the four interaction values of one edge, in spin-pair order
    (+1,+1), (+1,-1), (-1,+1), (-1,-1).  All four are units in the ball
    around 1."""

    a: PadicNumber
    b: PadicNumber
    c: PadicNumber
    d: PadicNumber

    def entry(self, u: int, v: int) -> PadicNumber:
        if u > 0:
            return self.a if v > 0 else self.b
        return self.c if v > 0 else self.d

    def swapped(self) -> "EdgeWeights":
        """Weights of the same edge traversed in the opposite direction."""
        return EdgeWeights(self.a, self.c, self.b, self.d)


class LambdaSpec:
    """Interaction specification: one table, or one table per edge.

    A table maps spin pairs (u, v) in {-1,+1}**2 to p-adic values.  Entries
    must satisfy the admissibility bound |entry| <= 1/p (p odd) resp. 1/4
    (p = 2); construction fails otherwise unless validation is explicitly
    bypassed (useful only to exercise the runtime domain checks).

    Per-edge tables are keyed by the child address of the edge, with the
    table oriented parent -> child.
    """

    def __init__(self, prime: int, precision: int,
                 table: Mapping[tuple[int, int], PadicNumber] | None = None,
                 per_edge: Mapping[Address, Mapping[tuple[int, int], PadicNumber]] | None = None,
                 validate: bool = True):
        if (table is None) == (per_edge is None):
            raise DomainError("provide exactly one of a homogeneous table or per-edge tables")
        self.prime = prime
        self.precision = precision
        self.mode = "homogeneous" if table is not None else "per_edge"
        if table is not None:
            self._table = {pair: table[pair] for pair in SPIN_PAIRS}
            self._tables = None
        else:
            self._table = None
            self._tables = {child: {pair: tab[pair] for pair in SPIN_PAIRS}
                            for child, tab in per_edge.items()}
        if validate:
            for key, tab in self.entries():
                for pair, value in tab.items():
                    if value.prime != prime:
                        raise DomainError(f"entry {pair} of edge {key} has prime {value.prime}")
                    if not in_exp_domain(value):
                        raise DomainError(
                            f"interaction entry {pair_key(*pair)} of edge {key} has norm "
                            f"{prime}**{-value.valuation}, violating the admissibility bound"
                        )
        self._weights_cache: dict = {}

    def entries(self) -> Iterator[tuple[str, dict]]:
        if self._table is not None:
            yield "homogeneous", self._table
        else:
            for child, tab in self._tables.items():
                yield format_address(child), tab

    def _canonical(self, x: Address, y: Address) -> tuple[Address, Address, bool]:
        if len(y) == len(x) + 1 and y[:-1] == x:
            return x, y, False
        if len(x) == len(y) + 1 and x[:-1] == y:
            return y, x, True
        raise TreeGeometryError(
            f"{format_address(x)} and {format_address(y)} are not tree-adjacent"
        )

    def table_for(self, x: Address, y: Address) -> dict[tuple[int, int], PadicNumber]:
        """Interaction table oriented x -> y (arguments may name the edge in
        either direction; the reversed direction transposes the table)."""
        parent, child, reverse = self._canonical(x, y)
        if self._table is not None:
            base = self._table
        else:
            base = self._tables.get(child)
            if base is None:
                raise DomainError(f"no interaction table for edge {format_address(child)}")
        if not reverse:
            return dict(base)
        return {(u, v): base[(v, u)] for (u, v) in SPIN_PAIRS}

    def weights_for(self, x: Address, y: Address) -> EdgeWeights:
        """exp of the table for the edge, oriented x -> y."""
        parent, child, reverse = self._canonical(x, y)
        key = "h" if self._table is not None else child
        cached = self._weights_cache.get(key)
        if cached is None:
            base = self._table if self._table is not None else self._tables.get(child)
            if base is None:
                raise DomainError(f"no interaction table for edge {format_address(child)}")
            cached = EdgeWeights(*(padic_exp(base[pair]) for pair in SPIN_PAIRS))
            self._weights_cache[key] = cached
        return cached.swapped() if reverse else cached


@dataclass(frozen=True)
class SpinConfiguration:
    """Total spin assignment over the first vertex_count slice vertices,
    packed little-endian (bit i = vertex i, bit 1 = spin +1)."""

    bits: int
    vertex_count: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.vertex_count):
            raise DomainError("configuration bits exceed the vertex count")

    def spin(self, index: int) -> int:
        return 1 if (self.bits >> index) & 1 else -1

    def spins(self) -> tuple[int, ...]:
        return tuple(self.spin(i) for i in range(self.vertex_count))

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> "SpinConfiguration":
        bits = 0
        for i, s in enumerate(spins):
            if s not in (-1, 1):
                raise DomainError(f"spin must be +1 or -1, got {s}")
            if s == 1:
                bits |= 1 << i
        return cls(bits, len(spins))


def _depth_for_count(slice_: TreeSlice, count: int) -> int:
    for m in range(slice_.depth + 1):
        if slice_.vertex_count_to(m) == count:
            return m
    raise DomainError(f"{count} vertices is not a ball of the slice")


def hamiltonian(config: SpinConfiguration, lam: LambdaSpec,
                slice_: TreeSlice) -> PadicNumber:
    """Energy of a configuration: sum of interaction values over the edges
    of the ball the configuration covers."""
    depth = _depth_for_count(slice_, config.vertex_count)
    terms = []
    for parent, child in slice_.edges_to(depth):
        sp = config.spin(slice_.index[parent])
        sc = config.spin(slice_.index[child])
        terms.append(lam.table_for(parent, child)[(sp, sc)])
    return padic_sum(terms, lam.prime, lam.precision)


@dataclass(frozen=True)
class DomainCheckResult:
    in_domain: bool
    norm: NormValue

    def to_dict(self) -> dict:
        return {"in_domain": self.in_domain, "norm_exponent": self.norm.to_json()}


def tilted_hamiltonian_domain_check(config: SpinConfiguration, lam: LambdaSpec,
                                    field: "BoundaryField",
                                    slice_: TreeSlice) -> DomainCheckResult:
    """Whether the boundary-tilted energy lies inside the exponential ball.

    Always true when the interaction and field admissibility invariants
    hold; this is the runtime witness of that closure property.
    """
    depth = _depth_for_count(slice_, config.vertex_count)
    total = hamiltonian(config, lam, slice_)
    tilt = []
    for x in slice_.level(depth):
        h = field.value_at(x)
        s = config.spin(slice_.index[x])
        tilt.append(h if s == 1 else -h)
    total = padic_sum([total] + tilt, lam.prime, lam.precision)
    return DomainCheckResult(in_exp_domain(total), total.norm())


@dataclass(frozen=True)
class FiniteVolumeMeasure:
    """Exact weights of every configuration on a ball, plus the partition
    function.  Weights sum to 1 digit-exact at the working precision."""

    depth: int
    slice_: TreeSlice
    vertex_count: int
    weights: tuple[PadicNumber, ...]
    partition_function: PadicNumber
    boundary_field_used: dict[Address, PadicNumber]

    def weight(self, bits: int) -> PadicNumber:
        return self.weights[bits]

    def config(self, bits: int) -> SpinConfiguration:
        return SpinConfiguration(bits, self.vertex_count)

    def configurations(self) -> Iterator[SpinConfiguration]:
        for bits in range(len(self.weights)):
            yield SpinConfiguration(bits, self.vertex_count)

    def total_weight(self) -> PadicNumber:
        return padic_sum(self.weights, self.partition_function.prime,
                         self.partition_function.precision)


def finite_volume_measure(depth: int, lam: LambdaSpec, field: "BoundaryField",
                          slice_: TreeSlice,
                          enum_cap_log2: int = DEFAULT_ENUMERATION_CAP_LOG2) -> FiniteVolumeMeasure:
    """Measure on the ball of the given radius, tilted by the field on its
    outermost level.

    Each configuration weight is exp of the tilted energy divided by the
    partition function; the evaluation multiplies the per-edge and
    per-boundary-vertex exponential factors, which agrees digit for digit
    with exponentiating the summed energy because exp is additive on the
    admissibility ball.
    """
    if depth > slice_.depth:
        raise DomainError(f"slice only reaches depth {slice_.depth}")
    p = lam.prime
    count = slice_.vertex_count_to(depth)
    if count > enum_cap_log2:
        raise ResourceLimitError(
            f"2**{count} configurations exceed the enumeration cap 2**{enum_cap_log2}"
        )
    edges = slice_.edges_to(depth)
    boundary = slice_.level(depth)

    edge_factors = []
    widths = []
    for parent, child in edges:
        w = lam.weights_for(parent, child)
        # indexed by 2*parent_bit + child_bit (bit 1 = spin +1)
        edge_factors.append((slice_.index[parent], slice_.index[child],
                             (w.d, w.c, w.b, w.a)))
        widths.extend(f.precision for f in (w.a, w.b, w.c, w.d))
    boundary_values: dict[Address, PadicNumber] = {}
    boundary_factors = []
    for x in boundary:
        h = field.value_at(x)
        if not in_exp_domain(h):
            raise DomainError(f"field value at {format_address(x)} violates admissibility")
        boundary_values[x] = h
        eplus = padic_exp(h)
        eminus = eplus.inverse()
        boundary_factors.append((slice_.index[x], (eminus, eplus)))
        widths.extend((eplus.precision, eminus.precision))

    width = min(widths) if widths else lam.precision
    mod = _ppow(p, width)
    edge_units = [(ip, ic, tuple(f.unit % mod for f in factors))
                  for ip, ic, factors in edge_factors]
    boundary_units = [(i, tuple(f.unit % mod for f in factors))
                      for i, factors in boundary_factors]

    units = []
    for bits in range(1 << count):
        u = 1
        for ip, ic, factors in edge_units:
            u = u * factors[(((bits >> ip) & 1) << 1) | ((bits >> ic) & 1)] % mod
        for i, factors in boundary_units:
            u = u * factors[(bits >> i) & 1] % mod
        units.append(u)

    z_residue = sum(units) % mod
    if z_residue == 0:
        raise IndeterminateValueError(
            "partition function vanishes at the working precision",
            bound_exponent=width,
        )
    vz = _val_residue(z_residue, p, width)
    rel = width - vz
    zmod = _ppow(p, rel)
    z_unit = (z_residue // _ppow(p, vz)) % zmod
    z_inv = pow(z_unit, -1, zmod)
    weights = tuple(
        PadicNumber(p, -vz, (u * z_inv) % zmod, rel) for u in units
    )
    partition = PadicNumber(p, vz, z_unit, rel)
    return FiniteVolumeMeasure(depth, slice_, count, weights, partition, boundary_values)


@dataclass(frozen=True)
class CompatibilityResult:
    passed: bool
    max_discrepancy: NormValue
    worst_config: int | None = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_discrepancy_exponent": self.max_discrepancy.to_json(),
            "worst_config": self.worst_config,
        }


def check_compatibility(depth: int, lam: LambdaSpec, field: "BoundaryField",
                        slice_: TreeSlice,
                        enum_cap_log2: int = DEFAULT_ENUMERATION_CAP_LOG2) -> CompatibilityResult:
    """Verify that summing the depth-n measure over the outermost spins
    reproduces the depth-(n-1) measure, configuration by configuration.

    Passes only when the two sides agree on every digit both computations
    guarantee; the returned norm is the largest definite discrepancy (the
    zero norm when none is detectable).
    """
    if depth < 1:
        raise DomainError("compatibility needs depth >= 1")
    outer = finite_volume_measure(depth, lam, field, slice_, enum_cap_log2)
    inner = finite_volume_measure(depth - 1, lam, field, slice_, enum_cap_log2)
    inner_count = inner.vertex_count
    outer_spins = outer.vertex_count - inner_count
    worst: NormValue = NormValue(None)
    worst_config = None
    passed = True
    p = lam.prime
    for bits in range(1 << inner_count):
        parts = [outer.weights[bits | (extension << inner_count)]
                 for extension in range(1 << outer_spins)]
        lhs = padic_sum(parts, p, lam.precision)
        definite, gap = difference_norm(lhs, inner.weights[bits])
        if definite and not gap.is_zero:
            passed = False
            if worst.is_zero or gap > worst:
                worst = gap
                worst_config = bits
    return CompatibilityResult(passed, worst, worst_config)


@dataclass(frozen=True)
class TransitionMatrix:
    """2x2 matrix of edge transition weights indexed by spin pairs."""

    entries: dict[tuple[int, int], PadicNumber]
    mode: str

    def entry(self, u: int, v: int) -> PadicNumber:
        return self.entries[(u, v)]

    def row_sum(self, u: int) -> PadicNumber:
        return self.entries[(u, 1)] + self.entries[(u, -1)]

    def to_dict(self) -> dict:
        return {pair_key(u, v): self.entries[(u, v)].to_dict() for u, v in SPIN_PAIRS}


def transition_matrix(edge: tuple[Address, Address], lam: LambdaSpec,
                      field: "BoundaryField",
                      normalization: str = "row") -> TransitionMatrix:
    """Edge transition weights exp(lambda(u,v) + u*h_x + v*h_y), normalized.

    With row normalization each row sums to 1 (the standard tree Markov
    chain); with literal normalization all four entries sum to 1.
    """
    if normalization not in ("row", "literal"):
        raise DomainError(f"unknown normalization {normalization!r}")
    x, y = edge
    weights = lam.weights_for(x, y)
    hx = field.value_at(x)
    hy = field.value_at(y)
    ex = padic_exp(hx)
    ey = padic_exp(hy)
    exi = ex.inverse()
    eyi = ey.inverse()
    raw = {}
    for u, v in SPIN_PAIRS:
        value = weights.entry(u, v) * (ex if u > 0 else exi) * (ey if v > 0 else eyi)
        raw[(u, v)] = value
    if normalization == "row":
        entries = {}
        for u in SPINS:
            denom = raw[(u, 1)] + raw[(u, -1)]
            entries[(u, 1)] = raw[(u, 1)] / denom
            entries[(u, -1)] = raw[(u, -1)] / denom
    else:
        denom = padic_sum([raw[pair] for pair in SPIN_PAIRS], lam.prime, lam.precision)
        if denom.is_zero:
            raise IndeterminateValueError("transition denominator vanishes at working precision")
        entries = {pair: raw[pair] / denom for pair in SPIN_PAIRS}
    return TransitionMatrix(entries, normalization)


def stationary_vector(matrix: TransitionMatrix) -> tuple[PadicNumber, PadicNumber]:
    """Invariant probability vector of a row-stochastic 2x2 matrix.

    Closed form: proportional to (P(-1,+1), P(+1,-1)), normalized to sum 1.
    """
    one = PadicNumber.one(matrix.entries[(1, 1)].prime,
                          matrix.entries[(1, 1)].precision)
    for u in SPINS:
        if matrix.row_sum(u) != one:
            raise DomainError("stationary vector requires a row-stochastic matrix")
    up = matrix.entry(-1, 1)
    down = matrix.entry(1, -1)
    try:
        total = up + down
    except IndeterminateValueError:
        raise IndeterminateValueError(
            "off-diagonal transition weights cancel at working precision"
        ) from None
    return up / total, down / total


def marginal_path_measure(window: Sequence[Address], spins: Sequence[int],
                          lam: LambdaSpec, field: "BoundaryField",
                          normalization: str = "row") -> PadicNumber:
    """Weight of a spin word along a path window.

    The weight is the stationary-vector component of the first spin times
    the product of transition entries along consecutive window edges.  The
    stationary vector is always computed from the row-normalized first-edge
    matrix; the transition factors use the requested normalization.
    """
    if len(window) != len(spins):
        raise DomainError("one spin per window vertex is required")
    if len(window) < 2:
        raise DomainError("window must contain at least one edge")
    for a, b in zip(window, window[1:]):
        if distance(a, b) != 1:
            raise TreeGeometryError(
                f"window vertices {format_address(a)} and {format_address(b)} "
                "are not adjacent"
            )
    first_edge = (window[0], window[1])
    pi = stationary_vector(transition_matrix(first_edge, lam, field, "row"))
    value = pi[0] if spins[0] == 1 else pi[1]
    for m in range(len(window) - 1):
        matrix = transition_matrix((window[m], window[m + 1]), lam, field, normalization)
        value = value * matrix.entry(spins[m], spins[m + 1])
    return value


@dataclass(frozen=True)
class NormProfileReport:
    """Boundedness diagnostics: weight norms per depth, and for p = 2 the
    literal-mode factor bound plus the marginal norm growth along the
    default path."""

    prime: int
    weight_norm_exponents: dict[int, tuple[int, int]]   # depth -> (min, max) exponent
    bounded: bool
    factor_max_entry_exponent: int | None = None        # p = 2 only
    marginal_max_exponents: list[int] | None = None     # p = 2 only, per window size
    marginal_strictly_increasing: bool | None = None

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "weight_norm_exponents": {str(n): list(v)
                                      for n, v in self.weight_norm_exponents.items()},
            "bounded": self.bounded,
            "factor_max_entry_exponent": self.factor_max_entry_exponent,
            "marginal_max_exponents": self.marginal_max_exponents,
            "marginal_strictly_increasing": self.marginal_strictly_increasing,
        }


def measure_norm_profile(lam: LambdaSpec, field: "BoundaryField",
                         slice_: TreeSlice, n_max: int,
                         window_max: int = 5,
                         normalization: str = "row",
                         enum_cap_log2: int = DEFAULT_ENUMERATION_CAP_LOG2) -> NormProfileReport:
    """Norm bookkeeping behind the boundedness dichotomy: for odd p every
    weight is a unit; for p = 2 the literal transition factors all have norm
    at least 4, so marginal path weights grow without bound."""
    weight_norms: dict[int, tuple[int, int]] = {}
    for n in range(1, n_max + 1):
        measure = finite_volume_measure(n, lam, field, slice_, enum_cap_log2)
        exps = [w.valuation for w in measure.weights]
        weight_norms[n] = (min(exps), max(exps))
    if lam.prime != 2:
        return NormProfileReport(lam.prime, weight_norms, bounded=True)

    window = default_path_window(window_max)
    pairs = list(zip(window, window[1:]))
    literal = [transition_matrix(pair, lam, field, "literal") for pair in pairs]
    entry_exponents = [e.valuation for m in literal for e in m.entries.values()]
    marginal_max = []
    for n in range(1, window_max + 1):
        lo = window_max - n
        sub_matrices = literal[lo: window_max + n]
        pi = stationary_vector(transition_matrix(pairs[lo], lam, field, "row"))
        size = 2 * n + 1
        best = None
        # |product| needs only factor valuations, which are exact
        for bits in range(1 << size):
            v = pi[0].valuation if bits & 1 else pi[1].valuation
            for i, mat in enumerate(sub_matrices):
                u = 1 if (bits >> i) & 1 else -1
                w = 1 if (bits >> (i + 1)) & 1 else -1
                v += mat.entry(u, w).valuation
            if best is None or v < best:
                best = v
        marginal_max.append(best)
    growing = all(b < a for a, b in zip(marginal_max, marginal_max[1:]))
    return NormProfileReport(
        prime=2,
        weight_norm_exponents=weight_norms,
        bounded=False,
        factor_max_entry_exponent=max(entry_exponents),
        marginal_max_exponents=marginal_max,
        marginal_strictly_increasing=growing,
    )
