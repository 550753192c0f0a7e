"""Exact fixed-precision p-adic arithmetic.

Representation.  A nonzero value is stored as ``p**valuation * unit`` where
``unit`` is an integer in ``[1, p**precision)`` coprime to ``p``.  The value
is known exactly modulo ``p**(valuation + precision)``; ``precision`` is the
count of guaranteed base-p digits of the unit part, so valuations (and hence
norms) of stored values are always exact.  Zero is a distinguished value with
``valuation = None`` (the infinity marker) and no digits.

Exactness certificates.  A value constructed from a rational keeps the
rational in its ``exact`` slot.  Field operations between certified values
are carried out in exact rational arithmetic and may legitimately collapse
to exact zero (for instance when an interaction table is antisymmetric).
Operations on uncertified values are residue arithmetic: when every known
digit of a sum cancels, the result cannot be told apart from zero at the
working precision and IndeterminateValueError is raised instead of silently
returning zero.

Everything here is immutable and safe to share between threads; all
functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Sequence

DEFAULT_PRECISION = 32

# internal guard digits for truncated series: stops absorb the valuation
# dips caused by division by n (resp. n!) in the log (resp. exp) series
SERIES_GUARD = 2


class PadicError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(PadicError):
    """Structurally invalid input: non-prime modulus, bad digits, bad caps."""


class DomainError(PadicError):
    """Operation applied outside its domain of definition or convergence."""


class IndeterminateValueError(PadicError):
    """All known digits cancelled: the result is 0 modulo p**bound_exponent
    but its true value is unknowable at the working precision."""

    def __init__(self, message: str, bound_exponent: int | None = None):
        super().__init__(message)
        self.bound_exponent = bound_exponent


class NoConvergenceError(PadicError):
    """Root lifting was not applicable or did not converge."""


class ContractionViolationError(PadicError):
    """An iteration step failed the promised contraction rate."""


class ResourceLimitError(PadicError):
    """A configured size cap (vertices, enumerated configurations) was hit."""


_checked_primes: set[int] = set()
_pow_cache: dict[tuple[int, int], int] = {}


def _is_prime(p: int) -> bool:
    if p in _checked_primes:
        return True
    if not isinstance(p, int) or p < 2:
        return False
    if p in (2, 3):
        _checked_primes.add(p)
        return True
    if p % 2 == 0:
        return False
    for d in range(3, isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    _checked_primes.add(p)
    return True


def _ppow(p: int, e: int) -> int:
    key = (p, e)
    v = _pow_cache.get(key)
    if v is None:
        v = p**e
        _pow_cache[key] = v
    return v


def _val_int(n: int, p: int) -> int:
    """Exact valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _val_residue(n: int, p: int, width: int) -> int:
    """Valuation of an integer known modulo p**width; width if it vanishes."""
    n %= _ppow(p, width)
    if n == 0:
        return width
    return _val_int(n, p)


def _floor_log(n: int, p: int) -> int:
    f, q = 0, p
    while q <= n:
        f += 1
        q *= p
    return f


@dataclass(frozen=True)
class NormValue:
    """A p-adic norm p**(-exponent); the zero marker (exponent None) is |0| = 0.

    Only the exponent is stored, so values for the same prime compare
    directly; a larger exponent means a smaller norm.
    """

    exponent: int | None = None

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def __le__(self, other: "NormValue") -> bool:
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        return self.exponent >= other.exponent

    def __lt__(self, other: "NormValue") -> bool:
        return self <= other and self != other

    def __gt__(self, other: "NormValue") -> bool:
        return not self <= other

    def __ge__(self, other: "NormValue") -> bool:
        return other <= self

    def as_fraction(self, p: int) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if self.exponent >= 0:
            return Fraction(1, p**self.exponent)
        return Fraction(p ** (-self.exponent))

    def to_json(self):
        return None if self.is_zero else self.exponent


NORM_ZERO = NormValue(None)


class PadicNumber:
    """An immutable p-adic scalar; see the module docstring for semantics."""

    __slots__ = ("prime", "valuation", "unit", "precision", "exact")

    def __init__(self, prime, valuation, unit, precision, exact=None):
        if not _is_prime(prime):
            raise ConfigurationError(f"modulus {prime} is not prime")
        if not isinstance(precision, int) or precision < 1:
            raise ConfigurationError(f"precision must be a positive integer, got {precision}")
        if valuation is None:
            if unit != 0:
                raise ConfigurationError("zero must carry an empty unit part")
        else:
            if not isinstance(valuation, int):
                raise ConfigurationError("valuation must be an integer or None")
            if not 0 < unit < _ppow(prime, precision) or unit % prime == 0:
                raise ConfigurationError(
                    f"unit part must lie in [1, {prime}**{precision}) and be coprime to {prime}"
                )
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("PadicNumber is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, prime: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(prime, None, 0, precision, Fraction(0))

    @classmethod
    def one(cls, prime: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(prime, 0, 1, precision, Fraction(1))

    @classmethod
    def from_rational(cls, numerator: int, denominator: int, prime: int,
                      precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        if denominator == 0:
            raise DomainError("zero denominator")
        if not _is_prime(prime):
            raise ConfigurationError(f"modulus {prime} is not prime")
        return _from_fraction(Fraction(numerator, denominator), prime, precision)

    @classmethod
    def from_int(cls, n: int, prime: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls.from_rational(n, 1, prime, precision)

    @classmethod
    def from_digits(cls, prime: int, valuation: int, digits: Sequence[int],
                    precision: int | None = None) -> "PadicNumber":
        """Build an uncertified value from little-endian base-p digits."""
        digits = list(digits)
        if precision is None:
            precision = len(digits)
        if len(digits) != precision or precision < 1:
            raise ConfigurationError("digit count must equal the precision")
        if any(not 0 <= d < prime for d in digits):
            raise ConfigurationError(f"digits must lie in [0, {prime})")
        if digits[0] == 0:
            raise ConfigurationError("leading digit of a nonzero unit part must be nonzero")
        unit = 0
        for d in reversed(digits):
            unit = unit * prime + d
        return cls(prime, valuation, unit, precision)

    # -- basic queries -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def digits(self) -> tuple[int, ...]:
        if self.is_zero:
            return ()
        out = []
        u = self.unit
        for _ in range(self.precision):
            u, d = divmod(u, self.prime)
            out.append(d)
        return tuple(out)

    @property
    def abs_precision(self) -> int | None:
        """Exponent A such that the value is known modulo p**A (None for zero)."""
        if self.is_zero:
            return None
        return self.valuation + self.precision

    def norm(self) -> NormValue:
        return NORM_ZERO if self.is_zero else NormValue(self.valuation)

    def __repr__(self):
        if self.is_zero:
            return f"<{self.prime}-adic 0>"
        head = ",".join(str(d) for d in self.digits[:8])
        tail = ",.." if self.precision > 8 else ""
        return f"<{self.prime}-adic v={self.valuation} [{head}{tail}] prec={self.precision}>"

    # -- serialization (the canonical wire format) -------------------------

    def to_dict(self) -> dict:
        if self.is_zero:
            return {"p": self.prime, "zero": True}
        return {
            "p": self.prime,
            "valuation": self.valuation,
            "digits": list(self.digits),
            "precision": self.precision,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PadicNumber":
        p = data["p"]
        if data.get("zero"):
            return cls.zero(p)
        return cls.from_digits(p, data["valuation"], data["digits"], data.get("precision"))

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other) -> "PadicNumber":
        if not isinstance(other, PadicNumber):
            raise TypeError(f"expected PadicNumber, got {type(other).__name__}")
        if other.prime != self.prime:
            raise DomainError(f"mixed primes {self.prime} and {other.prime}")
        return other

    def __add__(self, other):
        other = self._check_compatible(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        if self.exact is not None and other.exact is not None:
            return _from_fraction(self.exact + other.exact, p,
                                  max(self.precision, other.precision))
        caps = [x.valuation + x.precision for x in (self, other) if x.exact is None]
        bound = min(caps)
        low = min(self.valuation, other.valuation)
        width = bound - low
        mod = _ppow(p, width)
        s = (_unit_mod(self, width - (self.valuation - low)) * _ppow(p, self.valuation - low)
             + _unit_mod(other, width - (other.valuation - low)) * _ppow(p, other.valuation - low)) % mod
        if s == 0:
            raise IndeterminateValueError(
                f"total cancellation: the result is 0 modulo {p}**{bound} "
                "but unknown beyond the working precision",
                bound_exponent=bound,
            )
        t = _val_int(s, p)
        return PadicNumber(p, low + t, s // _ppow(p, t), width - t)

    def __neg__(self):
        if self.is_zero:
            return self
        if self.exact is not None:
            return _from_fraction(-self.exact, self.prime, self.precision)
        mod = _ppow(self.prime, self.precision)
        return PadicNumber(self.prime, self.valuation, mod - self.unit, self.precision)

    def __sub__(self, other):
        other = self._check_compatible(other)
        return self + (-other)

    def __mul__(self, other):
        other = self._check_compatible(other)
        p = self.prime
        if self.is_zero or other.is_zero:
            return PadicNumber.zero(p, max(self.precision, other.precision))
        if self.exact is not None and other.exact is not None:
            return _from_fraction(self.exact * other.exact, p,
                                  max(self.precision, other.precision))
        rel = min(x.precision for x in (self, other) if x.exact is None)
        unit = (_unit_mod(self, rel) * _unit_mod(other, rel)) % _ppow(p, rel)
        return PadicNumber(p, self.valuation + other.valuation, unit, rel)

    def __truediv__(self, other):
        other = self._check_compatible(other)
        p = self.prime
        if other.is_zero:
            raise DomainError("division by zero")
        if self.is_zero:
            return PadicNumber.zero(p, max(self.precision, other.precision))
        if self.exact is not None and other.exact is not None:
            return _from_fraction(self.exact / other.exact, p,
                                  max(self.precision, other.precision))
        rel = min(x.precision for x in (self, other) if x.exact is None)
        mod = _ppow(p, rel)
        unit = (_unit_mod(self, rel) * pow(_unit_mod(other, rel), -1, mod)) % mod
        return PadicNumber(p, self.valuation - other.valuation, unit, rel)

    def inverse(self) -> "PadicNumber":
        return PadicNumber.one(self.prime, self.precision) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k == 0:
            return PadicNumber.one(self.prime, self.precision)
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_zero:
            return self
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        if self.prime != other.prime:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        rel = min(self.precision, other.precision)
        mod = _ppow(self.prime, rel)
        return _unit_mod(self, rel) % mod == _unit_mod(other, rel) % mod

    __hash__ = None


def _unit_mod(x: PadicNumber, width: int) -> int:
    """Unit part of x as a residue modulo p**width.

    Certified values extend beyond their stored digits via the rational;
    uncertified values use the stored representative (exact within their
    guaranteed precision, which callers must not exceed).
    """
    if width <= x.precision or x.exact is None:
        return x.unit % _ppow(x.prime, width)
    p = x.prime
    num, den = x.exact.numerator, x.exact.denominator
    vn = _val_int(num, p) if num else 0
    vd = _val_int(den, p)
    mod = _ppow(p, width)
    u = (num // _ppow(p, vn)) * pow(den // _ppow(p, vd), -1, mod) % mod
    return u


def _from_fraction(fr: Fraction, prime: int, precision: int) -> PadicNumber:
    if fr == 0:
        return PadicNumber.zero(prime, precision)
    num, den = fr.numerator, fr.denominator
    vn = _val_int(num, prime) if num else 0
    vd = _val_int(den, prime)
    mod = _ppow(prime, precision)
    unit = (num // _ppow(prime, vn)) * pow(den // _ppow(prime, vd), -1, mod) % mod
    return PadicNumber(prime, vn - vd, unit, precision, exact=fr)


def arithmetic(op: str, x: PadicNumber, y: PadicNumber) -> PadicNumber:
    """One-shot dispatcher (add/sub/mul/div) used by the CLI surface."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ConfigurationError(f"unknown operation {op!r}")


def padic_sum(values: Iterable[PadicNumber], prime: int,
              precision: int = DEFAULT_PRECISION) -> PadicNumber:
    """Fold-sum that treats a totally cancelled partial sum as zero.

    Ultrametrically, a partial sum that is 0 modulo everything known is
    smaller than every remaining term's guaranteed precision, so replacing
    it by exact zero cannot disturb any digit of the final result that the
    arithmetic could certify anyway.
    """
    total = PadicNumber.zero(prime, precision)
    for v in values:
        try:
            total = total + v
        except IndeterminateValueError:
            total = PadicNumber.zero(prime, precision)
    return total


def difference_norm(x: PadicNumber, y: PadicNumber) -> tuple[bool, NormValue]:
    """Norm of x - y, as (definite, value).

    When the subtraction cancels every known digit the first component is
    False and the second is the upper bound p**-A implied by the joint
    precision.
    """
    try:
        d = x - y
    except IndeterminateValueError as err:
        return False, NormValue(err.bound_exponent)
    return True, d.norm()


# -- exponential / logarithm ------------------------------------------------


def exp_domain_valuation(prime: int) -> int:
    """Minimal valuation for the exponential series to converge.

    The convergence ball is open with radius p**(-1/(p-1)); since norms are
    integral powers of p this is exactly valuation >= 1 for odd p and
    valuation >= 2 for p = 2.
    """
    return 2 if prime == 2 else 1


def in_exp_domain(x: PadicNumber) -> bool:
    if x.is_zero:
        return True
    return x.valuation >= exp_domain_valuation(x.prime)


def padic_exp(x: PadicNumber) -> PadicNumber:
    """Exponential series sum x**n / n! (n >= 0) on its convergence ball.

    The result has norm 1 and satisfies |exp(x) - 1| = |x|; it is returned
    at the full absolute precision of the input (the series is an isometry
    of the ball, so no knowledge is gained or lost).
    """
    if x.is_zero:
        return PadicNumber.one(x.prime, x.precision)
    if not in_exp_domain(x):
        raise DomainError(
            f"|x|_{x.prime} = {x.prime}**{-x.valuation} is outside the convergence "
            "ball of the exponential series"
        )
    p, v = x.prime, x.valuation
    bound = x.valuation + x.precision          # output known modulo p**bound
    width = x.precision + SERIES_GUARD + 2     # internal working digits of units
    target = bound + SERIES_GUARD              # ignore terms divisible by p**target
    pw = _ppow(p, width)
    pt = _ppow(p, target)
    xu = x.unit % pw
    acc = 1                                    # term n = 0
    tu, tv = xu, v                             # term n = 1
    n = 1
    while True:
        if tv < target:
            acc = (acc + tu * _ppow(p, tv)) % pt
        m = n + 1
        # remaining terms have valuation >= m*v - (m-1)/(p-1), increasing in m
        if (m * v) * (p - 1) - (m - 1) >= target * (p - 1):
            break
        tu = (tu * xu) % pw
        tv += v
        e = _val_residue(m, p, width) if m % p == 0 else 0
        if e:
            tv -= e
            tu = (tu * pow(m // _ppow(p, e), -1, pw)) % pw
        else:
            tu = (tu * pow(m, -1, pw)) % pw
        n = m
    return PadicNumber(p, 0, acc % _ppow(p, bound), bound)


def padic_log(x: PadicNumber) -> PadicNumber:
    """Logarithm series sum (-1)**(n+1) (x-1)**n / n, defined for |x-1| < 1.

    An argument whose digits are indistinguishable from 1 at the working
    precision maps to exact zero (its true logarithm is below every digit
    the arithmetic could certify).
    """
    if x.is_zero:
        raise DomainError("logarithm of zero")
    one = PadicNumber.one(x.prime, x.precision)
    try:
        y = x - one
    except IndeterminateValueError:
        return PadicNumber.zero(x.prime, x.precision)
    if y.is_zero:
        return PadicNumber.zero(x.prime, x.precision)
    if y.valuation < 1:
        raise DomainError(f"|x - 1|_{x.prime} >= 1 is outside the logarithm ball")
    p, w = y.prime, y.valuation
    bound = y.valuation + y.precision
    width = y.precision + SERIES_GUARD + 2
    target = bound + SERIES_GUARD
    pw = _ppow(p, width)
    pt = _ppow(p, target)
    yu = y.unit % pw
    acc = 0
    pu, pv = yu, w                             # running power y**m
    m = 1
    while True:
        # term m = (+-) y**m / m
        e = _val_residue(m, p, width) if m % p == 0 else 0
        tv = pv - e
        if tv < target:
            tu = (pu * pow(m // _ppow(p, e), -1, pw)) % pw if e else (pu * pow(m, -1, pw)) % pw
            acc = (acc + (tu if m % 2 == 1 else -tu) * _ppow(p, tv)) % pt
        nxt = m + 1
        # remaining terms have valuation >= nxt*w - floor(log_p nxt), nondecreasing
        if nxt * w - _floor_log(nxt, p) >= target:
            break
        pu = (pu * yu) % pw
        pv += w
        m = nxt
    acc %= _ppow(p, bound)
    if acc == 0:
        return PadicNumber.zero(p, y.precision)
    t = _val_int(acc, p)
    if t >= bound:
        return PadicNumber.zero(p, y.precision)
    return PadicNumber(p, t, acc // _ppow(p, t), bound - t)


# -- polynomial root lifting --------------------------------------------------


def _poly_eval(coeffs: Sequence[int], z: int, mod: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * z + c) % mod
    return acc


def hensel_solve(coefficients: Sequence[PadicNumber], seed_residue: int,
                 precision: int | None = None) -> PadicNumber:
    """Lift the root of a polynomial congruent to seed_residue modulo p.

    Newton iteration in the p-adic integers; applicable whenever
    |f(seed)| < |f'(seed)|**2 (simple roots modulo p and, more generally,
    seeds inside the quadratic convergence basin).  Raises
    NoConvergenceError with the two diagnostic norms otherwise.
    """
    coeffs = list(coefficients)
    if len(coeffs) < 2:
        raise ConfigurationError("need a polynomial of degree at least 1")
    p = coeffs[0].prime
    for c in coeffs:
        if c.prime != p:
            raise DomainError("mixed primes in polynomial coefficients")
    nonzero = [c for c in coeffs if not c.is_zero]
    if not nonzero or all(c.is_zero for c in coeffs[1:]):
        raise ConfigurationError("polynomial is constant")
    # scale so every coefficient is a p-adic integer
    shift = min(0, min(c.valuation for c in nonzero))
    avail = min((c.valuation + c.precision - shift for c in nonzero if c.exact is None),
                default=None)
    if precision is None:
        precision = max(c.precision for c in nonzero)
    work = precision + 24
    if avail is not None:
        work = min(work, avail)
    mod = _ppow(p, work)
    ints = [0 if c.is_zero
            else _unit_mod(c, work) * _ppow(p, c.valuation - shift) % mod
            for c in coeffs]
    dints = [(i * ints[i]) % mod for i in range(1, len(ints))]

    z = seed_residue % p
    fz = _poly_eval(ints, z, mod)
    dz = _poly_eval(dints, z, mod)
    vf = _val_residue(fz, p, work)
    vd = _val_residue(dz, p, work)
    if vd >= work:
        raise NoConvergenceError("derivative vanishes at the seed to working precision")
    if vf <= 2 * vd:
        raise NoConvergenceError(
            f"lifting hypothesis |f(seed)| < |f'(seed)|**2 fails: "
            f"|f(seed)|_{p} = {p}**{-vf}, |f'(seed)|_{p} = {p}**{-vd}"
        )
    t = vd
    stop = min(work - 2, t + precision + SERIES_GUARD)
    for _ in range(80):
        if vf >= stop:
            break
        step = (fz // _ppow(p, t)) * pow(dz // _ppow(p, t), -1, mod) % mod
        z = (z - step) % mod
        fz = _poly_eval(ints, z, mod)
        vf = _val_residue(fz, p, work)
        dz = _poly_eval(dints, z, mod)
    else:
        raise NoConvergenceError("Newton iteration did not reach the residual target")
    known = stop - t                          # the root is pinned modulo p**known
    zr = z % _ppow(p, known)
    if zr == 0:
        return PadicNumber.zero(p, precision)
    vr = _val_int(zr, p)
    rel = min(known - vr, precision)
    return PadicNumber(p, vr, (zr // _ppow(p, vr)) % _ppow(p, rel), rel)


def poly_mul(a: Sequence[PadicNumber], b: Sequence[PadicNumber],
             prime: int, precision: int) -> list[PadicNumber]:
    out = [PadicNumber.zero(prime, precision) for _ in range(len(a) + len(b) - 1)]
    for i, ca in enumerate(a):
        if ca.is_zero:
            continue
        for j, cb in enumerate(b):
            if cb.is_zero:
                continue
            out[i + j] = padic_sum([out[i + j], ca * cb], prime, precision)
    return out


def poly_pow(base: Sequence[PadicNumber], k: int, prime: int,
             precision: int) -> list[PadicNumber]:
    result = [PadicNumber.one(prime, precision)]
    for _ in range(k):
        result = poly_mul(result, base, prime, precision)
    return result


def poly_sub(a: Sequence[PadicNumber], b: Sequence[PadicNumber],
             prime: int, precision: int) -> list[PadicNumber]:
    n = max(len(a), len(b))
    zero = PadicNumber.zero(prime, precision)
    out = []
    for i in range(n):
        ca = a[i] if i < len(a) else zero
        cb = b[i] if i < len(b) else zero
        try:
            out.append(ca - cb)
        except IndeterminateValueError:
            out.append(zero)
    return out


# -- generic ultrametric fixed point ------------------------------------------


def iterate_contraction(step: Callable[[PadicNumber], PadicNumber],
                        start: PadicNumber,
                        contraction_bound: NormValue,
                        max_iterations: int | None = None) -> PadicNumber:
    """Iterate a self-map the caller asserts contracts at the given rate.

    Successive gaps |x_{m+1} - x_m| must shrink by at least the bound at
    every step; a violation falsifies the caller's hypothesis numerically
    and raises.  Iteration stops once two successive iterates agree through
    the working precision.
    """
    if contraction_bound.is_zero or contraction_bound.exponent < 1:
        raise ConfigurationError("contraction bound must be a norm strictly below 1")
    rate = contraction_bound.exponent
    cap = max_iterations if max_iterations is not None else start.precision + 8
    x = start
    prev_gap = None
    for _ in range(cap):
        nxt = step(x)
        try:
            d = nxt - x
        except IndeterminateValueError:
            return nxt
        if d.is_zero:
            return nxt
        gap = d.valuation
        if prev_gap is not None and gap < prev_gap + rate:
            raise ContractionViolationError(
                f"step shrank the gap from {x.prime}**{-prev_gap} only to "
                f"{x.prime}**{-gap}, slower than the asserted rate {x.prime}**{-rate}"
            )
        prev_gap = gap
        x = nxt
    raise ContractionViolationError(
        f"no convergence within {cap} iterations at the asserted rate"
    )
