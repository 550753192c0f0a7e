"""Run configuration: parsing, validation, and object builders.

Model configs are JSON documents.  Every numeric model input is an exact
string, either a rational "num/den" (or "num") or, for interaction entries,
{"log_of": "q"} meaning the p-adic logarithm of the rational q (which must
satisfy |q - 1| < 1).  This keeps host floating point out of the pipeline
entirely.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .padic import (
    ConfigurationError,
    DomainError,
    PadicNumber,
    _is_prime,
    padic_log,
)
from .tree import TreeSlice, build_slice, parse_address
from .model import LambdaSpec, SPIN_PAIRS, pair_key
from .recursion import BoundaryField, propagate_inward, translation_invariant_solve
from .ising import IsingSpec, to_lambda_spec

PRECISION_RANGE = (4, 256)

DEFAULT_CAPS = {"vertices": 20_000, "enumeration_log2": 20}


def parse_rational(text) -> Fraction:
    if not isinstance(text, str):
        raise ConfigurationError(f"rationals must be exact strings, got {text!r}")
    parts = text.split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            return Fraction(int(parts[0]), int(parts[1]))
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigurationError(f"malformed rational {text!r}: {err}") from None
    raise ConfigurationError(f"malformed rational {text!r}")


def format_rational(fr: Fraction) -> str:
    if fr.denominator == 1:
        return str(fr.numerator)
    return f"{fr.numerator}/{fr.denominator}"


@dataclass
class RunConfig:
    p: int
    precision: int = 32
    k: int = 1
    depth: int = 1
    normalization: str = "row"
    seed: int = 0
    lambda_raw: dict | None = None
    ising_raw: dict | None = None
    field_raw: dict = dc_field(default_factory=lambda: {"mode": "zero"})
    caps: dict = dc_field(default_factory=lambda: dict(DEFAULT_CAPS))
    raw: dict = dc_field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {"p", "precision", "k", "depth", "normalization", "seed",
                 "lambda", "ising", "field", "caps"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        p = data.get("p")
        if not isinstance(p, int) or not _is_prime(p):
            raise ConfigurationError(f"p must be a prime integer, got {p!r}")
        precision = data.get("precision", 32)
        if not isinstance(precision, int) or not PRECISION_RANGE[0] <= precision <= PRECISION_RANGE[1]:
            raise ConfigurationError(
                f"precision must be an integer in {PRECISION_RANGE}, got {precision!r}"
            )
        k = data.get("k", 1)
        depth = data.get("depth", 1)
        if not isinstance(k, int) or k < 1:
            raise ConfigurationError(f"k must be an integer >= 1, got {k!r}")
        if not isinstance(depth, int) or depth < 0:
            raise ConfigurationError(f"depth must be an integer >= 0, got {depth!r}")
        normalization = data.get("normalization", "row")
        if normalization not in ("row", "literal"):
            raise ConfigurationError(f"normalization must be row or literal, got {normalization!r}")
        seed = data.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigurationError("seed must be an integer")
        caps = dict(DEFAULT_CAPS)
        caps.update(data.get("caps", {}))
        cfg = cls(p, precision, k, depth, normalization, seed,
                  data.get("lambda"), data.get("ising"),
                  data.get("field", {"mode": "zero"}), caps, data)
        cfg._validate_rationals()
        return cfg

    def _validate_rationals(self) -> None:
        # parse every rational string up front so malformed configs fail fast
        if self.lambda_raw is not None:
            mode = self.lambda_raw.get("mode", "homogeneous")
            if mode == "homogeneous":
                tables = [self.lambda_raw.get("table", {})]
            elif mode == "per_edge":
                tables = list(self.lambda_raw.get("edges", {}).values())
            else:
                raise ConfigurationError(f"unknown lambda mode {mode!r}")
            for tab in tables:
                for key in ("++", "+-", "-+", "--"):
                    if key not in tab:
                        raise ConfigurationError(f"lambda table is missing entry {key!r}")
                    entry = tab[key]
                    if isinstance(entry, dict):
                        parse_rational(entry.get("log_of"))
                    else:
                        parse_rational(entry)
        if self.ising_raw is not None:
            J = self.ising_raw.get("J")
            if J is None:
                raise ConfigurationError("ising block needs a coupling J")
            for v in (J.values() if isinstance(J, dict) else [J]):
                parse_rational(v)
            eta = self.ising_raw.get("eta")
            if eta is not None:
                for v in (eta.values() if isinstance(eta, dict) else [eta]):
                    parse_rational(v)
        mode = self.field_raw.get("mode", "zero")
        if mode not in ("zero", "solve", "ti", "explicit"):
            raise ConfigurationError(f"unknown field mode {mode!r}")
        for level in self.field_raw.get("values", {}).values():
            for v in level.values():
                parse_rational(v)
        for v in self.field_raw.get("seed_values", {}).values():
            parse_rational(v)

    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    # -- builders ----------------------------------------------------------

    def build_slice(self) -> TreeSlice:
        return build_slice(self.k, self.depth, self.caps["vertices"])

    def _entry_value(self, entry) -> PadicNumber:
        if isinstance(entry, dict):
            q = parse_rational(entry["log_of"])
            base = PadicNumber.from_rational(q.numerator, q.denominator,
                                             self.p, self.precision)
            return padic_log(base)
        fr = parse_rational(entry)
        return PadicNumber.from_rational(fr.numerator, fr.denominator,
                                         self.p, self.precision)

    def _table(self, raw_table: dict) -> dict:
        return {pair: self._entry_value(raw_table[pair_key(*pair)])
                for pair in SPIN_PAIRS}

    def build_ising(self) -> IsingSpec | None:
        if self.ising_raw is None:
            return None

        def value(v):
            fr = parse_rational(v)
            return PadicNumber.from_rational(fr.numerator, fr.denominator,
                                             self.p, self.precision)

        J = self.ising_raw["J"]
        eta = self.ising_raw.get("eta")
        if isinstance(J, dict):
            coupling = {parse_address(a): value(v) for a, v in J.items()}
            external = ({parse_address(a): value(v) for a, v in eta.items()}
                        if isinstance(eta, dict)
                        else None if eta is None else value(eta))
            if isinstance(external, PadicNumber):
                external = None if external.is_zero else {(): external}
            return IsingSpec(self.p, self.precision, coupling, external)
        if isinstance(eta, dict):
            raise ConfigurationError("homogeneous coupling takes a single eta")
        return IsingSpec(self.p, self.precision, value(J),
                         value(eta) if eta is not None else None)

    def build_lambda(self, slice_: TreeSlice) -> LambdaSpec:
        ising = self.build_ising()
        if ising is not None:
            return to_lambda_spec(ising, slice_)
        if self.lambda_raw is None:
            raise ConfigurationError("config provides neither a lambda block nor an ising block")
        mode = self.lambda_raw.get("mode", "homogeneous")
        if mode == "homogeneous":
            return LambdaSpec(self.p, self.precision,
                              table=self._table(self.lambda_raw["table"]))
        per_edge = {parse_address(a): self._table(tab)
                    for a, tab in self.lambda_raw["edges"].items()}
        return LambdaSpec(self.p, self.precision, per_edge=per_edge)

    def build_field(self, lam: LambdaSpec, slice_: TreeSlice) -> BoundaryField:
        mode = self.field_raw.get("mode", "zero")
        if mode == "zero":
            return BoundaryField.zeros(self.p, self.precision)
        if mode == "explicit":
            levels = {}
            for lvl, values in self.field_raw.get("values", {}).items():
                row = {}
                for addr, entry in values.items():
                    fr = parse_rational(entry)
                    row[parse_address(addr)] = PadicNumber.from_rational(
                        fr.numerator, fr.denominator, self.p, self.precision)
                levels[int(lvl)] = row
            field = BoundaryField(self.p, self.precision, levels)
            field.validate_admissible()
            return field
        if mode == "ti":
            if lam.mode != "homogeneous":
                raise ConfigurationError("field mode ti requires a homogeneous interaction")
            solution = translation_invariant_solve(lam, self.k)
            seed = {x: solution.h for x in slice_.level(slice_.depth)}
            family = propagate_inward(seed, lam, slice_)
            return BoundaryField(self.p, self.precision, family.levels,
                                 consistent=True, default=solution.h)
        # mode == "solve": propagate inward from the given (default zero) seed
        seed_raw = self.field_raw.get("seed_values")
        if seed_raw:
            seed = {}
            for addr, entry in seed_raw.items():
                fr = parse_rational(entry)
                seed[parse_address(addr)] = PadicNumber.from_rational(
                    fr.numerator, fr.denominator, self.p, self.precision)
        else:
            zero = PadicNumber.zero(self.p, self.precision)
            seed = {x: zero for x in slice_.level(slice_.depth)}
        return propagate_inward(seed, lam, slice_)
