"""Exact arithmetic in GF(p^m), its subfield lattice, and multiplicative cosets.

Elements are encoded as integers in [0, q): the base-p digits of the encoding
are the coefficients of the residue polynomial (digit i = coefficient of X^i),
so prime fields encode elements as themselves.  Multiplication runs on full
discrete exp/log tables with respect to a fixed generator; the O(q) table
memory is what the construction cap is for.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Iterator

import numpy as np

from .errors import (
    DegreeZero,
    DivisionByZero,
    FieldTooLarge,
    NoIrreducibleFound,
    NotPrime,
    NotProperSubfield,
)

DEFAULT_CAP = 1 << 20
CAP_ENV_VAR = "FQLAB_CAP"

ARITH_OPS = ("add", "sub", "mul", "div", "neg", "inv", "pow")


def field_cap() -> int:
    """Current construction cap on q (env override must be a power of two <= 2^24)."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_CAP
    cap = int(raw)
    if cap < 2 or cap > (1 << 24) or cap & (cap - 1):
        raise ValueError(f"{CAP_ENV_VAR} must be a power of two <= 2^24, got {raw!r}")
    return cap


def is_prime(n: int) -> bool:
    """Deterministic trial division; enough for p below the construction cap."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# construction-time polynomial arithmetic over F_p
# (coefficient tuples, low-degree-first; only used before the tables exist)
# ---------------------------------------------------------------------------


def _poly_trim(a: tuple[int, ...]) -> tuple[int, ...]:
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return a[:i]


def _poly_mulmod(a, b, modulus, p):
    """a*b mod modulus, all low-degree-first tuples over F_p; modulus monic."""
    m = len(modulus) - 1
    prod_ = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod_[i + j] = (prod_[i + j] + ai * bj) % p
    # reduce: X^m == -(modulus[:m])
    for k in range(len(prod_) - 1, m - 1, -1):
        c = prod_[k]
        if c:
            prod_[k] = 0
            for i in range(m):
                prod_[k - m + i] = (prod_[k - m + i] - c * modulus[i]) % p
    return tuple(prod_[:m]) + (0,) * (m - len(prod_))


def _poly_divisible(num, den, p):
    """True if den divides num over F_p (den monic, low-degree-first)."""
    rem = list(num)
    dd = len(den) - 1
    while len(_poly_trim(tuple(rem))) - 1 >= dd:
        rem = list(_poly_trim(tuple(rem)))
        lead = rem[-1]
        shift = len(rem) - 1 - dd
        for i in range(dd + 1):
            rem[shift + i] = (rem[shift + i] - lead * den[i]) % p
    return not _poly_trim(tuple(rem))


def _is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(poly)/2."""
    deg = len(poly) - 1
    if deg == 1:
        return True
    if poly[0] == 0:  # divisible by X
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if _poly_divisible(poly, low + (1,), p):
                return False
    return True


def _smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m, coefficients
    compared low-degree-first."""
    for low in product(range(p), repeat=m):
        cand = low + (1,)
        if _is_irreducible(cand, p):
            return cand
    raise NoIrreducibleFound(f"no monic irreducible of degree {m} over F_{p}")


def _digits(value: int, p: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        value, r = divmod(value, p)
        out.append(r)
    return tuple(out)


def _encode(digits, p: int) -> int:
    return sum(int(d) * p**i for i, d in enumerate(digits))


def _find_generator(p: int, m: int, q: int, modulus) -> int:
    """Smallest-encoded element of multiplicative order q-1."""
    if q == 2:
        return 1
    factors = prime_factors(q - 1)
    cofactors = [(q - 1) // f for f in factors]

    def powmod(base_digits, e):
        result = (1,) + (0,) * (m - 1)
        cur = base_digits
        while e:
            if e & 1:
                result = _poly_mulmod(result, cur, modulus, p)
            cur = _poly_mulmod(cur, cur, modulus, p)
            e >>= 1
        return result

    one = (1,) + (0,) * (m - 1)
    for cand in range(2, q):
        cd = _digits(cand, p, m)
        if all(powmod(cd, e) != one for e in cofactors):
            return cand
    raise NoIrreducibleFound(f"no generator found for GF({p}^{m})")  # unreachable


def _build_tables(p: int, m: int, q: int, modulus, generator: int):
    """exp/log tables by repeated doubling of the power sequence."""
    if m == 1:
        powers = np.ones(1, dtype=np.int64)
        cur = generator % p
        while powers.size < q - 1:
            powers = np.concatenate([powers, (powers * cur) % p])
            cur = (cur * cur) % p
        enc = powers[: q - 1]
    else:
        # columns of E are digit vectors of successive generator powers;
        # mulmat is the F_p-linear map "multiply by generator^(current length)"
        gd = _digits(generator, p, m)
        cols = []
        xi = (1,) + (0,) * (m - 1)
        for _ in range(m):
            cols.append(_poly_mulmod(gd, xi, modulus, p))
            xi = _poly_mulmod(xi, (0, 1) + (0,) * (m - 2), modulus, p)
        mulmat = np.array(cols, dtype=np.int64).T
        E = np.zeros((m, 1), dtype=np.int64)
        E[0, 0] = 1
        block = mulmat
        while E.shape[1] < q - 1:
            E = np.concatenate([E, (block @ E) % p], axis=1)
            block = (block @ block) % p
        E = E[:, : q - 1]
        p_pows = np.array([p**i for i in range(m)], dtype=np.int64)
        enc = p_pows @ E
    if np.unique(enc).size != q - 1:
        raise NoIrreducibleFound("generator power table is not a bijection (construction bug)")
    exp_table = np.concatenate([enc, np.array([1], dtype=np.int64)])
    log_table = np.zeros(q, dtype=np.int64)
    log_table[enc] = np.arange(q - 1, dtype=np.int64)
    exp_table.setflags(write=False)
    log_table.setflags(write=False)
    return exp_table, log_table


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A concrete GF(p^m) with fixed modulus and precomputed exp/log tables.

    Immutable after construction; every operation below is pure, so a spec can
    be shared freely across threads.
    """

    p: int
    m: int
    q: int
    modulus: tuple[int, ...]  # monic, low-degree-first, length m+1
    generator: int
    exp_table: np.ndarray  # exp_table[k] = generator^k, period q-1, length q
    log_table: np.ndarray  # log_table[x] for x in [1, q); index 0 is a sentinel
    _derived: dict = field(default_factory=dict, repr=False)

    @property
    def descriptor(self) -> str:
        return f"{self.p}^{self.m}"

    def __repr__(self) -> str:  # keep the tables out of reprs
        return f"FieldSpec({self.descriptor}, modulus={self.modulus}, g={self.generator})"

    # -- scalar operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, pk = 0, 1
        for _ in range(self.m):
            out += (((a // pk) + (b // pk)) % self.p) * pk
            pk *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out, pk = 0, 1
        for _ in range(self.m):
            out += ((-(a // pk)) % self.p) * pk
            pk *= self.p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(int(self.log_table[a]) + int(self.log_table[b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return int(self.exp_table[(-int(self.log_table[a])) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise DivisionByZero("division by 0")
        if a == 0:
            return 0
        return int(self.exp_table[(int(self.log_table[a]) - int(self.log_table[b])) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        """a**e with the exponent reduced mod q-1 for nonzero a."""
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DivisionByZero("negative power of 0")
            return 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    # -- vectorized operations on int64 arrays of encodings ----------------

    def add_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pk = 1
        for _ in range(self.m):
            out += (((a // pk) + (b // pk)) % self.p) * pk
            pk *= self.p
        return out

    def neg_arr(self, a: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return np.array(a, copy=True)
        out = np.zeros(np.shape(a), dtype=np.int64)
        pk = 1
        for _ in range(self.m):
            out += ((-(a // pk)) % self.p) * pk
            pk *= self.p
        return out

    def sub_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        zero = (a == 0) | (b == 0)
        lg = (self.log_table[a] + self.log_table[b]) % (self.q - 1)
        return np.where(zero, 0, self.exp_table[lg])

    def inv_arr(self, a: np.ndarray) -> np.ndarray:
        if np.any(a == 0):
            raise DivisionByZero("inverse of 0")
        return self.exp_table[(-self.log_table[a]) % (self.q - 1)]

    def div_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if np.any(b == 0):
            raise DivisionByZero("division by 0")
        lg = (self.log_table[a] - self.log_table[b]) % (self.q - 1)
        return np.where(a == 0, 0, self.exp_table[lg])

    def pow_arr(self, a: np.ndarray, e: int) -> np.ndarray:
        if e < 0:
            return self.inv_arr(self.pow_arr(a, -e))
        lg = (self.log_table[a] * e) % (self.q - 1)
        out = np.where(a == 0, 0, self.exp_table[lg])
        if e == 0:
            out = np.where(a == 0, 1, out)
        return out

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def element_digits(self, value: int) -> tuple[int, ...]:
        return _digits(value, self.p, self.m)

    def to_json(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "p": self.p,
            "m": self.m,
            "q": self.q,
            "modulus": list(self.modulus),
            "generator": self.generator,
        }


@dataclass(frozen=True, eq=False)
class SubfieldHandle:
    """The subfield of p^d elements, realized as Frobenius fixed points."""

    d: int
    elements: "FqSet"  # noqa: F821 - set_algebra imports this module
    is_proper: bool

    @property
    def size(self) -> int:
        return len(self.elements)


_FIELD_CACHE: dict[tuple[int, int, int], FieldSpec] = {}


def build_field(p: int, m: int) -> FieldSpec:
    """Deterministic GF(p^m): lexicographically smallest monic irreducible
    modulus and the smallest-encoded primitive element as generator."""
    cap = field_cap()
    key = (p, m, cap)
    cached = _FIELD_CACHE.get(key)
    if cached is not None:
        return cached
    if m < 1:
        raise DegreeZero(f"extension degree must be >= 1, got {m}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    q = p**m
    if q > cap:
        raise FieldTooLarge(f"q = {p}^{m} = {q} exceeds cap {cap}")
    modulus = _smallest_irreducible(p, m)
    generator = _find_generator(p, m, q, modulus)
    exp_table, log_table = _build_tables(p, m, q, modulus, generator)
    spec = FieldSpec(p=p, m=m, q=q, modulus=modulus, generator=generator,
                     exp_table=exp_table, log_table=log_table)
    _FIELD_CACHE[key] = spec
    return spec


def parse_descriptor(text: str) -> FieldSpec:
    """Build the field named by a descriptor like "7" or "3^2"."""
    text = text.strip()
    if "^" in text:
        p_str, m_str = text.split("^", 1)
        return build_field(int(p_str), int(m_str))
    return build_field(int(text), 1)


def arith(spec: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a single field operation; operands are validated encodings."""
    if op not in ARITH_OPS:
        raise ValueError(f"unknown op {op!r}, expected one of {ARITH_OPS}")
    if not 0 <= a < spec.q:
        raise ValueError(f"operand {a} out of range [0, {spec.q})")
    unary = op in ("neg", "inv")
    if not unary:
        if b is None:
            raise ValueError(f"op {op!r} needs a second operand")
        if op != "pow" and not 0 <= b < spec.q:
            raise ValueError(f"operand {b} out of range [0, {spec.q})")
    match op:
        case "add":
            return spec.add(a, b)
        case "sub":
            return spec.sub(a, b)
        case "mul":
            return spec.mul(a, b)
        case "div":
            return spec.div(a, b)
        case "neg":
            return spec.neg(a)
        case "inv":
            return spec.inv(a)
        case "pow":
            return spec.pow(a, b)
    raise AssertionError("unreachable")


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def enumerate_subfields(spec: FieldSpec) -> list[SubfieldHandle]:
    """One handle per divisor d of m (ascending): the fixed points of x -> x^(p^d)."""
    cached = spec._derived.get("subfields")
    if cached is not None:
        return cached
    from .set_algebra import FqSet  # deferred: set_algebra depends on this module

    handles = []
    arr = spec.elements()
    for d in divisors(spec.m):
        fixed = arr[spec.pow_arr(arr, spec.p**d) == arr]
        if fixed.size != spec.p**d:
            raise NoIrreducibleFound("Frobenius fixed-point count is wrong (construction bug)")
        handles.append(SubfieldHandle(d=d, elements=FqSet.from_iterable(spec, fixed),
                                      is_proper=d < spec.m))
    spec._derived["subfields"] = handles
    return handles


def proper_subfields(spec: FieldSpec) -> list[SubfieldHandle]:
    return [h for h in enumerate_subfields(spec) if h.is_proper]


def coset_representatives(spec: FieldSpec, G: SubfieldHandle) -> list[int]:
    """Smallest-encoded representative of each distinct dilate cG, c in F_q^*.

    The dilates correspond to cosets of G^* in the cyclic group F_q^*, so there
    are exactly (q-1)/(|G|-1) of them and their union covers F_q.
    """
    if not G.is_proper:
        raise NotProperSubfield(f"subfield of size {G.size} is the whole field")
    cached = spec._derived.setdefault("coset_reps", {}).get(G.d)
    if cached is not None:
        return cached
    n = (spec.q - 1) // (G.size - 1)
    nonzero = np.arange(1, spec.q, dtype=np.int64)
    ids = spec.log_table[nonzero] % n
    reps = np.full(n, spec.q, dtype=np.int64)
    np.minimum.at(reps, ids, nonzero)
    out = sorted(int(r) for r in reps)
    spec._derived["coset_reps"][G.d] = out
    return out
