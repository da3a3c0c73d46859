"""Exact arithmetic in finite fields GF(p^k).

An element is a residue polynomial modulo a monic irreducible modulus of
degree k over GF(p), stored as an integer code: digit i of the code in
base p is the coefficient of x^i.  Codes run 0 .. p^k - 1, the code of a
prime-subfield constant c is c itself, and code arithmetic never depends
on the host platform.

Multiplication, inversion and powers go through discrete-log tables
built once per field (the multiplicative group is cyclic), so after
construction every operation is a table lookup plus an addition.  Table
construction requires p^k <= 2^16; bigger fields are rejected early
because nothing in this package enumerates them anyway.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import FieldMismatchError, FieldZeroDivision, NckitError

_TABLE_ORDER_CAP = 1 << 16
_ORDER_CAP = 1 << 63


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Raw polynomial helpers over GF(p).  Polynomials are lists of ints,
# low degree first, coefficients already reduced mod p.
# ---------------------------------------------------------------------------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    # m must be monic
    r = list(a)
    dm = len(m) - 1
    while len(r) - 1 >= dm and r:
        lead = r[-1]
        if lead:
            shift = len(r) - 1 - dm
            for i in range(dm + 1):
                r[shift + i] = (r[shift + i] - lead * m[i]) % p
        r.pop()
    return _ptrim(r)


def _candidate_poly(n: int, degree: int, p: int) -> list[int]:
    # monic polynomial of the given degree whose lower coefficients are the
    # base-p digits of n
    coeffs = []
    for _ in range(degree):
        coeffs.append(n % p)
        n //= p
    coeffs.append(1)
    return coeffs


def _is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    k = len(coeffs) - 1
    if k == 1:
        return True
    # no roots (degree-1 divisors)
    for r in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * r + c) % p
        if acc == 0:
            return False
    # trial division by monic polynomials of degree 2 .. k//2
    for d in range(2, k // 2 + 1):
        for n in range(p**d):
            g = _candidate_poly(n, d, p)
            if not _pmod(coeffs, g, p):
                return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k over GF(p).

    "Smallest" means smallest integer encoding sum(c_i * p^i); for k = 1
    that is x itself, giving the plain prime field.
    """
    if not _is_prime(p):
        raise NckitError(f"characteristic {p} is not prime")
    if k < 1:
        raise NckitError(f"extension degree must be positive, got {k}")
    if k == 1:
        return (0, 1)
    for n in range(p**k):
        coeffs = _candidate_poly(n, k, p)
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise NckitError(f"no irreducible of degree {k} over GF({p})")  # unreachable


class FieldSpec:
    """A concrete finite field GF(p^k) with a fixed modulus."""

    __slots__ = ("p", "k", "order", "modulus", "_exp", "_log", "_inv", "_neg")

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        if not _is_prime(p):
            raise NckitError(f"characteristic {p} is not prime")
        if k < 1:
            raise NckitError(f"extension degree must be positive, got {k}")
        if p**k > _ORDER_CAP:
            raise NckitError(f"field order {p}^{k} does not fit in 64 bits")
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != k + 1 or mod[-1] != 1:
            raise NckitError(f"modulus must be monic of degree {k}, got {modulus}")
        if p ** (k // 2) <= _TABLE_ORDER_CAP and not _is_irreducible(mod, p):
            raise NckitError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.order = p**k
        self.modulus = mod
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._inv: list[int] | None = None
        self._neg: list[int] | None = None

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.k == other.k
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(GF({self.p}^{self.k}))" if self.k > 1 else f"FieldSpec(GF({self.p}))"

    # -- element construction ---------------------------------------------

    def element(self, code: int) -> FieldElement:
        if not 0 <= code < self.order:
            raise NckitError(f"element code {code} out of range for order {self.order}")
        return FieldElement(self, code)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElement:
        if len(coeffs) > self.k:
            raise NckitError(f"too many coefficients for degree {self.k}")
        code = 0
        for i, c in enumerate(coeffs):
            code += (int(c) % self.p) * self.p**i
        return FieldElement(self, code)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def coeffs_of(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    # -- code arithmetic ----------------------------------------------------
    # These integer-level routines are the ground truth that the compiled
    # kernels mirror; FieldElement operators delegate here.

    def add_code(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        p, out, mult = self.p, 0, 1
        for _ in range(self.k):
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg_code(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.k == 1:
            return (-a) % self.p
        return self._tables()[3][a]

    def sub_code(self, a: int, b: int) -> int:
        return self.add_code(a, self.neg_code(b))

    def mul_code(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return (a * b) % self.p
        exp, log = self._tables()[:2]
        return exp[log[a] + log[b]]

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise FieldZeroDivision("inverse of zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._tables()[2][a]

    def pow_code(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow_code(self.inv_code(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if e == 0 or a == 1:
            return 1 if e == 0 else a
        if self.k == 1:
            return pow(a, e, self.p)
        exp, log = self._tables()[:2]
        return exp[(log[a] * e) % (self.order - 1)]

    def _raw_mul(self, a: int, b: int) -> int:
        # modulus-reduction multiply, used only to build the tables
        pa = list(self.coeffs_of(a))
        pb = list(self.coeffs_of(b))
        prod = _pmod(_pmul(pa, pb, self.p), self.modulus, self.p)
        code = 0
        for i, c in enumerate(prod):
            code += c * self.p**i
        return code

    def _tables(self) -> tuple[list[int], list[int], list[int], list[int]]:
        if self._exp is None:
            if self.order > _TABLE_ORDER_CAP:
                raise NckitError(
                    f"field order {self.order} exceeds the table cap {_TABLE_ORDER_CAP}"
                )
            q = self.order
            n = q - 1
            g = self._find_generator()
            exp = [1] * (2 * n if n else 2)
            log = [0] * q
            acc = 1
            for i in range(n):
                exp[i] = acc
                log[acc] = i
                acc = self._raw_mul(acc, g)
            for i in range(n, 2 * n):
                exp[i] = exp[i - n]
            inv = [0] * q
            for a in range(1, q):
                inv[a] = exp[(n - log[a]) % n] if n else 1
            neg = [0] * q
            for a in range(q):
                coeffs = self.coeffs_of(a)
                code = 0
                for i, c in enumerate(coeffs):
                    code += ((-c) % self.p) * self.p**i
                neg[a] = code
            self._exp, self._log, self._inv, self._neg = exp, log, inv, neg
        return self._exp, self._log, self._inv, self._neg  # type: ignore[return-value]

    def _find_generator(self) -> int:
        n = self.order - 1
        if n <= 1:
            return 1
        factors = []
        m, d = n, 2
        while d * d <= m:
            if m % d == 0:
                factors.append(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            factors.append(m)

        def raw_pow(a: int, e: int) -> int:
            out, base = 1, a
            while e:
                if e & 1:
                    out = self._raw_mul(out, base)
                base = self._raw_mul(base, base)
                e >>= 1
            return out

        for g in range(2, self.order):
            if all(raw_pow(g, n // f) != 1 for f in factors):
                return g
        raise NckitError("no generator found")  # unreachable for a true field


class FieldElement:
    """One element of a FieldSpec, wrapping an integer code."""

    __slots__ = ("spec", "code")

    def __init__(self, spec: FieldSpec, code: int):
        self.spec = spec
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.coeffs_of(self.code)

    def _check(self, other: FieldElement) -> None:
        if self.spec != other.spec:
            raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec.add_code(self.code, other.code))

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec.sub_code(self.code, other.code))

    def __neg__(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.neg_code(self.code))

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec.mul_code(self.code, other.code))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(
            self.spec, self.spec.mul_code(self.code, self.spec.inv_code(other.code))
        )

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.spec, self.spec.pow_code(self.code, e))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.spec == other.spec
            and self.code == other.code
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        q = self.spec.order
        return f"ff({self.code})/GF({q})"


# ---------------------------------------------------------------------------
# Functional surface.
# ---------------------------------------------------------------------------


def ff_add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def ff_sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return x - y


def ff_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def ff_inv(x: FieldElement) -> FieldElement:
    return FieldElement(x.spec, x.spec.inv_code(x.code))


def ff_div(x: FieldElement, y: FieldElement) -> FieldElement:
    return x / y


def ff_pow(x: FieldElement, e: int) -> FieldElement:
    return x**e


def ff_enumerate(spec: FieldSpec) -> Iterator[FieldElement]:
    """All elements once, ordered lexicographically by coefficient tuple."""
    if spec.order > _TABLE_ORDER_CAP:
        raise NckitError(f"refusing to enumerate a field of order {spec.order}")

    # the first coefficient varies slowest, so the order is lexicographic
    # on the coefficient tuple
    def rec(depth: int, code: int) -> Iterator[FieldElement]:
        if depth == spec.k:
            yield FieldElement(spec, code)
            return
        for c in range(spec.p):
            yield from rec(depth + 1, code + c * spec.p**depth)

    yield from rec(0, 0)


_SPEC_CACHE: dict[tuple[int, int], FieldSpec] = {}


def field(p: int, k: int = 1) -> FieldSpec:
    """GF(p^k) with the deterministic default modulus (see find_irreducible)."""
    key = (p, k)
    spec = _SPEC_CACHE.get(key)
    if spec is None:
        spec = FieldSpec(p, k, find_irreducible(p, k))
        _SPEC_CACHE[key] = spec
    return spec


def field_of_order(q: int) -> FieldSpec:
    """GF(q) for a prime power q, factoring q as p^k."""
    if q < 2:
        raise NckitError(f"field order must be at least 2, got {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise NckitError(f"{q} is not a prime power")
            return field(p, k)
        p += 1
    return field(q, 1)  # q itself is prime
