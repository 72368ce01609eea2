"""Arithmetic in finite fields F_q, q = p^k.

Elements are plain integers in ``[0, q)``. For an extension field the
integer packs the coefficient vector over F_p in base p, lowest degree
first, so ``x = p`` and ``1 + x = p + 1``. Multiplication in extension
fields goes through exp/log tables built from a pinned primitive
polynomial; prime fields use modular arithmetic directly.

The hot paths (``vadd``, ``vmul``, ``vsum``) work on numpy integer arrays.
:class:`FieldElement` is a thin checked wrapper for readable scalar code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_EXTENSION_ORDER = 1 << 16
MAX_PRIME_ORDER = (1 << 31) - 1

# Monic primitive polynomial x^k + c_{k-1}x^{k-1} + ... + c_0 for each (p, k),
# stored as (c_0, ..., c_{k-1}). Each entry is the lexicographically smallest
# primitive polynomial when read from c_{k-1} down to c_0.
PRIMITIVE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 14): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 2): (2, 1),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 1, 0, 0, 0, 0),
    (3, 7): (1, 2, 1, 0, 0, 0, 0),
    (3, 8): (2, 0, 0, 1, 0, 0, 0, 0),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0),
    (3, 10): (2, 1, 0, 1, 0, 0, 0, 0, 0, 0),
    (5, 2): (2, 1),
    (5, 3): (2, 3, 0),
    (5, 4): (2, 2, 1, 0),
    (5, 5): (2, 4, 0, 0, 0),
    (5, 6): (2, 1, 0, 0, 0, 0),
    (7, 2): (3, 1),
    (7, 3): (2, 3, 0),
    (7, 4): (5, 3, 1, 0),
    (7, 5): (4, 1, 0, 0, 0),
    (11, 2): (7, 1),
    (11, 3): (4, 1, 0),
    (11, 4): (2, 1, 0, 0),
    (13, 2): (2, 1),
    (13, 3): (6, 1, 0),
    (13, 4): (2, 1, 1, 0),
    (17, 2): (3, 1),
    (17, 3): (3, 1, 0),
    (19, 2): (2, 1),
    (19, 3): (4, 1, 0),
    (23, 2): (7, 1),
    (23, 3): (3, 1, 0),
    (29, 2): (3, 1),
    (29, 3): (11, 1, 0),
    (31, 2): (12, 1),
    (31, 3): (14, 1, 0),
    (37, 2): (5, 1),
    (37, 3): (13, 1, 0),
    (41, 2): (12, 1),
    (43, 2): (3, 1),
    (47, 2): (13, 1),
    (53, 2): (5, 1),
    (59, 2): (2, 1),
    (61, 2): (2, 1),
    (67, 2): (12, 1),
    (71, 2): (11, 1),
    (73, 2): (11, 1),
    (79, 2): (3, 1),
    (83, 2): (2, 1),
    (89, 2): (6, 1),
    (97, 2): (5, 1),
    (101, 2): (3, 1),
    (103, 2): (5, 1),
    (107, 2): (5, 1),
    (109, 2): (6, 1),
    (113, 2): (10, 1),
    (127, 2): (3, 1),
    (131, 2): (14, 1),
    (137, 2): (6, 1),
    (139, 2): (2, 1),
    (149, 2): (3, 1),
    (151, 2): (12, 1),
    (157, 2): (6, 1),
    (163, 2): (11, 1),
    (167, 2): (5, 1),
    (173, 2): (5, 1),
    (179, 2): (7, 1),
    (181, 2): (18, 1),
    (191, 2): (19, 1),
    (193, 2): (5, 1),
    (197, 2): (3, 1),
    (199, 2): (6, 1),
    (211, 2): (3, 1),
    (223, 2): (5, 1),
    (227, 2): (5, 1),
    (229, 2): (6, 1),
    (233, 2): (3, 1),
    (239, 2): (13, 1),
    (241, 2): (13, 1),
    (251, 2): (19, 1),
}

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` and p prime, or None."""
    if q < 2:
        return None
    if is_prime(q):
        return q, 1
    for k in range(q.bit_length(), 1, -1):
        p = round(q ** (1.0 / k))
        for cand in (p - 1, p, p + 1):
            if cand >= 2 and cand**k == q and is_prime(cand):
                return cand, k
    return None


def is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


class FieldSpec:
    """The field F_q together with its arithmetic tables.

    Instances are immutable once built and are shared through :func:`field`.
    """

    def __init__(self, q: int):
        pk = prime_power(q)
        if pk is None:
            raise ValueError(f"q={q} is not a prime power")
        p, k = pk
        if k == 1 and q > MAX_PRIME_ORDER:
            raise ValueError(f"prime field order {q} exceeds {MAX_PRIME_ORDER}")
        if k > 1 and q > MAX_EXTENSION_ORDER:
            raise ValueError(f"extension field order {q} exceeds {MAX_EXTENSION_ORDER}")
        self.q = q
        self.p = p
        self.k = k
        self.modulus = PRIMITIVE_POLYS[(p, k)] if k > 1 else None
        self._digit_weights = np.array([p**i for i in range(k)], dtype=np.int64)
        if k > 1:
            self._exp, self._log = _exp_log_tables(p, k, self.modulus)
        else:
            self._exp = self._log = None

    def __repr__(self):
        return f"FieldSpec(q={self.q}, p={self.p}, k={self.k})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self):
        return hash(("FieldSpec", self.q))

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    def element(self, value: int) -> FieldElement:
        return FieldElement(self, value)

    def elements(self) -> range:
        return range(self.q)

    def digits(self, a: int) -> tuple[int, ...]:
        """Coefficient vector of ``a`` over F_p, lowest degree first."""
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def from_digits(self, digits) -> int:
        value = 0
        for i, c in enumerate(digits):
            value += (int(c) % self.p) * self.p**i
        return value

    # scalar arithmetic on canonical ints

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.k):
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.k):
            out += (-(a % p) % p) * w
            a //= p
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        if self.k == 1:
            return pow(a, -1, self.p)
        return int(self._exp[(-int(self._log[a])) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent; use inv first")
        if e == 0:
            return 1
        if self.k == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 0
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    # vectorised arithmetic on int64 arrays of canonical values

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._digit_weights:
            out += (((a // w) + (b // w)) % self.p) * w
        return out

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return (-a) % self.p
        out = np.zeros(a.shape, dtype=np.int64)
        for w in self._digit_weights:
            out += ((-(a // w)) % self.p) * w
        return out

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        logs = (self._log[a] + self._log[b]) % (self.q - 1)
        return np.where((a == 0) | (b == 0), 0, self._exp[logs])

    def vsum(self, a, axis=None):
        """Field sum of ``a`` along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return a.sum(axis=axis) % self.p
        out = None
        for w in self._digit_weights:
            term = (((a // w) % self.p).sum(axis=axis) % self.p) * w
            out = term if out is None else out + term
        return out

    def vpow_table(self, values, max_exp: int):
        """Array ``T[..., e] = values**e`` for ``e = 0..max_exp`` (with 0**0 = 1)."""
        values = np.asarray(values, dtype=np.int64)
        table = np.empty(values.shape + (max_exp + 1,), dtype=np.int64)
        table[..., 0] = 1
        for e in range(1, max_exp + 1):
            table[..., e] = self.vmul(table[..., e - 1], values)
        return table

    def random_values(self, rng: np.random.Generator, size=None):
        return rng.integers(0, self.q, size=size, dtype=np.int64)


def _exp_log_tables(p: int, k: int, modulus: tuple[int, ...]):
    q = p**k
    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    digits = [1] + [0] * (k - 1)
    weights = [p**i for i in range(k)]
    for i in range(q - 1):
        value = sum(c * w for c, w in zip(digits, weights))
        exp[i] = value
        log[value] = i
        # multiply by x, then reduce x^k = -sum c_j x^j
        top = digits[-1]
        digits = [0] + digits[:-1]
        if top:
            digits = [(d - top * c) % p for d, c in zip(digits, modulus)]
    exp[q - 1:] = exp[: q - 1]
    if len(set(exp[: q - 1].tolist())) != q - 1:
        raise RuntimeError(f"polynomial for ({p}, {k}) is not primitive")
    return exp, log


@lru_cache(maxsize=None)
def field(q: int) -> FieldSpec:
    """Shared :class:`FieldSpec` for F_q."""
    return FieldSpec(q)


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"{self.value} is not a canonical element of F_{self.spec.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError(
                    f"field mismatch: F_{self.spec.q} vs F_{other.spec.q}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return FieldElement(self.spec, int(other)).value
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(b, self.value))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.value, self.spec.inv(b)))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow(self.value, e))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.inv(self.value))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.value)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, e: int) -> FieldElement:
    return a**e


def largest_prime_power_with(bound: int, ell: int) -> FieldSpec:
    """Largest prime power q with ``2 * q**ell <= bound``."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if bound < 2 * 2**ell:
        raise ValueError(
            f"no prime power q satisfies 2q^{ell} <= {bound} (need bound >= {2 * 2**ell})")
    q = int(round((bound / 2) ** (1.0 / ell))) + 1
    while 2 * q**ell > bound:
        q -= 1
    while not is_prime_power(q):
        q -= 1
    return field(q)


def random_element(spec: FieldSpec, rng: np.random.Generator) -> FieldElement:
    return FieldElement(spec, int(rng.integers(0, spec.q)))
