"""Dense multivariate polynomials over F_q of bounded total degree.

A polynomial is a coefficient vector indexed by a :class:`MonomialBasis`,
the graded-lex list of exponent tuples with total degree at most ``d_poly``.

Two evaluation routes exist:

* :func:`evaluate` -- one point, per-coordinate power tables followed by one
  multiply-accumulate pass over the basis.
* :func:`evaluate_grid` -- every point of F_q^s at once. Exponents are folded
  with ``x**a == x**((a - 1) % (q - 1) + 1)`` (valid for all x in F_q, a >= 1)
  onto a ``q**s`` coefficient tensor, which is then pushed through a 1-D
  Vandermonde transform along each axis.

The grid route is what graph generation uses; tests keep it pinned to the
pointwise route.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from math import comb
from pathlib import Path

import numpy as np

from .ffield import FieldElement, FieldSpec, field

DEFAULT_MAX_COEFFS = 1 << 28
DEFAULT_MAX_GRID = 1 << 24
SIDECAR_FORMAT = "thetaforge-polysys"
SIDECAR_VERSION = 1


class CapExceeded(ValueError):
    """A configured size cap would be exceeded."""


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    s: int
    d_poly: int
    exponents: np.ndarray  # shape (size, s)

    @property
    def size(self) -> int:
        return len(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __eq__(self, other):
        return (isinstance(other, MonomialBasis) and other.s == self.s
                and other.d_poly == self.d_poly)

    def __hash__(self):
        return hash((self.s, self.d_poly))

    def index(self, exps) -> int:
        """Position of an exponent tuple in the basis."""
        exps = tuple(int(a) for a in exps)
        if len(exps) != self.s or sum(exps) > self.d_poly or min(exps) < 0:
            raise KeyError(exps)
        # monomials of lower total degree come first
        deg = sum(exps)
        pos = comb(self.s + deg - 1, self.s) if deg > 0 else 0
        remaining = deg
        for i in range(self.s - 1):
            parts = self.s - i - 1
            # tuples at this slot with a larger exponent precede us
            for larger in range(remaining, exps[i], -1):
                pos += comb(remaining - larger + parts - 1, parts - 1)
            remaining -= exps[i]
        return pos


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def basis_size(s: int, d_poly: int) -> int:
    return comb(s + d_poly, s)


def enumerate_monomials(s: int, d_poly: int, max_size: int = DEFAULT_MAX_COEFFS) -> MonomialBasis:
    """All exponent tuples of total degree <= d_poly, graded lex order.

    Within a degree, tuples run in decreasing lexicographic order, so for
    s=2, d_poly=2 the basis is 1, x, y, x^2, xy, y^2.
    """
    if s < 1:
        raise ValueError("need at least one variable")
    if d_poly < 0:
        raise ValueError("degree must be non-negative")
    size = basis_size(s, d_poly)
    if size > max_size:
        raise CapExceeded(
            f"basis of {size} monomials (s={s}, d={d_poly}) exceeds cap {max_size}")
    dtype = np.int16 if d_poly < 2**15 else np.int64
    exps = np.empty((size, s), dtype=dtype)
    i = 0
    for deg in range(d_poly + 1):
        for tup in _compositions(deg, s):
            exps[i] = tup
            i += 1
    exps.setflags(write=False)
    return MonomialBasis(s, d_poly, exps)


@dataclass(frozen=True, eq=False)
class Polynomial:
    basis: MonomialBasis
    spec: FieldSpec
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != self.basis.size:
            raise ValueError(
                f"{len(self.coeffs)} coefficients for a basis of {self.basis.size}")

    @property
    def s(self) -> int:
        return self.basis.s

    @classmethod
    def from_terms(cls, basis: MonomialBasis, spec: FieldSpec, terms: dict) -> Polynomial:
        """Build from ``{exponent tuple: coefficient}``."""
        coeffs = np.zeros(basis.size, dtype=np.int64)
        for exps, c in terms.items():
            coeffs[basis.index(exps)] = int(c) % spec.q if spec.k == 1 else int(c)
        return cls(basis, spec, coeffs)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and other.basis == self.basis
                and other.spec == self.spec and np.array_equal(other.coeffs, self.coeffs))


def sample_polynomial(basis: MonomialBasis, spec: FieldSpec, rng: np.random.Generator) -> Polynomial:
    """Uniform random member of the space spanned by ``basis``."""
    coeffs = spec.random_values(rng, basis.size)
    coeffs.setflags(write=False)
    return Polynomial(basis, spec, coeffs)


def _as_ints(point) -> np.ndarray:
    return np.array([int(x) for x in point], dtype=np.int64)


def monomial_values(basis: MonomialBasis, spec: FieldSpec, point) -> np.ndarray:
    """Value of every basis monomial at ``point``."""
    x = _as_ints(point)
    if len(x) != basis.s:
        raise ValueError(f"point has {len(x)} coordinates, basis has {basis.s} variables")
    if np.any((x < 0) | (x >= spec.q)):
        raise ValueError("point coordinates must be canonical field elements")
    powers = spec.vpow_table(x, basis.d_poly)  # (s, d+1)
    exps = basis.exponents
    vals = powers[0, exps[:, 0]]
    for i in range(1, basis.s):
        vals = spec.vmul(vals, powers[i, exps[:, i]])
    return vals


def evaluate(f: Polynomial, point) -> int:
    """f(point) as a canonical field value."""
    mono = monomial_values(f.basis, f.spec, point)
    return int(f.spec.vsum(f.spec.vmul(f.coeffs, mono)))


def evaluate_naive(f: Polynomial, point) -> int:
    """Term-by-term reference evaluation through scalar field operations."""
    spec = f.spec
    x = [int(v) for v in point]
    if len(x) != f.s:
        raise ValueError("dimension mismatch")
    total = 0
    for c, exps in zip(f.coeffs.tolist(), f.basis.exponents.tolist()):
        term = c
        for xi, a in zip(x, exps):
            term = spec.mul(term, spec.pow(xi, a))
        total = spec.add(total, term)
    return total


def folded_exponents(exponents: np.ndarray, q: int) -> np.ndarray:
    e = exponents.astype(np.int64)
    return np.where(e == 0, 0, (e - 1) % (q - 1) + 1)


def folded_coefficients(f: Polynomial) -> np.ndarray:
    """Coefficient tensor of shape ``(q,)*s`` for the same function on F_q^s."""
    spec, q, s = f.spec, f.spec.q, f.s
    folded = folded_exponents(f.basis.exponents, q)
    flat_idx = np.ravel_multi_index(tuple(folded.T), (q,) * s)
    out = np.zeros(q**s, dtype=np.int64)
    if spec.k == 1:
        np.add.at(out, flat_idx, f.coeffs)
        out %= spec.p
    else:
        for w in spec._digit_weights:
            digit = np.zeros(q**s, dtype=np.int64)
            np.add.at(digit, flat_idx, (f.coeffs // w) % spec.p)
            out += (digit % spec.p) * w
    return out.reshape((q,) * s)


def _vandermonde(spec: FieldSpec) -> np.ndarray:
    # V[e, x] = x**e, with 0**0 = 1
    xs = np.arange(spec.q, dtype=np.int64)
    return spec.vpow_table(xs, spec.q - 1).T.copy()


def evaluate_grid(f: Polynomial, max_grid: int = DEFAULT_MAX_GRID) -> np.ndarray:
    """Values of ``f`` at every point of F_q^s, shape ``(q,)*s``.

    Index ``[x_1, ..., x_s]`` holds f(x_1, ..., x_s).
    """
    spec, q, s = f.spec, f.spec.q, f.s
    if q**s > max_grid:
        raise CapExceeded(f"grid of {q}^{s} points exceeds cap {max_grid}")
    vals = folded_coefficients(f)
    vander = _vandermonde(spec)
    for axis in range(s):
        moved = np.moveaxis(vals, axis, -1)
        if spec.k == 1:
            out = (moved @ vander) % spec.p
        else:
            out = np.zeros(moved.shape, dtype=np.int64)
            for e in range(q):
                out = spec.vadd(out, spec.vmul(moved[..., e:e + 1], vander[e]))
        vals = np.moveaxis(out, -1, axis)
    return np.ascontiguousarray(vals)


@dataclass(frozen=True, eq=False)
class PolynomialSystem:
    """The ell - 1 polynomials in 2*ell variables defining a random algebraic graph."""

    ell: int
    polys: tuple[Polynomial, ...]
    seed: object = None
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.ell < 2:
            raise ValueError("ell must be at least 2")
        if len(self.polys) != self.ell - 1:
            raise ValueError(f"expected {self.ell - 1} polynomials, got {len(self.polys)}")
        basis = self.polys[0].basis
        if any(p.basis != basis or p.spec != self.polys[0].spec for p in self.polys):
            raise ValueError("all polynomials must share one basis and field")
        if basis.s != 2 * self.ell:
            raise ValueError(f"polynomials must have {2 * self.ell} variables")

    @property
    def spec(self) -> FieldSpec:
        return self.polys[0].spec

    @property
    def basis(self) -> MonomialBasis:
        return self.polys[0].basis

    @property
    def d_poly(self) -> int:
        return self.basis.d_poly

    def __eq__(self, other):
        return (isinstance(other, PolynomialSystem) and other.ell == self.ell
                and all(a == b for a, b in zip(self.polys, other.polys)))

    def to_dict(self) -> dict:
        return {
            "format": SIDECAR_FORMAT,
            "version": SIDECAR_VERSION,
            "q": self.spec.q,
            "p": self.spec.p,
            "k": self.spec.k,
            "modulus": list(self.spec.modulus) if self.spec.modulus else None,
            "ell": self.ell,
            "s": self.basis.s,
            "d_poly": self.d_poly,
            "seed": self.seed,
            "coefficients": [p.coeffs.tolist() for p in self.polys],
        }

    @classmethod
    def from_dict(cls, data: dict, max_size: int = DEFAULT_MAX_COEFFS) -> PolynomialSystem:
        if data.get("format") != SIDECAR_FORMAT:
            raise ValueError("not a polynomial-system sidecar")
        if data.get("version") != SIDECAR_VERSION:
            raise ValueError(f"unsupported sidecar version {data.get('version')}")
        spec = field(int(data["q"]))
        if data.get("modulus") is not None and tuple(data["modulus"]) != spec.modulus:
            raise ValueError("sidecar was written with a different field modulus")
        basis = enumerate_monomials(int(data["s"]), int(data["d_poly"]), max_size)
        polys = []
        for coeffs in data["coefficients"]:
            arr = np.asarray(coeffs, dtype=np.int64)
            arr.setflags(write=False)
            polys.append(Polynomial(basis, spec, arr))
        return cls(int(data["ell"]), tuple(polys), data.get("seed"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> PolynomialSystem:
        return cls.from_dict(json.loads(Path(path).read_text()))


def sample_system(ell: int, spec: FieldSpec, d_poly: int, seed,
                  basis: MonomialBasis | None = None,
                  max_coeffs: int = DEFAULT_MAX_COEFFS) -> PolynomialSystem:
    """Draw ell - 1 independent uniform polynomials in 2*ell variables."""
    if ell < 2:
        raise ValueError("ell must be at least 2")
    if basis is None:
        basis = enumerate_monomials(2 * ell, d_poly, max_coeffs)
    if basis.size * (ell - 1) > max_coeffs:
        raise CapExceeded(f"{ell - 1} x {basis.size} coefficients exceed cap {max_coeffs}")
    rng = np.random.default_rng(seed)
    polys = tuple(sample_polynomial(basis, spec, rng) for _ in range(ell - 1))
    return PolynomialSystem(ell, polys, seed)


def evaluate_system(system: PolynomialSystem, u, v) -> bool:
    """True when every polynomial vanishes at the point (u, v)."""
    if len(u) != system.ell or len(v) != system.ell:
        raise ValueError(f"u and v must each have {system.ell} coordinates")
    point = tuple(int(x) for x in u) + tuple(int(x) for x in v)
    for f in system.polys:
        if evaluate(f, point) != 0:
            return False
    return True


def vanishing_grid(system: PolynomialSystem, max_grid: int = DEFAULT_MAX_GRID) -> np.ndarray:
    """Boolean ``(q**ell, q**ell)`` matrix of pairs where every polynomial vanishes.

    Row and column indices are the mixed-radix encodings of the ``u`` and
    ``v`` coordinate tuples, first coordinate most significant.
    """
    n_side = system.spec.q**system.ell
    mask = None
    for f in system.polys:
        zero = evaluate_grid(f, max_grid).reshape(n_side, n_side) == 0
        mask = zero if mask is None else (mask & zero)
    return mask


__all__ = [
    "CapExceeded", "FieldElement", "MonomialBasis", "Polynomial", "PolynomialSystem",
    "basis_size", "enumerate_monomials", "evaluate", "evaluate_grid", "evaluate_naive",
    "evaluate_system", "folded_coefficients", "monomial_values", "sample_polynomial",
    "sample_system", "vanishing_grid",
]
