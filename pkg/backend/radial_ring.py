"""Finite sums p_t(x, u, v) * ||x||^t on x != 0, closed under the operators in scope."""

from functools import lru_cache
from typing import Iterable, Mapping

from backend.clifford_core import (
    GaussianRational,
    Multivector,
    exact_sqrt,
    norm_squared,
)
from backend.config import Conjugation
from backend.errors import DimensionMismatch, NotInSpaceError, SamplePointError
from backend.poly import CliffordPoly, var_offset


@lru_cache(maxsize=None)
def _r2_power(m: int, n: int) -> CliffordPoly:
    if n == 0:
        return CliffordPoly.constant(m)
    return _r2_power(m, n - 1) * CliffordPoly.norm_squared(m, "x")


@lru_cache(maxsize=None)
def xux_components(m: int, var: str = "u") -> tuple[CliffordPoly, ...]:
    """Components of x w x = ||x||^2 w - 2<w,x> x for the variable w."""
    r2 = CliffordPoly.norm_squared(m, "x")
    pair = CliffordPoly.pairing(m, var, "x")
    return tuple(
        r2 * CliffordPoly.variable(m, var, i)
        - (pair * CliffordPoly.variable(m, "x", i)).scale(2)
        for i in range(1, m + 1)
    )


class RadialFn:
    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[int, CliffordPoly] | None = None):
        self.dim = dim
        self.terms: dict[int, CliffordPoly] = {t: p for t, p in (terms or {}).items() if p}

    @classmethod
    def zero(cls, dim: int) -> "RadialFn":
        return cls(dim)

    @classmethod
    def from_poly(cls, poly: CliffordPoly, t: int = 0) -> "RadialFn":
        return cls(poly.dim, {t: poly})

    @classmethod
    def radial_power(cls, m: int, t: int) -> "RadialFn":
        return cls(m, {t: CliffordPoly.constant(m)})

    def _check(self, other: "RadialFn") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(self.dim, other.dim)

    def _map(self, fn) -> "RadialFn":
        return RadialFn(self.dim, {t: fn(p) for t, p in self.terms.items()})

    def _accumulate(self, pieces: Iterable[tuple[int, CliffordPoly]]) -> "RadialFn":
        terms: dict[int, CliffordPoly] = {}
        for t, p in pieces:
            if not p:
                continue
            terms[t] = terms[t] + p if t in terms else p
        return RadialFn(self.dim, terms)

    def term_count(self) -> int:
        return sum(len(p) for p in self.terms.values())

    # ring structure

    def __add__(self, other: "RadialFn") -> "RadialFn":
        self._check(other)
        return self._accumulate(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other: "RadialFn") -> "RadialFn":
        return self + (-other)

    def __neg__(self) -> "RadialFn":
        return self._map(lambda p: -p)

    def scale(self, value) -> "RadialFn":
        return self._map(lambda p: p.scale(value))

    def __mul__(self, other) -> "RadialFn":
        if isinstance(other, Multivector):
            return self._map(lambda p: p.right_mul(other))
        if isinstance(other, CliffordPoly):
            return self._map(lambda p: p * other)
        if isinstance(other, RadialFn):
            self._check(other)
            return self._accumulate(
                (ta + tb, pa * pb)
                for ta, pa in self.terms.items()
                for tb, pb in other.terms.items()
            )
        return self.scale(other)

    def left_mul(self, other) -> "RadialFn":
        if isinstance(other, Multivector):
            return self._map(lambda p: p.left_mul(other))
        return self._map(lambda p: other * p)

    def conjugate(self, convention: Conjugation = Conjugation.CLIFFORD) -> "RadialFn":
        return self._map(lambda p: p.conjugate(convention))

    # primitive operators with the product rule d_i ||x||^t = t x_i ||x||^(t-2)

    def partial(self, var: str, i: int) -> "RadialFn":
        if var != "x":
            return self._map(lambda p: p.partial(var, i))
        xi = CliffordPoly.variable(self.dim, "x", i)
        pieces = []
        for t, p in self.terms.items():
            pieces.append((t, p.partial("x", i)))
            if t:
                pieces.append((t - 2, (p * xi).scale(t)))
        return self._accumulate(pieces)

    def dirac_left(self, var: str) -> "RadialFn":
        if var != "x":
            return self._map(lambda p: p.dirac_left(var))
        pieces = []
        for t, p in self.terms.items():
            pieces.append((t, p.dirac_left("x")))
            if t:
                pieces.append((t - 2, p.vector_left_mul("x").scale(t)))
        return self._accumulate(pieces)

    def laplacian(self, var: str) -> "RadialFn":
        if var != "x":
            return self._map(lambda p: p.laplacian(var))
        m = self.dim
        pieces = []
        for t, p in self.terms.items():
            pieces.append((t, p.laplacian("x")))
            if t:
                pieces.append((t - 2, p.euler("x").scale(2 * t) + p.scale(t * (t + m - 2))))
        return self._accumulate(pieces)

    def euler(self, var: str) -> "RadialFn":
        if var != "x":
            return self._map(lambda p: p.euler(var))
        return RadialFn(
            self.dim, {t: p.euler("x") + p.scale(t) for t, p in self.terms.items()}
        )

    def vector_left_mul(self, var: str) -> "RadialFn":
        return self._map(lambda p: p.vector_left_mul(var))

    def pair(self, mul_var: str, diff_var: str) -> "RadialFn":
        if diff_var != "x":
            return self._map(lambda p: p.pair(mul_var, diff_var))
        weight = CliffordPoly.pairing(self.dim, mul_var, "x")
        pieces = []
        for t, p in self.terms.items():
            pieces.append((t, p.pair(mul_var, "x")))
            if t:
                pieces.append((t - 2, (p * weight).scale(t)))
        return self._accumulate(pieces)

    def pair_dd(self, var_a: str, var_b: str) -> "RadialFn":
        if var_a == "x" and var_b == "x":
            return self.laplacian("x")
        if "x" not in (var_a, var_b):
            return self._map(lambda p: p.pair_dd(var_a, var_b))
        other = var_b if var_a == "x" else var_a
        pieces = []
        for t, p in self.terms.items():
            pieces.append((t, p.pair_dd(other, "x")))
            if t:
                pieces.append((t - 2, p.pair("x", other).scale(t)))
        return self._accumulate(pieces)

    def norm_sq_mul(self, var: str) -> "RadialFn":
        if var == "x":
            return RadialFn(self.dim, {t + 2: p for t, p in self.terms.items()})
        return self._map(lambda p: p.norm_sq_mul(var))

    # canonical form

    def collected(self) -> dict[int, tuple[int, CliffordPoly]]:
        """Per parity of t: (t_min, single polynomial) with f = sum r^t_min * poly."""
        out: dict[int, tuple[int, CliffordPoly]] = {}
        by_parity: dict[int, list[int]] = {}
        for t in self.terms:
            by_parity.setdefault(t % 2, []).append(t)
        for parity, ts in by_parity.items():
            t_min = min(ts)
            total = CliffordPoly.zero(self.dim)
            for t in ts:
                total = total + self.terms[t] * _r2_power(self.dim, (t - t_min) // 2)
            if total:
                out[parity] = (t_min, total)
        return out

    def canonical(self) -> "RadialFn":
        return RadialFn(self.dim, {t: p for t, p in self.collected().values()})

    def is_zero(self) -> bool:
        return not self.collected()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialFn):
            return NotImplemented
        return normalize_eq(self, other)

    __hash__ = None

    def homogeneity_degree(self) -> int | None:
        """Degree in x if every term is x-homogeneous of one degree, else None."""
        degrees = set()
        for t, p in self.terms.items():
            for d in p.degrees("x"):
                degrees.add(d + t)
        return degrees.pop() if len(degrees) == 1 else None

    def evaluate(self, assignment: Mapping[str, Iterable]) -> Multivector:
        if "x" not in assignment:
            if any(t for t in self.terms):
                raise SamplePointError("Radial terms need an x assignment")
            r = None
        else:
            x = list(assignment["x"])
            r = exact_sqrt(norm_squared(x))
            if r is None:
                raise SamplePointError(f"||x|| is irrational at x={x}")
            if r == 0 and any(t < 0 for t in self.terms):
                raise SamplePointError("Evaluation at the singular point x = 0")
        total = Multivector(self.dim)
        for t, p in self.terms.items():
            value = p.evaluate(assignment)
            if t:
                value = value.scale(GaussianRational(r) ** t)
            total = total + value
        return total

    def to_text(self) -> str:
        canonical = self.canonical()
        if not canonical.terms:
            return "0"
        return " + ".join(
            f"||x||^({t})*[{canonical.terms[t].to_text()}]" for t in sorted(canonical.terms)
        )

    def __repr__(self) -> str:
        return f"RadialFn({self.dim}, {self.to_text()})"


def normalize_eq(f: RadialFn, g: RadialFn) -> bool:
    return (f - g).is_zero()


def radial_partial(f: RadialFn, i: int) -> RadialFn:
    return f.partial("x", i)


def kelvin_embed(
    q: CliffordPoly,
    k: int,
    t: int,
    left_vector_factor: bool = False,
    var: str = "u",
) -> RadialFn:
    """||x||^t q(x w x / ||x||^2) (optionally times x on the left) for w = var."""
    if not q.is_homogeneous(var, k):
        raise NotInSpaceError(f"Polynomial is not homogeneous of degree {k} in {var}")
    body = q.compose(var, xux_components(q.dim, var))
    if left_vector_factor:
        body = body.vector_left_mul("x")
    return RadialFn.from_poly(body, t - 2 * k)


def reflect_substitute(f: RadialFn, var: str = "u") -> RadialFn:
    """Substitute var -> x var x / ||x||^2 in every term."""
    images = xux_components(f.dim, var)
    pieces = []
    for t, p in f.terms.items():
        for d, part in p.split_degree(var).items():
            pieces.append((t - 2 * d, part.compose(var, images)))
    return RadialFn(f.dim)._accumulate(pieces)


def inversion_substitute(f: RadialFn) -> RadialFn:
    """Pullback under x -> -x/||x||^2 on the x components; u and v untouched."""
    m = f.dim
    off = var_offset("x", m)
    pieces = []
    for t, p in f.terms.items():
        groups: dict[int, dict] = {}
        for (exps, b), c in p.terms.items():
            degree = sum(exps[off : off + m])
            value = -c if degree % 2 else c
            groups.setdefault(degree, {})[(exps, b)] = value
        for degree, terms in groups.items():
            pieces.append((-2 * degree - t, CliffordPoly(m, terms)))
    return RadialFn(m)._accumulate(pieces)


def align(*fs: RadialFn) -> dict[int, tuple[int, list[CliffordPoly]]]:
    """Per parity of t: a common exponent t0 and each input as a polynomial at r^t0."""
    t_min: dict[int, int] = {}
    for f in fs:
        for t in f.terms:
            parity = t % 2
            t_min[parity] = min(t_min.get(parity, t), t)
    out: dict[int, tuple[int, list[CliffordPoly]]] = {}
    for parity, t0 in t_min.items():
        polys = []
        for f in fs:
            total = CliffordPoly.zero(f.dim)
            for t, p in f.terms.items():
                if t % 2 == parity:
                    total = total + p * _r2_power(f.dim, (t - t0) // 2)
            polys.append(total)
        out[parity] = (t0, polys)
    return out
