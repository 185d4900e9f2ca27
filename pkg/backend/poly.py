"""Polynomials in the components of x, u and v with Clifford coefficients."""

from typing import Iterable, Mapping, Sequence

from backend.clifford_core import (
    ONE,
    ZERO,
    GaussianRational,
    Multivector,
    blade_grade,
    blade_product,
    blade_tuple,
    clifford_conjugate,
    complex_conjugate,
    reversion,
)
from backend.config import Conjugation
from backend.errors import DimensionMismatch, EngineError, UnknownVariable

VARIABLES = ("x", "u", "v")

Key = tuple[tuple[int, ...], int]


def var_offset(var: str, m: int) -> int:
    try:
        return VARIABLES.index(var) * m
    except ValueError:
        raise UnknownVariable(f"Unknown variable {var!r}, expected one of {VARIABLES}")


def _bump(exps: tuple[int, ...], idx: int, step: int) -> tuple[int, ...]:
    return exps[:idx] + (exps[idx] + step,) + exps[idx + 1 :]


class CliffordPoly:
    """Sparse map (exponents over x, u, v components, blade) -> coefficient.

    Coefficients sit on the left of the (central) variable components, so
    dirac_left and vector_left_mul act by left multiplication on them.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Key, GaussianRational] | None = None):
        self.dim = dim
        self.terms: dict[Key, GaussianRational] = {
            k: c for k, c in (terms or {}).items() if c
        }

    @classmethod
    def _raw(cls, dim: int, terms: dict[Key, GaussianRational]) -> "CliffordPoly":
        poly = cls.__new__(cls)
        poly.dim = dim
        poly.terms = terms
        return poly

    # constructors

    @classmethod
    def zero(cls, dim: int) -> "CliffordPoly":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, value=1) -> "CliffordPoly":
        if isinstance(value, Multivector):
            return cls.from_multivector(value)
        return cls(dim, {((0,) * 3 * dim, 0): GaussianRational.coerce(value)})

    @classmethod
    def from_multivector(cls, mv: Multivector) -> "CliffordPoly":
        exps = (0,) * 3 * mv.dim
        return cls(mv.dim, {(exps, b): c for b, c in mv.terms.items()})

    @classmethod
    def variable(cls, dim: int, var: str, i: int) -> "CliffordPoly":
        if not 1 <= i <= dim:
            raise UnknownVariable(f"Component {var}_{i} outside dimension {dim}")
        exps = _bump((0,) * 3 * dim, var_offset(var, dim) + i - 1, 1)
        return cls._raw(dim, {(exps, 0): ONE})

    @classmethod
    def vector_variable(cls, dim: int, var: str) -> "CliffordPoly":
        """The Clifford vector sum_i var_i e_i."""
        off = var_offset(var, dim)
        zero = (0,) * 3 * dim
        return cls._raw(dim, {(_bump(zero, off + i, 1), 1 << i): ONE for i in range(dim)})

    @classmethod
    def norm_squared(cls, dim: int, var: str) -> "CliffordPoly":
        off = var_offset(var, dim)
        zero = (0,) * 3 * dim
        return cls._raw(dim, {(_bump(zero, off + i, 2), 0): ONE for i in range(dim)})

    @classmethod
    def pairing(cls, dim: int, var_a: str, var_b) -> "CliffordPoly":
        """<a, b> for a variable and either a variable name or a coordinate tuple."""
        off_a = var_offset(var_a, dim)
        zero = (0,) * 3 * dim
        terms: dict[Key, GaussianRational] = {}
        if isinstance(var_b, str):
            off_b = var_offset(var_b, dim)
            for i in range(dim):
                exps = _bump(_bump(zero, off_a + i, 1), off_b + i, 1)
                terms[(exps, 0)] = terms.get((exps, 0), ZERO) + ONE
        else:
            for i, c in enumerate(var_b):
                terms[(_bump(zero, off_a + i, 1), 0)] = GaussianRational.coerce(c)
        return cls(dim, terms)

    # queries

    def _check(self, other: "CliffordPoly") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(self.dim, other.dim)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordPoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def degrees(self, var: str) -> set[int]:
        off = var_offset(var, self.dim)
        return {sum(exps[off : off + self.dim]) for exps, _ in self.terms}

    def is_homogeneous(self, var: str, k: int) -> bool:
        return self.degrees(var) <= {k}

    def variables(self) -> set[str]:
        used = set()
        for exps, _ in self.terms:
            for var in VARIABLES:
                off = var_offset(var, self.dim)
                if any(exps[off : off + self.dim]):
                    used.add(var)
        return used

    def is_scalar_valued(self) -> bool:
        return all(blade == 0 for _, blade in self.terms)

    def blade_part(self, blade: int) -> "CliffordPoly":
        return CliffordPoly._raw(
            self.dim, {k: c for k, c in self.terms.items() if k[1] == blade}
        )

    def split_degree(self, var: str) -> dict[int, "CliffordPoly"]:
        off = var_offset(var, self.dim)
        parts: dict[int, dict[Key, GaussianRational]] = {}
        for key, c in self.terms.items():
            d = sum(key[0][off : off + self.dim])
            parts.setdefault(d, {})[key] = c
        return {d: CliffordPoly._raw(self.dim, t) for d, t in parts.items()}

    def constant_multivector(self) -> Multivector:
        if any(any(exps) for exps, _ in self.terms):
            raise EngineError("Polynomial is not constant")
        return Multivector(self.dim, {b: c for (_, b), c in self.terms.items()})

    # ring operations

    def __add__(self, other: "CliffordPoly") -> "CliffordPoly":
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            value = terms.get(key)
            if value is None:
                terms[key] = c
            else:
                value = value + c
                if value:
                    terms[key] = value
                else:
                    del terms[key]
        return CliffordPoly._raw(self.dim, terms)

    def __sub__(self, other: "CliffordPoly") -> "CliffordPoly":
        return self + (-other)

    def __neg__(self) -> "CliffordPoly":
        return CliffordPoly._raw(self.dim, {k: -c for k, c in self.terms.items()})

    def scale(self, value) -> "CliffordPoly":
        value = GaussianRational.coerce(value)
        if not value:
            return CliffordPoly.zero(self.dim)
        return CliffordPoly._raw(self.dim, {k: c * value for k, c in self.terms.items()})

    def __mul__(self, other) -> "CliffordPoly":
        if isinstance(other, Multivector):
            return self.right_mul(other)
        if not isinstance(other, CliffordPoly):
            return self.scale(other)
        self._check(other)
        terms: dict[Key, GaussianRational] = {}
        for (ea, ba), ca in self.terms.items():
            for (eb, bb), cb in other.terms.items():
                sign, blade = blade_product(ba, bb)
                exps = tuple(p + q for p, q in zip(ea, eb))
                value = ca * cb
                key = (exps, blade)
                prev = terms.get(key, ZERO)
                terms[key] = prev + value if sign > 0 else prev - value
        return CliffordPoly(self.dim, terms)

    def __rmul__(self, other) -> "CliffordPoly":
        if isinstance(other, Multivector):
            return self.left_mul(other)
        return self.scale(other)

    def left_mul(self, mv: Multivector) -> "CliffordPoly":
        if mv.dim != self.dim:
            raise DimensionMismatch(mv.dim, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for a, ca in mv.terms.items():
                sign, blade = blade_product(a, b)
                value = ca * c
                key = (exps, blade)
                prev = terms.get(key, ZERO)
                terms[key] = prev + value if sign > 0 else prev - value
        return CliffordPoly(self.dim, terms)

    def right_mul(self, mv: Multivector) -> "CliffordPoly":
        if mv.dim != self.dim:
            raise DimensionMismatch(mv.dim, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for a, ca in mv.terms.items():
                sign, blade = blade_product(b, a)
                value = c * ca
                key = (exps, blade)
                prev = terms.get(key, ZERO)
                terms[key] = prev + value if sign > 0 else prev - value
        return CliffordPoly(self.dim, terms)

    def conjugate(self, convention: Conjugation = Conjugation.CLIFFORD) -> "CliffordPoly":
        if convention is Conjugation.NONE:
            return self
        op = clifford_conjugate if convention is Conjugation.CLIFFORD else _rev_conj
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            image = op(Multivector(self.dim, {b: c}))
            for blade, value in image.terms.items():
                terms[(exps, blade)] = value
        return CliffordPoly._raw(self.dim, terms)

    # primitive operators

    def partial(self, var: str, i: int) -> "CliffordPoly":
        idx = var_offset(var, self.dim) + i - 1
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            power = exps[idx]
            if power:
                terms[(_bump(exps, idx, -1), b)] = c * power
        return CliffordPoly._raw(self.dim, terms)

    def dirac_left(self, var: str) -> "CliffordPoly":
        off = var_offset(var, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                power = exps[off + i]
                if not power:
                    continue
                sign, blade = blade_product(1 << i, b)
                key = (_bump(exps, off + i, -1), blade)
                value = c * power
                prev = terms.get(key, ZERO)
                terms[key] = prev + value if sign > 0 else prev - value
        return CliffordPoly(self.dim, terms)

    def laplacian(self, var: str) -> "CliffordPoly":
        off = var_offset(var, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                power = exps[off + i]
                if power < 2:
                    continue
                key = (_bump(exps, off + i, -2), b)
                terms[key] = terms.get(key, ZERO) + c * (power * (power - 1))
        return CliffordPoly(self.dim, terms)

    def euler(self, var: str) -> "CliffordPoly":
        off = var_offset(var, self.dim)
        terms = {}
        for (exps, b), c in self.terms.items():
            d = sum(exps[off : off + self.dim])
            if d:
                terms[(exps, b)] = c * d
        return CliffordPoly._raw(self.dim, terms)

    def vector_left_mul(self, var: str) -> "CliffordPoly":
        """Left multiplication by the Clifford vector sum_i var_i e_i."""
        off = var_offset(var, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                sign, blade = blade_product(1 << i, b)
                key = (_bump(exps, off + i, 1), blade)
                prev = terms.get(key, ZERO)
                terms[key] = prev + c if sign > 0 else prev - c
        return CliffordPoly(self.dim, terms)

    def pair(self, mul_var: str, diff_var: str) -> "CliffordPoly":
        """sum_i mul_var_i d/d(diff_var_i), e.g. <u, D_x> for ("u", "x")."""
        off_m = var_offset(mul_var, self.dim)
        off_d = var_offset(diff_var, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                power = exps[off_d + i]
                if not power:
                    continue
                key = (_bump(_bump(exps, off_d + i, -1), off_m + i, 1), b)
                terms[key] = terms.get(key, ZERO) + c * power
        return CliffordPoly(self.dim, terms)

    def pair_dd(self, var_a: str, var_b: str) -> "CliffordPoly":
        """sum_i d/d(var_a_i) d/d(var_b_i), e.g. <D_u, D_x>."""
        off_a = var_offset(var_a, self.dim)
        off_b = var_offset(var_b, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                pa, pb = exps[off_a + i], exps[off_b + i]
                if not pa or not pb:
                    continue
                if off_a == off_b:
                    if pa < 2:
                        continue
                    key = (_bump(exps, off_a + i, -2), b)
                    factor = pa * (pa - 1)
                else:
                    key = (_bump(_bump(exps, off_a + i, -1), off_b + i, -1), b)
                    factor = pa * pb
                terms[key] = terms.get(key, ZERO) + c * factor
        return CliffordPoly(self.dim, terms)

    def norm_sq_mul(self, var: str) -> "CliffordPoly":
        off = var_offset(var, self.dim)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            for i in range(self.dim):
                key = (_bump(exps, off + i, 2), b)
                terms[key] = terms.get(key, ZERO) + c
        return CliffordPoly(self.dim, terms)

    # substitution and evaluation

    def rename(self, source: str, target: str) -> "CliffordPoly":
        """Move every component of `source` onto `target` (target must be absent)."""
        m = self.dim
        off_s, off_t = var_offset(source, m), var_offset(target, m)
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            if any(exps[off_t : off_t + m]):
                raise EngineError(f"Cannot rename {source} onto non-empty {target}")
            new = list(exps)
            new[off_t : off_t + m] = exps[off_s : off_s + m]
            new[off_s : off_s + m] = (0,) * m
            terms[(tuple(new), b)] = c
        return CliffordPoly._raw(m, terms)

    def compose(self, var: str, images: Sequence["CliffordPoly"]) -> "CliffordPoly":
        """Substitute var_i -> images[i]; images must be scalar-valued."""
        m = self.dim
        if len(images) != m:
            raise DimensionMismatch(len(images), m)
        if not all(img.is_scalar_valued() for img in images):
            raise EngineError("Substituted components must be scalar-valued")
        off = var_offset(var, m)
        powers: list[list[CliffordPoly]] = [[CliffordPoly.constant(m)] for _ in range(m)]

        def power(i: int, n: int) -> CliffordPoly:
            cache = powers[i]
            while len(cache) <= n:
                cache.append(cache[-1] * images[i])
            return cache[n]

        groups: dict[tuple[int, ...], dict[Key, GaussianRational]] = {}
        for (exps, b), c in self.terms.items():
            sub = exps[off : off + m]
            rest = exps[:off] + (0,) * m + exps[off + m :]
            groups.setdefault(sub, {})[(rest, b)] = c
        result = CliffordPoly.zero(m)
        for sub, rest_terms in groups.items():
            factor = CliffordPoly.constant(m)
            for i, n in enumerate(sub):
                if n:
                    factor = factor * power(i, n)
            result = result + CliffordPoly._raw(m, rest_terms) * factor
        return result

    def substitute(self, assignment: Mapping[str, Iterable]) -> "CliffordPoly":
        """Partially evaluate the listed variables at exact points."""
        m = self.dim
        points = {}
        for var, point in assignment.items():
            coords = [GaussianRational.coerce(c) for c in point]
            if len(coords) != m:
                raise DimensionMismatch(len(coords), m)
            points[var_offset(var, m)] = coords
        terms: dict[Key, GaussianRational] = {}
        for (exps, b), c in self.terms.items():
            new = list(exps)
            value = c
            for off, coords in points.items():
                for i in range(m):
                    n = exps[off + i]
                    if n:
                        value = value * coords[i] ** n
                        new[off + i] = 0
            key = (tuple(new), b)
            terms[key] = terms.get(key, ZERO) + value
        return CliffordPoly(m, terms)

    def evaluate(self, assignment: Mapping[str, Iterable]) -> Multivector:
        missing = self.variables() - set(assignment)
        if missing:
            raise UnknownVariable(f"Missing assignment for {sorted(missing)}")
        return self.substitute(assignment).constant_multivector()

    # serialization

    def sort_key(self, key: Key):
        exps, blade = key
        return (sum(exps), tuple(-e for e in exps), blade_grade(blade), blade_tuple(blade))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        names = [f"{var}{i + 1}" for var in VARIABLES for i in range(self.dim)]
        parts = []
        for key in sorted(self.terms, key=self.sort_key):
            exps, blade = key
            factors = [str(self.terms[key])]
            for name, n in zip(names, exps):
                if n == 1:
                    factors.append(name)
                elif n:
                    factors.append(f"{name}^{n}")
            if blade:
                factors.append("e" + "".join(str(i) for i in blade_tuple(blade)))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"CliffordPoly({self.dim}, {self.to_text()})"


def _rev_conj(mv: Multivector) -> Multivector:
    return complex_conjugate(reversion(mv))


def vector_poly(coords: Sequence) -> CliffordPoly:
    """Constant Clifford vector as a polynomial."""
    m = len(coords)
    return CliffordPoly.from_multivector(
        Multivector(m, {1 << i: GaussianRational.coerce(c) for i, c in enumerate(coords)})
    )


def linear_images(m: int, var: str, matrix: Sequence[Sequence], shift: Sequence | None = None):
    """Component polynomials of var -> matrix @ var + shift."""
    images = []
    for i in range(m):
        poly = CliffordPoly.zero(m)
        for j in range(m):
            if matrix[i][j]:
                poly = poly + CliffordPoly.variable(m, var, j + 1).scale(matrix[i][j])
        if shift is not None and shift[i]:
            poly = poly + CliffordPoly.constant(m, shift[i])
        images.append(poly)
    return images
