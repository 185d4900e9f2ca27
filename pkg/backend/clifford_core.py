from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt, pi
from typing import Iterable, Union

from backend.errors import DimensionMismatch, EngineError

Rational = Union[int, Fraction]


class GaussianRational:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(value)

    def __add__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero in Q(i)")
        if not other.im:
            return GaussianRational(self.re / other.re, self.im / other.re)
        norm = other.re * other.re + other.im * other.im
        return self * GaussianRational(other.re / norm, -other.im / norm)

    def __rtruediv__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int) -> "GaussianRational":
        if n < 0:
            return GaussianRational(1) / (self**-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        try:
            other = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_real(self) -> bool:
        return not self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


def blade_tuple(blade: int) -> tuple[int, ...]:
    """Ascending generator indices (1-based) of a bitmask blade."""
    return tuple(i + 1 for i in range(blade.bit_length()) if blade >> i & 1)


def blade_from_indices(indices: Iterable[int]) -> tuple[int, int]:
    """Reduce a word e_{i1}...e_{ir} to (sign, bitmask blade)."""
    sign, blade = 1, 0
    for index in indices:
        step, blade = blade_product(blade, 1 << (index - 1))
        sign *= step
    return sign, blade


def blade_grade(blade: int) -> int:
    return blade.bit_count()


@lru_cache(maxsize=None)
def blade_product(a: int, b: int) -> tuple[int, int]:
    """Sign and blade of e_A e_B with e_i^2 = -1."""
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += (shifted & b).bit_count()
        shifted >>= 1
    # every shared generator contributes e_i e_i = -1
    swaps += (a & b).bit_count()
    return (-1 if swaps & 1 else 1), a ^ b


def reversion_sign(blade: int) -> int:
    r = blade.bit_count()
    return -1 if (r * (r - 1) // 2) & 1 else 1


def involution_sign(blade: int) -> int:
    return -1 if blade.bit_count() & 1 else 1


class Multivector:
    """Immutable element of Cl_m(C) stored as a sparse blade map."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[int, GaussianRational] | None = None):
        self.dim = dim
        self.terms = {b: c for b, c in (terms or {}).items() if c}

    @classmethod
    def scalar(cls, dim: int, value=1) -> "Multivector":
        return cls(dim, {0: GaussianRational.coerce(value)})

    @classmethod
    def basis_vector(cls, dim: int, i: int) -> "Multivector":
        if not 1 <= i <= dim:
            raise EngineError(f"Generator e_{i} outside dimension {dim}")
        return cls(dim, {1 << (i - 1): ONE})

    @classmethod
    def blade(cls, dim: int, indices: Iterable[int], value=1) -> "Multivector":
        sign, blade = blade_from_indices(indices)
        return cls(dim, {blade: GaussianRational.coerce(value) * sign})

    def _check(self, other: "Multivector") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(self.dim, other.dim)

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        terms = dict(self.terms)
        for blade, coeff in other.terms.items():
            terms[blade] = terms.get(blade, ZERO) + coeff
        return Multivector(self.dim, terms)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, {b: -c for b, c in self.terms.items()})

    def __mul__(self, other) -> "Multivector":
        if not isinstance(other, Multivector):
            return self.scale(other)
        return geometric_product(self, other)

    def __rmul__(self, other) -> "Multivector":
        return self.scale(other)

    def scale(self, value) -> "Multivector":
        value = GaussianRational.coerce(value)
        return Multivector(self.dim, {b: c * value for b, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self) -> GaussianRational:
        return self.terms.get(0, ZERO)

    def grades(self) -> set[int]:
        return {blade_grade(b) for b in self.terms}

    def grade_part(self, r: int) -> "Multivector":
        return Multivector(
            self.dim, {b: c for b, c in self.terms.items() if blade_grade(b) == r}
        )

    def vector_coords(self) -> tuple[GaussianRational, ...]:
        if self.grades() - {1}:
            raise EngineError(f"Not a vector: grades {sorted(self.grades())}")
        return tuple(self.terms.get(1 << i, ZERO) for i in range(self.dim))

    def __repr__(self) -> str:
        return f"Multivector({self.dim}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for blade in sorted(self.terms, key=lambda b: (blade_grade(b), blade_tuple(b))):
            coeff = self.terms[blade]
            name = "e" + "".join(str(i) for i in blade_tuple(blade)) if blade else ""
            parts.append(f"{coeff}{'*' + name if name else ''}")
        return " + ".join(parts)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    terms: dict[int, GaussianRational] = {}
    for blade_a, coeff_a in a.terms.items():
        for blade_b, coeff_b in b.terms.items():
            sign, blade = blade_product(blade_a, blade_b)
            value = coeff_a * coeff_b
            terms[blade] = terms.get(blade, ZERO) + (value if sign > 0 else -value)
    return Multivector(a.dim, terms)


def reversion(a: Multivector) -> Multivector:
    return Multivector(
        a.dim,
        {b: (c if reversion_sign(b) > 0 else -c) for b, c in a.terms.items()},
    )


def grade_involution(a: Multivector) -> Multivector:
    return Multivector(
        a.dim,
        {b: (c if involution_sign(b) > 0 else -c) for b, c in a.terms.items()},
    )


def complex_conjugate(a: Multivector) -> Multivector:
    return Multivector(a.dim, {b: c.conjugate() for b, c in a.terms.items()})


def clifford_conjugate(a: Multivector) -> Multivector:
    """Reversion composed with the grade involution and complex conjugation."""
    return Multivector(
        a.dim,
        {
            b: (c.conjugate() if reversion_sign(b) * involution_sign(b) > 0 else -c.conjugate())
            for b, c in a.terms.items()
        },
    )


def vector_embed(coords: Iterable) -> Multivector:
    coords = [GaussianRational.coerce(c) for c in coords]
    return Multivector(len(coords), {1 << i: c for i, c in enumerate(coords)})


def inner(a: Iterable, b: Iterable) -> GaussianRational:
    """Bilinear (unconjugated) Euclidean pairing of coordinate tuples."""
    total = ZERO
    for x, y in zip(a, b):
        total = total + GaussianRational.coerce(x) * GaussianRational.coerce(y)
    return total


def norm_squared(coords: Iterable) -> GaussianRational:
    coords = list(coords)
    return inner(coords, coords)


def exact_sqrt(value) -> Fraction | None:
    """Rational square root of a non-negative rational, or None."""
    value = GaussianRational.coerce(value)
    if value.im or value.re < 0:
        return None
    num, den = value.re.numerator, value.re.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Fraction(rn, rd)


def reflect(a: Multivector, x: Multivector) -> Multivector:
    """The sandwich a x a, a reflection of x scaled by -||a||^2."""
    return a * x * a


@dataclass(frozen=True)
class WittBasis:
    f: tuple[Multivector, ...]
    f_dagger: tuple[Multivector, ...]
    idempotent: Multivector


@lru_cache(maxsize=None)
def witt_and_idempotent(m: int) -> WittBasis:
    if m < 2:
        raise EngineError(f"Witt basis needs m >= 2, got {m}")
    half = GaussianRational(Fraction(1, 2))
    f, f_dagger = [], []
    idempotent = Multivector.scalar(m)
    for j in range(1, m // 2 + 1):
        odd = Multivector.basis_vector(m, 2 * j - 1)
        even = Multivector.basis_vector(m, 2 * j)
        fj = (odd - even.scale(I_UNIT)).scale(half)
        fj_dagger = (odd + even.scale(I_UNIT)).scale(-half)
        f.append(fj)
        f_dagger.append(fj_dagger)
        idempotent = idempotent * fj * fj_dagger
    return WittBasis(tuple(f), tuple(f_dagger), idempotent)


class SymbolicConstant:
    """A number coeff * pi**pi_power with a half-integer pi_power."""

    __slots__ = ("coeff", "pi_power")

    def __init__(self, coeff=1, pi_power: Rational = 0):
        self.coeff = GaussianRational.coerce(coeff)
        self.pi_power = Fraction(pi_power)
        if self.pi_power.denominator not in (1, 2):
            raise EngineError(f"pi power {self.pi_power} is not a half-integer")
        if not self.coeff:
            self.pi_power = Fraction(0)

    def __mul__(self, other) -> "SymbolicConstant":
        if isinstance(other, SymbolicConstant):
            return SymbolicConstant(self.coeff * other.coeff, self.pi_power + other.pi_power)
        return SymbolicConstant(self.coeff * GaussianRational.coerce(other), self.pi_power)

    __rmul__ = __mul__

    def inverse(self) -> "SymbolicConstant":
        return SymbolicConstant(ONE / self.coeff, -self.pi_power)

    def __truediv__(self, other) -> "SymbolicConstant":
        if isinstance(other, SymbolicConstant):
            return self * other.inverse()
        return SymbolicConstant(self.coeff / GaussianRational.coerce(other), self.pi_power)

    def __neg__(self) -> "SymbolicConstant":
        return SymbolicConstant(-self.coeff, self.pi_power)

    def __add__(self, other: "SymbolicConstant") -> "SymbolicConstant":
        if not other.coeff:
            return self
        if not self.coeff:
            return other
        if self.pi_power != other.pi_power:
            raise EngineError(
                f"Cannot add pi^{self.pi_power} and pi^{other.pi_power} exactly"
            )
        return SymbolicConstant(self.coeff + other.coeff, self.pi_power)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicConstant):
            return NotImplemented
        return self.coeff == other.coeff and self.pi_power == other.pi_power

    def __hash__(self) -> int:
        return hash((self.coeff, self.pi_power))

    def to_float(self) -> float:
        return float(self.coeff.re) * pi ** float(self.pi_power)

    def __str__(self) -> str:
        if not self.pi_power:
            return str(self.coeff)
        return f"{self.coeff}*pi^({self.pi_power})"

    def __repr__(self) -> str:
        return f"SymbolicConstant({self})"


def gamma_half(n: int) -> SymbolicConstant:
    """Gamma(n/2) for a positive integer n."""
    if n <= 0:
        raise EngineError(f"Gamma(n/2) requires n > 0, got {n}")
    if n % 2 == 0:
        value = Fraction(1)
        for i in range(1, n // 2):
            value *= i
        return SymbolicConstant(value, 0)
    value = Fraction(1)
    half = Fraction(n, 2) - 1
    while half > 0:
        value *= half
        half -= 1
    return SymbolicConstant(value, Fraction(1, 2))


def omega(m: int) -> SymbolicConstant:
    """Area of the unit sphere in R^m."""
    return SymbolicConstant(2, Fraction(m, 2)) / gamma_half(m)
