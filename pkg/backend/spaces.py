from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np
from loguru import logger

from backend import linalg
from backend.clifford_core import (
    ONE,
    ZERO,
    GaussianRational,
    Multivector,
    SymbolicConstant,
    omega,
    reversion,
    witt_and_idempotent,
)
from backend.config import Conjugation, SpaceKind
from backend.errors import NotInSpaceError, SamplePointError, SingularGramError
from backend.poly import CliffordPoly, var_offset


@dataclass(frozen=True)
class SpaceBasis:
    m: int
    k: int
    kind: SpaceKind
    elements: tuple[CliffordPoly, ...]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Kernel:
    """Z_k(u, v) = scale * poly(u, v)."""

    m: int
    k: int
    kind: SpaceKind
    scale: SymbolicConstant
    poly: CliffordPoly


def monomials(m: int, k: int, var: str = "u") -> list[tuple[int, ...]]:
    """Full exponent tuples of the degree-k monomials in var, in lex order."""
    off = var_offset(var, m)
    out = []
    for combo in combinations_with_replacement(range(m), k):
        exps = [0] * 3 * m
        for i in combo:
            exps[off + i] += 1
        out.append(tuple(exps))
    return sorted(out, reverse=True)


def harmonic_dimension(m: int, k: int) -> int:
    if k < 0:
        return 0
    low = comb(m + k - 3, k - 2) if k >= 2 else 0
    return comb(m + k - 1, k) - low


def _kernel_of(
    m: int,
    columns: list[tuple[tuple[int, ...], int]],
    operator,
    column_order: list[int] | None = None,
) -> list[CliffordPoly]:
    """Exact nullspace of a linear operator restricted to span(columns)."""
    order = column_order or list(range(len(columns)))
    row_index: dict = {}
    rows: list[dict[int, GaussianRational]] = []
    for col, source in enumerate(order):
        image = operator(CliffordPoly(m, {columns[source]: ONE}))
        for key, value in image.terms.items():
            if key not in row_index:
                row_index[key] = len(rows)
                rows.append({})
            rows[row_index[key]][col] = value
    basis = []
    for vector in linalg.nullspace(rows, len(order)):
        terms = {columns[order[c]]: v for c, v in enumerate(vector) if v}
        basis.append(CliffordPoly(m, terms))
    return basis


@lru_cache(maxsize=None)
def build_basis(m: int, k: int, kind: SpaceKind, var: str = "u") -> SpaceBasis:
    if k < 0:
        return SpaceBasis(m, k, kind, ())
    if kind is SpaceKind.HARMONIC_SCALAR:
        columns = [(exps, 0) for exps in monomials(m, k, var)]
        elements = _kernel_of(m, columns, lambda p: p.laplacian(var))
    else:
        # D_u maps even-blade coefficients to odd ones, so solve on the even
        # half and reach the odd half by right multiplication with e_1
        even = [b for b in range(1 << m) if b.bit_count() % 2 == 0]
        columns = [(exps, b) for exps in monomials(m, k, var) for b in even]
        even_part = _kernel_of(m, columns, lambda p: p.dirac_left(var))
        e1 = Multivector.basis_vector(m, 1)
        elements = even_part + [p.right_mul(e1) for p in even_part]
    logger.debug(f"Built {kind.value} basis m={m} k={k}: {len(elements)} elements")
    return SpaceBasis(m, k, kind, tuple(elements))


def rank_with_column_order(m: int, k: int, order_seed: int) -> int:
    """dim H_k recomputed from a shuffled monomial order."""
    columns = [(exps, 0) for exps in monomials(m, k)]
    rng = np.random.default_rng(order_seed)
    order = [int(i) for i in rng.permutation(len(columns))]
    return len(_kernel_of(m, columns, lambda p: p.laplacian("u"), order))


def _monomial_sphere_average(exps: tuple[int, ...], m: int) -> Fraction:
    """Integral of prod u_i^a_i over S^{m-1} in units of omega_{m-1}."""
    if any(a % 2 for a in exps):
        return Fraction(0)
    num = Fraction(1)
    for a in exps:
        for odd in range(1, a, 2):
            num *= odd
    den = Fraction(1)
    for j in range(sum(exps) // 2):
        den *= m + 2 * j
    return num / den


def sphere_integrate(
    p: CliffordPoly, var: str = "u", allow_parameters: bool = False
) -> CliffordPoly:
    """Integral over the unit sphere in `var`, returned in units of omega_{m-1}."""
    m = p.dim
    if not allow_parameters and p.variables() - {var}:
        raise NotInSpaceError(
            f"Variables {sorted(p.variables() - {var})} present in a sphere integral"
        )
    off = var_offset(var, m)
    terms: dict = {}
    for (exps, b), c in p.terms.items():
        weight = _monomial_sphere_average(exps[off : off + m], m)
        if not weight:
            continue
        rest = exps[:off] + (0,) * m + exps[off + m :]
        key = (rest, b)
        terms[key] = terms.get(key, ZERO) + c * weight
    return CliffordPoly(m, terms)


def fischer_inner(
    p: CliffordPoly,
    q: CliffordPoly,
    convention: Conjugation = Conjugation.CLIFFORD,
    var: str = "u",
) -> CliffordPoly:
    """(p, q) = integral of conj(p) q over the sphere, in units of omega_{m-1}."""
    return sphere_integrate(p.conjugate(convention) * q, var, allow_parameters=True)


def almansi_projection(f, k: int, var: str = "u"):
    """P_k f = f + var D_var f / (m + 2k - 2), on polynomials or radial functions."""
    n = f.dim + 2 * k - 2
    return f + f.dirac_left(var).vector_left_mul(var).scale(Fraction(1, n))


def almansi_split(h: CliffordPoly, k: int, var: str = "u") -> tuple[CliffordPoly, CliffordPoly]:
    """h = p_k + var * q with p_k in M_k and q in M_{k-1}."""
    if not h.is_homogeneous(var, k):
        raise NotInSpaceError(f"Input is not homogeneous of degree {k}")
    if h.laplacian(var):
        raise NotInSpaceError("Input is not harmonic")
    n = h.dim + 2 * k - 2
    dh = h.dirac_left(var)
    q = dh.scale(Fraction(-1, n))
    p = h - q.vector_left_mul(var)
    return p, q


def monogenic_generators(m: int, k: int, var: str = "u") -> list[CliffordPoly]:
    """P_k applied to the scalar harmonic basis; spans M_k as a right Cl_m-module."""
    harmonic = build_basis(m, k, SpaceKind.HARMONIC_SCALAR, var)
    return [almansi_projection(h, k, var) for h in harmonic.elements]


def gram_matrix(elements, convention: Conjugation = Conjugation.CLIFFORD):
    return [
        [fischer_inner(a, b, convention).constant_multivector().scalar_part() for b in elements]
        for a in elements
    ]


@lru_cache(maxsize=None)
def reproducing_kernel(m: int, k: int, kind: SpaceKind) -> Kernel:
    """Gram-built harmonic kernel; the monogenic one is its Almansi projection in u."""
    basis = build_basis(m, k, SpaceKind.HARMONIC_SCALAR)
    gram = gram_matrix(basis.elements)
    try:
        gram_inv = linalg.inverse(gram)
    except SingularGramError as exc:
        raise SingularGramError(f"Gram matrix of H_{k}(R^{m}) is singular") from exc
    poly = CliffordPoly.zero(m)
    in_v = [b.rename("u", "v") for b in basis.elements]
    for i, bi in enumerate(basis.elements):
        left = bi.conjugate(Conjugation.CLIFFORD)
        for j, bj in enumerate(in_v):
            if gram_inv[i][j]:
                poly = poly + (left * bj).scale(gram_inv[i][j])
    if kind is SpaceKind.MONOGENIC_CLIFFORD:
        poly = almansi_projection(poly, k, "u")
    logger.debug(f"Kernel {kind.value} m={m} k={k}: {len(poly)} terms")
    return Kernel(m, k, kind, omega(m).inverse(), poly)


def reproduces(kernel: Kernel, f: CliffordPoly, convention: Conjugation) -> bool:
    """f(v) == integral of conj(Z(u, v)) f(u) dS(u), exactly."""
    integral = fischer_inner(kernel.poly, f, convention)
    total = kernel.scale * omega(kernel.m)
    if total.pi_power:
        return False
    return integral.scale(total.coeff) == f.rename("u", "v")


def check_elements(m: int, k: int, kind: SpaceKind) -> list[CliffordPoly]:
    if kind is SpaceKind.HARMONIC_SCALAR:
        return list(build_basis(m, k, kind).elements)
    return monogenic_generators(m, k)


def reproducing_report(m: int, k: int, kind: SpaceKind) -> dict[str, bool]:
    """Which conjugation conventions make the kernel reproduce every test element."""
    kernel = reproducing_kernel(m, k, kind)
    elements = check_elements(m, k, kind)
    return {
        conv.value: all(reproduces(kernel, f, conv) for f in elements)
        for conv in Conjugation
    }


def swap_uv(p: CliffordPoly) -> CliffordPoly:
    if "x" in p.variables():
        raise NotInSpaceError("swap_uv needs x-free polynomials")
    return p.rename("u", "x").rename("v", "u").rename("x", "v")


def hermitian_symmetric(kernel: Kernel) -> bool:
    return swap_uv(kernel.poly).conjugate(Conjugation.CLIFFORD) == kernel.poly


def highest_weight(m: int, k: int, kind: SpaceKind, var: str = "u") -> CliffordPoly:
    """<var, 2 f_1>^k, times the spinor idempotent I for the monogenic kind."""
    base = CliffordPoly.variable(m, var, 1) - CliffordPoly.variable(m, var, 2).scale(
        GaussianRational(0, 1)
    )
    result = CliffordPoly.constant(m)
    for _ in range(k):
        result = result * base
    if kind is SpaceKind.MONOGENIC_CLIFFORD:
        result = result.right_mul(witt_and_idempotent(m).idempotent)
    return result


def random_combination(elements, seed: int, low: int = -3, high: int = 3) -> CliffordPoly:
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(low, high + 1, size=len(elements))
    if not coeffs.any():
        coeffs[0] = 1
    m = elements[0].dim
    total = CliffordPoly.zero(m)
    for c, element in zip(coeffs, elements):
        if c:
            total = total + element.scale(int(c))
    return total


def random_monogenic(m: int, k: int, seed: int) -> CliffordPoly:
    """Random element of M_k: generators with random Clifford right factors."""
    rng = np.random.default_rng(seed)
    total = CliffordPoly.zero(m)
    for g in monogenic_generators(m, k):
        blade = int(rng.integers(0, 1 << m))
        c = int(rng.integers(-3, 4))
        if c:
            total = total + g.right_mul(Multivector(m, {blade: GaussianRational(c)}))
    if not total:
        total = monogenic_generators(m, k)[0]
    return total


def _kernel_at(kernel: Kernel, u, v) -> Multivector:
    return kernel.poly.evaluate({"u": u, "v": v})


def reflection_sign(kernel: Kernel, samples) -> int | None:
    """epsilon with Z(u,v) = eps Z(rho u, rho v) (harmonic) or eps x Z(rho u, rho v) x / ||x||^2.

    rho is the reflection w -> x w x / ||x||^2. Returns None when the samples
    show no consistent proportionality.
    """
    m = kernel.m
    signs = set()
    for x, u, v in samples:
        xv = Multivector(m, {1 << i: GaussianRational.coerce(c) for i, c in enumerate(x)})
        r2 = sum(GaussianRational.coerce(c) * GaussianRational.coerce(c) for c in x)
        if not r2:
            raise SamplePointError("Reflection direction must be nonzero")
        ru = _reflect_coords(xv, u, r2)
        rv = _reflect_coords(xv, v, r2)
        original = _kernel_at(kernel, u, v)
        reflected = _kernel_at(kernel, ru, rv)
        if kernel.kind is SpaceKind.MONOGENIC_CLIFFORD:
            reflected = (xv * reflected * xv).scale(ONE / r2)
        if original.is_zero() and reflected.is_zero():
            continue
        if original == reflected:
            signs.add(1)
        elif original == -reflected:
            signs.add(-1)
        else:
            return None
    if len(signs) != 1:
        return None
    return signs.pop()


def _reflect_coords(xv: Multivector, w, r2: GaussianRational) -> tuple:
    m = xv.dim
    wv = Multivector(m, {1 << i: GaussianRational.coerce(c) for i, c in enumerate(w)})
    image = (xv * wv * xv).scale(ONE / r2)
    return image.vector_coords()


def rotation_invariant(kernel: Kernel, s: Multivector, samples) -> bool:
    """Z(s u s~, s v s~) equals Z(u, v) (harmonic) or s Z(u, v) s~ (monogenic)."""
    s_rev = reversion(s)
    m = kernel.m
    for u, v in samples:
        uu = Multivector(m, {1 << i: GaussianRational.coerce(c) for i, c in enumerate(u)})
        vv = Multivector(m, {1 << i: GaussianRational.coerce(c) for i, c in enumerate(v)})
        rotated = _kernel_at(kernel, (s * uu * s_rev).vector_coords(), (s * vv * s_rev).vector_coords())
        expected = _kernel_at(kernel, u, v)
        if kernel.kind is SpaceKind.MONOGENIC_CLIFFORD:
            expected = s * expected * s_rev
        if rotated != expected:
            return False
    return True


def sample_function(
    m: int, k: int, kind: SpaceKind, seed: int, x_degree: int = 2, min_degree: int = 0
) -> CliffordPoly:
    """Random test function sum_i p_i(x) q_i(u), q_i in the target space, min_degree <= deg p_i <= x_degree."""
    rng = np.random.default_rng(seed)
    total = CliffordPoly.zero(m)
    for index in range(3):
        degree = int(rng.integers(min(min_degree, x_degree), x_degree + 1))
        choices = monomials(m, degree, "x")
        exps = choices[int(rng.integers(0, len(choices)))]
        monomial = CliffordPoly(m, {(exps, 0): ONE})
        if kind is SpaceKind.HARMONIC_SCALAR:
            q = random_combination(build_basis(m, k, kind).elements, seed * 7 + index)
        else:
            q = random_monogenic(m, k, seed * 7 + index)
        total = total + monomial * q
    if not total:
        total = CliffordPoly.variable(m, "x", 1) * first_vector(m, k, kind)
    return total


def first_vector(m: int, k: int, kind: SpaceKind) -> CliffordPoly:
    if kind is SpaceKind.HARMONIC_SCALAR:
        return build_basis(m, k, kind).elements[0]
    return monogenic_generators(m, k)[0]
