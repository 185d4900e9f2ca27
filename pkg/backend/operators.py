"""Differential operators as sums of primitive words, and the constant table."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from loguru import logger

from backend.clifford_core import ONE, GaussianRational, SymbolicConstant, gamma_half, omega
from backend.config import BForm, SpaceKind
from backend.errors import BudgetExceeded, EngineError, PoleError

# name -> action on a CliffordPoly or RadialFn
PRIMITIVES: dict[str, Callable] = {
    "lap_x": lambda f: f.laplacian("x"),
    "dirac_x": lambda f: f.dirac_left("x"),
    "dirac_u": lambda f: f.dirac_left("u"),
    "vec_u": lambda f: f.vector_left_mul("u"),
    "u_dx": lambda f: f.pair("u", "x"),
    "du_dx": lambda f: f.pair_dd("u", "x"),
    "normsq_u": lambda f: f.norm_sq_mul("u"),
}

Word = tuple[str, ...]
Sum = tuple[tuple[GaussianRational, Word], ...]


def _size(f) -> int:
    return f.term_count() if hasattr(f, "term_count") else len(f)


def apply_word(word: Word, f):
    for name in reversed(word):
        f = PRIMITIVES[name](f)
    return f


def combine(*pieces: tuple) -> Sum:
    """Collect (coefficient, word) pairs, merging equal words."""
    collected: dict[Word, GaussianRational] = {}
    for coef, word in pieces:
        coef = GaussianRational.coerce(coef)
        collected[word] = collected.get(word, GaussianRational(0)) + coef
    return tuple((c, w) for w, c in collected.items() if c)


def compose_sums(left: Sum, right: Sum) -> Sum:
    return combine(*((a * b, wa + wb) for a, wa in left for b, wb in right))


def scale_sum(terms: Sum, value) -> Sum:
    value = GaussianRational.coerce(value)
    return tuple((c * value, w) for c, w in terms)


def add_sums(*sums: Sum) -> Sum:
    return combine(*(piece for s in sums for piece in s))


def sum_to_text(terms: Sum) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{c}*[{' '.join(w) or 'id'}]" for c, w in terms)


@dataclass(frozen=True)
class OperatorPipeline:
    """Product of operator sums; the rightmost factor acts first."""

    name: str
    m: int
    k: int
    order: int
    factors: tuple[Sum, ...]
    expanded: Sum = field(default=(), compare=False)

    @classmethod
    def build(cls, name: str, m: int, k: int, order: int, factors) -> "OperatorPipeline":
        factors = tuple(factors)
        expanded: Sum = ((ONE, ()),)
        for factor in factors:
            expanded = compose_sums(expanded, factor)
        logger.debug(f"Built {name} m={m} k={k}: {len(factors)} factors, {len(expanded)} words")
        return cls(name, m, k, order, factors, expanded)

    def apply(self, f, budget: int | None = None):
        for factor in reversed(self.factors):
            f = apply_sum(factor, f, budget)
        return f

    def apply_expanded(self, f, budget: int | None = None):
        return apply_sum(self.expanded, f, budget)

    def __matmul__(self, other: "OperatorPipeline") -> "OperatorPipeline":
        return OperatorPipeline.build(
            f"{self.name}*{other.name}",
            self.m,
            self.k,
            self.order + other.order,
            self.factors + other.factors,
        )

    def to_text(self) -> str:
        return " . ".join(f"({sum_to_text(f)})" for f in self.factors)


def apply_sum(terms: Sum, f, budget: int | None = None):
    total = None
    for coef, word in terms:
        piece = apply_word(word, f).scale(coef)
        total = piece if total is None else total + piece
        if budget is not None and _size(total) > budget:
            raise BudgetExceeded(_size(total), budget)
    if total is None:
        return f.scale(0)
    return total


def _n(m: int, k: int) -> int:
    return m + 2 * k - 2


def _require(value, expression: str, **params) -> None:
    if value == 0:
        raise PoleError(expression, params)


# building blocks as sums

LAPLACE: Sum = ((ONE, ("lap_x",)),)
DIRAC: Sum = ((ONE, ("dirac_x",)),)
L1: Sum = ((ONE, ("normsq_u", "du_dx", "du_dx")),)
L2: Sum = ((ONE, ("vec_u", "du_dx", "dirac_x")),)
L3: Sum = ((ONE, ("u_dx", "du_dx")),)


def projection_sum(m: int, k: int) -> Sum:
    """P_k = 1 + u D_u / (m + 2k - 2)."""
    return combine((ONE, ()), (Fraction(1, _n(m, k)), ("vec_u", "dirac_u")))


def rarita_schwinger_sum(m: int, k: int) -> Sum:
    return compose_sums(projection_sum(m, k), DIRAC)


def dual_twistor_sum(m: int, k: int) -> Sum:
    """T_k* = (1 - P_k) D_x = -u D_u D_x / (m + 2k - 2)."""
    return ((GaussianRational(Fraction(-1, _n(m, k))), ("vec_u", "dirac_u", "dirac_x")),)


def twistor_sum(m: int, k: int) -> Sum:
    """T_k = P_k D_x, acting on the u M_{k-1} component."""
    return rarita_schwinger_sum(m, k)


def laplace_sum(m: int, k: int) -> Sum:
    """D_2 = Delta - 4 <u,D_x><D_u,D_x>/N + 4 ||u||^2 <D_u,D_x>^2 / (N (N - 2))."""
    if k == 0:
        return LAPLACE
    n = _n(m, k)
    _require(n - 2, "m+2k-4", m=m, k=k)
    return add_sums(
        LAPLACE,
        scale_sum(L3, Fraction(-4, n)),
        scale_sum(L1, Fraction(4, n * (n - 2))),
    )


def laplace_twistor_sum(m: int, k: int) -> Sum:
    """D_2 = Delta - 4 T_{k,2} T_{k,2}* / N with the second order twistor pair."""
    n = _n(m, k)
    _require(m + 2 * k - 4, "m+2k-4", m=m, k=k)
    t2 = combine((ONE, ("u_dx",)), (Fraction(-1, m + 2 * k - 4), ("normsq_u", "du_dx")))
    t2_dual: Sum = ((ONE, ("du_dx",)),)
    return add_sums(LAPLACE, scale_sum(compose_sums(t2, t2_dual), Fraction(-4, n)))


def shift_coefficient(m: int, k: int, s: int) -> Fraction:
    """(2s)(2s-2) / ((m+2k-2)(m+2k-4)), the Delta weight in the s-th bosonic factor."""
    n = _n(m, k)
    _require(n * (n - 2), "(m+2k-2)(m+2k-4)", m=m, k=k)
    return Fraction(2 * s * (2 * s - 2), n * (n - 2))


def bosonic_factor(m: int, k: int, s: int) -> Sum:
    return add_sums(laplace_sum(m, k), scale_sum(LAPLACE, -shift_coefficient(m, k, s)))


def b_denominator(m: int, k: int, s: int) -> int:
    n = _n(m, k)
    return (n - 2 * s) * (n + 2 * s)


def b_coefficients(m: int, k: int, s: int) -> dict[str, Fraction]:
    """a, b, c, d of B_{2s} at beta = m - 2s."""
    beta = m - 2 * s
    big_a = 2 * m - beta + 2 * k - 2
    low = beta + 2 * k - 2
    _require(big_a * low, "(2m-beta+2k-2)(beta+2k-2)", m=m, k=k, s=s)
    gamma = beta + 2 * k
    d = (
        gamma * (gamma - m)
        + 2 * k * (m - 2 * beta - 2 * k - 2)
        + Fraction(4 * k * (m + 2 * k - 2), low)
    )
    return {
        "a": Fraction(4, big_a * low),
        "b": Fraction(-4 * (m + 2 * k - 2), big_a * low),
        "c": Fraction(-4, big_a * low),
        "d": Fraction(d),
    }


def b_sum(m: int, k: int, s: int, form: BForm) -> Sum:
    n = _n(m, k)
    den = b_denominator(m, k, s)
    _require(den, "(m+2k-2s-2)(m+2k+2s-2)", m=m, k=k, s=s)
    if form is BForm.COEFFICIENT:
        coef = b_coefficients(m, k, s)
        return add_sums(
            LAPLACE,
            scale_sum(L1, coef["a"]),
            scale_sum(L3, coef["b"]),
            scale_sum(L2, coef["c"]),
        )
    r_squared = compose_sums(rarita_schwinger_sum(m, k), rarita_schwinger_sum(m, k))
    if form is BForm.RK_DELTA:
        return add_sums(LAPLACE, scale_sum(add_sums(r_squared, LAPLACE), Fraction(-n * n, den)))
    tt = compose_sums(twistor_sum(m, k), dual_twistor_sum(m, k))
    return add_sums(scale_sum(r_squared, -1), scale_sum(tt, Fraction(4 * s * s, den)))


def rk_squared_expansion_sum(m: int, k: int) -> Sum:
    n = _n(m, k)
    return add_sums(
        scale_sum(LAPLACE, -1),
        scale_sum(L3, Fraction(4, n)),
        scale_sum(L1, Fraction(-4, n * n)),
        scale_sum(L2, Fraction(4, n * n)),
    )


# pipeline constructors


def make_dirac_power(m: int, k: int, order: int) -> OperatorPipeline:
    return OperatorPipeline.build(f"dirac^{order}", m, k, order, [DIRAC] * order)


def make_rarita_schwinger(m: int, k: int) -> OperatorPipeline:
    return OperatorPipeline.build("rarita_schwinger", m, k, 1, [rarita_schwinger_sum(m, k)])


def make_twistor(m: int, k: int) -> OperatorPipeline:
    return OperatorPipeline.build("twistor", m, k, 1, [twistor_sum(m, k)])


def make_dual_twistor(m: int, k: int) -> OperatorPipeline:
    return OperatorPipeline.build("dual_twistor", m, k, 1, [dual_twistor_sum(m, k)])


def make_higher_spin_laplace(m: int, k: int, twistor_form: bool = False) -> OperatorPipeline:
    if twistor_form and k:
        return OperatorPipeline.build("higher_spin_laplace", m, k, 2, [laplace_twistor_sum(m, k)])
    return OperatorPipeline.build("higher_spin_laplace", m, k, 2, [laplace_sum(m, k)])


def make_bosonic(m: int, k: int, j: int) -> OperatorPipeline:
    if j < 1:
        raise EngineError(f"Bosonic order index must be >= 1, got {j}")
    factors = [laplace_sum(m, k)] + [bosonic_factor(m, k, s) for s in range(2, j + 1)]
    return OperatorPipeline.build(f"bosonic_{2 * j}", m, k, 2 * j, factors)


def make_B(m: int, k: int, s: int, form: BForm = BForm.COEFFICIENT) -> OperatorPipeline:
    return OperatorPipeline.build(f"B_{2 * s}[{form.value}]", m, k, 2, [b_sum(m, k, s, form)])


def make_fermionic(m: int, k: int, j: int, form: BForm = BForm.TWISTOR) -> OperatorPipeline:
    if j < 1:
        raise EngineError(f"Fermionic order index must be >= 1, got {j}")
    factors = [rarita_schwinger_sum(m, k)] + [b_sum(m, k, s, form) for s in range(1, j)]
    return OperatorPipeline.build(f"fermionic_{2 * j - 1}", m, k, 2 * j - 1, factors)


def make_operator(m: int, k: int, order: int) -> OperatorPipeline:
    """D_order: bosonic for even orders, fermionic for odd ones."""
    if order % 2:
        return make_fermionic(m, k, (order + 1) // 2)
    return make_bosonic(m, k, order // 2)


def make_rk_squared_expansion(m: int, k: int) -> OperatorPipeline:
    return OperatorPipeline.build("rk_squared_expansion", m, k, 2, [rk_squared_expansion_sum(m, k)])


REGISTRY: dict[str, Callable[..., OperatorPipeline]] = {
    "dirac_power": make_dirac_power,
    "rarita_schwinger": make_rarita_schwinger,
    "twistor": make_twistor,
    "dual_twistor": make_dual_twistor,
    "higher_spin_laplace": make_higher_spin_laplace,
    "bosonic": make_bosonic,
    "fermionic": make_fermionic,
    "B": make_B,
    "rk_squared_expansion": make_rk_squared_expansion,
}


def build_operator(name: str, **params) -> OperatorPipeline:
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise EngineError(f"Unknown operator {name!r}, expected one of {sorted(REGISTRY)}")
    return builder(**params)


def rk_squared_expansion_check(m: int, k: int, functions) -> bool:
    """R_k R_k agrees with its four-term expansion on M_k-valued inputs."""
    square = make_rarita_schwinger(m, k) @ make_rarita_schwinger(m, k)
    expansion = make_rk_squared_expansion(m, k)
    return all(square.apply(f) == expansion.apply(f) for f in functions)


def preserves_target_space(pipeline: OperatorPipeline, kind: SpaceKind, functions) -> bool:
    for f in functions:
        out = pipeline.apply(f)
        image = out.laplacian("u") if kind is SpaceKind.HARMONIC_SCALAR else out.dirac_left("u")
        if image:
            return False
    return True


# constant table


def c_k1(m: int, k: int) -> Fraction:
    return Fraction(m - 2, _n(m, k))


def c_alpha_printed(m: int, k: int, alpha: int) -> Fraction:
    n = _n(m, k)
    _require(n * (n - 2), "(m+2k-2)(m+2k-4)", m=m, k=k)
    bracket = (alpha - 2 * k) * (alpha - 2 * k - 2) + 2 * k * (m + 2 * alpha - 2 * k - 4)
    return Fraction(-(m + alpha) * (m + alpha - 2) * bracket, n * (n - 2))


def c_alpha_derived(m: int, k: int, alpha: int) -> Fraction:
    """Eigenvalue of D_2 - mu Delta on ||x||^alpha H_k(xux/||x||^2) by direct expansion."""
    n = _n(m, k)
    _require(n * (n - 2), "(m+2k-2)(m+2k-4)", m=m, k=k)
    mu = Fraction((m + alpha) * (m + alpha - 2), n * (n - 2))
    d2_part = (m + alpha - 2) * (alpha + Fraction(4 * k, n))
    delta_part = alpha * (alpha + m - 2) - 4 * k
    return d2_part - mu * delta_part


def a_2(m: int, k: int) -> SymbolicConstant:
    """(m+2k-4) Gamma(m/2-1) / (4 (4-m) pi^(m/2)), continued to -Gamma(1)/(4 pi^2) at m=4, k=0."""
    if m == 4:
        if k:
            raise PoleError("4-m", {"m": m, "k": k})
        ratio = Fraction(-1)
    else:
        ratio = Fraction(m + 2 * k - 4, 4 - m)
    return gamma_half(m - 2) * SymbolicConstant(ratio / 4, Fraction(-m, 2))


def a_2j(m: int, k: int, j: int, derived: bool = False) -> SymbolicConstant:
    c = c_alpha_derived if derived else c_alpha_printed
    value = a_2(m, k)
    for s in range(2, j + 1):
        cs = c(m, k, 2 * s - m)
        _require(cs, "c_{2s}", m=m, k=k, s=s)
        value = value / cs
    return value


def e_k1(m: int, k: int, derived: bool = True) -> SymbolicConstant:
    """Normalization of the R_k fundamental solution; the derived sign is negative."""
    value = omega(m).inverse() / c_k1(m, k)
    return -value if derived else value


def lambda_2j(m: int, k: int, j: int) -> SymbolicConstant:
    value = e_k1(m, k, derived=True)
    for s in range(1, j):
        d = b_coefficients(m, k, s)["d"]
        _require(d, "d_{2s}", m=m, k=k, s=s)
        value = value / d
    return value


def mu_s(m: int, k: int, s: int) -> Fraction:
    return shift_coefficient(m, k, s)


CONSTANTS: dict[str, Callable] = {
    "c_k1": c_k1,
    "c_alpha": c_alpha_printed,
    "c_alpha_derived": c_alpha_derived,
    "a_2j": a_2j,
    "a_2j_derived": lambda m, k, j: a_2j(m, k, j, derived=True),
    "B_coefficients": b_coefficients,
    "lambda_2j": lambda_2j,
    "E_k1": e_k1,
    "E_k1_printed": lambda m, k: e_k1(m, k, derived=False),
    "E_k2": a_2,
    "mu_s": mu_s,
}


def constants(name: str, **params):
    try:
        fn = CONSTANTS[name]
    except KeyError:
        raise EngineError(f"Unknown constant {name!r}, expected one of {sorted(CONSTANTS)}")
    return fn(**params)
