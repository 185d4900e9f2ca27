"""Inner-product forms of the two Stein-Weiss gradient statements."""

from fractions import Fraction

from backend import linalg
from backend.clifford_core import ONE, Multivector, witt_and_idempotent
from backend.config import Conjugation, SpaceKind
from backend.errors import NotInSpaceError
from backend.identities import CheckResult
from backend.operators import make_rarita_schwinger
from backend.poly import CliffordPoly
from backend.spaces import almansi_split, build_basis, fischer_inner


def gradient(f: CliffordPoly) -> list[CliffordPoly]:
    return [f.partial("x", i) for i in range(1, f.dim + 1)]


def scalar_pairing(a: CliffordPoly, b: CliffordPoly) -> CliffordPoly:
    """Sc(conj(a) b), pointwise in the remaining variables."""
    return (a.conjugate(Conjugation.CLIFFORD) * b).blade_part(0)


def spinor_basis(m: int) -> list[Multivector]:
    """A basis of the left ideal Cl_m I."""
    idem = witt_and_idempotent(m).idempotent
    images = [Multivector(m, {blade: ONE}) * idem for blade in range(1 << m)]
    rows = [[img.terms.get(b, 0) for b in range(1 << m)] for img in images]
    chosen, basis = [], []
    for img, row in zip(images, rows):
        if linalg.rank(chosen + [row], 1 << m) > len(chosen):
            chosen.append(row)
            basis.append(img)
    return basis


def gradient_pairing(f: CliffordPoly, omega: Multivector) -> CliffordPoly:
    """sum_i (d_i f, e_i omega)."""
    m = f.dim
    total = CliffordPoly.zero(m)
    for i, part in enumerate(gradient(f), start=1):
        target = CliffordPoly.from_multivector(Multivector.basis_vector(m, i) * omega)
        total = total + scalar_pairing(part, target)
    return total


def dirac_duality_check(m: int, f: CliffordPoly) -> CheckResult:
    """sum_i (d_i f, e_i w) vanishes for every spinor w exactly when D_x f = 0."""
    dirac = f.dirac_left("x")
    details = {"monogenic": not dirac}
    pairings_vanish = True
    for omega in spinor_basis(m):
        pairing = gradient_pairing(f, omega)
        moved = -scalar_pairing(dirac, CliffordPoly.from_multivector(omega))
        if pairing != moved:
            details["dual_sign_consistent"] = False
            return CheckResult(False, (pairing - moved).to_text(), details)
        if pairing:
            pairings_vanish = False
    details["dual_sign_consistent"] = True
    details["pairings_vanish"] = pairings_vanish
    return CheckResult(pairings_vanish == (not dirac), details=details)


def monogenic_witness(m: int, index: int = 0) -> CliffordPoly:
    """A degree-one x-monogenic spinor-valued polynomial."""
    basis = build_basis(m, 1, SpaceKind.MONOGENIC_CLIFFORD, "x").elements
    idem = witt_and_idempotent(m).idempotent
    candidates = [p.right_mul(idem) for p in basis]
    candidates = [p for p in candidates if p]
    return candidates[index % len(candidates)]


def _require_monogenic(f: CliffordPoly, k: int) -> None:
    if not f.is_homogeneous("u", k) or f.dirac_left("u"):
        raise NotInSpaceError(f"Test function is not M_{k}-valued")


def rs_projection_equivalence(m: int, k: int, f: CliffordPoly) -> CheckResult:
    """(q, D_x f)_u = (q, R_k f)_u for q in M_k, with M_k orthogonal to u M_{k-1}."""
    _require_monogenic(f, k)
    dx = f.dirac_left("x")
    rk = make_rarita_schwinger(m, k).apply(f)
    basis = build_basis(m, k, SpaceKind.MONOGENIC_CLIFFORD).elements
    for q in basis:
        if fischer_inner(q, dx) != fischer_inner(q, rk):
            return CheckResult(False, f"pairing mismatch for q={q}")
    if k >= 1:
        lower = build_basis(m, k - 1, SpaceKind.MONOGENIC_CLIFFORD).elements
        for q in basis:
            for g in lower:
                if fischer_inner(q, g.vector_left_mul("u")):
                    return CheckResult(False, f"q={q} not orthogonal to u*g for g={g}")
    # D_x f = R_k f + u (-D_u D_x f / N), both parts recovered by the Almansi split
    p, q = almansi_split(dx, k)
    expected_q = dx.dirac_left("u").scale(Fraction(-1, m + 2 * k - 2))
    split_ok = p == rk and q == expected_q
    return CheckResult(split_ok, details={"almansi_consistent": split_ok})
