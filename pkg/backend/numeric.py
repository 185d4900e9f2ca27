"""Floating-point delta-normalization checks by product quadrature around the singularity."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from loguru import logger

from backend.clifford_core import Multivector, omega
from backend.config import SpaceKind
from backend.errors import EngineError
from backend.identities import CheckResult
from backend.operators import a_2, e_k1
from backend.poly import CliffordPoly, var_offset
from backend.radial_ring import RadialFn, kelvin_embed
from backend.spaces import (
    almansi_projection,
    build_basis,
    monogenic_generators,
    reproducing_kernel,
    sphere_integrate,
)

SAMPLE_POINTS = ((0.0, 0.0, 0.0), (0.25, 0.0, 0.0), (0.0, -0.2, 0.1))
U_CANDIDATES = (
    (Fraction(3, 5), Fraction(4, 5), Fraction(0)),
    (Fraction(2, 7), Fraction(3, 7), Fraction(6, 7)),
    (Fraction(1, 3), Fraction(2, 3), Fraction(2, 3)),
)


@dataclass
class NumericResult:
    order: int
    resolution: int
    error: float
    ratio: float
    flipped_error: float = 0.0
    point_errors: list[float] = field(default_factory=list)
    normalization: str = "derived"


def _bump_parts(w: np.ndarray):
    s = np.sum(w * w, axis=0)
    inside = s < 1.0
    gap = np.where(inside, 1.0 - s, 1.0)
    b = np.where(inside, np.exp(-1.0 / gap), 0.0)
    g1 = -1.0 / gap**2
    g2 = -2.0 / gap**3
    return b, g1, g2


def bump(w: np.ndarray) -> np.ndarray:
    """b(w) = exp(-1/(1-||w||^2)) on the unit ball, zero outside."""
    return _bump_parts(w)[0]


def bump_gradient(w: np.ndarray) -> np.ndarray:
    b, g1, _ = _bump_parts(w)
    return b * g1 * 2.0 * w


def bump_hessian(w: np.ndarray) -> np.ndarray:
    b, g1, g2 = _bump_parts(w)
    m = w.shape[0]
    outer = w[:, None, :] * w[None, :, :]
    eye = np.eye(m)[:, :, None]
    return b * (4.0 * (g1 * g1 + g2) * outer + 2.0 * g1 * eye)


class CompiledRadial:
    """A u-evaluated RadialFn as arrays for fast evaluation at many x."""

    def __init__(self, f: RadialFn, u, scale: complex = 1.0):
        m = f.dim
        off = var_offset("x", m)
        self.m = m
        self.entries = []
        for t, p in f.terms.items():
            for (exps, blade), c in p.substitute({"u": u}).terms.items():
                if any(exps[var_offset("v", m) : var_offset("v", m) + m]):
                    raise EngineError("Compiled functions must not depend on v")
                self.entries.append((t, exps[off : off + m], blade, c.to_complex() * scale))

    def __call__(self, z: np.ndarray, r: np.ndarray) -> dict[int, np.ndarray]:
        out: dict[int, np.ndarray] = {}
        for t, exps, blade, c in self.entries:
            value = c * r**t
            for i, e in enumerate(exps):
                if e:
                    value = value * z[i] ** e
            out[blade] = out.get(blade, 0) + value
        return out


def _grid(m: int, resolution: int, radius: float):
    if m != 3:
        raise EngineError("Quadrature grid is implemented for m = 3")
    r_nodes, r_weights = np.polynomial.legendre.leggauss(resolution)
    r_nodes = 0.5 * radius * (r_nodes + 1.0)
    r_weights = 0.5 * radius * r_weights
    c_nodes, c_weights = np.polynomial.legendre.leggauss(resolution)
    phi = 2.0 * np.pi * np.arange(resolution) / resolution
    sin_t = np.sqrt(1.0 - c_nodes**2)
    directions = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(c_nodes, resolution),
        ]
    )
    angular_weights = np.repeat(c_weights, resolution) * (2.0 * np.pi / resolution)
    return r_nodes, r_weights, directions, angular_weights


def _integrate(pieces, derivative, m: int, y: np.ndarray, resolution: int) -> dict[int, complex]:
    """sum over pieces of integral piece(z) * derivative(index)(z + y) dz."""
    radius = 1.0 + float(np.linalg.norm(y))
    r_nodes, r_weights, directions, angular_weights = _grid(m, resolution, radius)
    totals: dict[int, complex] = {}
    for r, wr in zip(r_nodes, r_weights):
        z = r * directions
        rr = np.full(z.shape[1], r)
        weights = angular_weights * wr * r * r
        shifted = z + y[:, None]
        factors = derivative(shifted)
        for index, compiled in pieces:
            factor = factors[index] * weights
            for blade, values in compiled(z, rr).items():
                totals[blade] = totals.get(blade, 0) + complex(np.sum(values * factor))
    return totals


def smoothed_kernel(
    m: int, k: int, order: int, q: CliffordPoly, derived: bool = True
) -> tuple[RadialFn, complex]:
    """integral of E(x, u, v) q(v) dS(v) as a radial function, and its float normalization.

    `derived` selects the sign of the order-one constant; order two has a single constant.
    """
    kind = SpaceKind.MONOGENIC_CLIFFORD if order == 1 else SpaceKind.HARMONIC_SCALAR
    kernel = reproducing_kernel(m, k, kind)
    hat = sphere_integrate(kernel.poly * q.rename("u", "v"), "v", allow_parameters=True)
    if order == 1:
        constant = e_k1(m, k, derived) * kernel.scale * omega(m)
        return kelvin_embed(hat, k, -m, True), constant.to_float()
    if order == 2:
        constant = a_2(m, k) * kernel.scale * omega(m)
        return kelvin_embed(hat, k, 2 - m), constant.to_float()
    raise EngineError(f"Numeric check supports orders 1 and 2, got {order}")


def _order_pieces(m: int, k: int, order: int, e_q: RadialFn):
    """Kernels paired with first (order 1) or second (order 2) bump derivatives."""
    pieces = []
    if order == 1:
        for i in range(1, m + 1):
            shifted = e_q.left_mul(Multivector.basis_vector(m, i))
            pieces.append(((i - 1,), almansi_projection(shifted, k, "u").scale(-1)))
        return pieces
    n = m + 2 * k - 2
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            g = e_q if i == j else RadialFn(m)
            if k:
                u_i = CliffordPoly.variable(m, "u", i)
                g = g - (e_q.partial("u", j) * u_i).scale(Fraction(4, n))
                g = g + e_q.partial("u", i).partial("u", j).norm_sq_mul("u").scale(Fraction(4, n * (n - 2)))
            pieces.append(((i - 1, j - 1), g))
    return pieces


def _first_derivatives(w: np.ndarray) -> dict:
    return {(i,): g for i, g in enumerate(bump_gradient(w))}


def _second_derivatives(w: np.ndarray) -> dict:
    return {(i, j): h for i, row in enumerate(bump_hessian(w)) for j, h in enumerate(row)}


def _pick_u(q: CliffordPoly):
    for u in U_CANDIDATES:
        if not q.evaluate({"u": u}).is_zero():
            return u
    raise EngineError("No sample direction with q(u) != 0")


def numeric_delta_check(
    m: int,
    k: int,
    order: int,
    resolution: int = 64,
    amplitude: float = 1.0,
    derived: bool = True,
) -> NumericResult:
    """Pair D E against a bump times q and compare with the bump value times q at the sample points."""
    kind = SpaceKind.MONOGENIC_CLIFFORD if order == 1 else SpaceKind.HARMONIC_SCALAR
    q = monogenic_generators(m, k)[0] if order == 1 else build_basis(m, k, kind).elements[0]
    u = _pick_u(q)
    e_q, constant = smoothed_kernel(m, k, order, q, derived)
    pieces = [
        (index, CompiledRadial(g, u, constant * amplitude))
        for index, g in _order_pieces(m, k, order, e_q)
    ]
    derivative = _first_derivatives if order == 1 else _second_derivatives
    target = {b: c.to_complex() for b, c in q.evaluate({"u": u}).terms.items()}
    errors, flipped, ratios = [], [], []
    for point in SAMPLE_POINTS:
        y = np.array(point)
        result = _integrate(pieces, derivative, m, y, resolution)
        scale = amplitude * float(bump(y[:, None])[0])
        blades = set(result) | set(target)
        expected = np.array([target.get(b, 0) * scale for b in blades])
        measured = np.array([result.get(b, 0) for b in blades])
        norm = float(np.linalg.norm(expected))
        if norm == 0.0:
            errors.append(float(np.linalg.norm(measured)))
            flipped.append(errors[-1])
            ratios.append(1.0)
            continue
        errors.append(float(np.linalg.norm(measured - expected)) / norm)
        flipped.append(float(np.linalg.norm(measured + expected)) / norm)
        ratios.append(float(np.real(np.vdot(expected, measured))) / norm**2)
    logger.debug(f"Numeric order={order} resolution={resolution}: errors {errors}")
    normalization = "derived" if derived or order != 1 else "printed"
    return NumericResult(
        order, resolution, max(errors), float(np.mean(ratios)), max(flipped), errors, normalization
    )


def numeric_verdict(ladder: list[NumericResult], tolerance: float, floor: float = 1e-8) -> CheckResult:
    """Finest signed error within tolerance, errors decreasing along the resolution ladder.

    Errors already below `floor` count as converged and are exempt from the decrease.
    """
    ladder = sorted(ladder, key=lambda result: result.resolution)
    finest = ladder[-1]
    errors = [result.error for result in ladder]
    monotone = all(
        later < earlier or later <= floor for earlier, later in zip(errors, errors[1:])
    )
    details = {
        "error": f"{finest.error:.3e}",
        "errors": ",".join(f"{error:.3e}" for error in errors),
        "resolutions": ",".join(str(result.resolution) for result in ladder),
        "ratio": f"{finest.ratio:.6f}",
        "opposite_sign_error": f"{finest.flipped_error:.3e}",
        "normalization": finest.normalization,
        "monotone": monotone,
    }
    if not monotone:
        logger.warning(f"Numeric order={finest.order}: errors {details['errors']} do not decrease with resolution")
    if finest.error > tolerance:
        logger.warning(f"Numeric order={finest.order}: error {finest.error:.3e} above tolerance {tolerance}")
    return CheckResult(monotone and finest.error <= tolerance, f"{finest.error:.3e}", details)
