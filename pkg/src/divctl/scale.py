"""Scale functions of the jump-diffusion surplus without invested returns.

For the regime r = sigma_r = 0 the surplus is a spectrally positive Levy
process with exponent

    psi(theta) = p*theta + 0.5*sigma_p^2*theta^2 + lam*(LT_jump(theta) - 1),

and the discounted scale function W solves
int_0^inf e^{-theta x} W(x) dx = 1/(psi(theta) - delta) for theta beyond the
largest real root. With rational jump transforms the right-hand side is a
ratio of polynomials, so W is a finite sum of exponentials obtained by
partial fractions; Z and Zbar follow by termwise integration.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import NumericalCancellation, RegimeMismatch, RootIsolationFailure
from .model import ModelParams
from .numerics import DEFAULT_TOL, Tolerance, invert_monotone

__all__ = [
    "laplace_exponent",
    "build_scale_set",
    "ScaleSet",
    "eval_W",
    "eval_Z",
    "eval_Zbar",
    "invert_Z",
    "invert_Zbar",
    "invert_laplace_talbot",
    "eval_W_numeric",
]

_IMAG_TOL = 1e-8  # relative imaginary residue allowed after conjugate cancellation


def _require_levy(model: ModelParams):
    if not model.is_levy_regime():
        raise RegimeMismatch(
            f"scale functions need r = sigma_r = 0, got r={model.r}, sigma_r={model.sigma_r}")


def laplace_exponent(model: ModelParams, theta: float) -> float:
    """psi(theta) of the surplus; valid only without invested returns."""
    _require_levy(model)
    return (model.p * theta + 0.5 * model.sigma_p ** 2 * theta ** 2
            + model.lam * (model.jump.laplace_transform(theta) - 1.0))


@dataclass(frozen=True)
class ScaleSet:
    """Partial-fraction representation of W, Z and Zbar for one (model, delta).

    W(x) = sum_i residues[i] * exp(roots[i] * x) on x >= 0 (0 to the left);
    roots come in conjugate pairs plus the single positive real root phi.
    """

    model: ModelParams
    delta: float
    roots: np.ndarray
    residues: np.ndarray
    phi: float
    representation: str = "partial-fractions"

    def psi(self, theta: float) -> float:
        return laplace_exponent(self.model, theta)


def build_scale_set(model: ModelParams, delta: float,
                    min_root_separation: float = 1e-7) -> ScaleSet:
    """Factor 1/(psi - delta) into partial fractions.

    Raises RootIsolationFailure when denominator roots cluster closer than
    min_root_separation (nudging delta by ~1e-9 separates such accidental
    near-double roots) or when the positive real root cannot be identified.
    """
    _require_levy(model)
    if delta <= 0.0:
        raise ValueError(f"delta must be positive: {delta}")
    num, den = model.jump.lt_num_den()
    base = np.array([-(model.lam + delta), model.p, 0.5 * model.sigma_p ** 2])
    # psi(theta) - delta = (base*den + lam*num) / den
    npoly = P.polyadd(P.polymul(base, den), model.lam * np.asarray(num, dtype=float))
    npoly = np.trim_zeros(npoly, "b")
    if len(npoly) < 2:
        raise RootIsolationFailure("degenerate exponent polynomial")
    roots = P.polyroots(npoly)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < min_root_separation:
                raise RootIsolationFailure(
                    f"roots {roots[i]:.9g} and {roots[j]:.9g} closer than "
                    f"{min_root_separation:g}; perturb delta by 1e-9 and rebuild")
    real_pos = [z for z in roots
                if z.real > 0.0 and abs(z.imag) <= 1e-9 * max(1.0, abs(z.real))]
    if len(real_pos) != 1:
        raise RootIsolationFailure(
            f"expected exactly one positive real root of psi=delta, found {len(real_pos)}")
    phi = float(real_pos[0].real)
    dn = P.polyder(npoly)
    residues = P.polyval(roots, den) / P.polyval(roots, dn)
    return ScaleSet(model=model, delta=delta, roots=roots, residues=residues, phi=phi)


def _real_with_check(values: np.ndarray, what: str):
    re = np.real(values)
    im = np.imag(values)
    scale = np.maximum(np.abs(re), 1.0)
    worst = np.max(np.abs(im) / scale) if np.size(im) else 0.0
    if worst > _IMAG_TOL:
        raise NumericalCancellation(
            f"{what}: imaginary residue {worst:.3g} exceeds {_IMAG_TOL:g}")
    return re


def eval_W(s: ScaleSet, x):
    """W(x); zero for x < 0, nonnegative and nondecreasing on [0, inf)."""
    xv = np.asarray(x, dtype=float)
    ex = np.exp(np.multiply.outer(xv, s.roots))
    vals = _real_with_check(ex @ s.residues, "W")
    out = np.where(xv < 0.0, 0.0, vals)
    return float(out) if np.isscalar(x) or xv.ndim == 0 else out


def eval_Z(s: ScaleSet, x):
    """Z(x) = 1 + delta * int_0^x W; identically 1 left of 0."""
    xv = np.asarray(x, dtype=float)
    ex = np.exp(np.multiply.outer(xv, s.roots)) - 1.0
    vals = 1.0 + s.delta * _real_with_check(ex @ (s.residues / s.roots), "Z")
    out = np.where(xv < 0.0, 1.0, vals)
    return float(out) if np.isscalar(x) or xv.ndim == 0 else out


def eval_Zbar(s: ScaleSet, x):
    """Zbar(x) = int_0^x Z; equals x left of 0."""
    xv = np.asarray(x, dtype=float)
    ex = np.exp(np.multiply.outer(xv, s.roots)) - 1.0
    lin = np.multiply.outer(xv, np.ones_like(s.roots))
    inner = (ex / s.roots - lin) @ (s.residues / s.roots)
    vals = xv + s.delta * _real_with_check(inner, "Zbar")
    out = np.where(xv < 0.0, xv, vals)
    return float(out) if np.isscalar(x) or xv.ndim == 0 else out


def invert_Z(s: ScaleSet, target: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """x with Z(x) = target, for target >= 1."""
    return invert_monotone(lambda x: eval_Z(s, x), target, 0.0, 1.0, tol)


def invert_Zbar(s: ScaleSet, target: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """x with Zbar(x) = target, for target >= 0."""
    return invert_monotone(lambda x: eval_Zbar(s, x), target, 0.0, 1.0, tol)


def invert_laplace_talbot(fhat, t: float, terms: int = 48) -> float:
    """Bromwich inversion on the fixed Talbot contour.

    Cross-check backend only: the production evaluators use the
    partial-fraction closed form. `fhat` takes a complex argument.
    """
    if t <= 0.0:
        raise ValueError("Talbot inversion needs t > 0")
    m = terms
    r = 2.0 * m / (5.0 * t)
    total = 0.5 * complex(fhat(complex(r, 0.0))).real * math.exp(r * t)
    for k in range(1, m):
        th = k * math.pi / m
        cot = 1.0 / math.tan(th)
        sk = r * th * complex(cot, 1.0)
        sigma = th + (th * cot - 1.0) * cot
        total += (cmath.exp(t * sk) * complex(fhat(sk)) * complex(1.0, sigma)).real
    return total * r / m


def eval_W_numeric(s: ScaleSet, x: float, terms: int = 48) -> float:
    """W(x) via numeric transform inversion (oracle for the closed form).

    The transform is shifted by phi so its poles sit in the closed left
    half-plane, which the Talbot contour requires.
    """
    if x <= 0.0:
        return 0.0

    def shifted(z: complex) -> complex:
        th = z + s.phi
        psi = (s.model.p * th + 0.5 * s.model.sigma_p ** 2 * th * th
               + s.model.lam * (_lt_complex(s.model, th) - 1.0))
        return 1.0 / (psi - s.delta)

    return math.exp(s.phi * x) * invert_laplace_talbot(shifted, x, terms)


def _lt_complex(model: ModelParams, theta: complex) -> complex:
    num, den = model.jump.lt_num_den()
    return P.polyval(theta, num) / P.polyval(theta, den)
