"""Wave/coordinate duality: prepotential, resolvent checks and norm scaling.

For a conjugate pair (psi, conj(psi)) with Wronskian scaled to 2i/eps the
prepotential

    F = (1/2) |psi|^2 + i X / eps

generates the dual solution through dF/dpsi = F_X / psi_X = conj(psi) and
satisfies a third-order ODE in psi.  The square eigenfunctions
Xi in {psi conj(psi), psi^2, conj(psi)^2} all satisfy the third-order
resolvent equation

    eps^2 Xi''' - 2 V' Xi + 4 (E - V) Xi' = 0,

which is also what the prepotential form and the free-energy (AKQ-type) form
reduce to.  The remaining entry points cover the general inverse-quadratic
phase-derivative solution of the stationary Hamilton-Jacobi equation and the
norm-fixing scale factor omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, SingularFieldError
from .fields import NODE_TOL, ScalarField, antiderivative, derivative
from .schrodinger import Potential, SolutionPair

XI_VARIANTS = ("psi_psibar", "psi_sq", "psibar_sq")


@dataclass(frozen=True)
class Prepotential:
    """Prepotential F, the ratio phi = conj(psi)/2psi, and the Xi variants."""

    pair: SolutionPair
    F: ScalarField
    phi: ScalarField
    xi: dict

    @property
    def epsilon(self) -> float:
        return self.pair.constants.epsilon


@dataclass(frozen=True)
class FreeEnergy:
    """Free energy F0 of the hierarchy side, tied to the potential by F0'' = -V/2.

    ``f0_dd`` stores -V/2 exactly (the construction identity); ``f0`` is its
    double antiderivative.  ``higher`` holds the optional even-order
    corrections F2, F4, ... as sampled fields.
    """

    f0: ScalarField
    f0_dd: ScalarField
    higher: tuple = ()

    @classmethod
    def from_potential(cls, potential: Potential, grid, x_ref: float) -> "FreeEnergy":
        v = potential.field(grid)
        dd_derivs = tuple(-0.5 * d for d in v.derivs[:2])
        f0_dd = ScalarField(grid, -0.5 * v.values, derivs=dd_derivs)
        f0_d = antiderivative(f0_dd, x_ref)
        f0 = antiderivative(f0_d, x_ref)
        return cls(f0=f0, f0_dd=f0_dd)


def _require_normalized_conjugate(pair: SolutionPair):
    if pair.kind != "conjugate":
        raise ContractError(f"prepotential needs a conjugate pair, got kind={pair.kind!r}")
    target = 2j / pair.constants.epsilon
    if abs(pair.wronskian - target) > 1e-9 * abs(target):
        raise ContractError(
            f"pair Wronskian {pair.wronskian} is not scaled to 2i/eps = {target}; "
            f"normalize it first")


def _leibniz_product(f: ScalarField, g: ScalarField):
    """(fg, (fg)', (fg)'', (fg)''') from two fields with attached derivatives."""
    f0, f1, f2, f3 = f.values, *f.derivs
    g0, g1, g2, g3 = g.values, *g.derivs
    return (f0 * g0,
            f1 * g0 + f0 * g1,
            f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3)


def build_prepotential(pair: SolutionPair) -> Prepotential:
    """Assemble F, phi and all three Xi variants for a normalized conjugate pair."""
    _require_normalized_conjugate(pair)
    grid = pair.grid
    eps = pair.constants.epsilon
    psi, psibar = pair.psi, pair.psi_dual

    prod, dprod, d2prod, d3prod = _leibniz_product(psi, psibar)
    w = 2j / eps
    f_vals = 0.5 * np.abs(psi.values) ** 2 + 1j * grid.x / eps
    f = ScalarField(grid, f_vals,
                    derivs=(0.5 * dprod + 0.5 * w, 0.5 * d2prod, 0.5 * d3prod))

    mod = np.abs(psi.values)
    if float(np.min(mod)) <= NODE_TOL * float(np.max(mod)):
        raise SingularFieldError("psi has a node; phi = conj(psi)/2psi undefined")
    phi = ScalarField(grid, psibar.values / (2.0 * psi.values))

    def squared(u: ScalarField) -> ScalarField:
        vals, d1, d2, d3 = _leibniz_product(u, u)
        return ScalarField(grid, vals, derivs=(d1, d2, d3))

    xi = {
        "psi_psibar": ScalarField(grid, prod, derivs=(dprod, d2prod, d3prod)),
        "psi_sq": squared(psi),
        "psibar_sq": squared(psibar),
    }
    return Prepotential(pair=pair, F=f, phi=phi, xi=xi)


def _chain_derivatives(prep: Prepotential):
    """F', F'', F''' and psi', psi'', psi''' as arrays, preferring attachments."""
    f, psi = prep.F, prep.pair.psi
    fd = [derivative(f, k).values for k in (1, 2, 3)]
    pd = [derivative(psi, k).values for k in (1, 2, 3)]
    mod = np.abs(pd[0])
    bad = np.flatnonzero(mod <= NODE_TOL * float(np.max(mod)))
    if bad.size:
        raise SingularFieldError(
            f"psi' vanishes at sample {bad[0]}; cannot change variables to psi",
            indices=bad)
    return fd, pd


def dual_derivative_residual(prep: Prepotential, via: str = "psi") -> ScalarField:
    """|dF/dpsi - conj(psi)| (via='psi') or |dF/dpsi^2 - conj(psi)/2psi| (via='psi_sq').

    The psi-derivative is realized on the coordinate grid through the chain
    rule dF/dpsi = F_X / psi_X.
    """
    (f1, _, _), (p1, _, _) = _chain_derivatives(prep)
    if via == "psi":
        target = prep.pair.psi_dual.values
        resid = f1 / p1 - target
    elif via == "psi_sq":
        xi1 = derivative(prep.xi["psi_sq"], 1).values
        resid = f1 / xi1 - prep.phi.values
    else:
        raise ValueError(f"via must be 'psi' or 'psi_sq', got {via!r}")
    return ScalarField(prep.pair.grid, np.abs(resid))


def prepotential_ode_residual(prep: Prepotential, v_field: ScalarField,
                              energy: float) -> ScalarField:
    """Residual of the third-order prepotential ODE

        F_ppp = ((E - V)/4) (F_p - psi F_pp)^3,

    with psi-derivatives taken by the chain rule on the coordinate grid.
    """
    (f1, f2, f3), (p1, p2, p3) = _chain_derivatives(prep)
    psi = prep.pair.psi.values
    f_p = f1 / p1
    num = f2 * p1 - f1 * p2
    f_pp = num / p1 ** 3
    num_x = f3 * p1 - f1 * p3
    f_ppp = (num_x * p1 - 3.0 * num * p2) / p1 ** 5
    rhs = 0.25 * (energy - v_field.values) * (f_p - psi * f_pp) ** 3
    return ScalarField(prep.pair.grid, f_ppp - rhs)


def gd_residual(xi: ScalarField, v_field: ScalarField, energy: float,
                epsilon: float) -> ScalarField:
    """Residual of the square-eigenfunction resolvent equation

        eps^2 Xi''' - 2 V' Xi + 4 (E - V) Xi' = 0.
    """
    xi1 = derivative(xi, 1).values
    xi3 = derivative(xi, 3).values
    v = v_field.values
    dv = derivative(v_field, 1).values
    resid = epsilon ** 2 * xi3 - 2.0 * dv * xi.values + 4.0 * (energy - v) * xi1
    return ScalarField(xi.grid, resid)


def gd_scale(xi: ScalarField, v_field: ScalarField, energy: float, epsilon: float) -> float:
    """Magnitude reference for the resolvent residual.

    Max term size over the grid, floored by the size the derivative terms
    would have at the classical wavenumber (so a constant Xi still gets a
    sensible scale).
    """
    xi1 = derivative(xi, 1).values
    xi3 = derivative(xi, 3).values
    dv = derivative(v_field, 1).values
    e_scale = abs(energy) + float(np.max(np.abs(v_field.values)))
    terms = (np.abs(epsilon ** 2 * xi3) + np.abs(2.0 * dv * xi.values)
             + np.abs(4.0 * (energy - v_field.values) * xi1))
    floor = 4.0 * e_scale * float(np.max(np.abs(xi.values))) * math.sqrt(e_scale) / epsilon
    return max(float(np.max(terms)), floor)


def prepotential_gd_residual(prep: Prepotential, v_field: ScalarField, energy: float,
                             printed_form: bool = False) -> ScalarField:
    """The resolvent equation written in terms of the prepotential.

    The consistent form multiplies 4(E - V) by (F' + 1/(i eps)); the
    ``printed_form`` flag evaluates the variant with (F + 1/(i eps)) instead,
    kept only for comparison (it is not solved by genuine pairs).
    """
    eps = prep.epsilon
    grid = prep.pair.grid
    f = prep.F
    f1 = derivative(f, 1).values
    f3 = derivative(f, 3).values
    v = v_field.values
    dv = derivative(v_field, 1).values
    shifted = f.values + grid.x / (1j * eps)
    last = (f.values if printed_form else f1) + 1.0 / (1j * eps)
    resid = eps ** 2 * f3 - 2.0 * dv * shifted + 4.0 * (energy - v) * last
    return ScalarField(grid, resid)


def akq_residual(prep: Prepotential, fe: FreeEnergy, energy: float,
                 v_field: ScalarField | None = None) -> ScalarField:
    """Residual of the free-energy form of the resolvent equation

        eps^2 F''' + (F' + 1/(i eps)) (8 F0'' + 4 E) + 4 F0''' (F + X/(i eps)) = 0.

    With F0'' = -V/2 this reduces algebraically to the direct form; passing
    ``v_field`` enforces that pairing.
    """
    if v_field is not None:
        scale = max(float(np.max(np.abs(v_field.values))), 1.0)
        mismatch = float(np.max(np.abs(fe.f0_dd.values + 0.5 * v_field.values)))
        if mismatch > 1e-12 * scale:
            raise ContractError(
                f"free energy is inconsistent with the potential: "
                f"max |F0'' + V/2| = {mismatch:.3e}")
    eps = prep.epsilon
    grid = prep.pair.grid
    f1 = derivative(prep.F, 1).values
    f3 = derivative(prep.F, 3).values
    f0dd = fe.f0_dd.values
    f0ddd = derivative(fe.f0_dd, 1).values
    resid = (eps ** 2 * f3
             + (f1 + 1.0 / (1j * eps)) * (8.0 * f0dd + 4.0 * energy)
             + 4.0 * f0ddd * (prep.F.values + grid.x / (1j * eps)))
    return ScalarField(grid, resid)


@dataclass(frozen=True)
class SprimeReport:
    """Phase derivative s' from the inverse quadratic form, plus its residual
    in the third-order stationary Hamilton-Jacobi equation."""

    s_prime: ScalarField
    residual: ScalarField
    quadratic_form: ScalarField


def wkb_general_sprime(pair: SolutionPair, a: complex, b: complex, c: complex) -> SprimeReport:
    """s' = sqrt(2m) / (a psi^2 + b conj(psi)^2 + c psi conj(psi)) and the residual

        (s')^2 - 2m(E - V) + (hbar^2/2) {s; x}.

    The quadratic form must be real and node-free on the grid (b = conj(a) and
    real c make it real).  The residual vanishes only for the combinations that
    match the pair normalization (c^2 - 4ab = 1 for a pair scaled to W = 2i/eps);
    rescaling (a, b, c) rescales s' but drops out of any derived microstate.
    """
    if pair.kind != "conjugate":
        raise ContractError("wkb_general_sprime expects a conjugate pair")
    if pair.potential is None:
        raise ContractError("pair must carry its potential for the residual")
    grid = pair.grid
    psi, psibar = pair.psi, pair.psi_dual

    q0 = a * psi.values ** 2 + b * psibar.values ** 2 + c * psi.values * psibar.values
    scale = float(np.max(np.abs(q0)))
    if float(np.max(np.abs(q0.imag))) > 1e-12 * scale:
        raise ContractError(
            "quadratic form is not real; use b = conj(a) and real c")
    q = q0.real
    bad = np.flatnonzero(np.abs(q) <= NODE_TOL * scale)
    if bad.size:
        raise SingularFieldError(
            f"quadratic form vanishes at {bad.size} sample(s), first at index "
            f"{bad[0]} (x={grid.x[bad[0]]:.6g})", indices=bad)

    p1, pb1 = psi.derivs[0], psibar.derivs[0]
    p2, pb2 = psi.derivs[1], psibar.derivs[1]
    q1 = (2.0 * a * psi.values * p1 + 2.0 * b * psibar.values * pb1
          + c * (p1 * psibar.values + psi.values * pb1)).real
    q2 = (2.0 * a * (p1 ** 2 + psi.values * p2)
          + 2.0 * b * (pb1 ** 2 + psibar.values * pb2)
          + c * (p2 * psibar.values + 2.0 * p1 * pb1 + psi.values * pb2)).real

    mass = pair.constants.mass
    hbar = pair.constants.hbar
    root = math.sqrt(2.0 * mass)
    s1 = root / q
    s2 = -root * q1 / q ** 2
    s3 = root * (2.0 * q1 ** 2 - q * q2) / q ** 3
    schw = s3 / s1 - 1.5 * (s2 / s1) ** 2

    v = pair.potential.derivative_samples(grid, 0)
    resid = s1 ** 2 - 2.0 * mass * (pair.energy - v) + 0.5 * hbar ** 2 * schw
    return SprimeReport(
        s_prime=ScalarField(grid, s1, derivs=(s2, s3)),
        residual=ScalarField(grid, resid),
        quadratic_form=ScalarField(grid, q, derivs=(q1, q2)))


def omega_for_norm(modulus_sq: ScalarField) -> float:
    """Largest omega with omega * |psi|^2 <= 1 on the whole grid.

    Equality is attained at the maximizing sample; any larger omega violates
    the bound there.
    """
    m2 = np.real(modulus_sq.values)
    if float(np.min(m2)) <= 0.0:
        raise DomainError("modulus squared must be strictly positive")
    return float(1.0 / np.max(m2))


def modulus_momentum_residual(pair: SolutionPair) -> ScalarField:
    """|psi|^2 Im(eps psi'/psi) - 1; zero for pairs scaled to W = 2i/eps."""
    if pair.kind != "conjugate":
        raise ContractError("modulus-momentum check expects a conjugate pair")
    eps = pair.constants.epsilon
    psi = pair.psi
    d1 = derivative(psi, 1).values
    mod2 = np.abs(psi.values) ** 2
    im_p = np.imag(eps * d1 / psi.values)
    return ScalarField(pair.grid, mod2 * im_p - 1.0)


def legendre_residual(prep: Prepotential) -> ScalarField:
    """Residual of the Legendre pairing: psi^2 dF/d(psi^2) - F - X/(i eps).

    With Im F = +X/eps the transform of F in the variable psi^2 is +X/(i eps)
    (the opposite-sign variant belongs to the opposite Wronskian convention).
    """
    eps = prep.epsilon
    grid = prep.pair.grid
    f1 = derivative(prep.F, 1).values
    xi1 = derivative(prep.xi["psi_sq"], 1).values
    psi_sq = prep.xi["psi_sq"].values
    resid = psi_sq * (f1 / xi1) - prep.F.values - grid.x / (1j * eps)
    return ScalarField(grid, resid)
