"""Order-by-order expansion of the phase derivative in the expansion scale eps.

Writing P = sum_j eps^j P_j for the logarithmic derivative scale of a
WKB-type solution, the master relation

    (sum eps^j P_j)^2 + eps * sum eps^j P_j' + 2 sum eps^j F_j'' = -E

with F_0'' = -V/2 and vanishing odd F's yields the triangular recursion

    P_0 = i sqrt(E - V)            (positive imaginary branch)
    P_1 = -P_0' / (2 P_0)
    P_n = -( sum_{0<i<n} P_i P_{n-i} + P_{n-1}' + 2 F_n'' ) / (2 P_0)

Each coefficient is an explicit algebraic expression in lower ones; no
integration constants enter.  Coefficients are propagated as truncated Taylor
jets (value plus scaled derivatives at every grid point), so the derivative
appearing at each order is exact given the derivatives of V, and rerunning on
a sub-grid reproduces the restriction of the full-grid output to rounding.

Even-index coefficients come out purely imaginary and odd-index ones purely
real for real inputs; the antiderivatives S^j (anchored at x_ref) reconstruct
the squared modulus through |psi|^2 = omega * exp(2 sum_j eps^{2j} S^{2j+1}).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, TruncationError
from .fields import Grid, ScalarField, antiderivative, derivative, schwarzian
from .schrodinger import Potential

MAX_ORDER = 12  # third-derivative noise of sampled inputs dominates beyond this


# ---------------------------------------------------------------------------
# Truncated Taylor jets: arrays of shape (rows, n) holding f^(r)/r! per sample.

def _jet_mul(a, b):
    rows = min(a.shape[0], b.shape[0])
    out = np.zeros((rows, a.shape[1]), dtype=np.complex128)
    for r in range(rows):
        for s in range(r + 1):
            out[r] += a[s] * b[r - s]
    return out


def _jet_div(a, b):
    """Jet of a/b (b[0] must not vanish)."""
    rows = min(a.shape[0], b.shape[0])
    out = np.empty((rows, a.shape[1]), dtype=np.complex128)
    out[0] = a[0] / b[0]
    for r in range(1, rows):
        acc = a[r].astype(np.complex128)
        for s in range(1, r + 1):
            acc = acc - b[s] * out[r - s]
        out[r] = acc / b[0]
    return out


def _jet_sqrt(a):
    """Jet of sqrt(a) (principal branch of a[0])."""
    rows = a.shape[0]
    out = np.empty((rows, a.shape[1]), dtype=np.complex128)
    out[0] = np.sqrt(a[0])
    for r in range(1, rows):
        acc = a[r].astype(np.complex128)
        for s in range(1, r):
            acc = acc - out[s] * out[r - s]
        out[r] = acc / (2.0 * out[0])
    return out


def _jet_shift(a):
    """Jet of a' (one row shorter)."""
    rows = a.shape[0] - 1
    out = np.empty((rows, a.shape[1]), dtype=np.complex128)
    for r in range(rows):
        out[r] = (r + 1) * a[r + 1]
    return out


def _field_jet(f: ScalarField, rows: int) -> np.ndarray:
    """Jet of a sampled field: attached derivatives first, stencils beyond."""
    out = np.zeros((rows, f.grid.n), dtype=np.complex128)
    out[0] = f.values
    available = list(f.derivs)
    factorial = 1.0
    tail = ScalarField(f.grid, f.derivs[-1]) if f.derivs else f
    for r in range(1, rows):
        factorial *= r
        if r <= len(available):
            out[r] = available[r - 1] / factorial
        else:
            tail = derivative(tail, 1)
            out[r] = tail.values / factorial
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyInput:
    """Potential samples, energy, truncation order and expansion bookkeeping.

    The domain must stay classically allowed: E - V >= gap > 0 everywhere
    (the leading coefficient i*sqrt(E - V) degenerates at a turning point).
    ``f_even`` holds the optional corrections F_2'', F_4'', ... as sampled
    fields; odd-index corrections vanish identically.  When ``potential`` is
    given, high-order derivatives of V come from its closed form instead of
    repeated stencils.
    """

    v_field: ScalarField
    energy: float
    order: int
    epsilon: float
    x_ref: float
    f_even: tuple = ()
    potential: Potential | None = None

    def __post_init__(self):
        object.__setattr__(self, "f_even", tuple(self.f_even))
        if self.order < 0:
            raise ValueError(f"truncation order must be >= 0, got {self.order}")
        if self.order > MAX_ORDER:
            raise TruncationError(
                f"order {self.order} exceeds the supported maximum {MAX_ORDER}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        gap = float(self.energy - np.max(np.real(self.v_field.values)))
        if gap <= 0.0:
            raise DomainError(
                f"turning point on the domain: need E > max V, gap = {gap:.3e}")
        if not self.v_field.grid.contains(self.x_ref):
            raise DomainError(f"x_ref={self.x_ref} outside the grid")
        for k, f in enumerate(self.f_even):
            if f.grid != self.v_field.grid:
                raise ContractError(f"F''_{2 * (k + 1)} sampled on a different grid")
            if np.iscomplexobj(f.values) and float(np.max(np.abs(f.values.imag))) > 0:
                raise ContractError(f"F''_{2 * (k + 1)} must be real")

    @property
    def grid(self) -> Grid:
        return self.v_field.grid

    @classmethod
    def from_potential(cls, potential: Potential, grid: Grid, energy: float,
                       order: int, epsilon: float, x_ref: float,
                       f_even=()) -> "HierarchyInput":
        return cls(v_field=potential.field(grid), energy=energy, order=order,
                   epsilon=epsilon, x_ref=x_ref, f_even=tuple(f_even),
                   potential=potential)

    def v_jet(self, rows: int) -> np.ndarray:
        if self.potential is not None:
            out = np.zeros((rows, self.grid.n), dtype=np.complex128)
            factorial = 1.0
            for r in range(rows):
                if r:
                    factorial *= r
                out[r] = self.potential.derivative_samples(self.grid, r) / factorial
            return out
        return _field_jet(self.v_field, rows)

    def f_dd_jet(self, index: int, rows: int) -> np.ndarray | None:
        """Jet of F''_index (None when the correction vanishes identically)."""
        if index == 0:
            return -0.5 * self.v_jet(rows)
        if index % 2 == 1:
            return None
        k = index // 2 - 1
        if k >= len(self.f_even):
            return None
        return _field_jet(self.f_even[k], rows)


@dataclass(frozen=True)
class HierarchySolution:
    """Coefficients P_0..P_K, their anchored antiderivatives S^0..S^K, and the
    parity audit (max real part of even coefficients, max imaginary part of
    odd ones)."""

    p_coeffs: tuple
    s_coeffs: tuple
    parity_report: tuple

    @property
    def order(self) -> int:
        return len(self.p_coeffs) - 1


def recurse(hierarchy_input: HierarchyInput) -> HierarchySolution:
    """Run the triangular recursion up to the requested order.

    Returns fields carrying three exact derivative samples each, obtained by
    jet propagation rather than stencils.
    """
    inp = hierarchy_input
    K = inp.order
    rows = K + 4
    n = inp.grid.n

    e_minus_v = -inp.v_jet(rows)
    e_minus_v[0] += inp.energy
    p = [1j * _jet_sqrt(e_minus_v)]

    for nn in range(1, K + 1):
        avail = rows - nn
        acc = np.zeros((avail, n), dtype=np.complex128)
        for i in range(1, nn):
            term = _jet_mul(p[i], p[nn - i])
            acc += term[:avail]
        acc += _jet_shift(p[nn - 1])[:avail]
        f_dd = inp.f_dd_jet(nn, avail)
        if f_dd is not None:
            acc += 2.0 * f_dd
        p.append(_jet_div(-acc, 2.0 * p[0][:avail]))

    p_fields = []
    for j, jet in enumerate(p):
        derivs = []
        factorial = 1.0
        for r in range(1, min(4, jet.shape[0])):
            factorial *= r
            derivs.append(jet[r] * factorial)
        p_fields.append(ScalarField(inp.grid, jet[0], derivs=tuple(derivs)))

    s_fields = [antiderivative(f, inp.x_ref) for f in p_fields]

    even_real = max(float(np.max(np.abs(f.values.real)))
                    for f in p_fields[0::2])
    odd_imag = 0.0
    if K >= 1:
        odd_imag = max(float(np.max(np.abs(f.values.imag)))
                       for f in p_fields[1::2])
    return HierarchySolution(tuple(p_fields), tuple(s_fields), (even_real, odd_imag))


@dataclass(frozen=True)
class MasterReport:
    """Per-order residual fields of the master relation plus the numeric
    remainder of the truncated sum at a concrete epsilon."""

    per_order: tuple
    remainder: ScalarField
    epsilon: float

    def max_per_order(self) -> float:
        return max(float(np.max(np.abs(f.values))) for f in self.per_order)


def master_residual(sol: HierarchySolution, hierarchy_input: HierarchyInput,
                    epsilon: float | None = None) -> MasterReport:
    """Collect the master relation by powers of eps and evaluate the remainder.

    Orders 0..K must vanish identically (they restate the recursion); the
    full numeric sum at the given eps is left with an O(eps^{K+1}) remainder.
    """
    inp = hierarchy_input
    eps = inp.epsilon if epsilon is None else float(epsilon)
    K = sol.order
    grid = inp.grid
    p_vals = [f.values for f in sol.p_coeffs]
    dp_vals = [derivative(f, 1).values for f in sol.p_coeffs]

    per_order = []
    for nn in range(K + 1):
        acc = np.zeros(grid.n, dtype=np.complex128)
        for i in range(max(0, nn - K), min(nn, K) + 1):
            acc += p_vals[i] * p_vals[nn - i]
        if nn >= 1:
            acc += dp_vals[nn - 1]
        f_dd = inp.f_dd_jet(nn, 1)
        if f_dd is not None:
            acc += 2.0 * f_dd[0]
        if nn == 0:
            acc += inp.energy
        per_order.append(ScalarField(grid, acc))

    p_sum = np.zeros(grid.n, dtype=np.complex128)
    dp_sum = np.zeros(grid.n, dtype=np.complex128)
    f_sum = np.zeros(grid.n, dtype=np.complex128)
    for j in range(K + 1):
        p_sum += eps ** j * p_vals[j]
        dp_sum += eps ** j * dp_vals[j]
        f_dd = inp.f_dd_jet(j, 1)
        if f_dd is not None:
            f_sum += eps ** j * f_dd[0]
    remainder = p_sum * p_sum + eps * dp_sum + 2.0 * f_sum + inp.energy
    return MasterReport(tuple(per_order), ScalarField(grid, remainder), eps)


def p2_schwarzian_check(sol: HierarchySolution, hierarchy_input: HierarchyInput) -> float:
    """Max discrepancy between the recursion P_2 and {S^0; x} / (4 P_0).

    The comparison path rebuilds S^0 by quadrature of P_0 alone and takes the
    Schwarzian with stencils, so the two routes share no derivative machinery.
    Only valid when the first correction F_2'' vanishes.
    """
    if sol.order < 2:
        raise ValueError("need the expansion at least to order 2")
    f2 = hierarchy_input.f_dd_jet(2, 1)
    if f2 is not None and float(np.max(np.abs(f2[0]))) > 0.0:
        raise ContractError("the Schwarzian form of P_2 requires F_2'' = 0")

    p0 = sol.p_coeffs[0]
    s0_bare = ScalarField(p0.grid, antiderivative(p0.bare(), hierarchy_input.x_ref).values)
    alt = schwarzian(s0_bare).values / (4.0 * p0.values)
    return float(np.max(np.abs(sol.p_coeffs[2].values - alt)))


def reconstruct_modulus(sol: HierarchySolution, hierarchy_input: HierarchyInput,
                        omega: float) -> ScalarField:
    """|psi|^2 = omega * exp(2 sum_j eps^{2j} S^{2j+1}) from the odd, real terms."""
    eps = hierarchy_input.epsilon
    grid = hierarchy_input.grid
    if sol.order < 1:
        warnings.warn("expansion order 0 carries no modulus information; "
                      "returning the constant omega")
        return ScalarField(grid, np.full(grid.n, float(omega)))
    expo = np.zeros(grid.n)
    for j in range(0, (sol.order - 1) // 2 + 1):
        expo += eps ** (2 * j) * sol.s_coeffs[2 * j + 1].values.real
    return ScalarField(grid, float(omega) * np.exp(2.0 * expo))
