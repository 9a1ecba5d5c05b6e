"""Generating-function engine for traversal times from a known initial configuration.

The arrival time T_i of the packet at node i has probability generating
function G_i(z) = E[z^T_i].  Conditioning the state of link i at the
packet's arrival on the initial bit x_i splits the per-link delay into two
conditional generating functions F_1 (link found on) and F_0 (link found
off), tied together by the geometric off-period wait:
F_0(z) = G_Y(z) F_1(z) with G_Y(z) = p z / (1 - (1-p) z).

Because the conditional state probabilities after t slots are affine in
beta^t (beta = 1 - p - q), the path recursion only ever needs G evaluated
at powers of beta:

    G_i(z) = phi_i(z) G_{i-1}(z) + chi_i psi_i(z) G_{i-1}(beta z)

with phi_i = pi0 F_{i,0} + pi1 F_{i,1}, psi_i = F_{i,0} - F_{i,1} and
chi_i = pi1 (1 - x_i) - pi0 x_i.  Filling the triangular table of values
G_i(beta^k) costs O(n^2) scalar work; expected traversal times follow from
the derivatives at z = 1 and the latency distribution from running the
same recursion on truncated power-series coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InfiniteExpectation, NumericalSingularity
from .model import EdgeDynamics, FailureModel, LengthDist, PathSpec

__all__ = [
    "gy",
    "f_pair",
    "gamma_pair",
    "GammaPair",
    "LinkPgfPair",
    "PgfTable",
    "pgf_table",
    "ett",
    "pmf",
    "TruncatedPmf",
]

_DEN_FLOOR = 1e-300
_Z_SLACK = 1e-3  # allow finite-difference probes just past z = 1
_PMF_MAX_K = 10_000_000


def _as_z(z):
    arr = np.asarray(z, dtype=float)
    if arr.size and np.max(np.abs(arr)) > 1.0 + _Z_SLACK:
        raise ValueError("generating functions are evaluated on |z| <= 1")
    return arr, np.isscalar(z) or arr.ndim == 0


def _guard_den(den) -> None:
    if np.min(np.abs(den)) < _DEN_FLOOR:
        raise NumericalSingularity("denominator vanished during PGF evaluation")


def _gy_arr(dyn: EdgeDynamics, z: np.ndarray) -> np.ndarray:
    den = 1.0 - (1.0 - dyn.p) * z
    _guard_den(den)
    return dyn.p * z / den


def gy(dyn: EdgeDynamics, z):
    """Generating function of the geometric off-period duration Y.

    Pr(Y = k) = (1-p)^(k-1) p for k >= 1, hence p z / (1 - (1-p) z).
    Accepts a scalar or an ndarray of evaluation points with |z| <= 1.
    """
    arr, scalar = _as_z(z)
    out = _gy_arr(dyn, arr)
    return float(out) if scalar else out


def _check_feasible(model: FailureModel, dyn: EdgeDynamics, length: LengthDist) -> None:
    # A retransmitting link that drops every on-slot can never string
    # together two consecutive on-slots: any support value >= 2 diverges.
    if model.is_retransmit and dyn.q >= 1.0 and length.max_value >= 2:
        raise InfiniteExpectation(
            f"retransmit with q = 1 never completes a length-{length.max_value} crossing"
        )


def _gs_arr(length: LengthDist, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    for v, pr in zip(length.values, length.probs):
        out += pr * z**v
    return out


def _f1_cant_start(dyn, length, z):
    return _gs_arr(length, z)


def _f1_resume(dyn, length, z):
    # Crossing needs d cumulative on-slots; each of the d-1 seams is a
    # (1-q) pass-through or a q-weighted geometric outage.
    a = 1.0 - dyn.q * (1.0 - _gy_arr(dyn, z))
    out = np.zeros_like(z)
    for v, pr in zip(length.values, length.probs):
        out += pr if v == 0 else pr * z**v * a ** (v - 1)
    return out


def _f1_retransmit_identical(dyn, length, z):
    # Condition on the realized length u.  An attempt survives u slots
    # with probability (1-q)^(u-1); each failure costs the partial on-run
    # W < u plus a geometric repair, giving a rational per-u term
    #   z^u (1-q)^(u-1) / (1 - G_Y(z) E[z^W; W < u]).
    q = dyn.q
    g = _gy_arr(dyn, z)
    out = np.zeros_like(z)
    for v, pr in zip(length.values, length.probs):
        if v == 0:
            out += pr
            continue
        ew = np.zeros_like(z)
        for i in range(v - 1):
            ew += (1.0 - q) ** i * z**i
        ew *= q * z
        den = 1.0 - g * ew
        _guard_den(den)
        out += pr * z**v * (1.0 - q) ** (v - 1) / den
    return out


def _retransmit_resampled_nm(dyn, length, z):
    # First-attempt win term N and mid-run failure term M of the renewal
    # equation F_1 = N + G_Y M F_1, everything a finite sum because the
    # length support is finite.  The 1/(1-q) factors of the closed forms
    # cancel here, so q = 1 needs no special casing.
    q = dyn.q
    n_ser = np.zeros_like(z)
    for v, pr in zip(length.values, length.probs):
        n_ser += pr if v == 0 else pr * z**v * (1.0 - q) ** (v - 1)
    m_ser = np.zeros_like(z)
    wmax = length.max_value - 1
    for w in range(1, wmax + 1):
        tail = sum(pr for v, pr in zip(length.values, length.probs) if v > w)
        if tail:
            m_ser += tail * (1.0 - q) ** (w - 1) * z ** (w - 1)
    m_ser *= q * z
    return n_ser, m_ser


def _f1_retransmit_resampled(dyn, length, z):
    n_ser, m_ser = _retransmit_resampled_nm(dyn, length, z)
    den = 1.0 - _gy_arr(dyn, z) * m_ser
    _guard_den(den)
    return n_ser / den


_F1_DISPATCH = {
    FailureModel.CANT_START: _f1_cant_start,
    FailureModel.RESUME: _f1_resume,
    FailureModel.RETRANSMIT_IDENTICAL: _f1_retransmit_identical,
    FailureModel.RETRANSMIT_RESAMPLED: _f1_retransmit_resampled,
}


def f_pair(model: FailureModel, dyn: EdgeDynamics, length: LengthDist, z):
    """Evaluate the conditional per-link delay PGFs (F_0(z), F_1(z)).

    F_1 conditions on the link being on when the packet arrives, F_0 on it
    being off; F_0 = G_Y F_1 always.  Accepts scalar or ndarray ``z``.
    """
    _check_feasible(model, dyn, length)
    arr, scalar = _as_z(z)
    f1 = _F1_DISPATCH[model](dyn, length, arr)
    f0 = _gy_arr(dyn, arr) * f1
    if scalar:
        return float(f0), float(f1)
    return f0, f1


@dataclass(frozen=True)
class GammaPair:
    """Conditional mean per-link delays: gamma1 arriving on, gamma0 arriving off."""

    gamma1: float
    gamma0: float


def gamma_pair(model: FailureModel, dyn: EdgeDynamics, length: LengthDist) -> GammaPair:
    """Mean per-link delay conditioned on the arrival state of the link.

    gamma1 = F_1'(1) from the per-model analytic derivative over the finite
    length support; gamma0 = gamma1 + 1/p since the extra off-period wait
    is geometric with mean 1/p.
    """
    _check_feasible(model, dyn, length)
    p, q = dyn.p, dyn.q
    if model is FailureModel.CANT_START:
        g1 = length.mean()
    elif model is FailureModel.RESUME:
        g1 = math.fsum(
            pr * (v + (v - 1) * q / p)
            for v, pr in zip(length.values, length.probs)
            if v >= 1
        )
    elif model is FailureModel.RETRANSMIT_IDENTICAL:
        terms = []
        for v, pr in zip(length.values, length.probs):
            if v == 0:
                continue
            surv = (1.0 - q) ** (v - 1)
            # d/dz [1 - G_Y(z) E_v(z)] at z = 1
            e_v = 1.0 - surv  # E_v(1) = Pr(W < v)
            e_v_prime = q * math.fsum((1.0 - q) ** i * (i + 1) for i in range(v - 1))
            d_prime = -(e_v / p + e_v_prime)
            terms.append(pr * (v * surv - d_prime) / surv)
        g1 = math.fsum(terms)
    else:  # RETRANSMIT_RESAMPLED
        pairs = list(zip(length.values, length.probs))
        n1 = math.fsum(v * pr * (1.0 - q) ** (v - 1) for v, pr in pairs if v >= 1)
        tails = []
        for w in range(1, length.max_value):
            tails.append((w, sum(pr for v, pr in pairs if v > w)))
        m1 = q * math.fsum(t * (1.0 - q) ** (w - 1) for w, t in tails)
        m1_prime = q * math.fsum(w * t * (1.0 - q) ** (w - 1) for w, t in tails)
        c = 1.0 - m1  # = N(1), the per-attempt success weight
        d_prime = -(m1 / p + m1_prime)
        g1 = (n1 - d_prime) / c
    return GammaPair(gamma1=g1, gamma0=g1 + 1.0 / p)


@dataclass(frozen=True)
class LinkPgfPair:
    """Bound (failure model, dynamics, length) triple with F_0/F_1 evaluators."""

    model: FailureModel
    dyn: EdgeDynamics
    length: LengthDist

    def eval_f1(self, z):
        return f_pair(self.model, self.dyn, self.length, z)[1]

    def eval_f0(self, z):
        return f_pair(self.model, self.dyn, self.length, z)[0]

    def gammas(self) -> GammaPair:
        return gamma_pair(self.model, self.dyn, self.length)


def _beta_powers(beta: float, count: int) -> np.ndarray:
    # Iterated multiplication; beta may be negative, so no pow/log tricks.
    out = np.empty(count)
    acc = 1.0
    for k in range(count):
        out[k] = acc
        acc *= beta
    return out


def _link_f_values(path: PathSpec, zs: np.ndarray):
    """(f0, f1) arrays over the z-grid for each link, shared by length."""
    cache: dict[LengthDist, tuple[np.ndarray, np.ndarray]] = {}
    for ld in path.lengths:
        if ld not in cache:
            cache[ld] = f_pair(path.model, path.dynamics, ld, zs)
    return [cache[ld] for ld in path.lengths]


def _g_rows(path: PathSpec):
    """Yield rows of the triangular table: row i holds G_i(beta^k), k = 0..n-i."""
    n = path.n
    dyn = path.dynamics
    pi0, pi1 = dyn.pi0, dyn.pi1
    zs = _beta_powers(dyn.beta, n + 1)
    fvals = _link_f_values(path, zs[:n])
    row = np.ones(n + 1)
    yield row
    for i in range(1, n + 1):
        width = n - i + 1
        f0, f1 = fvals[i - 1]
        phi = pi0 * f0[:width] + pi1 * f1[:width]
        psi = f0[:width] - f1[:width]
        xi = path.x[i - 1]
        chi = (1 - xi) * pi1 - xi * pi0
        row = phi * row[:width] + chi * psi * row[1 : width + 1]
        yield row


@dataclass(frozen=True)
class PgfTable:
    """Triangular table values[i][k] = G_i(beta^k) for i = 0..n, k = 0..n-i."""

    beta: float
    values: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.values) - 1


def pgf_table(path: PathSpec) -> PgfTable:
    """Fill the full table of arrival-time PGF values at powers of beta."""
    rows = tuple(row for row in _g_rows(path))
    return PgfTable(beta=path.dynamics.beta, values=rows)


def ett(path: PathSpec) -> tuple[float, np.ndarray]:
    """Expected traversal time and per-node expected arrival times.

    Returns ``(total, per_node)`` with ``per_node[i]`` the expected time the
    packet reaches node i (``per_node[0] = 0``, ``per_node[n] = total``).
    Link i contributes its state-averaged mean delay plus a correction
    proportional to G_{i-1}(beta), which measures how far the link's state
    at the packet's arrival still remembers the initial bit.
    """
    n = path.n
    dyn = path.dynamics
    pi0, pi1 = dyn.pi0, dyn.pi1
    gcache: dict[LengthDist, GammaPair] = {}
    for ld in path.lengths:
        if ld not in gcache:
            gcache[ld] = gamma_pair(path.model, dyn, ld)
    per_node = np.zeros(n + 1)
    total = 0.0
    prev = None
    for i, row in enumerate(_g_rows(path)):
        if i >= 1:
            gam = gcache[path.lengths[i - 1]]
            xi = path.x[i - 1]
            chi = (1 - xi) * pi1 - xi * pi0
            total += (
                pi0 * gam.gamma0
                + pi1 * gam.gamma1
                + (gam.gamma0 - gam.gamma1) * chi * prev[1]
            )
            per_node[i] = total
        prev = row
    return total, per_node


# --- truncated power-series arithmetic for the latency distribution ---


def _series_mul(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    return np.convolve(a, b)[: k + 1]


def _series_recip(d: np.ndarray, k: int) -> np.ndarray:
    # Coefficients of 1/d(z) via the linear recurrence on d's coefficients;
    # requires d[0] != 0.
    if abs(d[0]) < _DEN_FLOOR:
        raise NumericalSingularity("series reciprocal of a zero constant term")
    r = np.empty(k + 1)
    r[0] = 1.0 / d[0]
    for t in range(1, k + 1):
        r[t] = -np.dot(d[1 : t + 1], r[t - 1 :: -1]) / d[0]
    return r


def _series_gy(dyn: EdgeDynamics, k: int) -> np.ndarray:
    out = np.zeros(k + 1)
    if k >= 1:
        out[1:] = dyn.p * (1.0 - dyn.p) ** np.arange(k)
    return out


def _series_poly(length: LengthDist, k: int, weight=lambda v, pr: pr) -> np.ndarray:
    out = np.zeros(k + 1)
    for v, pr in zip(length.values, length.probs):
        if v <= k:
            out[v] += weight(v, pr)
    return out


def _series_shift(s: np.ndarray, u: int, k: int) -> np.ndarray:
    out = np.zeros(k + 1)
    out[u:] = s[: k + 1 - u]
    return out


def _f1_series(model: FailureModel, dyn: EdgeDynamics, length: LengthDist, k: int) -> np.ndarray:
    q = dyn.q
    gy_ser = _series_gy(dyn, k)
    if model is FailureModel.CANT_START:
        return _series_poly(length, k)
    if model is FailureModel.RESUME:
        a = q * gy_ser
        a[0] += 1.0 - q  # a(z) = 1 - q (1 - G_Y(z))
        out = np.zeros(k + 1)
        one = np.zeros(k + 1)
        one[0] = 1.0
        power_cache = {0: one}
        for v, pr in sorted(zip(length.values, length.probs)):
            if v == 0:
                out[0] += pr
                continue
            e = v - 1
            if e not in power_cache:
                base = max(i for i in power_cache if i <= e)
                acc = power_cache[base]
                for i in range(base, e):
                    acc = _series_mul(acc, a, k)
                    power_cache[i + 1] = acc
            out += pr * _series_shift(power_cache[e], v, k)
        return out
    if model is FailureModel.RETRANSMIT_IDENTICAL:
        out = np.zeros(k + 1)
        for v, pr in zip(length.values, length.probs):
            if v == 0:
                out[0] += pr
                continue
            e_v = np.zeros(k + 1)
            for i in range(v - 1):
                if i + 1 <= k:
                    e_v[i + 1] = q * (1.0 - q) ** i
            den = -_series_mul(gy_ser, e_v, k)
            den[0] += 1.0
            out += pr * (1.0 - q) ** (v - 1) * _series_shift(_series_recip(den, k), v, k)
        return out
    # RETRANSMIT_RESAMPLED
    n_ser = _series_poly(length, k, weight=lambda v, pr: pr * (1.0 - q) ** max(v - 1, 0))
    m_ser = np.zeros(k + 1)
    for w in range(1, length.max_value):
        tail = sum(pr for v, pr in zip(length.values, length.probs) if v > w)
        if tail and w <= k:
            m_ser[w] = tail * q * (1.0 - q) ** (w - 1)
    den = -_series_mul(gy_ser, m_ser, k)
    den[0] += 1.0
    return _series_mul(n_ser, _series_recip(den, k), k)


def _f_series(model, dyn, length, k):
    _check_feasible(model, dyn, length)
    f1 = _f1_series(model, dyn, length, k)
    f0 = _series_mul(_series_gy(dyn, k), f1, k)
    return f0, f1


@dataclass(frozen=True)
class TruncatedPmf:
    """Latency probabilities Pr(T = t) for t = 0..K plus the unaccounted tail."""

    coeffs: np.ndarray
    tail_mass: float

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray) -> "TruncatedPmf":
        coeffs = np.where((coeffs < 0.0) & (coeffs > -1e-12), 0.0, coeffs)
        tail = 1.0 - math.fsum(coeffs.tolist())
        return cls(coeffs=coeffs, tail_mass=tail)

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    def truncated_mean(self) -> float:
        """Mean of the captured mass; a lower bound on the full expectation."""
        return float(np.dot(np.arange(len(self.coeffs)), self.coeffs))


def pmf(path: PathSpec, k: int | None = None) -> TruncatedPmf:
    """Latency distribution Pr(T = t) up to degree ``k``, tail mass reported.

    Runs the table recursion in truncated power-series arithmetic: the
    per-link rational F forms are expanded by linear recurrence on their
    denominator coefficients, and substituting z -> beta z multiplies
    coefficient t by beta^t.  When ``k`` is omitted it defaults to
    ceil(20 * (ett + 1)).
    """
    if k is None:
        total, _ = ett(path)
        k = max(1, math.ceil(20.0 * (total + 1.0)))
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > _PMF_MAX_K:
        raise ConfigurationError(f"k = {k} exceeds the coefficient budget {_PMF_MAX_K}")
    dyn = path.dynamics
    pi0, pi1 = dyn.pi0, dyn.pi1
    beta_pows = _beta_powers(dyn.beta, k + 1)
    fcache: dict[LengthDist, tuple[np.ndarray, np.ndarray]] = {}
    g = np.zeros(k + 1)
    g[0] = 1.0
    for i in range(1, path.n + 1):
        ld = path.lengths[i - 1]
        if ld not in fcache:
            fcache[ld] = _f_series(path.model, dyn, ld, k)
        f0, f1 = fcache[ld]
        phi = pi0 * f0 + pi1 * f1
        psi = f0 - f1
        xi = path.x[i - 1]
        chi = (1 - xi) * pi1 - xi * pi0
        g = _series_mul(phi, g, k) + chi * _series_mul(psi, g * beta_pows, k)
    return TruncatedPmf.from_coeffs(g)
