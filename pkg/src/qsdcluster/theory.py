"""Mean-field constants and large-deviation rate exponents for the PL-SBM."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ParameterError

THETA_MAX = 50.0
THETA_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MeanFieldConstants:
    a: float
    b: float
    delta: float
    rho: float
    gamma: float
    cbar: float
    lambda1: float
    lambda2: float
    eigengap: float
    # ||Abar_i pibar_i||_1 / (sqrt(n) log n); differs from ``cbar`` by a factor gamma
    cbar_norm: float
    warnings: tuple = ()


def mean_field_constants(a: float, b: float, delta: float) -> MeanFieldConstants:
    if b <= 0:
        raise ParameterError(f"b must be positive (rho is undefined at b={b})")
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"delta must lie in [0, 1], got {delta}")
    warn = []
    if a <= b:
        warn.append("a <= b: rate exponents may be zero or meaningless")
    if a + b <= 4:
        warn.append("a + b <= 4: connected-regime rate guarantees do not apply")

    rho = (a * delta + math.sqrt(a * a * delta * delta + 4.0 * (1.0 - delta) * b * b)) / (2.0 * b)
    gamma = math.sqrt((1.0 - delta + rho * rho) / 2.0)
    cbar = 0.25 * (a * (rho + (1.0 - delta) ** 2) + b * (rho + 1.0) * (1.0 - delta))

    # eigenvalues of [[(1-d)a, b], [(1-d)b, a]] / (a+b)
    tr = (2.0 - delta) * a / (a + b)
    det = (1.0 - delta) * (a - b) / (a + b)
    disc = math.sqrt(max(tr * tr - 4.0 * det, 0.0))
    lam1, lam2 = (tr + disc) / 2.0, (tr - disc) / 2.0
    return MeanFieldConstants(a, b, delta, rho, gamma, cbar, lam1, lam2, lam1 - lam2, cbar / gamma, tuple(warn))


def mean_field_eigenvector(constants: MeanFieldConstants, n: int) -> np.ndarray:
    """``pibar_i`` in the layout ``[U_i (size (1-delta) n/2), C_-i (size n/2)]``."""
    u = (1.0 - constants.delta) * n / 2.0
    if n % 2 or abs(u - round(u)) > 1e-9:
        raise ParameterError(f"(1 - delta) n / 2 must be an integer, got {u}")
    u = int(round(u))
    c = 1.0 / (constants.gamma * math.sqrt(n))
    return np.concatenate([np.full(u, c), np.full(n // 2, constants.rho * c)])


def mean_field_instance(a: float, b: float, delta: float, n: int, scale: float | None = None):
    """Dense expected adjacency ``Abar`` (self-weights included) with its labels.

    Layout: community +1 is ``0..n/2-1`` with ``R_+`` its first ``delta n/2``
    nodes; community -1 is ``n/2..n-1`` with ``R_-`` its last ``delta n/2``.
    Returns ``(Abar, sigma, ell)``.
    """
    if scale is None:
        scale = math.log(n)
    m = n // 2
    r = delta * n / 2.0
    if n % 2 or abs(r - round(r)) > 1e-9:
        raise ParameterError(f"delta n / 2 must be an integer, got {r}")
    r = int(round(r))
    sigma = np.repeat(np.array([1, -1], dtype=np.int8), m)
    block = (scale / n) * np.array([[a, b], [b, a]])
    abar = np.kron(block, np.ones((m, m)))
    ell = np.zeros(n, dtype=np.int8)
    ell[:r] = 1
    ell[n - r :] = -1
    return abar, sigma, ell


# ----------------------------------------------------------------- rate function


def chernoff_objective(theta, a, b, delta, alpha, beta):
    """``a + b - (1-d)(a e^{-t alpha} + b e^{t alpha}) - d(a e^{-t beta} + b e^{t beta})``."""
    theta = np.asarray(theta, dtype=np.float64)
    return (a + b
            - (1.0 - delta) * (a * np.exp(-theta * alpha) + b * np.exp(theta * alpha))
            - delta * (a * np.exp(-theta * beta) + b * np.exp(theta * beta)))


@dataclass(frozen=True)
class Rate:
    value: float
    theta_star: float
    boundary: bool = False


def golden_section_max(f, lo, hi, tol=THETA_TOL):
    """Maximizer of a unimodal ``f`` on ``[lo, hi]`` to an interval width of ``tol``."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def rate_function(a: float, b: float, delta: float, alpha: float, beta: float) -> Rate:
    """``I(alpha, beta) = 1/2 sup_{theta > 0}`` of :func:`chernoff_objective`.

    The objective depends on theta only through ``theta*alpha`` and
    ``theta*beta``, so the search runs over ``theta * max(|alpha|, |beta|)`` in
    ``(0, 50]``.
    """
    if a <= 0 or b <= 0:
        raise ParameterError("a and b must be positive")
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"delta must lie in [0, 1], got {delta}")
    s = max(abs(alpha), abs(beta))
    slope0 = (a - b) * ((1.0 - delta) * alpha + delta * beta)
    if s == 0.0 or slope0 <= 0.0:
        # concave with f(0) = 0 and f'(0) <= 0: supremum approached as theta -> 0
        return Rate(0.0, 0.0, True)
    hi = THETA_MAX / s
    obj = lambda t: float(chernoff_objective(t, a, b, delta, alpha, beta))
    theta = golden_section_max(obj, 0.0, hi)
    return Rate(0.5 * obj(theta), theta, hi - theta <= 10 * THETA_TOL)


@dataclass(frozen=True)
class RateReport:
    a: float
    b: float
    delta: float
    rho: float
    gamma: float
    cbar: float
    lambda1: float
    lambda2: float
    I_qsd: float
    I_vote: float
    I_mixed: float
    minimax_exponent: float
    theta_star: dict = field(default_factory=dict)
    I_vote_closed_form: float = float("nan")
    I_mixed_closed_form: float = float("nan")
    closed_forms_agree: bool = True
    warnings: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d


def rate_report(a: float, b: float, delta: float, check_tol: float = 1e-8) -> RateReport:
    c = mean_field_constants(a, b, delta)
    q = rate_function(a, b, delta, c.rho - 1.0, c.rho)
    v = rate_function(a, b, delta, 0.0, 1.0)
    m = rate_function(a, b, delta, c.rho - 1.0, c.rho - 1.0)
    gap2 = (math.sqrt(a) - math.sqrt(b)) ** 2 / 2.0
    warn = list(c.warnings)
    agree = True
    if a > b:
        agree = abs(v.value - delta * gap2) <= check_tol and abs(m.value - gap2) <= check_tol
        if not agree:
            warn.append("numerical rate disagrees with closed form")
    for name, r in (("qsd", q), ("vote", v), ("mixed", m)):
        if r.boundary and a > b:
            warn.append(f"{name}: supremum at the search boundary")
    return RateReport(
        a=a, b=b, delta=delta, rho=c.rho, gamma=c.gamma, cbar=c.cbar,
        lambda1=c.lambda1, lambda2=c.lambda2,
        I_qsd=q.value, I_vote=v.value, I_mixed=m.value, minimax_exponent=gap2,
        theta_star={"qsd": q.theta_star, "vote": v.theta_star, "mixed": m.theta_star},
        I_vote_closed_form=delta * gap2, I_mixed_closed_form=gap2,
        closed_forms_agree=agree, warnings=tuple(warn),
    )
