"""Linear-spectral-statistic test values and their limiting Gaussian
parameters.

Four statistic/parameter cases are covered, keyed by strings:

  "wigner"             untransformed spiked Wigner
  "wigner_transformed" score-transformed spiked Wigner
  "rect"               untransformed rectangular Gram spectrum
  "rect_transformed"   score-transformed additive rectangular

For each case the closed-form null mean m0, rank-k mean mk = m0 + k V0 / 2
and variance V0 are provided, together with the general Chebyshev-series
route which reproduces them for the optimal test functions and extends to
arbitrary analytic functions and distinct per-spike SNRs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SupercriticalSpectrumError, ValidationError
from .noise import NoiseFunctionals

CASES = ("wigner", "wigner_transformed", "rect", "rect_transformed")


class SeriesConvergenceWarning(UserWarning):
    """Truncated Chebyshev series tail estimate exceeded tolerance."""


@dataclass(frozen=True)
class CltParams:
    """Limiting Gaussian mean family and variance for one statistic case."""

    case: str
    omega: float
    m0: float
    V0: float

    def mk(self, k):
        """Mean under a rank-k spike: m0 + k V0 / 2."""
        return self.m0 + k * self.V0 / 2.0

    def m_mid(self, k1, k2):
        """Decision threshold (mk(k1) + mk(k2)) / 2."""
        return 0.5 * (self.mk(k1) + self.mk(k2))


# ---------------------------------------------------------------------------
# Test statistics
# ---------------------------------------------------------------------------

def _log_terms(mu, singular_location, case):
    args = singular_location - mu
    if np.min(args) <= 0.0:
        raise SupercriticalSpectrumError(np.max(mu), singular_location, case)
    return np.log(args)


def stat_wigner(spectrum, omega, w2, w4):
    """L_omega for a spiked Wigner spectrum (eigenvalues of M)."""
    mu = np.asarray(spectrum, dtype=float)
    if not 0.0 <= omega < 1.0:
        raise DomainError(f"omega must lie in [0, 1), got {omega}")
    if omega == 0.0:
        return 0.0
    N = mu.size
    rt = math.sqrt(omega)
    logs = _log_terms(rt * mu, 1.0 + omega, "wigner statistic")
    return (
        -np.sum(logs)
        + omega * N / 2.0
        + rt * (2.0 / w2 - 1.0) * np.sum(mu)
        + omega * (1.0 / (w4 - 1.0) - 0.5) * (np.sum(mu * mu) - N)
    )


def stat_rect(spectrum, omega, d0, w4):
    """L_omega for a rectangular model, from the Gram-matrix spectrum."""
    mu = np.asarray(spectrum, dtype=float)
    if not 0.0 < omega < math.sqrt(d0):
        raise DomainError(f"omega must lie in (0, sqrt(d0)), got {omega}")
    M = mu.size
    loc = (1.0 + d0 / omega) * (1.0 + omega)
    logs = _log_terms(mu, loc, "rectangular statistic")
    return (
        -np.sum(logs)
        + (omega / d0) * (2.0 / (w4 - 1.0) - 1.0) * (np.sum(mu) - M)
        + M * (omega / d0 - math.log(omega / d0)
               - (1.0 - d0) / d0 * math.log(1.0 + omega))
    )


def stat_wigner_transformed(spectrum, omega, funcs, w2):
    """L~_omega for the spectrum of a score-transformed Wigner matrix."""
    mu = np.asarray(spectrum, dtype=float)
    F_g, F_gd, G_H, w4t = funcs.F_g, funcs.F_gd, funcs.G_H, funcs.w4_tilde
    eff = omega * F_g
    if not 0.0 <= eff < 1.0:
        raise DomainError(f"omega * F_g must lie in [0, 1), got {eff}")
    if omega == 0.0:
        return 0.0
    N = mu.size
    rt = math.sqrt(eff)
    logs = _log_terms(rt * mu, 1.0 + eff, "transformed wigner statistic")
    return (
        -np.sum(logs)
        + eff * N / 2.0
        + math.sqrt(omega) * (2.0 * math.sqrt(F_gd) / w2 - math.sqrt(F_g))
        * np.sum(mu)
        + omega * (G_H / (w4t - 1.0) - F_g / 2.0) * (np.sum(mu * mu) - N)
    )


def stat_rect_transformed(spectrum, omega, d0, funcs):
    """L~_omega for the Gram spectrum of a score-transformed additive model."""
    mu = np.asarray(spectrum, dtype=float)
    F_g, G_H, w4t = funcs.F_g, funcs.G_H, funcs.w4_tilde
    eff = omega * F_g
    if not 0.0 < eff < math.sqrt(d0):
        raise DomainError(f"omega * F_g must lie in (0, sqrt(d0)), got {eff}")
    M = mu.size
    loc = (1.0 + d0 / eff) * (1.0 + eff)
    logs = _log_terms(mu, loc, "transformed rectangular statistic")
    return (
        -np.sum(logs)
        + (2.0 * omega / d0) * (G_H / (w4t - 1.0) - F_g / 2.0)
        * (np.sum(mu) - M)
        + M * (eff / d0 - math.log(eff / d0)
               - (1.0 - d0) / d0 * math.log(1.0 + eff))
    )


# ---------------------------------------------------------------------------
# Closed-form CLT parameters
# ---------------------------------------------------------------------------

def clt_wigner(omega, w2, w4):
    if not 0.0 < omega < 1.0:
        raise DomainError(f"omega must lie in (0, 1), got {omega}")
    if w4 <= 1.0 or w2 <= 0.0:
        raise DomainError("need w4 > 1 and w2 > 0")
    m0 = (
        -0.5 * math.log(1.0 - omega)
        + ((w2 - 1.0) / (w4 - 1.0) - 0.5) * omega
        + (w4 - 3.0) * omega**2 / 4.0
    )
    V0 = (
        -2.0 * math.log(1.0 - omega)
        + (4.0 / w2 - 2.0) * omega
        + (2.0 / (w4 - 1.0) - 1.0) * omega**2
    )
    return CltParams("wigner", omega, m0, V0)


def clt_rect(omega, d0, w4):
    if not 0.0 < omega < math.sqrt(d0):
        raise DomainError(f"omega must lie in (0, sqrt(d0)), got {omega}")
    if w4 <= 1.0:
        raise DomainError("need w4 > 1")
    q = omega**2 / d0
    m0 = -0.5 * math.log(1.0 - q) + 0.5 * q * (w4 - 3.0)
    V0 = -2.0 * math.log(1.0 - q) + 2.0 * q * (2.0 / (w4 - 1.0) - 1.0)
    return CltParams("rect", omega, m0, V0)


def clt_wigner_transformed(omega, funcs, w2):
    F_g, F_gd, G_H, w4t = funcs.F_g, funcs.F_gd, funcs.G_H, funcs.w4_tilde
    eff = omega * F_g
    if not 0.0 < eff < 1.0:
        raise DomainError(f"omega * F_g must lie in (0, 1), got {eff}")
    m0 = (
        -0.5 * math.log(1.0 - eff)
        + ((w2 - 1.0) * G_H / (w4t - 1.0) - F_g / 2.0) * omega
        + (w4t - 3.0) * eff**2 / 4.0
    )
    V0 = (
        -2.0 * math.log(1.0 - eff)
        + (4.0 * F_gd / w2 - 2.0 * F_g) * omega
        + (2.0 * G_H**2 / (w4t - 1.0) - F_g**2) * omega**2
    )
    return CltParams("wigner_transformed", omega, m0, V0)


def clt_rect_transformed(omega, d0, funcs):
    F_g, G_H, w4t = funcs.F_g, funcs.G_H, funcs.w4_tilde
    eff = omega * F_g
    if not 0.0 < eff < math.sqrt(d0):
        raise DomainError(f"omega * F_g must lie in (0, sqrt(d0)), got {eff}")
    q = eff**2 / d0
    m0 = -0.5 * math.log(1.0 - q) + 0.5 * q * (w4t - 3.0)
    V0 = (
        -2.0 * math.log(1.0 - q)
        + (4.0 * omega**2 / d0) * (G_H**2 / (w4t - 1.0) - F_g**2 / 2.0)
    )
    return CltParams("rect_transformed", omega, m0, V0)


def clt_params_for(case, omega, *, w2=None, w4=None, d0=None, funcs=None):
    """Dispatch to the closed-form CLT constructor for a case string."""
    if case == "wigner":
        return clt_wigner(omega, w2, w4)
    if case == "rect":
        return clt_rect(omega, d0, w4)
    if case == "wigner_transformed":
        return clt_wigner_transformed(omega, funcs, w2)
    if case == "rect_transformed":
        return clt_rect_transformed(omega, d0, funcs)
    raise ValidationError(f"unknown CLT case {case!r}")


# ---------------------------------------------------------------------------
# Chebyshev-series route
# ---------------------------------------------------------------------------

def chebyshev_tau_array(f, L_max, order=None):
    """tau_0 .. tau_L of f against the arcsine weight on [-2, 2].

    tau_l = (1/pi) int T_l(x/2) f(x) / sqrt(4 - x^2) dx, evaluated by
    Gauss-Chebyshev quadrature: x_j = 2 cos((j + 1/2) pi / n).
    """
    n = int(order) if order else max(4 * L_max, 256)
    theta = (np.arange(n) + 0.5) * np.pi / n
    fx = np.asarray(f(2.0 * np.cos(theta)), dtype=float)
    ells = np.arange(L_max + 1)
    return (np.cos(np.outer(ells, theta)) @ fx) / n


def chebyshev_tau(f, ell, L_max=0):
    """Single Chebyshev coefficient; quadrature order >= 4 * max(ell, L_max)."""
    L = max(int(ell), int(L_max), 1)
    return chebyshev_tau_array(f, L, order=max(4 * L, 256))[int(ell)]


def _as_omegas(omega):
    if np.isscalar(omega):
        return (float(omega),)
    return tuple(float(w) for w in omega)


def _shifted(f, d0):
    """f~(x) = f(sqrt(d0) x + 1 + d0), mapping [-2,2] onto the MP bulk."""
    rt = math.sqrt(d0)
    return lambda x: f(rt * np.asarray(x) + 1.0 + d0)


def _series_setup(f, case, d0, L_max):
    if case in ("wigner", "wigner_transformed"):
        g = f
    elif case in ("rect", "rect_transformed"):
        if d0 is None:
            raise ValidationError("rect cases require d0")
        g = _shifted(f, d0)
    else:
        raise ValidationError(f"unknown CLT case {case!r}")
    tau = chebyshev_tau_array(g, L_max)
    edge = 0.25 * (float(g(np.asarray(2.0))) + float(g(np.asarray(-2.0))))
    return g, tau, edge


def _warn_tail(ratios, tau, tol):
    if not ratios:
        return
    r = max(abs(r) for r in ratios)
    if r >= 1.0:
        raise DomainError(f"series ratio {r} >= 1: SNR outside the "
                          "subcritical domain")
    L = len(tau) - 1
    bound = max(abs(tau[-1]), abs(tau[-2])) * r ** (L + 1) / (1.0 - r)
    if bound > tol:
        warnings.warn(
            f"series tail estimate {bound:.3e} exceeds tolerance {tol:.1e} "
            f"at L_max={L}",
            SeriesConvergenceWarning,
            stacklevel=3,
        )


def clt_mean_series(f, case, omegas, L_max=200, *, w2=None, w4=None, d0=None,
                    funcs=None, tail_tol=1e-8):
    """Limiting LSS mean of f via the truncated Chebyshev series.

    omegas is the list of per-spike SNRs (empty for the null mean). The
    transformed cases substitute the transformed fourth moment and carry
    their low-order correction terms in tau_1 / tau_2.
    """
    if L_max < 20:
        raise ValidationError("L_max must be at least 20")
    oms = _as_omegas(omegas)
    _, tau, edge = _series_setup(f, case, d0, L_max)
    ells = np.arange(L_max + 1)

    if case == "wigner":
        if w2 is None or w4 is None:
            raise ValidationError("wigner case requires w2 and w4")
        m = edge - tau[0] / 2.0 + (w2 - 2.0) * tau[2] + (w4 - 3.0) * tau[4]
        for w in oms:
            rt = math.sqrt(w)
            m += np.sum(rt ** ells[1:] * tau[1:])
        _warn_tail([math.sqrt(w) for w in oms], tau, tail_tol)
        return float(m)

    if case == "wigner_transformed":
        if w2 is None or funcs is None:
            raise ValidationError("wigner_transformed case requires w2 and funcs")
        m = (edge - tau[0] / 2.0 + (w2 - 2.0) * tau[2]
             + (funcs.w4_tilde - 3.0) * tau[4])
        for w in oms:
            rt = math.sqrt(w * funcs.F_g)
            m += (math.sqrt(w * funcs.F_gd) * tau[1]
                  + w * funcs.G_H * tau[2]
                  + np.sum(rt ** ells[3:] * tau[3:]))
        _warn_tail([math.sqrt(w * funcs.F_g) for w in oms], tau, tail_tol)
        return float(m)

    if case == "rect":
        if w4 is None:
            raise ValidationError("rect case requires w4")
        m = edge - tau[0] / 2.0 + (w4 - 3.0) * tau[2]
        for w in oms:
            r = w / math.sqrt(d0)
            m += np.sum(r ** ells[1:] * tau[1:])
        _warn_tail([w / math.sqrt(d0) for w in oms], tau, tail_tol)
        return float(m)

    # rect_transformed
    if funcs is None:
        raise ValidationError("rect_transformed case requires funcs")
    m = edge - tau[0] / 2.0 + (funcs.w4_tilde - 3.0) * tau[2]
    for w in oms:
        r = w * funcs.F_g / math.sqrt(d0)
        m += ((w / math.sqrt(d0)) * (funcs.G_H - funcs.F_g) * tau[1]
              + np.sum(r ** ells[1:] * tau[1:]))
    _warn_tail([w * funcs.F_g / math.sqrt(d0) for w in oms], tau, tail_tol)
    return float(m)


def clt_variance_series(f, case, L_max=200, *, w2=None, w4=None, d0=None,
                        funcs=None):
    """Limiting LSS variance of f via the truncated Chebyshev series."""
    if L_max < 20:
        raise ValidationError("L_max must be at least 20")
    _, tau, _ = _series_setup(f, case, d0, L_max)
    ells = np.arange(L_max + 1)
    quad_sum = 2.0 * np.sum(ells[1:] * tau[1:] ** 2)

    if case in ("wigner", "wigner_transformed"):
        if w2 is None:
            raise ValidationError("wigner cases require w2")
        fourth = w4 if case == "wigner" else funcs.w4_tilde
        if fourth is None:
            raise ValidationError("missing fourth-moment parameter")
        return float((w2 - 2.0) * tau[1] ** 2
                     + 2.0 * (fourth - 3.0) * tau[2] ** 2 + quad_sum)

    fourth = w4 if case == "rect" else funcs.w4_tilde
    if fourth is None:
        raise ValidationError("missing fourth-moment parameter")
    return float(quad_sum + (fourth - 3.0) * tau[1] ** 2)


# ---------------------------------------------------------------------------
# Optimal test functions
# ---------------------------------------------------------------------------

def _checked_log(arg):
    arg = np.asarray(arg)
    if np.any(arg <= 0.0):
        raise DomainError("optimal test function evaluated at or beyond the "
                          "log singularity")
    return np.log(arg)


def _phi_one(case, omega, w2, w4, d0, funcs):
    if case == "wigner":
        rt = math.sqrt(omega)
        c1 = rt * (2.0 / w2 - 1.0)
        c2 = omega * (1.0 / (w4 - 1.0) - 0.5)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return (-_checked_log(1.0 - rt * x + omega)
                    + c1 * x + c2 * x * x)
        return phi

    if case == "wigner_transformed":
        eff = omega * funcs.F_g
        rt = math.sqrt(eff)
        c1 = math.sqrt(omega) * (2.0 * math.sqrt(funcs.F_gd) / w2
                                 - math.sqrt(funcs.F_g))
        c2 = omega * (funcs.G_H / (funcs.w4_tilde - 1.0) - funcs.F_g / 2.0)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return (-_checked_log(1.0 - rt * x + eff) + c1 * x + c2 * x * x)
        return phi

    if case == "rect":
        c1 = (omega / d0) * (2.0 / (w4 - 1.0) - 1.0)
        loc = (1.0 + d0 / omega) * (1.0 + omega)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return c1 * x - _checked_log(loc - x)
        return phi

    if case == "rect_transformed":
        eff = omega * funcs.F_g
        c1 = (2.0 * omega / d0) * (funcs.G_H / (funcs.w4_tilde - 1.0)
                                   - funcs.F_g / 2.0)
        loc = (1.0 + d0 / eff) * (1.0 + eff)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return c1 * x - _checked_log(loc - x)
        return phi

    raise ValidationError(f"unknown CLT case {case!r}")


def optimal_phi(case, omega, *, w2=None, w4=None, d0=None, funcs=None):
    """Evaluator for the variance-optimal test function of a case.

    omega may be a scalar or a list of per-spike SNRs; the multi-SNR
    function is the sum of the single-SNR ones.
    """
    oms = _as_omegas(omega)
    parts = [_phi_one(case, w, w2, w4, d0, funcs) for w in oms]
    if len(parts) == 1:
        return parts[0]

    def phi(x):
        return sum(p(x) for p in parts)
    return phi
