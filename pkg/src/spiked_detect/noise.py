"""Noise distributions and the scalar functionals consumed by the
entrywise transforms and the transformed CLT parameter formulas.

A noise model is a symmetric unit-variance density g (plus an optional
diagonal density g_d) with closed-form first and second derivatives and a
sampler. Everything downstream (Fisher information, score transforms,
fourth-moment functionals) is computed from these by adaptive quadrature
on a truncated domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import ConsistencyError, QuadratureError, ValidationError

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """A noise distribution: density g, derivatives, diagonal law, sampler.

    All callables are vectorized over numpy arrays. ``score``/``score_prime``
    are numerically stable closed forms of -g'/g and its derivative for the
    built-in kinds; when absent they are derived from the density ratios.
    """

    kind: str
    g: Callable
    g_prime: Callable
    g_double_prime: Callable
    w2: float = 1.0
    sampler: Callable | None = None
    score_fn: Callable | None = None
    score_prime_fn: Callable | None = None
    g_d: Callable | None = None          # diagonal density, defaults to g
    g_d_prime: Callable | None = None
    score_d_fn: Callable | None = None
    sampler_d: Callable | None = None
    params: dict = field(default_factory=dict)

    @property
    def label(self):
        if self.kind == "bimodal":
            return f"bimodal(a={self.params['a']:.6g})"
        return self.kind

    def diag_density(self):
        return self.g_d if self.g_d is not None else self.g

    def diag_density_prime(self):
        return self.g_d_prime if self.g_d_prime is not None else self.g_prime


@dataclass(frozen=True)
class NoiseFunctionals:
    """Scalar functionals of a noise model used by the transformed tests."""

    F_g: float        # Fisher information of g, >= 1
    F_gd: float       # Fisher information of the diagonal density
    G_H: float        # (1 / 2F_g) * int g'^2 g'' / g^2
    w4_tilde: float   # (1 / F_g^2) * int g'^4 / g^3


@dataclass(frozen=True)
class TransformFunctionals:
    """Moments of the mixed score map q(x) = -g'(x)/g(x) + alpha*x under g."""

    alpha: float
    M_q: float   # E[q']  = F_g + alpha
    V_q: float   # E[q^2] = F_g + 2*alpha + alpha^2
    E_q: float   # E[x q] = 1 + alpha


# ---------------------------------------------------------------------------
# Quadrature plumbing
# ---------------------------------------------------------------------------

def _tail_cutoff(g):
    """Smallest doubling T with g(+-T) < 1e-16 * g(0)."""
    g0 = float(g(0.0))
    if not (g0 > 0.0):
        raise ValidationError("density must be positive at 0")
    T = 8.0
    while float(g(T)) > 1e-16 * g0 or float(g(-T)) > 1e-16 * g0:
        T *= 2.0
        if T > 1024.0:
            raise ValidationError(
                "density tail does not decay below 1e-16 * g(0) by |x| = 1024"
            )
    return T


def _quad(f, T, breakpoints=(), rel_tol=1e-10):
    """Adaptive quadrature on [-T, T]; rel_tol=None means absolute-only."""
    pts = sorted(p for p in breakpoints if -T < p < T)
    val, err = integrate.quad(
        f, -T, T, points=pts or None, epsabs=1e-14, epsrel=1e-13, limit=400
    )
    tol = 1e-10 if rel_tol is None else max(rel_tol * abs(val), 1e-10)
    if not np.isfinite(val) or err > tol:
        raise QuadratureError(
            "quadrature did not converge to the requested tolerance",
            achieved=err / max(abs(val), 1e-300),
        )
    return val


def _model_quad(model, integrand, rel_tol=1e-10):
    T = _tail_cutoff(model.g)
    a = model.params.get("a")
    pts = (-a, 0.0, a) if a is not None else (0.0,)
    return _quad(integrand, T, breakpoints=pts, rel_tol=rel_tol)


# ---------------------------------------------------------------------------
# Pointwise evaluators
# ---------------------------------------------------------------------------

def density(model, x):
    """Evaluate g at x (array-ok)."""
    return model.g(np.asarray(x, dtype=float))


def score(model, x, diagonal=False):
    """The score map h(x) = -g'(x)/g(x) (or -g_d'/g_d when diagonal)."""
    x = np.asarray(x, dtype=float)
    if diagonal:
        if model.score_d_fn is not None:
            return model.score_d_fn(x)
        if model.g_d is None and model.score_fn is not None:
            return model.score_fn(x)
        return -model.diag_density_prime()(x) / model.diag_density()(x)
    if model.score_fn is not None:
        return model.score_fn(x)
    return -model.g_prime(x) / model.g(x)


def score_prime(model, x):
    """Derivative of the off-diagonal score map h."""
    x = np.asarray(x, dtype=float)
    if model.score_prime_fn is not None:
        return model.score_prime_fn(x)
    h = score(model, x)
    return h * h - model.g_double_prime(x) / model.g(x)


# ---------------------------------------------------------------------------
# Scalar functionals
# ---------------------------------------------------------------------------

def fisher(model, diagonal=False):
    """Fisher information: int g'^2 / g = E[h^2], by adaptive quadrature."""
    if diagonal and model.g_d is not None:
        gd = model.g_d
        T = _tail_cutoff(gd)
        hd = lambda x: score(model, x, diagonal=True)
        return _quad(lambda x: hd(x) ** 2 * gd(x), T, breakpoints=(0.0,))
    return _model_quad(model, lambda x: score(model, x) ** 2 * model.g(x))


def gh_functional(model):
    """G_H = (1 / 2F_g) * int g'(w)^2 g''(w) / g(w)^2 dw = E[h^2 g''/g] / 2F_g."""
    F_g = fisher(model)
    val = _model_quad(
        model, lambda x: score(model, x) ** 2 * model.g_double_prime(x)
    )
    return val / (2.0 * F_g)


def transformed_fourth_moment(model):
    """w4_tilde = (1 / F_g^2) * int g'^4 / g^3 = E[h^4] / F_g^2."""
    F_g = fisher(model)
    val = _model_quad(model, lambda x: score(model, x) ** 4 * model.g(x))
    return val / F_g**2


@lru_cache(maxsize=None)
def functionals(model):
    """All transform-related functionals of a model, computed once."""
    F_g = fisher(model)
    F_gd = fisher(model, diagonal=True)
    return NoiseFunctionals(
        F_g=F_g,
        F_gd=F_gd,
        G_H=gh_functional(model),
        w4_tilde=transformed_fourth_moment(model),
    )


@lru_cache(maxsize=None)
def moments(model):
    """(w2, w3, w4): configured diagonal scale plus quadrature moments of g."""
    w3 = _model_quad(model, lambda x: x**3 * model.g(x), rel_tol=None)
    w4 = _model_quad(model, lambda x: x**4 * model.g(x))
    return (model.w2, w3, w4)


def transform_functionals(model, alpha):
    """(M_q, V_q, E_q) for q = h_alpha, closed form cross-checked by quadrature.

    Closed forms: M_q = F_g + alpha, V_q = F_g + 2 alpha + alpha^2,
    E_q = 1 + alpha. Disagreement with the quadrature route beyond 1e-6
    raises ConsistencyError.
    """
    alpha = float(alpha)
    F_g = fisher(model)
    closed = (F_g + alpha, F_g + 2.0 * alpha + alpha**2, 1.0 + alpha)
    g = model.g
    h = lambda x: score(model, x)
    by_quad = (
        _model_quad(model, lambda x: (score_prime(model, x) + alpha) * g(x),
                    rel_tol=None),
        _model_quad(model, lambda x: (h(x) + alpha * x) ** 2 * g(x),
                    rel_tol=None),
        _model_quad(model, lambda x: x * (h(x) + alpha * x) * g(x),
                    rel_tol=None),
    )
    worst = max(abs(c - q) for c, q in zip(closed, by_quad))
    if worst > 1e-6:
        raise ConsistencyError(
            f"closed-form (M_q, V_q, E_q) disagree with quadrature by {worst:.3e} "
            f"for alpha={alpha}"
        )
    return TransformFunctionals(alpha=alpha, M_q=closed[0], V_q=closed[1],
                                E_q=closed[2])


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample(model, rng, n):
    """n i.i.d. draws from g."""
    if model.sampler is None:
        raise ValidationError(f"noise model {model.kind!r} has no sampler")
    return model.sampler(rng, int(n))


def sample_diagonal(model, rng, n):
    """n i.i.d. draws from the diagonal density g_d (defaults to g)."""
    if model.sampler_d is not None:
        return model.sampler_d(rng, int(n))
    return sample(model, rng, n)


# ---------------------------------------------------------------------------
# Built-in models
# ---------------------------------------------------------------------------

def _validate_density(model):
    norm = _model_quad(model, model.g)
    var = _model_quad(model, lambda x: x**2 * model.g(x))
    if abs(norm - 1.0) > 1e-9 or abs(var - 1.0) > 1e-9:
        raise ValidationError(
            f"density not normalized to unit mass/variance: "
            f"int g = {norm!r}, int x^2 g = {var!r}"
        )
    probe = np.linspace(0.0, 6.0, 61)
    gp, gm = model.g(probe), model.g(-probe)
    if np.any(gp <= 0.0) or np.any(gm <= 0.0):
        raise ValidationError("density must be positive everywhere probed")
    if np.max(np.abs(gp - gm) / np.maximum(gp, 1e-300)) > 1e-10:
        raise ValidationError("density must be symmetric about 0")
    return model


def gaussian_noise(w2=1.0):
    """Standard normal entries; w2 scales the Wigner diagonal variance."""
    if w2 <= 0:
        raise ValidationError("w2 must be positive")
    g = lambda x: np.exp(-0.5 * x * x) / _SQRT2PI
    return _validate_density(NoiseModel(
        kind="gaussian",
        g=g,
        g_prime=lambda x: -x * g(x),
        g_double_prime=lambda x: (x * x - 1.0) * g(x),
        w2=float(w2),
        sampler=lambda rng, n: rng.standard_normal(n),
        score_fn=lambda x: x,
        score_prime_fn=lambda x: np.ones_like(x),
        params={"w2": float(w2)},
    ))


def bimodal_noise(a, w2=1.0):
    """Two-Gaussian mixture: a*Rademacher + sqrt(1-a^2)*Normal, unit variance.

    Component centers +-a, component variance 1 - a^2; requires 0 < a < 1.
    """
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ValidationError("bimodal mixing amplitude must satisfy 0 < a < 1")
    if w2 <= 0:
        raise ValidationError("w2 must be positive")
    s2 = 1.0 - a * a
    norm = 2.0 * math.sqrt(2.0 * math.pi * s2)

    def g(x):
        return (np.exp(-((x - a) ** 2) / (2.0 * s2))
                + np.exp(-((x + a) ** 2) / (2.0 * s2))) / norm

    def h(x):
        return (x - a * np.tanh(a * x / s2)) / s2

    def h_prime(x):
        c = np.cosh(np.minimum(np.abs(a * x / s2), 350.0))
        return (1.0 - (a * a / s2) / (c * c)) / s2

    def sampler(rng, n):
        signs = rng.integers(0, 2, size=n) * 2 - 1
        return a * signs + math.sqrt(s2) * rng.standard_normal(n)

    return _validate_density(NoiseModel(
        kind="bimodal",
        g=g,
        g_prime=lambda x: -h(x) * g(x),
        g_double_prime=lambda x: (h(x) ** 2 - h_prime(x)) * g(x),
        w2=float(w2),
        sampler=sampler,
        score_fn=h,
        score_prime_fn=h_prime,
        params={"a": a, "w2": float(w2)},
    ))


def sech_noise(w2=1.0):
    """Hyperbolic-secant density g(x) = 1 / (2 cosh(pi x / 2))."""
    if w2 <= 0:
        raise ValidationError("w2 must be positive")

    def g(x):
        u = np.abs(np.pi * x / 2.0)
        e = np.exp(-u)
        return e / (1.0 + e * e)

    def h(x):
        return (np.pi / 2.0) * np.tanh(np.pi * x / 2.0)

    def h_prime(x):
        u = np.abs(np.pi * x / 2.0)
        e = np.exp(-u)
        sech = 2.0 * e / (1.0 + e * e)
        return (np.pi**2 / 4.0) * sech * sech

    def sampler(rng, n):
        # exact inverse CDF: F(x) = (2/pi) arctan(e^{pi x / 2})
        u = rng.random(n)
        return (2.0 / np.pi) * np.log(np.tan(np.pi * u / 2.0))

    return _validate_density(NoiseModel(
        kind="sech",
        g=g,
        g_prime=lambda x: -h(x) * g(x),
        g_double_prime=lambda x: (h(x) ** 2 - h_prime(x)) * g(x),
        w2=float(w2),
        sampler=sampler,
        score_fn=h,
        score_prime_fn=h_prime,
        params={"w2": float(w2)},
    ))


def custom_noise(g, g_prime, g_double_prime, *, sampler=None, w2=1.0,
                 g_d=None, g_d_prime=None, sampler_d=None):
    """Wrap user-supplied closed-form evaluators as a noise model.

    All three of g, g', g'' must be callables; tabulated densities are not
    accepted because differentiating a table would corrupt the Fisher
    information. Polynomial boundedness of -g'/g cannot be verified from
    evaluators and is the caller's responsibility.
    """
    for name, f in (("g", g), ("g_prime", g_prime),
                    ("g_double_prime", g_double_prime)):
        if not callable(f):
            raise ValidationError(f"custom noise requires callable {name}")
    if (g_d is None) != (g_d_prime is None):
        raise ValidationError("supply g_d and g_d_prime together")
    if w2 <= 0:
        raise ValidationError("w2 must be positive")
    return _validate_density(NoiseModel(
        kind="custom",
        g=g,
        g_prime=g_prime,
        g_double_prime=g_double_prime,
        w2=float(w2),
        sampler=sampler,
        g_d=g_d,
        g_d_prime=g_d_prime,
        sampler_d=sampler_d,
        params={"w2": float(w2)},
    ))


def noise_from_config(cfg):
    """Build a noise model from a config mapping like {"kind": "sech"}."""
    if not isinstance(cfg, dict):
        raise ValidationError("'noise' must be a mapping with a 'kind' key")
    kind = cfg.get("kind")
    if kind == "gaussian":
        return gaussian_noise(w2=cfg.get("w2", 1.0))
    if kind == "bimodal":
        if "a" not in cfg:
            raise ValidationError("'noise.a' is required for the bimodal kind")
        return bimodal_noise(cfg["a"], w2=cfg.get("w2", 1.0))
    if kind == "sech":
        return sech_noise(w2=cfg.get("w2", 1.0))
    raise ValidationError(f"'noise.kind' must be gaussian|bimodal|sech, got {kind!r}")
