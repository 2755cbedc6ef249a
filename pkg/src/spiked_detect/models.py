"""Spike priors and synthesis of the three spiked data-matrix models.

Wigner: symmetric N x N, M = U Lam^{1/2} U^T + W.
Additive rectangular: M x N, Y = U Lam^{1/2} V^T + X.
Multiplicative rectangular: M x N, Y = (I + U Gam U^T) X with
Gam = diag(sqrt(1 + lam) - 1), so that (I + U Gam U^T)^2 = I + U Lam U^T
exactly for orthonormal spikes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .noise import NoiseModel, sample, sample_diagonal

MODEL_KINDS = ("wigner", "rect_additive", "rect_multiplicative")
PRIOR_KINDS = ("rademacher_iid", "spherical")


@dataclass(frozen=True)
class SnrSpec:
    """Non-increasing positive SNR diagonal plus the derived gamma values."""

    lambdas: tuple

    def __post_init__(self):
        lams = tuple(float(l) for l in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if any(l <= 0 for l in lams):
            raise ValidationError("all SNR values must be positive")
        if any(a < b for a, b in zip(lams, lams[1:])):
            raise ValidationError("SNR values must be non-increasing")

    @property
    def k(self):
        return len(self.lambdas)

    @property
    def gammas(self):
        """gamma_l = sqrt(1 + lambda_l) - 1, so 2*gamma + gamma^2 = lambda."""
        return tuple(math.sqrt(1.0 + l) - 1.0 for l in self.lambdas)


@dataclass(frozen=True)
class ModelSpec:
    """Model kind, dimensions, noise, prior and SNR for one synthesis run."""

    kind: str
    N: int
    noise: NoiseModel
    prior: str = "rademacher_iid"
    snr: SnrSpec = field(default_factory=lambda: SnrSpec(()))
    M: int | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"model kind must be one of {MODEL_KINDS}, "
                                  f"got {self.kind!r}")
        if self.prior not in PRIOR_KINDS:
            raise ValidationError(f"prior must be one of {PRIOR_KINDS}, "
                                  f"got {self.prior!r}")
        if self.N < 1:
            raise ValidationError("N must be a positive integer")
        if self.kind == "wigner":
            if self.M is not None and self.M != self.N:
                raise ValidationError("the wigner model requires M = N")
            object.__setattr__(self, "M", self.N)
        else:
            if self.M is None:
                raise ValidationError("rectangular models require M")
            if not 1 <= self.M <= self.N:
                raise ValidationError("rectangular models require 1 <= M <= N "
                                      "(transpose the data if M > N)")
        if self.snr.k > min(self.M, self.N):
            raise ValidationError("rank k exceeds the matrix dimension")

    @property
    def d0(self):
        return self.M / self.N

    @property
    def k(self):
        return self.snr.k


@dataclass(frozen=True)
class DataMatrix:
    """A synthesized matrix plus its provenance (spec and seed)."""

    values: np.ndarray
    spec: ModelSpec
    seed: int | None = None


# ---------------------------------------------------------------------------
# Spikes
# ---------------------------------------------------------------------------

def sample_spike(prior, dim, k, rng):
    """Draw a dim x k spike matrix U per the prior.

    rademacher_iid: entries +-1/sqrt(dim), U^T U only approximately identity.
    spherical: Gaussian columns orthonormalized (Haar on the Stiefel manifold),
    U^T U = I_k to machine precision.
    """
    if k > dim:
        raise ValidationError(f"rank k={k} exceeds dimension {dim}")
    if k == 0:
        return np.zeros((dim, 0))
    if prior == "rademacher_iid":
        return (rng.integers(0, 2, size=(dim, k)) * 2 - 1) / math.sqrt(dim)
    if prior == "spherical":
        q, r = np.linalg.qr(rng.standard_normal((dim, k)))
        return q * np.sign(np.diag(r))
    raise ValidationError(f"unknown prior {prior!r}")


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _wigner_noise(spec, rng):
    """Symmetric noise: off-diagonal entries g/sqrt(N), diagonal
    sqrt(w2/N) * g_d."""
    N = spec.N
    iu = np.triu_indices(N, k=1)
    W = np.zeros((N, N))
    W[iu] = sample(spec.noise, rng, iu[0].size) / math.sqrt(N)
    W = W + W.T
    W[np.diag_indices(N)] = (
        sample_diagonal(spec.noise, rng, N) * math.sqrt(spec.noise.w2 / N)
    )
    return W


def build_spiked_wigner(spec, rng, seed=None):
    """M = U Lam^{1/2} U^T + W. Draw order: spike first, then noise."""
    if spec.kind != "wigner":
        raise ValidationError("build_spiked_wigner requires a wigner spec")
    U = sample_spike(spec.prior, spec.N, spec.k, rng)
    W = _wigner_noise(spec, rng)
    if spec.k:
        root = np.sqrt(np.asarray(spec.snr.lambdas))
        S = (U * root) @ U.T
        W += 0.5 * (S + S.T)   # keep exact symmetry against rounding
    return DataMatrix(values=W, spec=spec, seed=seed)


def build_additive(spec, rng, seed=None):
    """Y = U Lam^{1/2} V^T + X. Draw order: U, V, then noise."""
    if spec.kind != "rect_additive":
        raise ValidationError("build_additive requires a rect_additive spec")
    U = sample_spike(spec.prior, spec.M, spec.k, rng)
    V = sample_spike(spec.prior, spec.N, spec.k, rng)
    X = sample(spec.noise, rng, spec.M * spec.N).reshape(spec.M, spec.N)
    X /= math.sqrt(spec.N)
    if spec.k:
        root = np.sqrt(np.asarray(spec.snr.lambdas))
        X += (U * root) @ V.T
    return DataMatrix(values=X, spec=spec, seed=seed)


def build_multiplicative(spec, rng, seed=None):
    """Y = (I + U Gam U^T) X with Gam = diag(sqrt(1+lam) - 1)."""
    if spec.kind != "rect_multiplicative":
        raise ValidationError("build_multiplicative requires a "
                              "rect_multiplicative spec")
    U = sample_spike(spec.prior, spec.M, spec.k, rng)
    X = sample(spec.noise, rng, spec.M * spec.N).reshape(spec.M, spec.N)
    X /= math.sqrt(spec.N)
    if spec.k:
        gam = np.asarray(spec.snr.gammas)
        X += (U * gam) @ (U.T @ X)
    return DataMatrix(values=X, spec=spec, seed=seed)


_BUILDERS = {
    "wigner": build_spiked_wigner,
    "rect_additive": build_additive,
    "rect_multiplicative": build_multiplicative,
}


def synthesize(spec, seed=None, rng=None):
    """Build a DataMatrix from spec; identical (spec, seed) give identical bits."""
    if rng is None:
        rng = np.random.default_rng(seed)
    return _BUILDERS[spec.kind](spec, rng, seed=seed)
