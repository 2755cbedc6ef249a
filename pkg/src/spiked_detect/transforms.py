"""Entrywise score transforms of the data matrices and the effective-SNR
algebra that governs where the transformed outliers appear.

The transform family is h_alpha(x) = -g'(x)/g(x) + alpha * x applied to the
sqrt(N)-scaled entries, normalized so the transformed null entries have
variance 1/N again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ValidationError
from .noise import NoiseModel, fisher, functionals, score


def transform_wigner(matrix, noise):
    """Score-transform a spiked Wigner matrix entrywise.

    Off-diagonal: h_0(sqrt(N) M_ij) / sqrt(F_g N).
    Diagonal:     sqrt(w2 / (F_gd N)) * h_d(sqrt(N / w2) M_ii).
    The output is exactly symmetric whenever the input is.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("transform_wigner expects a square matrix")
    N = M.shape[0]
    fn = functionals(noise)
    w2 = noise.w2
    out = score(noise, math.sqrt(N) * M) / math.sqrt(fn.F_g * N)
    diag_in = np.diag(M) * math.sqrt(N / w2)
    out[np.diag_indices(N)] = (
        math.sqrt(w2 / (fn.F_gd * N)) * score(noise, diag_in, diagonal=True)
    )
    return out


def transform_rect(matrix, noise, alpha=0.0):
    """Apply h_alpha entrywise to a rectangular matrix:
    h_alpha(sqrt(N) Y_ij) / sqrt((alpha^2 + 2 alpha + F_g) N)."""
    Y = np.asarray(matrix, dtype=float)
    if Y.ndim != 2:
        raise ValidationError("transform_rect expects a 2-d matrix")
    alpha = float(alpha)
    N = Y.shape[1]
    F_g = functionals(noise).F_g
    V = alpha * alpha + 2.0 * alpha + F_g
    if V <= 0.0:
        # impossible for F_g >= 1 (discriminant 4 - 4 F_g <= 0); guarded anyway
        raise DomainError(f"transform normalization alpha^2+2alpha+F_g = {V} <= 0")
    scaled = math.sqrt(N) * Y
    return (score(noise, scaled) + alpha * scaled) / math.sqrt(V * N)


def resolve_alpha(policy, noise):
    """Map an alpha policy ("zero" | "sqrt_Fg" | number) to a float."""
    if policy in (None, "zero", 0, 0.0):
        return 0.0
    if policy == "sqrt_Fg":
        return math.sqrt(fisher(noise))
    if isinstance(policy, (int, float)):
        return float(policy)
    raise ValidationError(f"alpha policy must be 'zero', 'sqrt_Fg' or a number, "
                          f"got {policy!r}")


# ---------------------------------------------------------------------------
# Effective-SNR algebra
# ---------------------------------------------------------------------------

def optimal_alpha(gamma, F_g):
    """Per-spike optimal mixing parameter for the multiplicative model."""
    gamma = float(gamma)
    F_g = float(F_g)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    disc = 4.0 * F_g + 4.0 * gamma * F_g + gamma**2 * F_g**2
    return (-gamma * F_g + math.sqrt(disc)) / (2.0 * (1.0 + gamma))


def lambda_g(gamma, F_g):
    """Effective SNR of the multiplicative model at the optimal alpha."""
    gamma = float(gamma)
    F_g = float(F_g)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    disc = 4.0 * F_g + 4.0 * gamma * F_g + gamma**2 * F_g**2
    return gamma + gamma**2 * F_g / 2.0 + gamma * math.sqrt(disc) / 2.0


def effective_snr(kind, snr, noise_or_fisher, alpha):
    """Post-transform SNR governing the outlier location.

    additive:       snr is lambda; returns lambda (F_g+alpha)^2 / V_alpha.
    multiplicative: snr is gamma;  returns
                    (2 gamma (1+alpha)(F_g+alpha) + gamma^2 (F_g+alpha)^2) / V_alpha,
    where V_alpha = alpha^2 + 2 alpha + F_g.
    """
    if isinstance(noise_or_fisher, NoiseModel):
        F_g = fisher(noise_or_fisher)
    else:
        F_g = float(noise_or_fisher)
    alpha = float(alpha)
    snr = float(snr)
    V = alpha * alpha + 2.0 * alpha + F_g
    if V <= 0.0:
        raise DomainError("invalid transform normalization")
    M = F_g + alpha
    if kind == "additive":
        return snr * M * M / V
    if kind == "multiplicative":
        gamma = snr
        return (2.0 * gamma * (1.0 + alpha) * M + gamma**2 * M * M) / V
    raise ValidationError(f"kind must be 'additive' or 'multiplicative', "
                          f"got {kind!r}")


@dataclass(frozen=True)
class TransformOptimum:
    """Optimal mixing parameter and effective SNR for one multiplicative spike."""

    alpha_g: float
    lambda_g: float
    lambda_eff_at: Callable

    @classmethod
    def for_spike(cls, gamma, F_g):
        a = optimal_alpha(gamma, F_g)
        return cls(
            alpha_g=a,
            lambda_g=lambda_g(gamma, F_g),
            lambda_eff_at=lambda alpha: effective_snr(
                "multiplicative", gamma, F_g, alpha),
        )


def transformed_snrs(spec, alpha_policy="zero"):
    """Effective SNRs of a transformed model, one per spike.

    wigner / rect_additive use h_0 and gain the factor F_g regardless of
    alpha_policy (the dedicated transforms fix alpha = 0); the multiplicative
    model depends on the alpha actually applied.
    """
    F_g = fisher(spec.noise)
    if spec.kind in ("wigner", "rect_additive"):
        return tuple(l * F_g for l in spec.snr.lambdas)
    alpha = resolve_alpha(alpha_policy, spec.noise)
    return tuple(
        effective_snr("multiplicative", g, F_g, alpha) for g in spec.snr.gammas
    )
