"""Eigenvalue extraction and deterministic spectral-law quantities:
semicircle and Marchenko-Pastur laws, their Stieltjes transforms on the
real axis outside the bulk, and the outlier-location predictions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, ValidationError

SEMICIRCLE_EDGE = 2.0

# Default absolute margin above the bulk edge for outlier counting; separates
# the O(N^{-2/3}) edge fluctuations empirically for N >= 500.
DEFAULT_EDGE_TOL = 0.05


def eigenvalues_sym(matrix):
    """Full spectrum of an exactly symmetric matrix, descending."""
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("expected a square matrix")
    if not np.array_equal(A, A.T):
        raise ValidationError("matrix is not exactly symmetric")
    return np.linalg.eigvalsh(A)[::-1].copy()


def gram_spectrum(Y):
    """Eigenvalues of Y Y^T, descending, via singular values of Y.

    Computed as squared singular values rather than by forming Y Y^T, which
    would square the condition number.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValidationError("expected a 2-d matrix")
    if Y.shape[0] > Y.shape[1]:
        raise ValidationError("gram_spectrum requires M <= N")
    s = np.linalg.svd(Y, compute_uv=False)
    return np.sort(s * s)[::-1].copy()


def count_outliers(spectrum, edge, tol=DEFAULT_EDGE_TOL):
    """Number of eigenvalues strictly above edge + tol."""
    mu = np.asarray(spectrum, dtype=float)
    return int(np.sum(mu > edge + tol))


def semicircle_expect(f):
    """int f d(mu_sc) by quadrature on x = 2 cos(theta)."""
    val, _ = integrate.quad(
        lambda t: f(2.0 * math.cos(t)) * (2.0 / math.pi) * math.sin(t) ** 2,
        0.0, math.pi, limit=200,
    )
    return val


# ---------------------------------------------------------------------------
# Stieltjes transforms
# ---------------------------------------------------------------------------

def semicircle_stieltjes(z):
    """Stieltjes transform of the semicircle law at real z outside [-2, 2].

    Branch with s^2 + z s + 1 = 0 and |s| < 1, so z * s(z) -> -1 at infinity.
    """
    z = float(z)
    if abs(z) <= 2.0:
        raise DomainError(f"z={z} lies inside the semicircle support [-2, 2]")
    root = math.sqrt(z * z - 4.0)
    return (-z + root) / 2.0 if z > 0 else (-z - root) / 2.0


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law for aspect ratio d0 = M/N in (0, 1]."""

    d0: float

    def __post_init__(self):
        if not 0.0 < self.d0 <= 1.0:
            raise ValidationError("d0 must lie in (0, 1]")

    @property
    def d_minus(self):
        return (1.0 - math.sqrt(self.d0)) ** 2

    @property
    def d_plus(self):
        return (1.0 + math.sqrt(self.d0)) ** 2

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.d_minus) & (x < self.d_plus)
        out = np.zeros_like(x)
        xi = x[inside]
        out[inside] = np.sqrt((xi - self.d_minus) * (self.d_plus - xi)) / (
            2.0 * np.pi * self.d0 * xi
        )
        return out

    def integrate_density(self):
        val, _ = integrate.quad(lambda x: float(self.density(x)),
                                self.d_minus, self.d_plus, limit=200)
        return val

    def expect(self, f):
        """int f d(mu_MP) by quadrature with the edge singularities mapped out."""
        # x = 1 + d0 + 2 sqrt(d0) cos(theta) turns the sqrt weight into sin^2
        rt = math.sqrt(self.d0)

        def integrand(theta):
            x = 1.0 + self.d0 + 2.0 * rt * math.cos(theta)
            return f(x) * 2.0 * math.sin(theta) ** 2 / (math.pi * x)

        val, _ = integrate.quad(integrand, 0.0, math.pi, limit=200)
        return val

    def stieltjes(self, z):
        """s(z) on the branch with z * s(z) -> -1 as z -> infinity.

        s solves d0 z s^2 - (1 - d0 - z) s + 1 = 0, equivalently the
        self-consistency s = 1 / (1 - d0 - d0 z s - z).
        """
        z = float(z)
        if z == 0.0:
            raise DomainError("the Stieltjes transform is singular at z = 0")
        if self.d_minus <= z <= self.d_plus:
            raise DomainError(
                f"z={z} lies inside the bulk support "
                f"[{self.d_minus:.6g}, {self.d_plus:.6g}]"
            )
        root = math.sqrt((1.0 - self.d0 - z) ** 2 - 4.0 * self.d0 * z)
        if z > self.d_plus:
            return ((1.0 - self.d0 - z) + root) / (2.0 * self.d0 * z)
        return ((1.0 - self.d0 - z) - root) / (2.0 * self.d0 * z)

    def companion(self, z):
        """Stieltjes transform of the N x N companion spectrum:
        d0 * s(z) + (d0 - 1) / z."""
        return self.d0 * self.stieltjes(z) + (self.d0 - 1.0) / float(z)


def mp_stieltjes(z, law):
    return law.stieltjes(z)


# ---------------------------------------------------------------------------
# Outlier predictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BbpPrediction:
    """Limiting top-eigenvalue location and squared spike overlap."""

    outlier_location: float
    overlap: float
    supercritical: bool


def bbp_wigner(lambda_eff):
    """Top-eigenvalue limit for a (possibly transformed) spiked Wigner matrix.

    Supercritical iff lambda_eff > 1; the boundary point is classified
    subcritical (both formulas coincide there).
    """
    lam = float(lambda_eff)
    if lam <= 0:
        raise DomainError("lambda_eff must be positive")
    if lam > 1.0:
        return BbpPrediction(
            outlier_location=math.sqrt(lam) + 1.0 / math.sqrt(lam),
            overlap=1.0 - 1.0 / lam,
            supercritical=True,
        )
    return BbpPrediction(outlier_location=SEMICIRCLE_EDGE, overlap=0.0,
                         supercritical=False)


def bbp_rect(lambda_eff, law):
    """Top-eigenvalue limit of the Gram matrix of a spiked rectangular model.

    Supercritical iff lambda_eff > sqrt(d0).
    """
    lam = float(lambda_eff)
    if lam <= 0:
        raise DomainError("lambda_eff must be positive")
    if lam > math.sqrt(law.d0):
        return BbpPrediction(
            outlier_location=(1.0 + lam) * (1.0 + law.d0 / lam),
            overlap=1.0 - law.d0 * (1.0 + lam) / (lam * (lam + law.d0)),
            supercritical=True,
        )
    return BbpPrediction(outlier_location=law.d_plus, overlap=0.0,
                         supercritical=False)
