"""Fluctuating Beckmann fading parameters and derived rate constants.

A link is described by six user-facing parameters: the number of multipath
clusters ``mu``, the shadowing severity ``m``, the dominant-to-scattered
power ratio ``kappa``, the in-phase/quadrature scattered power ratio
``eta``, the dominant power ratio ``rho2`` and the mean SNR ``avg_snr``
(linear scale).  From these, :func:`derive` computes the constants of the
rational-power Laplace representation of the SNR law,

    E[exp(-s * snr)] = omega * prod_k (s + theta_k / avg_snr) ** (-a_k),

with four rate/exponent pairs ``(theta_k, a_k)``.  Everything downstream
(closed forms, numerical inversion, Monte Carlo validation) works off this
representation.

The quadratic whose roots give the first two rates always has a
non-negative discriminant (it can be rearranged into A^2 + 2*A*B*w + B^2
with |w| <= 1), so the roots are real and positive; they are nevertheless
kept as complex numbers so that near-degenerate configurations and any
future parameterisation are handled uniformly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "FBParams",
    "DerivedParams",
    "derive",
    "merge_rate_groups",
    "from_kappa_mu_shadowed",
    "from_rician_shadowed",
    "from_nakagami",
    "from_rayleigh",
    "from_beckmann",
    "from_eta_mu",
    "db_to_linear",
    "linear_to_db",
]

_INT_RTOL = 1e-12


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _check(field: str, value: float, *, positive: bool = False) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(field, f"must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ParameterError(field, f"must be > 0, got {value!r}")
    if not positive and value < 0.0:
        raise ParameterError(field, f"must be >= 0, got {value!r}")
    return value


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= _INT_RTOL * max(1.0, abs(x))


@dataclass(frozen=True)
class FBParams:
    """Fading parameters of one link (all dimensionless, SNR linear)."""

    mu: float
    m: float
    kappa: float
    eta: float
    rho2: float
    avg_snr: float

    def __post_init__(self):
        object.__setattr__(self, "mu", _check("mu", self.mu, positive=True))
        object.__setattr__(self, "m", _check("m", self.m, positive=True))
        object.__setattr__(self, "kappa", _check("kappa", self.kappa))
        object.__setattr__(self, "eta", _check("eta", self.eta, positive=True))
        object.__setattr__(self, "rho2", _check("rho2", self.rho2))
        object.__setattr__(self, "avg_snr", _check("avg_snr", self.avg_snr, positive=True))

    def is_case2(self) -> bool:
        """True when ``mu/2`` and ``m`` are both integers (closed forms apply)."""
        return _is_integer(self.mu / 2.0) and _is_integer(self.m)

    def with_snr(self, avg_snr: float) -> "FBParams":
        return FBParams(self.mu, self.m, self.kappa, self.eta, self.rho2, avg_snr)


@dataclass(frozen=True, eq=False)
class DerivedParams:
    """Constants of the rational-power transform for one link.

    ``theta_rates`` and ``exponents`` are aligned: the first two entries are
    the quadratic roots with exponent ``m`` each, the last two are the
    scattered-wave rates with exponent ``mu/2 - m`` each (possibly negative,
    in which case they act as numerator factors).  ``n_groups`` counts the
    rate groups left after groups with zero exponent are dropped.
    """

    omega_norm: float
    alpha2: float
    alpha1: float
    beta: float
    c1: complex
    c2: complex
    theta_rates: np.ndarray
    exponents: np.ndarray
    n_groups: int
    mu: float
    ln_omega: float

    def merged_rates(self, rtol: float = 1e-9) -> list[tuple[complex, float]]:
        """Distinct (rate, net exponent) pairs, zero-exponent groups dropped."""
        return merge_rate_groups(self.theta_rates, self.exponents, rtol=rtol)


def merge_rate_groups(
    rates, exponents, rtol: float = 1e-9, drop_tol: float = 1e-9
) -> list[tuple[complex, float]]:
    """Coalesce rates that coincide to relative ``rtol``, summing exponents.

    Groups whose net exponent has magnitude below ``drop_tol`` disappear
    (their factor is identically 1).  The merged position is the plain mean
    of the member rates: exact when they coincide, and the correct limit
    for a near-double root (exponent-weighted means would amplify rounding
    through large cancelling weights).
    """
    groups: list[list] = []  # [anchor rate, member rates, net exponent]
    for rate, a in zip(np.asarray(rates, dtype=complex), np.asarray(exponents, dtype=float)):
        for entry in groups:
            if abs(rate - entry[0]) <= rtol * max(abs(rate), abs(entry[0])):
                entry[1].append(rate)
                entry[2] += a
                break
        else:
            groups.append([rate, [rate], a])
    return [
        (complex(sum(members) / len(members)), float(a))
        for _, members, a in groups
        if abs(a) > drop_tol
    ]


def derive(params: FBParams) -> DerivedParams:
    """Compute the transform constants for one link.

    The normalisation factor is evaluated in log space so that the
    large-``m`` reductions (Beckmann surrogate, ``m = 1e6``) do not
    underflow: with ``alpha1 = alpha2 + C/m`` the combination
    ``m * log(alpha1/alpha2)`` stays bounded as ``m`` grows.
    """
    mu, m, kappa, eta, rho2 = params.mu, params.m, params.kappa, params.eta, params.rho2
    snr = params.avg_snr

    alpha2 = 4.0 * eta / (mu**2 * (1.0 + eta) ** 2 * (1.0 + kappa) ** 2)
    alpha1 = alpha2 + 2.0 * kappa * (rho2 + eta) / (
        m * (1.0 + rho2) * mu * (1.0 + eta) * (1.0 + kappa) ** 2
    )
    beta = -(2.0 / mu + kappa / m) / (1.0 + kappa)

    # roots of alpha1*s^2 + beta*s + 1; beta < 0 always, so the stable
    # quadratic form q = (-beta + sqrt(disc))/2 never cancels
    disc = beta * beta - 4.0 * alpha1
    sq = cmath.sqrt(complex(disc))
    q = (-beta + sq) / 2.0
    c1 = q / alpha1
    c2 = 1.0 / q

    scattered = mu * (1.0 + eta) * (1.0 + kappa) / 2.0
    theta = np.array([c1, c2, scattered / eta, scattered], dtype=complex)
    exps = np.array([m, m, mu / 2.0 - m, mu / 2.0 - m], dtype=float)

    lno = (
        -m * math.log1p((alpha1 - alpha2) / alpha2)
        - (mu / 2.0) * math.log(alpha2)
        - mu * math.log(snr)
    )
    n_groups = 2 if abs(mu / 2.0 - m) <= _INT_RTOL * max(1.0, m) else 4

    return DerivedParams(
        omega_norm=math.exp(lno),
        alpha2=alpha2,
        alpha1=alpha1,
        beta=beta,
        c1=complex(c1),
        c2=complex(c2),
        theta_rates=theta,
        exponents=exps,
        n_groups=n_groups,
        mu=mu,
        ln_omega=lno,
    )


# ---------------------------------------------------------------------------
# special-case embeddings
# ---------------------------------------------------------------------------

_INERT_M = 1.0e6  # any valid value works when kappa == 0; match the no-shadowing surrogate
_LARGE_M = 1.0e6  # finite surrogate for the no-shadowing limit


def from_kappa_mu_shadowed(kappa: float, mu: float, m: float, avg_snr: float) -> FBParams:
    """kappa-mu shadowed fading embedded via eta = 1 (rho2 is then inert)."""
    return FBParams(mu=mu, m=m, kappa=kappa, eta=1.0, rho2=1.0, avg_snr=avg_snr)


def from_rician_shadowed(kappa: float, m: float, avg_snr: float) -> FBParams:
    """Rician shadowed fading: kappa-mu shadowed with a single cluster."""
    return from_kappa_mu_shadowed(kappa, 1.0, m, avg_snr)


def from_nakagami(m_nak: float, avg_snr: float) -> FBParams:
    """Nakagami-m fading: kappa = 0, eta = 1, mu set to the Nakagami shape.

    With kappa = 0 the shadowing parameter has no effect on the SNR law, so
    it is pinned to an arbitrary valid value.
    """
    return FBParams(mu=m_nak, m=_INERT_M, kappa=0.0, eta=1.0, rho2=1.0, avg_snr=avg_snr)


def from_rayleigh(avg_snr: float) -> FBParams:
    return from_nakagami(1.0, avg_snr)


def from_beckmann(K: float, q: float, r: float, avg_snr: float, m_large: float = _LARGE_M) -> FBParams:
    """Classical Beckmann fading via a large finite shadowing parameter.

    ``K`` is the dominant-to-scattered power ratio, ``q`` the scattered
    in-phase/quadrature variance ratio and ``r`` the dominant amplitude
    ratio.  ``m_large`` stands in for the no-fluctuation limit; values
    below 1e4 are rejected because the surrogate error is then visible.
    """
    if m_large < 1.0e4:
        raise ParameterError("m_large", f"must be >= 1e4 for the Beckmann surrogate, got {m_large!r}")
    return FBParams(mu=1.0, m=m_large, kappa=K, eta=q, rho2=r * r, avg_snr=avg_snr)


def from_eta_mu(eta: float, mu: float, avg_snr: float) -> FBParams:
    """eta-mu fading via kappa = 0 (experimental embedding).

    The no-dominant-component limit leaves ``m`` and ``rho2`` inert, so both
    are pinned.  This reduction is validated against Monte Carlo only; treat
    it as experimental.
    """
    return FBParams(mu=mu, m=_INERT_M, kappa=0.0, eta=eta, rho2=1.0, avg_snr=avg_snr)
