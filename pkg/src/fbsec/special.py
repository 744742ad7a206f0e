"""Scalar special functions used by the closed-form secrecy metrics.

The closed forms need the upper incomplete gamma function at non-positive
integer order and complex arguments in the right half-plane, the moment
integral of ``ln(1+x)`` against ``x**(a-1) * exp(-b*x)``, Pochhammer
symbols, binomial coefficients, and a direct power-series evaluator for the
four-variable confluent hypergeometric function (the latter only as a
small-argument cross-check; production evaluation of the SNR law goes
through transform inversion instead).

Everything here is plain IEEE-754 double arithmetic.  The incomplete gamma
uses a continued fraction for |x| >= 2 and order recurrences anchored at
the exponential integral below, which keeps the relative error near machine
precision across the argument range the metrics produce (the naive
recurrence alone loses ~x/|a| digits per step at large x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sc

from .errors import ConvergenceError, DomainError

__all__ = [
    "EvalControl",
    "upper_gamma",
    "upper_gamma_scaled",
    "log_gamma_integral",
    "pochhammer",
    "binomial",
    "phi2_4_series",
]

_TINY = 1e-300
_CF_SWITCH = 2.0
_COND_LIMIT = 1e7  # recurrence condition ratio ~ 1e-9 residual accuracy


@dataclass(frozen=True)
class EvalControl:
    """Convergence budget for direct series evaluation."""

    rel_tol: float = 1e-12
    max_terms: int = 10**6

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise DomainError(f"rel_tol must be in (0, 1e-3], got {self.rel_tol!r}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms!r}")


def _require_right_half_plane(x) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.real <= 0.0:
        raise DomainError(f"argument must satisfy Re(x) > 0, got {x!r}")
    return z


def _cf_scaled(a: float, z: complex) -> complex:
    """exp(z) * Gamma(a, z) by modified-Lentz continued fraction, Re(z) > 0."""
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / (b if b != 0 else _TINY)
    h = d
    for j in range(1, 600):
        an = -j * (j - a)
        b = b + 2.0
        d = an * d + b
        if d == 0:
            d = _TINY
        c = b + an / c
        if c == 0:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return z**a * h
    raise ConvergenceError(f"incomplete-gamma continued fraction stalled at a={a}, x={z}")


def _exp1_scaled(z: complex) -> complex:
    """exp(z) * E1(z) for Re(z) > 0."""
    if abs(z) >= _CF_SWITCH:
        return _cf_scaled(0.0, z)
    return np.exp(z) * sc.exp1(z)


def _lower_series(a: float, z: complex) -> complex:
    # gamma(a, z) = z^a e^-z sum_n z^n / (a (a+1) ... (a+n)); |z| < 2 only
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(200):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return z**a * np.exp(-z) * total


def upper_gamma_scaled(a: float, x) -> complex | float:
    """exp(x) * Gamma(a, x) for real ``a`` and ``x`` with Re(x) > 0.

    This scaled form is what the metric sums actually consume; it stays
    bounded where ``exp(x)`` alone would overflow.  Returns a float for
    real input.
    """
    z = _require_right_half_plane(x)
    real_in = complex(x).imag == 0.0

    if abs(z) >= _CF_SWITCH:
        out = _cf_scaled(float(a), z)
        return out.real if real_in else out

    ai = round(a)
    if abs(a - ai) <= 1e-12 * max(1.0, abs(a)) and ai <= 0:
        # anchor at E1 and walk the order down; at |x| < 2 the subtracted
        # term dominates, so the walk is well conditioned (checked below)
        g = _exp1_scaled(z)
        cond = abs(g)
        for k in range(1, -int(ai) + 1):
            pw = z ** (-k)
            cond = max(cond, abs(pw))
            g = (g - pw) / (-k)
            if cond > _COND_LIMIT * max(abs(g), _TINY):
                g = _cf_scaled(float(a), z)
                break
        return g.real if real_in else g

    if a > 0:
        if real_in:
            xr = z.real
            return float(math.exp(xr) * sc.gammaincc(a, xr) * sc.gamma(a))
        return np.exp(z) * (sc.gamma(a) - _lower_series(float(a), z))

    # negative non-integer order: walk down from the fractional anchor
    steps = int(math.ceil(-a))
    a0 = a + steps
    g = upper_gamma_scaled(a0, z)
    cond = abs(g)
    ak = a0
    for _ in range(steps):
        ak -= 1.0
        pw = z**ak
        cond = max(cond, abs(pw))
        g = (g - pw) / ak
        if cond > _COND_LIMIT * max(abs(g), _TINY):
            out = _cf_scaled(float(a), z)
            return out.real if real_in else out
    return g.real if real_in else g


def upper_gamma(a: float, x) -> complex | float:
    """Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^-t dt.

    ``a`` may be any real, including non-positive integers where the
    function continues analytically (Gamma(0, x) is the exponential
    integral E1).  ``x`` must lie in the right half-plane; real x <= 0
    raises a domain error.
    """
    z = _require_right_half_plane(x)
    out = np.exp(-z) * upper_gamma_scaled(a, x)
    return out.real if complex(x).imag == 0.0 else out


def _scaled_gamma_table(nmax: int, b) -> dict[int, complex]:
    """exp(b)*Gamma(order, b) for order in [1-nmax, 0]."""
    z = _require_right_half_plane(b)
    table: dict[int, complex] = {}
    if abs(z) >= _CF_SWITCH:
        for order in range(0, -nmax, -1):
            table[order] = _cf_scaled(float(order), z)
        return table
    g = _exp1_scaled(z)
    table[0] = g
    for k in range(1, nmax):
        g = (g - z ** (-k)) / (-k)
        table[-k] = g
    return table


def ln1p_moment_table(nmax: int, b) -> np.ndarray:
    """T[n-1] = exp(b) * sum_{k=1..n} Gamma(k-n, b) / b**k for n = 1..nmax.

    ``Gamma(n) * T[n-1]`` equals ``int_0^inf x^(n-1) ln(1+x) e^(-bx) dx``.
    All terms are positive for b > 0, so the plain sum is stable.
    """
    z = complex(b)
    ug = _scaled_gamma_table(nmax, z)
    powers = z ** -np.arange(1, nmax + 1)
    out = np.empty(nmax, dtype=complex)
    for n in range(1, nmax + 1):
        out[n - 1] = sum(ug[k - n] * powers[k - 1] for k in range(1, n + 1))
    return out


def log_gamma_integral(a: int, b) -> float | complex:
    """int_0^inf x^(a-1) ln(1+x) e^(-bx) dx for integer a >= 1, Re(b) > 0.

    Evaluates the equivalent finite sum
    Gamma(a) * e^b * sum_{k=1..a} Gamma(k-a, b) / b**k.
    """
    if a != round(a) or a < 1:
        raise DomainError(f"order must be an integer >= 1, got {a!r}")
    a = int(a)
    val = sc.gamma(a) * ln1p_moment_table(a, b)[a - 1]
    return val.real if complex(b).imag == 0.0 else val


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = Gamma(a+n) / Gamma(a)."""
    if n != int(n) or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    return float(sc.poch(a, int(n)))


def binomial(n: int, k: int) -> float:
    """Standard binomial coefficient n! / (k! (n-k)!)."""
    if n != int(n) or k != int(k) or n < 0 or k < 0:
        raise DomainError(f"n, k must be non-negative integers, got {n!r}, {k!r}")
    if k > n:
        raise DomainError(f"k must be <= n, got k={k!r}, n={n!r}")
    return float(math.comb(int(n), int(k)))


def phi2_4_series(a, b: float, x, ctrl: EvalControl | None = None) -> float:
    """Four-variable confluent hypergeometric series (direct summation).

    Sums sum_{k1..k4} prod_i (a_i)_{k_i} x_i^{k_i} / k_i!  /  (b)_{|k|}
    degree by degree.  The series is entire but alternates for negative
    arguments, so for large |x| the partial sums cancel catastrophically;
    when the running cancellation or the term budget is exceeded a
    convergence error is raised and callers should use transform inversion
    instead.  Intended as a small-argument oracle.
    """
    ctrl = ctrl or EvalControl()
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if a.shape != (4,) or x.shape != (4,):
        raise DomainError("a and x must each hold exactly 4 values")

    rows = [[1.0] for _ in range(4)]  # rows[i][k] = (a_i)_k x_i^k / k!
    total = 0.0
    peak = 0.0
    small_run = 0
    used = 0
    deg = 0
    while True:
        if deg > 0:
            for i in range(4):
                k = deg - 1
                rows[i].append(rows[i][k] * (a[i] + k) * x[i] / (k + 1))
        c12 = np.convolve(rows[0], rows[1])
        c34 = np.convolve(rows[2], rows[3])
        s_deg = 0.0
        for j in range(deg + 1):
            s_deg += c12[j] * c34[deg - j]
        s_deg /= sc.poch(b, deg)
        total += s_deg
        peak = max(peak, abs(total), abs(s_deg))
        used += (deg + 1) ** 3
        if abs(s_deg) <= ctrl.rel_tol * max(abs(total), _TINY):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
        if used > ctrl.max_terms:
            raise ConvergenceError(
                f"series not converged within {ctrl.max_terms} terms (degree {deg})",
                achieved=abs(s_deg) / max(abs(total), _TINY),
            )
        deg += 1
    if peak > 0 and abs(total) < peak * 1e-13:
        raise ConvergenceError(
            f"series lost all significant digits (cancellation ratio {peak / max(abs(total), _TINY):.1e})"
        )
    return float(total)
