"""Closed-form massless (mass = 0) solutions for the power data family.

Everything here is explicit: the phase integral phi_eps, the three-region
solutions for general side constants, the alpha-indexed family of limiting
solutions (in both (x, t) and null coordinates), and the special eps-sequences
whose log-phases are pinned modulo 2*pi.

Phases are kept unwrapped (plain reals, not reduced mod 2*pi) and only
exponentiated at evaluation time: -2*log(eps) grows without bound as eps -> 0
and early reduction would destroy the sequence identities.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import DomainError, SingularPointError
from .fields import DataSpec, SpinorSample, data_sample

FloatLike = Union[float, np.ndarray]


# --- the phase integral ------------------------------------------------------


def phi_epsilon(x: float, t: float, eps: float) -> float:
    """Unwrapped phase integral of 1/(eps + |y|) over [x - t, x + t].

    Piecewise closed form, split by the position of the window relative to 0:

    * x >= t:      log(eps + x + t) - log(eps + x - t)
    * |x| <= t:    -2 log(eps) + log(eps + t - x) + log(eps + x + t)
    * x <= -t:     log(eps + t - x) - log(eps - x - t)

    For eps = 0 the value is finite only for |x| > t (the integrand is not
    integrable through y = 0); elsewhere a SingularPointError is raised.
    t = 0 returns 0 (empty window).
    """
    if t < 0:
        raise ValueError(f"phi_epsilon requires t >= 0, got t={t}")
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if t == 0.0:
        return 0.0
    if eps == 0.0:
        if abs(x) <= t:
            raise SingularPointError(
                f"phi_epsilon diverges at eps=0 for |x| <= t (x={x}, t={t})"
            )
        if x > t:
            return math.log(x + t) - math.log(x - t)
        return math.log(t - x) - math.log(-x - t)
    if x >= t:
        return math.log(eps + x + t) - math.log(eps + x - t)
    if x <= -t:
        return math.log(eps + t - x) - math.log(eps - x - t)
    return -2.0 * math.log(eps) + math.log(eps + t - x) + math.log(eps + x + t)


# --- general-constant solution ------------------------------------------------


def _amp(const: complex, base: float) -> complex:
    """const * base^(-1/2), with zero constants short-circuiting singular bases."""
    if const == 0:
        return 0j
    if base <= 0.0:
        raise SingularPointError(f"amplitude base {base} is not positive")
    return const * base**-0.5


def _logterm(coeff: float, arg: float) -> float:
    """coeff * log(arg); zero coefficients suppress the (possibly singular) log."""
    if coeff == 0.0:
        return 0.0
    if arg <= 0.0:
        raise SingularPointError(f"log argument {arg} is not positive")
    return coeff * math.log(arg)


def eval_exact(spec: DataSpec, x: float, t: float) -> SpinorSample:
    """Exact massless solution for the (uncut) power family at one point.

    Requires spec.mass == 0 and spec.cutoff == False: the closed forms hold for
    the data without the support cutoff; comparisons against cutoff runs are
    only meaningful inside |x| + t < 1.

    eps = 0 is permitted wherever every term of the formula stays finite
    (off the lines |x| = t, and inside the cone only when the corresponding
    phase coefficient vanishes); otherwise SingularPointError is raised.
    """
    if spec.mass != 0.0:
        raise ValueError("eval_exact covers the massless case only (spec.mass must be 0)")
    if spec.cutoff:
        raise ValueError("eval_exact expects cutoff=False data (closed forms are uncut)")
    if t < 0:
        raise ValueError(f"eval_exact requires t >= 0, got t={t}")
    if t == 0.0:
        return data_sample(spec, x)

    eps = spec.epsilon
    kp, km = complex(spec.kappa_plus), complex(spec.kappa_minus)
    lp, lm = complex(spec.lambda_plus), complex(spec.lambda_minus)
    lp2, lm2 = abs(lp) ** 2, abs(lm) ** 2
    kp2, km2 = abs(kp) ** 2, abs(km) ** 2

    if x > t:
        swing = phi_epsilon(x, t, eps)  # log(eps+x+t) - log(eps+x-t)
        u = _amp(kp, eps + x - t) * cmath.exp(1j * lp2 * swing) if kp != 0 else 0j
        v = _amp(lp, eps + x + t) * cmath.exp(1j * kp2 * swing) if lp != 0 else 0j
        return SpinorSample(u, v)
    if x < -t:
        swing = phi_epsilon(x, t, eps)  # log(eps+t-x) - log(eps-x-t)
        u = _amp(km, eps + t - x) * cmath.exp(1j * lm2 * swing) if km != 0 else 0j
        v = _amp(lm, eps - x - t) * cmath.exp(1j * km2 * swing) if lm != 0 else 0j
        return SpinorSample(u, v)

    # cone (t >= |x|), including the boundary lines
    if km == 0:
        u = 0j
    else:
        phase_u = (
            -_logterm(lp2 + lm2, eps)
            + _logterm(lp2, eps + x + t)
            + _logterm(lm2, eps + t - x)
        )
        u = _amp(km, eps + t - x) * cmath.exp(1j * phase_u)
    if lp == 0:
        v = 0j
    else:
        phase_v = (
            -_logterm(kp2 + km2, eps)
            + _logterm(kp2, eps + x + t)
            + _logterm(km2, eps + t - x)
        )
        v = _amp(lp, eps + x + t) * cmath.exp(1j * phase_v)
    return SpinorSample(u, v)


def cone_phases(spec: DataSpec, x: float, t: float) -> tuple[float, float]:
    """Unwrapped phases of (u, v) at a cone point t > |x|, eps > 0.

    phase_u = arg(kappa_minus) - (|lam+|^2+|lam-|^2) log eps
              + |lam+|^2 log(eps+x+t) + |lam-|^2 log(eps+t-x),
    and symmetrically for v with kappa/lambda roles swapped.  These are the
    quantities whose slope against log eps decides convergence as eps -> 0.

    The phases are those of the closed-form expressions; a zero side constant
    contributes arg(0) := 0, so the slope stays defined even when the
    corresponding amplitude vanishes identically.
    """
    if not (t > abs(x)):
        raise ValueError(f"cone_phases requires t > |x|, got x={x}, t={t}")
    if spec.epsilon <= 0:
        raise ValueError("cone_phases requires eps > 0")
    km = complex(spec.kappa_minus)
    lp = complex(spec.lambda_plus)
    eps = spec.epsilon
    lsum = abs(spec.lambda_plus) ** 2 + abs(spec.lambda_minus) ** 2
    ksum = abs(spec.kappa_plus) ** 2 + abs(spec.kappa_minus) ** 2
    phase_u = (
        (cmath.phase(km) if km != 0 else 0.0)
        - lsum * math.log(eps)
        + abs(spec.lambda_plus) ** 2 * math.log(eps + x + t)
        + abs(spec.lambda_minus) ** 2 * math.log(eps + t - x)
    )
    phase_v = (
        (cmath.phase(lp) if lp != 0 else 0.0)
        - ksum * math.log(eps)
        + abs(spec.kappa_plus) ** 2 * math.log(eps + x + t)
        + abs(spec.kappa_minus) ** 2 * math.log(eps + t - x)
    )
    return phase_u, phase_v


# --- the alpha-indexed limit family -------------------------------------------


def eval_limit(alpha: float, x: float, t: float) -> SpinorSample:
    """Limiting solution along sequences with e^(-2i log eps_n) -> e^(i alpha).

    The phase factor e^(i alpha) multiplies u and v exactly in the interior
    region t > |x| and is absent outside.  Evaluation on the characteristic
    lines |x| = t (or at x = 0 when t = 0) is singular.
    """
    if t < 0:
        raise ValueError(f"eval_limit requires t >= 0, got t={t}")
    if t == 0.0:
        if x == 0.0:
            raise SingularPointError("limit data are singular at x = 0")
        a = abs(x) ** -0.5
        return SpinorSample(complex(a), complex(a))
    if abs(x) == t:
        raise SingularPointError(f"limit solution is singular on |x| = t (x={x}, t={t})")
    if x > t:
        swing = math.log(x + t) - math.log(x - t)
        ph = cmath.exp(1j * swing)
        return SpinorSample((x - t) ** -0.5 * ph, (x + t) ** -0.5 * ph)
    if x < -t:
        swing = math.log(t - x) - math.log(-x - t)
        ph = cmath.exp(1j * swing)
        return SpinorSample((t - x) ** -0.5 * ph, (-x - t) ** -0.5 * ph)
    ph = cmath.exp(1j * (alpha + math.log(t - x) + math.log(x + t)))
    return SpinorSample((t - x) ** -0.5 * ph, (x + t) ** -0.5 * ph)


def eval_limit_wave(alpha: float, y: float, s: float) -> SpinorSample:
    """The limit family in null coordinates y = x + t, s = t - x.

    Defined on the three open quadrant regions with y, s not both negative;
    the axes y = 0 and s = 0 are the singular characteristics and the quadrant
    y < 0, s < 0 corresponds to t < 0 and is excluded.
    """
    if y < 0 and s < 0:
        raise DomainError("quadrant y < 0, s < 0 (negative time) is excluded")
    if y == 0.0 or s == 0.0:
        raise SingularPointError("null axes y = 0 and s = 0 are singular")
    if y > 0 and s < 0:
        ph = cmath.exp(1j * (math.log(y) - math.log(-s)))
        return SpinorSample((-s) ** -0.5 * ph, y**-0.5 * ph)
    if y > 0 and s > 0:
        ph = cmath.exp(1j * (alpha + math.log(y) + math.log(s)))
        return SpinorSample(s**-0.5 * ph, y**-0.5 * ph)
    ph = cmath.exp(1j * (math.log(s) - math.log(-y)))
    return SpinorSample(s**-0.5 * ph, (-y) ** -0.5 * ph)


# --- eps sequences -------------------------------------------------------------


class SequenceKind(enum.Enum):
    """Which phase condition pins the sequence."""

    TWO_LOG = "two-log"  # -2 log eps_n = alpha (mod 2*pi)
    FOUR_LOG_PLUS = "four-log-plus"  # 4 log eps_n = 0 (mod 2*pi)
    FOUR_LOG_MINUS = "four-log-minus"  # 4 log eps_n = pi (mod 2*pi)


@dataclass(frozen=True)
class EpsilonSequence:
    """Strictly decreasing eps_n > 0 with a pinned log-phase.

    ``indices`` records the integer n used for each value, so tests can reduce
    the defining phase identity exactly (no mod-2*pi guessing).
    """

    kind: SequenceKind
    alpha: float
    values: tuple[float, ...]
    indices: tuple[int, ...]

    def phase_defects(self) -> tuple[float, ...]:
        """Absolute defect of the defining identity per element, after exact reduction."""
        out = []
        for eps, n in zip(self.values, self.indices):
            if self.kind is SequenceKind.TWO_LOG:
                target = self.alpha + 2.0 * math.pi * n
                out.append(abs(-2.0 * math.log(eps) - target))
            elif self.kind is SequenceKind.FOUR_LOG_PLUS:
                out.append(abs(4.0 * math.log(eps) + 2.0 * math.pi * n))
            else:
                out.append(abs(4.0 * math.log(eps) + (2 * n + 1) * math.pi))
        return tuple(out)


def epsilon_sequence(kind: SequenceKind, alpha: float = 0.0, count: int = 8) -> EpsilonSequence:
    """Generate the sequence by closed-form inversion of its phase condition.

    TWO_LOG:        eps_n = exp(-(alpha + 2 pi n)/2), n shifted so all eps_n < 1.
    FOUR_LOG_PLUS:  eps_n = exp(-pi n / 2)            (e^(4i log eps) = +1).
    FOUR_LOG_MINUS: eps_n = exp(-pi (2n + 1)/4)       (e^(4i log eps) = -1).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if kind is SequenceKind.TWO_LOG:
        n0 = math.floor(-alpha / (2.0 * math.pi)) + 1  # smallest n with alpha + 2 pi n > 0
        ns = tuple(range(n0, n0 + count))
        vals = tuple(math.exp(-(alpha + 2.0 * math.pi * n) / 2.0) for n in ns)
        return EpsilonSequence(kind, alpha, vals, ns)
    if kind is SequenceKind.FOUR_LOG_PLUS:
        ns = tuple(range(1, count + 1))
        vals = tuple(math.exp(-math.pi * n / 2.0) for n in ns)
        return EpsilonSequence(kind, 0.0, vals, ns)
    if kind is SequenceKind.FOUR_LOG_MINUS:
        ns = tuple(range(1, count + 1))
        vals = tuple(math.exp(-math.pi * (2 * n + 1) / 4.0) for n in ns)
        return EpsilonSequence(kind, math.pi, vals, ns)
    raise ValueError(f"unknown sequence kind {kind!r}")


# --- vectorized grid evaluation and streaming ----------------------------------


def eval_exact_grid(
    spec: DataSpec, x: np.ndarray, t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized eval_exact over matching arrays of points (all t > 0).

    Raises SingularPointError if any point lands on a singular line for the
    given eps/constants.  Order-independent: each point is evaluated from the
    closed forms alone.
    """
    if spec.mass != 0.0 or spec.cutoff:
        raise ValueError("eval_exact_grid requires mass=0, cutoff=False")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if x.shape != t.shape:
        raise ValueError("x and t must have matching shapes")
    if np.any(t <= 0):
        raise ValueError("eval_exact_grid requires t > 0")
    eps = spec.epsilon
    kp, km = complex(spec.kappa_plus), complex(spec.kappa_minus)
    lp, lm = complex(spec.lambda_plus), complex(spec.lambda_minus)
    lp2, lm2 = abs(lp) ** 2, abs(lm) ** 2
    kp2, km2 = abs(kp) ** 2, abs(km) ** 2

    U = np.zeros(x.shape, dtype=complex)
    V = np.zeros(x.shape, dtype=complex)

    def term(coeff: float, arg: np.ndarray) -> np.ndarray:
        if coeff == 0.0:
            return np.zeros_like(arg)
        with np.errstate(divide="ignore", invalid="ignore"):
            return coeff * np.log(arg)

    with np.errstate(divide="ignore", invalid="ignore"):
        right = x > t
        if np.any(right):
            xr, tr = x[right], t[right]
            swing = np.log(eps + xr + tr) - np.log(eps + xr - tr)
            U[right] = kp * (eps + xr - tr) ** -0.5 * np.exp(1j * lp2 * swing) if kp != 0 else 0
            V[right] = lp * (eps + xr + tr) ** -0.5 * np.exp(1j * kp2 * swing) if lp != 0 else 0
        left = x < -t
        if np.any(left):
            xl, tl = x[left], t[left]
            swing = np.log(eps + tl - xl) - np.log(eps - xl - tl)
            U[left] = km * (eps + tl - xl) ** -0.5 * np.exp(1j * lm2 * swing) if km != 0 else 0
            V[left] = lm * (eps - xl - tl) ** -0.5 * np.exp(1j * km2 * swing) if lm != 0 else 0
        cone = ~(right | left)
        if np.any(cone):
            xc, tc = x[cone], t[cone]
            log_eps = term(1.0, np.full_like(xc, eps))
            if km != 0:
                ph = (
                    -(lp2 + lm2) * log_eps
                    + term(lp2, eps + xc + tc)
                    + term(lm2, eps + tc - xc)
                )
                U[cone] = km * (eps + tc - xc) ** -0.5 * np.exp(1j * ph)
            if lp != 0:
                ph = (
                    -(kp2 + km2) * log_eps
                    + term(kp2, eps + xc + tc)
                    + term(km2, eps + tc - xc)
                )
                V[cone] = lp * (eps + xc + tc) ** -0.5 * np.exp(1j * ph)

    bad = ~(np.isfinite(U.real) & np.isfinite(U.imag) & np.isfinite(V.real) & np.isfinite(V.imag))
    if np.any(bad):
        i = np.argwhere(bad)[0]
        raise SingularPointError(
            f"singular evaluation at x={x[tuple(i)]}, t={t[tuple(i)]} with eps={eps}"
        )
    return U, V


def eval_limit_grid(alpha: float, x: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized eval_limit over matching arrays of points (all t > 0, |x| != t)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("eval_limit_grid requires t > 0")
    if np.any(np.abs(x) == t):
        raise SingularPointError("limit solution is singular on |x| = t")
    U = np.zeros(x.shape, dtype=complex)
    V = np.zeros(x.shape, dtype=complex)
    right = x > t
    left = x < -t
    cone = ~(right | left)
    if np.any(right):
        xr, tr = x[right], t[right]
        ph = np.exp(1j * (np.log(xr + tr) - np.log(xr - tr)))
        U[right] = (xr - tr) ** -0.5 * ph
        V[right] = (xr + tr) ** -0.5 * ph
    if np.any(left):
        xl, tl = x[left], t[left]
        ph = np.exp(1j * (np.log(tl - xl) - np.log(-xl - tl)))
        U[left] = (tl - xl) ** -0.5 * ph
        V[left] = (-xl - tl) ** -0.5 * ph
    if np.any(cone):
        xc, tc = x[cone], t[cone]
        ph = np.exp(1j * (alpha + np.log(tc - xc) + np.log(xc + tc)))
        U[cone] = (tc - xc) ** -0.5 * ph
        V[cone] = (xc + tc) ** -0.5 * ph
    return U, V


def limit_sampler(alpha: float, t: float, component: str = "u") -> Callable[[FloatLike], np.ndarray]:
    """Vectorized x -> limit-solution component at fixed time t (for norm computations)."""
    idx = {"u": 0, "v": 1}[component]

    def sample(x: FloatLike) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = eval_limit_grid(alpha, arr, np.full_like(arr, t))[idx]
        return out if np.ndim(x) else out[0]

    return sample


def exact_sampler(spec: DataSpec, t: float, component: str = "u") -> Callable[[FloatLike], np.ndarray]:
    """Vectorized x -> exact-solution component at fixed time t."""
    idx = {"u": 0, "v": 1}[component]

    def sample(x: FloatLike) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = eval_exact_grid(spec, arr, np.full_like(arr, t))[idx]
        return out if np.ndim(x) else out[0]

    return sample


FIELD_TABLE_HEADER = "x,t,re_u,im_u,re_v,im_v"


def write_field_table(
    stream: TextIO,
    x: Iterable[float],
    t: Iterable[float],
    u: Iterable[complex],
    v: Iterable[complex],
) -> None:
    """Stream point evaluations as columnar text: one row per point, header first."""
    stream.write(FIELD_TABLE_HEADER + "\n")
    for xi, ti, ui, vi in zip(x, t, u, v):
        ui = complex(ui)
        vi = complex(vi)
        stream.write(
            f"{float(xi)!r},{float(ti)!r},{ui.real!r},{ui.imag!r},{vi.real!r},{vi.imag!r}\n"
        )
