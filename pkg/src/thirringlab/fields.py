"""Spacetime/data vocabulary shared by the whole laboratory.

The model fields are pairs (u, v) of complex amplitudes on 1+1 dimensional
spacetime.  The initial data family handled here is the two-sided power
family

    f(x) = kappa_(sign x) / (eps + |x|)^(1/2),
    g(x) = lambda_(sign x) / (eps + |x|)^(1/2),

optionally multiplied by the indicator of (-1, 1) (``cutoff=True``) and with
regularization eps >= 0.  Everything in this module is a pure function of its
arguments; the singular eps = 0 case is only ever evaluated pointwise off the
singular point x = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Mapping, NamedTuple, Union

import numpy as np

from .errors import SingularPointError

FloatLike = Union[float, np.ndarray]


class SpinorSample(NamedTuple):
    """Field value pair at a single spacetime point."""

    u: complex
    v: complex


class WaveCoords(NamedTuple):
    """Null coordinates y = x + t, s = t - x."""

    y: float
    s: float


class Region(enum.Enum):
    """Position of a point relative to the light cone of the origin, t > 0.

    Boundary points |x| = t are classified as CONE; the closed-form branches
    are required (and tested) to agree there.
    """

    RIGHT = "right"  # x >= t
    CONE = "cone"  # t >= |x|
    LEFT = "left"  # x <= -t


@dataclass(frozen=True)
class DataSpec:
    """Parameters of the two-sided power data family.

    kappa_plus/minus scale the u-component for x > 0 / x < 0, lambda_plus/minus
    the v-component.  ``kappa_plus == kappa_minus == lambda_plus == lambda_minus
    == 1`` with ``cutoff=True`` reproduces the canonical singular data and its
    eps-regularizations.
    """

    kappa_plus: complex = 1.0
    kappa_minus: complex = 1.0
    lambda_plus: complex = 1.0
    lambda_minus: complex = 1.0
    epsilon: float = 0.0
    cutoff: bool = True
    mass: float = 0.0

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.mass < 0:
            raise ValueError(f"mass must be >= 0, got {self.mass}")

    def with_epsilon(self, epsilon: float) -> "DataSpec":
        return replace(self, epsilon=epsilon)

    def is_canonical(self) -> bool:
        """True when all four constants equal 1 (the data used throughout §-style bounds)."""
        return all(
            complex(c) == 1.0 + 0.0j
            for c in (self.kappa_plus, self.kappa_minus, self.lambda_plus, self.lambda_minus)
        )


# --- flat key-value (de)serialization -------------------------------------

_COMPLEX_FIELDS = ("kappa_plus", "kappa_minus", "lambda_plus", "lambda_minus")


def dataspec_to_config(spec: DataSpec) -> dict[str, str]:
    """Flatten a DataSpec to string key-value pairs (config-file section)."""
    out: dict[str, str] = {}
    for name in _COMPLEX_FIELDS:
        z = complex(getattr(spec, name))
        out[f"{name}_re"] = repr(z.real)
        out[f"{name}_im"] = repr(z.imag)
    out["epsilon"] = repr(float(spec.epsilon))
    out["cutoff"] = "true" if spec.cutoff else "false"
    out["mass"] = repr(float(spec.mass))
    return out


def dataspec_from_config(section: Mapping[str, str]) -> DataSpec:
    """Inverse of :func:`dataspec_to_config`; missing keys take defaults."""
    defaults = DataSpec()
    kwargs = {}
    for name in _COMPLEX_FIELDS:
        default = complex(getattr(defaults, name))
        re = float(section.get(f"{name}_re", default.real))
        im = float(section.get(f"{name}_im", default.imag))
        kwargs[name] = complex(re, im)
    kwargs["epsilon"] = float(section.get("epsilon", defaults.epsilon))
    cutoff_raw = str(section.get("cutoff", "true")).strip().lower()
    if cutoff_raw not in ("true", "false", "1", "0", "yes", "no"):
        raise ValueError(f"cannot parse cutoff flag {cutoff_raw!r}")
    kwargs["cutoff"] = cutoff_raw in ("true", "1", "yes")
    kwargs["mass"] = float(section.get("mass", defaults.mass))
    return DataSpec(**kwargs)


# --- data sampling ---------------------------------------------------------


def data_sample(spec: DataSpec, x: float) -> SpinorSample:
    """Sample the initial data (f(x), g(x)).

    x = 0 uses the plus-side constants (the data are discontinuous at 0 when
    the side constants differ; the choice is irrelevant for the canonical
    family).  eps = 0 together with x = 0 is a genuine singular point.
    """
    if spec.epsilon == 0.0 and x == 0.0:
        raise SingularPointError("data are singular at x = 0 when epsilon = 0")
    if spec.cutoff and not (-1.0 < x < 1.0):
        return SpinorSample(0j, 0j)
    amp = (spec.epsilon + abs(x)) ** -0.5
    if x >= 0:
        return SpinorSample(complex(spec.kappa_plus) * amp, complex(spec.lambda_plus) * amp)
    return SpinorSample(complex(spec.kappa_minus) * amp, complex(spec.lambda_minus) * amp)


def data_sampler(spec: DataSpec, component: str = "u") -> Callable[[FloatLike], np.ndarray]:
    """Vectorized single-component data sampler (for quadrature/DFT consumers).

    Singular points (eps = 0, x = 0) evaluate to inf rather than raising;
    quadrature routines never place nodes exactly on declared singularities.
    """
    if component == "u":
        c_plus, c_minus = complex(spec.kappa_plus), complex(spec.kappa_minus)
    elif component == "v":
        c_plus, c_minus = complex(spec.lambda_plus), complex(spec.lambda_minus)
    else:
        raise ValueError(f"component must be 'u' or 'v', got {component!r}")

    def sample(x: FloatLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            amp = (spec.epsilon + np.abs(x)) ** -0.5
        vals = np.where(x >= 0, c_plus, c_minus) * amp
        if spec.cutoff:
            vals = np.where((x > -1.0) & (x < 1.0), vals, 0j)
        return vals

    return sample


def rescale_sampler(
    sampler: Callable[[FloatLike], np.ndarray], lam: float
) -> Callable[[FloatLike], np.ndarray]:
    """Scaling transformation on data samplers: x -> lam^(1/2) * sampler(lam x)."""
    if lam <= 0:
        raise ValueError(f"scaling parameter must be > 0, got {lam}")
    root = lam**0.5

    def rescaled(x: FloatLike) -> np.ndarray:
        return root * np.asarray(sampler(np.asarray(x, dtype=float) * lam))

    return rescaled


def rescale_data(spec: DataSpec, lam: float, x: float) -> SpinorSample:
    """Pointwise rescaled data lam^(1/2) * (f, g)(lam x).

    For eps = 0, cutoff=False data this is exactly the original sample
    (scale invariance of the |x|^(-1/2) profile).
    """
    if lam <= 0:
        raise ValueError(f"scaling parameter must be > 0, got {lam}")
    u, v = data_sample(spec, lam * x)
    root = lam**0.5
    return SpinorSample(root * u, root * v)


# --- region bookkeeping ----------------------------------------------------


def classify(x: float, t: float) -> Region:
    """Region of (x, t) relative to the light cone through the origin (t > 0)."""
    if t <= 0:
        raise ValueError(f"classify requires t > 0, got t={t}")
    if abs(x) <= t:
        return Region.CONE
    return Region.RIGHT if x > 0 else Region.LEFT


def to_wave(x: float, t: float) -> WaveCoords:
    return WaveCoords(y=x + t, s=t - x)


def from_wave(coords: WaveCoords) -> tuple[float, float]:
    y, s = coords
    return (y - s) / 2.0, (y + s) / 2.0
