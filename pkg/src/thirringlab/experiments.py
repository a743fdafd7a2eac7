"""Reproducible experiments: the ill-posedness phenomena as config-driven runs.

Each ``run_*`` function turns one phenomenon into tables of numbers plus
pass/fail verdicts that are recomputable from those numbers alone.  Reports
serialize to ``report.json`` (full) and one CSV per table; all computations
are deterministic (fixed summation orders, fixed pseudo-random tuples), so
identical configs produce bit-identical reports modulo the runtime block.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .closed_forms import (
    SequenceKind,
    cone_phases,
    epsilon_sequence,
    eval_exact,
    eval_exact_grid,
    eval_limit,
    eval_limit_grid,
    phi_epsilon,
)
from .errors import ConfigError
from .fields import DataSpec, dataspec_from_config, dataspec_to_config, data_sampler
from .norms import Divergence, LebesgueSpec, SobolevSpec, hs_norm, lp_norm
from .solver import (
    a_functional_curve,
    cone_charge,
    global_charge,
    phi_line_integrals,
    remainders,
    solve,
)

EXPERIMENT_IDS = (
    "data-convergence",
    "bifurcation",
    "product-dichotomy",
    "self-similar",
    "pv-residual",
    "solver-validation",
)

_TUPLE_SEED = 112358  # fixed: reports must be bit-identical run to run


@dataclass
class ExperimentConfig:
    """Knobs for one experiment run; unused fields are ignored by other runs."""

    experiment: str
    data: DataSpec = field(default_factory=DataSpec)
    p_values: tuple[float, ...] = (1.0, 1.5, 2.0)
    s_values: tuple[float, ...] = (-0.25,)
    eps_count: int = 12
    alphas: tuple[float, ...] = (0.0, math.pi)
    mass: float = 1.0
    mesh_delta: float = 1e-3
    lp_final_threshold: float = 0.05
    grid_points: int = 2**17
    freq_cutoff: float = 2000.0
    interval: tuple[float, float] = (-1.0, 1.0)
    bif_time: float = 0.25
    bif_halfwidth: float = 0.2
    bif_count: int = 8
    bif_cross_tol: float = 1e-6
    pv_count: int = 12
    pv_generic_count: int = 40
    seed: Optional[int] = None  # reserved, unused: everything is deterministic

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENT_IDS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; valid ids: {', '.join(EXPERIMENT_IDS)}"
            )
        if self.eps_count < 1:
            raise ConfigError("eps_count must be >= 1")
        if self.mesh_delta <= 0:
            raise ConfigError("mesh_delta must be > 0")

    def echo(self) -> dict:
        out = {
            "experiment": self.experiment,
            "data": dataspec_to_config(self.data),
            "p_values": list(self.p_values),
            "s_values": list(self.s_values),
            "eps_count": self.eps_count,
            "alphas": list(self.alphas),
            "mass": self.mass,
            "mesh_delta": self.mesh_delta,
            "lp_final_threshold": self.lp_final_threshold,
            "grid_points": self.grid_points,
            "freq_cutoff": self.freq_cutoff,
            "interval": list(self.interval),
            "bif_time": self.bif_time,
            "bif_halfwidth": self.bif_halfwidth,
            "bif_count": self.bif_count,
            "bif_cross_tol": self.bif_cross_tol,
            "pv_count": self.pv_count,
            "pv_generic_count": self.pv_generic_count,
            "seed": self.seed,
        }
        return out


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def config_from_section(experiment: str, section: Mapping[str, str]) -> ExperimentConfig:
    """Build a config from a flat key-value section (strings), defaults elsewhere."""
    cfg = ExperimentConfig(experiment=experiment, data=dataspec_from_config(section))
    kwargs = {}
    for key in (
        "eps_count",
        "grid_points",
        "bif_count",
        "pv_count",
        "pv_generic_count",
    ):
        if key in section:
            kwargs[key] = int(section[key])
    for key in (
        "mass",
        "mesh_delta",
        "lp_final_threshold",
        "freq_cutoff",
        "bif_time",
        "bif_halfwidth",
        "bif_cross_tol",
    ):
        if key in section:
            kwargs[key] = float(section[key])
    for key, attr in (("p", "p_values"), ("s", "s_values"), ("alpha", "alphas")):
        if key in section:
            kwargs[attr] = _parse_floats(section[key])
    if "interval" in section:
        lo, hi = _parse_floats(section["interval"])
        kwargs["interval"] = (lo, hi)
    if "seed" in section:
        kwargs["seed"] = int(section["seed"])
    return replace(cfg, **kwargs)


@dataclass
class ExperimentReport:
    """Numeric tables plus verdicts; verdicts are functions of the tables only."""

    experiment: str
    config: dict
    tables: dict[str, list[dict]]
    verdicts: dict[str, bool]
    notes: dict[str, str]
    runtime: dict

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self, *, include_runtime: bool = True) -> str:
        payload = {
            "experiment": self.experiment,
            "config": self.config,
            "tables": self.tables,
            "verdicts": self.verdicts,
            "notes": self.notes,
        }
        if include_runtime:
            payload["runtime"] = self.runtime
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)

    def write(self, out_dir: Path, *, plots: bool = False) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / "report.json"
        report_path.write_text(self.to_json() + "\n", encoding="utf-8")
        for name, rows in self.tables.items():
            if not rows:
                continue
            csv_path = out_dir / f"{name}.csv"
            keys = list(rows[0].keys())
            with csv_path.open("w", encoding="utf-8") as fh:
                fh.write(",".join(keys) + "\n")
                for row in rows:
                    fh.write(",".join(_csv_cell(row.get(k)) for k in keys) + "\n")
        if plots:
            from . import plots as _plots  # deferred: matplotlib import is slow

            _plots.render_report(self, out_dir)
        return report_path


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _runtime_block(t_start: float) -> dict:
    return {
        "duration_seconds": time.perf_counter() - t_start,
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _norm_tag(value: float) -> str:
    return f"{value:g}".replace("-", "m")


# --- data-convergence -------------------------------------------------------------


def run_data_convergence(config: ExperimentConfig) -> ExperimentReport:
    """Data-space topology: f_eps -> f in L^p (p < 2) and H^s (s < 0), not in L^2.

    The L^2 column must diverge (the singular data are not square integrable);
    the squared L^2 norm of f_eps itself grows like 2 log(1 + 1/eps).
    """
    t0 = time.perf_counter()
    for p in config.p_values:
        if not (1.0 <= p <= 2.0):
            raise ConfigError(f"p values must lie in [1, 2], got {p}")
    for s in config.s_values:
        if not (-0.5 < s < 0.0):
            raise ConfigError(f"s values must lie in (-1/2, 0), got {s}")

    base = replace(config.data, epsilon=0.0, cutoff=True, mass=0.0)
    target = data_sampler(base, "u")
    eps_list = [2.0**-k for k in range(1, config.eps_count + 1)]
    a, b = config.interval

    tables: dict[str, list[dict]] = {}
    verdicts: dict[str, bool] = {}

    for p in config.p_values:
        spec = LebesgueSpec(p, (a, b))
        rows = []
        for eps in eps_list:
            fam = data_sampler(replace(base, epsilon=eps), "u")

            def diff(x, fam=fam):
                return fam(x) - target(x)

            result = lp_norm(diff, spec, 256, singularities=(0.0,))
            if isinstance(result, Divergence):
                rows.append({"epsilon": eps, "distance": None, "status": "divergent"})
            else:
                rows.append({"epsilon": eps, "distance": float(result), "status": "ok"})
        tag = f"lp_p{_norm_tag(p)}"
        tables[tag] = rows
        ok = [r["distance"] for r in rows if r["status"] == "ok"]
        if p < 2.0:
            monotone = len(ok) == len(rows) and all(y < x for x, y in zip(ok, ok[1:]))
            verdicts[f"{tag}_monotone"] = monotone
            verdicts[f"{tag}_final_below_{config.lp_final_threshold:g}"] = (
                len(ok) == len(rows) and ok[-1] < config.lp_final_threshold
            )
        else:
            verdicts[f"{tag}_divergent"] = all(r["status"] == "divergent" for r in rows)

    growth_eps = sorted(set(eps_list) | {0.01}, reverse=True)
    growth_rows = []
    for eps in growth_eps:
        fam = data_sampler(replace(base, epsilon=eps), "u")
        val = lp_norm(fam, LebesgueSpec(2.0, (a, b)), 256, singularities=(0.0,))
        closed = 2.0 * math.log(1.0 + 1.0 / eps)
        growth_rows.append(
            {
                "epsilon": eps,
                "l2_squared": float(val) ** 2,
                "closed_form": closed,
                "rel_err": abs(float(val) ** 2 - closed) / closed,
            }
        )
    tables["l2_growth"] = growth_rows
    verdicts["l2_matches_closed_form"] = all(r["rel_err"] <= 1e-6 for r in growth_rows)
    at_001 = [r for r in growth_rows if abs(r["epsilon"] - 0.01) < 1e-15]
    verdicts["l2_exceeds_9p2_at_eps_0p01"] = bool(at_001) and at_001[0]["l2_squared"] > 9.2

    for s in config.s_values:
        rows = []
        for eps in eps_list:
            fam = data_sampler(replace(base, epsilon=eps), "u")

            def diff(x, fam=fam):
                return fam(x) - target(x)

            res = hs_norm(
                diff, s, config.grid_points, config.freq_cutoff, check_stability=False
            )
            rows.append(
                {"epsilon": eps, "distance": res.value, "tail_estimate": res.tail_estimate}
            )
        tag = f"hs_s{_norm_tag(s)}"
        tables[tag] = rows
        dists = [r["distance"] for r in rows]
        verdicts[f"{tag}_monotone"] = all(y < x for x, y in zip(dists, dists[1:]))

    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes={},
        runtime=_runtime_block(t0),
    )


# --- bifurcation --------------------------------------------------------------------


def run_bifurcation(config: ExperimentConfig) -> ExperimentReport:
    """The continuum of limits: eps-sequences pinned to different alphas converge
    to genuinely different solutions with identical initial data."""
    t0 = time.perf_counter()
    t = config.bif_time
    if not (0.0 < t < 0.5):
        raise ConfigError(f"bif_time must lie in (0, 1/2), got {t}")
    if config.bif_halfwidth >= t:
        raise ConfigError("bifurcation interval must lie strictly inside the cone (|x| < t)")
    if len(config.alphas) < 2:
        raise ConfigError("need at least two alpha targets")

    xs = np.linspace(-config.bif_halfwidth, config.bif_halfwidth, 41)
    ts = np.full_like(xs, t)
    base = DataSpec(epsilon=1.0, cutoff=False, mass=0.0)

    tables: dict[str, list[dict]] = {}
    verdicts: dict[str, bool] = {}

    for alpha in config.alphas:
        seq = epsilon_sequence(SequenceKind.TWO_LOG, alpha, config.bif_count)
        u_lim, v_lim = eval_limit_grid(alpha, xs, ts)
        rows = []
        for n, eps in zip(seq.indices, seq.values):
            U, V = eval_exact_grid(replace(base, epsilon=eps), xs, ts)
            sup = float(max(np.abs(U - u_lim).max(), np.abs(V - v_lim).max()))
            rows.append({"n": n, "epsilon": eps, "sup_distance": sup})
        tag = f"twolog_alpha{_norm_tag(alpha)}"
        tables[tag] = rows
        sups = [r["sup_distance"] for r in rows]
        verdicts[f"{tag}_monotone"] = all(y < x for x, y in zip(sups, sups[1:]))
        verdicts[f"{tag}_final_below_1e-3"] = sups[-1] < 1e-3

    interval = (-config.bif_halfwidth, config.bif_halfwidth)
    spec1 = LebesgueSpec(1.0, interval)

    def u_limit_sampler(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
        def sample(x):
            arr = np.atleast_1d(np.asarray(x, dtype=float))
            return eval_limit_grid(alpha, arr, np.full_like(arr, t))[0]

        return sample

    ref_norm = lp_norm(u_limit_sampler(config.alphas[0]), spec1, 256, singularities=())
    cross_rows = []
    for i, aa in enumerate(config.alphas):
        for bb in config.alphas[i + 1 :]:
            sa, sb = u_limit_sampler(aa), u_limit_sampler(bb)

            def diff(x, sa=sa, sb=sb):
                return sa(x) - sb(x)

            cross = float(lp_norm(diff, spec1, 256, singularities=()))
            expected = abs(np.exp(1j * aa) - np.exp(1j * bb)) * float(ref_norm)
            cross_rows.append(
                {
                    "alpha_a": aa,
                    "alpha_b": bb,
                    "l1_cross": cross,
                    "expected": expected,
                    "abs_err": abs(cross - expected),
                }
            )
    tables["cross_distances"] = cross_rows
    verdicts["cross_distances_match"] = all(
        r["abs_err"] <= config.bif_cross_tol for r in cross_rows
    )

    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes={},
        runtime=_runtime_block(t0),
    )


# --- product dichotomy ----------------------------------------------------------------


def dichotomy_constants(mass: float) -> tuple[float, float, float]:
    """(c, C, delta_ball): remainder bound constants and the separation ball scale.

    c = 16 e^(2m); C = 4 m c + m^2 c^2 bounds the summed remainders on the
    ball of radius delta/4 around (0, delta); delta_ball = 1/(16 C) makes the
    main-term floor 1/(2 delta) dominate C by a factor 8.
    """
    c = 16.0 * math.exp(2.0 * mass)
    C = 4.0 * mass * c + mass**2 * c**2
    delta_ball = 1.0 / (16.0 * C) if C > 0 else 0.25
    return c, C, delta_ball


def _main_term(eps: float, x: float, t: float) -> complex:
    lp = math.log(eps + x + t)
    lm = math.log(eps + t - x)
    return ((eps + x + t) * (eps + t - x)) ** -0.5 * complex(
        math.cos(2.0 * (lp + lm)), math.sin(2.0 * (lp + lm))
    )


def _ball_points(delta_ball: float, delta: float) -> list[tuple[float, float]]:
    """Mesh-aligned sample points inside the ball B_{delta/4}(0, delta_ball)."""
    pts = []
    for fx in (-0.2, 0.0, 0.2):
        for ft in (0.85, 1.0, 1.15):
            x = round(fx * delta_ball / 4.0 / delta) * delta
            t = round(ft * delta_ball / delta) * delta
            if x * x + (t - delta_ball) ** 2 <= (delta_ball / 4.0) ** 2 and t > abs(x):
                pts.append((x, t))
    # dedupe while keeping order
    seen, out = set(), []
    for p in pts:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def run_product_dichotomy(config: ExperimentConfig) -> ExperimentReport:
    """Sign dichotomy of u v along the two four-log eps sequences.

    Massless leg: closed forms, the identity is exact to rounding.  Massive
    leg: solver runs near the separation ball, where the main term dominates
    the measured remainders and the two sequence limits differ in sign.
    """
    t0 = time.perf_counter()
    tables: dict[str, list[dict]] = {}
    verdicts: dict[str, bool] = {}
    notes: dict[str, str] = {}

    base = DataSpec(epsilon=1.0, cutoff=False, mass=0.0)
    points = ((0.0, 0.25), (0.1, 0.3), (-0.05, 0.2))
    seq_plus = epsilon_sequence(SequenceKind.FOUR_LOG_PLUS, count=3)
    seq_minus = epsilon_sequence(SequenceKind.FOUR_LOG_MINUS, count=3)

    m0_rows = []
    for label, seq, sign in (("plus", seq_plus, +1.0), ("minus", seq_minus, -1.0)):
        for n, eps in zip(seq.indices, seq.values):
            for (x, t) in points:
                s = eval_exact(replace(base, epsilon=eps), x, t)
                uv = s.u * s.v
                main = _main_term(eps, x, t)
                m0_rows.append(
                    {
                        "sequence": label,
                        "n": n,
                        "epsilon": eps,
                        "x": x,
                        "t": t,
                        "re_uv": uv.real,
                        "im_uv": uv.imag,
                        "rel_dev_from_signed_main": abs(uv - sign * main) / abs(main),
                    }
                )
    tables["exact_m0"] = m0_rows
    verdicts["m0_plus_matches_main"] = all(
        r["rel_dev_from_signed_main"] <= 1e-11 for r in m0_rows if r["sequence"] == "plus"
    )
    verdicts["m0_minus_matches_neg_main"] = all(
        r["rel_dev_from_signed_main"] <= 1e-11 for r in m0_rows if r["sequence"] == "minus"
    )

    limit_rows = []
    for (x, t) in points:
        e_p = seq_plus.values[-1]
        e_m = seq_minus.values[-1]
        sp = eval_exact(replace(base, epsilon=e_p), x, t)
        sm = eval_exact(replace(base, epsilon=e_m), x, t)
        uv_p, uv_m = sp.u * sp.v, sm.u * sm.v
        limit_rows.append(
            {
                "x": x,
                "t": t,
                "gap": abs(uv_p - uv_m),
                "sign_dot": (uv_p * uv_m.conjugate()).real,
                "abs_main_limit": abs(_main_term(0.0, x, t)),
            }
        )
    tables["exact_m0_limits"] = limit_rows
    verdicts["m0_opposite_signs"] = all(r["sign_dot"] < 0 for r in limit_rows)

    if config.mass > 0:
        m = config.mass
        c, C, delta_ball = dichotomy_constants(m)
        solver_rows = []
        gap_rows: dict[tuple[float, float], dict] = {}
        # first element of each sequence comfortably below the ball scale; the
        # main-term floor 1/(2 delta) needs eps a bit below delta, not just eps < delta
        eps_by_label = {}
        for label, kind in (("plus", SequenceKind.FOUR_LOG_PLUS), ("minus", SequenceKind.FOUR_LOG_MINUS)):
            seq = epsilon_sequence(kind, count=40)
            eps_by_label[label] = next(e for e in seq.values if e <= 0.75 * delta_ball)
        delta = min(eps_by_label.values()) / 12.0  # shared grid so sample points coincide
        for label in ("plus", "minus"):
            eps = eps_by_label[label]
            t_max = round(1.3 * delta_ball / delta) * delta
            half = round(3.0 * delta_ball / delta) * delta
            mesh = solve(
                DataSpec(epsilon=eps, cutoff=True, mass=m),
                x_min=-half,
                x_max=half,
                delta=delta,
                t_max=t_max,
            )
            for (x, t) in _ball_points(delta_ball, delta):
                j = mesh.node_index(x)
                n = mesh.level_index(t)
                uv = complex(mesh.u[n, j] * mesh.v[n, j])
                bundle = remainders(mesh, x, t)
                row = {
                    "sequence": label,
                    "epsilon": eps,
                    "delta": delta,
                    "x": x,
                    "t": t,
                    "re_uv": uv.real,
                    "im_uv": uv.imag,
                    "abs_main": abs(bundle.main_term),
                    "sum_abs_remainders": bundle.sum_abs,
                    "separation": abs(bundle.main_term) - bundle.sum_abs,
                    "key_residual": bundle.key_residual,
                }
                solver_rows.append(row)
                slot = gap_rows.setdefault(
                    (x, t), {"x": x, "t": t, "threshold": 1.0 / (2.0 * delta_ball) - 2.0 * C}
                )
                slot[f"uv_{label}"] = uv
        tables["solver_massive"] = solver_rows
        final_rows = []
        for (x, t), slot in sorted(gap_rows.items()):
            uv_p, uv_m = slot["uv_plus"], slot["uv_minus"]
            final_rows.append(
                {
                    "x": x,
                    "t": t,
                    "gap": abs(uv_p - uv_m),
                    "sign_dot": (uv_p * uv_m.conjugate()).real,
                    "threshold": slot["threshold"],
                }
            )
        tables["solver_gaps"] = final_rows
        verdicts["m1_separation_positive"] = all(r["separation"] > 0 for r in solver_rows)
        verdicts["m1_separation_at_least_2C"] = all(
            r["separation"] >= 2.0 * C for r in solver_rows
        )
        verdicts["m1_opposite_signs"] = all(r["sign_dot"] < 0 for r in final_rows)
        verdicts["m1_gap_above_threshold"] = all(r["gap"] >= r["threshold"] for r in final_rows)
        notes["constants"] = (
            f"mass={m}: c=16*exp(2m)={c!r}, C=4mc+m^2c^2={C!r}, ball scale delta={delta_ball!r}; "
            "sequence elements chosen with eps <= 0.75*delta so the main-term floor holds; "
            "mesh delta = eps/12 per run (eps below 10*delta is never used)."
        )

    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes=notes,
        runtime=_runtime_block(t0),
    )


# --- self-similar non-existence -----------------------------------------------------


def _fixed_random_tuples(count: int = 5) -> list[dict]:
    rng = np.random.default_rng(_TUPLE_SEED)
    out = []
    for i in range(count):
        mods = rng.uniform(0.3, 1.2, size=4)
        phases = rng.uniform(0.0, 2.0 * math.pi, size=4)
        z = mods * np.exp(1j * phases)
        out.append(
            {
                "label": f"random-{i}",
                "kappa_plus": complex(z[0]),
                "kappa_minus": complex(z[1]),
                "lambda_plus": complex(z[2]),
                "lambda_minus": complex(z[3]),
            }
        )
    return out


def fit_cone_phase_slopes(
    spec: DataSpec, x: float, t: float, k_range: Sequence[int] = tuple(range(50, 58))
) -> tuple[float, float]:
    """Least-squares slopes of the unwrapped (u, v) cone phases against log eps.

    eps = 2^-k with k large enough that the eps-dependence of the non-singular
    log terms is below rounding; the slope then isolates the coefficients
    -(|lam+|^2 + |lam-|^2) and -(|kap+|^2 + |kap-|^2).
    """
    logs = []
    pu, pv = [], []
    for k in k_range:
        eps = 2.0**-k
        a, b = cone_phases(replace(spec, epsilon=eps), x, t)
        logs.append(math.log(eps))
        pu.append(a)
        pv.append(b)
    A = np.vstack([np.asarray(logs), np.ones(len(logs))]).T
    su = float(np.linalg.lstsq(A, np.asarray(pu), rcond=None)[0][0])
    sv = float(np.linalg.lstsq(A, np.asarray(pv), rcond=None)[0][0])
    return su, sv


def run_self_similar(config: ExperimentConfig) -> ExperimentReport:
    """Scale-invariant data: the cone phases diverge like -(sum of squared
    moduli) * log eps, so no eps-limit exists unless the data vanish."""
    t0 = time.perf_counter()
    x, t = 0.1, 0.3
    tuples = [
        {"label": "canonical", "kappa_plus": 1 + 0j, "kappa_minus": 1 + 0j,
         "lambda_plus": 1 + 0j, "lambda_minus": 1 + 0j},
        {"label": "u-only", "kappa_plus": 1 + 0j, "kappa_minus": 1 + 0j,
         "lambda_plus": 0j, "lambda_minus": 0j},
        {"label": "zero", "kappa_plus": 0j, "kappa_minus": 0j,
         "lambda_plus": 0j, "lambda_minus": 0j},
    ] + _fixed_random_tuples()

    slope_rows = []
    cauchy_rows = []
    for tup in tuples:
        label = tup["label"]
        spec = DataSpec(
            kappa_plus=tup["kappa_plus"],
            kappa_minus=tup["kappa_minus"],
            lambda_plus=tup["lambda_plus"],
            lambda_minus=tup["lambda_minus"],
            epsilon=1.0,
            cutoff=False,
            mass=0.0,
        )
        row = {
            "label": label,
            "kappa_plus_re": complex(tup["kappa_plus"]).real,
            "kappa_plus_im": complex(tup["kappa_plus"]).imag,
            "kappa_minus_re": complex(tup["kappa_minus"]).real,
            "kappa_minus_im": complex(tup["kappa_minus"]).imag,
            "lambda_plus_re": complex(tup["lambda_plus"]).real,
            "lambda_plus_im": complex(tup["lambda_plus"]).imag,
            "lambda_minus_re": complex(tup["lambda_minus"]).real,
            "lambda_minus_im": complex(tup["lambda_minus"]).imag,
        }
        lam_sum = abs(complex(tup["lambda_plus"])) ** 2 + abs(complex(tup["lambda_minus"])) ** 2
        kap_sum = abs(complex(tup["kappa_plus"])) ** 2 + abs(complex(tup["kappa_minus"])) ** 2
        if label == "zero":
            row.update(
                {
                    "status": "zero-field",
                    "u_slope": None,
                    "u_expected": 0.0,
                    "u_abs_err": 0.0,
                    "v_slope": None,
                    "v_expected": 0.0,
                    "v_abs_err": 0.0,
                    "non_convergence": False,
                }
            )
            slope_rows.append(row)
            continue
        su, sv = fit_cone_phase_slopes(spec, x, t)
        row.update(
            {
                "status": "ok",
                "u_slope": su,
                "u_expected": -lam_sum,
                "u_abs_err": abs(su + lam_sum),
                "v_slope": sv,
                "v_expected": -kap_sum,
                "v_abs_err": abs(sv + kap_sum),
                "non_convergence": bool(max(abs(su), abs(sv)) > 1e-12),
            }
        )
        slope_rows.append(row)

        if lam_sum >= 0.1:
            # eps-halving steps: consecutive u values stay a fixed phase apart;
            # sampled deep enough that eps corrections to the asymptotic gap are tiny
            gaps = []
            for k in range(10, 21):
                s1 = eval_exact(replace(spec, epsilon=2.0**-k), x, t)
                s2 = eval_exact(replace(spec, epsilon=2.0 ** -(k + 1)), x, t)
                gaps.append(abs(s2.u - s1.u))
            modulus = abs(complex(tup["kappa_minus"])) * (t - x) ** -0.5
            expected = modulus * abs(np.exp(1j * lam_sum * math.log(2.0)) - 1.0)
            cauchy_rows.append(
                {
                    "label": label,
                    "min_consecutive_gap": min(gaps),
                    "expected_gap": expected,
                }
            )

    tables = {"phase_slopes": slope_rows, "cauchy_gaps": cauchy_rows}
    fitted = [r for r in slope_rows if r["status"] == "ok"]
    verdicts = {
        "slopes_match_1e-9": all(
            max(r["u_abs_err"], r["v_abs_err"]) <= 1e-9 for r in fitted
        ),
        "nonzero_slope_flags_raised": all(
            r["non_convergence"] == (abs(r["u_expected"]) + abs(r["v_expected"]) > 0)
            for r in fitted
        ),
        "flagged_families_not_cauchy": all(
            r["min_consecutive_gap"] >= 0.5 * r["expected_gap"] for r in cauchy_rows
        ),
    }
    notes = {
        "coverage": (
            "Stability in the source definition quantifies over all approximating "
            "sequences; these runs probe only the canonical eps-regularized family, "
            "which suffices for non-existence but is not exhaustive."
        )
    }
    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes=notes,
        runtime=_runtime_block(t0),
    )


# --- principal-value residual ----------------------------------------------------------


def bump(y: float) -> float:
    """Standard bump on (-1, 1), normalized so bump(0) = 1."""
    if abs(y) >= 1.0:
        return 0.0
    return math.exp(1.0 + 1.0 / (y * y - 1.0))


def bump_lipschitz() -> float:
    """Max |bump'| on a fixed dense grid (deterministic)."""
    y = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, 20001)
    with np.errstate(over="ignore", under="ignore"):
        vals = np.exp(1.0 + 1.0 / (y * y - 1.0)) * np.abs(-2.0 * y / (y * y - 1.0) ** 2)
    return float(np.nanmax(vals))


def pv_residual(alpha: float, delta: float, theta: Callable[[float], float] = bump) -> complex:
    """Boundary residual of the excised integration by parts at excision radius delta."""
    return complex(
        np.exp(1j * alpha) * np.exp(1j * math.log(delta)) * theta(delta)
        - np.exp(-1j * math.log(delta)) * theta(-delta)
    )


def run_pv_residual(config: ExperimentConfig) -> ExperimentReport:
    """Principal-value boundary terms: the residual dies along the matched
    two-log excision radii and keeps oscillating along generic ones."""
    t0 = time.perf_counter()
    if bump(1.0) != 0.0 or bump(-1.0) != 0.0:
        raise ConfigError("test function must vanish at the window edges")
    lip = bump_lipschitz()
    theta0 = bump(0.0)

    tables: dict[str, list[dict]] = {}
    verdicts: dict[str, bool] = {}
    for alpha in config.alphas:
        seq = epsilon_sequence(SequenceKind.TWO_LOG, alpha, config.pv_count)
        rows = []
        for n, delta in zip(seq.indices, seq.values):
            # alpha + 2 log delta_n = -2 pi n exactly by construction, so
            # e^(i alpha) e^(i log delta) = e^(-i log delta) and the residual
            # reduces to e^(-i log delta) (theta(delta) - theta(-delta))
            r = abs(bump(delta) - bump(-delta))
            rows.append(
                {"n": n, "delta": delta, "abs_R": r, "bound": 2.0 * lip * delta}
            )
        tag = f"twolog_alpha{_norm_tag(alpha)}"
        tables[tag] = rows
        verdicts[f"{tag}_bounded"] = all(r["abs_R"] <= r["bound"] for r in rows)

        grows = []
        for n in range(1, config.pv_generic_count + 1):
            delta = 2.0**-n
            grows.append({"n": n, "delta": delta, "abs_R": abs(pv_residual(alpha, delta))})
        gtag = f"generic_alpha{_norm_tag(alpha)}"
        tables[gtag] = grows
        verdicts[f"{gtag}_oscillates"] = max(r["abs_R"] for r in grows) >= 0.5 * theta0

    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes={"test_function": f"bump with theta(0)={theta0!r}, Lipschitz constant {lip!r}"},
        runtime=_runtime_block(t0),
    )


# --- solver validation -------------------------------------------------------------------


def _aligned(value: float, delta: float) -> float:
    return round(value / delta) * delta


def run_solver_validation(config: ExperimentConfig) -> ExperimentReport:
    """Aggregate solver invariants: oracle error and order, conservation,
    cone residuals, and the a-priori line-integral bound."""
    t0 = time.perf_counter()
    d0 = config.mesh_delta
    tables: dict[str, list[dict]] = {}
    verdicts: dict[str, bool] = {}
    notes: dict[str, str] = {}

    # convergence order against the massless closed form (uncut data)
    oracle_spec = DataSpec(epsilon=0.1, cutoff=False, mass=0.0)
    order_rows = []
    prev_err = None
    for mult in (4, 2, 1):
        d = mult * d0
        mesh = solve(oracle_spec, x_min=-_aligned(1.1, d), x_max=_aligned(1.1, d), delta=d, t_max=_aligned(0.5, d))
        xs = mesh.x_nodes()
        err = 0.0
        for n in range(1, mesh.n_levels + 1):
            lo, hi = mesh.valid_range(n)
            sel = np.abs(xs) <= 0.5
            sel[:lo] = False
            sel[hi + 1 :] = False
            U, V = eval_exact_grid(oracle_spec, xs[sel], np.full(int(sel.sum()), n * d))
            err = max(
                err,
                float(np.abs(mesh.u[n, sel] - U).max()),
                float(np.abs(mesh.v[n, sel] - V).max()),
            )
        ratio = None if prev_err is None else prev_err / err
        order_rows.append({"delta": d, "max_node_error": err, "ratio": ratio})
        prev_err = err
    tables["order"] = order_rows
    verdicts["order_error_below_1e-3"] = order_rows[-1]["max_node_error"] <= 1e-3
    verdicts["order_ratio_in_window"] = all(
        3.5 <= r["ratio"] <= 4.5 for r in order_rows if r["ratio"] is not None
    )

    # conservation and cone residuals
    drift_rows = []
    cone_rows = []
    apexes = ((0.0, 0.4), (0.15, 0.3), (-0.2, 0.25), (0.3, 0.2), (0.0, 0.2))
    half = _aligned(2.048, d0)
    for m in (0.0, 1.0):
        for eps in (0.1, 0.01):
            spec = DataSpec(epsilon=eps, cutoff=True, mass=m)
            mesh = solve(spec, x_min=-half, x_max=half, delta=d0, t_max=_aligned(0.5, d0))
            q0 = global_charge(mesh, 0)
            worst = 0.0
            for level in range(50, mesh.n_levels + 1, 50):
                worst = max(worst, abs(global_charge(mesh, level) - q0) / q0)
            drift_rows.append(
                {"mass": m, "epsilon": eps, "charge0": q0, "max_rel_drift": worst}
            )
            for (ax, at) in apexes:
                cone_rows.append(
                    {
                        "mass": m,
                        "epsilon": eps,
                        "x": ax,
                        "t": at,
                        "residual": cone_charge(mesh, _aligned(ax, d0), _aligned(at, d0)).residual,
                    }
                )
            if m == 0.0:
                pp, pm = phi_line_integrals(mesh, _aligned(0.1, d0), _aligned(0.3, d0))
                pe = phi_epsilon(_aligned(0.1, d0), _aligned(0.3, d0), eps)
                tables.setdefault("phi_identity", []).append(
                    {
                        "epsilon": eps,
                        "x": _aligned(0.1, d0),
                        "t": _aligned(0.3, d0),
                        "dev_plus_minus": abs(pp - pm),
                        "dev_plus_vs_phi_eps": abs(pp - pe),
                        "dev_sum_vs_twice_phi_eps": abs(pp + pm - 2.0 * pe),
                    }
                )
                worst_mod = 0.0
                for n in range(100, mesh.n_levels + 1, 100):
                    lo, hi = mesh.valid_range(n)
                    ref = np.abs(mesh.u[0, lo - n : hi + 1 - n])
                    worst_mod = max(
                        worst_mod,
                        float(np.abs(np.abs(mesh.u[n, lo : hi + 1]) - ref).max()),
                    )
                tables.setdefault("modulus_transport", []).append(
                    {"epsilon": eps, "max_abs_dev": worst_mod}
                )
    tables["charge_drift"] = drift_rows
    tables["cone_residuals"] = cone_rows
    verdicts["charge_drift_below_1e-6"] = all(r["max_rel_drift"] <= 1e-6 for r in drift_rows)
    verdicts["cone_residuals_below_1e-5"] = all(r["residual"] <= 1e-5 for r in cone_rows)
    verdicts["phi_identities_match"] = all(
        max(r["dev_plus_minus"], r["dev_plus_vs_phi_eps"], r["dev_sum_vs_twice_phi_eps"]) <= 1e-6
        for r in tables["phi_identity"]
    )
    # unitary phase factors transport |u| exactly; only exp() rounding accumulates
    verdicts["modulus_transport_exact"] = all(
        r["max_abs_dev"] <= 1e-10 for r in tables["modulus_transport"]
    )

    # Gronwall bound on A(t)
    gronwall_rows = []
    for m in (0.0, 0.5, 1.0):
        for eps in (0.5, 0.1, 0.01):
            spec = DataSpec(epsilon=eps, cutoff=True, mass=m)
            mesh = solve(spec, x_min=-half, x_max=half, delta=d0, t_max=_aligned(0.5, d0))
            A = a_functional_curve(mesh)
            tgrid = np.arange(1, mesh.n_levels + 1) * d0
            bound = 8.0 * np.sqrt(tgrid) * np.exp(2.0 * m * tgrid)
            ratios = A[1:] / bound
            gronwall_rows.append(
                {
                    "mass": m,
                    "epsilon": eps,
                    "max_bound_ratio": float(ratios.max()),
                    "violations": int((ratios > 1.0).sum()),
                }
            )
    tables["gronwall"] = gronwall_rows
    verdicts["gronwall_no_violations"] = all(r["violations"] == 0 for r in gronwall_rows)

    notes["scheme"] = (
        "Charge is conserved to rounding by the unitary phase factors; cone residuals "
        "at kink-crossing apexes scale like delta^2/eps^2 (field error), see ledger/README."
    )
    return ExperimentReport(
        experiment=config.experiment,
        config=config.echo(),
        tables=tables,
        verdicts=verdicts,
        notes=notes,
        runtime=_runtime_block(t0),
    )


RUNNERS: dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
    "data-convergence": run_data_convergence,
    "bifurcation": run_bifurcation,
    "product-dichotomy": run_product_dichotomy,
    "self-similar": run_self_similar,
    "pv-residual": run_pv_residual,
    "solver-validation": run_solver_validation,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[config.experiment](config)
