import json
import math

import numpy as np
import pytest

from thirringlab.errors import ResolutionError
from thirringlab.fields import DataSpec, data_sampler, rescale_sampler
from thirringlab.norms import (
    ConvergenceTable,
    Divergence,
    LebesgueSpec,
    SobolevSpec,
    convergence_table,
    fourier_decay_sup,
    hs_norm,
    lp_distance,
    lp_norm,
)

F_SING = data_sampler(DataSpec(epsilon=0.0, cutoff=True), "u")


def zero_sampler(x):
    return np.zeros_like(np.asarray(x, dtype=float), dtype=complex)


def smooth_bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 1.0
    out[m] = np.exp(1.0 + 1.0 / (x[m] ** 2 - 1.0))
    return out + 0j


def test_lp_examples():
    assert lp_norm(F_SING, LebesgueSpec(1.0, (-1, 1))) == pytest.approx(4.0, rel=1e-13)
    assert isinstance(lp_norm(F_SING, LebesgueSpec(2.0, (-1, 1))), Divergence)
    assert lp_norm(zero_sampler, LebesgueSpec(1.5, (-1, 1))) == 0.0


def test_lp_requires_sane_resolution():
    with pytest.raises(ValueError):
        lp_norm(F_SING, LebesgueSpec(1.0, (-1, 1)), resolution=32)


def test_lp_spec_validation():
    with pytest.raises(ValueError):
        LebesgueSpec(0.5, (-1, 1))
    with pytest.raises(ValueError):
        LebesgueSpec(1.0, (1, -1))


@pytest.mark.parametrize("p", [1.0, 1.5, 1.9])
def test_quadrature_order_against_closed_form(p):
    # int_0^1 x^(-p/2) dx = 1/(1 - p/2); error must shrink by >= 3x per halving
    # of the panel width until the rounding floor
    exact = (1.0 / (1.0 - p / 2.0)) ** (1.0 / p)
    spec = LebesgueSpec(p, (0.0, 1.0))
    errs = []
    for res in (64, 128, 256):
        val = lp_norm(lambda x: np.abs(np.asarray(x, float)) ** -0.5 + 0j, spec, res)
        errs.append(abs(val - exact))
    floor = 64.0 * np.spacing(exact)
    for e1, e2 in zip(errs, errs[1:]):
        assert e2 <= max(e1 / 3.0, floor)
    assert errs[-1] <= 1e-12


def test_lp_inf_is_sampled_sup():
    f = data_sampler(DataSpec(epsilon=0.01, cutoff=True), "u")
    val = lp_norm(f, LebesgueSpec(math.inf, (-1, 1)))
    assert val == pytest.approx(0.01**-0.5, rel=1e-6)


def test_l2_growth_closed_form():
    for eps in (0.1, 0.01):
        f = data_sampler(DataSpec(epsilon=eps, cutoff=True), "u")
        val = lp_norm(f, LebesgueSpec(2.0, (-1, 1)))
        assert float(val) ** 2 == pytest.approx(2.0 * math.log(1.0 + 1.0 / eps), rel=1e-12)


def test_scaling_law_norm_ratio():
    # ||lam^(1/2) f(lam .)||_p = lam^(1/2 - 1/p) ||f||_p for the cutoff family
    lam = 4.0
    base = data_sampler(DataSpec(epsilon=0.0, cutoff=True), "u")
    scaled = rescale_sampler(base, lam)
    for p in (1.0, 1.5):
        n_base = lp_norm(base, LebesgueSpec(p, (-1.0, 1.0)))
        n_scaled = lp_norm(scaled, LebesgueSpec(p, (-1.0 / lam, 1.0 / lam)))
        assert n_scaled / n_base == pytest.approx(lam ** (0.5 - 1.0 / p), rel=1e-12)


def test_hs_zero_and_examples():
    assert hs_norm(zero_sampler, -0.25, 2**10, 50.0).value == 0.0
    res = hs_norm(F_SING, -0.25, 2**16, 1000.0)
    assert res.value > 0 and math.isfinite(res.value)
    assert res.tail_estimate < 0.5  # decay-based bound on the neglected tail
    # stable under grid doubling to well under 1%
    res2 = hs_norm(F_SING, -0.25, 2**17, 1000.0)
    assert abs(res2.value - res.value) <= 0.01 * res.value


def test_hs_parseval():
    h = hs_norm(smooth_bump, 0.0, 2**12, 200.0, window=1.5)
    l2 = lp_norm(smooth_bump, LebesgueSpec(2.0, (-1.2, 1.2)), singularities=())
    assert h.value == pytest.approx(float(l2), rel=1e-3)


def test_hs_monotone_in_s():
    vals = [hs_norm(smooth_bump, s, 2**12, 200.0, window=1.5).value for s in (-0.4, -0.2, 0.0, 0.3)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


def test_hs_cutoff_beyond_nyquist():
    with pytest.raises(ResolutionError):
        hs_norm(smooth_bump, 0.0, 2**10, 1e6, window=1.5)


def test_hs_spec_validation():
    with pytest.raises(ValueError):
        SobolevSpec(-0.25, 1000, 100.0)  # not a power of two
    with pytest.raises(ValueError):
        SobolevSpec(-0.25, 2**9, 100.0)  # too small
    with pytest.raises(ValueError):
        SobolevSpec(-0.25, 2**10, -1.0)


def test_fourier_decay_sup():
    # singular family: <xi>^(1/2) |f_hat| bounded, stable when the window doubles
    a = fourier_decay_sup(F_SING, 2**17, (50.0, 1000.0))
    b = fourier_decay_sup(F_SING, 2**17, (50.0, 2000.0))
    assert abs(b - a) <= 0.05 * a
    # smooth bump: decays faster than any power, far window falls well below near
    near = fourier_decay_sup(smooth_bump, 2**14, (0.0, 20.0), window=1.5)
    far = fourier_decay_sup(smooth_bump, 2**14, (100.0, 200.0), window=1.5)
    assert far < 1e-2 * near
    assert fourier_decay_sup(zero_sampler, 2**10, 50.0) == 0.0


def test_convergence_table_and_serialization(tmp_path):
    def family(eps):
        return data_sampler(DataSpec(epsilon=eps, cutoff=True), "u")

    spec = LebesgueSpec(1.0, (-1, 1))
    table = convergence_table(family, F_SING, spec, [2.0**-k for k in range(1, 7)],
                              family_id="f_eps->f")
    assert table.monotone_decreasing
    assert [r["status"] for r in table.rows] == ["ok"] * 6
    dists = table.distances()
    assert dists[-1] < dists[0]

    path = tmp_path / "table.csv"
    table.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epsilon,distance,status"
    assert len(lines) == 7
    sidecar = json.loads((tmp_path / "table.csv.json").read_text())
    assert sidecar["norm_spec"]["kind"] == "lebesgue"
    assert sidecar["family_id"] == "f_eps->f"
    assert sidecar["monotone_decreasing"] is True


def test_convergence_table_divergent_rows(tmp_path):
    def family(eps):
        return data_sampler(DataSpec(epsilon=eps, cutoff=True), "u")

    # distance to the singular target in L2 diverges for every eps
    table = convergence_table(family, F_SING, LebesgueSpec(2.0, (-1, 1)), [0.5, 0.25],
                              family_id="l2-divergent")
    assert all(r["status"] == "divergent" for r in table.rows)
    assert all(r["distance"] is None for r in table.rows)
    path = tmp_path / "div.csv"
    table.to_csv(path)
    assert ",,divergent" in path.read_text()


def test_constant_family_all_zero_distance():
    table = convergence_table(
        lambda eps: F_SING, F_SING, LebesgueSpec(1.0, (-1, 1)), [0.5, 0.25, 0.125],
        family_id="constant",
    )
    assert all(r["distance"] == 0.0 for r in table.rows)


def test_lp_distance_helper():
    f1 = data_sampler(DataSpec(epsilon=0.5, cutoff=True), "u")
    d = lp_distance(f1, f1, LebesgueSpec(1.5, (-1, 1)))
    assert d == 0.0
