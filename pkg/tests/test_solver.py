import io
import math

import numpy as np
import pytest

from thirringlab.errors import DomainError, SingularPointError, StepSizeError
from thirringlab.fields import DataSpec
from thirringlab.closed_forms import eval_exact_grid, phi_epsilon
from thirringlab.solver import (
    a_functional,
    a_functional_curve,
    cone_charge,
    global_charge,
    gregory_integral,
    load_mesh,
    phi_line_integrals,
    remainders,
    save_mesh,
    solve,
    write_snapshot_table,
)


@pytest.fixture(scope="module")
def mesh_m0():
    spec = DataSpec(epsilon=0.1, cutoff=True, mass=0.0)
    return solve(spec, x_min=-1.024, x_max=1.024, delta=2e-3, t_max=0.4)


@pytest.fixture(scope="module")
def mesh_m1():
    spec = DataSpec(epsilon=0.1, cutoff=True, mass=1.0)
    return solve(spec, x_min=-1.024, x_max=1.024, delta=2e-3, t_max=0.4)


def test_gregory_rule_accuracy():
    # smooth integrand: order-6 behaviour vs trapezoid's order 2
    xs = np.linspace(0.0, 1.0, 41)
    h = xs[1] - xs[0]
    approx = gregory_integral(np.exp(xs), h)
    assert approx == pytest.approx(math.e - 1.0, abs=5e-11)
    trap = np.trapezoid(np.exp(xs), dx=h)
    assert abs(trap - (math.e - 1.0)) > 1e-5


def test_solver_requires_positive_epsilon():
    with pytest.raises(SingularPointError):
        solve(DataSpec(epsilon=0.0, cutoff=True), x_min=-1, x_max=1, delta=1e-3, t_max=0.1)


def test_solver_step_size_guards():
    with pytest.raises(StepSizeError):
        # delta > eps/10: data gradient unresolved
        solve(DataSpec(epsilon=0.01, cutoff=True), x_min=-1, x_max=1, delta=5e-3, t_max=0.1)
    with pytest.raises(StepSizeError):
        # contraction violated: large side constants push delta*(2B^2+m) past 1
        big = DataSpec(kappa_plus=3, kappa_minus=3, lambda_plus=3, lambda_minus=3,
                       epsilon=1e-3, cutoff=True)
        solve(big, x_min=-0.01, x_max=0.01, delta=1e-4, t_max=1e-3)


def test_solver_domain_too_narrow():
    with pytest.raises(DomainError):
        solve(DataSpec(epsilon=0.5, cutoff=True), x_min=-0.05, x_max=0.05, delta=1e-3, t_max=0.2)


def test_zero_data_zero_field():
    spec = DataSpec(kappa_plus=0, kappa_minus=0, lambda_plus=0, lambda_minus=0,
                    epsilon=0.5, cutoff=True)
    mesh = solve(spec, x_min=-0.5, x_max=0.5, delta=1e-2, t_max=0.2)
    assert np.all(mesh.u == 0) and np.all(mesh.v == 0)
    assert global_charge(mesh, mesh.n_levels) == 0.0
    assert a_functional(mesh, 0.1) == 0.0
    d = cone_charge(mesh, 0.0, 0.1)
    assert d.flux_left == d.flux_right == d.base == 0.0


def test_oracle_equivalence_m0(mesh_m0):
    # cutoff run agrees with the uncut closed form inside |x| + t < 1
    spec = DataSpec(epsilon=0.1, cutoff=False, mass=0.0)
    xs = mesh_m0.x_nodes()
    worst = 0.0
    for n in (50, 100, 150, 200):
        t = n * mesh_m0.delta
        sel = np.abs(xs) + t <= 0.9
        lo, hi = mesh_m0.valid_range(n)
        sel[:lo] = False
        sel[hi + 1 :] = False
        U, V = eval_exact_grid(spec, xs[sel], np.full(int(sel.sum()), t))
        worst = max(worst, float(np.abs(mesh_m0.u[n, sel] - U).max()))
    assert worst <= 1.5e-3  # second order at delta = 2e-3


def test_convergence_order_m0():
    spec = DataSpec(epsilon=0.5, cutoff=False, mass=0.0)
    errs = []
    for d in (8e-3, 4e-3):
        mesh = solve(spec, x_min=-0.512, x_max=0.512, delta=d, t_max=0.256)
        xs = mesh.x_nodes()
        n = mesh.n_levels
        lo, hi = mesh.valid_range(n)
        sel = np.abs(xs) <= 0.2
        sel[:lo] = False
        sel[hi + 1 :] = False
        U, V = eval_exact_grid(spec, xs[sel], np.full(int(sel.sum()), n * d))
        errs.append(
            max(float(np.abs(mesh.u[n, sel] - U).max()), float(np.abs(mesh.v[n, sel] - V).max()))
        )
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_modulus_transport_is_exact(mesh_m0):
    # unitary phases: |u(j, n)| equals |u(j - n, 0)| to rounding accumulation
    n = mesh_m0.n_levels
    lo, hi = mesh_m0.valid_range(n)
    got = np.abs(mesh_m0.u[n, lo : hi + 1])
    ref = np.abs(mesh_m0.u[0, lo - n : hi + 1 - n])
    assert float(np.abs(got - ref).max()) < 1e-11


def test_global_charge_closed_form_and_conservation():
    # charge audits need the support inside the valid range: x_max >= 1 + 2 t_max
    spec = DataSpec(epsilon=0.1, cutoff=True, mass=1.0)
    mesh = solve(spec, x_min=-1.856, x_max=1.856, delta=2e-3, t_max=0.4)
    q0 = global_charge(mesh, 0)
    # trapezoid of the data matches the closed form 4 log(1 + 1/eps) to O(delta^2 / eps)
    assert q0 == pytest.approx(4.0 * math.log(11.0), rel=1e-3)
    for level in (50, 100, 200):
        qn = global_charge(mesh, level)
        assert abs(qn - q0) / q0 < 1e-9


def test_global_charge_support_guard():
    # uncut data touch the valid-range edge: must refuse
    spec = DataSpec(epsilon=0.5, cutoff=False, mass=0.0)
    mesh = solve(spec, x_min=-0.512, x_max=0.512, delta=4e-3, t_max=0.1)
    with pytest.raises(DomainError):
        global_charge(mesh, 0)


def test_cone_charge_m0_exact(mesh_m0):
    d = cone_charge(mesh_m0, 0.0, 0.4)
    assert d.base == pytest.approx(4.0 * math.log(5.0), rel=1e-13)
    assert d.residual < 1e-12
    # off-kink apex
    d2 = cone_charge(mesh_m0, 0.3, 0.2)
    assert d2.residual < 1e-12


def test_cone_charge_m1_second_order():
    spec = DataSpec(epsilon=0.1, cutoff=True, mass=1.0)
    residuals = []
    for d in (4e-3, 2e-3):
        mesh = solve(spec, x_min=-1.024, x_max=1.024, delta=d, t_max=0.4)
        residuals.append(cone_charge(mesh, 0.0, 0.4).residual)
    assert residuals[1] < 1e-5
    assert 3.0 <= residuals[0] / residuals[1] <= 5.0  # O(delta^2)


def test_cone_requires_domain(mesh_m0):
    with pytest.raises(DomainError):
        cone_charge(mesh_m0, 0.9, 0.4)  # cone leaves the mesh
    with pytest.raises(DomainError):
        cone_charge(mesh_m0, 0.0005, 0.1)  # not grid aligned


def test_phi_line_integrals_identities(mesh_m0):
    # symmetric massless data: phi+ = phi- = phi_eps, sum balances the base
    x, t = 0.1, 0.3
    pp, pm = phi_line_integrals(mesh_m0, x, t)
    pe = phi_epsilon(x, t, 0.1)
    assert pp == pytest.approx(pm, abs=1e-6)
    assert pp == pytest.approx(pe, abs=1e-6)
    assert pp + pm == pytest.approx(2.0 * pe, abs=1e-6)
    assert phi_line_integrals(mesh_m0, 0.0, 0.0) == (0.0, 0.0)


def test_a_functional_properties(mesh_m1):
    curve = a_functional_curve(mesh_m1)
    assert curve[0] == 0.0
    assert np.all(np.diff(curve) >= -1e-15)  # nondecreasing
    t = np.arange(1, mesh_m1.n_levels + 1) * mesh_m1.delta
    bound = 8.0 * np.sqrt(t) * np.exp(2.0 * mesh_m1.spec.mass * t)
    assert np.all(curve[1:] <= bound)
    assert a_functional(mesh_m1, 0.2) == pytest.approx(float(curve[100]))


def test_remainders_m0_vanish():
    spec = DataSpec(epsilon=0.2, cutoff=True, mass=0.0)
    mesh = solve(spec, x_min=-0.0256, x_max=0.0256, delta=1e-4, t_max=0.02)
    rb = remainders(mesh, 0.0, 0.02)
    assert rb.r1 == 0 and rb.r2 == 0 and rb.r3 == 0
    assert rb.key_residual <= 1e-6


def test_remainders_m1_bounds():
    # ball B_{delta/4}(0, delta) with delta = 1e-4; eps <= 0.75 delta keeps the
    # main-term floor 1/(2 delta) valid
    eps = math.exp(-3.5 * math.pi)  # 1.67e-5
    d_ball = 1e-4
    m = 1.0
    c = 16.0 * math.exp(2.0 * m)
    C = 4.0 * m * c + m * m * c * c
    delta = eps / 12.0
    half = round(3 * d_ball / delta) * delta
    mesh = solve(DataSpec(epsilon=eps, cutoff=True, mass=m),
                 x_min=-half, x_max=half, delta=delta, t_max=round(1.3 * d_ball / delta) * delta)
    for fx, ft in ((0.0, 1.0), (0.15, 0.9), (-0.15, 1.1)):
        x = round(fx * d_ball / delta) * delta
        t = round(ft * d_ball / delta) * delta
        rb = remainders(mesh, x, t)
        assert rb.sum_abs <= C
        assert 1.0 / (2.0 * d_ball) <= abs(rb.main_term) <= 2.0 / d_ball
        assert abs(rb.main_term) - rb.sum_abs > 0


def test_remainders_requires_cone_point(mesh_m1):
    with pytest.raises(DomainError):
        remainders(mesh_m1, 0.3, 0.2)  # |x| > t is outside the product region
    bad = DataSpec(kappa_plus=2.0, epsilon=0.1, cutoff=True, mass=1.0)
    mesh = solve(bad, x_min=-0.512, x_max=0.512, delta=2e-3, t_max=0.1)
    with pytest.raises(ValueError):
        remainders(mesh, 0.0, 0.1)


def test_cutoff_consistency_inside_light_cone():
    # finite speed of propagation: cutoff on/off agree where |x| + t < 1
    kw = dict(x_min=-1.024, x_max=1.024, delta=4e-3, t_max=0.2)
    cut = solve(DataSpec(epsilon=0.1, cutoff=True, mass=1.0), **kw)
    unc = solve(DataSpec(epsilon=0.1, cutoff=False, mass=1.0), **kw)
    n = cut.n_levels
    xs = cut.x_nodes()
    lo, hi = cut.valid_range(n)
    sel = np.abs(xs) + 0.2 < 0.99
    sel[:lo] = False
    sel[hi + 1 :] = False
    assert np.abs(cut.u[n, sel] - unc.u[n, sel]).max() < 1e-13
    assert np.abs(cut.v[n, sel] - unc.v[n, sel]).max() < 1e-13


def test_snapshot_table(mesh_m0):
    buf = io.StringIO()
    write_snapshot_table(mesh_m0, 0, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "x,t,re_u,im_u,re_v,im_v"
    assert len(lines) == mesh_m0.n_nodes + 1


def test_binary_roundtrip(tmp_path, mesh_m0):
    path = tmp_path / "mesh.bin"
    save_mesh(mesh_m0, str(path))
    back = load_mesh(str(path))
    assert back.spec == mesh_m0.spec
    assert back.delta == mesh_m0.delta and back.x_min == mesh_m0.x_min
    assert np.array_equal(back.u, mesh_m0.u)
    assert np.array_equal(back.v, mesh_m0.v)


def test_binary_rejects_garbage(tmp_path):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"NOTAMESH" + b"\0" * 64)
    with pytest.raises(ValueError):
        load_mesh(str(p))


def test_charge_drift_at_rounding_floor():
    # the unitary-phase update conserves the discrete charge to rounding at
    # every delta, so the O(delta^2) drift-ratio law is satisfied at its floor
    spec = DataSpec(epsilon=0.1, cutoff=True, mass=1.0)
    for d in (4e-3, 2e-3):
        mesh = solve(spec, x_min=-1.856, x_max=1.856, delta=d, t_max=0.4)
        q0 = global_charge(mesh, 0)
        qn = global_charge(mesh, mesh.n_levels)
        assert abs(qn - q0) / q0 <= 1e-12
