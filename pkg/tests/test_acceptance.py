"""Acceptance criteria.

One test per criterion; `pytest -v` prints one pass/fail line each.  All
tolerances are pinned.  Heavy evolutions use sparse Krylov propagation
(scipy expm_multiply) because this suite targets a single-core desk machine
where dense complex eigensolves above ~1000 modes are the bottleneck.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from dispersim.analytic import c1_resolvent
from dispersim.bessel import bessel_quarter_with_derivatives
from dispersim.dispersion import (
    LinearDispersion,
    analytic_dispersion_far,
    analytic_dispersion_near,
    biexp_rates,
    corrected_dispersion,
    single_band_threshold,
)
from dispersim.dynamics import (
    amplitude_trajectory,
    amplitude_trajectory_krylov,
    assemble_hamiltonian,
    check_time_window,
    diagonalize,
    sparse_hamiltonian,
)
from dispersim.errors import NonInvertibleDispersionError
from dispersim.model import PhysicalParams, StateVector, build_grid
from dispersim.optimize import OptimizationProblem, gradient_report, optimize_dispersion
from dispersim.ramp import (
    RampProfile,
    ramp_scatter,
    reflection_bound,
    reflection_envelope,
    robust_transfer_scan,
)


def _trajectory_krylov(params, dispersion, n_points, window, t_hi, resolution=0.01):
    """(times, c1, c2) on a uniform grid via sparse Krylov propagation."""
    grid = build_grid(params, dispersion, n_points=n_points, window=window)
    check_time_window(grid, t_hi, params.v_g)
    h = sparse_hamiltonian(grid, dispersion, params)
    psi0 = StateVector.qubit1_excited(grid.n_modes).to_vector()
    times = np.arange(0.0, t_hi + resolution / 2, resolution)
    amps = amplitude_trajectory_krylov(h, psi0, times, components=(0, 1))
    return times, amps[:, 0], amps[:, 1]


def _peak(params, dispersion, n_points, window, t_hi, resolution=0.01):
    times, _, c2 = _trajectory_krylov(params, dispersion, n_points, window, t_hi, resolution)
    p2 = np.abs(c2) ** 2
    i = int(np.argmax(p2))
    return float(p2[i]), float(times[i])


# --------------------------------------------------------------- criterion 1
def test_criterion_01_markovian_limit():
    """Linear band, d = 10, N = 2000, window 40 gamma: peak = 0.5413 +/- 0.01.

    Known discrepancy: at the pinned window the finite-bandwidth correction
    (~ +0.69 gamma / W) raises the peak to 0.5584; the pinned value is only
    reached as W -> infinity (see the wide-window companion test).  The
    criterion is asserted exactly as stated.
    """
    t0 = time.monotonic()
    p = PhysicalParams(d=10.0)
    peak, _ = _peak(p, LinearDispersion(p.v_g), 2000, 40.0, 20.0)
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    assert peak == pytest.approx(0.5413, abs=0.01)


def test_criterion_01_markovian_limit_wide_window():
    """Companion: the same setup at window 640 gamma converges onto 4/e^2."""
    p = PhysicalParams(d=10.0)
    peak, t_star = _peak(p, LinearDispersion(p.v_g), 20000, 640.0, 20.0)
    assert peak == pytest.approx(0.5413, abs=0.01)
    # Markovian cascade peaks at t = d/v_g + 1/gamma
    assert t_star == pytest.approx(11.0, abs=0.1)


# --------------------------------------------------------------- criterion 2
def test_criterion_02_far_separation_transfer():
    t0 = time.monotonic()
    p = PhysicalParams(d=5.0)
    peak, t_star = _peak(p, analytic_dispersion_far(p), 2000, 40.0, 10.0)
    assert time.monotonic() - t0 < 60.0
    assert peak >= 0.98
    assert abs(t_star - 7.0) <= 0.2


# --------------------------------------------------------------- criterion 3
def test_criterion_03_near_separation_transfer():
    t0 = time.monotonic()
    p = PhysicalParams(d=0.2)
    near, _ = _peak(p, analytic_dispersion_near(p), 6000, 250.0, 4.5)
    far, _ = _peak(p, analytic_dispersion_far(p), 6000, 250.0, 4.5)
    assert time.monotonic() - t0 < 120.0
    assert near >= 0.90
    assert far < near


# --------------------------------------------------------------- criterion 4
def test_criterion_04_biexponential_oracle():
    """|c1(t)| from the discretized model vs the closed form, sup error < 1e-3
    on t in [0, 10] sampled at 0.02/gamma.

    Two-segment composite: the short-time Zeno transient needs bandwidth
    (window 3000, capped below omega_q by band positivity), the long window
    needs mode density; both use sparse Krylov propagation.
    """
    t0 = time.monotonic()
    segments = [
        (0.0, 0.5, 3000.0, 60000),
        (0.5, 10.0, 300.0, 30000),
    ]
    for d in (0.5, 1.0, 2.0, 5.0):
        p = PhysicalParams(d=d)
        disp = analytic_dispersion_far(p)
        bi = biexp_rates(d)
        assert abs(bi.gamma1 * bi.gamma2 - 1.0) < 1e-12
        assert abs(bi.w1 - bi.w2 - 1.0) < 1e-12
        for t_lo, t_hi, window, n_points in segments:
            grid = build_grid(p, disp, n_points=n_points, window=window)
            h = sparse_hamiltonian(grid, disp, p, n_qubits=1)
            psi0 = np.zeros(grid.n_modes + 1, dtype=complex)
            psi0[0] = 1.0
            times = np.arange(t_lo, t_hi + 0.01, 0.02)
            c1 = amplitude_trajectory_krylov(h, psi0, times, components=(0,))[:, 0]
            err = np.max(np.abs(np.abs(c1) - np.abs(c1_resolvent(times, d))))
            assert err < 1e-3, f"d={d}, segment [{t_lo},{t_hi}]: sup error {err:.2e}"
    assert time.monotonic() - t0 < 300.0


# --------------------------------------------------------------- criterion 5
def test_criterion_05_corrected_dispersion_invertibility():
    t0 = time.monotonic()
    with pytest.raises(NonInvertibleDispersionError):
        corrected_dispersion(1.0)
    corrected_dispersion(5.0)  # must not raise
    d_star = single_band_threshold(d_lo=1.0, d_hi=5.0, tol=1e-3)
    assert time.monotonic() - t0 < 300.0
    assert 1.5 <= d_star <= 1.9


# --------------------------------------------------------------- criterion 6
def test_criterion_06_adjoint_gradient():
    t0 = time.monotonic()
    # full check on an N = 200 toy grid
    p = PhysicalParams(d=2.0)
    disp = analytic_dispersion_far(p)
    grid = build_grid(p, disp, n_points=200, window=40.0)
    omega = np.asarray(disp.omega_of_k(grid.k_values))
    t = 3.9
    rep = gradient_report(grid, p, omega, t)
    eps_t = 1e-6
    fd_t = (
        gradient_report(grid, p, omega, t + eps_t).cost
        - gradient_report(grid, p, omega, t - eps_t).cost
    ) / (2 * eps_t)
    scale_t = max(abs(fd_t), 1e-12)
    assert abs(rep.d_cost_d_time - fd_t) / scale_t < 1e-5
    eps = 1e-5
    for j in range(grid.n_modes):
        bumped = omega.copy()
        bumped[j] += eps
        cp = gradient_report(grid, p, bumped, t).cost
        bumped[j] -= 2 * eps
        cm = gradient_report(grid, p, bumped, t).cost
        fd = (cp - cm) / (2 * eps)
        assert abs(rep.d_cost_d_omega[j] - fd) / max(abs(fd), 1e-12) < 1e-5, f"j={j}"

    # spot-check 10 components at N = 2000 (finite differences evaluated by
    # Krylov propagation; re-diagonalizing 2000 times is not needed)
    import scipy.sparse as sp
    from scipy.sparse.linalg import expm_multiply

    from dispersim.dynamics import hamiltonian_from_detunings

    grid2 = build_grid(p, disp, n_points=2000, window=40.0)
    omega2 = np.asarray(disp.omega_of_k(grid2.k_values))
    rep2 = gradient_report(grid2, p, omega2, t)
    psi0 = StateVector.qubit1_excited(grid2.n_modes).to_vector()

    def cost_at(om):
        h = sp.csc_matrix(hamiltonian_from_detunings(grid2, om - p.omega_q, p))
        psi = expm_multiply(-1j * h * t, psi0)
        return float(abs(psi[1]) ** 2)

    eps2 = 1e-4
    for j in np.linspace(50, 1950, 10).astype(int):
        om = omega2.copy()
        om[j] += eps2
        cp = cost_at(om)
        om[j] -= 2 * eps2
        cm = cost_at(om)
        fd = (cp - cm) / (2 * eps2)
        assert abs(rep2.d_cost_d_omega[j] - fd) / max(abs(fd), 1e-12) < 1e-3, f"j={j}"
    assert time.monotonic() - t0 < 600.0


# --------------------------------------------------------------- criterion 7
def test_criterion_07_optimization_gain():
    t0 = time.monotonic()
    p = PhysicalParams(d=2.0)
    disp = analytic_dispersion_far(p)
    grid = build_grid(p, disp, n_points=400, window=80.0)
    problem = OptimizationProblem(
        grid=grid,
        params=p,
        init_dispersion=np.asarray(disp.omega_of_k(grid.k_values)),
        init_time=3.993,
        max_iters=200,
        step_init=30.0,
    )
    res = optimize_dispersion(problem)
    assert 0.90 <= res.init_cost <= 0.94
    assert res.final_cost >= 0.97
    assert np.all(np.diff(res.cost_history) >= 0)
    assert time.monotonic() - t0 < 3600.0


# --------------------------------------------------------------- criterion 8
def test_criterion_08_ramp_scattering():
    t0 = time.monotonic()
    p = PhysicalParams(d=15.0)
    lam = p.lambda_q
    # flux conservation
    for L in (lam, 3 * lam, 10 * lam):
        ramp = RampProfile(L=L, params=p)
        for om in p.omega_q + np.linspace(-5.0, 5.0, 11):
            s = ramp_scatter(float(om), ramp)
            assert abs(s.reflectance + s.transmittance - 1.0) < 1e-8
    # analytic bound for L >= 5 lambda_q
    for L in (5 * lam, 8 * lam, 20 * lam, 50 * lam):
        for om in p.omega_q + np.array([-3.0, -0.5, 0.7, 3.0]):
            s = ramp_scatter(float(om), RampProfile(L=L, params=p))
            assert s.reflectance <= reflection_bound(float(om), L, p) * (1 + 1e-9)
    # 1/L^4 envelope over L in [10, 50] lambda_q
    L_values = np.geomspace(10 * lam, 50 * lam, 9)
    env = reflection_envelope(p.omega_q + 1.0, L_values, p, samples_per_period=15)
    slope = np.polyfit(np.log(L_values), np.log(env), 1)[0]
    assert abs(slope - (-4.0)) <= 0.1
    assert time.monotonic() - t0 < 300.0


# --------------------------------------------------------------- criterion 9
def test_criterion_09_robustness():
    t0 = time.monotonic()
    d = 15.0
    p = PhysicalParams(d=d)
    points = robust_transfer_scan(
        [-d / 2, -d / 4, 0.0, d / 4, d / 2], L=3.0, d=d, params=p,
        n_points=2200, window=160.0,
    )
    by_dd = {pt.delta_d: pt for pt in points}
    for pt in points:
        assert pt.p_inhomogeneous >= 0.98, f"delta_d={pt.delta_d}: {pt.p_inhomogeneous}"
    assert by_dd[d / 4].p_homogeneous < 0.90
    assert by_dd[d / 2].p_homogeneous < 0.70
    assert time.monotonic() - t0 < 900.0


# -------------------------------------------------------------- criterion 10
class _ScaledDispersion:
    """omega'(k) = omega(k / s): the band of a medium compressed by s."""

    def __init__(self, base, scale):
        self.base = base
        self.scale = scale

    def omega_of_k(self, k):
        return self.base.omega_of_k(np.asarray(k) / self.scale)

    def k_of_omega(self, omega):
        return self.scale * np.asarray(self.base.k_of_omega(omega))


def test_criterion_10_scale_invariance():
    """(d, g, omega(k)) and (d/2, g/sqrt(2), omega(k/2)) share |c1|^2, |c2|^2."""
    t0 = time.monotonic()
    p = PhysicalParams(d=5.0, gamma=1.0)
    disp = analytic_dispersion_far(p)
    times = np.arange(0.0, 10.0, 0.02)

    grid = build_grid(p, disp, n_points=600, window=40.0)
    eig = diagonalize(assemble_hamiltonian(grid, disp, p))
    psi0 = StateVector.qubit1_excited(grid.n_modes).to_vector()
    amps = amplitude_trajectory(eig, psi0, times)

    # halving gamma halves g; the compressed band omega(k/2) on the halved
    # geometry reproduces the identical rotating-frame Hamiltonian
    p2 = PhysicalParams(d=p.d / 2, gamma=p.gamma / 2, v_g=p.v_g, omega_q=p.omega_q)
    assert p2.g == pytest.approx(p.g / math.sqrt(2), rel=1e-15)
    disp2 = _ScaledDispersion(disp, 2.0)
    grid2 = build_grid(p2, disp2, n_points=600, window=40.0)
    eig2 = diagonalize(assemble_hamiltonian(grid2, disp2, p2))
    amps2 = amplitude_trajectory(eig2, psi0, times)

    for col in (0, 1):
        sup = np.max(np.abs(np.abs(amps[:, col]) ** 2 - np.abs(amps2[:, col]) ** 2))
        assert sup < 1e-6, f"component {col}: sup deviation {sup:.2e}"
    assert time.monotonic() - t0 < 120.0


# -------------------------------------------------------------- criterion 11
def test_criterion_11_property_suite(tmp_path):
    t0 = time.monotonic()
    # norm conservation at all sampled times of a representative evolution
    p = PhysicalParams(d=5.0)
    disp = analytic_dispersion_far(p)
    grid = build_grid(p, disp, n_points=800, window=40.0)
    eig = diagonalize(assemble_hamiltonian(grid, disp, p))
    psi0 = StateVector.qubit1_excited(grid.n_modes).to_vector()
    a = eig.vectors.conj().T @ psi0
    for t in np.arange(0.0, 10.0, 0.25):
        psi = eig.vectors @ (np.exp(-1j * eig.energies * t) * a)
        assert abs(np.vdot(psi, psi).real - 1.0) < 1e-10

    # Bessel Wronskian J Y' - J' Y = 2/(pi x) over the evaluation range
    for x in np.geomspace(1e-3, 1e8, 120):
        j, y, jp, yp = bessel_quarter_with_derivatives(float(x))
        ref = 2.0 / (math.pi * x)
        assert abs(j * yp - jp * y - ref) < 1e-10 * ref

    # CLI determinism: identical configs give byte-identical payloads
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        '{"experiment": "fig2b", "sweep": {"n_points": 60}, "output": {"dir": "%s"}}'
        % tmp_path.as_posix()
    )
    for out in ("a", "b"):
        subprocess.run(
            [sys.executable, "-m", "dispersim.cli", "run", str(cfg),
             "--out", str(tmp_path / out)],
            check=True,
            capture_output=True,
        )
    assert (tmp_path / "a" / "fig2b_biexp.csv").read_bytes() == (
        tmp_path / "b" / "fig2b_biexp.csv"
    ).read_bytes()
    assert time.monotonic() - t0 < 300.0
