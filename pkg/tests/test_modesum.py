import itertools
import math

import numpy as np
import pytest

from ndblackbody.closedform import energy_density
from ndblackbody.errors import BudgetExceededError, DomainError
from ndblackbody.modesum import (
    FieldParams,
    auto_n_max,
    build_lattice,
    continuum_convergence,
    maxwell_observables,
    occupation,
    off_diagonal_check,
    phi_squared_at,
    phi_squared_uniformity,
    scalar_observables,
)


def brute_scalar(lattice, tau, mass=0.0):
    """Loop over every mode in plain Python."""
    V = lattice.L ** lattice.d
    pd = gs = ps = 0.0
    pm = [0.0] * lattice.d
    rng = range(-lattice.n_max, lattice.n_max + 1)
    for n in itertools.product(rng, repeat=lattice.d):
        if not any(n):
            continue
        k = [2 * math.pi * ni / lattice.L for ni in n]
        k2 = sum(x * x for x in k)
        om = math.sqrt(k2 + mass * mass)
        occ = 1.0 / (math.exp(om / tau) - 1.0)
        pd += om * occ / V
        gs += k2 / om * occ / V
        ps += occ / (om * V)
        for m in range(lattice.d):
            pm[m] += k[m] ** 2 / om * occ / V
    return pd, gs, ps, pm


def transverse_basis(k):
    """Orthonormal vectors spanning the plane perpendicular to k."""
    d = len(k)
    q, _ = np.linalg.qr(np.column_stack([k, np.eye(d)]))
    return q[:, 1:d].T


def explicit_maxwell(lattice, tau):
    """Maxwell sums with explicit polarization vectors instead of the projector."""
    d, V = lattice.d, lattice.volume
    e_sq = f_sq = 0.0
    t_mm = np.zeros(d)
    for k in lattice.wavevectors():
        om = np.linalg.norm(k)
        w = 1.0 / np.expm1(om / tau) / (om * V)
        pol = transverse_basis(k)
        # <E_i E_j> and <d_i A_j d_k A_l> per mode
        ee = om * om * sum(np.outer(e, e) for e in pol) * w
        dada = np.einsum("i,k,jl->ijkl", k, k, sum(np.outer(e, e) for e in pol)) * w
        ff = dada - dada.transpose(1, 0, 2, 3) - dada.transpose(0, 1, 3, 2) + dada.transpose(1, 0, 3, 2)
        # ff[i,j,k,l] = <F_ij F_kl>
        e2 = np.trace(ee)
        f2 = np.einsum("ijij->", ff)
        e_sq += e2
        f_sq += f2
        t_mm += -np.diag(ee) + np.einsum("mkmk->m", ff) - 0.25 * (f2 - 2 * e2)
    return e_sq, f_sq, t_mm


def test_lattice_counts():
    lat = build_lattice(1, 1.0, 2)
    assert lat.n_modes == 4
    assert sorted(np.concatenate(list(lat.chunks()))[:, 0].tolist()) == [-2, -1, 1, 2]
    assert build_lattice(3, 1.0, 1).n_modes == 26
    lat = build_lattice(2, 2 * math.pi, 1)
    k = lat.wavevectors()
    assert len(k) == 8
    assert sorted(set(np.round(np.linalg.norm(k, axis=1), 12))) == [1.0, round(math.sqrt(2), 12)]


@pytest.mark.parametrize("d, n_max", [(1, 5), (2, 7), (3, 4), (4, 3), (5, 2), (6, 1)])
def test_chunks_enumerate_every_mode_once(d, n_max):
    lat = build_lattice(d, 3.0, n_max)
    modes = np.concatenate(list(lat.chunks()))
    assert len(modes) == lat.n_modes
    assert not np.any(np.all(modes == 0, axis=1))
    assert len({tuple(m) for m in modes}) == lat.n_modes
    # lexicographic order
    assert [tuple(m) for m in modes] == sorted(tuple(m) for m in modes)


def test_lattice_validation():
    with pytest.raises(BudgetExceededError):
        build_lattice(4, 16.0, 102)
    with pytest.raises(BudgetExceededError):
        build_lattice(3, 1.0, 10, budget=1000)
    for args in [(0, 1.0, 1), (3, 0.0, 1), (3, 1.0, 0)]:
        with pytest.raises(DomainError):
            build_lattice(*args)


def test_cutoff_rule():
    assert auto_n_max(16.0, 1.0) == 102
    lat = build_lattice(3, 16.0, 102)
    assert lat.cutoff_adequate(1.0)
    assert not build_lattice(3, 16.0, 101).cutoff_adequate(1.0)
    assert scalar_observables(build_lattice(3, 16.0, 3)).warnings


def test_occupation():
    assert occupation(math.log(2.0), 1.0) == pytest.approx(1.0, rel=1e-15)
    assert occupation(40.0, 1.0) == pytest.approx(math.exp(-40.0), rel=1e-15)
    assert occupation(40.0, 1.0) < 5e-18
    assert occupation(1e-8, 1.0) == pytest.approx(1e8, rel=1e-7)
    with pytest.raises(DomainError):
        occupation(0.0, 1.0)


@pytest.mark.parametrize("d, L, n_max, tau, mass", [
    (1, 3.0, 9, 0.8, 0.0), (2, 4.0, 6, 1.0, 0.0), (3, 5.0, 3, 0.7, 0.3), (4, 2.0, 2, 2.0, 1.0),
])
def test_scalar_against_brute_force(d, L, n_max, tau, mass):
    lat = build_lattice(d, L, n_max)
    obs = scalar_observables(lat, FieldParams(tau, mass))
    pd, gs, ps, pm = brute_scalar(lat, tau, mass)
    assert obs.phi_dot_sq == pytest.approx(pd, rel=1e-12)
    assert obs.grad_phi_sq == pytest.approx(gs, rel=1e-12)
    assert obs.phi_sq == pytest.approx(ps, rel=1e-12)
    lag = 0.5 * (pd - gs - mass ** 2 * ps)
    assert obs.p_diag == pytest.approx(np.array(pm) + lag, rel=1e-11, abs=1e-15)
    assert obs.rho == pytest.approx(0.5 * (pd + gs + mass ** 2 * ps), rel=1e-12)


@pytest.mark.parametrize("d, L, n_max", [(2, 3.0, 3), (3, 4.0, 2), (4, 3.0, 1)])
def test_maxwell_against_explicit_polarizations(d, L, n_max):
    lat = build_lattice(d, L, n_max)
    obs = maxwell_observables(lat, FieldParams(1.0))
    e_sq, f_sq, t_mm = explicit_maxwell(lat, 1.0)
    assert obs.E_sq == pytest.approx(e_sq, rel=1e-12)
    assert obs.F_sq == pytest.approx(f_sq, rel=1e-12)
    assert obs.p_diag == pytest.approx(t_mm, rel=1e-11)


def test_massless_scalar_continuum_d3():
    lat = build_lattice(3, 16.0, auto_n_max(16.0, 1.0))
    obs = scalar_observables(lat)
    assert abs(obs.rho - math.pi ** 2 / 30) / (math.pi ** 2 / 30) <= 1e-2
    assert obs.warnings == ()


def test_cold_lattice_suppressed():
    obs = scalar_observables(build_lattice(3, 4.0, 4), FieldParams(0.01))
    assert obs.rho <= 1e-20


@pytest.mark.parametrize("d, L, n_max, tau", [(1, 7.0, 40, 1.0), (2, 5.0, 20, 0.6), (3, 6.0, 12, 1.5), (5, 3.0, 3, 1.0)])
def test_massless_identities(d, L, n_max, tau):
    lat = build_lattice(d, L, n_max)
    s = scalar_observables(lat, FieldParams(tau))
    assert abs(s.lagrangian_avg) <= 1e-15 * s.rho
    assert s.phi_dot_sq == pytest.approx(s.grad_phi_sq, rel=1e-14)
    assert abs(s.trace) <= 1e-12 * s.rho
    mean = s.p_diag.mean()
    assert np.max(np.abs(s.p_diag - mean)) <= 1e-12 * mean


@pytest.mark.parametrize("mass", [0.1, 0.5, 2.0])
def test_massive_identities(mass):
    lat = build_lattice(3, 6.0, 20)
    s = scalar_observables(lat, FieldParams(1.0, mass))
    assert abs(s.lagrangian_avg) <= 1e-15 * s.rho
    assert s.trace == pytest.approx(mass ** 2 * s.phi_sq, rel=1e-12)
    # trace = (2 - D) <L> + m^2 <phi^2>
    assert s.trace == pytest.approx((1 - lat.d) * s.lagrangian_avg + mass ** 2 * s.phi_sq, rel=1e-12)
    assert s.trace > 0


@pytest.mark.parametrize("D", [3, 4, 5, 6])
def test_maxwell_exact_ratios(D):
    lat = build_lattice(D - 1, 4.0, {3: 26, 4: 12, 5: 6, 6: 3}[D])
    s = scalar_observables(lat)
    m = maxwell_observables(lat)
    g = D - 2
    assert m.rho == pytest.approx(g * s.rho, rel=1e-14)
    assert m.F_sq == pytest.approx(2 * m.E_sq, rel=1e-14)
    assert m.E_sq == pytest.approx(g * s.phi_dot_sq, rel=1e-14)
    assert m.F_sq == pytest.approx(2 * g * s.grad_phi_sq, rel=1e-14)
    assert m.p_diag == pytest.approx(g * s.p_diag, rel=1e-14)
    assert abs(m.trace) <= 1e-12 * m.rho


def test_maxwell_d5_continuum():
    lat = build_lattice(4, 6.0, auto_n_max(6.0, 1.0))
    m = maxwell_observables(lat)
    expected = 3 * energy_density(5, "scalar", 1.0)
    assert expected == pytest.approx(0.9455645, rel=1e-6)
    assert abs(m.rho - expected) / expected <= 1e-2


def test_maxwell_validation():
    with pytest.raises(DomainError):
        maxwell_observables(build_lattice(1, 3.0, 3))
    with pytest.raises(DomainError):
        maxwell_observables(build_lattice(3, 3.0, 3), FieldParams(1.0, 0.5))


@pytest.mark.parametrize("d, n_max, tau, L", [(3, 3, 1.0, 10.0), (2, 1, 0.4, 3.0), (5, 2, 0.7, 12.0)])
def test_off_diagonal_vanishes(d, n_max, tau, L):
    lat = build_lattice(d, L, n_max)
    params = FieldParams(tau)
    rho = scalar_observables(lat, params).rho
    assert off_diagonal_check(lat, params) <= 1e-15 * rho


def test_off_diagonal_exact_small_lattice():
    assert off_diagonal_check(build_lattice(2, 3.0, 1), FieldParams(0.9)) == 0.0


def phi_sq_double_sum(lattice, tau, x, t):
    """<phi^2(x, t)> summed over all mode pairs with a diagonal thermal density matrix."""
    k = lattice.wavevectors()
    om = np.linalg.norm(k, axis=1)
    c = 1.0 / np.sqrt(2 * om * lattice.volume)
    phase = np.exp(1j * (k @ x - om * t))
    occ = np.diag(1.0 / np.expm1(om / tau))  # <a_k^dag a_k'> = <a_k a_k'^dag> - vacuum
    u = c * phase
    total = u @ occ @ np.conj(u) + np.conj(u) @ occ @ u
    return total.real


def test_phi_squared_against_double_sum():
    lat = build_lattice(3, 5.0, 2)
    params = FieldParams(1.0)
    rng = np.random.default_rng(5)
    values = []
    for _ in range(5):
        x, t = rng.uniform(0, lat.L, 3), rng.uniform(0, 10)
        ref = phi_sq_double_sum(lat, 1.0, x, t)
        got = phi_squared_at(lat, params, x, t)
        assert got == pytest.approx(ref, rel=1e-13)
        values.append(ref)
    assert (max(values) - min(values)) / np.mean(values) <= 1e-12
    assert phi_squared_at(lat, params, 0.0, 0.0) == pytest.approx(scalar_observables(lat, params).phi_sq, rel=1e-14)


def test_phi_squared_uniformity():
    lat = build_lattice(3, 6.0, 8)
    params = FieldParams(1.0)
    assert phi_squared_uniformity(lat, params, [(0.0, 0.0), (lat.L / 3, 1.7)]) <= 1e-12
    assert phi_squared_uniformity(lat, params, [((1.0, 2.0, 3.0), 0.5)]) == 0.0
    with pytest.raises(DomainError):
        phi_squared_uniformity(lat, params, [])


@pytest.mark.parametrize("D, schedule", [(4, (4.0, 8.0, 16.0)), (3, (8.0, 16.0, 32.0))])
def test_continuum_convergence_scalar(D, schedule):
    devs = [dev for _, dev in continuum_convergence(D, "scalar", 1.0, schedule)]
    assert all(b < a for a, b in zip(devs, devs[1:]))
    assert devs[-1] < 1e-2


def test_continuum_convergence_photon_matches_scalar():
    schedule = (4.0, 8.0, 12.0)
    scalar = continuum_convergence(4, "scalar", 1.0, schedule)
    photon = continuum_convergence(4, "photon", 1.0, schedule)
    for (L1, a), (L2, b) in zip(scalar, photon):
        assert L1 == L2
        assert a == pytest.approx(b, rel=1e-10)


def test_continuum_convergence_validation():
    with pytest.raises(DomainError):
        continuum_convergence(4, "scalar", 1.0, (8.0, 4.0))
    with pytest.raises(BudgetExceededError):
        continuum_convergence(5, "scalar", 1.0, (16.0,))


def test_parallel_reduction_is_deterministic():
    lat = build_lattice(3, 6.0, 20)
    a = scalar_observables(lat, threads=1)
    b = scalar_observables(lat, threads=4)
    assert a.rho == b.rho and np.array_equal(a.p_diag, b.p_diag)
    assert maxwell_observables(lat, threads=1).rho == maxwell_observables(lat, threads=3).rho
