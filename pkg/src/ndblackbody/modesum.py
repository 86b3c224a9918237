"""Thermal expectation values of free fields as finite-volume mode sums.

The field lives in a periodic box of edge ``L`` in ``d`` space dimensions.
Wavevectors are ``k = 2 pi n / L`` for integer vectors ``n`` with
``max_i |n_i| <= n_max``; the zero mode is always excluded. Vacuum
contributions are dropped, so each mode contributes with its Bose-Einstein
occupation only.

Per mode, with ``w = n_k / (omega_k V)``:

* scalar field: ``<phi_dot^2> += omega^2 w``, ``<(grad phi)^2> += k^2 w``,
  ``<phi^2> += w``, ``<L> += (omega^2 - k^2 - m^2) w / 2``;
* Maxwell field in Coulomb gauge: the polarization sum is replaced by the
  transverse projector ``P_ij = delta_ij - k_i k_j / k^2``.

Sums run chunk by chunk in lexicographic order of ``n``; partial sums are
combined with :func:`math.fsum`, which makes the result independent of how
chunks are scheduled.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from ._parallel import ordered_map
from .closedform import as_dim, energy_density, multiplicity, Species
from .errors import BudgetExceededError, DomainError

__all__ = [
    "DEFAULT_MODE_BUDGET",
    "CUTOFF_RATIO",
    "ModeLattice",
    "FieldParams",
    "ScalarObservables",
    "MaxwellObservables",
    "build_lattice",
    "auto_n_max",
    "occupation",
    "scalar_observables",
    "maxwell_observables",
    "off_diagonal_check",
    "phi_squared_at",
    "phi_squared_uniformity",
    "continuum_convergence",
]

DEFAULT_MODE_BUDGET = 10**8
# smallest discarded mode must have omega / tau >= CUTOFF_RATIO
CUTOFF_RATIO = 40.0
_CHUNK_TARGET = 1 << 18


@dataclass(frozen=True)
class ModeLattice:
    d: int
    L: float
    n_max: int

    @property
    def exclude_zero_mode(self):
        return True

    @property
    def n_modes(self):
        return (2 * self.n_max + 1) ** self.d - 1

    @property
    def volume(self):
        return self.L ** self.d

    @property
    def k_unit(self):
        return 2.0 * math.pi / self.L

    @property
    def k_cutoff(self):
        return self.k_unit * self.n_max

    def cutoff_adequate(self, tau):
        return self.k_cutoff / tau >= CUTOFF_RATIO

    def chunks(self):
        """Blocks of integer mode vectors, shape (m, d), in lexicographic order."""
        side = 2 * self.n_max + 1
        lead = 0
        while lead < self.d - 1 and side ** (self.d - lead) > _CHUNK_TARGET:
            lead += 1
        rng = np.arange(-self.n_max, self.n_max + 1)
        trail = self.d - lead
        grid = np.stack(np.meshgrid(*([rng] * trail), indexing="ij"), axis=-1).reshape(-1, trail)
        for head in itertools.product(rng, repeat=lead):
            block = np.empty((grid.shape[0], self.d), dtype=np.int64)
            block[:, :lead] = head
            block[:, lead:] = grid
            if not any(head):
                block = block[np.any(block != 0, axis=1)]
            yield block

    def wavevectors(self):
        """All wavevectors at once, shape (n_modes, d). Meant for small lattices."""
        return self.k_unit * np.concatenate(list(self.chunks()))


def build_lattice(d, L, n_max, budget=DEFAULT_MODE_BUDGET):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"spatial dimension must be an integer >= 1, got {d!r}")
    L = float(L)
    if not (math.isfinite(L) and L > 0):
        raise DomainError(f"box edge must be positive, got {L!r}")
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    lattice = ModeLattice(int(d), L, int(n_max))
    if lattice.n_modes > budget:
        raise BudgetExceededError(
            f"lattice d={d}, n_max={n_max} has {lattice.n_modes} modes, budget is {budget}"
        )
    return lattice


def auto_n_max(L, tau, ratio=CUTOFF_RATIO):
    """Smallest ``n_max`` with ``2 pi n_max / L >= ratio * tau``."""
    if not (math.isfinite(L) and L > 0 and math.isfinite(tau) and tau > 0):
        raise DomainError(f"need L > 0 and tau > 0, got L={L!r}, tau={tau!r}")
    n = math.ceil(ratio * tau * L / (2.0 * math.pi))
    # guard against ceil landing one short through rounding
    while 2.0 * math.pi * n / L / tau < ratio:
        n += 1
    return max(n, 1)


@dataclass(frozen=True)
class FieldParams:
    tau: float = 1.0
    mass: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be positive and finite, got {self.tau!r}")
        if not (math.isfinite(self.mass) and self.mass >= 0):
            raise DomainError(f"mass must be >= 0, got {self.mass!r}")


def occupation(omega, tau):
    """Bose-Einstein occupation ``1 / (exp(omega / tau) - 1)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("occupation requires omega > 0 (exclude the zero mode)")
    x = omega / tau
    # e^-x / (1 - e^-x): no overflow for large x, no cancellation for small x
    out = np.exp(-x) / -np.expm1(-x)
    return float(out) if out.ndim == 0 else out


def _mode_arrays(block, lattice, params):
    k = lattice.k_unit * block
    k2 = np.einsum("ij,ij->i", k, k)
    omega = np.sqrt(k2 + params.mass ** 2)
    w = occupation(omega, params.tau) / (omega * lattice.volume)
    return k, k2, omega, w


def _column_sums(a):
    # contiguous rows so numpy uses pairwise summation
    return np.ascontiguousarray(a.T).sum(axis=1)


def _reduce(parts):
    """fsum each named partial across chunks."""
    keys = parts[0].keys()
    out = {}
    for key in keys:
        first = parts[0][key]
        if np.ndim(first):
            out[key] = np.array([math.fsum(p[key][i] for p in parts) for i in range(len(first))])
        else:
            out[key] = math.fsum(p[key] for p in parts)
    return out


def _cutoff_warnings(lattice, params):
    if lattice.cutoff_adequate(params.tau):
        return ()
    return (
        f"cutoff k_max/tau = {lattice.k_cutoff / params.tau:.3g} < {CUTOFF_RATIO:g}; "
        "mode sum is truncated",
    )


@dataclass(frozen=True)
class ScalarObservables:
    rho: float
    p_diag: np.ndarray
    trace: float
    phi_dot_sq: float
    grad_phi_sq: float
    phi_sq: float
    lagrangian_avg: float
    warnings: tuple = field(default=())

    @property
    def pressure(self):
        return float(np.mean(self.p_diag))

    def as_dict(self):
        return {
            "rho": self.rho,
            "p_diag": [float(x) for x in self.p_diag],
            "pressure": self.pressure,
            "trace": self.trace,
            "phi_dot_sq": self.phi_dot_sq,
            "grad_phi_sq": self.grad_phi_sq,
            "phi_sq": self.phi_sq,
            "lagrangian_avg": self.lagrangian_avg,
        }


def _scalar_chunk(block, lattice, params):
    k, k2, omega, w = _mode_arrays(block, lattice, params)
    lag_w = 0.5 * (omega * omega - k2 - params.mass ** 2) * w
    return {
        "phi_dot_sq": float(np.sum(omega * omega * w)),
        "grad_phi_sq": float(np.sum(k2 * w)),
        "phi_sq": float(np.sum(w)),
        "lagrangian": float(np.sum(lag_w)),
        "grad_m": _column_sums(k * k * w[:, None]),
    }


def scalar_observables(lattice, params=FieldParams(), threads=None):
    """Thermal <T_mu nu> pieces of a free real scalar field on ``lattice``.

    The spatial stress is ``<T_mn> = <d_m phi d_n phi> - delta_mn <L>``, giving
    ``p_diag[m] = <(d_m phi)^2> + <L>`` per axis with the metric diag(+, -, ..., -).
    ``trace = rho - sum(p_diag)`` equals ``(2 - D) <L> + m^2 <phi^2>``.
    """
    parts = ordered_map(lambda b: _scalar_chunk(b, lattice, params), lattice.chunks(), threads)
    s = _reduce(parts)
    m2 = params.mass ** 2
    rho = 0.5 * s["phi_dot_sq"] + 0.5 * s["grad_phi_sq"] + 0.5 * m2 * s["phi_sq"]
    lag = s["lagrangian"]
    p_diag = s["grad_m"] + lag
    trace = rho - math.fsum(p_diag)
    return ScalarObservables(
        rho=rho,
        p_diag=p_diag,
        trace=trace,
        phi_dot_sq=s["phi_dot_sq"],
        grad_phi_sq=s["grad_phi_sq"],
        phi_sq=s["phi_sq"],
        lagrangian_avg=lag,
        warnings=_cutoff_warnings(lattice, params),
    )


@dataclass(frozen=True)
class MaxwellObservables:
    E_sq: float
    F_sq: float
    rho: float
    p_diag: np.ndarray
    trace: float
    warnings: tuple = field(default=())

    @property
    def pressure(self):
        return float(np.mean(self.p_diag))

    def as_dict(self):
        return {
            "E_sq": self.E_sq,
            "F_sq": self.F_sq,
            "rho": self.rho,
            "p_diag": [float(x) for x in self.p_diag],
            "pressure": self.pressure,
            "trace": self.trace,
        }


def _maxwell_chunk(block, lattice, params):
    k, k2, omega, w = _mode_arrays(block, lattice, params)
    kk = k * k
    p_mm = 1.0 - kk / k2[:, None]  # diagonal of the transverse projector
    tr_p = p_mm.sum(axis=1)  # = d - 1 polarizations
    k_p_k = k2 - k2 * k2 / k2  # k_i P_ij k_j, zero by transversality
    p_k = k - k * (k2 / k2)[:, None]  # (P k)_m
    w_om = omega * omega * w
    # <E_i E_i>, <F_ij F_ij>
    e_sq = tr_p * w_om
    f_sq = 2.0 * (k2 * tr_p - k_p_k) * w
    # T_mm = -E_m^2 + F_mk F_mk - (F^2 - 2 E^2) / 4
    e_mm = p_mm * w_om[:, None]
    f_mm = (kk * tr_p[:, None] - 2.0 * k * p_k + k2[:, None] * p_mm) * w[:, None]
    iso = -0.25 * (f_sq - 2.0 * e_sq)
    t_mm = -e_mm + f_mm + iso[:, None]
    return {
        "E_sq": float(np.sum(e_sq)),
        "F_sq": float(np.sum(f_sq)),
        "t_mm": _column_sums(t_mm),
    }


def maxwell_observables(lattice, params=FieldParams(), threads=None):
    """Thermal averages of the free Maxwell field in D = d + 1 dimensions.

    Each of the ``D - 2`` transverse polarizations contributes like one scalar
    mode; the sum over polarizations is carried out through the projector
    ``delta_ij - k_i k_j / k^2``. ``rho = E_sq / 2 + F_sq / 4`` where ``F_sq``
    is the full contraction ``F_ij F_ij`` over ordered pairs.
    """
    if lattice.d < 2:
        raise DomainError(f"Maxwell field needs D >= 3, got D = {lattice.d + 1}")
    if params.mass != 0:
        raise DomainError("Maxwell observables are defined for the massless field only")
    parts = ordered_map(lambda b: _maxwell_chunk(b, lattice, params), lattice.chunks(), threads)
    s = _reduce(parts)
    rho = 0.5 * s["E_sq"] + 0.25 * s["F_sq"]
    p_diag = s["t_mm"]
    return MaxwellObservables(
        E_sq=s["E_sq"],
        F_sq=s["F_sq"],
        rho=rho,
        p_diag=p_diag,
        trace=rho - math.fsum(p_diag),
        warnings=_cutoff_warnings(lattice, params),
    )


def off_diagonal_check(lattice, params=FieldParams()):
    """Largest off-diagonal ``|<d_m phi d_n phi>|`` over ``m != n``.

    Summed exactly with :func:`math.fsum`; reflecting one axis of the cubic
    mode region maps each term to its exact negative, so the result is 0.
    """
    d = lattice.d
    if d < 2:
        return 0.0
    pairs = list(itertools.combinations(range(d), 2))
    terms = {pair: [] for pair in pairs}
    for block in lattice.chunks():
        k, _, _, w = _mode_arrays(block, lattice, params)
        for m, n in pairs:
            terms[(m, n)].append(k[:, m] * k[:, n] * w)
    return max(abs(math.fsum(itertools.chain.from_iterable(terms[pair]))) for pair in pairs)


def _as_probe(point, d):
    x, t = point
    x = np.broadcast_to(np.asarray(x, dtype=float), (d,))
    return x, float(t)


def phi_squared_at(lattice, params, x, t):
    """<phi(x, t)^2> with every mode's phase kept explicitly.

    In the thermal state only ``<a_k^dag a_k> = <a_k a_k^dag> = n_k`` survive
    (vacuum part dropped); each enters with phases ``e^{i theta} e^{-i theta}``,
    ``theta = k.x - omega t``.
    """
    x, t = _as_probe((x, t), lattice.d)
    partial = []
    for block in lattice.chunks():
        k, _, omega, w = _mode_arrays(block, lattice, FieldParams(params.tau, params.mass))
        phase = np.exp(1j * (k @ x - omega * t))
        coeff = 0.5 * w  # n_k / (2 omega V)
        term = coeff * (phase * np.conj(phase) + np.conj(phase) * phase)
        partial.append(math.fsum(term.real))
    return math.fsum(partial)


def phi_squared_uniformity(lattice, params, probe_points):
    """Relative spread ``(max - min) / mean`` of <phi^2> over the probe points."""
    probes = list(probe_points)
    if not probes:
        raise DomainError("need at least one probe point")
    values = np.array([phi_squared_at(lattice, params, x, t) for x, t in probes])
    if len(values) == 1:
        return 0.0
    return float((values.max() - values.min()) / values.mean())


def continuum_convergence(dim, species="scalar", tau=1.0, L_schedule=(4.0, 8.0, 16.0),
                          budget=DEFAULT_MODE_BUDGET, threads=None):
    """Relative deviation of the mode-sum energy density from the continuum value.

    ``n_max`` follows the cutoff rule for each ``L``. Photon densities come
    from the Maxwell field; other species scale the scalar sum by their
    multiplicity.
    """
    dim = as_dim(dim)
    species = species if isinstance(species, Species) else Species.parse(species)
    g = multiplicity(species, dim)
    exact = energy_density(dim, species, tau)
    params = FieldParams(tau=tau)
    schedule = [float(L) for L in L_schedule]
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("L_schedule must be strictly increasing")
    out = []
    for L in schedule:
        lattice = build_lattice(dim.d, L, auto_n_max(L, tau), budget=budget)
        if species.kind == "photon":
            rho = maxwell_observables(lattice, params, threads).rho
        else:
            rho = g * scalar_observables(lattice, params, threads).rho
        out.append((L, abs(rho - exact) / exact))
    return out
