"""Monte Carlo estimate of the kinetic pressure factor <cos^2 theta>.

Directions are sampled uniformly on the unit sphere in ``d`` dimensions by
normalizing ``d`` independent standard normal deviates. The random stream is
numpy's Philox-4x64 counter-based generator; standard normals come from
numpy's ziggurat sampler (``Generator.standard_normal``), which numpy keeps
stable across platforms. A run of ``n`` samples is cut into fixed chunks of
``CHUNK_SIZE``; chunk ``i`` draws from ``Philox(SeedSequence(seed,
spawn_key=(i,)))``. Chunk statistics are merged in chunk order, so the
estimate depends only on ``(d, n, seed)`` and not on the thread count.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError

__all__ = [
    "CHUNK_SIZE",
    "McEstimate",
    "make_rng",
    "sample_direction",
    "sample_directions",
    "mc_cos2_average",
    "kinetic_pressure",
]

CHUNK_SIZE = 1 << 16
MIN_SAMPLES = 100


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def as_dict(self):
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def make_rng(seed, chunk=None):
    """Philox generator for ``seed``, optionally for one chunk of a run."""
    seed = _check_seed(seed)
    spawn_key = () if chunk is None else (int(chunk),)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def _check_d(d):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"spatial dimension must be an integer >= 1, got {d!r}")
    return int(d)


def sample_directions(d, size, rng):
    """``size`` independent uniform unit vectors in ``d`` dimensions, shape (size, d)."""
    d = _check_d(d)
    v = rng.standard_normal((size, d))
    norm = np.sqrt(np.einsum("ij,ij->i", v, v))
    return v / norm[:, None]


def sample_direction(d, rng):
    """One uniform unit vector in ``d`` dimensions (``±1`` when ``d == 1``)."""
    return sample_directions(d, 1, rng)[0]


def _chunk_stats(d, seed, chunk, size):
    rng = make_rng(seed, chunk)
    cos2 = sample_directions(d, size, rng)[:, 0] ** 2
    mean = cos2.mean()
    m2 = float(np.sum((cos2 - mean) ** 2))
    return size, float(mean), m2


def mc_cos2_average(d, n=1_000_000, seed=0, threads=None):
    """Estimate <cos^2 theta> over the unit sphere, theta measured from the first axis.

    Returns mean, standard error (sample standard deviation over sqrt(n)),
    sample count and seed. The exact value is ``1/d``.
    """
    d = _check_d(d)
    seed = _check_seed(seed)
    if isinstance(n, bool) or int(n) != n or n < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n!r}")
    n = int(n)
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    parts = ordered_map(lambda item: _chunk_stats(d, seed, item[0], item[1]), enumerate(sizes), threads)

    # pairwise-update merge (Chan et al.) in fixed chunk order
    count, mean, m2 = parts[0]
    for nb, mean_b, m2_b in parts[1:]:
        total = count + nb
        delta = mean_b - mean
        mean += delta * nb / total
        m2 += m2_b + delta * delta * count * nb / total
        count = total
    std = math.sqrt(m2 / (count - 1))
    return McEstimate(mean=mean, std_error=std / math.sqrt(count), n_samples=count, seed=seed)


def kinetic_pressure(rho, d, cos2):
    """Pressure of an isotropic gas of massless quanta: ``rho * <cos^2 theta>``."""
    _check_d(d)
    if rho < 0:
        raise DomainError(f"energy density must be >= 0, got {rho!r}")
    if not 0.0 <= cos2 <= 1.0:
        raise DomainError(f"cos^2 average must lie in [0, 1], got {cos2!r}")
    return rho * cos2
