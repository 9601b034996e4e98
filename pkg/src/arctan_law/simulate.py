"""Path-level Monte Carlo for the exceedance time after a running maximum.

Each path is a Gaussian random walk on a grid of width ``dt``. Inside every
cell the continuous-time maximum is drawn exactly from the Brownian-bridge
maximum law given the two endpoints ``a`` and ``b``:

.. math::
   m = \\tfrac12\\left(a + b + \\sqrt{(b - a)^2 + 2\\,dt\\,E}\\right),
   \\qquad E \\sim \\mathrm{Exp}(1),

which is the usual ``-2 dt log U`` form with ``E = -log U``. After the
horizon the first cell whose bridge maximum exceeds the recorded maximum
holds the exceedance; the time inside that cell is either drawn exactly
(``localization="exact"``, the default) or set to the cell midpoint.

For a bridge from ``a`` to ``b`` over width ``dt`` that reaches ``M``, write
``alpha = M - a`` and ``beta = M - b``. The first hitting time ``tau``
satisfies ``tau / (dt - tau) ~ IG(alpha / |beta|, alpha**2 / dt)`` (inverse
Gaussian), so the exact draw costs one extra normal and one uniform.

Paths are generated in chunks of ``chunk_size``; chunk ``k`` always uses the
stream ``(seed, stream, k)``, so outcomes do not depend on ``workers``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .analytic import DomainError, IntervalParams, LawParams, arctan_quantile
from .streams import make_rng

__all__ = [
    "CENSORED",
    "GaussianStart",
    "PathConfig",
    "PathOutcome",
    "IntervalOutcome",
    "PathOutcomes",
    "simulate_exceedance",
    "simulate_interval_exceedance",
    "simulate_maxima",
    "levy_identity_samples",
    "sample_exceedance_exact",
    "bridge_hitting_time",
    "inverse_gaussian",
]

CENSORED = math.inf
_BLOCK = 128
_LOCALIZATIONS = ("exact", "midpoint")


@dataclass(frozen=True)
class GaussianStart:
    """Random starting value ``B_0 ~ N(mean, std**2)``."""

    mean: float = 0.0
    std: float = 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.mean + self.std * rng.standard_normal(size)


StartValue = Union[float, GaussianStart]


@dataclass(frozen=True)
class PathConfig:
    """Monte Carlo settings.

    ``b0`` is a constant or any object with ``sample(rng, size)``.
    ``horizon_multiple`` censors ``S`` at ``horizon_multiple * r``.
    """

    r: float = 1.0
    steps_per_unit_time: int = 1000
    horizon_multiple: float = 10.0
    b0: StartValue = 0.0
    seed: int = 0
    workers: int = 1
    localization: str = "exact"
    chunk_size: int = 8192

    def __post_init__(self):
        LawParams(self.r)
        if int(self.steps_per_unit_time) != self.steps_per_unit_time or self.steps_per_unit_time < 1:
            raise DomainError("steps_per_unit_time must be a positive integer")
        if not (math.isfinite(self.horizon_multiple) and self.horizon_multiple >= 1):
            raise DomainError("horizon_multiple must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be >= 1")
        if self.localization not in _LOCALIZATIONS:
            raise DomainError(f"localization must be one of {_LOCALIZATIONS}")
        if not hasattr(self.b0, "sample") and not math.isfinite(float(self.b0)):
            raise DomainError("b0 must be finite")


@dataclass(frozen=True)
class PathOutcome:
    m_r: float
    b_r: float
    gap: float
    s: float
    argmax_bucket: int

    @property
    def censored(self) -> bool:
        return self.s == CENSORED


# Same record for the windowed maximum: m_r is M over [r1, r2], b_r is B at r2.
IntervalOutcome = PathOutcome


@dataclass
class PathOutcomes:
    """Columnar batch of outcomes, ordered by (chunk, path within chunk).

    ``s`` holds :data:`CENSORED` (``inf``) for paths that did not exceed the
    maximum before the horizon.
    """

    r1: float
    r2: float
    horizon: float
    b0: np.ndarray
    b_start: np.ndarray
    m_r: np.ndarray
    b_r: np.ndarray
    s: np.ndarray
    argmax_bucket: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.m_r)

    def __getitem__(self, i) -> PathOutcome:
        return PathOutcome(
            float(self.m_r[i]),
            float(self.b_r[i]),
            float(self.m_r[i] - self.b_r[i]),
            float(self.s[i]),
            int(self.argmax_bucket[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def gap(self) -> np.ndarray:
        return self.m_r - self.b_r

    @property
    def censored(self) -> np.ndarray:
        return np.isinf(self.s)

    @property
    def uncensored_times(self) -> np.ndarray:
        return self.s[~self.censored]

    def to_list(self) -> list[PathOutcome]:
        return list(self)


def inverse_gaussian(rng: np.random.Generator, mean, shape) -> np.ndarray:
    """Michael-Schucany-Haas draws, with the small root in cancellation-free form.

    ``mean`` may be ``inf``; the draw then follows the Levy limit ``shape / Z**2``.
    """
    mean = np.asarray(mean, dtype=float)
    shape = np.asarray(shape, dtype=float)
    size = np.broadcast(mean, shape).shape
    y = rng.standard_normal(size) ** 2
    u = rng.random(size)
    inf = np.isinf(mean)
    finite_mean = np.where(inf, 1.0, mean)
    w = finite_mean * y / (2.0 * shape)
    small = finite_mean / (1.0 + w + np.sqrt(w * (2.0 + w)))
    small = np.where(inf, shape / y, small)
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = u * (finite_mean + small) <= finite_mean
        big = finite_mean * finite_mean / small
    return np.where(inf | keep, small, big)


def bridge_hitting_time(rng: np.random.Generator, alpha, beta, dt: float) -> np.ndarray:
    """First time a bridge from ``M - alpha`` to ``M - beta`` over ``dt`` hits ``M``.

    Conditional on the hit (``alpha > 0``; ``beta`` of either sign).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.abs(np.asarray(beta, dtype=float))
    with np.errstate(divide="ignore"):
        mean = alpha / beta
    ratio = inverse_gaussian(rng, mean, alpha * alpha / dt)
    return dt * ratio / (1.0 + ratio)


def _cells(length: float, spu: int) -> tuple[int, float]:
    n = max(1, int(round(length * spu)))
    return n, length / n


def _start_values(b0, rng, n):
    if hasattr(b0, "sample"):
        return np.asarray(b0.sample(rng, n), dtype=float)
    return np.full(n, float(b0))


def _maximum_phase(rng, start, n_cells, dt):
    """Walk ``n_cells`` cells from ``start``; return (max, end, argmax cell)."""
    n = start.size
    pos = start.copy()
    best = np.full(n, -np.inf)
    arg = np.zeros(n, dtype=np.int64)
    sd = math.sqrt(dt)
    k0 = 0
    while k0 < n_cells:
        width = min(_BLOCK, n_cells - k0)
        z = rng.standard_normal((n, width))
        e = rng.standard_exponential((n, width))
        walk = np.cumsum(z, axis=1)
        walk *= sd
        walk += pos[:, None]
        prev = np.empty_like(walk)
        prev[:, 0] = pos
        prev[:, 1:] = walk[:, :-1]
        d = walk - prev
        cell_max = 0.5 * (prev + walk + np.sqrt(d * d + 2.0 * dt * e))
        block_arg = cell_max.argmax(axis=1)
        block_max = cell_max[np.arange(n), block_arg]
        better = block_max > best
        best = np.where(better, block_max, best)
        arg = np.where(better, k0 + block_arg, arg)
        pos = walk[:, -1].copy()
        k0 += width
    return best, pos, arg


def _exceedance_phase(rng, start, level, n_cells, dt, localization):
    """Time after the horizon until the bridge maximum first exceeds ``level``.

    A cell crosses iff its bridge maximum exceeds ``level``; with
    ``alpha = level - a`` and ``beta = level - b`` that is ``dt * E > 2 alpha beta``,
    the same event as ``m > level`` without the square root.
    """
    n = start.size
    s = np.full(n, CENSORED)
    active = np.arange(n)
    pos = start.copy()
    lev = level.copy()
    sd = math.sqrt(dt)
    k0 = 0
    while k0 < n_cells and active.size:
        width = min(_BLOCK, n_cells - k0)
        m = active.size
        z = rng.standard_normal((m, width))
        e = rng.standard_exponential((m, width))
        walk = np.cumsum(z, axis=1)
        walk *= sd
        walk += pos[:, None]
        prev = np.empty_like(walk)
        prev[:, 0] = pos
        prev[:, 1:] = walk[:, :-1]
        alpha = lev[:, None] - prev
        beta = lev[:, None] - walk
        hit = (beta < 0) | (dt * e > 2.0 * alpha * beta)
        crossed = hit.any(axis=1)
        first = hit.argmax(axis=1)
        rows = np.nonzero(crossed)[0]
        if rows.size:
            cols = first[rows]
            if localization == "exact":
                tau = bridge_hitting_time(rng, alpha[rows, cols], beta[rows, cols], dt)
            else:
                tau = np.full(rows.size, 0.5 * dt)
            s[active[rows]] = (k0 + cols) * dt + tau
        keep = ~crossed
        active = active[keep]
        pos = walk[keep, -1].copy()
        lev = lev[keep]
        k0 += width
    return s


def _run_chunk(task):
    (seed, stream, index, n, r1, r2, spu, horizon, b0, localization, full) = task
    rng = make_rng(seed, stream, index)
    b0_vals = _start_values(b0, rng, n)
    if r1 > 0:
        b_start = b0_vals + math.sqrt(r1) * rng.standard_normal(n)
    else:
        b_start = b0_vals.copy()
    n_pre, dt_pre = _cells(r2 - r1, spu)
    m, b_end, arg = _maximum_phase(rng, b_start, n_pre, dt_pre)
    if full:
        n_post, dt_post = _cells(horizon, spu)
        s = _exceedance_phase(rng, b_end, m, n_post, dt_post, localization)
    else:
        s = np.full(n, CENSORED)
    return b0_vals, b_start, m, b_end, s, arg


def _simulate(config: PathConfig, r1: float, r2: float, n_paths: int, stream: int, full: bool):
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    window = IntervalParams(r1, r2)
    horizon = config.horizon_multiple * window.length
    sizes = [config.chunk_size] * (n_paths // config.chunk_size)
    if n_paths % config.chunk_size:
        sizes.append(n_paths % config.chunk_size)
    tasks = [
        (config.seed, stream, k, size, window.r1, window.r2, int(config.steps_per_unit_time),
         horizon, config.b0, config.localization, full)
        for k, size in enumerate(sizes)
    ]
    workers = min(config.workers, len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    cols = [np.concatenate(c) for c in zip(*parts)]
    return PathOutcomes(
        window.r1, window.r2, horizon, *cols,
        meta={"stream": stream, "chunks": len(tasks)},
    )


def simulate_exceedance(config: PathConfig, n_paths: int, *, stream: int = 0) -> PathOutcomes:
    """Simulate ``n_paths`` paths of the exceedance time after ``config.r``.

    Independent samples under one root seed need distinct ``stream`` values.
    """
    return _simulate(config, 0.0, config.r, n_paths, stream, full=True)


def simulate_interval_exceedance(
    r1: float, r2: float, config: PathConfig, n_paths: int, *, stream: int = 0
) -> PathOutcomes:
    """As :func:`simulate_exceedance` with the maximum taken over ``[r1, r2]``.

    ``config.r`` is ignored; the horizon is ``horizon_multiple * (r2 - r1)``.
    The value at ``r1`` is drawn in one Gaussian step since nothing before
    ``r1`` enters the maximum.
    """
    return _simulate(config, r1, r2, n_paths, stream, full=True)


def simulate_maxima(config: PathConfig, n_paths: int, *, stream: int = 0) -> PathOutcomes:
    """Only the ``[0, r]`` phase: ``M_r``, ``B_r`` and argmax, no exceedance."""
    return _simulate(config, 0.0, config.r, n_paths, stream, full=False)


def levy_identity_samples(config: PathConfig, n_paths: int, *, stream: int = 0):
    """``(M_r - B_r, |B_r - B_0|)`` drawn from two independent path sets.

    The identity holds in law only, so the two samples must not share paths.
    """
    gaps = simulate_maxima(config, n_paths, stream=2 * stream + 1)
    ends = simulate_maxima(config, n_paths, stream=2 * stream + 2)
    return gaps.gap, np.abs(ends.b_r - ends.b0)


def sample_exceedance_exact(params: Union[LawParams, float], rng: np.random.Generator, size: Optional[int] = None):
    """Inverse-CDF draws from the arctangent law."""
    return arctan_quantile(rng.random(size), params)

