"""Exact uniform sampling of Omega_{k,l} by geometric rejection, plus Monte Carlo
statistics on the sampled matrices.

Fill a k x k matrix Y with independent geometric variables, P(Y_ij = a) = p q^a
with p = k/(l+k). Keep Y when its inner (k-1) x (k-1) block A completes to a
matrix with margins l and every outer entry of Y is at least the matching entry
of that completion. The completion of a kept Y is uniform on Omega_{k,l}, and

    P(keep) = H_k(l) * p^((k-1)^2) * q^(lk)

which :func:`exact_acceptance` evaluates for tests.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable

import numpy as np

from .enumeration import count_matrices, iter_matrices
from .errors import BadShape
from .matrix_core import IntersectionMatrix
from .stabilizer import order_KN

EXACT_LOG_LIMIT = 64
_MAX_BATCH = 1 << 18


@dataclass(frozen=True)
class GeometricConfig:
    k: int
    l: int

    def __post_init__(self):
        if self.k < 2:
            raise BadShape(f"sampler needs k >= 2, got {self.k}")
        if self.l < 0:
            raise BadShape(f"l must be non-negative, got {self.l}")

    @property
    def p(self) -> float:
        return self.k / (self.l + self.k)

    @property
    def q(self) -> float:
        return self.l / (self.l + self.k)

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        """Geometric variables on {0, 1, ...} with success probability p."""
        if self.l == 0:
            return np.zeros(size, dtype=np.int64)
        return rng.geometric(self.p, size=size).astype(np.int64) - 1


@dataclass
class SamplerReport:
    k: int
    l: int
    accepted: int
    proposed: int
    level: float = 0.95
    extra: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.accepted, self.proposed, self.level) if self.proposed else (0.0, 1.0)

    def to_json(self) -> dict:
        out = {"k": self.k, "l": self.l, "accepted": self.accepted, "proposed": self.proposed,
               "acceptance_rate": self.acceptance_rate, "ci": list(self.ci)}
        out.update(self.extra)
        return out


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + level / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def exact_acceptance(k: int, l: int) -> Fraction:
    """H_k(l) p^((k-1)^2) q^(lk) as an exact rational."""
    p = Fraction(k, l + k)
    return count_matrices(k, l) * p ** ((k - 1) ** 2) * (1 - p) ** (l * k)


# ---------------------------------------------------------------------------
# the proposal / acceptance step, vectorized over a batch of proposals

def _complete(inner: np.ndarray, l: int) -> np.ndarray:
    """Batch version of the margin completion phi_l: (m, k-1, k-1) -> (m, k, k)."""
    m, d, _ = inner.shape
    full = np.empty((m, d + 1, d + 1), dtype=np.int64)
    full[:, :d, :d] = inner
    full[:, :d, d] = l - inner.sum(axis=2)
    full[:, d, :d] = l - inner.sum(axis=1)
    full[:, d, d] = l - full[:, d, :d].sum(axis=1)
    return full


def _outer(full: np.ndarray) -> np.ndarray:
    d = full.shape[1] - 1
    return np.concatenate([full[:, :d, d], full[:, d, :]], axis=1)


def _propose(cfg: GeometricConfig, m: int, rng: np.random.Generator) -> np.ndarray:
    """Run m proposals; return the completions phi_l(A) of the accepted ones, in order.

    The inner entries are drawn for the whole batch first and the 2k-1 outer
    entries only for proposals whose inner block completes; all entries are
    independent, so this is the same law as drawing Y whole.
    """
    d = cfg.k - 1
    full = _complete(cfg.draw(rng, (m, d, d)), cfg.l)
    full = full[(_outer(full) >= 0).all(axis=1)]
    if len(full) == 0:
        return full
    y_outer = cfg.draw(rng, (len(full), 2 * d + 1))
    return full[(y_outer >= _outer(full)).all(axis=1)]


def accepts(Y, l: int) -> bool:
    """Acceptance test on one proposal Y (any k x k non-negative integer grid)."""
    Y = np.asarray(Y, dtype=np.int64)
    k = Y.shape[0]
    full = _complete(Y[None, : k - 1, : k - 1], l)
    outer = _outer(full)[0]
    return bool((outer >= 0).all() and (_outer(Y[None])[0] >= outer).all())


def in_region_direct(Y, l: int) -> bool:
    """Y in {N + B : N in Omega_{k,l}, B >= 0 with zero inner block}, by searching Omega."""
    Y = np.asarray(Y, dtype=np.int64)
    k = Y.shape[0]
    for N in iter_matrices(k, l):
        B = Y - np.array(N.entries)
        if (B >= 0).all() and not B[: k - 1, : k - 1].any():
            return True
    return False


def sample_batch(k: int, l: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """n independent uniform matrices as an (n, k, k) array, and the proposals used."""
    cfg = GeometricConfig(k, l)
    if l == 0:
        return np.zeros((n, k, k), dtype=np.int64), n
    chunks, got, proposed = [], 0, 0
    m = 256
    while got < n:
        acc = _propose(cfg, m, rng)
        proposed += m
        if len(acc):
            chunks.append(acc)
            got += len(acc)
        rate = max(got, 1) / proposed
        m = int(min(_MAX_BATCH, max(256, 1.2 * (n - got) / rate)))
    return np.concatenate(chunks)[:n], proposed


def sample_uniform(k: int, l: int, rng: np.random.Generator) -> IntersectionMatrix:
    if k < 2:
        raise BadShape(f"sampler needs k >= 2, got {k}")
    if l == 0:
        return IntersectionMatrix([[0] * k for _ in range(k)], l=0)
    cfg = GeometricConfig(k, l)
    while True:
        acc = _propose(cfg, 64, rng)
        if len(acc):
            return IntersectionMatrix(acc[0].tolist(), l=l)


def _spawn(rng: np.random.Generator, workers: int) -> list[np.random.Generator]:
    return [rng] if workers <= 1 else rng.spawn(workers)


def _split(n: int, parts: int) -> list[int]:
    base, extra = divmod(n, parts)
    return [base + (i < extra) for i in range(parts)]


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


# ---------------------------------------------------------------------------
# statistics

def _rate_job(k: int, l: int, trials: int, rng: np.random.Generator) -> int:
    cfg = GeometricConfig(k, l)
    hits = 0
    for m in _split(trials, max(1, -(-trials // _MAX_BATCH))):
        hits += len(_propose(cfg, m, rng))
    return hits


def acceptance_rate(k: int, l: int, trials: int, rng: np.random.Generator,
                    workers: int = 1, level: float = 0.95) -> SamplerReport:
    """Monte Carlo estimate of the acceptance probability with a Wilson interval."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    GeometricConfig(k, l)
    gens = _spawn(rng, workers)
    jobs = [(k, l, t, g) for t, g in zip(_split(trials, len(gens)), gens)]
    hits = sum(_map(_rate_job, jobs, workers))
    return SamplerReport(k, l, hits, trials, level)


def min_deviation(batch: np.ndarray, l: int) -> np.ndarray:
    """min_ij |X_ij - l/k| for each matrix of the batch."""
    k = batch.shape[1]
    return np.abs(batch * k - l).min(axis=(1, 2)) / k


def _dev_job(k, l, n, threshold, rng):
    batch, proposed = sample_batch(k, l, n, rng)
    return int((min_deviation(batch, l) <= threshold).sum()), proposed


def deviation_statistic(k: int, l: int, n_samples: int, f_exponent: float,
                        rng: np.random.Generator, workers: int = 1) -> SamplerReport:
    """Fraction of uniform samples with some entry within l^f_exponent of l/k.

    The fraction is in ``extra["fraction"]``.
    """
    if not 0 < f_exponent < 1:
        raise ValueError(f"f_exponent must lie in (0, 1), got {f_exponent}")
    threshold = l ** f_exponent
    gens = _spawn(rng, workers)
    jobs = [(k, l, n, threshold, g) for n, g in zip(_split(n_samples, len(gens)), gens)]
    res = _map(_dev_job, jobs, workers)
    hits = sum(h for h, _ in res)
    proposed = sum(p for _, p in res)
    return SamplerReport(k, l, n_samples, proposed, extra={
        "statistic": "deviation", "f_exponent": f_exponent, "threshold": threshold,
        "close_count": hits, "fraction": hits / n_samples})


def log_factorial_product(N, exact: bool | None = None) -> float:
    """log prod n_ij!; uses exact integers when every entry is <= 64."""
    flat = [int(x) for row in N for x in row]
    if exact is None:
        exact = max(flat) <= EXACT_LOG_LIMIT
    if exact:
        prod = 1
        for x in flat:
            prod *= math.factorial(x)
        return math.log(prod)
    return sum(math.lgamma(x + 1) for x in flat)


def aut_log_bound(k: int, l: int, eps: float) -> float:
    """log of l!^k / l^((k-1)^2 - eps)."""
    return k * math.lgamma(l + 1) - ((k - 1) ** 2 - eps) * math.log(l)


def _sym_job(k, l, n, eps, rng):
    batch, proposed = sample_batch(k, l, n, rng)
    bound = aut_log_bound(k, l, eps) if l > 1 else math.inf
    exact = l <= EXACT_LOG_LIMIT
    orders: dict[int, int] = {}
    trivial = violations = 0
    log_sum = 0.0
    for X in batch:
        rows = X.tolist()
        kn = order_KN(IntersectionMatrix(rows, l=l))
        orders[kn] = orders.get(kn, 0) + 1
        trivial += kn == 1
        lf = log_factorial_product(rows, exact)
        log_sum += lf
        violations += math.log(kn) + lf > bound
    return trivial, log_sum, violations, orders, proposed


def symmetry_statistics(k: int, l: int, n_samples: int, rng: np.random.Generator,
                        eps: float = 0.5, workers: int = 1) -> SamplerReport:
    """|K_N| statistics over uniform samples.

    ``extra`` holds trivial_KN_fraction, mean_log_factorial_product (mean of
    log prod n_ij!), the fraction of samples with |Aut| above
    l!^k / l^((k-1)^2 - eps), and the observed distribution of |K_N|.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    gens = _spawn(rng, workers)
    jobs = [(k, l, n, eps, g) for n, g in zip(_split(n_samples, len(gens)), gens) if n]
    res = _map(_sym_job, jobs, workers)
    orders: dict[int, int] = {}
    for r in res:
        for key, c in r[3].items():
            orders[key] = orders.get(key, 0) + c
    trivial = sum(r[0] for r in res)
    return SamplerReport(k, l, n_samples, sum(r[4] for r in res), extra={
        "statistic": "symmetry",
        "trivial_KN_fraction": trivial / n_samples,
        "mean_log_factorial_product": sum(r[1] for r in res) / n_samples,
        "eps": eps,
        "bound_violation_fraction": sum(r[2] for r in res) / n_samples,
        "KN_orders": {str(key): orders[key] for key in sorted(orders)},
    })


def empirical_counts(batch: np.ndarray) -> dict[tuple, int]:
    out: dict[tuple, int] = {}
    for X in batch:
        key = tuple(X.ravel().tolist())
        out[key] = out.get(key, 0) + 1
    return out


def iter_samples(k: int, l: int, n: int, rng: np.random.Generator) -> Iterable[IntersectionMatrix]:
    batch, _ = sample_batch(k, l, n, rng)
    for X in batch:
        yield IntersectionMatrix(X.tolist(), l=l)
