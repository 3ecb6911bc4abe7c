"""Local randomizers and the mean-estimation utility experiment.

Two mechanisms are provided: k-ary randomized response for categorical
values, and a spherical-cap randomizer for unit vectors (sample from the
cap around the input with a budget-determined probability, else from its
complement, then rescale so the output is unbiased). Both satisfy a pure
local budget epsilon0 by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .walks import DUMMY, WalkTrace, sample_single_reports

__all__ = [
    "UnitVector",
    "RandomizerConfig",
    "randomized_response",
    "randomized_response_batch",
    "rr_probabilities",
    "privunit_params",
    "privunit_randomize",
    "randomize_unit_rows",
    "mean_estimation_experiment",
]

UNIT_NORM_TOL = 1e-9


@dataclass(frozen=True)
class UnitVector:
    """A vector on the unit sphere (L2 norm 1 within 1e-9)."""

    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=np.float64)
        object.__setattr__(self, "components", comps)
        norm = float(np.linalg.norm(comps))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"vector norm is {norm!r}, not 1")

    @property
    def dimension(self) -> int:
        return self.components.shape[0]

    @classmethod
    def normalized(cls, values) -> "UnitVector":
        values = np.asarray(values, dtype=np.float64)
        return cls(components=values / np.linalg.norm(values))


@dataclass(frozen=True)
class RandomizerConfig:
    """Which local mechanism to run and with what parameters.

    ``mechanism`` is "k-rr" (requires ``k``) or "unit-vector".
    """

    epsilon0: float
    mechanism: str = "k-rr"
    k: int | None = None

    def __post_init__(self):
        if self.mechanism not in ("k-rr", "unit-vector"):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if self.mechanism == "k-rr" and (self.k is None or self.k < 2):
            raise ValueError("k-rr requires k >= 2")

    def randomize(self, value, rng: np.random.Generator):
        if self.mechanism == "k-rr":
            return randomized_response(value, self.k, self.epsilon0, rng)
        return privunit_randomize(value, self.epsilon0, rng)


def rr_probabilities(k: int, epsilon0: float) -> tuple[float, float]:
    """(probability of keeping the true category, probability of each other)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    e = math.exp(epsilon0)
    keep = e / (e + k - 1)
    return keep, (1.0 - keep) / (k - 1)


def randomized_response(value: int, k: int, epsilon0: float, rng=None) -> int:
    """k-ary randomized response over categories 0..k-1."""
    return int(randomized_response_batch(np.array([value]), k, epsilon0, rng)[0])


def randomized_response_batch(values, k: int, epsilon0: float, rng=None) -> np.ndarray:
    """Vectorized k-ary randomized response (one draw per input value)."""
    values = np.asarray(values, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() >= k):
        raise ValueError("values must lie in [0, k)")
    rng = np.random.default_rng(rng)
    keep, _ = rr_probabilities(k, epsilon0)
    keep_mask = rng.random(values.shape) < keep
    others = rng.integers(0, k - 1, size=values.shape)
    others = np.where(others < values, others, others + 1)
    return np.where(keep_mask, values, others)


def _cap_mass(d: int, gamma: float) -> float:
    """Mass of {v : <v, x> >= gamma} under the uniform sphere measure."""
    a = (d - 1) / 2.0
    return float(special.betainc(a, a, (1.0 - gamma) / 2.0))


def _mean_factor(d: int, gamma: float, epsilon0: float) -> float:
    """E[<output direction, x>] before rescaling, at the exact-budget p."""
    a = (d - 1) / 2.0
    q = _cap_mass(d, gamma)
    log_c = 0.5 * math.log(math.pi) + special.gammaln(a) - special.gammaln(a + 0.5)
    log_g = a * math.log1p(-gamma * gamma) - math.log(2.0 * a) - log_c
    em1 = math.expm1(epsilon0)
    return math.exp(log_g) * em1 / (1.0 + q * em1)


def privunit_params(d: int, epsilon0: float) -> tuple[float, float, float]:
    """Cap height, cap probability, and debiasing scale for the budget.

    The cap probability p is pinned so the worst-case density ratio is
    exactly e^epsilon0, and the cap height gamma is then chosen to maximize
    the pre-scale signal (equivalently, minimize output norm 1/m).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if epsilon0 <= 0:
        raise ValueError("epsilon0 must be > 0")
    if d == 1:
        p = math.exp(epsilon0) / (1.0 + math.exp(epsilon0))
        return 0.0, p, 2.0 * p - 1.0
    res = optimize.minimize_scalar(
        lambda gamma: -_mean_factor(d, gamma, epsilon0),
        bounds=(1e-9, 1.0 - 1e-9),
        method="bounded",
        options={"xatol": 1e-12},
    )
    gamma = float(res.x)
    q = _cap_mass(d, gamma)
    e = math.exp(epsilon0)
    p = e * q / (1.0 - q + e * q)
    return gamma, p, _mean_factor(d, gamma, epsilon0)


def _sample_heights(d, gamma, p, rng, size):
    """Inner products <v, x> for cap/complement samples, via inverse CDF."""
    a = (d - 1) / 2.0
    split = float(special.betainc(a, a, (1.0 + gamma) / 2.0))  # P(T < gamma)
    in_cap = rng.random(size) < p
    u = rng.random(size)
    quantile = np.where(in_cap, split + u * (1.0 - split), u * split)
    w = special.betaincinv(a, a, quantile)
    return 2.0 * w - 1.0


def randomize_unit_rows(rows: np.ndarray, epsilon0: float, rng=None) -> np.ndarray:
    """Randomize each unit-norm row independently; unbiased per row.

    All rows share the parameters for (d, epsilon0); the output rows all
    have norm 1/m where m is the debiasing scale.
    """
    rng = np.random.default_rng(rng)
    rows = np.asarray(rows, dtype=np.float64)
    n, d = rows.shape
    if d == 1:
        _, p, m = privunit_params(1, epsilon0)
        signs = np.where(rng.random(n) < p, 1.0, -1.0)
        return (rows * signs[:, None]) / m
    gamma, p, m = privunit_params(d, epsilon0)
    heights = _sample_heights(d, gamma, p, rng, n)
    raw = rng.standard_normal((n, d))
    raw -= np.sum(raw * rows, axis=1, keepdims=True) * rows
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    perp = raw / norms
    out = heights[:, None] * rows + np.sqrt(1.0 - heights**2)[:, None] * perp
    return out / m


def privunit_randomize(x, epsilon0: float, rng=None) -> np.ndarray:
    """Randomize one unit vector; E[output] = x, norm fixed by (d, eps0)."""
    if isinstance(x, UnitVector):
        vec = x.components
    else:
        vec = UnitVector(components=np.asarray(x, dtype=np.float64)).components
    return randomize_unit_rows(vec[None, :], epsilon0, rng)[0]


def mean_estimation_experiment(
    trace: WalkTrace,
    d: int,
    epsilon0: float,
    protocol: str,
    seed: int | None = None,
    genuine_low: float = 1.0,
    genuine_high: float = 10.0,
    dummy_loc: float = 5.0,
) -> float:
    """Squared L2 error of private mean estimation over one exchange.

    Synthetic inputs: half the users draw from N(genuine_low, 1)^d, half
    from N(genuine_high, 1)^d, each normalized to the unit sphere; dummies
    (single protocol only) are normalized N(dummy_loc, 1)^d draws. The
    ground truth is the mean of the n genuine normalized samples; the
    estimate is the average of what the server receives under the protocol.
    """
    if protocol not in ("all", "single"):
        raise ValueError("protocol must be 'all' or 'single'")
    n = trace.n
    if n % 2 != 0:
        raise ValueError("n must be even")
    rng = np.random.default_rng(seed)

    locs = np.full(n, genuine_low)
    locs[n // 2 :] = genuine_high
    z = rng.normal(loc=locs[:, None], scale=1.0, size=(n, d))
    x = z / np.linalg.norm(z, axis=1, keepdims=True)
    true_mean = x.mean(axis=0)

    randomized = randomize_unit_rows(x, epsilon0, rng)

    if protocol == "all":
        estimate = randomized.mean(axis=0)
    else:
        chosen = sample_single_reports(trace.allocation(), trace, seed=rng.integers(2**63))
        dummies = chosen == DUMMY
        n_dummy = int(dummies.sum())
        submitted = np.empty((n, d))
        submitted[~dummies] = randomized[chosen[~dummies]]
        if n_dummy:
            zd = rng.normal(loc=dummy_loc, scale=1.0, size=(n_dummy, d))
            xd = zd / np.linalg.norm(zd, axis=1, keepdims=True)
            submitted[dummies] = randomize_unit_rows(xd, epsilon0, rng)
        estimate = submitted.mean(axis=0)

    diff = estimate - true_mean
    return float(np.dot(diff, diff))
