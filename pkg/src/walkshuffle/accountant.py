"""Central (epsilon, delta) guarantees of the random-walk exchange.

All operations here are pure closed-form evaluations: the caller supplies
``sum_p2`` (the sum of squared landing probabilities), choosing either the
worst-case bound from :func:`walkshuffle.spectral.sum_p_squared_bound`
(stationary scenario) or an exactly evolved distribution (symmetric
scenario). Formulas use expm1/log1p forms so small local budgets do not
lose precision.

The "all"-protocol guarantee holds with probability 1 - delta2 over the
report allocation, which is why delta2 joins the reported delta. When the
local randomizer itself has delta0 > 0, the guarantee degrades to an
8*epsilon0 local budget and is only available when delta0 is below
:func:`delta0_threshold`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LocalPrivacyParams",
    "AmplificationResult",
    "compose_heterogeneous",
    "amplify_all_stationary",
    "amplify_all_symmetric",
    "amplify_single",
    "single_simplified_epsilon",
    "delta0_threshold",
    "empirical_epsilon_from_allocation",
]

_SUM_P2_SLACK = 1e-12


@dataclass(frozen=True)
class LocalPrivacyParams:
    """Local randomizer budget: epsilon0 >= 0 and delta0 in [0, 1)."""

    epsilon0: float
    delta0: float = 0.0

    def __post_init__(self):
        if self.epsilon0 < 0:
            raise ValueError("epsilon0 must be >= 0")
        if not 0.0 <= self.delta0 < 1.0:
            raise ValueError("delta0 must lie in [0, 1)")


@dataclass(frozen=True)
class AmplificationResult:
    """Central guarantee of one protocol/scenario evaluation.

    ``scenario`` is "<protocol>-<scenario>-<path>", e.g.
    "all-stationary-pure". ``inputs`` echoes everything that went in.
    """

    epsilon: float
    delta: float
    scenario: str
    epsilon1: float | None = None
    inputs: dict = field(default_factory=dict)


def compose_heterogeneous(eps_list, delta: float) -> float:
    """Adaptive composition of mechanisms with per-mechanism budgets.

    ``sum_i eps_i * tanh(eps_i / 2) + sqrt(2 log(1/delta) sum_i eps_i^2)``;
    tanh(e/2) equals (e^e - 1)/(e^e + 1). Valid for any delta in (0, 1).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    eps = np.asarray(eps_list, dtype=np.float64)
    if eps.size == 0:
        return 0.0
    if eps.min() < 0:
        raise ValueError("per-mechanism epsilons must be >= 0")
    linear = float(np.sum(eps * np.tanh(eps / 2.0)))
    return linear + math.sqrt(2.0 * math.log(1.0 / delta) * float(np.sum(eps * eps)))


def delta0_threshold(epsilon0: float, delta1: float) -> float:
    """Largest local delta0 admitting the 8*epsilon0 degradation step."""
    if epsilon0 <= 0:
        raise ValueError("epsilon0 must be > 0")
    if not 0.0 < delta1 < 1.0:
        raise ValueError("delta1 must lie in (0, 1)")
    numerator = -math.expm1(-epsilon0) * delta1
    log_term = math.log(2.0 / delta1) / -math.log1p(-math.exp(-5.0 * epsilon0))
    return numerator / (4.0 * math.exp(epsilon0) * (2.0 + log_term))


def _check_common(n: int, sum_p2: float, delta: float) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if sum_p2 < 1.0 / n - _SUM_P2_SLACK or sum_p2 > 1.0 + _SUM_P2_SLACK:
        raise ValueError(f"sum_p2 must lie in [1/n, 1], got {sum_p2!r} for n={n}")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")


def _epsilon1(
    n: int, sum_p2: float, delta2: float, rho_star: float = 1.0,
    proof_normalization: bool = False,
) -> float:
    if not 0.0 < delta2 < 1.0:
        raise ValueError("delta2 must lie in (0, 1)")
    scale = (n - 1.0) if proof_normalization else (1.0 - 1.0 / n)
    return math.sqrt(scale * rho_star**2 * sum_p2) + math.sqrt(math.log(1.0 / delta2) / n)


def _all_protocol_epsilon(epsilon0: float, eps1: float, delta: float) -> float:
    # b**2 == (e^eps0 - 1)^2 * e^(4 eps0); the two printed arrangements of
    # the second term are algebraically this same quantity
    b = math.expm1(epsilon0) * math.exp(2.0 * epsilon0)
    return b * b * eps1 * eps1 / 2.0 + b * eps1 * math.sqrt(2.0 * math.log(1.0 / delta))


def _single_protocol_epsilon(epsilon0: float, sum_p2: float, delta: float) -> float:
    e = math.exp(epsilon0)
    em1 = math.expm1(epsilon0)
    return (
        e * e * em1 * em1 / 2.0 * sum_p2
        + e * em1 * math.sqrt(2.0 * math.log(1.0 / delta) * sum_p2)
    )


def _require_degradable(lp: LocalPrivacyParams, delta1: float | None) -> float:
    if delta1 is None:
        raise ValueError("delta1 is required when delta0 > 0")
    if not 0.0 < delta1 < 1.0:
        raise ValueError("delta1 must lie in (0, 1)")
    limit = delta0_threshold(lp.epsilon0, delta1)
    if lp.delta0 > limit:
        raise ValueError(
            f"delta0={lp.delta0!r} exceeds the randomizer degradation "
            f"threshold {limit!r} for delta1={delta1!r}"
        )
    return delta1


def _approx_delta(n: int, eps_prime: float, delta: float, delta1: float, delta2: float) -> float:
    # delta + delta2 + n (e^eps' + 1) delta1, with the union term evaluated
    # in log space; a result of 1.0 means the guarantee is vacuous here
    log_union = math.log(n * delta1) + eps_prime + math.log1p(math.exp(-eps_prime))
    if log_union >= 0.0:
        return 1.0
    return min(1.0, delta + delta2 + math.exp(log_union))


def _echo(**kwargs) -> dict:
    return {k: v for k, v in kwargs.items() if v is not None}


def amplify_all_stationary(
    lp: LocalPrivacyParams,
    n: int,
    sum_p2: float,
    delta: float,
    delta1: float | None = None,
    delta2: float | None = None,
    t: int | None = None,
    proof_normalization: bool = False,
) -> AmplificationResult:
    """Central guarantee when every user submits all held reports.

    ``sum_p2`` should be the worst-case bound over the stop time (see
    :func:`walkshuffle.spectral.sum_p_squared_bound`). The reported delta is
    ``delta + delta2`` on the pure path; with delta0 > 0 the guarantee uses
    the degraded 8*epsilon0 budget and picks up the n-fold union term.

    ``proof_normalization`` switches the first epsilon1 term from the
    (1 - 1/n) scaling to the (n - 1) scaling; the two appear inconsistently
    in the source material and the default follows the headline statements.
    """
    if delta2 is None:
        raise ValueError("delta2 is required for the all-reports protocol")
    _check_common(n, sum_p2, delta)
    eps1 = _epsilon1(n, sum_p2, delta2, proof_normalization=proof_normalization)
    echo = _echo(
        epsilon0=lp.epsilon0, delta0=lp.delta0, n=n, sum_p2=sum_p2,
        delta=delta, delta1=delta1, delta2=delta2, t=t,
    )
    if lp.delta0 == 0.0:
        eps = _all_protocol_epsilon(lp.epsilon0, eps1, delta)
        return AmplificationResult(
            epsilon=eps, delta=delta + delta2, epsilon1=eps1,
            scenario="all-stationary-pure", inputs=echo,
        )
    delta1 = _require_degradable(lp, delta1)
    eps_prime = _all_protocol_epsilon(8.0 * lp.epsilon0, eps1, delta)
    return AmplificationResult(
        epsilon=eps_prime,
        delta=_approx_delta(n, eps_prime, delta, delta1, delta2),
        epsilon1=eps1,
        scenario="all-stationary-approx",
        inputs=echo,
    )


def amplify_all_symmetric(
    lp: LocalPrivacyParams,
    n: int,
    sum_p2: float,
    rho_star: float,
    delta: float,
    delta1: float | None = None,
    delta2: float | None = None,
    t: int | None = None,
) -> AmplificationResult:
    """All-reports guarantee with an exactly tracked regular-graph walk.

    ``sum_p2`` and ``rho_star`` come from the exact position distribution of
    any user at the stop time; rho_star >= 1 penalizes unmixed walks. At
    rho_star = 1 this coincides with the stationary-scenario evaluation.
    """
    if delta2 is None:
        raise ValueError("delta2 is required for the all-reports protocol")
    if rho_star < 1.0:
        raise ValueError("rho_star must be >= 1")
    _check_common(n, sum_p2, delta)
    eps1 = _epsilon1(n, sum_p2, delta2, rho_star=rho_star)
    echo = _echo(
        epsilon0=lp.epsilon0, delta0=lp.delta0, n=n, sum_p2=sum_p2,
        rho_star=rho_star, delta=delta, delta1=delta1, delta2=delta2, t=t,
    )
    if lp.delta0 == 0.0:
        eps = _all_protocol_epsilon(lp.epsilon0, eps1, delta)
        return AmplificationResult(
            epsilon=eps, delta=delta + delta2, epsilon1=eps1,
            scenario="all-symmetric-pure", inputs=echo,
        )
    delta1 = _require_degradable(lp, delta1)
    eps_prime = _all_protocol_epsilon(8.0 * lp.epsilon0, eps1, delta)
    return AmplificationResult(
        epsilon=eps_prime,
        delta=_approx_delta(n, eps_prime, delta, delta1, delta2),
        epsilon1=eps1,
        scenario="all-symmetric-approx",
        inputs=echo,
    )


def amplify_single(
    lp: LocalPrivacyParams,
    n: int,
    sum_p2: float,
    delta: float,
    delta1: float | None = None,
    delta2: float = 0.0,
    t: int | None = None,
    scenario: str = "stationary",
) -> AmplificationResult:
    """Central guarantee when every user submits exactly one report.

    Works for both scenarios; they differ only in how the caller obtained
    ``sum_p2`` (worst-case bound vs exact regular-graph distribution), which
    is recorded via ``scenario``. The pure path needs no allocation tail
    bound, so delta passes through unchanged; delta2 only enters the
    degraded-randomizer delta and defaults to 0.
    """
    if scenario not in ("stationary", "symmetric"):
        raise ValueError("scenario must be 'stationary' or 'symmetric'")
    _check_common(n, sum_p2, delta)
    echo = _echo(
        epsilon0=lp.epsilon0, delta0=lp.delta0, n=n, sum_p2=sum_p2,
        delta=delta, delta1=delta1, delta2=delta2, t=t,
    )
    if lp.delta0 == 0.0:
        eps = _single_protocol_epsilon(lp.epsilon0, sum_p2, delta)
        return AmplificationResult(
            epsilon=eps, delta=delta, epsilon1=None,
            scenario=f"single-{scenario}-pure", inputs=echo,
        )
    delta1 = _require_degradable(lp, delta1)
    eps_prime = _single_protocol_epsilon(8.0 * lp.epsilon0, sum_p2, delta)
    return AmplificationResult(
        epsilon=eps_prime,
        delta=_approx_delta(n, eps_prime, delta, delta1, delta2),
        epsilon1=None,
        scenario=f"single-{scenario}-approx",
        inputs=echo,
    )


def single_simplified_epsilon(epsilon0: float, sum_p2: float, delta: float) -> float:
    """Convenience upper bound for the single protocol at epsilon0 <= 1.

    ``800 eps0^2 sum_p2 + 40 eps0 sqrt(2 log(1/delta) sum_p2)``; a looser
    but simpler form of the degraded-randomizer epsilon.
    """
    if not 0.0 <= epsilon0 <= 1.0:
        raise ValueError("the simplified form applies for epsilon0 in [0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return 800.0 * epsilon0**2 * sum_p2 + 40.0 * epsilon0 * math.sqrt(
        2.0 * math.log(1.0 / delta) * sum_p2
    )


def empirical_epsilon_from_allocation(alloc, epsilon0: float, delta: float) -> float:
    """Data-dependent budget conditioned on a realized allocation.

    Node i's submission is a mechanism with budget
    ``log(1 + e^(2 eps0) (e^eps0 - 1) l_i / n)``; the n per-node budgets are
    then composed. ``alloc`` is a ReportAllocation or a counts array summing
    to n.
    """
    counts = np.asarray(getattr(alloc, "counts", alloc), dtype=np.float64)
    n = counts.sum()
    if n <= 0:
        raise ValueError("allocation must contain at least one report")
    factor = math.exp(2.0 * epsilon0) * math.expm1(epsilon0)
    eps_per_node = np.log1p(factor * counts / n)
    return compose_heterogeneous(eps_per_node, delta)
