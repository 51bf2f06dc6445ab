"""Stationary analysis of M/D/1 and M/D/c queues.

The number-in-system distribution is obtained from the embedded balance
equations

    p_j = a_j * sum_{k<=c} p_k + sum_{k=c+1}^{c+j} a_{j-k+c} p_k

(a_i = Poisson(G) pmf), closed with a geometric tail p_j = p_M tau^-(j-M)
for j >= M, which turns the infinite system into M+1 linear equations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NoConvergence, NotSingleServer, SingularSystem, UnstableQueue, ZeroArrivalRate

NEGATIVE_CLAMP = 1e-12
DEFAULT_REL_TOL = 1e-8
DEFAULT_MAX_STATES = 4096
# Lq values below this are treated as converged; the dense solve cannot
# resolve probabilities much smaller than machine epsilon anyway.
_LQ_ABS_FLOOR = 1e-12


@dataclass(frozen=True)
class QueueSpec:
    arrival_rate: float
    service_time: float
    servers: int = 1

    def __post_init__(self):
        if not self.arrival_rate >= 0:
            raise ValueError(f"arrival_rate must be >= 0, got {self.arrival_rate}")
        if not self.service_time > 0:
            raise ValueError(f"service_time must be > 0, got {self.service_time}")
        if int(self.servers) != self.servers or self.servers < 1:
            raise ValueError(f"servers must be a positive integer, got {self.servers}")

    @property
    def service_rate(self) -> float:
        return 1.0 / self.service_time

    @property
    def offered_traffic(self) -> float:
        return self.arrival_rate * self.service_time

    @property
    def utilization(self) -> float:
        return self.offered_traffic / self.servers

    def stable(self) -> bool:
        return self.offered_traffic < self.servers

    def require_stable(self) -> None:
        if not self.stable():
            raise UnstableQueue(
                f"offered traffic G={self.offered_traffic:.6g} >= c={self.servers}"
            )


@dataclass(frozen=True)
class TailParams:
    decay_root: float
    truncation_state: int


@dataclass(frozen=True, eq=False)
class StateDistribution:
    spec: QueueSpec
    tail: TailParams
    probs: np.ndarray

    @property
    def M(self) -> int:
        return self.tail.truncation_state

    @property
    def tau(self) -> float:
        return self.tail.decay_root

    def tail_mass(self) -> float:
        """Total probability of states >= M."""
        return float(self.probs[-1]) * _geometric_sum(self.tau)

    def total_mass(self) -> float:
        return float(self.probs[:-1].sum()) + self.tail_mass()


def _geometric_sum(tau: float) -> float:
    # sum_{m>=0} tau^-m
    if math.isinf(tau):
        return 1.0
    return 1.0 / (1.0 - 1.0 / tau)


def poisson_weights(mean: float, count: int) -> np.ndarray:
    """Poisson pmf at 0..count-1, computed in log space."""
    i = np.arange(count, dtype=float)
    if mean == 0.0:
        out = np.zeros(count)
        out[0] = 1.0
        return out
    return np.exp(-mean + i * math.log(mean) - gammaln(i + 1.0))


def _root_gap(z: float, G: float, c: int) -> float:
    # log form of z^c - exp(G(z-1)); concave in z, zero at z=1
    return c * math.log(z) - G * (z - 1.0)


def compute_decay_root(spec: QueueSpec, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Unique root tau > 1 of z^c = exp(G(z-1)).

    Safeguarded Newton on h(z) = c*ln z - G(z-1), which is concave with
    h(1) = 0 and h'(1) = c - G > 0, so exactly one root lies above 1.
    """
    spec.require_stable()
    if spec.arrival_rate <= 0:
        raise ValueError("decay root is undefined for a zero arrival rate")
    G, c = spec.offered_traffic, spec.servers

    # h(1 + (c-G)/c) > 0 (from ln(1+d) >= d - d^2/2), so it is a valid lower bracket
    lo = 1.0 + (c - G) / c
    hi = 2.0 * lo
    while _root_gap(hi, G, c) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NoConvergence("could not bracket the decay root")
    if _root_gap(lo, G, c) <= 0:
        raise NoConvergence("lower bracket lost sign")

    z = 0.5 * (lo + hi)
    for _ in range(max_iter):
        h = _root_gap(z, G, c)
        if h > 0:
            lo = z
        else:
            hi = z
        dh = c / z - G
        step_ok = False
        if dh != 0.0:
            znew = z - h / dh
            step_ok = lo < znew < hi
        if not step_ok:
            znew = 0.5 * (lo + hi)
        if abs(znew - z) <= tol * znew:
            z = znew
            break
        z = znew
    else:
        raise NoConvergence(f"decay root did not converge for G={G}, c={c}")
    return z


def root_residual(tau: float, spec: QueueSpec) -> float:
    """Relative residual |tau^c - e^{G(tau-1)}| / tau^c."""
    return abs(math.expm1(_root_gap(tau, spec.offered_traffic, spec.servers)))


def _balance_system(spec: QueueSpec, tau: float, M: int) -> tuple[np.ndarray, np.ndarray]:
    c = spec.servers
    a = poisson_weights(spec.offered_traffic, M)
    A = np.eye(M + 1)
    b = np.zeros(M + 1)

    rows = np.arange(M)
    # arrivals on top of the (at most c) frames that all leave within one service time
    A[:M, : c + 1] -= a[:, None]

    # frames beyond c still queued: p_k with c < k <= c+j contributes a_{j-k+c}
    j, k = np.meshgrid(rows, np.arange(c + 1, c + M), indexing="ij")
    mask = k <= c + j
    j, k = j[mask], k[mask]
    w = a[j - k + c]
    inside = k <= M
    np.subtract.at(A, (j[inside], k[inside]), w[inside])
    # p_k for k > M folded onto p_M through the geometric tail
    folded = w[~inside] * np.power(tau, (M - k[~inside]).astype(float))
    np.subtract.at(A, (j[~inside], np.full(folded.size, M)), folded)

    A[M, :M] = 1.0
    A[M, M] = _geometric_sum(tau)
    b[M] = 1.0
    return A, b


def _degenerate(spec: QueueSpec) -> StateDistribution:
    M = spec.servers + 4
    probs = np.zeros(M + 1)
    probs[0] = 1.0
    return StateDistribution(spec, TailParams(math.inf, M), probs)


def solve_state_distribution(spec: QueueSpec, tail: TailParams) -> StateDistribution:
    spec.require_stable()
    if spec.arrival_rate == 0:
        return _degenerate(spec)
    M, tau = tail.truncation_state, tail.decay_root
    if M < spec.servers:
        raise ValueError(f"truncation state M={M} must be >= c={spec.servers}")

    A, b = _balance_system(spec, tau, M)
    try:
        p = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"balance system singular for M={M}, tau={tau}") from exc
    if not np.all(np.isfinite(p)):
        raise SingularSystem(f"non-finite state probabilities for M={M}, tau={tau}")
    if p.min() < -NEGATIVE_CLAMP:
        raise SingularSystem(
            f"negative state probability {p.min():.3e} for M={M}, tau={tau}"
        )
    p = np.clip(p, 0.0, None)
    p.setflags(write=False)
    return StateDistribution(spec, tail, p)


def state_probability(dist: StateDistribution, j: int) -> float:
    if j < 0:
        raise ValueError("state index must be non-negative")
    M = dist.M
    if j <= M:
        return float(dist.probs[j])
    if math.isinf(dist.tau):
        return 0.0
    return float(dist.probs[M]) * dist.tau ** (-(j - M))


def cumulative_probability(dist: StateDistribution, n: int) -> float:
    """P(N < n), i.e. sum_{i=0}^{n-1} p_i with tail extension beyond M."""
    if n <= 0:
        return 0.0
    M = dist.M
    if n <= M:
        return float(dist.probs[:n].sum())
    head = float(dist.probs[:M].sum())
    if math.isinf(dist.tau):
        return head + float(dist.probs[M])
    q = 1.0 / dist.tau
    # p_M * (1 - q^(n-M)) / (1 - q)
    return head + float(dist.probs[M]) * (-math.expm1((n - M) * math.log(q))) / (1.0 - q)


def mean_queue_length(dist: StateDistribution) -> float:
    """E[L_q] with the geometric tail summed in closed form."""
    c, M = dist.spec.servers, dist.M
    p = dist.probs
    k = np.arange(c, M)
    body = float(np.dot(p[c:M], k - c))
    if math.isinf(dist.tau):
        return body + float(p[M]) * (M - c)
    g = _geometric_sum(dist.tau)
    return body + float(p[M]) * ((M - c + g - 1.0) * g)


def mean_waiting_time(dist: StateDistribution) -> float:
    lam = dist.spec.arrival_rate
    if lam == 0:
        raise ZeroArrivalRate("waiting time via Little's law needs a positive arrival rate")
    return mean_queue_length(dist) / lam


def md1_exact_waiting(spec: QueueSpec) -> float:
    """Pollaczek-Khinchine mean wait for M/D/1."""
    if spec.servers != 1:
        raise NotSingleServer(f"expected c=1, got c={spec.servers}")
    spec.require_stable()
    G = spec.offered_traffic
    return G * spec.service_time / (2.0 * (1.0 - G))


def _search_truncation(
    spec: QueueSpec, rel_tol: float, max_states: int
) -> tuple[int, StateDistribution]:
    spec.require_stable()
    if spec.arrival_rate == 0:
        d = _degenerate(spec)
        return d.M, d
    tau = compute_decay_root(spec)
    M = max(spec.servers + 4, 16)
    current = solve_state_distribution(spec, TailParams(tau, M))
    lq = mean_queue_length(current)
    while True:
        if 2 * M > max_states:
            raise NoConvergence(
                f"waiting time not converged below M={max_states} "
                f"(G={spec.offered_traffic:.6g}, c={spec.servers})"
            )
        nxt = solve_state_distribution(spec, TailParams(tau, 2 * M))
        lq2 = mean_queue_length(nxt)
        if abs(lq2 - lq) <= rel_tol * abs(lq) + _LQ_ABS_FLOOR:
            return M, current
        M, current, lq = 2 * M, nxt, lq2


def select_truncation(
    spec: QueueSpec, rel_tol: float = DEFAULT_REL_TOL, max_states: int = DEFAULT_MAX_STATES
) -> int:
    return _search_truncation(spec, rel_tol, max_states)[0]


@functools.lru_cache(maxsize=8192)
def stationary_distribution(
    spec: QueueSpec, rel_tol: float = DEFAULT_REL_TOL, max_states: int = DEFAULT_MAX_STATES
) -> StateDistribution:
    """Root, truncation and linear solve in one call (memoized)."""
    return _search_truncation(spec, rel_tol, max_states)[1]


def waiting_time(spec: QueueSpec) -> float:
    """Mean wait with the zero-load convention W = 0."""
    if spec.arrival_rate == 0:
        return 0.0
    return mean_waiting_time(stationary_distribution(spec))
