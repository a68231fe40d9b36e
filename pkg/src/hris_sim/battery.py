"""Markov-chain model of the battery state of charge.

The chain has S states spaced ``delta`` Joules apart (capacity (S-1)*delta).
Each period the state moves by floor(dE/delta) steps, clamped at the ends,
where dE is the random net stored energy with CDF F. Interior transitions are
p[i, j] = F((j-i+1)*delta) - F((j-i)*delta); the boundary columns absorb the
clipped tails so every row sums to one exactly:

    p[i, 0]   = F((1-i)*delta)
    p[i, S-1] = 1 - F((S-1-i)*delta)

Loss of charge is the stationary mass at or below the guard state. A trace
simulator of the same quantized process provides the empirical counterpart.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.stats import norm


class ReducibleChainError(ValueError):
    """Raised when the chain splits into closed classes; names them."""

    def __init__(self, closed_classes):
        self.closed_classes = closed_classes
        detail = "; ".join(str(sorted(c)) for c in closed_classes)
        super().__init__(f"reducible chain: closed class(es) {detail}")


def mah_to_joules(mah: float, voltage: float = 3.7) -> float:
    """Charge in mAh at the given cell voltage, expressed in Joules."""
    return mah * 1e-3 * 3600.0 * voltage


def joules_to_mah(joules: float, voltage: float = 3.7) -> float:
    return joules / (1e-3 * 3600.0 * voltage)


def states_for_capacity(capacity: float, delta: float) -> int:
    """Number of chain states for a capacity/step pair: round(C/delta) + 1."""
    if capacity <= 0 or delta <= 0:
        raise ValueError("capacity and delta must be positive")
    return int(round(capacity / delta)) + 1


@dataclass
class NetEnergyDist:
    """Distribution of the net stored energy per period (Joules).

    ``cdf`` maps a scalar to P[dE <= x]; ``sampler`` (rng, n) draws n values
    and is required only by the trace simulator.
    """

    mean: float
    std: float
    cdf: Callable
    sampler: Callable | None = None

    def __post_init__(self):
        if self.std <= 0:
            raise ValueError("std must be positive")

    @classmethod
    def gaussian(cls, mean: float, std: float) -> "NetEnergyDist":
        return cls(mean=mean, std=std,
                   cdf=lambda x: norm.cdf(x, loc=mean, scale=std),
                   sampler=lambda rng, n: rng.normal(mean, std, size=n))

    def sample(self, rng, n: int) -> np.ndarray:
        if self.sampler is None:
            raise ValueError("distribution has no sampler attached")
        return np.asarray(self.sampler(rng, n), dtype=float)


@dataclass
class BatteryChain:
    """Assembled state-of-charge chain with its transition matrix."""

    n_states: int
    step: float  # Joules between adjacent states
    psi: np.ndarray  # (S, S) row-stochastic transition matrix
    guard_state: int
    voltage: float = 3.7
    pi: np.ndarray | None = field(default=None)  # cached stationary distribution

    @property
    def capacity(self) -> float:
        return (self.n_states - 1) * self.step


def build_chain(dist: NetEnergyDist, n_states: int, delta: float,
                gamma: float) -> BatteryChain:
    """Assemble the transition matrix from the net-energy CDF.

    ``gamma`` is the guard fraction of capacity; the guard state index is
    floor(gamma * (S-1)).
    """
    if n_states < 2:
        raise ValueError("need at least two states")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    s = n_states
    # F evaluated on the step grid k*delta for k in [-(S-1), S-1]
    f_grid = np.array([float(dist.cdf(k * delta)) for k in range(-(s - 1), s)])
    if np.any(np.diff(f_grid) < -1e-12) or np.any(f_grid < -1e-12) \
            or np.any(f_grid > 1 + 1e-12):
        raise ValueError("cdf is not monotone non-decreasing into [0, 1]")

    def f(k: int) -> float:  # F(k*delta)
        return f_grid[k + s - 1]

    psi = np.zeros((s, s))
    for i in range(s):
        psi[i, 0] = f(max(1 - i, -(s - 1)))
        if s > 1:
            psi[i, s - 1] = 1.0 - f(min(s - 1 - i, s - 1))
        for j in range(1, s - 1):
            psi[i, j] = f(j - i + 1) - f(j - i)
    row_err = np.abs(psi.sum(axis=1) - 1.0).max()
    if row_err > 1e-12 or psi.min() < -1e-15:
        raise ValueError(f"transition matrix not stochastic (row error {row_err:.3e})")
    psi = np.clip(psi, 0.0, None)
    guard = int(np.floor(gamma * (s - 1)))
    return BatteryChain(n_states=s, step=delta, psi=psi, guard_state=guard)


def _closed_classes(psi: np.ndarray):
    """Strongly-connected components with no outgoing edges."""
    adj = sparse.csr_matrix(psi > 0)
    n_comp, labels = connected_components(adj, directed=True, connection="strong")
    closed = []
    for comp in range(n_comp):
        members = np.flatnonzero(labels == comp)
        outside = np.setdiff1d(np.arange(psi.shape[0]), members)
        if outside.size == 0 or not np.any(psi[np.ix_(members, outside)] > 0):
            closed.append(members.tolist())
    return n_comp, closed


def stationary(chain: BatteryChain, residual_tol: float = 1e-10) -> np.ndarray:
    """Unique fixed point of pi = Psi^T pi via a direct linear solve.

    Requires an irreducible chain; otherwise raises ReducibleChainError
    naming the closed class(es). The result is cached on the chain.
    """
    n_comp, closed = _closed_classes(chain.psi)
    if n_comp > 1:
        raise ReducibleChainError(closed)
    s = chain.n_states
    a = chain.psi.T - np.eye(s)
    a[-1, :] = 1.0  # replace one redundant balance row with normalization
    b = np.zeros(s)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    residual = np.abs(chain.psi.T @ pi - pi).max()
    if residual > residual_tol:
        raise ValueError(f"stationary solve residual {residual:.3e} above tolerance")
    chain.pi = pi
    return pi


def stationary_power_iteration(chain: BatteryChain, tol: float = 1e-13,
                               max_iter: int = 200000) -> np.ndarray:
    """Stationary distribution by repeated application of Psi^T (second method)."""
    s = chain.n_states
    pi = np.full(s, 1.0 / s)
    psi_t = chain.psi.T
    for _ in range(max_iter):
        nxt = psi_t @ pi
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < tol:
            return nxt
        pi = nxt
    raise ValueError("power iteration did not converge; chain may be reducible")


def loss_of_charge(chain: BatteryChain) -> float:
    """Stationary probability mass at or below the guard state."""
    pi = chain.pi if chain.pi is not None else stationary(chain)
    return float(pi[: chain.guard_state + 1].sum())


def ploc_standard_error(chain: BatteryChain, n_periods: int) -> float:
    """Standard error of the guard-mass time average over ``n_periods``.

    Uses the asymptotic variance of the indicator's ergodic average,
    var = p(1-p) + 2 (pi o f)^T (Z - I) f with Z = (I - Psi + 1 pi^T)^-1,
    which accounts for the chain's autocorrelation.
    """
    pi = chain.pi if chain.pi is not None else stationary(chain)
    s = chain.n_states
    f = np.zeros(s)
    f[: chain.guard_state + 1] = 1.0
    p = float(pi @ f)
    z = np.linalg.inv(np.eye(s) - chain.psi + np.outer(np.ones(s), pi))
    asym_var = p * (1.0 - p) + 2.0 * float((pi * f) @ ((z - np.eye(s)) @ f))
    return float(np.sqrt(max(asym_var, 0.0) / n_periods))


class BatterySizing(NamedTuple):
    n_states: int
    delta: float
    capacity: float


def size_battery(dist: NetEnergyDist, delta_grid, target_ploc: float,
                 gamma: float, s_max: int = 200) -> BatterySizing | None:
    """Smallest capacity (S-1)*delta on the grid meeting the target p_LoC.

    Scans S = 2..s_max for every delta. Saturated-drift chains that the
    stationary solve rejects as reducible are resolved by their drift sign
    (strong charging -> p_LoC 0, strong discharging -> 1). Returns None when
    no grid point qualifies.
    """
    delta_grid = list(delta_grid)
    if not delta_grid:
        raise ValueError("empty delta grid")
    if not 0.0 < target_ploc < 1.0:
        raise ValueError("target p_LoC must lie in (0, 1)")
    best = None
    for delta in delta_grid:
        for s in range(2, s_max + 1):
            chain = build_chain(dist, s, delta, gamma)
            try:
                ploc = loss_of_charge(chain)
            except ReducibleChainError:
                ploc = 0.0 if dist.mean > 0 and chain.guard_state < s - 1 else 1.0
            if ploc <= target_ploc:
                candidate = BatterySizing(s, float(delta), float((s - 1) * delta))
                if best is None or (candidate.capacity, candidate.delta) \
                        < (best.capacity, best.delta):
                    best = candidate
                break  # larger S at this delta only grows the capacity
    return best


def _per_period_steps(source, delta: float, n_periods: int, rng) -> np.ndarray:
    if isinstance(source, NetEnergyDist):
        values = source.sample(rng, n_periods)
    else:
        values = np.asarray(source, dtype=float)
        if values.size < n_periods:
            raise ValueError("energy stream shorter than the requested trace")
        values = values[:n_periods]
    return np.floor(values / delta).astype(np.int64)


def simulate_trace(source, capacity: float, delta: float, gamma: float,
                   n_periods: int, rng, idle_source=None,
                   initial_soc: float | None = None, burn_in: int = 0):
    """Simulate the quantized charge/discharge process.

    ``source`` is a NetEnergyDist or an array of per-period net energies
    (Joules). When ``idle_source`` is given, periods spent in idle mode (state
    at or below the guard, left one state above it) draw from it instead,
    modelling the reduced-efficiency harvest and idle controller draw; leave
    it None to reproduce exactly the process the chain describes. Returns
    (empirical p_LoC over the post-burn-in periods, SoC trace in Joules).
    """
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if not 0 <= burn_in < n_periods:
        raise ValueError("burn_in must lie in [0, n_periods)")
    s = states_for_capacity(capacity, delta)
    guard = int(np.floor(gamma * (s - 1)))
    top = s - 1
    state = top if initial_soc is None else int(round(
        min(max(initial_soc, 0.0), capacity) / delta))
    steps = _per_period_steps(source, delta, n_periods, rng)
    idle_steps = None
    if idle_source is not None:
        idle_steps = _per_period_steps(idle_source, delta, n_periods, rng)
    states = np.empty(n_periods, dtype=np.int64)
    idle = state <= guard
    for t in range(n_periods):
        move = idle_steps[t] if (idle and idle_steps is not None) else steps[t]
        state += move
        if state < 0:
            state = 0
        elif state > top:
            state = top
        states[t] = state
        if state <= guard:
            idle = True
        elif state > guard + 1:  # exit hysteresis: one state above the guard
            idle = False
    ploc = float(np.mean(states[burn_in:] <= guard))
    return ploc, states.astype(float) * delta
