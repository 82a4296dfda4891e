"""Mobility, time-varying connectivity, link latency, and the energy model.

UAVs follow a Gauss-Markov process on speed, heading and vertical speed with
reflective area boundaries and a clamped altitude band. Links exist between
any alive pair within transmission range; edge servers and the base station
additionally share an always-on wired backhaul. Transmission energy follows

    eps_tx = eps0 + eps1 * distance**2

and round energy is the plain sum of member transmit and compute costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional

INFRA_KINDS = ("edge", "base")


@dataclass(frozen=True)
class GaussMarkovParams:
    memory: float = 0.85         # autocorrelation of successive velocities
    mean_speed: float = 8.0      # m/s
    speed_sigma: float = 1.5
    heading_sigma: float = 0.35  # radians
    vert_sigma: float = 0.3
    alt_min: float = 50.0
    alt_max: float = 150.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.memory <= 1.0:
            raise ValueError("gauss-markov memory must be in [0,1]")
        if self.alt_min > self.alt_max:
            raise ValueError("altitude band is inverted")


@dataclass
class UavState:
    node_id: str
    x: float
    y: float
    z: float
    speed: float
    heading: float
    mean_heading: float
    vz: float = 0.0
    energy: float = 1000.0
    role_weight: float = 1.0   # stored per the state tuple; unused by default
    alive: bool = True

    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def _reflect(value: float, low: float, high: float) -> tuple[float, bool]:
    """Fold a coordinate back into [low, high]; flag whether it bounced."""
    bounced = False
    # Repeated folding handles steps longer than the interval.
    while value < low or value > high:
        bounced = True
        if value < low:
            value = 2 * low - value
        else:
            value = 2 * high - value
    return value, bounced


def step_mobility(state: UavState, dt: float, params: GaussMarkovParams,
                  area_side: float, rng: Random) -> UavState:
    """One Gauss-Markov step with boundary reflection. Pure: returns a copy."""
    if dt <= 0.0:
        raise ValueError("mobility step must be positive")
    eta = params.memory
    root = math.sqrt(max(0.0, 1.0 - eta * eta))
    speed = (eta * state.speed + (1.0 - eta) * params.mean_speed
             + root * rng.gauss(0.0, params.speed_sigma))
    heading = (eta * state.heading + (1.0 - eta) * state.mean_heading
               + root * rng.gauss(0.0, params.heading_sigma))
    vz = eta * state.vz + root * rng.gauss(0.0, params.vert_sigma)

    x = state.x + speed * math.cos(heading) * dt
    y = state.y + speed * math.sin(heading) * dt
    z = state.z + vz * dt

    mean_heading = state.mean_heading
    x, bounced_x = _reflect(x, 0.0, area_side)
    if bounced_x:
        heading = math.pi - heading
        mean_heading = math.pi - mean_heading
    y, bounced_y = _reflect(y, 0.0, area_side)
    if bounced_y:
        heading = -heading
        mean_heading = -mean_heading
    z, bounced_z = _reflect(z, params.alt_min, params.alt_max)
    if bounced_z:
        vz = -vz

    return replace(state, x=x, y=y, z=z, speed=speed, heading=heading,
                   mean_heading=mean_heading, vz=vz)


@dataclass(frozen=True)
class LinkParams:
    range_m: float = 1200.0
    bandwidth_bps: float = 1e6        # UAV air links
    backhaul_bps: float = 1e7         # edge/base infrastructure links
    jitter_mean_s: float = 0.005
    contention_per_uav: float = 0.08  # queueing growth per UAV sharing the cell
    prop_speed_mps: float = 3e8


class CommGraph:
    """Positions + liveness snapshot answering range and latency queries.

    Link rule: (i, j) is up iff both endpoints are alive and either their
    distance is within transmission range or both are infrastructure nodes
    (edges / base station, which share a wired backhaul).
    """

    def __init__(self, params: LinkParams):
        self.params = params
        self.positions: dict[str, tuple[float, float, float]] = {}
        self.kinds: dict[str, str] = {}
        self.alive: dict[str, bool] = {}
        self._contention_cache: dict[str, int] = {}

    def add_node(self, node_id: str, kind: str,
                 position: tuple[float, float, float], alive: bool = True) -> None:
        self.positions[node_id] = position
        self.kinds[node_id] = kind
        self.alive[node_id] = alive

    def move(self, node_id: str, position: tuple[float, float, float]) -> None:
        self.positions[node_id] = position
        self._contention_cache.clear()

    def set_alive(self, node_id: str, alive: bool) -> None:
        self.alive[node_id] = alive
        self._contention_cache.clear()

    def distance(self, a: str, b: str) -> float:
        return math.dist(self.positions[a], self.positions[b])

    def is_infra_pair(self, a: str, b: str) -> bool:
        return self.kinds[a] in INFRA_KINDS and self.kinds[b] in INFRA_KINDS

    def in_range(self, a: str, b: str) -> bool:
        if not (self.alive[a] and self.alive[b]):
            return False
        if self.is_infra_pair(a, b):
            return True
        return self.distance(a, b) <= self.params.range_m

    def uav_neighbors(self, node_id: str) -> int:
        """Alive UAVs inside the node's radio range (channel contention)."""
        cached = self._contention_cache.get(node_id)
        if cached is not None:
            return cached
        pos = self.positions[node_id]
        rng2 = self.params.range_m ** 2
        count = 0
        for other, kind in self.kinds.items():
            if kind != "uav" or other == node_id or not self.alive[other]:
                continue
            ox, oy, oz = self.positions[other]
            dx, dy, dz = ox - pos[0], oy - pos[1], oz - pos[2]
            if dx * dx + dy * dy + dz * dz <= rng2:
                count += 1
        self._contention_cache[node_id] = count
        return count

    def nearest_edge(self, node_id: str, require_range: bool = False,
                     ) -> Optional[str]:
        best = None
        best_d = math.inf
        for other, kind in self.kinds.items():
            if kind != "edge" or not self.alive[other]:
                continue
            d = self.distance(node_id, other)
            if d < best_d:
                best, best_d = other, d
        if best is not None and require_range and best_d > self.params.range_m:
            return None
        return best


def delivery_mean_delay(graph: CommGraph, size_bytes: int, src: str,
                        dst: str) -> float:
    """Closed-form mean of the delivery delay model (for verification)."""
    p = graph.params
    bandwidth = p.backhaul_bps if graph.is_infra_pair(src, dst) else p.bandwidth_bps
    jitter = p.jitter_mean_s * (1.0 + p.contention_per_uav * graph.uav_neighbors(dst))
    return graph.distance(src, dst) / p.prop_speed_mps + size_bytes * 8 / bandwidth + jitter


def deliver(size_bytes: int, src: str, dst: str, graph: CommGraph,
            rng: Random) -> Optional[float]:
    """Delay for one message, or None when the link is down (drop).

    Delay = propagation + serialization + exponential queueing jitter whose
    mean scales with the number of UAVs contending for the receiver's channel.
    """
    if not graph.in_range(src, dst):
        return None
    p = graph.params
    bandwidth = p.backhaul_bps if graph.is_infra_pair(src, dst) else p.bandwidth_bps
    jitter_mean = p.jitter_mean_s * (1.0 + p.contention_per_uav
                                     * graph.uav_neighbors(dst))
    return (graph.distance(src, dst) / p.prop_speed_mps
            + size_bytes * 8 / bandwidth
            + rng.expovariate(1.0 / jitter_mean))


@dataclass(frozen=True)
class CryptoCosts:
    """Abstract per-primitive compute costs (scenario configuration)."""

    sign_j: float = 0.02
    verify_j: float = 0.01
    encaps_j: float = 0.01
    decaps_j: float = 0.01
    sign_s: float = 0.002
    verify_s: float = 0.001


@dataclass(frozen=True)
class EnergyModel:
    eps0_j: float = 0.05        # fixed per-transmission cost
    eps1_j_per_m2: float = 1e-7
    costs: CryptoCosts = CryptoCosts()

    def __post_init__(self) -> None:
        if self.eps0_j < 0.0 or self.eps1_j_per_m2 < 0.0:
            raise ValueError("energy coefficients must be non-negative")

    def tx_energy(self, distance_m: float) -> float:
        if distance_m < 0.0:
            raise ValueError("distance must be non-negative")
        return self.eps0_j + self.eps1_j_per_m2 * distance_m * distance_m


def round_energy(model: EnergyModel, transmit_distances: list[float],
                 compute_joules: list[float]) -> float:
    """Total consensus-round energy: member transmissions plus compute."""
    return (sum(model.tx_energy(d) for d in transmit_distances)
            + sum(compute_joules))


@dataclass
class EnergyAccount:
    """Per-node energy ledger; UAVs deplete a budget, infra only records.

    The conservation identity (initial - sequential charges == remaining) is
    checked exactly, replaying charges in order so float rounding cancels.
    """

    node_id: str
    initial: float
    budget_limited: bool = True
    remaining: float = 0.0
    charges: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.remaining = self.initial

    @property
    def depleted(self) -> bool:
        return self.budget_limited and self.remaining <= 0.0

    def try_charge(self, amount: float) -> bool:
        """Charge if affordable; an unaffordable charge drains to zero."""
        if amount < 0.0:
            raise ValueError("negative energy charge")
        if not self.budget_limited:
            self.charges.append(amount)
            self.remaining -= amount
            return True
        if self.remaining <= 0.0:
            return False
        if amount > self.remaining:
            self.charges.append(self.remaining)
            self.remaining -= self.remaining
            return False
        self.charges.append(amount)
        self.remaining -= amount
        return True

    def verify_conservation(self) -> bool:
        balance = self.initial
        for charge in self.charges:
            balance -= charge
        return balance == self.remaining
