"""Deterministic discrete-event simulation core.

Binds mobility, workload, admission, trust and consensus into one
single-threaded event loop. All randomness flows from per-subsystem streams
derived from the master seed by labeled hashing, so the full output is a
pure function of (config, seed) and changing one axis does not perturb the
other subsystems' draws.

Cadence: transaction admission is continuous; consensus rounds run every
block interval; trust updates, UAV-to-edge reassignment and committee
resampling happen every consensus window.
"""

from __future__ import annotations

import copy
import hashlib
import heapq
import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from random import Random
from statistics import mean, stdev
from typing import Optional

from . import consensus, ledger, netsim, trust, workload
from .config import ScenarioConfig, apply_override, config_to_flat_dict
from .crypto import MOCK_SIGNATURE_LEN, SchemeId, Signature, get_provider
from .ledger import LedgerSegment, Transaction, genesis_metadata
from .metrics import MetricsCollector, RoundRecord, TrustRecord, TxRecord
from .netsim import CommGraph, EnergyAccount, UavState

# Event priorities at equal timestamps: move first, then the window
# bookkeeping, then the consensus round, then message traffic.
_PRIO_MOBILITY = 0
_PRIO_WINDOW = 1
_PRIO_ROUND = 2
_PRIO_SUBMIT = 3
_PRIO_RECV = 4


class SimulationInvariantError(RuntimeError):
    """An internal consistency check failed; the run output is not trustworthy."""


def stream_seed(master_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"uavchain:{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_stream(master_seed: int, label: str) -> Random:
    return Random(stream_seed(master_seed, label))


@dataclass
class _WindowStats:
    submitted: int = 0
    arrived: int = 0
    accepted: int = 0
    timely: int = 0


@dataclass
class SimulationResult:
    config: ScenarioConfig
    metrics: MetricsCollector
    summary: dict
    segments: dict[str, LedgerSegment]
    registry: dict[str, bytes]
    accounts: dict[str, EnergyAccount]
    trust_scores: dict[str, float]
    uav_behaviors: dict[str, workload.Behavior]
    malicious_edges: set[str]
    final_states: dict[str, UavState] = field(default_factory=dict)


class Simulation:
    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        seed = config.sim.master_seed
        self.rng_mobility = make_stream(seed, "mobility")
        self.rng_workload = make_stream(seed, "workload")
        self.rng_committee = make_stream(seed, "committee")
        self.rng_network = make_stream(seed, "network")
        self.rng_adversary = make_stream(seed, "adversary")
        self.rng_placement = make_stream(seed, "placement")
        self.rng_replication = make_stream(seed, "replication")

        self.provider = get_provider(config.crypto.scheme)
        self.metrics = MetricsCollector()
        self.now = 0.0
        self._event_seq = 0
        self._events: list = []
        self._kem_counter = 0

        self._setup_nodes()
        self._setup_protocol_state()

    # --- construction -----------------------------------------------------

    def _setup_nodes(self) -> None:
        cfg = self.config
        side = cfg.area_side_m()
        self.uav_ids = [f"u{i:03d}" for i in range(cfg.network.uav_count)]
        self.edge_ids = [f"e{i:02d}" for i in range(cfg.network.edge_count)]

        link = netsim.LinkParams(
            range_m=cfg.network.range_m,
            bandwidth_bps=cfg.network.bandwidth_bps,
            backhaul_bps=cfg.network.backhaul_bps,
            jitter_mean_s=cfg.network.jitter_mean_s,
            contention_per_uav=cfg.network.contention_per_uav,
            prop_speed_mps=cfg.network.prop_speed_mps)
        self.graph = CommGraph(link)
        self.gm_params = netsim.GaussMarkovParams(
            memory=cfg.mobility.memory, mean_speed=cfg.mobility.mean_speed_mps,
            speed_sigma=cfg.mobility.speed_sigma,
            heading_sigma=cfg.mobility.heading_sigma,
            vert_sigma=cfg.mobility.vert_sigma,
            alt_min=cfg.mobility.alt_min_m, alt_max=cfg.mobility.alt_max_m)
        self.energy_model = netsim.EnergyModel(
            eps0_j=cfg.energy.eps0_j, eps1_j_per_m2=cfg.energy.eps1_j_per_m2,
            costs=netsim.CryptoCosts(
                sign_j=cfg.crypto.sign_j, verify_j=cfg.crypto.verify_j,
                encaps_j=cfg.crypto.encaps_j, decaps_j=cfg.crypto.decaps_j,
                sign_s=cfg.crypto.sign_s, verify_s=cfg.crypto.verify_s))

        # Edge stations sit on a jittered grid: planned deployments space
        # their sites roughly evenly, and near-equal cells keep coverage and
        # proposal opportunity from concentrating on a few stations.
        cols = math.ceil(math.sqrt(len(self.edge_ids)))
        rows = math.ceil(len(self.edge_ids) / cols)
        cell_w, cell_h = side / cols, side / rows
        for index, edge in enumerate(self.edge_ids):
            cx = (index % cols + 0.5) * cell_w
            cy = (index // cols + 0.5) * cell_h
            pos = (cx + self.rng_placement.uniform(-0.2, 0.2) * cell_w,
                   cy + self.rng_placement.uniform(-0.2, 0.2) * cell_h, 0.0)
            self.graph.add_node(edge, "edge", pos)
        self.graph.add_node("base", "base", (side / 2, side / 2, 0.0))

        self.uav_states: dict[str, UavState] = {}
        for uav in self.uav_ids:
            state = UavState(
                node_id=uav,
                x=self.rng_mobility.uniform(0.0, side),
                y=self.rng_mobility.uniform(0.0, side),
                z=self.rng_mobility.uniform(cfg.mobility.alt_min_m,
                                            cfg.mobility.alt_max_m),
                speed=cfg.mobility.mean_speed_mps,
                heading=self.rng_mobility.uniform(-math.pi, math.pi),
                mean_heading=0.0,
                energy=cfg.energy.uav_budget_j)
            state.mean_heading = state.heading
            self.uav_states[uav] = state
            self.graph.add_node(uav, "uav", state.position())

        # Keys are provisioned at scenario start for every node.
        self.keys = {}
        self.registry: dict[str, bytes] = {}
        for node in self.uav_ids + self.edge_ids + ["base"]:
            pair = self.provider.keygen(
                stream_seed(cfg.sim.master_seed, f"key:{node}"))
            self.keys[node] = pair
            self.registry[node] = pair.public_key

        self.accounts = {
            uav: EnergyAccount(uav, cfg.energy.uav_budget_j, budget_limited=True)
            for uav in self.uav_ids}
        for node in self.edge_ids + ["base"]:
            self.accounts[node] = EnergyAccount(node, 0.0, budget_limited=False)

    def _setup_protocol_state(self) -> None:
        cfg = self.config
        seed = cfg.sim.master_seed
        self.segments = {edge: LedgerSegment(owner=edge,
                                             genesis=genesis_metadata(seed))
                         for edge in self.edge_ids}
        self.pools = {edge: consensus.ValidationPool(owner=edge)
                      for edge in self.edge_ids}
        self.trust_params = trust.TrustParams(smoothing=cfg.trust.smoothing,
                                              initial_score=cfg.trust.initial_score)
        self.behavior_weights = trust.BehaviorWeights(
            valid=cfg.trust.weight_valid, timely=cfg.trust.weight_timely,
            uptime=cfg.trust.weight_uptime)
        self.trust_states = {uav: trust.TrustState(cfg.trust.initial_score)
                             for uav in self.uav_ids}
        self.utility_params = consensus.UtilityParams(
            alpha=cfg.consensus.alpha, beta=cfg.consensus.beta,
            gamma=cfg.consensus.gamma)
        self.block_limits = consensus.BlockLimits(
            max_block_bytes=cfg.consensus.max_block_bytes,
            max_block_txs=cfg.consensus.max_block_txs,
            compression_headroom=cfg.ledger.compression_headroom,
            codec=cfg.ledger.codec)
        self.workload_params = workload.WorkloadParams(
            arrival_rate=cfg.workload.arrival_rate_tps,
            payload_min=cfg.workload.payload_min_bytes,
            payload_max=cfg.workload.payload_max_bytes,
            random_fraction=cfg.workload.payload_random_fraction)
        adversary = workload.AdversaryParams(
            compromised_fraction=cfg.workload.compromised_fraction,
            malicious_edge_fraction=cfg.workload.malicious_edge_fraction,
            behaviors=cfg.behavior_list() or (workload.Behavior.FORGE_SIGNATURE.value,))
        self.uav_behaviors, self.malicious_edges = workload.assign_adversaries(
            self.uav_ids, self.edge_ids, adversary, self.rng_adversary)

        self.window_stats = {uav: _WindowStats() for uav in self.uav_ids}
        self.death_times: dict[str, float] = {}
        self.sessions: set[tuple[str, str]] = set()
        self.committed_recent: deque[Transaction] = deque(maxlen=1000)
        # (edge, tx_id) -> transactions.csv row index, for status updates
        self.pending_rows: dict[tuple[str, bytes], int] = {}
        self.edge_weights: dict[str, float] = {}
        self.committee: list[str] = []
        self._window_update(0)

    # --- event plumbing -----------------------------------------------------

    def _schedule(self, time: float, prio: int, kind: str, payload=None) -> None:
        if time < self.now:
            raise SimulationInvariantError("event scheduled in the past")
        self._event_seq += 1
        heapq.heappush(self._events, (time, prio, self._event_seq, kind, payload))

    def run(self) -> SimulationResult:
        cfg = self.config
        duration = cfg.sim.duration_s
        step = cfg.sim.mobility_step_s
        t = step
        while t <= duration + 1e-9:
            self._schedule(t, _PRIO_MOBILITY, "mobility")
            t += step
        k = 1
        while k * cfg.consensus.window_s <= duration + 1e-9:
            self._schedule(k * cfg.consensus.window_s, _PRIO_WINDOW, "window", k)
            k += 1
        k = 1
        while k * cfg.consensus.block_interval_s <= duration + 1e-9:
            self._schedule(k * cfg.consensus.block_interval_s, _PRIO_ROUND,
                           "round", k)
            k += 1
        if duration > 0:
            self._schedule(workload.next_arrival(
                self.workload_params.arrival_rate, self.rng_workload),
                _PRIO_SUBMIT, "submit")

        while self._events:
            time, prio, _, kind, payload = heapq.heappop(self._events)
            if time > duration + 1e-9:
                break
            if time < self.now - 1e-9:
                raise SimulationInvariantError("clock went backwards")
            self.now = max(self.now, time)
            if kind == "mobility":
                self._handle_mobility()
            elif kind == "window":
                self._window_update(payload)
            elif kind == "round":
                self._handle_round(payload)
            elif kind == "submit":
                self._handle_submit()
            elif kind == "recv":
                self._handle_recv(*payload)

        self.now = duration
        return self._finalize()

    # --- handlers -----------------------------------------------------------

    def _handle_mobility(self) -> None:
        side = self.config.area_side_m()
        for uav in self.uav_ids:
            state = self.uav_states[uav]
            if not state.alive:
                continue
            state = netsim.step_mobility(state, self.config.sim.mobility_step_s,
                                         self.gm_params, side, self.rng_mobility)
            self.uav_states[uav] = state
            self.graph.move(uav, state.position())

    def _charge_uav(self, uav: str, amount: float) -> bool:
        account = self.accounts[uav]
        ok = account.try_charge(amount)
        state = self.uav_states[uav]
        state.energy = account.remaining
        if account.depleted and state.alive:
            state.alive = False
            self.graph.set_alive(uav, False)
            self.death_times[uav] = self.now
        return ok

    def _charge_infra(self, node: str, amount: float) -> None:
        self.accounts[node].try_charge(amount)
        self.metrics.infra_energy_j += amount

    def _ensure_session(self, uav: str, edge: str) -> bool:
        """Establish the KEM session key on first contact of a pair."""
        if (uav, edge) in self.sessions:
            return True
        costs = self.energy_model.costs
        if not self._charge_uav(uav, costs.encaps_j):
            return False
        self._kem_counter += 1
        ciphertext, _ = self.provider.encaps(self.registry[edge],
                                             self._kem_counter, (uav, edge))
        self.provider.decaps(self.keys[edge].private_key, ciphertext, (uav, edge))
        self._charge_infra(edge, costs.decaps_j)
        self.sessions.add((uav, edge))
        return True

    def _handle_submit(self) -> None:
        self._schedule(self.now + workload.next_arrival(
            self.workload_params.arrival_rate, self.rng_workload),
            _PRIO_SUBMIT, "submit")
        alive = [u for u in self.uav_ids if self.uav_states[u].alive]
        if not alive:
            return
        uav = self.rng_workload.choice(alive)
        payload = workload.make_payload(self.workload_params, self.rng_workload)
        behavior = self.uav_behaviors.get(uav)
        costs = self.energy_model.costs

        sign_spend = 0.0
        if behavior is workload.Behavior.REPLAY and self.committed_recent:
            tx = self.committed_recent[
                self.rng_adversary.randrange(len(self.committed_recent))]
        else:
            submit_time = self.now
            if behavior is workload.Behavior.DELAY_INJECTION:
                submit_time = self.now - 1.5 * self.config.consensus.tau_max_s
            if behavior is workload.Behavior.FORGE_SIGNATURE:
                signature = Signature(
                    bytes=self.rng_adversary.randbytes(MOCK_SIGNATURE_LEN),
                    scheme_id=SchemeId(self.config.crypto.scheme))
            else:
                core = ledger.encode_tx_core(uav, submit_time, payload)
                signature = self.provider.sign(self.keys[uav].private_key,
                                               ledger.hash_bytes(core))
            if not self._charge_uav(uav, costs.sign_j):
                return
            sign_spend = costs.sign_j
            tx = Transaction(sender=uav, payload=payload,
                             submit_time=submit_time, signature=signature)

        seq = len(self.metrics.transactions)
        record = TxRecord(seq=seq, tx_id=tx.id.hex(), sender=tx.sender,
                          submit_time=tx.submit_time)
        self.metrics.transactions.append(record)
        # Behavior stats count at resolution (drop here or later arrival), so
        # a window never sees an attempt whose outcome lands in the next one.
        stats = self.window_stats[uav]

        edge = self.graph.nearest_edge(uav, require_range=True)
        if edge is None:
            record.status = "dropped"
            record.reject_reason = "no-link"
            stats.submitted += 1
            return
        record.edge = edge
        if not self._ensure_session(uav, edge):
            record.status = "dropped"
            record.reject_reason = "energy-exhausted"
            stats.submitted += 1
            return
        distance = self.graph.distance(uav, edge)
        if not self._charge_uav(uav, self.energy_model.tx_energy(distance)):
            record.status = "dropped"
            record.reject_reason = "energy-exhausted"
            stats.submitted += 1
            return
        record.energy_j += sign_spend + self.energy_model.tx_energy(distance)
        delay = netsim.deliver(tx.wire_size(), uav, edge, self.graph,
                               self.rng_network)
        if delay is None:
            record.status = "dropped"
            record.reject_reason = "no-link"
            stats.submitted += 1
            return
        self._schedule(self.now + delay, _PRIO_RECV, "recv", (tx, edge, seq, uav))

    def _handle_recv(self, tx: Transaction, edge: str, seq: int, emitter: str) -> None:
        cfg = self.config
        record = self.metrics.transactions[seq]
        record.recv_time = self.now
        record.latency = self.now - tx.submit_time
        record.timely = record.latency < cfg.consensus.tau_max_s
        stats = self.window_stats[emitter]
        stats.submitted += 1
        stats.arrived += 1
        if record.timely:
            stats.timely += 1

        self._charge_infra(edge, self.energy_model.costs.verify_j)
        reason = consensus.admit_transaction(
            self.pools[edge], tx, self.registry, self.provider,
            self.segments[edge].committed_ids,
            (cfg.workload.payload_min_bytes, cfg.workload.payload_max_bytes))
        if reason is None:
            record.energy_j += self.energy_model.costs.verify_j
            stats.accepted += 1
            self.pending_rows[(edge, tx.id)] = seq
        else:
            record.status = "rejected"
            record.reject_reason = reason.value

    def _expire_pool_txs(self) -> None:
        tau = self.config.consensus.tau_max_s
        for edge in self.edge_ids:
            pool = self.pools[edge]
            stale = [tx_id for tx_id, tx in pool.admitted.items()
                     if self.now - tx.submit_time > tau]
            for tx_id in stale:
                del pool.admitted[tx_id]
                seq = self.pending_rows.pop((edge, tx_id), None)
                if seq is not None:
                    self.metrics.transactions[seq].status = "expired"

    def _round_energy_fn(self, proposer: str, committee: list[str]):
        verify_j = self.energy_model.costs.verify_j

        def cost(block: ledger.Block) -> float:
            members = [m for m in committee if m != proposer]
            distances = [self.graph.distance(proposer, m) for m in members]
            compute = [len(block.transactions) * verify_j for _ in members]
            return netsim.round_energy(self.energy_model, distances, compute)

        return cost

    def _member_validator(self, member: str, proposer: str):
        cfg = self.config

        def validate(block: ledger.Block) -> bool:
            if member in self.malicious_edges and member != proposer:
                return False
            head = self.segments[proposer].head()
            if block.metadata.hash_prev != head.block_id:
                return False
            if ledger.merkle_root(block.tx_ids()) != block.metadata.merkle_root:
                return False
            if block.compressed_size > cfg.consensus.max_block_bytes:
                return False
            for tx in block.transactions:
                key = self.registry.get(tx.sender)
                if key is None or not self.provider.verify(tx.id, tx.signature, key):
                    return False
            return True

        return validate

    def _handle_round(self, round_index: int) -> None:
        cfg = self.config
        self._expire_pool_txs()
        window_id = int(self.now // cfg.consensus.window_s)
        committee = list(self.committee)
        proposer = consensus.sample_proposer(committee, self.edge_weights,
                                             self.rng_committee)
        record = RoundRecord(window_id=window_id, time=self.now,
                             committee="|".join(committee), proposer=proposer)
        self.metrics.rounds.append(record)

        pool = self.pools[proposer]
        assembled = consensus.assemble_block(
            pool, self.utility_params, self.block_limits, self.now,
            cfg.consensus.tau_max_s, self.segments[proposer].head(), proposer,
            self._round_energy_fn(proposer, committee))
        if assembled is None:
            return
        block, score = assembled
        record.eta = score.valid_count
        record.zeta = score.freshness
        record.theta_j = score.energy_cost
        record.utility = score.utility
        record.raw_size = block.raw_size
        record.compressed_size = block.compressed_size
        record.omega = ledger.compression_ratio(block.raw_size,
                                                block.compressed_size)

        rnd = consensus.CommitteeRound(window_id=window_id, committee=committee,
                                       proposer=proposer, proposal=block,
                                       t_propose=self.now)
        validators = {m: self._member_validator(m, proposer) for m in committee}
        outcome = consensus.run_round(rnd, validators)
        record.approvals = sum(rnd.votes.values())

        costs = self.energy_model.costs
        rnd.confirm_times[proposer] = self.now
        for member in committee:
            if member == proposer:
                continue
            down = netsim.deliver(block.compressed_size, proposer, member,
                                  self.graph, self.rng_network)
            up = netsim.deliver(cfg.network.vote_size_bytes, member, proposer,
                                self.graph, self.rng_network)
            verify_time = len(block.transactions) * costs.verify_s
            rnd.confirm_times[member] = self.now + down + verify_time + up
        record.delta_cons = consensus.consensus_delay(rnd.t_propose,
                                                      rnd.confirm_times)
        # Charge the round energy to the mains-powered infrastructure tier.
        members = [m for m in committee if m != proposer]
        self._charge_infra(proposer, sum(
            self.energy_model.tx_energy(self.graph.distance(proposer, m))
            for m in members))
        for member in members:
            self._charge_infra(member, len(block.transactions) * costs.verify_j)

        record.outcome = outcome.value
        if outcome is not consensus.RoundOutcome.COMMITTED:
            return

        self.segments[proposer].append_block(block, cfg.consensus.max_block_bytes)
        share = score.energy_cost / score.valid_count if score.valid_count else 0.0
        for tx in block.transactions:
            del pool.admitted[tx.id]
            seq = self.pending_rows.pop((proposer, tx.id), None)
            if seq is not None:
                row = self.metrics.transactions[seq]
                row.status = "committed"
                row.energy_j += share
            self.committed_recent.append(tx)
        others = [e for e in self.edge_ids if e != proposer]
        replicas = self.rng_replication.sample(sorted(others),
                                               min(cfg.ledger.replication,
                                                   len(others)))
        self.metrics.replication_bytes += block.compressed_size * len(replicas)

    def _uptime_fraction(self, uav: str, window_start: float) -> float:
        if self.uav_states[uav].alive:
            return 1.0
        died = self.death_times.get(uav, window_start)
        span = self.now - window_start
        if span <= 0:
            return 0.0
        return min(1.0, max(0.0, (died - window_start) / span))

    def _window_update(self, window_index: int) -> None:
        cfg = self.config
        if window_index > 0:
            window_start = self.now - cfg.consensus.window_s
            for uav in self.uav_ids:
                stats = self.window_stats[uav]
                chi = trust.behavior_score(stats.submitted, stats.accepted,
                                           stats.timely,
                                           self._uptime_fraction(uav, window_start),
                                           self.behavior_weights)
                self.trust_states[uav] = trust.update_trust(
                    self.trust_states[uav], chi, self.trust_params, self.now)
                self.window_stats[uav] = _WindowStats()
                self.metrics.trust.append(TrustRecord(
                    window_id=window_index, node=uav, chi=chi.value,
                    xi=self.trust_states[uav].score, rho=0.0))
            ranks = trust.trust_rank({u: self.trust_states[u].score
                                      for u in self.uav_ids})
            for row in self.metrics.trust[-len(self.uav_ids):]:
                row.rho = ranks[row.node]

        alive = [u for u in self.uav_ids if self.uav_states[u].alive]
        assignment: dict[str, set[str]] = {edge: set() for edge in self.edge_ids}
        for uav in alive:
            edge = self.graph.nearest_edge(uav)
            if edge is not None:
                assignment[edge].add(uav)
        scores = {u: self.trust_states[u].score for u in alive}
        for edge in assignment:  # guard for empty cells feeding the rank sum
            assignment[edge] = {u for u in assignment[edge] if u in scores}
        self.edge_weights = trust.edge_committee_weights(assignment, scores)
        self.committee = consensus.sample_committee(
            self.edge_weights, cfg.consensus.committee_size, self.rng_committee)

    # --- completion ---------------------------------------------------------

    def _finalize(self) -> SimulationResult:
        self._check_invariants()
        scores = {u: self.trust_states[u].score for u in self.uav_ids}
        summary = self.metrics.summary(
            duration_s=self.config.sim.duration_s,
            uav_energy_spent_j=sum(self.accounts[u].initial
                                   - self.accounts[u].remaining
                                   for u in self.uav_ids),
            top_decile_share=self._top_decile_share(scores))
        return SimulationResult(
            config=self.config, metrics=self.metrics, summary=summary,
            segments=self.segments, registry=self.registry,
            accounts=self.accounts, trust_scores=scores,
            uav_behaviors=self.uav_behaviors,
            malicious_edges=self.malicious_edges,
            final_states=self.uav_states)

    def _top_decile_share(self, scores: dict[str, float]) -> float:
        committed = [r.sender for r in self.metrics.transactions
                     if r.status == "committed"]
        if not committed:
            return 0.0
        n_top = max(1, len(self.uav_ids) // 10)
        ordered = sorted(self.uav_ids, key=lambda u: (-scores[u], u))
        top = set(ordered[:n_top])
        return sum(1 for sender in committed if sender in top) / len(committed)

    def _check_invariants(self) -> None:
        if not self.metrics.reconciliation_holds():
            raise SimulationInvariantError("transaction accounting mismatch")
        for account in self.accounts.values():
            if not account.verify_conservation():
                raise SimulationInvariantError(
                    f"energy conservation violated for {account.node_id}")
        side = self.config.area_side_m()
        for uav, state in self.uav_states.items():
            if not (0.0 <= state.x <= side and 0.0 <= state.y <= side):
                raise SimulationInvariantError(f"{uav} left the area")
        for edge in self.edge_ids:
            findings = ledger.verify_segment(
                self.segments[edge], self.registry, self.provider,
                self.config.consensus.max_block_bytes)
            if findings:
                raise SimulationInvariantError(
                    f"ledger audit failed: {findings[0]}")


def run(config: ScenarioConfig, seed: Optional[int] = None) -> SimulationResult:
    """Run one scenario; `seed` overrides the config's master seed."""
    config = copy.deepcopy(config)
    if seed is not None:
        config.sim.master_seed = seed
    return Simulation(config).run()


def _run_summary(config: ScenarioConfig) -> dict:
    return Simulation(config).run().summary


def sweep(base_config: ScenarioConfig, axis: str, values: list,
          replications: int = 1, workers: Optional[int] = None) -> list[dict]:
    """Replicated parameter sweep; replication i uses master_seed + i.

    Returns one row per axis value with mean/std aggregates of every numeric
    summary metric. Aggregation order is deterministic regardless of worker
    count.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    jobs: list[ScenarioConfig] = []
    for value in values:
        for rep in range(replications):
            cfg = copy.deepcopy(base_config)
            apply_override(cfg, axis, value)
            cfg.sim.master_seed = base_config.sim.master_seed + rep
            cfg.validate()
            jobs.append(cfg)
    if workers is None:
        workers = int(os.environ.get("UAVCHAIN_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_summary, jobs))
    else:
        summaries = [_run_summary(cfg) for cfg in jobs]

    rows = []
    for i, value in enumerate(values):
        group = summaries[i * replications:(i + 1) * replications]
        row: dict = {"axis": axis, "value": value, "replications": replications}
        for key in group[0]:
            samples = [s[key] for s in group]
            if not all(isinstance(x, (int, float)) for x in samples):
                continue
            row[f"{key}_mean"] = mean(samples)
            row[f"{key}_std"] = stdev(samples) if len(samples) > 1 else 0.0
        rows.append(row)
    return rows


def flat_config(config: ScenarioConfig) -> dict:
    return config_to_flat_dict(config)
