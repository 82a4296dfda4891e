"""Consensus state machine: admission, block assembly, committee, quorum.

Transaction admission re-verifies the lattice signature and filters
duplicates/unknown senders; timeliness is recorded as a metric but never
rejects. Block assembly is greedy by freshness under a compressed-size
budget, scored by

    utility = alpha * valid_count + beta * freshness - gamma * energy_cost

Committees are weighted samples without replacement over edge trust weights,
and a round commits when approvals reach ceil(2m/3).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Callable, Optional

from . import ledger
from .ledger import Block, BlockMetadata, Transaction


class RejectReason(str, Enum):
    BAD_SIGNATURE = "bad-signature"
    UNKNOWN_SENDER = "unknown-sender"
    DUPLICATE = "duplicate"
    OVERSIZE = "oversize"


class RoundOutcome(str, Enum):
    COMMITTED = "committed"
    ABORTED = "aborted"
    SKIPPED = "skipped"


class ConsensusError(Exception):
    pass


@dataclass(frozen=True)
class UtilityParams:
    alpha: float = 1.0
    beta: float = 2.0
    gamma: float = 0.1

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) < 0.0:
            raise ConsensusError("utility weights must be non-negative")
        if self.alpha == self.beta == self.gamma == 0.0:
            raise ConsensusError("utility weights must not all be zero")


def utility_score(params: UtilityParams, valid_count: int, freshness: float,
                  energy_cost: float) -> float:
    return (params.alpha * valid_count + params.beta * freshness
            - params.gamma * energy_cost)


@dataclass(frozen=True)
class BlockScore:
    valid_count: int
    freshness: float
    energy_cost: float
    utility: float


@dataclass
class ValidationPool:
    """Signature-verified transactions held at one edge node."""

    owner: str
    admitted: dict[bytes, Transaction] = field(default_factory=dict)
    rejected_counts: Counter = field(default_factory=Counter)

    def __len__(self) -> int:
        return len(self.admitted)


def admit_transaction(pool: ValidationPool, tx: Transaction,
                      registry: dict[str, bytes], provider,
                      committed_ids: set[bytes],
                      payload_bounds: tuple[int, int]) -> Optional[RejectReason]:
    """Admit tx into the pool; returns the reject reason or None on accept."""
    key = registry.get(tx.sender)
    if key is None:
        reason = RejectReason.UNKNOWN_SENDER
    elif not payload_bounds[0] <= len(tx.payload) <= payload_bounds[1]:
        reason = RejectReason.OVERSIZE
    elif tx.id in pool.admitted or tx.id in committed_ids:
        reason = RejectReason.DUPLICATE
    elif not provider.verify(tx.id, tx.signature, key):
        reason = RejectReason.BAD_SIGNATURE
    else:
        pool.admitted[tx.id] = tx
        return None
    pool.rejected_counts[reason.value] += 1
    return reason


def tx_freshness(tx: Transaction, now: float, tau_max: float) -> float:
    age = now - tx.submit_time
    return min(1.0, max(0.0, 1.0 - age / tau_max))


def freshness(transactions: list[Transaction], now: float, tau_max: float) -> float:
    """Mean per-transaction freshness, each clamped to [0, 1]."""
    if not transactions:
        raise ConsensusError("freshness of an empty candidate block")
    return sum(tx_freshness(tx, now, tau_max) for tx in transactions) / len(transactions)


@dataclass(frozen=True)
class BlockLimits:
    max_block_bytes: int = 2 * 1024 * 1024   # applies to the compressed block
    max_block_txs: int = 0                   # 0 = unlimited
    compression_headroom: float = 0.30       # assumed ratio for the raw budget
    codec: str = "zlib"


def assemble_block(pool: ValidationPool, params: UtilityParams,
                   limits: BlockLimits, now: float, tau_max: float,
                   prev: BlockMetadata, proposer: str,
                   energy_cost_fn: Callable[[Block], float] = lambda b: 0.0,
                   ) -> Optional[tuple[Block, BlockScore]]:
    """Greedy freshest-first packing under the block size limit.

    Returns None when the pool is empty (no-proposal signal; the window is
    skipped). Selected transactions are NOT removed from the pool; the caller
    removes them only after a committed round.
    """
    if not pool.admitted:
        return None
    candidates = sorted(pool.admitted.values(),
                        key=lambda tx: (-tx_freshness(tx, now, tau_max), tx.id))
    # Raw budget assumes the codec removes at least `compression_headroom`;
    # the compressed result is re-checked below and trimmed if needed.
    raw_budget = limits.max_block_bytes / (1.0 - limits.compression_headroom)
    base = len(ledger.block_header(prev.block_id, ledger.ZERO_DIGEST, now,
                                   proposer)) + 36
    picked: list[Transaction] = []
    raw_total = base
    for tx in candidates:
        size = tx.wire_size()
        if raw_total + size > raw_budget:
            break
        picked.append(tx)
        raw_total += size
        if limits.max_block_txs and len(picked) >= limits.max_block_txs:
            break
    if not picked:
        return None
    block = ledger.make_block(picked, prev.block_id, now, proposer)
    ledger.compress_block(block, limits.codec)
    while block.compressed_size > limits.max_block_bytes and len(picked) > 1:
        # Codec underperformed the headroom assumption; shed the stalest txs.
        shed = max(1, len(picked) // 20)
        picked = picked[:-shed]
        block = ledger.make_block(picked, prev.block_id, now, proposer)
        ledger.compress_block(block, limits.codec)
    eta = len(picked)
    zeta = freshness(picked, now, tau_max)
    theta = energy_cost_fn(block)
    score = BlockScore(valid_count=eta, freshness=zeta, energy_cost=theta,
                       utility=utility_score(params, eta, zeta, theta))
    block.utility = score.utility
    return block, score


def sample_committee(weights: dict[str, float], size: int, rng: Random) -> list[str]:
    """Weighted sampling without replacement with renormalized draws.

    Deterministic given the rng state; iteration is in sorted node order.
    Returns the committee sorted by node id.
    """
    if size > len(weights):
        raise ConsensusError(
            f"committee size {size} exceeds population {len(weights)}")
    remaining = {node: weights[node] for node in sorted(weights)}
    chosen: list[str] = []
    for _ in range(size):
        total = sum(remaining.values())
        if total <= 0.0:
            # Degenerate residual mass: fill uniformly from what is left.
            node = sorted(remaining)[rng.randrange(len(remaining))]
        else:
            point = rng.random() * total
            acc = 0.0
            node = None
            for cand, weight in remaining.items():
                acc += weight
                if point < acc:
                    node = cand
                    break
            if node is None:  # guard against float accumulation at the edge
                node = next(reversed(remaining))
        chosen.append(node)
        del remaining[node]
    return sorted(chosen)


def quorum_threshold(committee_size: int) -> int:
    return math.ceil(2 * committee_size / 3)


def sample_proposer(committee: list[str], weights: dict[str, float],
                    rng: Random) -> str:
    """Draw the proposer within the committee proportionally to trust weight.

    Weighted rotation (rather than always the heaviest member) keeps every
    edge's pool live while still favoring trusted edges. Zero total weight
    falls back to the lowest node id.
    """
    members = sorted(committee)
    total = sum(weights[m] for m in members)
    if total <= 0.0:
        return members[0]
    point = rng.random() * total
    acc = 0.0
    for member in members:
        acc += weights[member]
        if point < acc:
            return member
    return members[-1]


@dataclass
class CommitteeRound:
    window_id: int
    committee: list[str]
    proposer: str
    proposal: Optional[Block] = None
    votes: dict[str, bool] = field(default_factory=dict)
    outcome: RoundOutcome = RoundOutcome.SKIPPED
    t_propose: float = 0.0
    confirm_times: dict[str, float] = field(default_factory=dict)


def run_round(rnd: CommitteeRound,
              member_validators: dict[str, Callable[[Block], bool]],
              quorum: Optional[int] = None) -> RoundOutcome:
    """Collect independent member votes and settle the round outcome.

    Votes are computed in sorted member order but must be order-independent
    (each validator sees only the proposal).
    """
    if rnd.proposal is None:
        rnd.outcome = RoundOutcome.SKIPPED
        return rnd.outcome
    if rnd.proposer not in rnd.committee:
        raise ConsensusError("proposer must be a committee member")
    if quorum is None:
        quorum = quorum_threshold(len(rnd.committee))
    for member in sorted(rnd.committee):
        rnd.votes[member] = bool(member_validators[member](rnd.proposal))
    approvals = sum(rnd.votes.values())
    rnd.outcome = (RoundOutcome.COMMITTED if approvals >= quorum
                   else RoundOutcome.ABORTED)
    return rnd.outcome


def consensus_delay(t_propose: float, confirm_times: dict[str, float]) -> float:
    """Slowest member confirmation relative to the proposal instant."""
    if not confirm_times:
        return 0.0
    return max(confirm_times.values()) - t_propose
