"""Transaction/block data model, Merkle commitment, compression, segments.

Wire conventions (all length prefixes are little-endian u32, times are
little-endian i64 fixed-point microseconds):

  tx core    = len(sender) || sender || submit_time_us || len(payload) || payload
  tx id      = sha256(tx core)
  tx wire    = tx core || len(sig) || sig
  header     = hash_prev || merkle_root || timestamp_us || len(proposer) || proposer
  block id   = sha256("block" || header)
  block wire = block_id || header || u32(n_tx) || tx wire...

Merkle convention: leaves are sha256(tx id); an odd level duplicates its last
node; internal node = sha256(left || right). A single-transaction block has
root sha256(tx.id).
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field

from .crypto import DIGEST_LEN, SchemeId, Signature, hash_bytes

ZERO_DIGEST = b"\x00" * DIGEST_LEN
CODECS = ("zlib", "none")


class LedgerError(Exception):
    """Base class for ledger rule violations."""


class LinkageError(LedgerError):
    """hash_prev does not match the segment head."""


class DuplicateTransactionError(LedgerError):
    """Transaction id already committed in this segment or block."""


class BlockSizeError(LedgerError):
    """Block exceeds the configured size limit."""


class MerkleError(LedgerError):
    """Merkle root mismatch or empty transaction list."""


def u32(value: int) -> bytes:
    return int(value).to_bytes(4, "little", signed=False)


def u64(value: int) -> bytes:
    # Signed i64: adversarial senders may back-date timestamps below zero.
    return int(value).to_bytes(8, "little", signed=True)


def encode_bytes(data: bytes) -> bytes:
    return u32(len(data)) + data


def time_to_us(seconds: float) -> int:
    return round(seconds * 1_000_000)


def encode_tx_core(sender: str, submit_time: float, payload: bytes) -> bytes:
    return (encode_bytes(sender.encode("utf-8"))
            + u64(time_to_us(submit_time))
            + encode_bytes(payload))


@dataclass
class Transaction:
    sender: str
    payload: bytes
    submit_time: float
    signature: Signature
    id: bytes = field(init=False)

    def __post_init__(self) -> None:
        self.id = hash_bytes(self.canonical_encoding())

    def canonical_encoding(self) -> bytes:
        return encode_tx_core(self.sender, self.submit_time, self.payload)

    def wire(self) -> bytes:
        return self.canonical_encoding() + encode_bytes(self.signature.bytes)

    def wire_size(self) -> int:
        return len(self.canonical_encoding()) + 4 + len(self.signature.bytes)


@dataclass(frozen=True)
class BlockMetadata:
    block_id: bytes
    hash_prev: bytes
    merkle_root: bytes
    timestamp: float


@dataclass
class Block:
    metadata: BlockMetadata
    transactions: list[Transaction]
    proposer: str
    raw_size: int = 0
    compressed_size: int = 0
    utility: float = 0.0

    def tx_ids(self) -> list[bytes]:
        return [tx.id for tx in self.transactions]


def merkle_root(tx_ids: list[bytes]) -> bytes:
    """Merkle root over transaction ids; raises MerkleError on an empty list."""
    if not tx_ids:
        raise MerkleError("merkle root of an empty transaction list")
    level = [hash_bytes(tx_id) for tx_id in tx_ids]
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [hash_bytes(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def block_header(hash_prev: bytes, root: bytes, timestamp: float, proposer: str) -> bytes:
    return (hash_prev + root + u64(time_to_us(timestamp))
            + encode_bytes(proposer.encode("utf-8")))


def block_id_for(header: bytes) -> bytes:
    return hash_bytes(b"block" + header)


def make_block(transactions: list[Transaction], hash_prev: bytes,
               timestamp: float, proposer: str) -> Block:
    root = merkle_root([tx.id for tx in transactions])
    header = block_header(hash_prev, root, timestamp, proposer)
    meta = BlockMetadata(block_id=block_id_for(header), hash_prev=hash_prev,
                         merkle_root=root, timestamp=timestamp)
    block = Block(metadata=meta, transactions=list(transactions), proposer=proposer)
    block.raw_size = len(block_wire(block))
    return block


def block_wire(block: Block) -> bytes:
    meta = block.metadata
    header = block_header(meta.hash_prev, meta.merkle_root, meta.timestamp,
                          block.proposer)
    parts = [meta.block_id, header, u32(len(block.transactions))]
    parts.extend(tx.wire() for tx in block.transactions)
    return b"".join(parts)


def compression_ratio(raw_size: int, compressed_size: int) -> float:
    """Fraction of the raw block removed by compression, in [0, 1)."""
    if raw_size <= 0:
        raise LedgerError("raw size must be positive")
    if not 0 < compressed_size <= raw_size:
        raise LedgerError("compressed size must be in (0, raw size]")
    return (raw_size - compressed_size) / raw_size


def compress_payload(data: bytes, codec: str) -> tuple[bytes, bool]:
    """Compress block bytes; falls back to stored form when not smaller.

    Returns (stored bytes, fallback flag). Fallback means compressed == raw
    and the block's ratio is exactly 0.
    """
    if codec == "none":
        return data, True
    if codec != "zlib":
        raise LedgerError(f"unknown codec {codec!r}")
    packed = zlib.compress(data, 6)
    if len(packed) >= len(data):
        return data, True
    return packed, False


def decompress_payload(data: bytes, codec: str, fallback: bool) -> bytes:
    if codec == "none" or fallback:
        return data
    return zlib.decompress(data)


def compress_block(block: Block, codec: str) -> tuple[int, float]:
    """Record raw/compressed sizes on the block; returns (compressed, ratio)."""
    raw = block_wire(block)
    packed, _ = compress_payload(raw, codec)
    block.raw_size = len(raw)
    block.compressed_size = len(packed)
    return block.compressed_size, compression_ratio(block.raw_size,
                                                    block.compressed_size)


def genesis_metadata(seed: int) -> BlockMetadata:
    """Deterministic chain bootstrap: zero transactions, id bound to the seed."""
    return BlockMetadata(block_id=hash_bytes(b"genesis" + u64(seed)),
                         hash_prev=ZERO_DIGEST, merkle_root=ZERO_DIGEST,
                         timestamp=0.0)


@dataclass
class LedgerSegment:
    """Single-writer per-edge chain; snapshots may be shared read-only."""

    owner: str
    genesis: BlockMetadata
    chain: list[Block] = field(default_factory=list)
    committed_ids: set[bytes] = field(default_factory=set)

    def head(self) -> BlockMetadata:
        return self.chain[-1].metadata if self.chain else self.genesis

    def append_block(self, block: Block, max_block_bytes: int = 0) -> None:
        """Append after re-checking linkage, Merkle, duplicates and size.

        The size limit applies to the compressed (transmitted/stored) form;
        raw form may exceed it as long as compression brings it under.
        """
        head = self.head()
        if block.metadata.hash_prev != head.block_id:
            raise LinkageError(
                f"segment {self.owner}: hash_prev does not match head block")
        if not block.transactions:
            raise MerkleError("block has no transactions")
        if block.metadata.timestamp <= head.timestamp:
            raise LinkageError(
                f"segment {self.owner}: timestamp must increase along the chain")
        if merkle_root(block.tx_ids()) != block.metadata.merkle_root:
            raise MerkleError(f"segment {self.owner}: merkle root mismatch")
        ids = block.tx_ids()
        if len(set(ids)) != len(ids):
            raise DuplicateTransactionError("duplicate transaction id inside block")
        dup = self.committed_ids.intersection(ids)
        if dup:
            raise DuplicateTransactionError(
                f"transaction {sorted(dup)[0].hex()} already committed in segment")
        if max_block_bytes and block.compressed_size > max_block_bytes:
            raise BlockSizeError(
                f"compressed block {block.compressed_size} B exceeds "
                f"limit {max_block_bytes} B")
        self.chain.append(block)
        self.committed_ids.update(ids)


# --- dump / load / audit -------------------------------------------------

def _meta_to_dict(meta: BlockMetadata) -> dict:
    return {
        "block_id": meta.block_id.hex(),
        "hash_prev": meta.hash_prev.hex(),
        "merkle_root": meta.merkle_root.hex(),
        "timestamp": meta.timestamp,
    }


def _meta_from_dict(data: dict) -> BlockMetadata:
    return BlockMetadata(block_id=bytes.fromhex(data["block_id"]),
                         hash_prev=bytes.fromhex(data["hash_prev"]),
                         merkle_root=bytes.fromhex(data["merkle_root"]),
                         timestamp=data["timestamp"])


def segment_to_dict(segment: LedgerSegment) -> dict:
    blocks = []
    for block in segment.chain:
        blocks.append({
            "metadata": _meta_to_dict(block.metadata),
            "proposer": block.proposer,
            "raw_size": block.raw_size,
            "compressed_size": block.compressed_size,
            "utility": block.utility,
            "transactions": [{
                "sender": tx.sender,
                "submit_time": tx.submit_time,
                "payload": tx.payload.hex(),
                "signature": tx.signature.bytes.hex(),
                "scheme": tx.signature.scheme_id.value,
            } for tx in block.transactions],
        })
    return {"owner": segment.owner, "genesis": _meta_to_dict(segment.genesis),
            "blocks": blocks}


def segment_from_dict(data: dict) -> LedgerSegment:
    segment = LedgerSegment(owner=data["owner"],
                            genesis=_meta_from_dict(data["genesis"]))
    for entry in data["blocks"]:
        txs = [Transaction(sender=t["sender"],
                           payload=bytes.fromhex(t["payload"]),
                           submit_time=t["submit_time"],
                           signature=Signature(bytes=bytes.fromhex(t["signature"]),
                                               scheme_id=SchemeId(t["scheme"])))
               for t in entry["transactions"]]
        meta = _meta_from_dict(entry["metadata"])
        block = Block(metadata=meta, transactions=txs, proposer=entry["proposer"],
                      raw_size=entry["raw_size"],
                      compressed_size=entry["compressed_size"],
                      utility=entry["utility"])
        segment.chain.append(block)
        segment.committed_ids.update(block.tx_ids())
    return segment


def dump_ledger(path, segments: list[LedgerSegment], registry: dict[str, bytes],
                scheme: str, seed: int) -> None:
    """Write the documented JSON ledger dump (includes the key registry)."""
    data = {
        "format": "uavchain-ledger-v1",
        "scheme": scheme,
        "seed": seed,
        "registry": {node: key.hex() for node, key in sorted(registry.items())},
        "segments": [segment_to_dict(s) for s in segments],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, sort_keys=True, indent=1)
        handle.write("\n")


def load_ledger(path) -> tuple[list[LedgerSegment], dict[str, bytes], str, int]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if data.get("format") != "uavchain-ledger-v1":
        raise LedgerError("not a uavchain ledger dump")
    registry = {node: bytes.fromhex(key) for node, key in data["registry"].items()}
    segments = [segment_from_dict(s) for s in data["segments"]]
    return segments, registry, data["scheme"], data["seed"]


def verify_segment(segment: LedgerSegment, registry: dict[str, bytes],
                   provider, max_block_bytes: int = 0) -> list[str]:
    """Full re-verification: linkage, block ids, Merkle roots, signatures.

    Returns a list of human-readable findings; empty list means the segment
    is fully valid.
    """
    findings: list[str] = []
    prev = segment.genesis
    seen: set[bytes] = set()
    for height, block in enumerate(segment.chain, start=1):
        where = f"segment {segment.owner} block {height}"
        meta = block.metadata
        if meta.hash_prev != prev.block_id:
            findings.append(f"{where}: broken linkage")
        if meta.timestamp <= prev.timestamp:
            findings.append(f"{where}: non-increasing timestamp")
        if not block.transactions:
            findings.append(f"{where}: empty block")
            prev = meta
            continue
        header = block_header(meta.hash_prev, meta.merkle_root, meta.timestamp,
                              block.proposer)
        if block_id_for(header) != meta.block_id:
            findings.append(f"{where}: block id mismatch")
        if merkle_root(block.tx_ids()) != meta.merkle_root:
            findings.append(f"{where}: merkle root mismatch")
        if max_block_bytes and block.compressed_size > max_block_bytes:
            findings.append(f"{where}: oversize block")
        if not 0 < block.compressed_size <= block.raw_size:
            findings.append(f"{where}: inconsistent size accounting")
        for tx in block.transactions:
            key = registry.get(tx.sender)
            if key is None:
                findings.append(f"{where}: unknown sender {tx.sender}")
            elif not provider.verify(tx.id, tx.signature, key):
                findings.append(
                    f"{where}: bad signature on tx {tx.id.hex()[:16]}")
            if tx.id in seen:
                findings.append(f"{where}: duplicate tx {tx.id.hex()[:16]}")
            seen.add(tx.id)
        prev = meta
    return findings
