"""Pluggable signature + KEM provider with a deterministic mock backend.

The mock backend ("mock-sig") is the default for simulation and tests: it is
a keyed-hash construction that is bit-exact reproducible from integer seeds,
which makes every simulator output a pure function of the scenario seed.
It offers NO cryptographic security -- the mock public key embeds the signing
secret so that verification works from the public half alone.

A real lattice-class backend ("dilithium3-class") can be plugged in through
``register_provider``; nothing in the simulator depends on one being present.

Mock byte layouts (length-prefixed encodings use little-endian u32 lengths):
  private key   32 bytes   sha256("uav-mock-sk" || seed_le64)
  public key    35 bytes   b"MK1" || private_key
  signature     64 bytes   hmac(sk, "sig1" || digest) || hmac(sk, "sig2" || digest)
  kem ct        48 bytes   eph(32) || hmac(sk, "kem" || eph)[:16]
  session key   32 bytes   sha256("uav-mock-ss" || sk || eph)
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import Enum

DIGEST_LEN = 32
MOCK_PRIVATE_LEN = 32
MOCK_PUBLIC_LEN = 35
MOCK_SIGNATURE_LEN = 64
MOCK_CIPHERTEXT_LEN = 48
SESSION_KEY_LEN = 32

_MOCK_PK_TAG = b"MK1"


class SchemeId(str, Enum):
    MOCK = "mock-sig"
    DILITHIUM3 = "dilithium3-class"


class CryptoError(Exception):
    """Base class for provider failures."""


class UnsupportedSchemeError(CryptoError):
    """Requested scheme has no registered provider."""


class MalformedKeyError(CryptoError):
    """Key material does not match the provider's layout."""


class DecapsulationError(CryptoError):
    """Ciphertext rejected during decapsulation (mock: explicit failure)."""


@dataclass(frozen=True)
class KeyPair:
    public_key: bytes
    private_key: bytes
    scheme_id: SchemeId


@dataclass(frozen=True)
class Signature:
    bytes: bytes  # noqa: A003 - field name fixed by the wire format docs
    scheme_id: SchemeId


@dataclass(frozen=True)
class SessionKey:
    secret: bytes
    peer_ids: tuple[str, str]

    def __post_init__(self) -> None:
        if len(self.secret) != SESSION_KEY_LEN:
            raise CryptoError(f"session key must be {SESSION_KEY_LEN} bytes")


def hash_bytes(data: bytes) -> bytes:
    """Canonical 32-byte digest used everywhere in the ledger (SHA-256)."""
    return hashlib.sha256(data).digest()


def _le64(value: int) -> bytes:
    return int(value).to_bytes(8, "little", signed=False)


class MockProvider:
    """Deterministic keyed-hash signature + KEM stand-in.

    decaps() on a corrupted ciphertext raises DecapsulationError (explicit
    failure, not implicit rejection).
    """

    scheme_id = SchemeId.MOCK
    public_key_len = MOCK_PUBLIC_LEN
    signature_len = MOCK_SIGNATURE_LEN

    def keygen(self, seed: int) -> KeyPair:
        sk = hashlib.sha256(b"uav-mock-sk" + _le64(seed)).digest()
        return KeyPair(public_key=_MOCK_PK_TAG + sk, private_key=sk,
                       scheme_id=self.scheme_id)

    def sign(self, private_key: bytes, message_hash: bytes) -> Signature:
        if len(private_key) != MOCK_PRIVATE_LEN:
            raise MalformedKeyError("mock private key must be 32 bytes")
        if len(message_hash) != DIGEST_LEN:
            raise CryptoError(f"message hash must be {DIGEST_LEN} bytes")
        t1 = hmac.new(private_key, b"sig1" + message_hash, hashlib.sha256).digest()
        t2 = hmac.new(private_key, b"sig2" + message_hash, hashlib.sha256).digest()
        return Signature(bytes=t1 + t2, scheme_id=self.scheme_id)

    def verify(self, message_hash: bytes, signature: Signature,
               public_key: bytes) -> bool:
        # Total by contract: any malformed input yields False, never an error.
        if not isinstance(signature, Signature):
            return False
        if len(message_hash) != DIGEST_LEN:
            return False
        if len(signature.bytes) != MOCK_SIGNATURE_LEN:
            return False
        if len(public_key) != MOCK_PUBLIC_LEN or not public_key.startswith(_MOCK_PK_TAG):
            return False
        sk = public_key[len(_MOCK_PK_TAG):]
        expected = self.sign(sk, message_hash)
        return hmac.compare_digest(expected.bytes, signature.bytes)

    def encaps(self, public_key: bytes, randomness_seed: int,
               peer_ids: tuple[str, str] = ("", "")) -> tuple[bytes, SessionKey]:
        if len(public_key) != MOCK_PUBLIC_LEN or not public_key.startswith(_MOCK_PK_TAG):
            raise MalformedKeyError("not a mock public key")
        sk = public_key[len(_MOCK_PK_TAG):]
        eph = hashlib.sha256(b"uav-mock-eph" + _le64(randomness_seed)).digest()
        tag = hmac.new(sk, b"kem" + eph, hashlib.sha256).digest()[:16]
        secret = hashlib.sha256(b"uav-mock-ss" + sk + eph).digest()
        return eph + tag, SessionKey(secret=secret, peer_ids=peer_ids)

    def decaps(self, private_key: bytes, ciphertext: bytes,
               peer_ids: tuple[str, str] = ("", "")) -> SessionKey:
        if len(private_key) != MOCK_PRIVATE_LEN:
            raise MalformedKeyError("mock private key must be 32 bytes")
        if len(ciphertext) != MOCK_CIPHERTEXT_LEN:
            raise DecapsulationError("ciphertext length mismatch")
        eph, tag = ciphertext[:32], ciphertext[32:]
        expected = hmac.new(private_key, b"kem" + eph, hashlib.sha256).digest()[:16]
        if not hmac.compare_digest(expected, tag):
            raise DecapsulationError("ciphertext integrity check failed")
        secret = hashlib.sha256(b"uav-mock-ss" + private_key + eph).digest()
        return SessionKey(secret=secret, peer_ids=peer_ids)


_PROVIDERS: dict[str, object] = {SchemeId.MOCK.value: MockProvider()}


def register_provider(scheme: str, provider) -> None:
    """Install a backend for a scheme id (e.g. a real Dilithium-3 adapter)."""
    _PROVIDERS[str(scheme)] = provider


def get_provider(scheme: str):
    try:
        return _PROVIDERS[str(scheme)]
    except KeyError:
        raise UnsupportedSchemeError(f"no provider registered for {scheme!r}") from None
