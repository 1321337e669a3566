"""Ed25519 key handling, backed by the `cryptography` OpenSSL bindings.

Public keys travel as raw 32-byte strings everywhere in the protocol;
this module is the only place that touches key objects.
"""
from __future__ import annotations

import secrets

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)


class SigningKey:
    """An Ed25519 private key plus its cached raw public key."""

    __slots__ = ("_sk", "public", "_seed")

    def __init__(self, seed: bytes):
        if len(seed) != 32:
            raise ValueError("seed must be 32 bytes")
        self._seed = seed
        self._sk = Ed25519PrivateKey.from_private_bytes(seed)
        self.public = self._sk.public_key().public_bytes_raw()

    @classmethod
    def generate(cls) -> "SigningKey":
        return cls(secrets.token_bytes(32))

    def sign(self, message: bytes) -> bytes:
        return self._sk.sign(message)

    def seed_bytes(self) -> bytes:
        return self._seed


def verify(public: bytes, message: bytes, signature: bytes) -> bool:
    """True iff signature is valid; malformed inputs simply return False."""
    if len(public) != 32 or len(signature) != 64:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False
