"""Baseline scheme: every validator signs every output claim individually.

Simple and stateless; the cost reference the batched schemes are
measured against.
"""
from __future__ import annotations

from dataclasses import dataclass

from accept import keys
from accept.core import SIG_LEN, SystemParams

WIRE_LEN = 2 + SIG_LEN


@dataclass(frozen=True)
class NaiveSignature:
    validator_index: int
    sig_bytes: bytes

    def encode(self) -> bytes:
        return self.validator_index.to_bytes(2, "little") + self.sig_bytes


def decode_signature(blob: bytes) -> NaiveSignature:
    if len(blob) != WIRE_LEN:
        raise ValueError("naive signature blob must be 66 bytes")
    return NaiveSignature(int.from_bytes(blob[:2], "little"), blob[2:])


@dataclass(frozen=True)
class NaiveConfirmation:
    """Signatures with strictly increasing validator indices, length >= quorum."""

    signatures: tuple[NaiveSignature, ...]


def encode_confirmation(conf: NaiveConfirmation) -> bytes:
    parts = [len(conf.signatures).to_bytes(2, "little")]
    parts += [sig.encode() for sig in conf.signatures]
    return b"".join(parts)


def decode_confirmation(blob: bytes) -> NaiveConfirmation:
    count = int.from_bytes(blob[:2], "little")
    if len(blob) != 2 + count * WIRE_LEN:
        raise ValueError("naive confirmation length mismatch")
    sigs = tuple(
        decode_signature(blob[2 + i * WIRE_LEN : 2 + (i + 1) * WIRE_LEN]) for i in range(count)
    )
    return NaiveConfirmation(sigs)


def sign_naive(validator_index: int, secret: keys.SigningKey, claim: bytes) -> NaiveSignature:
    return NaiveSignature(validator_index, secret.sign(claim))


def verify_naive(public: bytes, claim: bytes, sig: NaiveSignature) -> bool:
    return keys.verify(public, claim, sig.sig_bytes)


def verify_naive_batch(items) -> list[bool]:
    """Per-item verdicts for (public key, message, signature bytes) triples.

    Result is defined to be identical to verifying each item singly, which
    is also how it is computed: Ed25519 batch equations would need curve
    internals the OpenSSL binding does not expose, and a batch must never
    answer differently from the single-verification oracle anyway.
    """
    return [keys.verify(pk, msg, sig) for pk, msg, sig in items]


def verify_naive_confirmation(
    params: SystemParams,
    validator_pubkeys,
    claim: bytes,
    conf: NaiveConfirmation,
) -> bool:
    """True iff the confirmation carries >= quorum valid signatures from
    distinct validators.  Duplicate or out-of-order indices reject the
    whole confirmation; an index >= n is treated as invalid, not an error.
    """
    indices = [sig.validator_index for sig in conf.signatures]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        return False
    valid = 0
    for sig in conf.signatures:
        if sig.validator_index >= params.n:
            continue
        if verify_naive(validator_pubkeys[sig.validator_index], claim, sig):
            valid += 1
    return valid >= params.quorum
