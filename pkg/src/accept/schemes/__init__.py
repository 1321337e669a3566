"""Signature schemes and the confirmation container they share.

A confirmation proves that a quorum of distinct validators signed one
output claim.  Three interchangeable schemes produce them:

- naive: one Ed25519 signature per validator per output,
- merkle: validators sign batched tree roots, outputs carry inclusion paths,
- bls: threshold shares aggregate into a single constant-size signature.

All three sign the same 73-byte output claim message, so confirmations
are comparable across schemes and the validator pipeline is scheme-blind.
"""
from __future__ import annotations

from dataclasses import dataclass

from accept.core import HASH_LEN, Output, OutputId, SystemParams

SCHEMES = ("naive", "merkle", "bls")

CLAIM_PREFIX = 0x4F
CLAIM_LEN = 1 + 32 + 8 + 32

_TAGS = {"naive": 0, "merkle": 1, "bls": 2}
_NAMES = {v: k for k, v in _TAGS.items()}


def output_claim_message(tx_digest: bytes, index: int, output: Output) -> bytes:
    """The exact byte string validators sign for one output of one transaction.

    0x4F | OutputId key form (32B) | amount u64 LE | owner (32B); 73 bytes.
    """
    oid = OutputId(tx_digest, index)
    return (
        bytes([CLAIM_PREFIX])
        + oid.key()
        + output.amount.to_bytes(8, "little")
        + output.owner
    )


@dataclass(frozen=True)
class Confirmation:
    """Scheme-tagged quorum proof for a single output claim."""

    scheme: str
    payload: object

    def encode(self) -> bytes:
        from accept.schemes import bls, merkle, naive

        tag = bytes([_TAGS[self.scheme]])
        if self.scheme == "naive":
            return tag + naive.encode_confirmation(self.payload)
        if self.scheme == "merkle":
            return tag + merkle.encode_confirmation(self.payload)
        return tag + bls.encode_confirmation(self.payload)


def decode_confirmation(blob: bytes) -> Confirmation:
    from accept.schemes import bls, merkle, naive

    if not blob:
        raise ValueError("empty confirmation blob")
    name = _NAMES.get(blob[0])
    if name is None:
        raise ValueError(f"unknown confirmation tag {blob[0]:#x}")
    body = blob[1:]
    if name == "naive":
        return Confirmation("naive", naive.decode_confirmation(body))
    if name == "merkle":
        return Confirmation("merkle", merkle.decode_confirmation(body))
    return Confirmation("bls", bls.decode_confirmation(body))


def verify_confirmation(
    params: SystemParams,
    validator_pubkeys,
    master_pubkey,
    claim: bytes,
    conf: Confirmation,
    root_cache=None,
) -> bool:
    """Scheme dispatch for confirmation verification.

    validator_pubkeys: per-validator Ed25519 keys (naive and merkle);
    master_pubkey: the threshold master key (bls); either may be None
    when the corresponding scheme is not in use.
    """
    from accept.schemes import bls, merkle, naive

    if conf.scheme == "naive":
        return naive.verify_naive_confirmation(params, validator_pubkeys, claim, conf.payload)
    if conf.scheme == "merkle":
        return merkle.verify_merkle_confirmation(
            params, validator_pubkeys, claim, conf.payload, cache=root_cache
        )
    if conf.scheme == "bls":
        return master_pubkey is not None and bls.verify_master(master_pubkey, claim, conf.payload)
    return False
