"""Key material for a whole validator set, derivable from one seed.

Production deployments would provision keys out of band; simulations,
benchmarks, and the setup CLI need the same material reproducibly on
every run, so everything derives from a seed here.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from accept import keys
from accept.core import SystemParams, quorum_params, sha256
from accept.schemes import bls as bls_scheme


@dataclass(frozen=True)
class ValidatorKeyring:
    params: SystemParams
    ed_secrets: tuple[keys.SigningKey, ...]
    ed_pubkeys: tuple[bytes, ...]
    bls: bls_scheme.BlsKeyMaterial

    @classmethod
    def generate(cls, n: int, seed: bytes = b"") -> "ValidatorKeyring":
        params = quorum_params(n)
        secrets = tuple(
            keys.SigningKey(sha256(seed + b"validator-ed25519" + i.to_bytes(4, "little")))
            for i in range(n)
        )
        material = bls_scheme.trusted_keygen(params, seed + b"validator-bls")
        return cls(params, secrets, tuple(s.public for s in secrets), material)

    def public_directory(self) -> dict:
        """The JSON-serializable public half, distributed to all clients."""
        return {
            "n": self.params.n,
            "f": self.params.f,
            "quorum": self.params.quorum,
            "ed25519": [pk.hex() for pk in self.ed_pubkeys],
            "bls_master": self.bls.master_public.hex(),
            "bls_shares": [pk.hex() for pk in self.bls.public_shares],
        }


def client_signing_key(seed: bytes, index: int) -> keys.SigningKey:
    return keys.SigningKey(sha256(seed + b"client-ed25519" + index.to_bytes(4, "little")))


def save_directory(path, directory: dict) -> None:
    with open(path, "w") as fh:
        json.dump(directory, fh, indent=2)


def load_directory(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
