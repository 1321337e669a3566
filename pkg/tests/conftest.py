from __future__ import annotations

import pytest
from hypothesis import settings

from accept.core import Genesis, Output, quorum_params
from accept.keyring import ValidatorKeyring, client_signing_key
from accept.schemes import merkle as merkle_scheme
from accept.validator import SignRequest, Validator, ValidatorConfig

settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile("ci")

_KEYRING_CACHE: dict[int, ValidatorKeyring] = {}


def keyring_for(n: int) -> ValidatorKeyring:
    if n not in _KEYRING_CACHE:
        _KEYRING_CACHE[n] = ValidatorKeyring.generate(n, seed=b"test-keyring")
    return _KEYRING_CACHE[n]


@pytest.fixture(scope="session")
def ring4() -> ValidatorKeyring:
    return keyring_for(4)


@pytest.fixture(scope="session")
def ring7() -> ValidatorKeyring:
    return keyring_for(7)


@pytest.fixture
def params4():
    return quorum_params(4)


def make_clients(count: int, seed: bytes = b"test-clients"):
    return [client_signing_key(seed, i) for i in range(count)]


def make_genesis(owners, amount: int = 1000) -> Genesis:
    return Genesis([Output(amount, pk) for pk in owners])


def build_validators(
    ring: ValidatorKeyring,
    genesis: Genesis,
    scheme: str = "naive",
    shard_count: int = 1,
    spent_buckets: int = 1 << 10,
    merkle_batch_size: int = 8,
):
    """One in-process validator per index (single shard unless asked)."""
    validators = []
    for i in range(ring.params.n):
        for shard in range(shard_count):
            config = ValidatorConfig(
                validator_index=i,
                scheme=scheme,
                shard_index=shard,
                shard_count=shard_count,
                spent_buckets=spent_buckets,
                merkle_batch_size=merkle_batch_size,
            )
            validators.append(
                Validator(
                    ring.params,
                    config,
                    ring.ed_secrets[i],
                    ring.ed_pubkeys,
                    genesis,
                    bls_share=ring.bls.shares[i],
                    bls_master_public=ring.bls.master_public,
                )
            )
    return validators


def settle(request: SignRequest, validators, collector):
    """Local transport: feed the request to every validator, collect quorum."""
    for validator in validators:
        if validator.config.scheme == "merkle":
            box = []
            validator.submit(request, box.append)
            validator.flush_batch()
            resp = box[0]
        else:
            resp = validator.handle_sign_request(request)
        if collector.add_response(validator.config.validator_index, resp):
            break
    assert collector.is_complete(), "quorum not assembled"
    return collector.confirmations
