"""World builders shared by the simulator tests and the acceptance suite."""
from __future__ import annotations

from accept.client import Wallet
from accept.core import Genesis, Output
from accept.keyring import ValidatorKeyring, client_signing_key
from accept.simnet import (
    ByzantineSpec,
    ClientActor,
    DoubleSpendClientActor,
    SeededPolicy,
    SimWorld,
    build_validator_actors,
    trace_header,
    validator_names,
)

_RING_CACHE: dict[int, ValidatorKeyring] = {}
_CLIENT_CACHE: dict[int, object] = {}


def ring_for(n: int) -> ValidatorKeyring:
    if n not in _RING_CACHE:
        _RING_CACHE[n] = ValidatorKeyring.generate(n, seed=b"simworld")
    return _RING_CACHE[n]


def client_key(i: int):
    if i not in _CLIENT_CACHE:
        _CLIENT_CACHE[i] = client_signing_key(b"simworld-clients", i)
    return _CLIENT_CACHE[i]


def make_wallet(ring: ValidatorKeyring, secret, scheme: str) -> Wallet:
    return Wallet(
        secret,
        ring.params,
        scheme,
        ring.ed_pubkeys,
        bls_public_shares=ring.bls.public_shares,
        bls_master_public=ring.bls.master_public,
    )


def payment_world(
    n: int,
    policy,
    scheme: str = "naive",
    chain_length: int = 1,
    byzantine: ByzantineSpec | None = None,
    amount: int = 100,
):
    """client c0 pays c1, who pays c2, ... through `chain_length` hops."""
    ring = ring_for(n)
    client_keys = [client_key(i) for i in range(chain_length + 1)]
    genesis = Genesis([Output(amount, client_keys[0].public)])
    world = SimWorld(policy, trace_header(ring, genesis, scheme))
    names = validator_names(n)
    for name, actor in build_validator_actors(ring, genesis, scheme, byzantine).items():
        world.register(name, actor)
    clients = []
    for i, key in enumerate(client_keys):
        wallet = make_wallet(ring, key, scheme)
        if i == 0:
            wallet.claim_genesis(genesis)
        intents = []
        if i < chain_length:
            intents = [(f"c{i + 1}", client_keys[i + 1].public, amount)]
        actor = ClientActor(wallet, intents, names)
        world.register(f"c{i}", actor)
        clients.append(actor)
    return world, genesis, clients


def double_spend_world(
    n: int,
    policy,
    scheme: str = "naive",
    byzantine: ByzantineSpec | None = None,
    fanout: int = 2,
):
    """One adversarial client racing `fanout` conflicting spends of a single
    genesis output, optionally helped by byzantine validators."""
    ring = ring_for(n)
    spender = client_key(100)
    recipients = [client_key(101 + i).public for i in range(fanout)]
    genesis = Genesis([Output(100, spender.public)])
    world = SimWorld(policy, trace_header(ring, genesis, scheme))
    names = validator_names(n)
    for name, actor in build_validator_actors(ring, genesis, scheme, byzantine).items():
        world.register(name, actor)
    attacker = DoubleSpendClientActor(
        make_wallet(ring, spender, scheme), genesis, 0, recipients, names
    )
    world.register("attacker", attacker)
    return world, genesis, attacker


def default_byzantine(n: int, behavior: str = "sign-everything") -> ByzantineSpec | None:
    ring = ring_for(n)
    if ring.params.f == 0:
        return None
    return ByzantineSpec(tuple(range(ring.params.f)), behavior)


def collude_confirm_event(ring: ValidatorKeyring, tx, step: int = 10**6):
    """Forge a fully verifying confirm event by signing with every validator
    secret.  Cryptographically indistinguishable from a real confirmation:
    exactly what the auditors' negative controls need."""
    from accept.core import tx_digest
    from accept.schemes import Confirmation, output_claim_message
    from accept.schemes.naive import NaiveConfirmation, sign_naive
    from accept.simnet import TraceEvent

    digest = tx_digest(tx)
    confirmations = {}
    for j, out in enumerate(tx.outputs):
        claim = output_claim_message(digest, j, out)
        sigs = tuple(
            sign_naive(i, ring.ed_secrets[i], claim) for i in range(ring.params.quorum)
        )
        confirmations[j] = Confirmation("naive", NaiveConfirmation(sigs))
    return TraceEvent(
        step,
        "confirm",
        "forger",
        "forger",
        "Confirmation",
        {
            "digest": digest.hex(),
            "inputs": [
                {
                    "source_digest": inp.id.source_digest.hex(),
                    "index": inp.id.index,
                    "amount": inp.body.amount,
                    "owner": inp.body.owner.hex(),
                }
                for inp in tx.inputs
            ],
            "outputs": [
                {"index": j, "amount": out.amount, "owner": out.owner.hex()}
                for j, out in enumerate(tx.outputs)
            ],
            "confirmations": {str(j): c.encode().hex() for j, c in confirmations.items()},
        },
    )
