"""Client side: wallets, transaction composition, confirmation assembly.

A wallet owns outputs it can prove: each one carries either genesis
provenance or a quorum confirmation.  Spending fans a sign request out
to every validator (the right shard of each), verifies every returned
signature individually, and assembles confirmations as soon as a quorum
of distinct validators has signed each output.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass

from accept import keys
from accept.core import Output, OutputId, SystemParams, Transaction, TxInput, sign_transaction
from accept.schemes import Confirmation, decode_confirmation, output_claim_message
from accept.schemes import bls as bls_scheme
from accept.schemes import merkle as merkle_scheme
from accept.schemes import naive as naive_scheme
from accept.validator import OK, SignRequest, SignResponse


class InsufficientFunds(Exception):
    pass


@dataclass(frozen=True)
class OwnedOutput:
    id: OutputId
    body: Output
    confirmation: Confirmation | None  # None = genesis provenance


class QuorumCollector:
    """Assembles per-output confirmations for one transaction.

    Every incoming signature is verified individually before it counts;
    invalid or duplicate responses are discarded and tallied against the
    responding validator.  Assembly is deterministic: the lowest quorum of
    validator indices is used, so any client that saw the same responses
    produces byte-identical confirmations.
    """

    def __init__(
        self,
        params: SystemParams,
        scheme: str,
        tx: Transaction,
        validator_pubkeys,
        bls_public_shares=None,
        bls_master_public: bytes | None = None,
        root_cache: merkle_scheme.RootCache | None = None,
    ):
        self.params = params
        self.scheme = scheme
        self.tx = tx
        self.digest = tx.digest()
        self.validator_pubkeys = validator_pubkeys
        self.bls_public_shares = bls_public_shares
        self.bls_master_public = bls_master_public
        self.root_cache = root_cache
        self.claims = [
            output_claim_message(self.digest, j, out) for j, out in enumerate(tx.outputs)
        ]
        self._sigs: list[dict[int, object]] = [{} for _ in tx.outputs]
        self.rejections: dict[int, SignResponse] = {}
        self.invalid_responses: dict[int, int] = {}
        self.confirmations: dict[int, Confirmation] | None = None

    def _verify_one(self, validator_index: int, claim: bytes, sig) -> bool:
        if getattr(sig, "validator_index", None) != validator_index:
            return False
        if self.scheme == "naive":
            return naive_scheme.verify_naive(
                self.validator_pubkeys[validator_index], claim, sig
            )
        if self.scheme == "merkle":
            return merkle_scheme.verify_merkle_sig(
                self.root_cache,
                self.validator_pubkeys[validator_index],
                validator_index,
                claim,
                sig,
            )
        return bls_scheme.verify_share(
            self.bls_public_shares[validator_index], claim, sig
        )

    def add_response(self, validator_index: int, resp: SignResponse) -> bool:
        """Feed one validator's response; True when this one completed the
        confirmation set."""
        if self.confirmations is not None:
            return False
        if resp.status != OK or resp.tx_digest != self.digest:
            if resp.status != OK:
                self.rejections[validator_index] = resp
            else:
                self.invalid_responses[validator_index] = (
                    self.invalid_responses.get(validator_index, 0) + 1
                )
            return False
        sigs = resp.signatures or ()
        if len(sigs) != len(self.claims):
            self.invalid_responses[validator_index] = (
                self.invalid_responses.get(validator_index, 0) + 1
            )
            return False
        for j, (claim, sig) in enumerate(zip(self.claims, sigs)):
            if validator_index in self._sigs[j]:
                continue
            if self._verify_one(validator_index, claim, sig):
                self._sigs[j][validator_index] = sig
            else:
                self.invalid_responses[validator_index] = (
                    self.invalid_responses.get(validator_index, 0) + 1
                )
        if all(len(bucket) >= self.params.quorum for bucket in self._sigs):
            self._assemble()
            return True
        return False

    def _assemble(self) -> None:
        confirmations = {}
        for j, bucket in enumerate(self._sigs):
            chosen = [bucket[i] for i in sorted(bucket)[: self.params.quorum]]
            if self.scheme == "naive":
                payload = naive_scheme.NaiveConfirmation(tuple(chosen))
            elif self.scheme == "merkle":
                payload = merkle_scheme.MerkleConfirmation(tuple(chosen))
            else:
                payload = bls_scheme.aggregate_master(self.params, chosen)
            confirmations[j] = Confirmation(self.scheme, payload)
        self.confirmations = confirmations

    def is_complete(self) -> bool:
        return self.confirmations is not None


class Wallet:
    """Holds a key pair and the provable outputs it owns.

    A wallet is one logical spender: submissions are serialized internally
    so it cannot race itself into a double spend.
    """

    def __init__(
        self,
        secret: keys.SigningKey,
        params: SystemParams,
        scheme: str,
        validator_pubkeys,
        bls_public_shares=None,
        bls_master_public: bytes | None = None,
        shard_counts=None,
    ):
        self.secret = secret
        self.public = secret.public
        self.params = params
        self.scheme = scheme
        self.validator_pubkeys = tuple(validator_pubkeys)
        self.bls_public_shares = bls_public_shares
        self.bls_master_public = bls_master_public
        self.shard_counts = shard_counts or {}
        self.owned: dict[bytes, OwnedOutput] = {}
        self._lock = threading.RLock()
        self.root_cache = merkle_scheme.RootCache() if scheme == "merkle" else None

    # -- funds ----------------------------------------------------------

    def balance(self) -> int:
        with self._lock:
            return sum(o.body.amount for o in self.owned.values())

    def claim_genesis(self, genesis) -> int:
        """Adopt every genesis entry owned by this wallet's key."""
        claimed = 0
        with self._lock:
            for i, entry in enumerate(genesis.entries):
                if entry.owner == self.public:
                    oid = genesis.output_id(i)
                    self.owned[oid.key()] = OwnedOutput(oid, entry, None)
                    claimed += 1
        return claimed

    def add_output(self, owned: OwnedOutput) -> None:
        with self._lock:
            self.owned[owned.id.key()] = owned

    def accept_payment(self, oid: OutputId, body: Output, conf: Confirmation) -> bool:
        """Verify and store an incoming payment; False on any failure."""
        from accept.schemes import verify_confirmation

        if body.owner != self.public:
            return False
        claim = output_claim_message(oid.source_digest, oid.index, body)
        if not verify_confirmation(
            self.params,
            self.validator_pubkeys,
            self.bls_master_public,
            claim,
            conf,
            root_cache=self.root_cache,
        ):
            return False
        self.add_output(OwnedOutput(oid, body, conf))
        return True

    # -- spending ---------------------------------------------------------

    def create_transaction(self, recipients) -> Transaction:
        """Compose and sign a payment to `recipients` [(owner, amount), ...].

        Inputs are selected largest-first; any excess comes back to this
        wallet as a change output.  The selected outputs stay in the wallet
        until apply_spend removes them, so failures leave funds intact.
        """
        total = sum(amount for _, amount in recipients)
        with self._lock:
            selected = self._select(total)
            inputs = tuple(TxInput(o.id, o.body) for o in selected)
            in_sum = sum(o.body.amount for o in selected)
            outputs = [Output(amount, owner) for owner, amount in recipients]
            if in_sum > total:
                outputs.append(Output(in_sum - total, self.public))
            return sign_transaction(self.secret, inputs, tuple(outputs))

    def _select(self, total: int):
        if total <= 0:
            raise InsufficientFunds("payment total must be positive")
        chosen = []
        acc = 0
        for owned in sorted(self.owned.values(), key=lambda o: o.body.amount, reverse=True):
            chosen.append(owned)
            acc += owned.body.amount
            if acc >= total:
                return chosen
        raise InsufficientFunds(f"balance {acc} < requested {total}")

    def request_for(self, tx: Transaction) -> SignRequest:
        """Attach stored confirmations (or genesis provenance) to a transaction."""
        with self._lock:
            confirmations = []
            for inp in tx.inputs:
                owned = self.owned.get(inp.id.key())
                confirmations.append(owned.confirmation if owned else None)
            return SignRequest(tx, tuple(confirmations))

    def collector_for(self, tx: Transaction) -> QuorumCollector:
        return QuorumCollector(
            self.params,
            self.scheme,
            tx,
            self.validator_pubkeys,
            bls_public_shares=self.bls_public_shares,
            bls_master_public=self.bls_master_public,
            root_cache=self.root_cache,
        )

    def apply_spend(self, tx: Transaction, confirmations: dict[int, Confirmation]) -> None:
        """Drop the spent inputs; adopt any change output with its confirmation."""
        digest = tx.digest()
        with self._lock:
            for inp in tx.inputs:
                self.owned.pop(inp.id.key(), None)
            for j, out in enumerate(tx.outputs):
                if out.owner == self.public:
                    oid = OutputId(digest, j)
                    self.owned[oid.key()] = OwnedOutput(oid, out, confirmations[j])

    def submit_and_collect(self, tx: Transaction, transport) -> dict[int, Confirmation]:
        """Fan the request out and gather confirmations for every output.

        `transport(validator_index, shard_index, request)` returns a
        SignResponse or None (unresponsive validator).  Completion needs a
        quorum of valid responses; with up to f validators silent or lying
        this still terminates because at least 2f+1 respond honestly.
        Failure is only ever external cancellation, matching an
        asynchronous network where no timeout can be trusted.
        """
        with self._lock:
            request = self.request_for(tx)
            collector = self.collector_for(tx)
            shard = shard_index_for(self.public, self.shard_counts)
            for validator_index in range(self.params.n):
                resp = transport(validator_index, shard.get(validator_index, 0), request)
                if resp is None:
                    continue
                if collector.add_response(validator_index, resp):
                    break
            if not collector.is_complete():
                raise ConfirmationIncomplete(collector)
            self.apply_spend(tx, collector.confirmations)
            return collector.confirmations

    # -- persistence --------------------------------------------------------

    def save(self, path) -> None:
        with self._lock:
            state = {
                "version": 1,
                "seed": self.secret.seed_bytes().hex(),
                "scheme": self.scheme,
                "outputs": [
                    {
                        "source_digest": o.id.source_digest.hex(),
                        "index": o.id.index,
                        "amount": str(o.body.amount),
                        "owner": o.body.owner.hex(),
                        "confirmation": o.confirmation.encode().hex() if o.confirmation else None,
                    }
                    for o in self.owned.values()
                ],
            }
        with open(path, "w") as fh:
            json.dump(state, fh, indent=2)

    def load_outputs(self, path) -> int:
        with open(path) as fh:
            state = json.load(fh)
        if state.get("version") != 1:
            raise ValueError("unsupported wallet file version")
        count = 0
        with self._lock:
            for item in state["outputs"]:
                oid = OutputId(bytes.fromhex(item["source_digest"]), item["index"])
                body = Output(int(item["amount"]), bytes.fromhex(item["owner"]))
                conf = (
                    decode_confirmation(bytes.fromhex(item["confirmation"]))
                    if item["confirmation"]
                    else None
                )
                self.owned[oid.key()] = OwnedOutput(oid, body, conf)
                count += 1
        return count


class ConfirmationIncomplete(Exception):
    """Raised when the transport ran out of validators before quorum.

    The protocol itself never times out; this surfaces only when a finite
    transport (a test harness, a CLI with a retry budget) gives up.
    """

    def __init__(self, collector: QuorumCollector):
        self.collector = collector
        super().__init__("quorum not reached with available responses")


def shard_index_for(owner: bytes, shard_counts: dict[int, int]) -> dict[int, int]:
    """Shard routing for one client key: validator index -> shard index."""
    from accept.validator import shard_of

    return {v: shard_of(owner, count) for v, count in shard_counts.items()}


# -- transfer bundle ---------------------------------------------------------
# What a payer hands the payee: output id | body | confirmation blob.


def encode_transfer_bundle(oid: OutputId, body: Output, conf: Confirmation) -> bytes:
    blob = conf.encode()
    return (
        oid.source_digest
        + oid.index.to_bytes(2, "little")
        + body.amount.to_bytes(8, "little")
        + body.owner
        + len(blob).to_bytes(4, "little")
        + blob
    )


def decode_transfer_bundle(data: bytes):
    oid = OutputId(data[:32], int.from_bytes(data[32:34], "little"))
    body = Output(int.from_bytes(data[34:42], "little"), data[42:74])
    blob_len = int.from_bytes(data[74:78], "little")
    blob = data[78 : 78 + blob_len]
    if 78 + blob_len != len(data):
        raise ValueError("transfer bundle trailing bytes")
    return oid, body, decode_confirmation(blob)
