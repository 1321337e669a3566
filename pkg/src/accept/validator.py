"""Validator pipeline: verify, mark spent, sign.

Validators never talk to each other.  Each one checks a submitted
transaction and its input confirmations, atomically records the inputs
as spent under the transaction's digest, and returns signatures over the
outputs in whichever scheme it is configured for.  A validator may be
sharded over several processes; each shard owns the clients whose public
keys hash to it.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from accept import keys
from accept.core import (
    Genesis,
    Output,
    SystemParams,
    Transaction,
    Violation,
    decode_tx,
    encode_tx,
    sha256,
    tx_digest,
    validate_stateless,
)
from accept.schemes import Confirmation, decode_confirmation, output_claim_message
from accept.schemes import bls as bls_scheme
from accept.schemes import merkle as merkle_scheme
from accept.schemes import naive as naive_scheme
from accept.spentset import SpentSet

OK = "ok"
BAD_STATELESS = "bad-stateless"
BAD_CONFIRMATION = "bad-confirmation"
DOUBLE_SPEND = "double-spend"
WRONG_SHARD = "wrong-shard"

_STATUS_CODES = {OK: 0, BAD_STATELESS: 1, BAD_CONFIRMATION: 2, DOUBLE_SPEND: 3, WRONG_SHARD: 4}
_STATUS_NAMES = {v: k for k, v in _STATUS_CODES.items()}

_DIGEST_STRIPES = 256


def shard_of(owner: bytes, shard_count: int) -> int:
    """Shard index of a client key: low 8 bytes of its hash, mod shard count.

    Deterministic and computable by anyone, so clients can route their own
    requests."""
    if shard_count < 1:
        raise ValueError("shard count must be >= 1")
    return int.from_bytes(sha256(owner)[:8], "little") % shard_count


@dataclass(frozen=True)
class SignRequest:
    tx: Transaction
    confirmations: tuple[Confirmation | None, ...]  # aligned with tx.inputs; None = genesis

    def __post_init__(self):
        if len(self.confirmations) != len(self.tx.inputs):
            raise ValueError("one confirmation slot per input required")


@dataclass(frozen=True)
class SignResponse:
    status: str
    tx_digest: bytes
    signatures: tuple | None = None  # per-output scheme signatures when status == ok
    violations: tuple[Violation, ...] = ()
    input_index: int | None = None
    conflicting_digest: bytes | None = None


@dataclass
class ValidatorConfig:
    validator_index: int
    scheme: str = "naive"
    shard_index: int = 0
    shard_count: int = 1
    merkle_batch_size: int = merkle_scheme.DEFAULT_BATCH_SIZE
    flush_interval: float = merkle_scheme.DEFAULT_FLUSH_INTERVAL
    spent_buckets: int = 1 << 16


class Validator:
    """One validator shard.  handle_sign_request / submit are safe for
    unrestricted concurrent use; shared mutable state is the spent set, the
    merkle batch accumulator, and the root cache, each internally
    synchronized.

    Identical-digest requests are serialized on a striped lock: the
    insert-then-rollback protocol is atomic per input but a retry of the
    same transaction racing a conflicting rollback could otherwise strand
    a signed transaction with unmarked inputs.
    """

    def __init__(
        self,
        params: SystemParams,
        config: ValidatorConfig,
        secret: keys.SigningKey,
        validator_pubkeys,
        genesis: Genesis,
        bls_share: int | None = None,
        bls_master_public: bytes | None = None,
        root_cache: merkle_scheme.RootCache | None = None,
        spent_set: SpentSet | None = None,
    ):
        if config.scheme not in ("naive", "merkle", "bls"):
            raise ValueError(f"unknown scheme {config.scheme!r}")
        if config.scheme == "bls" and (bls_share is None or bls_master_public is None):
            raise ValueError("bls scheme requires a key share and the master public key")
        self.params = params
        self.config = config
        self.secret = secret
        self.validator_pubkeys = tuple(validator_pubkeys)
        self.genesis = genesis
        self.bls_share = bls_share
        self.bls_master_public = bls_master_public
        self.root_cache = root_cache or merkle_scheme.RootCache()
        self.spent = spent_set if spent_set is not None else SpentSet(buckets=config.spent_buckets)
        self.batch = merkle_scheme.BatchAccumulator(
            config.validator_index, secret, config.merkle_batch_size
        )
        self._digest_locks = [threading.Lock() for _ in range(_DIGEST_STRIPES)]

    # -- pipeline ---------------------------------------------------------

    def submit(self, request: SignRequest, respond) -> None:
        """Run the pipeline; `respond` is called exactly once with the
        SignResponse (immediately, or at batch flush for the merkle scheme)."""
        tx = request.tx
        violations = validate_stateless(tx)
        if violations:
            respond(SignResponse(BAD_STATELESS, b"\x00" * 32, violations=tuple(violations)))
            return
        digest = tx_digest(tx)
        owner = tx.inputs[0].body.owner
        if shard_of(owner, self.config.shard_count) != self.config.shard_index:
            respond(SignResponse(WRONG_SHARD, digest))
            return
        for i, inp in enumerate(tx.inputs):
            if not self._input_confirmed(inp.id, inp.body, request.confirmations[i]):
                respond(SignResponse(BAD_CONFIRMATION, digest, input_index=i))
                return
        conflict = self._mark_spent(tx, digest)
        if conflict is not None:
            index, existing = conflict
            respond(
                SignResponse(DOUBLE_SPEND, digest, input_index=index, conflicting_digest=existing)
            )
            return
        self._sign_outputs(tx, digest, respond)

    def handle_sign_request(self, request: SignRequest) -> SignResponse:
        """Synchronous wrapper; forces a batch flush when the merkle scheme
        would otherwise leave the response pending."""
        box: list[SignResponse] = []
        self.submit(request, box.append)
        if not box:
            self.flush_batch()
        return box[0]

    def flush_batch(self) -> int:
        return self.batch.flush()

    def batch_pending(self) -> int:
        return self.batch.pending_count()

    # -- stages ------------------------------------------------------------

    def _input_confirmed(self, oid, body: Output, conf: Confirmation | None) -> bool:
        if oid.source_digest == self.genesis.digest:
            return self.genesis.matches(oid, body)
        if conf is None or conf.scheme != self.config.scheme:
            return False
        claim = output_claim_message(oid.source_digest, oid.index, body)
        return self.verify_input_confirmation(claim, conf)

    def verify_input_confirmation(self, claim: bytes, conf: Confirmation) -> bool:
        from accept.schemes import verify_confirmation

        return verify_confirmation(
            self.params,
            self.validator_pubkeys,
            self.bls_master_public,
            claim,
            conf,
            root_cache=self.root_cache,
        )

    def _mark_spent(self, tx: Transaction, digest: bytes):
        """Mark every input spent by `digest`, in ascending key order.

        On a conflict, this request's own fresh inserts are rolled back so a
        rejected transaction leaves no residue.  Returns None on success or
        (input index, conflicting digest)."""
        ordered = sorted(range(len(tx.inputs)), key=lambda i: tx.inputs[i].id.key())
        lock = self._digest_locks[digest[0] % _DIGEST_STRIPES]
        with lock:
            inserted: list[bytes] = []
            for i in ordered:
                key = tx.inputs[i].id.key()
                fresh, current = self.spent.insert_if_absent(key, digest)
                if fresh:
                    inserted.append(key)
                elif current != digest:
                    for key_to_undo in inserted:
                        self.spent.remove_if_value(key_to_undo, digest)
                    return i, current
            return None

    def _sign_outputs(self, tx: Transaction, digest: bytes, respond) -> None:
        claims = [
            output_claim_message(digest, j, out) for j, out in enumerate(tx.outputs)
        ]
        if self.config.scheme == "naive":
            sigs = tuple(
                naive_scheme.sign_naive(self.config.validator_index, self.secret, claim)
                for claim in claims
            )
            respond(SignResponse(OK, digest, signatures=sigs))
        elif self.config.scheme == "bls":
            sigs = tuple(
                bls_scheme.sign_share(self.config.validator_index, self.bls_share, claim)
                for claim in claims
            )
            respond(SignResponse(OK, digest, signatures=sigs))
        else:
            self.batch.submit(
                claims,
                lambda sigs: respond(SignResponse(OK, digest, signatures=tuple(sigs))),
            )


# -- wire format -----------------------------------------------------------
# Request: u32 tx length | tx wire bytes | per input: u32 blob length
# (0 for genesis inputs) | confirmation blob.
# Response: status byte | 32B tx digest | status-specific payload.


def encode_sign_request(request: SignRequest) -> bytes:
    tx_wire = encode_tx(request.tx)
    parts = [len(tx_wire).to_bytes(4, "little"), tx_wire]
    for conf in request.confirmations:
        blob = conf.encode() if conf is not None else b""
        parts.append(len(blob).to_bytes(4, "little"))
        parts.append(blob)
    return b"".join(parts)


def decode_sign_request(data: bytes) -> SignRequest:
    tx_len = int.from_bytes(data[:4], "little")
    tx = decode_tx(data[4 : 4 + tx_len])
    pos = 4 + tx_len
    confirmations = []
    for _ in tx.inputs:
        blob_len = int.from_bytes(data[pos : pos + 4], "little")
        pos += 4
        if blob_len == 0:
            confirmations.append(None)
        else:
            confirmations.append(decode_confirmation(data[pos : pos + blob_len]))
            pos += blob_len
    if pos != len(data):
        raise ValueError("sign request trailing bytes")
    return SignRequest(tx, tuple(confirmations))


def _encode_scheme_signature(sig) -> bytes:
    return sig.encode()


def _decode_scheme_signature(scheme: str, blob: bytes):
    if scheme == "naive":
        return naive_scheme.decode_signature(blob)
    if scheme == "merkle":
        return merkle_scheme.decode_signature(blob)
    return bls_scheme.decode_share_signature(blob)


def encode_sign_response(resp: SignResponse) -> bytes:
    parts = [bytes([_STATUS_CODES[resp.status]]), resp.tx_digest]
    if resp.status == OK:
        sigs = resp.signatures or ()
        parts.append(len(sigs).to_bytes(2, "little"))
        for sig in sigs:
            blob = _encode_scheme_signature(sig)
            parts.append(len(blob).to_bytes(2, "little"))
            parts.append(blob)
    elif resp.status == BAD_STATELESS:
        parts.append(bytes([len(resp.violations)]))
        for violation in resp.violations:
            code = violation.code.encode()
            parts.append(bytes([len(code)]))
            parts.append(code)
    elif resp.status == BAD_CONFIRMATION:
        parts.append((resp.input_index or 0).to_bytes(2, "little"))
    elif resp.status == DOUBLE_SPEND:
        parts.append((resp.input_index or 0).to_bytes(2, "little"))
        parts.append(resp.conflicting_digest or b"\x00" * 32)
    return b"".join(parts)


def decode_sign_response(scheme: str, data: bytes) -> SignResponse:
    status = _STATUS_NAMES.get(data[0])
    if status is None:
        raise ValueError(f"unknown status byte {data[0]}")
    digest = data[1:33]
    pos = 33
    if status == OK:
        count = int.from_bytes(data[pos : pos + 2], "little")
        pos += 2
        sigs = []
        for _ in range(count):
            size = int.from_bytes(data[pos : pos + 2], "little")
            pos += 2
            sigs.append(_decode_scheme_signature(scheme, data[pos : pos + size]))
            pos += size
        return SignResponse(OK, digest, signatures=tuple(sigs))
    if status == BAD_STATELESS:
        count = data[pos]
        pos += 1
        violations = []
        for _ in range(count):
            size = data[pos]
            pos += 1
            violations.append(Violation(data[pos : pos + size].decode()))
            pos += size
        return SignResponse(BAD_STATELESS, digest, violations=tuple(violations))
    if status == BAD_CONFIRMATION:
        return SignResponse(
            BAD_CONFIRMATION, digest, input_index=int.from_bytes(data[pos : pos + 2], "little")
        )
    if status == DOUBLE_SPEND:
        index = int.from_bytes(data[pos : pos + 2], "little")
        return SignResponse(
            DOUBLE_SPEND, digest, input_index=index, conflicting_digest=data[pos + 2 : pos + 34]
        )
    return SignResponse(WRONG_SHARD, digest)
