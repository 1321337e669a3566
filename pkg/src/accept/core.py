"""Canonical data model shared by every other module.

Transactions move unspent outputs (amount, owner) between public keys.
Everything downstream — signing schemes, validators, clients, the
simulator — works on the byte-level encodings defined here, so this
module pins them exactly: little-endian integers, fixed field widths,
one SHA-256 everywhere.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

from accept import keys

HASH_LEN = 32
OWNER_LEN = 32
SIG_LEN = 64
TX_VERSION = 0x01
MAX_COUNT = 0xFFFF
MAX_AMOUNT = 0xFFFFFFFFFFFFFFFF

GENESIS_PREFIX = b"ACCEPT-GENESIS"

_INPUT = struct.Struct("<32sHQ32s")
_OUTPUT = struct.Struct("<Q32s")


class InvalidParameter(ValueError):
    pass


class EncodingError(ValueError):
    pass


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


@dataclass(frozen=True)
class SystemParams:
    """Validator-set arithmetic: n validators, at most f adversarial.

    quorum = 2f + 1 is the number of distinct validator signatures a
    confirmation must carry.  Any two quorums out of n = 3f + 1
    validators intersect in at least f + 1 validators, hence in at
    least one correct one.
    """

    n: int
    f: int
    quorum: int


def quorum_params(n: int) -> SystemParams:
    """Derive (f, quorum) for a validator count n ≥ 1."""
    if n < 1:
        raise InvalidParameter(f"validator count must be >= 1, got {n}")
    f = (n - 1) // 3
    return SystemParams(n=n, f=f, quorum=2 * f + 1)


@dataclass(frozen=True)
class Output:
    """An unspent transaction output: funds plus the key that may spend them."""

    amount: int
    owner: bytes

    def __post_init__(self) -> None:
        if not 0 < self.amount <= MAX_AMOUNT:
            raise InvalidParameter(f"output amount out of range: {self.amount}")
        if len(self.owner) != OWNER_LEN:
            raise InvalidParameter("owner must be a 32-byte public key")


@dataclass(frozen=True)
class OutputId:
    """Position of an output: digest of the creating transaction (or of
    genesis) plus the output index within it."""

    source_digest: bytes
    index: int

    def __post_init__(self) -> None:
        if len(self.source_digest) != HASH_LEN:
            raise InvalidParameter("source digest must be 32 bytes")
        if not 0 <= self.index <= MAX_COUNT:
            raise InvalidParameter(f"output index out of range: {self.index}")

    def key(self) -> bytes:
        """Canonical 32-byte key form; what a validator's spent set stores."""
        return sha256(self.source_digest + self.index.to_bytes(2, "little"))


@dataclass(frozen=True)
class TxInput:
    id: OutputId
    body: Output


@dataclass(frozen=True)
class Transaction:
    """A signed transfer.  Inputs and outputs must balance exactly and all
    inputs must belong to one key, which signs the transaction digest."""

    inputs: tuple[TxInput, ...]
    outputs: tuple[Output, ...]
    sender_signature: bytes

    def digest(self) -> bytes:
        return tx_digest(self)


def encode_tx_body(tx: Transaction) -> bytes:
    """Signature-excluded canonical encoding; the digest preimage.

    Layout (all integers little-endian):
    version 0x01 | input count u16 | per input: source digest 32B,
    index u16, amount u64, owner 32B | output count u16 |
    per output: amount u64, owner 32B.
    """
    if not tx.inputs or len(tx.inputs) > MAX_COUNT:
        raise EncodingError(f"input count out of range: {len(tx.inputs)}")
    if not tx.outputs or len(tx.outputs) > MAX_COUNT:
        raise EncodingError(f"output count out of range: {len(tx.outputs)}")
    parts = [bytes([TX_VERSION]), len(tx.inputs).to_bytes(2, "little")]
    for inp in tx.inputs:
        parts.append(
            _INPUT.pack(inp.id.source_digest, inp.id.index, inp.body.amount, inp.body.owner)
        )
    parts.append(len(tx.outputs).to_bytes(2, "little"))
    for out in tx.outputs:
        parts.append(_OUTPUT.pack(out.amount, out.owner))
    return b"".join(parts)


def encode_tx(tx: Transaction) -> bytes:
    """Wire encoding: canonical body followed by the 64-byte sender signature."""
    if len(tx.sender_signature) != SIG_LEN:
        raise EncodingError("sender signature must be 64 bytes")
    return encode_tx_body(tx) + tx.sender_signature


def decode_tx(data: bytes) -> Transaction:
    """Inverse of encode_tx.  Raises EncodingError on any malformed input."""
    try:
        if data[0] != TX_VERSION:
            raise EncodingError(f"unknown transaction version {data[0]:#x}")
        pos = 1
        n_in = int.from_bytes(data[pos : pos + 2], "little")
        pos += 2
        inputs = []
        for _ in range(n_in):
            digest, index, amount, owner = _INPUT.unpack_from(data, pos)
            pos += _INPUT.size
            inputs.append(TxInput(OutputId(digest, index), Output(amount, owner)))
        n_out = int.from_bytes(data[pos : pos + 2], "little")
        pos += 2
        outputs = []
        for _ in range(n_out):
            amount, owner = _OUTPUT.unpack_from(data, pos)
            pos += _OUTPUT.size
            outputs.append(Output(amount, owner))
        signature = data[pos : pos + SIG_LEN]
        if len(signature) != SIG_LEN or pos + SIG_LEN != len(data):
            raise EncodingError("transaction truncated or trailing bytes")
        if n_in == 0 or n_out == 0:
            raise EncodingError("empty inputs or outputs")
        return Transaction(tuple(inputs), tuple(outputs), signature)
    except (struct.error, IndexError, InvalidParameter) as exc:
        raise EncodingError(f"malformed transaction: {exc}") from exc


def tx_digest(tx: Transaction) -> bytes:
    """SHA-256 over the signature-excluded canonical encoding."""
    return sha256(encode_tx_body(tx))


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""


def validate_stateless(tx: Transaction) -> list[Violation]:
    """All checks possible without validator state.  Empty list means valid.

    Codes: empty-inputs, empty-outputs, duplicate-input, zero-amount,
    overflow, unbalanced, mixed-owners, bad-signature.  Violations
    accumulate; callers never have to probe for absence.
    """
    violations = []
    if not tx.inputs:
        violations.append(Violation("empty-inputs"))
    if not tx.outputs:
        violations.append(Violation("empty-outputs"))
    if len({inp.id for inp in tx.inputs}) != len(tx.inputs):
        # the same output listed twice would count its amount twice
        violations.append(Violation("duplicate-input"))
    for out in list(tx.outputs) + [inp.body for inp in tx.inputs]:
        if out.amount <= 0:
            violations.append(Violation("zero-amount"))
            break
    in_sum = sum(inp.body.amount for inp in tx.inputs)
    out_sum = sum(out.amount for out in tx.outputs)
    if in_sum > MAX_AMOUNT or out_sum > MAX_AMOUNT:
        violations.append(Violation("overflow", f"sum {max(in_sum, out_sum)} exceeds u64"))
    elif tx.inputs and tx.outputs and in_sum != out_sum:
        violations.append(Violation("unbalanced", f"inputs {in_sum} != outputs {out_sum}"))
    owners = {inp.body.owner for inp in tx.inputs}
    if len(owners) > 1:
        violations.append(Violation("mixed-owners", f"{len(owners)} distinct input owners"))
    if tx.inputs and len(owners) == 1:
        sender = next(iter(owners))
        try:
            digest = tx_digest(tx)
        except EncodingError as exc:
            violations.append(Violation("bad-signature", f"unencodable: {exc}"))
        else:
            if not keys.verify(sender, digest, tx.sender_signature):
                violations.append(Violation("bad-signature"))
    return violations


def sign_transaction(secret: keys.SigningKey, inputs, outputs) -> Transaction:
    """Assemble and sign a transaction whose inputs are owned by `secret`."""
    unsigned = Transaction(tuple(inputs), tuple(outputs), b"\x00" * SIG_LEN)
    return Transaction(unsigned.inputs, unsigned.outputs, secret.sign(tx_digest(unsigned)))


class Genesis:
    """The fixed initial output set from which all funds originate.

    The digest commits to the ordered entries; entry i is addressable as
    OutputId(digest, i), sharing the id namespace with transaction outputs.
    """

    def __init__(self, entries: tuple[Output, ...] | list[Output]):
        if len(entries) > MAX_COUNT + 1:
            raise InvalidParameter("genesis limited to 65536 entries (u16 output index)")
        self.entries: tuple[Output, ...] = tuple(entries)
        enc = [len(self.entries).to_bytes(4, "little")]
        enc += [_OUTPUT.pack(e.amount, e.owner) for e in self.entries]
        self.digest: bytes = sha256(GENESIS_PREFIX + b"".join(enc))

    def output_id(self, index: int) -> OutputId:
        return OutputId(self.digest, index)

    def total(self) -> int:
        return sum(e.amount for e in self.entries)

    def matches(self, oid: OutputId, body: Output) -> bool:
        """True iff (oid, body) is exactly one of the genesis entries."""
        return (
            oid.source_digest == self.digest
            and oid.index < len(self.entries)
            and self.entries[oid.index] == body
        )

    def to_json(self) -> str:
        return json.dumps(
            [{"amount": str(e.amount), "owner": e.owner.hex()} for e in self.entries],
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> Genesis:
        raw = json.loads(text)
        entries = [Output(int(item["amount"]), bytes.fromhex(item["owner"])) for item in raw]
        return cls(entries)

    @classmethod
    def load(cls, path) -> Genesis:
        with open(path) as fh:
            return cls.from_json(fh.read())
