import hashlib
import random
import struct
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from accept import keys
from accept.core import (
    Genesis,
    InvalidParameter,
    Output,
    OutputId,
    Transaction,
    TxInput,
    decode_tx,
    encode_tx,
    encode_tx_body,
    quorum_params,
    sign_transaction,
    tx_digest,
    validate_stateless,
)

# Fixed test vector, constructed field by field below so expectations stay
# independent of the library's own encoder.
SRC = bytes(range(32))
OWNER_A = b"\x11" * 32
OWNER_B = b"\x22" * 32
TX_DIGEST_GOLDEN = "ca12b0cb5ace6f67f01891f2ffad1920f44d56fa520a3b6af548c2c8754e39c9"


def fixed_tx(signature: bytes = b"\x00" * 64) -> Transaction:
    return Transaction(
        inputs=(TxInput(OutputId(SRC, 7), Output(1000, OWNER_A)),),
        outputs=(Output(600, OWNER_B), Output(400, OWNER_A)),
        sender_signature=signature,
    )


def signed_tx(secret: keys.SigningKey, inputs, outputs) -> Transaction:
    return sign_transaction(secret, inputs, outputs)


class TestQuorumParams:
    def test_ten_validators(self):
        p = quorum_params(10)
        assert (p.f, p.quorum) == (3, 7)

    def test_four_validators(self):
        p = quorum_params(4)
        assert (p.f, p.quorum) == (1, 3)

    def test_single_validator(self):
        p = quorum_params(1)
        assert (p.f, p.quorum) == (0, 1)

    def test_zero_rejected(self):
        with pytest.raises(InvalidParameter):
            quorum_params(0)

    def test_quorum_never_exceeds_n(self):
        for n in range(1, 200):
            p = quorum_params(n)
            assert p.quorum <= p.n
            assert p.f == (n - 1) // 3


def test_quorum_intersection_exhaustive():
    # any two quorums out of n = 3f+1 share at least f+1 validators, hence
    # at least one correct validator when at most f are adversarial
    for f in range(1, 5):  # n = 4, 7, 10, 13
        n = 3 * f + 1
        p = quorum_params(n)
        quorums = [frozenset(c) for c in combinations(range(n), p.quorum)]
        worst = min(len(a & b) for a in quorums for b in quorums)
        assert worst >= f + 1


class TestEncoding:
    def test_layout_length(self):
        # version 1 + count 2 + input 74 + count 2 + two outputs 80 = 159
        assert len(encode_tx_body(fixed_tx())) == 159
        assert len(encode_tx(fixed_tx())) == 159 + 64

    def test_encoding_matches_layout_table(self):
        manual = b"\x01" + struct.pack("<H", 1)
        manual += SRC + struct.pack("<H", 7) + struct.pack("<Q", 1000) + OWNER_A
        manual += struct.pack("<H", 2)
        manual += struct.pack("<Q", 600) + OWNER_B
        manual += struct.pack("<Q", 400) + OWNER_A
        assert encode_tx_body(fixed_tx()) == manual

    def test_equal_transactions_encode_identically(self):
        assert encode_tx(fixed_tx()) == encode_tx(fixed_tx())

    def test_round_trip_random_transactions(self):
        rng = random.Random(1234)
        for _ in range(1000):
            n_in = rng.randint(1, 4)
            n_out = rng.randint(1, 4)
            tx = Transaction(
                inputs=tuple(
                    TxInput(
                        OutputId(rng.randbytes(32), rng.randint(0, 0xFFFF)),
                        Output(rng.randint(1, 2**60), rng.randbytes(32)),
                    )
                    for _ in range(n_in)
                ),
                outputs=tuple(
                    Output(rng.randint(1, 2**60), rng.randbytes(32)) for _ in range(n_out)
                ),
                sender_signature=rng.randbytes(64),
            )
            assert decode_tx(encode_tx(tx)) == tx


class TestDigest:
    def test_golden_vector(self):
        assert tx_digest(fixed_tx()).hex() == TX_DIGEST_GOLDEN

    def test_amount_change_changes_digest(self):
        base = fixed_tx()
        bumped = Transaction(
            base.inputs,
            (Output(601, OWNER_B), Output(399, OWNER_A)),
            base.sender_signature,
        )
        assert tx_digest(base) != tx_digest(bumped)

    def test_signature_excluded(self):
        assert tx_digest(fixed_tx(b"\x00" * 64)) == tx_digest(fixed_tx(b"\xff" * 64))

    def test_no_collisions_on_random_corpus(self):
        rng = random.Random(99)
        seen = set()
        for _ in range(2000):
            tx = Transaction(
                (TxInput(OutputId(rng.randbytes(32), 0), Output(1, OWNER_A)),),
                (Output(1, rng.randbytes(32)),),
                b"\x00" * 64,
            )
            seen.add(tx_digest(tx))
        assert len(seen) == 2000


class TestValidateStateless:
    def setup_method(self):
        self.secret = keys.SigningKey(b"\x07" * 32)
        self.owner = self.secret.public

    def _tx(self, in_amounts, out_amounts, sign_with=None, owners=None):
        owners = owners or [self.owner] * len(in_amounts)
        inputs = tuple(
            TxInput(OutputId(SRC, i), Output(a, owners[i])) for i, a in enumerate(in_amounts)
        )
        outputs = tuple(Output(a, OWNER_B) for a in out_amounts)
        return sign_transaction(sign_with or self.secret, inputs, outputs)

    def test_balanced_valid(self):
        assert validate_stateless(self._tx([100], [60, 40])) == []

    def test_unbalanced_off_by_one(self):
        codes = {v.code for v in validate_stateless(self._tx([100], [60, 41]))}
        assert codes == {"unbalanced"}

    def test_mixed_owners(self):
        other = keys.SigningKey(b"\x08" * 32).public
        tx = self._tx([50, 50], [100], owners=[self.owner, other])
        codes = {v.code for v in validate_stateless(tx)}
        assert "mixed-owners" in codes

    def test_bad_signature(self):
        wrong = keys.SigningKey(b"\x09" * 32)
        tx = self._tx([100], [100], sign_with=wrong)
        codes = {v.code for v in validate_stateless(tx)}
        assert codes == {"bad-signature"}

    def test_duplicate_input(self):
        inp = TxInput(OutputId(SRC, 1), Output(50, self.owner))
        tx = sign_transaction(self.secret, (inp, inp), (Output(100, OWNER_B),))
        codes = {v.code for v in validate_stateless(tx)}
        assert "duplicate-input" in codes

    def test_overflow_rejected(self):
        big = 2**63 + 1
        tx = self._tx([big, big], [big, big])
        codes = {v.code for v in validate_stateless(tx)}
        assert "overflow" in codes


@given(
    amounts=st.lists(st.integers(min_value=1, max_value=2**50), min_size=1, max_size=5),
    index=st.integers(min_value=0, max_value=0xFFFF),
)
def test_encode_decode_bijection(amounts, index):
    secret = keys.SigningKey(b"\x21" * 32)
    inputs = (TxInput(OutputId(SRC, index), Output(sum(amounts), secret.public)),)
    outputs = tuple(Output(a, OWNER_B) for a in amounts)
    tx = sign_transaction(secret, inputs, outputs)
    assert decode_tx(encode_tx(tx)) == tx


class TestOutputId:
    def test_key_form(self):
        oid = OutputId(SRC, 1)
        expected = hashlib.sha256(SRC + (1).to_bytes(2, "little")).digest()
        assert oid.key() == expected
        assert oid.key().hex() == "f111dba7ff399b0ec0f076b0859a035b8286d233517602d41a2dab7c7d1bbbca"

    def test_index_bounds(self):
        with pytest.raises(InvalidParameter):
            OutputId(SRC, 0x10000)


class TestGenesis:
    def test_digest_commits_to_entries(self):
        g1 = Genesis([Output(5, OWNER_A)])
        g2 = Genesis([Output(6, OWNER_A)])
        assert g1.digest != g2.digest
        assert g1.digest.startswith(b"") and len(g1.digest) == 32

    def test_prefix_in_preimage(self):
        entries = [Output(5, OWNER_A), Output(7, OWNER_B)]
        g = Genesis(entries)
        enc = (2).to_bytes(4, "little")
        for e in entries:
            enc += struct.pack("<Q32s", e.amount, e.owner)
        assert g.digest == hashlib.sha256(b"ACCEPT-GENESIS" + enc).digest()

    def test_output_ids_and_lookup(self):
        g = Genesis([Output(5, OWNER_A), Output(7, OWNER_B)])
        assert g.matches(g.output_id(1), Output(7, OWNER_B))
        assert not g.matches(g.output_id(1), Output(8, OWNER_B))
        assert not g.matches(OutputId(SRC, 1), Output(7, OWNER_B))
        assert g.total() == 12

    def test_json_round_trip(self, tmp_path):
        g = Genesis([Output(5, OWNER_A), Output(7, OWNER_B)])
        path = tmp_path / "genesis.json"
        path.write_text(g.to_json())
        loaded = Genesis.load(path)
        assert loaded.digest == g.digest
        assert loaded.entries == g.entries
