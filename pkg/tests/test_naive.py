import random

from accept import keys
from accept.core import Output, quorum_params
from accept.schemes import output_claim_message
from accept.schemes.naive import (
    NaiveConfirmation,
    NaiveSignature,
    decode_confirmation,
    encode_confirmation,
    sign_naive,
    verify_naive,
    verify_naive_batch,
    verify_naive_confirmation,
)

DIGEST = bytes(range(32))
CLAIM_GOLDEN = (
    "4ff111dba7ff399b0ec0f076b0859a035b8286d233517602d41a2dab7c7d1bbbca"
    "58020000000000002222222222222222222222222222222222222222222222222222222222222222"
)


def make_keys(n):
    return [keys.SigningKey(bytes([i + 1]) * 32) for i in range(n)]


class TestClaimMessage:
    def test_length_is_73(self):
        claim = output_claim_message(DIGEST, 0, Output(1, b"\x01" * 32))
        assert len(claim) == 73

    def test_differs_by_index(self):
        out = Output(10, b"\x01" * 32)
        assert output_claim_message(DIGEST, 0, out) != output_claim_message(DIGEST, 1, out)

    def test_golden_vector(self):
        claim = output_claim_message(DIGEST, 1, Output(600, b"\x22" * 32))
        assert claim.hex() == CLAIM_GOLDEN


class TestSignVerify:
    def test_round_trip(self):
        sk = make_keys(1)[0]
        claim = output_claim_message(DIGEST, 0, Output(5, b"\x03" * 32))
        sig = sign_naive(0, sk, claim)
        assert verify_naive(sk.public, claim, sig)

    def test_wrong_key_fails(self):
        sk, other = make_keys(2)
        claim = b"m" * 73
        assert not verify_naive(other.public, claim, sign_naive(0, sk, claim))

    def test_flipped_bit_fails(self):
        sk = make_keys(1)[0]
        claim = bytearray(b"m" * 73)
        sig = sign_naive(0, sk, bytes(claim))
        claim[10] ^= 1
        assert not verify_naive(sk.public, bytes(claim), sig)


class TestBatchVerify:
    def test_all_valid(self):
        sk = make_keys(1)[0]
        items = []
        for i in range(64):
            msg = bytes([i]) * 73
            items.append((sk.public, msg, sk.sign(msg)))
        assert verify_naive_batch(items) == [True] * 64

    def test_single_corruption_isolated(self):
        rng = random.Random(7)
        sk = make_keys(1)[0]
        items = []
        for i in range(64):
            msg = bytes([i]) * 73
            items.append([sk.public, msg, sk.sign(msg)])
        bad = rng.randrange(64)
        sig = bytearray(items[bad][2])
        sig[5] ^= 0x40
        items[bad][2] = bytes(sig)
        # oracle: one verification at a time
        oracle = [keys.verify(pk, m, s) for pk, m, s in items]
        got = verify_naive_batch([tuple(i) for i in items])
        assert got == oracle
        assert got.count(False) == 1 and not got[bad]

    def test_empty(self):
        assert verify_naive_batch([]) == []


class TestConfirmation:
    def setup_method(self):
        self.params = quorum_params(4)
        self.keys = make_keys(4)
        self.pubs = [k.public for k in self.keys]
        self.claim = output_claim_message(DIGEST, 0, Output(9, b"\x04" * 32))

    def _sigs(self, indices):
        return tuple(sign_naive(i, self.keys[i], self.claim) for i in indices)

    def test_quorum_met(self):
        conf = NaiveConfirmation(self._sigs([0, 1, 3]))
        assert verify_naive_confirmation(self.params, self.pubs, self.claim, conf)

    def test_below_quorum(self):
        conf = NaiveConfirmation(self._sigs([0, 3]))
        assert not verify_naive_confirmation(self.params, self.pubs, self.claim, conf)

    def test_duplicate_index_rejected(self):
        s0, s1, _ = self._sigs([0, 1, 2])
        conf = NaiveConfirmation((s0, s1, s1))
        assert not verify_naive_confirmation(self.params, self.pubs, self.claim, conf)

    def test_out_of_range_index_is_false_not_error(self):
        good = self._sigs([0, 1])
        rogue = NaiveSignature(9, good[0].sig_bytes)
        conf = NaiveConfirmation(good + (rogue,))
        assert not verify_naive_confirmation(self.params, self.pubs, self.claim, conf)

    def test_monotone_adding_signature(self):
        base = self._sigs([0, 1, 2])
        extra = self._sigs([0, 1, 2, 3])
        assert verify_naive_confirmation(
            self.params, self.pubs, self.claim, NaiveConfirmation(base)
        )
        assert verify_naive_confirmation(
            self.params, self.pubs, self.claim, NaiveConfirmation(extra)
        )

    def test_wire_round_trip(self):
        conf = NaiveConfirmation(self._sigs([0, 2, 3]))
        assert decode_confirmation(encode_confirmation(conf)) == conf
