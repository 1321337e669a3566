import time
from itertools import combinations

import pytest

from accept import bls12381 as curve
from accept.core import quorum_params
from accept.schemes.bls import (
    BlsShareSignature,
    InsufficientShares,
    InvalidShareSet,
    MasterSignature,
    aggregate_master,
    decode_share_signature,
    lagrange_coefficients_at_zero,
    sign_share,
    trusted_keygen,
    verify_master,
    verify_share,
)

CLAIM = bytes(range(73))
GOLDEN_SEED = b"golden-seed"
GOLDEN_SHARE0_SIG = (
    "8713b5b88db7b80171652a994f4189114917eae10aca6c381fcf827efef627dc"
    "28e704764438642504ba81ac8df57c89"
)


def interpolate_secret(xs, ys):
    coeffs = lagrange_coefficients_at_zero(xs)
    return sum(c * y for c, y in zip(coeffs, ys)) % curve.R


@pytest.fixture(scope="module")
def mat4():
    return trusted_keygen(quorum_params(4), b"bls-test-4")


class TestKeygen:
    def test_deterministic(self):
        p = quorum_params(4)
        assert trusted_keygen(p, b"s").shares == trusted_keygen(p, b"s").shares
        assert trusted_keygen(p, b"s").shares != trusted_keygen(p, b"t").shares

    def test_same_secret_from_any_quorum(self, mat4):
        params = quorum_params(4)
        s123 = interpolate_secret([1, 2, 3], mat4.shares[:3])
        s234 = interpolate_secret([2, 3, 4], mat4.shares[1:])
        assert s123 == s234

    def test_master_public_matches_secret(self, mat4):
        secret = interpolate_secret([1, 2, 3], mat4.shares[:3])
        assert curve.compress_g2(curve.g2_mul(curve.G2_GEN, secret)) == mat4.master_public

    def test_public_shares_match(self, mat4):
        for share, public in zip(mat4.shares, mat4.public_shares):
            assert curve.compress_g2(curve.g2_mul(curve.G2_GEN, share)) == public

    def test_threshold_equals_quorum(self, mat4):
        assert mat4.threshold == 3


def test_quorum_minus_one_shares_underdetermined():
    # brute force in a toy field: any (t-1)-subset of shares is consistent
    # with more than one secret, so it reveals nothing
    prime, threshold = 97, 3
    poly = [42, 7, 19]  # secret 42

    def eval_poly(x):
        return (poly[0] + poly[1] * x + poly[2] * x * x) % prime

    xs = [1, 2]  # threshold - 1 shares
    ys = [eval_poly(x) for x in xs]
    consistent_secrets = set()
    for c1 in range(prime):
        for c2 in range(prime):
            for c0 in range(prime):
                if all((c0 + c1 * x + c2 * x * x) % prime == y for x, y in zip(xs, ys)):
                    consistent_secrets.add(c0)
    assert consistent_secrets == set(range(prime))  # every secret remains possible


class TestSignVerify:
    def test_round_trip(self, mat4):
        sig = sign_share(0, mat4.shares[0], CLAIM)
        assert verify_share(mat4.public_shares[0], CLAIM, sig)

    def test_wrong_share_public_fails(self, mat4):
        sig = sign_share(0, mat4.shares[0], CLAIM)
        assert not verify_share(mat4.public_shares[1], CLAIM, sig)

    def test_golden_share_signature(self):
        material = trusted_keygen(quorum_params(4), GOLDEN_SEED)
        sig = sign_share(0, material.shares[0], CLAIM)
        assert sig.share_sig.hex() == GOLDEN_SHARE0_SIG

    def test_wire_round_trip(self, mat4):
        sig = sign_share(2, mat4.shares[2], CLAIM)
        assert decode_share_signature(sig.encode()) == sig


class TestAggregate:
    def test_subset_independence_pairwise(self, mat4):
        params = quorum_params(4)
        sigs = [sign_share(i, mat4.shares[i], CLAIM) for i in range(4)]
        m1 = aggregate_master(params, sigs[:3])
        m2 = aggregate_master(params, sigs[1:])
        assert m1 == m2
        assert verify_master(mat4.master_public, CLAIM, m1)

    def test_insufficient_shares(self, mat4):
        params = quorum_params(4)
        sigs = [sign_share(i, mat4.shares[i], CLAIM) for i in range(2)]
        with pytest.raises(InsufficientShares):
            aggregate_master(params, sigs)

    def test_duplicate_indices(self, mat4):
        params = quorum_params(4)
        sig = sign_share(0, mat4.shares[0], CLAIM)
        with pytest.raises(InvalidShareSet):
            aggregate_master(params, [sig, sig, sign_share(1, mat4.shares[1], CLAIM)])

    def test_corrupted_share_garbage_out(self, mat4):
        params = quorum_params(4)
        sigs = [sign_share(i, mat4.shares[i], CLAIM) for i in range(3)]
        rogue = sign_share(2, (mat4.shares[2] + 1) % curve.R, CLAIM)
        master = aggregate_master(params, [sigs[0], sigs[1], rogue])
        assert not verify_master(mat4.master_public, CLAIM, master)

    def test_degenerate_single_validator(self):
        params = quorum_params(1)
        material = trusted_keygen(params, b"solo")
        sig = sign_share(0, material.shares[0], CLAIM)
        master = aggregate_master(params, [sig])
        assert master.sig == sig.share_sig
        assert material.master_public == material.public_shares[0]
        assert verify_master(material.master_public, CLAIM, master)


class TestMasterVerify:
    def test_claim_mismatch(self, mat4):
        params = quorum_params(4)
        sigs = [sign_share(i, mat4.shares[i], CLAIM) for i in range(3)]
        master = aggregate_master(params, sigs)
        assert not verify_master(mat4.master_public, b"B" * 73, master)

    def test_malformed_encoding_is_false(self, mat4):
        assert not verify_master(mat4.master_public, CLAIM, MasterSignature(b"\x00" * 48))
        assert not verify_master(b"\x11" * 96, CLAIM, MasterSignature(b"\x00" * 48))

    def test_verification_time_independent_of_n(self):
        # identical single pairing check whichever validator set produced it
        timings = {}
        for n in (4, 28):
            material = trusted_keygen(quorum_params(n), b"timing")
            params = quorum_params(n)
            sigs = [
                sign_share(i, material.shares[i], CLAIM) for i in range(params.quorum)
            ]
            master = aggregate_master(params, sigs)
            samples = []
            for _ in range(5):
                start = time.perf_counter()
                assert verify_master(material.master_public, CLAIM, master)
                samples.append(time.perf_counter() - start)
            timings[n] = sorted(samples)[len(samples) // 2]
        ratio = timings[28] / timings[4]
        assert 0.9 < ratio < 1.1


@pytest.mark.slow
def test_unforgeability_smoke_f_shares_never_aggregate():
    # f shares cannot produce a verifying master signature no matter which
    # f-subset the adversary holds: interpolation over too few points hits
    # the wrong polynomial
    for n in (4, 7):
        params = quorum_params(n)
        material = trusted_keygen(params, b"forge")
        sigs = [sign_share(i, material.shares[i], CLAIM) for i in range(n)]
        for subset in combinations(range(n), params.f):
            if not subset:
                continue
            xs = [i + 1 for i in subset]
            coeffs = lagrange_coefficients_at_zero(xs)
            forged = None
            for i, coeff in zip(subset, coeffs):
                point = curve.decompress_g1(sigs[i].share_sig)
                forged = curve.g1_add(forged, curve.g1_mul(point, coeff))
            blob = curve.compress_g1(forged)
            assert not verify_master(material.master_public, CLAIM, MasterSignature(blob))
