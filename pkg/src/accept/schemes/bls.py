"""Threshold scheme: Shamir-shared keys, one constant-size master signature.

A trusted dealer evaluates a random degree-(quorum-1) polynomial at
x = validator_index + 1 to produce key shares.  Validators sign claims
with their shares individually; any quorum of share signatures
Lagrange-interpolates (in the exponent, at x = 0) to the unique master
signature, which verifies against the master public key with a single
pairing check whose cost is independent of the validator count.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from accept import bls12381 as curve
from accept.core import InvalidParameter, SystemParams

SHARE_SIG_LEN = 48
MASTER_SIG_LEN = 48
PUBKEY_LEN = 96

CLAIM_DOMAIN = b"ACCEPT-BLS-G1"


class InsufficientShares(ValueError):
    pass


class InvalidShareSet(ValueError):
    pass


@dataclass(frozen=True)
class BlsShareSignature:
    validator_index: int
    share_sig: bytes  # 48-byte compressed G1 point

    def encode(self) -> bytes:
        return self.validator_index.to_bytes(2, "little") + self.share_sig


def decode_share_signature(blob: bytes) -> BlsShareSignature:
    if len(blob) != 2 + SHARE_SIG_LEN:
        raise ValueError("share signature blob must be 50 bytes")
    return BlsShareSignature(int.from_bytes(blob[:2], "little"), blob[2:])


@dataclass(frozen=True)
class MasterSignature:
    sig: bytes  # 48-byte compressed G1 point


def encode_confirmation(master: MasterSignature) -> bytes:
    return master.sig


def decode_confirmation(blob: bytes) -> MasterSignature:
    if len(blob) != MASTER_SIG_LEN:
        raise ValueError("master signature must be 48 bytes")
    return MasterSignature(blob)


@dataclass(frozen=True)
class BlsKeyMaterial:
    """Dealer output: secret share scalars, their public counterparts, and
    the master public key (the polynomial's constant term in G2)."""

    threshold: int
    shares: tuple[int, ...]
    public_shares: tuple[bytes, ...]
    master_public: bytes


def _scalar_from(seed: bytes, label: bytes, index: int) -> int:
    counter = 0
    while True:
        material = hashlib.sha256(
            seed + label + index.to_bytes(4, "little") + counter.to_bytes(4, "little")
        ).digest()
        value = int.from_bytes(material, "big") % curve.R
        if value:
            return value
        counter += 1


def _poly_eval(coefficients, x: int) -> int:
    acc = 0
    for coeff in reversed(coefficients):
        acc = (acc * x + coeff) % curve.R
    return acc


def trusted_keygen(params: SystemParams, seed: bytes) -> BlsKeyMaterial:
    """Deal shares for all n validators with threshold = quorum.

    Deterministic in `seed` so simulations and tests reproduce key material
    exactly.  Validator i holds the polynomial evaluated at i + 1; zero is
    reserved for the master secret.
    """
    coefficients = [_scalar_from(seed, b"coef", j) for j in range(params.quorum)]
    shares = tuple(_poly_eval(coefficients, i + 1) for i in range(params.n))
    public_shares = tuple(
        curve.compress_g2(curve.g2_mul(curve.G2_GEN, share)) for share in shares
    )
    master_public = curve.compress_g2(curve.g2_mul(curve.G2_GEN, coefficients[0]))
    return BlsKeyMaterial(params.quorum, shares, public_shares, master_public)


def _claim_point(claim: bytes):
    return curve.hash_to_g1(claim, CLAIM_DOMAIN)


def sign_share(validator_index: int, share: int, claim: bytes) -> BlsShareSignature:
    point = curve.g1_mul(_claim_point(claim), share)
    return BlsShareSignature(validator_index, curve.compress_g1(point))


def _verify_point(public_g2, claim: bytes, sig_point) -> bool:
    # e(sig, -G2) * e(H(claim), pub) == 1  <=>  e(sig, G2) == e(H(claim), pub)
    return curve.pairing_product_is_one(
        [(sig_point, curve.g2_neg(curve.G2_GEN)), (_claim_point(claim), public_g2)]
    )


def verify_share(public_share: bytes, claim: bytes, sig: BlsShareSignature) -> bool:
    try:
        pub = curve.decompress_g2(public_share)
        point = curve.decompress_g1(sig.share_sig)
    except curve.PointDecodeError:
        return False
    return _verify_point(pub, claim, point)


def lagrange_coefficients_at_zero(xs) -> list[int]:
    """Coefficients c_j with f(0) = sum c_j f(x_j) for distinct x_j mod R."""
    coeffs = []
    for j, xj in enumerate(xs):
        num, den = 1, 1
        for k, xk in enumerate(xs):
            if k == j:
                continue
            num = num * xk % curve.R
            den = den * (xk - xj) % curve.R
        coeffs.append(num * pow(den, -1, curve.R) % curve.R)
    return coeffs


def aggregate_master(params: SystemParams, shares) -> MasterSignature:
    """Interpolate a quorum of share signatures into the master signature.

    Exactly the first `quorum` shares after sorting by validator index are
    used, so the result is byte-identical regardless of which quorum subset
    the caller collected.  Shares must be pre-verified; a corrupted share
    yields a master signature that simply fails verification.
    """
    by_index: dict[int, BlsShareSignature] = {}
    for share in shares:
        if share.validator_index in by_index:
            raise InvalidShareSet(f"duplicate validator index {share.validator_index}")
        by_index[share.validator_index] = share
    if len(by_index) < params.quorum:
        raise InsufficientShares(f"need {params.quorum} shares, got {len(by_index)}")
    chosen = [by_index[i] for i in sorted(by_index)[: params.quorum]]
    xs = [sig.validator_index + 1 for sig in chosen]
    coeffs = lagrange_coefficients_at_zero(xs)
    acc = None
    for sig, coeff in zip(chosen, coeffs):
        try:
            point = curve.decompress_g1(sig.share_sig)
        except curve.PointDecodeError as exc:
            raise InvalidShareSet(f"undecodable share signature: {exc}") from exc
        acc = curve.g1_add(acc, curve.g1_mul(point, coeff))
    return MasterSignature(curve.compress_g1(acc))


def verify_master(master_public: bytes, claim: bytes, master: MasterSignature) -> bool:
    """One pairing check; cost independent of the validator count."""
    try:
        pub = curve.decompress_g2(master_public)
        point = curve.decompress_g1(master.sig)
    except curve.PointDecodeError:
        return False
    return _verify_point(pub, claim, point)
