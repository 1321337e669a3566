"""Crypto microbenchmarks, the scheme crossover scan, and the tree sweep.

Absolute numbers are machine-specific and never acceptance targets; the
meaningful outputs are ratios (cached merkle vs naive verification),
orderings (threshold verification is slow but flat in n), and optima
(where the merkle cost curve bottoms out).
"""
from __future__ import annotations

import os
import statistics
import time
from hashlib import sha256

from accept import keys
from accept.bench.report import CryptoCosts
from accept.schemes import bls as bls_scheme
from accept.schemes import merkle as merkle_scheme
from accept.schemes import naive as naive_scheme
from accept.core import quorum_params

BATCH = 64

CRYPTO_OPS = {
    "naive": ("sign", "verify-single", "verify-batch-64"),
    "merkle": ("sign", "verify-uncached", "verify-cached"),
    "bls": ("sign", "verify"),
}


def _median_of_batches(timings: list[float]) -> float:
    """Median of per-batch means, in ns; cuts scheduler noise without
    hiding the central tendency."""
    if len(timings) < 5:
        return statistics.median(timings) * 1e9
    size = max(1, len(timings) // 5)
    batches = [timings[i : i + size] for i in range(0, len(timings), size)]
    return statistics.median(statistics.fmean(b) for b in batches) * 1e9


def _time_each(fn, items) -> list[float]:
    clock = time.perf_counter
    out = []
    for item in items:
        start = clock()
        fn(item)
        out.append(clock() - start)
    return out


def bench_crypto(scheme: str, op: str, iterations: int) -> float:
    """ns per operation for one (scheme, op) pair.

    Statistically stable from ~10^3 iterations for the fast schemes; the
    pure-Python pairing makes that budget minutes-long for bls, so callers
    (and the CLI defaults) use smaller counts there.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if op not in CRYPTO_OPS.get(scheme, ()):
        raise ValueError(f"unknown op {scheme}/{op}")
    secret = keys.SigningKey(b"\x42" * 32)
    claims = [os.urandom(73) for _ in range(min(iterations, 4096))]

    if scheme == "naive":
        if op == "sign":
            times = _time_each(secret.sign, (claims[i % len(claims)] for i in range(iterations)))
            return _median_of_batches(times)
        sigs = [(secret.public, c, secret.sign(c)) for c in claims]
        if op == "verify-single":
            times = _time_each(
                lambda item: keys.verify(*item),
                (sigs[i % len(sigs)] for i in range(iterations)),
            )
            return _median_of_batches(times)
        # verify-batch-64: per-signature cost of batched verification
        groups = max(1, iterations // BATCH)
        batches = [
            [sigs[(g * BATCH + i) % len(sigs)] for i in range(BATCH)] for g in range(groups)
        ]
        times = _time_each(naive_scheme.verify_naive_batch, batches)
        return _median_of_batches(times) / BATCH

    if scheme == "merkle":
        leaves = [merkle_scheme.leaf_hash(c) for c in claims[:BATCH]]
        if op == "sign":
            # whole-batch cost (tree, paths, one root signature) per leaf
            def build(_):
                root, _paths = merkle_scheme.build_merkle_batch(leaves, BATCH)
                secret.sign(merkle_scheme.root_message(root))

            reps = max(1, iterations // BATCH)
            times = _time_each(build, range(reps))
            return _median_of_batches(times) / BATCH
        root, paths = merkle_scheme.build_merkle_batch(
            [merkle_scheme.leaf_hash(c) for c in claims[:BATCH]], BATCH
        )
        root_sig = secret.sign(merkle_scheme.root_message(root))
        sigs = [
            (claims[i], merkle_scheme.MerkleSignature(0, paths[i], root_sig))
            for i in range(BATCH)
        ]
        if op == "verify-uncached":
            def verify_cold(item):
                claim, sig = item
                merkle_scheme.verify_merkle_sig(None, secret.public, 0, claim, sig)

            times = _time_each(
                verify_cold, (sigs[i % BATCH] for i in range(iterations))
            )
            return _median_of_batches(times)
        cache = merkle_scheme.RootCache()
        merkle_scheme.verify_merkle_sig(cache, secret.public, 0, *sigs[0])

        def verify_warm(item):
            claim, sig = item
            merkle_scheme.verify_merkle_sig(cache, secret.public, 0, claim, sig)

        times = _time_each(verify_warm, (sigs[i % BATCH] for i in range(iterations)))
        return _median_of_batches(times)

    # bls
    params = quorum_params(4)
    material = bls_scheme.trusted_keygen(params, b"bench")
    if op == "sign":
        times = _time_each(
            lambda c: bls_scheme.sign_share(0, material.shares[0], c),
            (claims[i % len(claims)] for i in range(iterations)),
        )
        return _median_of_batches(times)
    shares = [
        [bls_scheme.sign_share(i, material.shares[i], c) for i in range(params.quorum)]
        for c in claims[:8]
    ]
    masters = [
        (claims[i], bls_scheme.aggregate_master(params, s)) for i, s in enumerate(shares)
    ]

    def verify(item):
        claim, master = item
        bls_scheme.verify_master(material.master_public, claim, master)

    times = _time_each(verify, (masters[i % len(masters)] for i in range(iterations)))
    return _median_of_batches(times)


def measure_costs(
    naive_iterations: int = 2000,
    merkle_iterations: int = 2000,
    bls_iterations: int = 20,
) -> CryptoCosts:
    return CryptoCosts(
        naive_sign=bench_crypto("naive", "sign", naive_iterations),
        naive_verify=bench_crypto("naive", "verify-single", naive_iterations),
        naive_verify_batch64=bench_crypto("naive", "verify-batch-64", naive_iterations),
        merkle_sign_amortized=bench_crypto("merkle", "sign", merkle_iterations),
        merkle_verify_uncached=bench_crypto("merkle", "verify-uncached", merkle_iterations),
        merkle_verify_cached=bench_crypto("merkle", "verify-cached", merkle_iterations),
        bls_sign=bench_crypto("bls", "sign", bls_iterations),
        bls_verify=bench_crypto("bls", "verify", bls_iterations),
    ).validate()


# ------------------------------------------------------------- crossover


def _general_quorum(n: int) -> int:
    """Smallest signature count strictly above 2n/3.

    Valid for every n (not only n = 3f+1): two such sets intersect in more
    than n/3 validators, hence in at least one correct one.
    """
    return (2 * n) // 3 + 1


def crossover_validators(costs: CryptoCosts, n_max: int = 100_000) -> tuple[int, int]:
    """Smallest n where the threshold scheme's flat per-output cost beats
    the naive and merkle schemes' quorum-proportional costs."""
    costs.validate()
    bls_total = costs.bls_sign + costs.bls_verify
    merkle_verify = costs.merkle_verify_mean(BATCH)
    n_naive = n_merkle = None
    for n in range(1, n_max + 1):
        q = _general_quorum(n)
        if n_naive is None and bls_total < q * costs.naive_verify + costs.naive_sign:
            n_naive = n
        if n_merkle is None and bls_total < q * merkle_verify + costs.merkle_sign_amortized:
            n_merkle = n
        if n_naive is not None and n_merkle is not None:
            return n_naive, n_merkle
    raise ValueError(f"no crossover below n = {n_max}")


# ----------------------------------------------------------- merkle sweep


def _measure_hash_ns(reps: int = 20_000) -> float:
    blob = os.urandom(65)
    clock = time.perf_counter
    start = clock()
    for _ in range(reps):
        sha256(blob).digest()
    return (clock() - start) / reps * 1e9


def measure_merkle_point(q: int, size: int, reps: int = 3) -> float:
    """Empirical per-output cost (ns) at one tree size: build and sign the
    batch, then verify a quorum of signatures per output with root caching."""
    secret = keys.SigningKey(b"\x43" * 32)
    claims = [os.urandom(73) for _ in range(size)]
    leaves = [merkle_scheme.leaf_hash(c) for c in claims]
    samples = []
    clock = time.perf_counter
    for _ in range(reps):
        cache = merkle_scheme.RootCache()
        start = clock()
        root, paths = merkle_scheme.build_merkle_batch(leaves, size)
        root_sig = secret.sign(merkle_scheme.root_message(root))
        for v in range(q):
            for claim, path in zip(claims, paths):
                merkle_scheme.verify_merkle_sig(
                    cache,
                    secret.public,
                    0,
                    claim,
                    merkle_scheme.MerkleSignature(0, path, root_sig),
                )
        samples.append((clock() - start) / size)
    return statistics.median(samples) * 1e9


def merkle_size_sweep(
    q: int = 7, max_exponent: int = 12, reps: int = 3, costs: CryptoCosts | None = None
):
    """Measured vs modeled per-output cost over tree sizes 1..2^max_exponent.

    The model curve is evaluated with hash/sign/verify costs measured on
    this machine, so the two optima are comparable.
    """
    c_h = _measure_hash_ns()
    if costs is None:
        c_s = bench_crypto("naive", "sign", 300)
        c_v = bench_crypto("naive", "verify-single", 300)
    else:
        c_s, c_v = costs.naive_sign, costs.naive_verify
    rows = []
    for exp in range(max_exponent + 1):
        size = 1 << exp
        measured = measure_merkle_point(q, size, reps)
        modeled = merkle_scheme.cost_model(q, c_h, c_s, c_v, size)[1]
        rows.append({"leaves": size, "measured_ns": measured, "model_ns": modeled})
    measured_opt = min(rows, key=lambda r: r["measured_ns"])["leaves"]
    model_opt = merkle_scheme.round_optimal_leaves(q, c_h, c_s, c_v)
    return {
        "rows": rows,
        "measured_optimum": measured_opt,
        "model_optimum": model_opt,
        "model_n_star": merkle_scheme.optimal_leaves(q, c_h, c_s, c_v),
        "costs": {"c_h": c_h, "c_s": c_s, "c_v": c_v},
    }
