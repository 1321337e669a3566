"""Batch scheme: sign one Merkle root instead of one signature per output.

A validator pools output claims, hashes them into a complete binary tree
and signs only the root; each claim's signature is the root signature
plus the sibling path proving inclusion.  Verifiers cache verified
(validator, root) pairs, so all but the first signature sharing a root
cost only the path hashes.

Node hashing is domain-separated: leaf nodes are H(0x00 | leaf hash),
internal nodes H(0x01 | left | right).  Without the prefixes a crafted
64-byte leaf could impersonate an internal node.
"""
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from hashlib import sha256

from accept import keys
from accept.core import HASH_LEN, InvalidParameter, SystemParams

LEFT = 0
RIGHT = 1

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"
ROOT_SIGN_PREFIX = b"\x52"

ZERO_LEAF = b"\x00" * HASH_LEN
MAX_PATH_LEN = 32

DEFAULT_BATCH_SIZE = 64
DEFAULT_FLUSH_INTERVAL = 0.005
DEFAULT_CACHE_CAPACITY = 1 << 16

# One path step is (sibling hash, side); side says where the sibling sits.
PathStep = tuple[bytes, int]
MerklePath = tuple[PathStep, ...]


@dataclass(frozen=True)
class MerkleSignature:
    validator_index: int
    path: MerklePath
    root_sig: bytes

    def encode(self) -> bytes:
        parts = [self.validator_index.to_bytes(2, "little"), bytes([len(self.path)])]
        for sibling, side in self.path:
            parts.append(bytes([side]))
            parts.append(sibling)
        parts.append(self.root_sig)
        return b"".join(parts)


def decode_signature(blob: bytes) -> MerkleSignature:
    if len(blob) < 3:
        raise ValueError("merkle signature blob too short")
    index = int.from_bytes(blob[:2], "little")
    depth = blob[2]
    pos = 3
    steps = []
    for _ in range(depth):
        side = blob[pos]
        if side not in (LEFT, RIGHT):
            raise ValueError("bad path side byte")
        steps.append((blob[pos + 1 : pos + 1 + HASH_LEN], side))
        pos += 1 + HASH_LEN
    root_sig = blob[pos : pos + 64]
    if len(root_sig) != 64 or pos + 64 != len(blob):
        raise ValueError("merkle signature length mismatch")
    return MerkleSignature(index, tuple(steps), root_sig)


@dataclass(frozen=True)
class MerkleConfirmation:
    signatures: tuple[MerkleSignature, ...]


def encode_confirmation(conf: MerkleConfirmation) -> bytes:
    parts = [len(conf.signatures).to_bytes(2, "little")]
    for sig in conf.signatures:
        blob = sig.encode()
        parts.append(len(blob).to_bytes(2, "little"))
        parts.append(blob)
    return b"".join(parts)


def decode_confirmation(blob: bytes) -> MerkleConfirmation:
    count = int.from_bytes(blob[:2], "little")
    pos = 2
    sigs = []
    for _ in range(count):
        size = int.from_bytes(blob[pos : pos + 2], "little")
        pos += 2
        sigs.append(decode_signature(blob[pos : pos + size]))
        pos += size
    if pos != len(blob):
        raise ValueError("merkle confirmation trailing bytes")
    return MerkleConfirmation(tuple(sigs))


def leaf_hash(claim: bytes) -> bytes:
    """Map an output claim message to its 32-byte tree leaf input."""
    return sha256(claim).digest()


def _leaf_node(leaf: bytes) -> bytes:
    return sha256(LEAF_PREFIX + leaf).digest()


def _inner_node(left: bytes, right: bytes) -> bytes:
    return sha256(NODE_PREFIX + left + right).digest()


def build_merkle_batch(leaves, size: int) -> tuple[bytes, list[MerklePath]]:
    """Build a complete binary tree over `leaves` padded to `size` with
    all-zero leaves.  Returns the root and one sibling path per real leaf.
    """
    if size < 1 or size & (size - 1):
        raise InvalidParameter(f"tree size must be a power of two, got {size}")
    if not 1 <= len(leaves) <= size:
        raise InvalidParameter(f"need 1..{size} leaves, got {len(leaves)}")
    for leaf in leaves:
        if len(leaf) != HASH_LEN:
            raise InvalidParameter("leaves must be 32-byte hashes")
    padded = list(leaves) + [ZERO_LEAF] * (size - len(leaves))
    levels = [[_leaf_node(leaf) for leaf in padded]]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([_inner_node(prev[i], prev[i + 1]) for i in range(0, len(prev), 2)])
    root = levels[-1][0]
    paths = []
    for i in range(len(leaves)):
        steps = []
        idx = i
        for level in levels[:-1]:
            sibling = idx ^ 1
            steps.append((level[sibling], RIGHT if sibling > idx else LEFT))
            idx >>= 1
        paths.append(tuple(steps))
    return root, paths


def fold_path(leaf: bytes, path: MerklePath) -> bytes:
    """Recompute the root committed to by (leaf, path)."""
    node = sha256(LEAF_PREFIX + leaf).digest()
    h = sha256
    for sibling, side in path:
        if side == RIGHT:
            node = h(NODE_PREFIX + node + sibling).digest()
        else:
            node = h(NODE_PREFIX + sibling + node).digest()
    return node


def root_message(root: bytes) -> bytes:
    return ROOT_SIGN_PREFIX + root


class RootCache:
    """Bounded LRU memo of (validator index, verified root) pairs.

    An entry is inserted only after a successful root signature check, so a
    hit can skip the signature without changing any verification outcome.
    Eviction merely costs a future re-verification.
    """

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        if capacity < 1:
            raise InvalidParameter("cache capacity must be >= 1")
        self.capacity = capacity
        self._entries: OrderedDict[tuple[int, bytes], bool] = OrderedDict()
        self._lock = threading.Lock()

    def __contains__(self, key: tuple[int, bytes]) -> bool:
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                return True
            return False

    def add(self, key: tuple[int, bytes]) -> None:
        with self._lock:
            self._entries[key] = True
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def verify_merkle_sig(
    cache: RootCache | None,
    public: bytes,
    validator_index: int,
    claim: bytes,
    sig: MerkleSignature,
) -> bool:
    """Fold the claim's path to a root; accept on cache hit, else verify the
    root signature and cache it.  Oversized paths and bad signatures are
    plain False, never exceptions."""
    if len(sig.path) > MAX_PATH_LEN:
        return False
    root = fold_path(leaf_hash(claim), sig.path)
    key = (validator_index, root)
    if cache is not None and key in cache:
        return True
    if not keys.verify(public, root_message(root), sig.root_sig):
        return False
    if cache is not None:
        cache.add(key)
    return True


def verify_merkle_confirmation(
    params: SystemParams,
    validator_pubkeys,
    claim: bytes,
    conf: MerkleConfirmation,
    cache: RootCache | None = None,
) -> bool:
    """Quorum rule over per-validator merkle signatures (distinct indices)."""
    seen = set()
    valid = 0
    for sig in conf.signatures:
        idx = sig.validator_index
        if idx >= params.n or idx in seen:
            if idx in seen:
                return False
            continue
        seen.add(idx)
        if verify_merkle_sig(cache, validator_pubkeys[idx], idx, claim, sig):
            valid += 1
    return valid >= params.quorum


class BatchAccumulator:
    """Pools claims from concurrent submitters; one flush signs them all.

    Claims are grouped into trees of at most `size` leaves.  flush() is
    triggered by reaching `size` pending claims or externally (a timer in
    the service, a scheduler tick in the simulator).  Callbacks run outside
    the accumulator lock.
    """

    def __init__(self, validator_index: int, secret: keys.SigningKey, size: int = DEFAULT_BATCH_SIZE):
        if size < 1 or size & (size - 1):
            raise InvalidParameter("batch size must be a power of two")
        self.validator_index = validator_index
        self.size = size
        self._secret = secret
        self._lock = threading.Lock()
        self._pending: list[tuple[bytes, object]] = []

    def submit(self, claims, callback) -> None:
        """Queue `claims` (one request's output claims); `callback` receives
        the aligned list of MerkleSignature when their tree is signed."""
        slots = [[None] * len(claims), callback]
        overflow = False
        with self._lock:
            for pos, claim in enumerate(claims):
                self._pending.append((leaf_hash(claim), (slots, pos)))
            overflow = len(self._pending) >= self.size
        if overflow:
            self.flush()

    def pending_count(self) -> int:
        with self._lock:
            return len(self._pending)

    def flush(self) -> int:
        """Sign every pending claim; returns the number of claims flushed."""
        with self._lock:
            batch = self._pending
            self._pending = []
        if not batch:
            return 0
        done = []
        for start in range(0, len(batch), self.size):
            chunk = batch[start : start + self.size]
            root, paths = build_merkle_batch([leaf for leaf, _ in chunk], self.size)
            root_sig = self._secret.sign(root_message(root))
            for (_, (slots, pos)), path in zip(chunk, paths):
                slots[0][pos] = MerkleSignature(self.validator_index, path, root_sig)
                if all(s is not None for s in slots[0]):
                    done.append(slots)
        for slots in done:
            slots[1](slots[0])
        return len(batch)


def cost_model(q: int, c_h: float, c_s: float, c_v: float, size: int) -> tuple[float, float]:
    """Per-output processing cost of the naive and merkle schemes.

    naive: q verifications plus one signature.  merkle: log2(N) quorum path
    hashes on the verify side, the signature and root verification amortized
    over N leaves, plus 2 hashes of tree building per leaf.
    """
    if size < 1 or size & (size - 1):
        raise InvalidParameter("tree size must be a power of two")
    c_naive = q * c_v + c_s
    c_merkle = math.log2(size) * q * c_h + (q * c_v + c_s) / size + 2 * c_h
    return c_naive, c_merkle


def optimal_leaves(q: int, c_h: float, c_s: float, c_v: float) -> float:
    """Real-valued minimizer of the merkle cost curve: ((q c_v + c_s)/(q c_h)) ln 2."""
    if q < 1:
        raise InvalidParameter("quorum must be >= 1")
    if c_h <= 0 or c_s <= 0 or c_v <= 0:
        raise InvalidParameter("operation costs must be positive")
    return (q * c_v + c_s) / (q * c_h) * math.log(2)


def round_optimal_leaves(q: int, c_h: float, c_s: float, c_v: float) -> int:
    """Power-of-two tree size with the lower modeled cost around the optimum."""
    n_star = optimal_leaves(q, c_h, c_s, c_v)
    lo = 1 << max(0, math.floor(math.log2(n_star)))
    hi = lo * 2
    return min((lo, hi), key=lambda size: cost_model(q, c_h, c_s, c_v, size)[1])
