"""Spent-set surface: the concurrent map plus its append-only log.

The map itself lives in the `_spentset` extension.  The log stores one
68-byte record per insert — key (32) | spending digest (32) | CRC32 (4)
— and is replayed at startup.  A truncated final record (crash mid-write)
is tolerated by dropping it; a corrupt record anywhere else is an error.
"""
from __future__ import annotations

import os
import zlib

from accept._spentset import DEFAULT_BUCKETS, SpentSet

RECORD_LEN = 68

__all__ = ["SpentSet", "SpentSetLog", "LogCorruption", "DEFAULT_BUCKETS", "RECORD_LEN"]


class LogCorruption(Exception):
    pass


def _pack_record(key: bytes, value: bytes) -> bytes:
    payload = key + value
    return payload + zlib.crc32(payload).to_bytes(4, "little")


class SpentSetLog:
    """A SpentSet whose fresh inserts are appended to a checksummed log."""

    def __init__(self, path, buckets: int = DEFAULT_BUCKETS, sync: bool = False):
        self.path = path
        self.sync = sync
        self.set = SpentSet(buckets=buckets)
        self._replay()
        self._fh = open(path, "ab")

    def _replay(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            data = fh.read()
        full, tail = divmod(len(data), RECORD_LEN)
        for i in range(full):
            record = data[i * RECORD_LEN : (i + 1) * RECORD_LEN]
            payload, crc = record[:64], record[64:]
            if zlib.crc32(payload) != int.from_bytes(crc, "little"):
                if i == full - 1 and tail == 0:
                    break  # torn final record
                raise LogCorruption(f"bad checksum at record {i} of {self.path}")
            self.set.insert_if_absent(payload[:32], payload[32:])
        # a trailing partial record (tail > 0) is a crash artifact; dropped

    def insert_if_absent(self, key: bytes, value: bytes):
        inserted, current = self.set.insert_if_absent(key, value)
        if inserted:
            self._fh.write(_pack_record(key, value))
            self._fh.flush()
            if self.sync:
                os.fsync(self._fh.fileno())
        return inserted, current

    def contains(self, key: bytes) -> bool:
        return self.set.contains(key)

    def get(self, key: bytes):
        return self.set.get(key)

    def __len__(self) -> int:
        return len(self.set)

    def close(self) -> None:
        self._fh.close()
