# cython: language_level=3, boundscheck=False, wraparound=False
"""Concurrent spent-output map: fixed bucket array, per-bucket chains.

Bucket selection is lock-free (keys are uniform 32-byte hashes; the low
bits of the key index the array).  Chain reads and writes happen under a
per-bucket spinlock, so unrelated keys never contend.  All lock-holding
sections run with the GIL released; threads really do run concurrently
through this structure.

`global_lock=True` replaces the per-bucket locks with one mutex over the
whole map.  Semantics are identical; it exists as the contention baseline
for the throughput benchmark.
"""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize, PyBytes_GET_SIZE
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcmp, memcpy

cdef extern from "pthread.h" nogil:
    ctypedef struct pthread_mutex_t:
        pass
    int pthread_mutex_init(pthread_mutex_t *mutex, void *attr)
    int pthread_mutex_destroy(pthread_mutex_t *mutex)
    int pthread_mutex_lock(pthread_mutex_t *mutex)
    int pthread_mutex_unlock(pthread_mutex_t *mutex)

cdef extern from *:
    """
    #include <sched.h>
    static inline long accept_atomic_add(volatile long *p, long v) {
        return __sync_add_and_fetch(p, v);
    }
    /* Test-and-set byte lock with pause/yield backoff.  Plain spinning is
       pathological when threads outnumber cores: a preempted lock holder
       makes every waiter burn its whole quantum.  Yielding after a short
       spin keeps the map usable at any thread count. */
    static inline void accept_lock(volatile unsigned char *l) {
        int spins = 0;
        while (__sync_lock_test_and_set(l, 1)) {
            while (*l) {
                if (++spins < 64) {
    #if defined(__x86_64__) || defined(__i386__)
                    __builtin_ia32_pause();
    #endif
                } else {
                    spins = 0;
                    sched_yield();
                }
            }
        }
    }
    static inline void accept_unlock(volatile unsigned char *l) {
        __sync_lock_release(l);
    }
    """
    long accept_atomic_add(volatile long *p, long v) nogil
    void accept_lock(volatile unsigned char *l) nogil
    void accept_unlock(volatile unsigned char *l) nogil

DEF KEY_LEN = 32
DEF VAL_LEN = 32

cdef struct Node:
    unsigned char key[KEY_LEN]
    unsigned char value[VAL_LEN]
    Node *next

DEFAULT_BUCKETS = 1 << 22


cdef inline unsigned long _bucket_index(const unsigned char *key, unsigned long mask) nogil:
    cdef unsigned long h = 0
    cdef int i
    for i in range(8):
        h |= (<unsigned long> key[i]) << (8 * i)
    return h & mask


cdef class SpentSet:
    """Exact concurrent map from 32-byte output key to 32-byte tx digest."""

    cdef Node **heads
    cdef volatile unsigned char *locks
    cdef unsigned long mask
    cdef unsigned long n_buckets
    cdef bint global_mode
    cdef pthread_mutex_t global_mutex
    cdef volatile long count

    def __cinit__(self, buckets=DEFAULT_BUCKETS, bint global_lock=False):
        cdef unsigned long n = <unsigned long> buckets
        if n < 1 or (n & (n - 1)) != 0:
            raise ValueError("bucket count must be a power of two")
        self.n_buckets = n
        self.mask = n - 1
        self.global_mode = global_lock
        self.count = 0
        self.heads = <Node **> calloc(n, sizeof(Node *))
        self.locks = <volatile unsigned char *> calloc(n, 1)
        if self.heads is NULL or self.locks is NULL:
            raise MemoryError()
        if global_lock:
            pthread_mutex_init(&self.global_mutex, NULL)

    def __dealloc__(self):
        cdef unsigned long i
        cdef Node *node
        cdef Node *next_node
        if self.heads is not NULL:
            for i in range(self.n_buckets):
                node = self.heads[i]
                while node is not NULL:
                    next_node = node.next
                    free(node)
                    node = next_node
            free(self.heads)
        if self.locks is not NULL:
            free(<void *> self.locks)
        if self.global_mode:
            pthread_mutex_destroy(&self.global_mutex)

    cdef inline void _lock(self, unsigned long idx) nogil:
        if self.global_mode:
            pthread_mutex_lock(&self.global_mutex)
        else:
            accept_lock(&self.locks[idx])

    cdef inline void _unlock(self, unsigned long idx) nogil:
        if self.global_mode:
            pthread_mutex_unlock(&self.global_mutex)
        else:
            accept_unlock(&self.locks[idx])

    # status: 1 inserted, 0 found existing (value copied out), -1 oom
    cdef int _insert(self, const unsigned char *key, const unsigned char *value,
                     unsigned char *existing) nogil:
        cdef unsigned long idx = _bucket_index(key, self.mask)
        cdef Node *node
        cdef Node *fresh = <Node *> malloc(sizeof(Node))
        if fresh is NULL:
            return -1
        memcpy(fresh.key, key, KEY_LEN)
        memcpy(fresh.value, value, VAL_LEN)
        self._lock(idx)
        node = self.heads[idx]
        while node is not NULL:
            if memcmp(node.key, key, KEY_LEN) == 0:
                memcpy(existing, node.value, VAL_LEN)
                self._unlock(idx)
                free(fresh)
                return 0
            node = node.next
        fresh.next = self.heads[idx]
        self.heads[idx] = fresh
        self._unlock(idx)
        return 1

    cdef int _contains(self, const unsigned char *key, unsigned char *value_out) nogil:
        cdef unsigned long idx = _bucket_index(key, self.mask)
        cdef Node *node
        cdef int found = 0
        self._lock(idx)
        node = self.heads[idx]
        while node is not NULL:
            if memcmp(node.key, key, KEY_LEN) == 0:
                if value_out is not NULL:
                    memcpy(value_out, node.value, VAL_LEN)
                found = 1
                break
            node = node.next
        self._unlock(idx)
        return found

    cdef int _remove_if_value(self, const unsigned char *key,
                              const unsigned char *value) nogil:
        cdef unsigned long idx = _bucket_index(key, self.mask)
        cdef Node *node
        cdef Node **slot
        cdef int removed = 0
        self._lock(idx)
        slot = &self.heads[idx]
        node = self.heads[idx]
        while node is not NULL:
            if memcmp(node.key, key, KEY_LEN) == 0:
                if memcmp(node.value, value, VAL_LEN) == 0:
                    slot[0] = node.next
                    free(node)
                    removed = 1
                break
            slot = &node.next
            node = node.next
        self._unlock(idx)
        if removed:
            accept_atomic_add(&self.count, -1)
        return removed

    def insert_if_absent(self, bytes key, bytes value):
        """Atomically bind key -> value if absent.

        Returns (True, value) on a fresh insert, else (False, existing value);
        the existing value is what lets callers retry the same transaction
        idempotently.
        """
        if PyBytes_GET_SIZE(key) != KEY_LEN or PyBytes_GET_SIZE(value) != VAL_LEN:
            raise ValueError("key and value must be 32 bytes")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(key)
        cdef const unsigned char *vp = <const unsigned char *> PyBytes_AS_STRING(value)
        cdef unsigned char existing[VAL_LEN]
        cdef int status
        with nogil:
            status = self._insert(kp, vp, existing)
        if status < 0:
            raise MemoryError()
        if status == 1:
            accept_atomic_add(&self.count, 1)
            return True, value
        return False, PyBytes_FromStringAndSize(<const char *> existing, VAL_LEN)

    def contains(self, bytes key):
        if PyBytes_GET_SIZE(key) != KEY_LEN:
            raise ValueError("key must be 32 bytes")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(key)
        cdef int found
        with nogil:
            found = self._contains(kp, NULL)
        return found == 1

    def get(self, bytes key):
        if PyBytes_GET_SIZE(key) != KEY_LEN:
            raise ValueError("key must be 32 bytes")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(key)
        cdef unsigned char value[VAL_LEN]
        cdef int found
        with nogil:
            found = self._contains(kp, value)
        if found:
            return PyBytes_FromStringAndSize(<const char *> value, VAL_LEN)
        return None

    def remove_if_value(self, bytes key, bytes expected):
        """Remove the entry only if it currently maps to `expected`."""
        if PyBytes_GET_SIZE(key) != KEY_LEN or PyBytes_GET_SIZE(expected) != VAL_LEN:
            raise ValueError("key and value must be 32 bytes")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(key)
        cdef const unsigned char *vp = <const unsigned char *> PyBytes_AS_STRING(expected)
        cdef int removed
        with nogil:
            removed = self._remove_if_value(kp, vp)
        return removed == 1

    def insert_many(self, bytes keys, bytes values):
        """Bulk insert_if_absent over packed 32-byte records; returns the
        number of fresh inserts.  Runs the whole batch without the GIL, so
        several threads calling this genuinely execute in parallel."""
        cdef Py_ssize_t n = PyBytes_GET_SIZE(keys) // KEY_LEN
        if PyBytes_GET_SIZE(keys) != n * KEY_LEN or PyBytes_GET_SIZE(values) != n * VAL_LEN:
            raise ValueError("keys/values must pack the same count of 32-byte records")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(keys)
        cdef const unsigned char *vp = <const unsigned char *> PyBytes_AS_STRING(values)
        cdef unsigned char scratch[VAL_LEN]
        cdef Py_ssize_t i
        cdef long inserted = 0
        cdef int status = 0
        with nogil:
            for i in range(n):
                status = self._insert(kp + i * KEY_LEN, vp + i * VAL_LEN, scratch)
                if status < 0:
                    break
                inserted += status
            if inserted:
                accept_atomic_add(&self.count, inserted)
        if status < 0:
            raise MemoryError()
        return inserted

    def contains_many(self, bytes keys):
        """Count how many of the packed 32-byte keys are present."""
        cdef Py_ssize_t n = PyBytes_GET_SIZE(keys) // KEY_LEN
        if PyBytes_GET_SIZE(keys) != n * KEY_LEN:
            raise ValueError("keys must pack 32-byte records")
        cdef const unsigned char *kp = <const unsigned char *> PyBytes_AS_STRING(keys)
        cdef Py_ssize_t i
        cdef long found = 0
        with nogil:
            for i in range(n):
                found += self._contains(kp + i * KEY_LEN, NULL)
        return found

    def __len__(self):
        return self.count

    def __contains__(self, key):
        return self.contains(key)

    @property
    def bucket_count(self):
        return self.n_buckets

    @property
    def uses_global_lock(self):
        return self.global_mode

    def items(self):
        """Snapshot of all (key, value) pairs; buckets are visited one at a
        time, so the result is not a point-in-time snapshot under writes."""
        out = []
        cdef unsigned long i
        cdef Node *node
        for i in range(self.n_buckets):
            self._lock(i)
            node = self.heads[i]
            while node is not NULL:
                out.append(
                    (
                        PyBytes_FromStringAndSize(<const char *> node.key, KEY_LEN),
                        PyBytes_FromStringAndSize(<const char *> node.value, VAL_LEN),
                    )
                )
                node = node.next
            self._unlock(i)
        return out

    def __reduce__(self):
        return (_rebuild, (self.n_buckets, self.global_mode, self.items()))

    def __deepcopy__(self, memo):
        return _rebuild(self.n_buckets, self.global_mode, self.items())


def _rebuild(buckets, global_lock, items):
    s = SpentSet(buckets=buckets, global_lock=global_lock)
    for key, value in items:
        s.insert_if_absent(key, value)
    return s
