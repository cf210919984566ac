"""Counter-based, splittable random streams.

A stream is keyed by (seed, stream_id) through numpy's SeedSequence hash and
drives a Philox generator, so equal keys replay bit-for-bit and distinct
stream ids give independent sequences.
"""
import os

import numpy as np

_MASK64 = (1 << 64) - 1


def default_seed():
    return int(os.environ.get("MATELAB_SEED", "0"))


class RngStream:
    def __init__(self, seed=None, stream_id=0, _path=()):
        if seed is None:
            seed = default_seed()
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._path = tuple(int(p) for p in _path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self._path)
        self._bitgen = np.random.Philox(ss)
        self.gen = np.random.Generator(self._bitgen)

    @property
    def counter(self):
        """Philox block counter (advances as numbers are drawn)."""
        c = self._bitgen.state["state"]["counter"]
        return int(c[0]) | (int(c[1]) << 64)

    def child(self, *key):
        """An independent sub-stream; deterministic in (seed, stream_id, key)."""
        return RngStream(self.seed, self.stream_id, self._path + tuple(int(k) for k in key))

    def children(self, n):
        return [self.child(i) for i in range(n)]

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self._path})"


def as_stream(stream):
    """Accept an RngStream, an int seed, or None."""
    if isinstance(stream, RngStream):
        return stream
    return RngStream(stream, 0)
