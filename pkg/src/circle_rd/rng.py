"""Counter-based uniform draws.

The value at position ``i`` of stream ``s`` under seed ``seed`` is a pure
function of ``(seed, s, i)``: positions are grouped into fixed-size blocks
and each block gets its own Philox generator keyed by
``SeedSequence(seed, spawn_key=(s, block))``. Any split of an index range
across workers therefore reproduces the same numbers.
"""

from enum import IntEnum

import numpy as np

from .errors import InvalidInputError

BLOCK_SIZE = 1 << 16
MAX_SEED = (1 << 64) - 1


class Stream(IntEnum):
    SOURCE = 0
    ENCODER = 1
    DECODER = 2
    AUX = 3


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidInputError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise InvalidInputError("seed must be an unsigned 64-bit integer")
    return int(seed)


def _block(seed, stream, block):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(ss)).random(BLOCK_SIZE)


def uniforms(seed, stream, start, stop):
    """Uniform ``[0, 1)`` draws at positions ``start, ..., stop - 1``."""
    seed = check_seed(seed)
    if not 0 <= start <= stop:
        raise InvalidInputError("need 0 <= start <= stop")
    out = np.empty(stop - start)
    pos = start
    while pos < stop:
        b, off = divmod(pos, BLOCK_SIZE)
        take = min(BLOCK_SIZE - off, stop - pos)
        out[pos - start:pos - start + take] = _block(seed, stream, b)[off:off + take]
        pos += take
    return out


class DitherStream:
    """Sequential reader over one counter-based stream.

    Successive ``draw`` calls continue where the previous one stopped, so
    ``draw(3); draw(5)`` yields the same eight numbers as ``draw(8)``.
    A stream is not thread-safe; give each owner its own.
    """

    def __init__(self, seed, stream=Stream.ENCODER, position=0):
        self.seed = check_seed(seed)
        self.stream = Stream(stream)
        self.position = int(position)

    def draw(self, n=None):
        count = 1 if n is None else int(n)
        u = uniforms(self.seed, self.stream, self.position, self.position + count)
        self.position += count
        return float(u[0]) if n is None else u

    def __repr__(self):
        return f"DitherStream(seed={self.seed}, stream={self.stream.name}, position={self.position})"
