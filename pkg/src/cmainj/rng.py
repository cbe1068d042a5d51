"""Deterministic gaussian stream for reproducible optimizer runs.

The stream is built on the counter-based Philox bit generator keyed by the
run seed.  Gaussian variates are produced by an explicit Box-Muller
transform over the uniform stream rather than numpy's ziggurat sampler, so
the mapping from seed to variates is fixed by this module alone:

    for each pair j:  u1 = U[2j], u2 = U[2j+1]  drawn from Philox
    r  = sqrt(-2 * log(1 - u1))
    z[2j]   = r * cos(2*pi*u2)
    z[2j+1] = r * sin(2*pi*u2)

``normal(k)`` draws ceil(k/2) pairs and returns the first k values; a
trailing half-pair is discarded.  The exact position inside the stream is
the Philox state, which round-trips through :meth:`get_state` /
:meth:`set_state` as a flat tuple of integers.
"""

from __future__ import annotations

import numpy as np

_TWO_PI = 2.0 * np.pi

# Documented offset for deriving auxiliary streams (e.g. the injection
# perturbation stream of the harness) from a scenario seed.
STREAM_OFFSET = 0x9E3779B9


class GaussianStream:
    """Seeded, positionable source of uniform and standard-normal variates."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def uniform(self, size: int | tuple[int, ...]) -> np.ndarray:
        """Uniform variates in [0, 1)."""
        return self._gen.random(size)

    def normal(self, size: int | tuple[int, ...]) -> np.ndarray:
        """Standard-normal variates via the documented Box-Muller recipe."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        k = int(np.prod(shape)) if shape else 1
        pairs = (k + 1) // 2
        u = self._gen.random(2 * pairs)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(_TWO_PI * u[1::2])
        z[1::2] = r * np.sin(_TWO_PI * u[1::2])
        return z[:k].reshape(shape)

    def get_state(self) -> tuple[int, ...]:
        """Flat integer encoding of the exact stream position."""
        st = self._gen.bit_generator.state
        inner = st["state"]
        return (
            self.seed,
            *(int(v) for v in inner["counter"]),
            *(int(v) for v in inner["key"]),
            *(int(v) for v in st["buffer"]),
            int(st["buffer_pos"]),
            int(st["has_uint32"]),
            int(st["uinteger"]),
        )

    def set_state(self, flat: tuple[int, ...]) -> None:
        if len(flat) != 14:
            raise ValueError(f"expected 14 integers of stream state, got {len(flat)}")
        self.seed = int(flat[0])
        bg = np.random.Philox(key=self.seed)
        bg.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.array(flat[1:5], dtype=np.uint64),
                "key": np.array(flat[5:7], dtype=np.uint64),
            },
            "buffer": np.array(flat[7:11], dtype=np.uint64),
            "buffer_pos": int(flat[11]),
            "has_uint32": int(flat[12]),
            "uinteger": int(flat[13]),
        }
        self._gen = np.random.Generator(bg)

    @classmethod
    def from_state(cls, flat: tuple[int, ...]) -> "GaussianStream":
        stream = cls(0)
        stream.set_state(flat)
        return stream

    def spawn(self, offset: int = STREAM_OFFSET) -> "GaussianStream":
        """Independent stream with a seed derived from this one."""
        return GaussianStream(self.seed + int(offset))
