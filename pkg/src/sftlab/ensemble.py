"""The product probability space over window subsets and the induced random SFT.

Sampling is counter-based: a Philox stream keyed by (seed, stream tag, d, n,
|A|) with the trial index in the counter, one 64-bit word per window bit.  A
window is retained when the word's top 53 bits fall below round-down(alpha *
2^53), so identical (seed, trial) give identical draws on every platform, and
draws for different alphas are coupled monotonically (same uniforms, different
threshold).
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from . import patterns as pt
from .orbits import Orbit, orbit_windows

TAG_WINDOW_BITS = 0x57494E44  # window-retention stream
TAG_BOUNDARY = 0x42445259     # periodic-boundary sampling stream
TAG_GENERIC = 0x47454E52      # anything else

_MAGIC = b"SFTOMEGA"


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _mix_key(*vals) -> int:
    h = 0
    for v in vals:
        h = _splitmix64(h ^ (int(v) & 0xFFFFFFFFFFFFFFFF))
    return h


def stream_words(seed: int, tag: int, context, trial: int, count: int) -> np.ndarray:
    """`count` raw 64-bit words from the (seed, tag, context; trial) stream."""
    k0 = _mix_key(seed, tag, *context)
    k1 = _mix_key(tag, seed, *context, 0xA5A5A5A5)
    key = np.array([k0, k1], dtype=np.uint64)
    counter = np.array([0, 0, 0, int(trial) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    bg = np.random.Philox(key=key, counter=counter)
    return bg.random_raw(count)


def bernoulli_threshold(alpha: float) -> int:
    """Exact integer threshold: a 53-bit uniform below this has probability
    round-down(alpha * 2^53) / 2^53."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must be in [0, 1], got {alpha}")
    return int(alpha * 2.0 ** 53)


@dataclass(frozen=True)
class EnsembleParams:
    alphabet: int
    d: int
    n: int
    alpha: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must be in [0, 1], got {self.alpha}")
        pt.window_table_size(self.alphabet, self.d, self.n)

    @property
    def n_windows(self) -> int:
        return self.alphabet ** (self.n ** self.d)


class AllowedSet:
    """Bitset over all side-n windows; set bit = window retained.  The SFT it
    defines forbids exactly the windows with clear bits."""

    __slots__ = ("d", "n", "alphabet", "bits", "seed", "trial")

    def __init__(self, d, n, alphabet, bits, seed=0, trial=0):
        w = pt.window_table_size(alphabet, d, n)
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (w,):
            raise DomainError(f"bitset must have length {w}")
        self.d, self.n, self.alphabet = d, n, alphabet
        self.bits = bits
        self.seed, self.trial = seed, trial

    @property
    def n_windows(self) -> int:
        return len(self.bits)

    def allowed(self, code: int) -> bool:
        return bool(self.bits[code])

    def allowed_codes(self, codes) -> np.ndarray:
        return self.bits[np.asarray(codes, dtype=np.int64)]

    def forbidden_codes(self):
        return np.nonzero(~self.bits)[0]

    def __eq__(self, other):
        return (
            isinstance(other, AllowedSet)
            and (self.d, self.n, self.alphabet) == (other.d, other.n, other.alphabet)
            and np.array_equal(self.bits, other.bits)
        )

    def save(self, path) -> None:
        """Header (d, n, |A|, seed, trial) + raw little-endian bitset."""
        packed = np.packbits(self.bits, bitorder="little")
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<QQQqq", self.d, self.n, self.alphabet,
                                self.seed, self.trial))
            f.write(packed.tobytes())

    @classmethod
    def load(cls, path) -> "AllowedSet":
        with open(path, "rb") as f:
            if f.read(8) != _MAGIC:
                raise DomainError("not an allowed-set file")
            d, n, alphabet, seed, trial = struct.unpack("<QQQqq", f.read(40))
            raw = np.frombuffer(f.read(), dtype=np.uint8)
        w = pt.window_table_size(alphabet, d, n)
        bits = np.unpackbits(raw, bitorder="little")[:w].astype(bool)
        return cls(d, n, alphabet, bits, seed, trial)


def sample_uniform_words(params: EnsembleParams, trial: int) -> np.ndarray:
    return stream_words(
        params.seed, TAG_WINDOW_BITS,
        (params.d, params.n, params.alphabet), trial, params.n_windows,
    )


def sample(params: EnsembleParams, trial: int) -> AllowedSet:
    """Retain each window independently with probability alpha; deterministic
    in (seed, trial)."""
    words = sample_uniform_words(params, trial)
    thr = bernoulli_threshold(params.alpha)
    bits = (words >> np.uint64(11)) < np.uint64(thr) if thr else np.zeros(len(words), bool)
    return AllowedSet(params.d, params.n, params.alphabet, bits, params.seed, trial)


def sample_bits_batch(params: EnsembleParams, trials) -> np.ndarray:
    """(len(trials), n_windows) boolean matrix; row t is sample(params, trials[t])."""
    thr = np.uint64(bernoulli_threshold(params.alpha))
    out = np.empty((len(trials), params.n_windows), dtype=bool)
    for i, t in enumerate(trials):
        words = sample_uniform_words(params, t)
        out[i] = (words >> np.uint64(11)) < thr if thr else False
    return out


def is_locally_allowed(omega: AllowedSet, u: pt.Pattern) -> bool:
    """True when every side-n window of u is retained."""
    codes = pt.windows(u, omega.n)
    return bool(omega.allowed_codes(sorted(codes)).all())


def orbit_allowed(omega: AllowedSet, orbit: Orbit) -> bool:
    """True when every window of the periodic configuration is retained; this
    holds with probability alpha^(#windows)."""
    codes = orbit_windows(orbit, omega.n)
    return bool(omega.allowed_codes(sorted(codes)).all())
