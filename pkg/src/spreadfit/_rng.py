"""Deterministic 64-bit seed derivation.

Every stochastic component of the package derives its streams from
user-facing integer seeds through SplitMix64-style hashing.  Downstream
results therefore never depend on call order, worker scheduling, or
thread count.
"""

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive(seed: int, *path: int) -> int:
    """Derive a child seed from ``seed`` and an integer path.

    Order-sensitive: ``derive(s, 1, 2) != derive(s, 2, 1)``.  Used to give
    independent purposes (objective simulation, reporting, repetition k,
    ...) their own streams without any shared state.
    """
    h = mix64(seed & _MASK64)
    for p in path:
        h = mix64((h + _GOLDEN * ((p & _MASK64) + 1)) & _MASK64)
    return h
