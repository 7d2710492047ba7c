_MASK_64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    """ splitmix64 finalizer, a bijective avalanche mixer on 64-bit words. """
    x = (x + _GOLDEN_GAMMA) & _MASK_64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK_64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK_64
    return x ^ (x >> 31)


def mix_seed(base_seed: int, *words: int) -> int:
    """
    Derives a 64-bit stream seed from a base seed and further words, e.g.
    (base_seed, cell_index, replicate). Each word is folded in with the
    splitmix64 mixer, so streams for different words are decorrelated and the
    derivation does not depend on execution order.

    Args:
      base_seed (int): Base seed of the experiment.
      words (int): Further nonnegative integers identifying the stream.

    Returns:
      int: Seed in [0, 2^64).
    """

    state = _splitmix64(base_seed & _MASK_64)
    for word in words:
        state = _splitmix64(state ^ (word & _MASK_64))
    return state
