import numpy as np


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``.

    Keys are appended to the seed's entropy, so trial ``k`` always sees the
    same stream regardless of how many other trials run or in which order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))
