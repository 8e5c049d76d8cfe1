import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a (seed, keys...) path; independent of call order."""
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
