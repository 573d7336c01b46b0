"""Deterministic random substreams.

Every Monte Carlo chunk draws each of its variables from its own Philox
stream keyed by ``(seed, chunk, variable)``, so results do not depend on
how chunks are scheduled across workers.
"""

import numpy as np

# stable ids for the named variables; never renumber
VARIABLES = {
    "jumps_plus": 0,
    "jumps_minus": 1,
    "brownian": 2,
    "variance": 3,
    "generic": 7,
}


def substream(seed: int, chunk: int = 0, variable: str = "generic") -> np.random.Generator:
    key = (int(chunk), VARIABLES[variable])
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))
