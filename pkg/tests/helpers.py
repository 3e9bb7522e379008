import random

from spirkit.gf import FieldMatrix
from spirkit.mmsp import Mmsp, induced_access

import oracles


def random_verified_mmsps(count, seed=0, qs=(2, 3), max_n=4, max_z=5):
    """Random MMSPs paired with the access structure they realize.

    Candidates with no accepted set are skipped since they realize nothing.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        q = rng.choice(qs)
        n = rng.randint(2, max_n)
        z = rng.randint(n, max_z)
        x = rng.randint(1, 2)
        y = rng.randint(1, 2)
        g = FieldMatrix(q, oracles.random_matrix(rng, q, z, x + y))
        m = Mmsp(g, x, tuple(oracles.random_surjection(rng, z, n)), n)
        structure = induced_access(m)
        if structure.min_authorized:
            out.append((m, structure))
    return out
