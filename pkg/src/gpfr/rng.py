"""Named, reproducible random streams.

Every stochastic step in the pipeline draws from its own stream keyed by
(master seed, purpose tag, *ids). Streams are SeedSequence-spawned PCG64
generators, so they are independent and reproducible across platforms, and
adding e.g. a synthesis class never perturbs another class's draws.
"""

from __future__ import annotations

import numpy as np

# Purpose tags. Never renumber: stream identities are part of the
# reproducibility contract baked into saved artifacts.
INIT = 1          # weight initialization
SHUFFLE = 2       # epoch shuffling during training
DROPOUT = 3       # dropout masks
SYNTHESIS = 4     # pseudo representation sampling (iteration, class)
CMNIST_ASSIGN = 5  # background/foreground color assignment (split index)
SPLIT = 6         # seen/unseen class splits (attempt index)
PALETTE = 7       # color palette sampling
GLYPHS = 8        # procedural source-digit rendering
VALIDATION = 9    # validation class draws


def stream(seed: int, purpose: int, *ids: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, purpose, *ids)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, purpose) + tuple(int(i) for i in ids))))
