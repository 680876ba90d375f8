import numpy as np
import pytest

from parcop.pair_copulas import (
    CLAYTON,
    FGM,
    FRANK,
    GAUSSIAN,
    GUMBEL,
    INDEPENDENCE,
    PairCopulaSpec,
)


@pytest.fixture(scope="session")
def representative_specs():
    """One spec per family plus sign/rotation variants."""
    return [
        PairCopulaSpec(INDEPENDENCE),
        PairCopulaSpec(GAUSSIAN, 0.6),
        PairCopulaSpec(GAUSSIAN, -0.8),
        PairCopulaSpec(FRANK, 5.0),
        PairCopulaSpec(FRANK, -3.0),
        PairCopulaSpec(CLAYTON, 2.0),
        PairCopulaSpec(CLAYTON, 2.0, 90),
        PairCopulaSpec(CLAYTON, 0.7, 180),
        PairCopulaSpec(GUMBEL, 2.0),
        PairCopulaSpec(GUMBEL, 1.5, 270),
        PairCopulaSpec(FGM, 0.7),
        PairCopulaSpec(FGM, -1.0),
    ]


@pytest.fixture
def interior_grid():
    return np.linspace(0.05, 0.95, 19)
