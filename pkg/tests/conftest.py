import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcprotonets import SynthConfig, generate


@pytest.fixture(scope="session")
def separable_dataset():
    """10 orthonormal labels at low noise; pair items always carry a label
    and its fixed partner, so supports cover the combinations queries use."""
    return generate(SynthConfig(
        n_labels=10, dimension=32, items_per_label=12,
        cardinality_probs=(0.7, 0.3, 0.0), noise_sigma=0.05,
        co_occurrence_bias=1.0, seed=7,
    ))


@pytest.fixture(scope="session")
def noisy_multilabel_dataset():
    """Heavily multi-label, strongly paired, high-noise regime."""
    return generate(SynthConfig(
        n_labels=16, dimension=16, items_per_label=12,
        cardinality_probs=(0.2, 0.4, 0.4), noise_sigma=0.3,
        co_occurrence_bias=1.0, seed=11,
    ))
