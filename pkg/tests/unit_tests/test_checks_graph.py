import numpy as np
import pytest

from ginibre.checks_graph.graph import mirror_gap


def test_mirror_gap_scales_with_large_values() -> None:
    at_k = np.array([1.1e8 + 2.0j, 0.5j])
    at_mirror = np.conj(at_k) + np.array([1.49e-8, 0.0])
    assert mirror_gap(at_mirror, at_k) == pytest.approx(1.49e-8 / abs(at_k[0]), rel=1e-6)


def test_mirror_gap_is_absolute_below_one() -> None:
    at_k = np.array([0.25 + 0.5j, -0.1j])
    at_mirror = np.conj(at_k) + np.array([0.0, 1e-9])
    assert mirror_gap(at_mirror, at_k) == pytest.approx(1e-9, rel=1e-6)
