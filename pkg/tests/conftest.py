"""Shared fixtures: synthetic scenes with natural-image statistics."""

import pytest

from synth import natural_image


@pytest.fixture(scope="session")
def scene():
    return natural_image(1)


@pytest.fixture(scope="session")
def scene_big():
    return natural_image(2, 512, 1024)
