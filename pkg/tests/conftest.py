import numpy as np
import pytest

from docvault.imaging import RasterImage


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_image(rng, width, height):
    return RasterImage.from_array(
        rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    )


@pytest.fixture
def small_image(rng):
    return random_image(rng, 64, 48)
