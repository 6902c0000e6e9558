import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FULL_SCALE = os.environ.get("BGSHRINK_FULL_SCALE") == "1"


def pytest_collection_modifyitems(config, items):
    if FULL_SCALE:
        return
    skip = pytest.mark.skip(reason="set BGSHRINK_FULL_SCALE=1 to run full-size reproductions")
    for item in items:
        if "full_scale" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def test_image():
    """256x256 grayscale camera image (2x2 block mean of the 512x512 original)."""
    data = pytest.importorskip("skimage.data")
    img = data.camera().astype(float)
    return img.reshape(256, 2, 256, 2).mean(axis=(1, 3))


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.linalg.norm(b)
    return np.linalg.norm(a - b) / scale if scale > 0 else np.linalg.norm(a - b)
