import os

import numpy as np
import pytest

from mesh_stego.core.config import reset_settings
from mesh_stego.mesh import generators
from mesh_stego.mesh.io import save_mesh


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in list(os.environ):
        if name.startswith("MESH_STEGO_"):
            monkeypatch.delenv(name)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def tetra():
    return generators.tetrahedron()


@pytest.fixture
def flat_grid():
    """Planar 5x5-vertex patch with in-plane jitter on interior vertices."""
    return generators.grid(4, 4, spacing=0.1, jitter=0.2, seed=1)


@pytest.fixture
def small_sphere():
    """42 vertices."""
    return generators.noisy_sphere(1, noise=0.02, seed=3)


@pytest.fixture
def sphere():
    """162 vertices."""
    return generators.noisy_sphere(2, noise=0.02, seed=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def mesh_file(tmp_path):
    def write(mesh, name="cover.off", decimals=6):
        path = tmp_path / name
        save_mesh(path, mesh, decimals)
        return path
    return write
