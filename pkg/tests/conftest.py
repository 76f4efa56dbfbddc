"""
Fixtures partagées des tests
"""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from app.core.config import settings
from app.models.params import DirichletParams, SeedSpec
from app.schemas.run import Observable, RunConfig
from app.services.sampler import derive_generator


@pytest.fixture
def make_gen() -> Callable[..., np.random.Generator]:
    """Fabrique de générateurs reproductibles"""

    def factory(seed: int = 12345, replica: int = 0) -> np.random.Generator:
        return derive_generator(SeedSpec(seed, replica))

    return factory


@pytest.fixture
def gen(make_gen) -> np.random.Generator:
    return make_gen()


@pytest.fixture
def params_n2() -> DirichletParams:
    return DirichletParams(a=1.0, n=2)


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    out = tmp_path / "results"
    out.mkdir()
    return out


@pytest.fixture
def make_config(output_dir: Path) -> Callable[..., RunConfig]:
    """RunConfig de petite taille, champs remplaçables"""

    def factory(**overrides) -> RunConfig:
        values = {
            "n": 2,
            "a": 1.0,
            "t_values": [1, 2],
            "replicas": 20,
            "master_seed": 7,
            "observables": [Observable.COLUMNS],
            "output_dir": output_dir / "run",
            "workers": 1,
        }
        values.update(overrides)
        return RunConfig(**values)

    return factory


@pytest.fixture
def small_chunks(monkeypatch):
    """Morceaux de 4 répliques pour exercer le découpage"""
    monkeypatch.setattr(settings, "CHUNK_SIZE", 4)
    return 4
