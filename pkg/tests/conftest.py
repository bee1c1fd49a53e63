"""
Shared fixtures: a small generated dataset and a tiny model configuration.
"""
import pytest

from src.autolabel.qa import label_scene
from src.planner.config import ModelConfig
from src.simworld.config import SimConfig
from src.simworld.generator import generate_scenes


@pytest.fixture(scope="session")
def small_scenes():
    return generate_scenes(SimConfig(n_scenes=24, seed=11))


@pytest.fixture(scope="session")
def small_qas(small_scenes):
    return [qa for scene in small_scenes for qa in label_scene(scene)]


@pytest.fixture(scope="session")
def tiny_model():
    return ModelConfig(width=8, heads=2, m_img=4, trunk_layers=1, decoder_layers=1, ff_hidden=8, plan_tokens=2)


@pytest.fixture
def dataset_files(tmp_path, small_scenes, small_qas):
    """Scene and QA JSONL files for the small dataset."""
    from src.domain.codec import write_records

    scenes_path = tmp_path / "scenes.jsonl"
    qas_path = tmp_path / "qas.jsonl"
    write_records(scenes_path, small_scenes)
    write_records(qas_path, small_qas)
    return scenes_path, qas_path
