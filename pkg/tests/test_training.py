"""
Tests for stage training, parameter freezing, targets and E2E-lite training.
"""
import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.autolabel.qa import ground_truth_action, label_scene
from src.core.exceptions import ConfigError
from src.domain.vocabulary import MetaAction, QAType
from src.planner.params import E2E_PREFIX, EMB_NAME, VLM_PREFIX, init_checkpoint
from src.planner.vlm import call_counts
from src.training.config import E2ETrainConfig, StageConfig, default_stage_config, stages_from_numbers
from src.training.e2e_training import ground_truth_actions, train_e2e
from src.training.loss_log import write_loss_csv
from src.training.stages import freeze_mask, prepare_data, run_stage, run_three_stage
from src.training.targets import build_targets
from tests.helpers import make_agent, make_scene

QUICK = dict(epochs=1, batch_size=8)


@pytest.fixture
def checkpoint(tiny_model):
    return init_checkpoint(tiny_model)


def _changed(before, after, prefix=""):
    """Names under ``prefix`` whose arrays differ byte-wise."""
    return {
        name
        for name in before.params
        if name.startswith(prefix) and before.params[name].tobytes() != after.params[name].tobytes()
    }


def _frozen_names(checkpoint, trainable):
    return {name for name, frozen in freeze_mask(checkpoint.params, trainable).items() if frozen}


def test_freeze_mask_matches_prefixes():
    mask = freeze_mask(["vlm.adapter.W1", "vlm.head.lat.W", "e2e.nav"], ("vlm.adapter.",))
    assert mask == {"e2e.nav": True, "vlm.adapter.W1": False, "vlm.head.lat.W": True}


@pytest.mark.parametrize("stage", ["mix_pretrain", "driving_finetune", "planning_finetune"])
def test_stage_leaves_frozen_parameters_untouched(stage, checkpoint, small_scenes, small_qas):
    cfg = default_stage_config(stage, **QUICK)
    updated, _ = run_stage(cfg, checkpoint, small_scenes, small_qas)
    changed = _changed(checkpoint, updated)
    assert changed
    assert not changed & _frozen_names(checkpoint, cfg.trainable)
    assert updated.meta["stages"] == [stage]


def test_mix_pretrain_only_trains_adapter_and_probes(checkpoint, small_scenes, small_qas):
    updated, _ = run_stage(default_stage_config("mix_pretrain", epochs=2, batch_size=8), checkpoint, small_scenes, small_qas)
    for name in _changed(checkpoint, updated):
        assert name.startswith(("vlm.adapter.", "vlm.probe."))
    assert _changed(checkpoint, updated, "vlm.probe.")


def test_driving_finetune_leaves_action_heads_at_init(checkpoint, small_scenes, small_qas):
    updated, _ = run_stage(default_stage_config("driving_finetune", **QUICK), checkpoint, small_scenes, small_qas)
    assert not _changed(checkpoint, updated, "vlm.head.")
    assert not _changed(checkpoint, updated, "vlm.probe.")
    assert _changed(checkpoint, updated, "vlm.aux.")


def test_stages_one_and_two_leave_action_heads_zero(checkpoint, small_scenes, small_qas):
    stages = [default_stage_config(name, **QUICK) for name in stages_from_numbers("1,2")]
    result = run_three_stage(stages, checkpoint, small_scenes, small_qas)
    assert not result.checkpoint.params["vlm.head.lat.W"].any()
    assert not result.checkpoint.params["vlm.head.lon.W"].any()
    assert sorted(result.per_stage) == ["driving_finetune", "mix_pretrain"]


def test_planning_stage_needs_plan_records(checkpoint, small_scenes, small_qas):
    without_plan = [qa for qa in small_qas if qa.qa_type is not QAType.PLAN]
    with pytest.raises(ConfigError):
        run_stage(default_stage_config("planning_finetune", **QUICK), checkpoint, small_scenes, without_plan)


def test_stage_order_is_enforced(checkpoint, small_scenes, small_qas):
    stages = [default_stage_config("planning_finetune", **QUICK), default_stage_config("mix_pretrain", **QUICK)]
    with pytest.raises(ConfigError):
        run_three_stage(stages, checkpoint, small_scenes, small_qas)


def test_training_without_scenes_fails(checkpoint):
    with pytest.raises(ConfigError):
        run_stage(default_stage_config("mix_pretrain", **QUICK), checkpoint, [], [])


def test_one_loss_record_per_epoch(checkpoint, small_scenes, small_qas):
    cfg = default_stage_config("driving_finetune", epochs=3, batch_size=8)
    _, losses = run_stage(cfg, checkpoint, small_scenes, small_qas)
    assert [row["epoch"] for row in losses] == [1, 2, 3]
    assert {row["stage"] for row in losses} == {"driving_finetune"}
    assert all(np.isfinite(row["loss"]) for row in losses)


def test_stage_training_is_deterministic(checkpoint, small_scenes, small_qas):
    cfg = default_stage_config("planning_finetune", epochs=2, batch_size=8, seed=4)
    first, first_losses = run_stage(cfg, checkpoint, small_scenes, small_qas)
    second, second_losses = run_stage(cfg, checkpoint, small_scenes, small_qas)
    assert first_losses == second_losses
    assert not _changed(first, second)


def test_stage_config_validation():
    with pytest.raises(ConfigError):
        StageConfig(stage="mix_pretrain", trainable=("vlm.",), loss_terms={"bogus": 1.0})
    with pytest.raises(ConfigError):
        StageConfig(stage="mix_pretrain", trainable=("vlm.",), loss_terms={"recon": 0.0})
    with pytest.raises(ConfigError):
        StageConfig(stage="mix_pretrain", trainable=(), loss_terms={"recon": 1.0})
    with pytest.raises(ConfigError):
        default_stage_config("stage_four")
    with pytest.raises(ConfigError):
        default_stage_config("mix_pretrain", seed=-3)
    with pytest.raises(ConfigError):
        E2ETrainConfig(seed=-1)


def test_stages_from_numbers():
    assert stages_from_numbers("1,2,3") == ("mix_pretrain", "driving_finetune", "planning_finetune")
    assert stages_from_numbers("3") == ("planning_finetune",)
    for bad in ("2,1", "1,1", "4", "x", ""):
        with pytest.raises(ConfigError):
            stages_from_numbers(bad)


def test_targets_mask_missing_motion():
    empty = make_scene("scene-empty")
    busy = make_scene("scene-busy", agents=[make_agent(1, x=10.0, y=3.0)])
    qas = label_scene(empty) + label_scene(busy)
    targets = build_targets([empty, busy], qas)
    assert_array_equal(targets["motion"].mask, [0.0, 1.0])
    assert_array_equal(targets["vru"].values, [0.0, 0.0])
    assert targets["plan"].count == 2
    assert targets["density"].values[1] == 1.0


def test_prepare_data_aligns_targets_with_scenes(small_scenes, small_qas):
    data = prepare_data(small_scenes, small_qas)
    assert len(data) == len(small_scenes)
    assert data.targets["plan"].count == len(small_scenes)


def test_ground_truth_actions_match_plan_answers(small_scenes, small_qas):
    plans = {qa.scene_id: MetaAction.parse(qa.answer).index for qa in small_qas if qa.qa_type is QAType.PLAN}
    actions = ground_truth_actions(small_scenes)
    assert list(actions) == [plans[s.scene_id] for s in small_scenes]
    assert list(actions) == [ground_truth_action(s).index for s in small_scenes]


def test_ground_truth_actions_need_futures(small_scenes):
    with pytest.raises(ConfigError):
        ground_truth_actions([small_scenes[0].without_future()])


def test_e2e_training_never_predicts(checkpoint, small_scenes):
    before = call_counts["predict_meta_action"]
    updated, losses = train_e2e(checkpoint, small_scenes, E2ETrainConfig(epochs=2, batch_size=8))
    assert call_counts["predict_meta_action"] == before
    assert len(losses) == 2
    assert {row["stage"] for row in losses} == {"e2e"}
    assert updated.meta["e2e_conditioning"] == "gt"


def test_e2e_training_only_touches_e2e_and_embeddings(checkpoint, small_scenes):
    updated, _ = train_e2e(checkpoint, small_scenes, E2ETrainConfig(epochs=1, batch_size=8))
    changed = _changed(checkpoint, updated)
    assert changed
    assert all(name.startswith((E2E_PREFIX, EMB_NAME)) for name in changed)
    assert not _changed(checkpoint, updated, VLM_PREFIX)


def test_e2e_training_seed_controls_result(checkpoint, small_scenes):
    config = E2ETrainConfig(epochs=1, batch_size=8, seed=1)
    first, _ = train_e2e(checkpoint, small_scenes, config)
    again, _ = train_e2e(checkpoint, small_scenes, config)
    other, _ = train_e2e(checkpoint, small_scenes, config.model_copy(update={"seed": 2}))
    assert not _changed(first, again)
    assert _changed(first, other, E2E_PREFIX)


def test_unconditioned_e2e_leaves_embeddings(checkpoint, small_scenes):
    updated, _ = train_e2e(checkpoint, small_scenes, E2ETrainConfig(epochs=1, batch_size=8, conditioning="none"))
    assert_array_equal(updated.params[EMB_NAME], checkpoint.params[EMB_NAME])
    assert updated.meta["e2e_conditioning"] == "none"


def test_loss_csv(tmp_path):
    path = tmp_path / "losses.csv"
    write_loss_csv(path, [{"epoch": 1, "stage": "mix_pretrain", "loss": 0.5}])
    write_loss_csv(path, [{"epoch": 1, "stage": "e2e", "loss": 1.25}], append=True)
    assert path.read_text(encoding="utf-8").splitlines() == [
        "epoch,stage,loss",
        "1,mix_pretrain,0.500000",
        "1,e2e,1.250000",
    ]


@pytest.mark.slow
def test_planning_finetune_reduces_loss(checkpoint, small_scenes, small_qas):
    cfg = default_stage_config("planning_finetune", epochs=15, batch_size=8, lr=3e-3)
    _, losses = run_stage(cfg, checkpoint, small_scenes, small_qas)
    assert losses[-1]["loss"] < losses[0]["loss"]


@pytest.mark.slow
def test_e2e_training_reduces_loss(checkpoint, small_scenes):
    _, losses = train_e2e(checkpoint, small_scenes, E2ETrainConfig(epochs=15, batch_size=8, lr=3e-3))
    assert losses[-1]["loss"] < losses[0]["loss"]
