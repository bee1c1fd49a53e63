"""
Command-line front door: gen, label, train, eval and inspect.

JSON summaries go to stdout; diagnostics go to stderr. Exit codes: 0 success,
2 configuration error, 3 I/O error, 4 not found.
"""
import argparse
import json
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

from src.autolabel.pipeline import label_dataset
from src.autolabel.qa import ground_truth_action, label_scene
from src.cli.config import CliConfig, load_cli_config
from src.core.exceptions import DatasetIOError, NotFoundError, PlannerError
from src.core.logging_config import app_logger
from src.domain.codec import read_qas, read_scenes
from src.domain.types import Scene
from src.domain.vocabulary import TrafficLightState
from src.metrics.report import evaluate
from src.planner.checkpoint import Checkpoint, save_checkpoint
from src.planner.params import E2E_PREFIX, EMB_NAME, VLM_PREFIX, init_checkpoint
from src.simworld.generator import generate_dataset
from src.simworld.rasterizer import LIGHT_POSITION
from src.training.config import STAGE_ORDER, stages_from_numbers
from src.training.e2e_training import train_e2e
from src.training.loss_log import write_loss_csv
from src.training.stages import run_three_stage

STAGE_FILES = {name: f"vlm_stage{i}.json" for i, name in enumerate(STAGE_ORDER, 1)}
E2E_FILE = "e2e.json"
LOSS_FILE = "losses.csv"


def _emit(payload: Dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_gen(args: argparse.Namespace, config: CliConfig) -> int:
    config = config.with_overrides(jobs=args.jobs).with_overrides("sim", n_scenes=args.n, seed=args.seed)
    _emit(generate_dataset(config.sim, args.out, jobs=config.jobs))
    return 0


def cmd_label(args: argparse.Namespace, config: CliConfig) -> int:
    dv = {} if args.dv is None else {"dv_acc": args.dv, "dv_dec": -args.dv}
    config = config.with_overrides("labels", tau_lat=args.tau_lat, v_stop=args.v_stop, **dv)
    _emit(label_dataset(args.in_path, args.out, config.labels))
    return 0


def _subset(ckpt: Checkpoint, prefixes) -> Checkpoint:
    return Checkpoint(params=ckpt.select(prefixes), meta=dict(ckpt.meta))


def cmd_train(args: argparse.Namespace, config: CliConfig) -> int:
    config = config.with_overrides(seed=args.seed)
    stage_names = stages_from_numbers(args.stages)
    stages = [config.stage_config(name) for name in stage_names]

    scenes = read_scenes(args.scenes)
    qas = read_qas(args.qas)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetIOError(f"cannot create output directory {out_dir}: {e}") from e

    checkpoint = init_checkpoint(config.model.model_copy(update={"seed": config.seed}))
    result = run_three_stage(stages, checkpoint, scenes, qas)
    losses = list(result.losses)

    written: List[str] = []
    for name in stage_names:
        path = out_dir / STAGE_FILES[name]
        save_checkpoint(_subset(result.per_stage[name], (VLM_PREFIX,)), path)
        written.append(str(path))

    if args.e2e:
        e2e_config = config.e2e.model_copy(update={"seed": config.seed})
        trained, e2e_losses = train_e2e(result.checkpoint, scenes, e2e_config, config.labels)
        path = out_dir / E2E_FILE
        save_checkpoint(_subset(trained, (E2E_PREFIX, EMB_NAME)), path)
        written.append(str(path))
        losses.extend(e2e_losses)

    loss_path = out_dir / LOSS_FILE
    write_loss_csv(loss_path, losses)
    final = {}
    for row in losses:
        final[row["stage"]] = row["loss"]
    _emit({"checkpoints": written, "loss_csv": str(loss_path), "final_loss": final})
    return 0


def cmd_eval(args: argparse.Namespace, config: CliConfig) -> int:
    config = config.with_overrides(
        "eval",
        conditioning=args.gt_actions,
        accuracy_mode=args.accuracy_mode,
        l2_mode=args.l2_mode,
        views=args.views,
    )
    report = evaluate(args.vlm, args.e2e, args.scenes, args.qas, args.report, config.eval)
    _emit(report.model_dump())
    return 0


SKETCH_ROWS = 21
SKETCH_COLS = 41
SKETCH_CELL = 2.0
SKETCH_MARKS = {"vehicle": "V", "pedestrian": "P", "cyclist": "C"}


def sketch(scene: Scene) -> str:
    """
    Top-down ASCII view: x forward (up), y left, one cell per 2 m.

    Marks: E ego, * ego future, V/P/C agents, L traffic light.
    """
    grid = [[" "] * SKETCH_COLS for _ in range(SKETCH_ROWS)]
    origin_row, origin_col = SKETCH_ROWS - 6, SKETCH_COLS // 2

    def put(x: float, y: float, mark: str) -> None:
        row = origin_row - int(math.floor(x / SKETCH_CELL + 0.5))
        col = origin_col - int(math.floor(y / SKETCH_CELL + 0.5))
        if 0 <= row < SKETCH_ROWS and 0 <= col < SKETCH_COLS:
            grid[row][col] = mark

    if scene.ego_future is not None:
        for x, y in scene.ego_future.waypoints:
            put(x, y, "*")
    if scene.traffic_light is not TrafficLightState.NONE:
        put(*LIGHT_POSITION, "L")
    for agent in scene.agents:
        put(agent.x, agent.y, SKETCH_MARKS[agent.agent_class.value])
    put(0.0, 0.0, "E")
    border = "+" + "-" * SKETCH_COLS + "+"
    return "\n".join([border, *("|" + "".join(row) + "|" for row in grid), border])


def cmd_inspect(args: argparse.Namespace, config: CliConfig) -> int:
    scenes = {s.scene_id: s for s in read_scenes(args.scenes)}
    scene = scenes.get(args.id)
    if scene is None:
        raise NotFoundError(f"scene '{args.id}' not found in {args.scenes}")

    lines = [
        f"scene {scene.scene_id}: nav={scene.nav_command.value} light={scene.traffic_light.value} "
        f"ego_speed={scene.ego.speed:.2f} agents={len(scene.agents)}"
    ]
    for agent in scene.agents:
        lines.append(
            f"  agent {agent.id} {agent.agent_class.value}: x={agent.x:.1f} y={agent.y:.1f} "
            f"heading={agent.heading:.2f} speed={agent.speed:.1f}"
        )
    for qa in label_scene(scene, config.labels):
        lines.append(f"{qa.qa_type.value}: {qa.answer}")
    lines.append(f"meta_action: {ground_truth_action(scene, config.labels)}")
    lines.append(sketch(scene))
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planner", description="Desk-scale structured driving planner")
    parser.add_argument("--config", default=None, help="JSON config file (flags override its values)")
    # --config is also accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Generate a synthetic scene dataset")
    gen.add_argument("--n", type=int, help="Number of scenes")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", required=True)
    gen.add_argument("--jobs", type=int, help="Worker processes (default 1)")
    gen.set_defaults(handler=cmd_gen)

    label = sub.add_parser("label", parents=[common], help="Auto-label scenes with planning QA records")
    label.add_argument("--in", dest="in_path", required=True)
    label.add_argument("--out", required=True)
    label.add_argument("--tau-lat", type=float)
    label.add_argument("--dv", type=float, help="Symmetric speed-change threshold")
    label.add_argument("--v-stop", type=float)
    label.set_defaults(handler=cmd_label)

    train = sub.add_parser("train", parents=[common], help="Run training stages and optional E2E training")
    train.add_argument("--scenes", required=True)
    train.add_argument("--qas", required=True)
    train.add_argument("--stages", default="1,2,3", help="Comma-separated stage numbers, e.g. 1,2,3")
    train.add_argument("--out", required=True, help="Output directory")
    train.add_argument("--e2e", action="store_true", help="Also train E2E-lite")
    train.add_argument("--seed", type=int)
    train.set_defaults(handler=cmd_train)

    ev = sub.add_parser("eval", parents=[common], help="Evaluate checkpoints and write a metrics report")
    ev.add_argument("--vlm", required=True)
    ev.add_argument("--e2e", required=True)
    ev.add_argument("--scenes", required=True)
    ev.add_argument("--qas", required=True)
    ev.add_argument("--report")
    ev.add_argument("--gt-actions", choices=["none", "pred", "gt"], help="Conditioning source for E2E-lite")
    ev.add_argument("--accuracy-mode", choices=["joint", "per_axis"])
    ev.add_argument("--l2-mode", choices=["at_step", "averaged"])
    ev.add_argument("--views", choices=["surround", "front"])
    ev.set_defaults(handler=cmd_eval)

    inspect = sub.add_parser("inspect", parents=[common], help="Show one scene with its QA records")
    inspect.add_argument("--scenes", required=True)
    inspect.add_argument("--id", required=True)
    inspect.set_defaults(handler=cmd_inspect)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_cli_config(args.config)
        return args.handler(args, config)
    except PlannerError as e:
        app_logger.debug(f"{args.command} failed: {type(e).__name__}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
