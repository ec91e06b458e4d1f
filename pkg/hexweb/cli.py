"""Command line of hexweb: build, verify, explore, distance, walk and replay.

Every command writes its results under ``--out`` and prints a one-line summary. Exit codes:
0 ok, 1 verification failure, 2 configuration error, 3 budget exceeded.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from config import DRIFT_TOL, HEXWEB_LOG, LOG_FILE, MEMORY_CAP, OUTPUT_DIR, REMOVAL_CAP, THREADS

from .errors import EXIT_OK, EXIT_VERIFICATION_FAILED, HexwebError, InvalidConfig, VerificationFailed, exit_code_for
from .explorer import MODES, TOPO, WEIGHTED, bfs_ball, distance, random_walk, replay, stats
from .hyp_geom import FNConfig, GeoState, build_base, circle_holonomy_length, curve_sum_error, state_residual
from .pants_bridge import base_pants, phi
from .reports import ensure_dir, write_adjacency_jsonl, write_dot, write_stats_tsv, write_suite_report
from .schemas import (
    FNModel,
    dump_model,
    fn_from_model,
    geostate_to_model,
    hexmap_to_model,
    load_state,
    move_line,
    read_move_log,
    wstate_to_model,
)
from .surface_core import SurfaceSig, canonical_form, key_digest
from .verification import SUITES, SuiteParams, run_suite
from .weighted_graph import WeightedState, base_weighted_state, weighted_key

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Everything a command needs, resolved from the flags"""

    command: str
    signature: Optional[SurfaceSig]
    fn: Optional[FNConfig]
    mode: str
    seed: int
    removal_cap: int
    memory_cap: int
    threads: int
    out: Path
    store: bool

    @property
    def weighted(self) -> bool:
        return self.mode == WEIGHTED

    def root(self) -> Any:
        """Base state of the configured graph"""
        if self.weighted:
            return base_weighted_state(self.fn)
        return phi(base_pants(self.surface()))

    def surface(self) -> SurfaceSig:
        if self.fn is not None:
            return self.fn.signature
        if self.signature is None:
            raise InvalidConfig("Give --genus/--boundary or --fn")
        return self.signature


def setup_logging(level: str = HEXWEB_LOG, log_file: Optional[str] = LOG_FILE) -> None:
    logging.basicConfig(level=getattr(logging, level), format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    if log_file:
        handler = logging.FileHandler(log_file)
        handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        logging.getLogger().addHandler(handler)


def read_fn(path: str) -> FNConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidConfig(f"Cannot read FN file {path}: {e}")
    try:
        return fn_from_model(FNModel.model_validate_json(text))
    except ValueError as e:
        raise InvalidConfig(f"Malformed FN file {path}: {e}")


def resolve(args: argparse.Namespace) -> RunConfig:
    fn = read_fn(args.fn) if getattr(args, "fn", None) else None
    mode = getattr(args, "mode", TOPO)
    if mode == WEIGHTED and fn is None:
        raise InvalidConfig("Weighted mode needs FN coordinates: pass --fn")
    signature = None
    if getattr(args, "genus", None) is not None:
        signature = SurfaceSig(args.genus, args.boundary)
        if fn is not None and fn.signature != signature:
            raise InvalidConfig(f"--fn describes {fn.signature}, flags ask for {signature}")
    if args.removal_cap < 0 or args.memory_cap <= 0 or args.threads <= 0:
        raise InvalidConfig("Budgets must be positive")
    return RunConfig(
        command=args.command,
        signature=signature,
        fn=fn,
        mode=mode,
        seed=args.seed,
        removal_cap=args.removal_cap,
        memory_cap=args.memory_cap,
        threads=args.threads,
        out=ensure_dir(Path(args.out)),
        store=args.store,
    )


def state_key(state: Any) -> bytes:
    if isinstance(state, WeightedState):
        return weighted_key(state)
    if isinstance(state, GeoState):
        return canonical_form(state.hex_map)
    return canonical_form(state)


def dump_state(state: Any, canonical: bool = True) -> str:
    if isinstance(state, WeightedState):
        return dump_model(wstate_to_model(state))
    if isinstance(state, GeoState):
        return dump_model(geostate_to_model(state))
    return dump_model(hexmap_to_model(state, canonical=canonical))


def store_run(config: RunConfig, summary: Dict[str, Any], passed: bool = True, samples=None) -> None:
    """Record the run in the results store when ``--store`` was given"""
    if not config.store:
        return
    from .database_service import DatabaseService
    from .models import SessionLocal, init_database

    init_database()
    service = DatabaseService()
    db = SessionLocal()
    try:
        signature = str(config.surface()) if (config.signature or config.fn) else "-"
        run = service.record_run(db, config.command, signature, config.seed, {"mode": config.mode})
        for kind, rows in (samples or {}).items():
            service.record_samples(db, run.id, kind, rows)
        service.finish_run(db, run.id, "passed" if passed else "failed", summary)
    finally:
        db.close()


# Commands

def cmd_build(config: RunConfig) -> int:
    if config.fn is None:
        hex_map = phi(base_pants(config.surface()))
        path = config.out / "base_hexmap.json"
        path.write_text(dump_state(hex_map))
        print(f"{config.surface()}: {hex_map.hexagon_count} hexagons, {len(hex_map.arc_labels())} arcs -> {path}")
        store_run(config, {"file": str(path), "key": key_digest(canonical_form(hex_map))})
        return EXIT_OK
    state = build_base(config.fn)
    report = fn_self_consistency(state, config.fn)
    if config.weighted:
        path = config.out / "base_wstate.json"
        path.write_text(dump_state(base_weighted_state(config.fn)))
    else:
        path = config.out / "base_geostate.json"
        path.write_text(dump_state(state))
    (config.out / "fn_report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    print(f"{config.surface()}: residual {report['residual']:.3g}, length gap {report['length_gap']:.3g} -> {path}")
    store_run(config, report, report["passed"])
    if not report["passed"]:
        raise VerificationFailed(f"FN self-consistency above {DRIFT_TOL}")
    return EXIT_OK


def fn_self_consistency(state: GeoState, fn: FNConfig) -> Dict[str, Any]:
    """Hexagon residuals, segment sums and developed lengths of every curve against the FN lengths"""
    gap = 0.0
    circles = sorted({state.hex_map.circle[s] for s in state.hex_map.curve_slots()})
    for circle_id in circles:
        wanted = fn.length(circle_id // 2)
        gap = max(gap, abs(circle_holonomy_length(state, circle_id) - wanted) / wanted)
    residual = state_residual(state)
    sums = curve_sum_error(state)
    return {
        "residual": residual,
        "curve_sum_error": sums,
        "length_gap": gap,
        "circles": len(circles),
        "passed": max(residual, sums, gap) <= DRIFT_TOL,
    }


def cmd_verify(config: RunConfig, suite: str, scale: float, radius: Optional[int]) -> int:
    names: List[str] = list(SUITES) if suite == "all" else [suite]
    if suite != "all" and suite not in SUITES:
        raise InvalidConfig(f"Unknown suite {suite}; choose from all, {', '.join(SUITES)}")
    params = SuiteParams(
        seed=config.seed,
        scale=scale,
        removal_cap=config.removal_cap,
        memory_cap=config.memory_cap,
        threads=config.threads,
        radius=radius,
    )
    passed = True
    for name in names:
        report = run_suite(name, params)
        write_suite_report(config.out, report)
        print(report.summary())
        store_run(config, report.model_dump(exclude={"samples"}), report.passed, report.samples)
        passed = passed and report.passed
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def cmd_explore(config: RunConfig, radius: int) -> int:
    ball = bfs_ball(config.root(), radius, config.mode, config.removal_cap, config.memory_cap, config.threads)
    summary = stats(ball)
    write_dot(config.out / "ball.dot", ball)
    write_adjacency_jsonl(config.out / "ball.jsonl", ball)
    write_stats_tsv(config.out / "stats.tsv", summary)
    logger.info(f"Explored {len(ball)} vertices within radius {radius}")
    print(f"{config.mode} ball of radius {radius}: {summary.vertex_count} vertices, {summary.edge_count} edges")
    store_run(config, vars(summary))
    return EXIT_OK


def cmd_distance(config: RunConfig, first_path: str, second_path: str, max_radius: int) -> int:
    first, second = load_state_file(first_path), load_state_file(second_path)
    if isinstance(first, WeightedState) != isinstance(second, WeightedState):
        raise InvalidConfig("Both states must be weighted or both unweighted")
    if isinstance(first, WeightedState):
        mode = WEIGHTED
    else:
        mode = TOPO
        first = first.hex_map if isinstance(first, GeoState) else first
        second = second.hex_map if isinstance(second, GeoState) else second
    value = distance(first, second, mode, max_radius, config.removal_cap, config.memory_cap)
    print(value)
    store_run(config, {"distance": value, "mode": mode})
    return EXIT_OK


def cmd_walk(config: RunConfig, steps: int) -> int:
    if steps < 0:
        raise InvalidConfig(f"Negative step count {steps}")
    root = config.root()
    result = random_walk(root, steps, config.seed, config.mode, config.removal_cap)
    (config.out / "walk_root.json").write_text(dump_state(root, canonical=False))
    with (config.out / "walk_moves.jsonl").open("w") as handle:
        for step in result.log:
            handle.write(move_line(step.edge) + "\n")
    (config.out / "walk_final.json").write_text(dump_state(result.final, canonical=False))
    final_key = key_digest(state_key(result.final))
    print(f"{len(result.log)} steps, final {final_key}, max residual {result.max_residual:.3g}")
    store_run(config, {"steps": len(result.log), "final": final_key, "max_residual": result.max_residual})
    return EXIT_OK


def cmd_replay(config: RunConfig, root_path: str, moves_path: str) -> int:
    root = load_state_file(root_path)
    mode = WEIGHTED if isinstance(root, WeightedState) else TOPO
    if isinstance(root, GeoState):
        root = root.hex_map
    edges = read_move_log(Path(moves_path).read_text().splitlines())
    final = replay(root, edges, mode)
    (config.out / "replay_final.json").write_text(dump_state(final, canonical=False))
    print(key_digest(state_key(final)))
    return EXIT_OK


def load_state_file(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidConfig(f"Cannot read state file {path}: {e}")
    try:
        return load_state(text)
    except ValueError as e:
        raise InvalidConfig(f"Malformed state file {path}: {e}")


# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=None, help="Genus of the surface.")
    common.add_argument("--boundary", type=int, default=0, help="Number of boundary components.")
    common.add_argument("--fn", default=None, help="fn.v1 file with Fenchel-Nielsen coordinates.")
    common.add_argument("--mode", choices=MODES, default=TOPO, help="topo explores H(S), weighted explores H(X).")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--removal-cap", type=int, default=REMOVAL_CAP)
    common.add_argument("--memory-cap", type=int, default=MEMORY_CAP)
    common.add_argument("--threads", type=int, default=THREADS)
    common.add_argument("--out", default=OUTPUT_DIR, help="Output directory.")
    common.add_argument("--store", action="store_true", help="Record the run in the results store.")

    parser = argparse.ArgumentParser(prog="hexweb", description="Hexagon decomposition graphs of surfaces.")
    parser.add_argument("--log-level", default=HEXWEB_LOG)
    parser.add_argument("--log-file", default=LOG_FILE, help="Empty string disables the log file.")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("build", parents=[common], help="Write the base state of a surface.")

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite.")
    verify.add_argument("suite", help=f"all or one of: {', '.join(SUITES)}")
    verify.add_argument("--scale", type=float, default=1.0, help="Sample size multiplier.")
    verify.add_argument("--radius", type=int, default=None, help="Ball radius override.")

    explore = commands.add_parser("explore", parents=[common], help="Explore a ball around the base state.")
    explore.add_argument("--radius", type=int, default=2)

    dist = commands.add_parser("distance", parents=[common], help="Distance between two state files.")
    dist.add_argument("--from", dest="source", required=True)
    dist.add_argument("--to", dest="target", required=True)
    dist.add_argument("--radius", type=int, default=6, help="Largest distance searched.")

    walk = commands.add_parser("walk", parents=[common], help="Seeded random walk with a replayable move log.")
    walk.add_argument("--steps", type=int, default=1000)

    rep = commands.add_parser("replay", parents=[common], help="Replay a move log from a root state.")
    rep.add_argument("--root", required=True)
    rep.add_argument("--moves", required=True)
    return parser


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    if args.command == "build":
        return cmd_build(config)
    if args.command == "verify":
        return cmd_verify(config, args.suite, args.scale, args.radius)
    if args.command == "explore":
        return cmd_explore(config, args.radius)
    if args.command == "distance":
        return cmd_distance(config, args.source, args.target, args.radius)
    if args.command == "walk":
        return cmd_walk(config, args.steps)
    return cmd_replay(config, args.root, args.moves)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level.upper(), args.log_file or None)
    try:
        return run(args)
    except HexwebError as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed ({e.code}): {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
