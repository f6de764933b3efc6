"""Command-line driver.

Exit codes: 0 success (including searches that find no consistent
equilibrium), 2 usage, 3 capacity, 4 I/O or file format.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from gamedecomp import gameio
from gamedecomp.core import EXHAUSTIVE_CAP
from gamedecomp.decomposer import (LinearDecomposition, as_linear, decompose_by_components,
                                   fit_linear, verify_linear)
from gamedecomp.equilibrium import NONE_EXIST, brute_force_nash, consistent_equilibria
from gamedecomp.errors import CapacityError, GameFormatError
from gamedecomp.experiments import EXPERIMENTS
from gamedecomp.generator import GeneratorSpec, generate_game, grouped_influencer_sets
from gamedecomp.pipeline import analyze_game, score_recovery, true_edges
from gamedecomp.spectral import (DEFAULT_TAU_V, CUT_TAU_LAMBDA, CUT_TAU_V,
                                 InfluencerReport, InteractionGraph, approximate_cut,
                                 build_graph)

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _write(out_dir: Path, files: dict[str, str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text)
        paths.append(path)
    return paths


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _member_sets(text):
    try:
        return [[int(j) for j in part.split(",")] for part in text.split(";") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected member sets like '0,1;0,2', got {text!r}")


def cmd_generate(args) -> int:
    if args.players < 1 or args.choices < 1:
        raise UsageError("--players and --choices must be positive")
    if args.payoff_min > args.payoff_max:
        raise UsageError("--payoff-min exceeds --payoff-max")
    sets, groups = grouped_influencer_sets(args.players, args.groups, args.min_influencers,
                                           args.max_influencers, args.seed)
    spec = GeneratorSpec(args.players, args.choices, sets,
                         (args.payoff_min, args.payoff_max), args.seed)
    game = generate_game(spec)
    out = Path(args.out_dir)
    name = args.name
    paths = _write(out, {
        f"{name}.json": gameio.dumps(gameio.game_to_dict(game, args.seed)),
        f"{name}.truth.json": gameio.dumps(
            gameio.truth_to_dict(game.effective_influencers(), groups)),
    })
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def _truth_for(args):
    path = Path(args.truth) if args.truth else gameio.truth_path_for(args.game)
    if not path.exists():
        if args.truth:
            raise FileNotFoundError(f"ground-truth file not found: {path}")
        return None
    return gameio.truth_edges(gameio.read_json(path))


def cmd_analyze(args) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    game = gameio.read_game(args.game)
    truth = _truth_for(args)
    analysis = analyze_game(game, args.samples, args.seed, args.tau_lambda, args.tau_v,
                            harvest=not args.per_subject, threads=args.threads)
    graph = analysis.graph
    files = {
        "matrices.json": gameio.dumps([m.to_dict() for m in analysis.matrices]),
        "matrices.txt": "\n".join(m.to_text() for m in analysis.matrices),
        "eigen.json": gameio.dumps([r.to_dict() for r in analysis.reports]),
        "graph.json": gameio.dumps(graph.to_dict()),
        "graph.dot": graph.to_dot(),
    }
    summary = {"players": game.n_players, "samples_per_player": args.samples,
               "rows_per_matrix": analysis.rows_per_matrix,
               "difference_samples": analysis.difference_samples,
               "deviation_pairs": analysis.deviation_pairs,
               "utility_evals": analysis.oracle_evals,
               "edges": len(graph.edges),
               "components": [list(c) for c in graph.components]}
    if truth is not None:
        recovery = score_recovery(graph.edge_set, truth)
        summary["recovery"] = recovery.to_dict()
        if args.sweep:
            curve = []
            for L in args.sweep:
                if L < 2:
                    raise UsageError("sweep values of L must be at least 2")
                g = analyze_game(game, L, args.seed, args.tau_lambda, args.tau_v,
                                 harvest=not args.per_subject, threads=args.threads).graph
                curve.append({"L": L, **score_recovery(g.edge_set, truth).to_dict()})
            summary["sweep"] = curve
        files["recovery.json"] = gameio.dumps(summary["recovery"] | (
            {"sweep": summary["sweep"]} if "sweep" in summary else {}))
    _write(Path(args.out_dir), files)

    if args.format == "json":
        print(gameio.dumps(summary), end="")
    elif args.format == "dot":
        print(graph.to_dot(), end="")
    else:
        print(f"players: {game.n_players}  L: {args.samples}  "
              f"rows per matrix: {analysis.rows_per_matrix}  "
              f"differences: {analysis.difference_samples}  "
              f"deviation pairs: {analysis.deviation_pairs}")
        print(f"edges: {len(graph.edges)}  components: "
              f"{[len(c) for c in graph.components]}")
        if truth is not None:
            r = summary["recovery"]
            print(f"recovery: precision {r['precision']:.3f}  recall {r['recall']:.3f}  "
                  f"exact {r['exact']}")
            for point in summary.get("sweep", []):
                print(f"  L={point['L']:<4d} recall {point['recall']:.3f}")
    return EXIT_OK


def _load_reports(path: Path) -> list[InfluencerReport]:
    if not path.exists():
        raise FileNotFoundError(f"eigenreport not found: {path} (run 'analyze' first)")
    try:
        return [InfluencerReport.from_dict(d) for d in gameio.read_json(path)]
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"malformed eigenreport {path}: {exc}") from exc


def cmd_cut(args) -> int:
    if args.tau_lambda < 0 or args.tau_v < 0:
        raise UsageError("thresholds must be nonnegative")
    out = Path(args.out_dir)
    reports = _load_reports(Path(args.eigen) if args.eigen else out / "eigen.json")
    graph = build_graph(reports)
    cut = approximate_cut(graph, args.tau_lambda, args.tau_v, reports)
    _write(out, {"cut_graph.json": gameio.dumps(cut.to_dict()),
                 "cut_graph.dot": cut.to_dot("cut")})
    if args.format == "json":
        print(gameio.dumps(cut.to_dict()), end="")
    elif args.format == "dot":
        print(cut.to_dot("cut"), end="")
    else:
        print(f"cut at lambda > {args.tau_lambda}, |v| > {args.tau_v}: "
              f"{len(cut.cut_edges)} edges removed")
        print(f"components: {len(graph.components)} -> {len(cut.components)}")
        for c in cut.components:
            print(f"  size {len(c):>3d}: {list(c)}")
    if args.sweep:
        for tau in args.sweep:
            swept = approximate_cut(graph, tau, args.tau_v, reports)
            print(f"  lambda > {tau:<8g} components {len(swept.components)}")
    return EXIT_OK


def _solve_decomposition(args, game):
    source = args.decomposition
    if source == "components":
        if args.graph:
            graph = InteractionGraph.from_dict(gameio.read_json(args.graph))
        else:
            graph = analyze_game(game, args.samples, args.seed, threads=args.threads).graph
        decomp = as_linear(decompose_by_components(game, graph))
        verify_linear(game, decomp, n_samples=args.verify_samples, seed=args.seed)
        return decomp, "components"
    if source == "linear-fit":
        if not args.members:
            raise UsageError("--decomposition linear-fit needs --members, e.g. '0,1;0,2'")
        return fit_linear(game, args.members, n_samples=args.verify_samples,
                          seed=args.seed), "linear-fit"
    decomp = LinearDecomposition.from_dict(game, gameio.read_json(source))
    verify_linear(game, decomp, n_samples=args.verify_samples, seed=args.seed)
    return decomp, str(source)


def cmd_solve(args) -> int:
    game = gameio.read_game(args.game)
    decomp, label = _solve_decomposition(args, game)
    if not decomp.verified:
        print(f"warning: decomposition residual {decomp.residual:.3e} exceeds tolerance "
              f"{decomp.tolerance:.1e}; results rely on certification only", file=sys.stderr)
    result = consistent_equilibria(decomp, require_verified=False)
    doc = result.to_dict()
    doc["decomposition"] = {"source": label, "residual": decomp.residual,
                            "members": [list(m) for m in decomp.member_sets]}
    if game.size <= EXHAUSTIVE_CAP:
        brute = brute_force_nash(game)
        doc["brute_force"] = {"profiles": [list(a) for a in brute.profiles],
                              "evals": brute.profiles_scanned,
                              "oracle_evals": brute.evals_used}
    files = {"equilibria.json": gameio.dumps(doc)}
    if label == "linear-fit":
        files["decomposition.json"] = gameio.dumps(decomp.to_dict())
    _write(Path(args.out_dir), files)

    if args.format == "json":
        print(gameio.dumps(doc), end="")
    else:
        for s in result.part_equilibria:
            print(f"part {list(s.members)}: {len(s.profiles)} equilibria, "
                  f"{s.profiles_scanned} profiles scanned")
        print(f"status: {result.status}")
        print(f"consistent equilibria: {[list(a) for a in result.profiles]}")
        line = f"profiles scanned: {result.profiles_scanned}"
        if "brute_force" in doc:
            line += f" vs {doc['brute_force']['evals']} for brute force"
        print(line)
    if result.status == NONE_EXIST:
        print("warning: no consistent equilibrium exists for this decomposition",
              file=sys.stderr)
    return EXIT_OK


def cmd_repro(args) -> int:
    if args.experiment == "exp1":
        if args.samples < 2:
            raise UsageError("--samples must be at least 2")
        files = EXPERIMENTS["exp1"](args.seed, args.samples, args.tau_lambda, args.tau_v,
                                    threads=args.threads)
    else:
        files = EXPERIMENTS["exp2"](args.seed)
    out = Path(args.out_dir)
    _write(out, files)
    if args.format == "json":
        print(json.dumps(sorted(files)))
    else:
        print(files["report.md"])
        print(f"wrote {len(files)} files to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out-dir", default=".", help="directory for output files")
    common.add_argument("--format", choices=("json", "dot", "md"), default="md",
                        help="what to print on stdout")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sampling")

    parser = argparse.ArgumentParser(
        prog="gamedecomp",
        description="Recover interaction graphs of black-box games, decompose them, "
                    "and search for consistent equilibria.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a random table game")
    p.add_argument("--players", type=int, default=24)
    p.add_argument("--choices", type=int, default=2)
    p.add_argument("--payoff-min", type=int, default=0)
    p.add_argument("--payoff-max", type=int, default=9)
    p.add_argument("--groups", type=int, default=2, help="number of independent groups")
    p.add_argument("--min-influencers", type=int, default=1)
    p.add_argument("--max-influencers", type=int, default=3)
    p.add_argument("--name", default="game", help="file stem (default 'game')")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", parents=[common], help="recover the interaction graph")
    p.add_argument("game", help="game JSON file")
    p.add_argument("--samples", "-L", type=int, default=10, help="samples per player")
    p.add_argument("--tau-lambda", type=float, default=None,
                   help="eigenvalue threshold (default 1e-9 * trace)")
    p.add_argument("--tau-v", type=float, default=DEFAULT_TAU_V)
    p.add_argument("--per-subject", action="store_true",
                   help="draw separate samples for every subject instead of sharing pairs")
    p.add_argument("--truth", help="ground-truth graph (default: <game>.truth.json if present)")
    p.add_argument("--sweep", type=_int_list, help="also score these L values, e.g. 2,4,8")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("cut", parents=[common], help="cut weak edges from an analysis")
    p.add_argument("--eigen", help="eigenreport (default <out-dir>/eigen.json)")
    p.add_argument("--tau-lambda", type=float, default=CUT_TAU_LAMBDA)
    p.add_argument("--tau-v", type=float, default=CUT_TAU_V)
    p.add_argument("--sweep", type=_float_list, help="also count components at these tau-lambda")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("solve", parents=[common], help="search for consistent equilibria")
    p.add_argument("game", help="game JSON file")
    p.add_argument("--decomposition", default="components",
                   help="'components', 'linear-fit', or a decomposition JSON file")
    p.add_argument("--members", type=_member_sets, help="member sets for linear-fit")
    p.add_argument("--graph", help="graph JSON for 'components' (default: analyze first)")
    p.add_argument("--samples", "-L", type=int, default=10)
    p.add_argument("--verify-samples", type=int, default=10**5,
                   help="profiles sampled when the game is too big to check exhaustively")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("repro", parents=[common], help="rerun a reproduction experiment")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--samples", "-L", type=int, default=10)
    p.add_argument("--tau-lambda", type=float, default=CUT_TAU_LAMBDA)
    p.add_argument("--tau-v", type=float, default=CUT_TAU_V)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (OSError, GameFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
