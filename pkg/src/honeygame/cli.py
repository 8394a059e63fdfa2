"""Command-line front end.

Subcommands:

* ``solve``        one scenario -> optimal menus plus a feasibility report
* ``oracle-check`` closed-form solvers vs. the brute-force grid oracles
* ``learn``        two-tier PHC run, trajectory CSV
* ``reproduce``    named experiment (fig1..fig10, sweep) -> CSV artifact
* ``validate``     feasibility/fairness audit of a menu file

Exit code 0 on success; nonzero with a diagnostic on any invariant
violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import yaml

from .experiments import EXPERIMENTS, AuditError, run_experiment
from .model import (
    ContractItem,
    ContractMenu,
    check_fairness,
    check_feasibility,
    defensive_effectiveness,
    gcs_utility,
    participating_set,
    social_surplus,
)
from .oracle import GridSpec, grid_search_complete, grid_search_partial
from .scenario import Scenario, dump_scenario, generate_population, load_scenario
from .solver import BUDGET_EXACT, PAPER_LITERAL, solve_complete, solve_partial


def _load(args) -> Scenario:
    sc = load_scenario(args.scenario) if args.scenario else Scenario()
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "budget_mode", None):
        mode = BUDGET_EXACT if args.budget_mode == "exact" else PAPER_LITERAL
        updates["solver"] = dataclasses.replace(sc.solver, budget_mode=mode)
    return dataclasses.replace(sc, **updates) if updates else sc


def _menu_to_dict(menu: ContractMenu) -> dict:
    return {
        "t_max": menu.t_max,
        "items": [
            {"type": idx, "vdd_size": item.vdd_size, "reward": item.reward}
            for idx, item in sorted(menu.items.items())
        ],
    }


def _menu_from_file(path: str) -> ContractMenu:
    data = yaml.safe_load(Path(path).read_text())
    items = {
        int(entry["type"]): ContractItem(float(entry["vdd_size"]), float(entry["reward"]))
        for entry in data["items"]
    }
    return ContractMenu(t_max=float(data["t_max"]), items=items)


def _cmd_solve(args) -> int:
    sc = _load(args)
    pop = generate_population(sc)
    menus = {
        "complete": solve_complete(pop, sc.gcs, sc.t_max, sc.solver),
        "partial": solve_partial(pop, sc.gcs, sc.t_max, sc.solver),
    }
    failures = 0
    for name, menu in menus.items():
        report = check_feasibility(menu, pop, sc.gcs)
        fair = check_fairness(menu, pop, sc.gcs)
        print(f"== {name} information menu (t_max = {menu.t_max:g} s) ==")
        for t in participating_set(pop, sc.t_max):
            item = menu.item(t.index)
            print(
                f"  type {t.index}: C = {t.marginal_cost:.4g}, "
                f"S = {item.vdd_size:.6g} bytes, R = {item.reward:.6g}"
            )
        print(f"  GCS utility     : {gcs_utility(menu, pop, sc.gcs):.6g}")
        print(f"  social surplus  : {social_surplus(menu, pop, sc.gcs):.6g}")
        print(f"  effectiveness   : {defensive_effectiveness(menu, pop, sc.gcs):.6g}")
        print(f"  budget ok       : {report.budget_ok}")
        print(f"  IR ok           : {all(report.ir_ok.values())}")
        if name == "partial":
            print(f"  IC ok           : {all(report.ic_ok.values())}")
            print(f"  fairness        : participation={fair[0]}, reward={fair[1]}")
            if not report.all_ok:
                failures += 1
        elif not (all(report.ir_ok.values()) and report.budget_ok):
            failures += 1
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, menu in menus.items():
            (out / f"menu_{name}.yaml").write_text(yaml.safe_dump(_menu_to_dict(menu)))
        (out / "scenario.yaml").write_text(dump_scenario(sc))
        print(f"wrote menus to {out}")
    if failures:
        print(f"error: {failures} menu(s) failed their feasibility audit", file=sys.stderr)
        return 1
    return 0


def _cmd_oracle_check(args) -> int:
    sc = _load(args)
    pop = generate_population(sc)
    part = participating_set(pop, sc.t_max)
    if len(part) > 3:
        print("error: oracle check needs at most 3 participating types", file=sys.stderr)
        return 2
    grid = GridSpec(s_step=args.step, s_max=sc.gcs.s_max)
    ok = True
    for name, solver, search in (
        ("complete", solve_complete, grid_search_complete),
        ("partial", solve_partial, grid_search_partial),
    ):
        menu = solver(pop, sc.gcs, sc.t_max, sc.solver)
        obj = gcs_utility(menu, pop, sc.gcs)
        _, oracle_obj = search(pop, sc.gcs, sc.t_max, grid)
        slack = _grid_slack(pop, sc, args.step)
        status = "ok" if obj >= oracle_obj - slack else "FAIL"
        if status == "FAIL":
            ok = False
        print(
            f"{name}: solver objective {obj:.9g}, oracle {oracle_obj:.9g}, "
            f"allowed slack {slack:.3g} -> {status}"
        )
    return 0 if ok else 1


def _grid_slack(pop, sc: Scenario, step: float) -> float:
    # one grid step's worth of objective change, bounded by the steepest
    # per-type satisfaction slope at S = 0 plus the payment change
    worst = max(
        sc.gcs.satisfaction * (t.count / t.delay) + t.count * t.marginal_cost
        for t in participating_set(pop, sc.t_max)
    )
    return worst * step * len(participating_set(pop, sc.t_max))


def _cmd_learn(args) -> int:
    sc = _load(args)
    if args.episodes:
        sc = dataclasses.replace(sc, learner=dataclasses.replace(sc.learner, episodes=args.episodes))
    artifact = run_experiment("fig8", sc)
    out = args.out or "."
    written = artifact.write(out)
    print("\n".join(written))
    return 0


def _cmd_reproduce(args) -> int:
    sc = _load(args)
    try:
        artifact = run_experiment(args.experiment, sc)
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    written = artifact.write(args.out or ".")
    print("\n".join(written))
    return 0


def _cmd_validate(args) -> int:
    sc = _load(args)
    pop = generate_population(sc)
    menu = _menu_from_file(args.menu)
    report = check_feasibility(menu, pop, sc.gcs)
    fair = check_fairness(menu, pop, sc.gcs)
    print(f"IR ok        : {all(report.ir_ok.values())}")
    print(f"IC ok        : {all(report.ic_ok.values())}")
    print(f"budget ok    : {report.budget_ok}")
    print(f"monotone ok  : {report.monotone_ok}")
    print(f"worst slack  : {report.worst_violation:.6e}")
    print(f"fairness     : participation={fair[0]}, reward={fair[1]}")
    return 0 if report.all_ok and all(fair) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="honeygame", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario YAML path (defaults built in)")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument(
            "--budget-mode", choices=("exact", "paper"), dest="budget_mode",
            help="budget handling: exact re-solve vs one-shot closed form",
        )

    p = sub.add_parser("solve", help="solve one scenario and print the menus")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle-check", help="compare solvers against the grid oracle")
    common(p)
    p.add_argument("--step", type=float, default=1.0, help="oracle grid step, bytes")
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("learn", help="run the two-tier PHC game")
    common(p)
    p.add_argument("--episodes", type=int, help="override the episode count")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("reproduce", help="regenerate a named experiment CSV")
    p.add_argument("experiment", choices=EXPERIMENTS)
    common(p)
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("validate", help="audit a menu file against a scenario")
    common(p)
    p.add_argument("--menu", required=True, help="menu YAML path")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
