"""Experiment runners: each named experiment sweeps one comparison and emits
a plottable CSV table.  Output is deterministic byte-for-byte for a fixed
scenario and seed; numbers are printed with 9 significant digits.

Menus emitted by the contract sweeps are audited first: the asymmetric-
information menu must pass the full feasibility and fairness predicates, the
complete-information menu must pass IR and the budget (it is intentionally
not incentive compatible across types).  The two baselines are not menus a
rational population would self-select truthfully and are only audited for
budget feasibility.
"""

from __future__ import annotations

import datetime
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .learn import hotboot, run_dynamic_game
from .model import (
    ContractMenu,
    GcsParams,
    Population,
    check_fairness,
    check_feasibility,
    defensive_effectiveness,
    gcs_utility,
    participating_set,
    uav_utility,
)
from .scenario import Scenario, generate_population
from .solver import linear_contract, solve_complete, solve_partial, uniform_contract

__all__ = ["RunArtifact", "EXPERIMENTS", "run_experiment"]

SCHEMES = ("complete", "partial", "linear", "uniform")

# fig7-style sweep: UAV count paired with a high and a low budget
SWEEP_COUNTS = (2, 4, 6, 8, 10)
SWEEP_BUDGETS = {
    "high": (160.0, 320.0, 480.0, 640.0, 800.0),
    "low": (92.0, 184.0, 276.0, 368.0, 460.0),
}


class AuditError(RuntimeError):
    """An emitted menu violated a feasibility or fairness invariant."""


@dataclass
class RunArtifact:
    """Result of one experiment: named CSV tables plus reproducibility
    metadata.  Identical scenario + seed give identical CSV bytes."""

    name: str
    scenario_hash: str
    seed: int
    tables: dict[str, str]
    metadata: dict = field(default_factory=dict)

    def write(self, out_dir) -> list[str]:
        from pathlib import Path

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for fname, text in self.tables.items():
            path = out / fname
            path.write_text(text)
            written.append(str(path))
        return written


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _solve_all(pop: Population, params: GcsParams, t_max: float, cfg) -> dict[str, ContractMenu]:
    return {
        "complete": solve_complete(pop, params, t_max, cfg),
        "partial": solve_partial(pop, params, t_max, cfg),
        "linear": linear_contract(pop, params, t_max),
        "uniform": uniform_contract(pop, params, t_max, cfg),
    }


def _audit(menus: dict[str, ContractMenu], pop: Population, params: GcsParams) -> None:
    partial_report = check_feasibility(menus["partial"], pop, params)
    fair = check_fairness(menus["partial"], pop, params)
    if not partial_report.all_ok or not all(fair):
        raise AuditError(
            f"asymmetric-information menu failed audit: worst slack "
            f"{partial_report.worst_violation:.3e}, fairness {fair}"
        )
    complete_report = check_feasibility(menus["complete"], pop, params)
    if not (all(complete_report.ir_ok.values()) and complete_report.budget_ok):
        raise AuditError("complete-information menu failed IR/budget audit")
    for name in ("linear", "uniform"):
        if not check_feasibility(menus[name], pop, params).budget_ok:
            raise AuditError(f"{name} baseline exceeded the budget")


def _per_type_gcs_term(t, item, params: GcsParams) -> float:
    return params.satisfaction * (t.count / t.delay) * math.log1p(item.vdd_size) \
        - t.count * item.reward


def _per_type_surplus_term(t, item, params: GcsParams) -> float:
    return params.satisfaction * (t.count / t.delay) * math.log1p(item.vdd_size) \
        - t.count * (t.marginal_cost * item.vdd_size + params.deploy_cost)


def _contract_tables(sc: Scenario, which: str) -> dict[str, str]:
    pop = generate_population(sc)
    params = sc.gcs
    menus = _solve_all(pop, params, sc.t_max, sc.solver)
    _audit(menus, pop, params)
    part = participating_set(pop, sc.t_max)
    originals = [t for t in pop.types if t.delay <= sc.t_max]

    if which in ("fig1", "fig2"):
        rows = []
        for scheme in SCHEMES:
            menu = menus[scheme]
            for t, orig in zip(part, originals):
                item = menu.item(orig.index)
                rows.append([t.index, t.marginal_cost, scheme, item.vdd_size, item.reward])
        return {f"{which}.csv": _csv(["type_index", "marginal_cost", "scheme", "S_bytes", "R"], rows)}

    if which == "fig3":
        menu = menus["partial"]
        rows = []
        for t, _ in zip(part, originals):
            for k, orig_k in zip(part, originals):
                u = uav_utility(t, menu.item(orig_k.index), sc.t_max, params)
                rows.append([t.index, k.index, u])
        return {"fig3.csv": _csv(["type_index", "item_index", "utility"], rows)}

    value_fn = {
        "fig4": lambda t, item: uav_utility(t, item, sc.t_max, params),
        "fig5": lambda t, item: _per_type_gcs_term(t, item, params),
        "fig6": lambda t, item: _per_type_surplus_term(t, item, params),
    }[which]
    rows = []
    for scheme in SCHEMES:
        menu = menus[scheme]
        for t, orig in zip(part, originals):
            rows.append([t.marginal_cost, scheme, value_fn(t, menu.item(orig.index))])
    return {f"{which}.csv": _csv(["marginal_cost", "scheme", "value"], rows)}


def _sweep_tables(sc: Scenario, metric: str) -> dict[str, str]:
    """Defensive-effectiveness (or GCS-utility) sweep over UAV counts under
    the paired high/low budget schedules."""
    rows = []
    for tag in ("high", "low"):
        for count, budget in zip(SWEEP_COUNTS, SWEEP_BUDGETS[tag]):
            # same population draw for both budget schedules at a given count,
            # so high-vs-low comparisons are apples to apples
            rng = np.random.default_rng(np.random.SeedSequence([sc.seed, count]))
            pop = generate_population(sc, rng=rng, count=count)
            params = GcsParams(
                satisfaction=sc.gcs.satisfaction,
                deploy_cost=sc.gcs.deploy_cost,
                budget=budget,
                s_max=sc.gcs.s_max,
                r_max=sc.gcs.r_max,
                vdd_requirement=sc.gcs.vdd_requirement,
            )
            menus = _solve_all(pop, params, sc.t_max, sc.solver)
            _audit(menus, pop, params)
            for scheme in SCHEMES:
                if metric == "zeta":
                    value = defensive_effectiveness(menus[scheme], pop, params)
                else:
                    value = gcs_utility(menus[scheme], pop, params)
                rows.append([count, tag, scheme, value])
    column = "zeta" if metric == "zeta" else "gcs_utility"
    name = "fig7" if metric == "zeta" else "sweep"
    return {f"{name}.csv": _csv(["uav_count", "budget_tag", "scheme", column], rows)}


def _learning_tables(sc: Scenario, which: str) -> dict[str, str]:
    pop = generate_population(sc)
    cfg = sc.learner
    tables = hotboot(pop, sc.gcs, sc.t_max, cfg, sc.seed) if cfg.hotboot_runs else None
    logs = run_dynamic_game(
        pop, sc.gcs, sc.t_max, cfg, cfg.episodes, sc.seed, warm_tables=tables
    )
    rows = []
    for idx in sorted(logs):
        log = logs[idx]
        for ep in range(len(log)):
            rows.append([
                ep,
                log.type_index,
                float(log.vdd_size[ep]),
                float(log.reward[ep]),
                float(log.uav_utility[ep]),
                float(log.gcs_utility[ep]),
            ])
    return {
        f"{which}.csv": _csv(
            ["episode", "type_index", "S_bytes", "R", "uav_utility", "gcs_utility"], rows
        )
    }


EXPERIMENTS = tuple(f"fig{i}" for i in range(1, 11)) + ("sweep",)


def run_experiment(name: str, sc: Scenario) -> RunArtifact:
    """Run one named experiment and return its CSV tables."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")
    if name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        tables = _contract_tables(sc, name)
    elif name == "fig7":
        tables = _sweep_tables(sc, "zeta")
    elif name == "sweep":
        tables = _sweep_tables(sc, "gcs_utility")
    else:
        tables = _learning_tables(sc, name)
    return RunArtifact(
        name=name,
        scenario_hash=sc.digest(),
        seed=sc.seed,
        tables=tables,
        metadata={
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "seed": sc.seed,
        },
    )
