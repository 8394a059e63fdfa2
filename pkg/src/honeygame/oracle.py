"""Brute-force ground truth for the contract solvers on small instances.

Enumerates candidate size schedules on a byte grid, derives rewards from the
respective closed-form pricing rule, filters by direct constraint
enumeration, and keeps the best objective.  Deliberately independent of the
solver algebra: no water levels, no virtual costs beyond the reward
recursion the menus themselves require.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ContractItem,
    ContractMenu,
    GcsParams,
    Population,
    ZERO_ITEM,
    gcs_utility,
    participating_set,
)

__all__ = ["GridSpec", "grid_search_complete", "grid_search_partial"]

MAX_ORACLE_TYPES = 3


@dataclass(frozen=True)
class GridSpec:
    """Enumeration grid: step size in bytes over [0, s_max]."""

    s_step: float
    s_max: float

    def __post_init__(self) -> None:
        if self.s_step <= 0:
            raise ValueError("s_step must be > 0")
        ratio = self.s_max / self.s_step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("s_max must be an integer multiple of s_step")

    @property
    def points(self) -> np.ndarray:
        return np.arange(round(self.s_max / self.s_step) + 1) * self.s_step


def _menu(pop: Population, t_max: float, originals, sizes, rewards) -> ContractMenu:
    items = {t.index: ZERO_ITEM for t in pop.types}
    for t, s, r in zip(originals, sizes, rewards):
        items[t.index] = ContractItem(float(s), float(r))
    return ContractMenu(t_max=t_max, items=items)


def grid_search_complete(
    pop: Population,
    params: GcsParams,
    t_max: float,
    grid: GridSpec,
) -> tuple[ContractMenu, float]:
    """Exhaustive cost-priced search: every size combination on the grid,
    rewards equal to cost, budget-feasible argmax of the GCS objective."""
    part = participating_set(pop, t_max)
    if len(part) > MAX_ORACLE_TYPES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_TYPES} types, got {len(part)}")
    originals = [t for t in pop.types if t.delay <= t_max]
    pts = grid.points
    best_obj = -math.inf
    best: tuple | None = None
    if not part:
        menu = ContractMenu.zero(pop, t_max)
        return menu, gcs_utility(menu, pop, params)

    counts = np.array([t.count for t in part], dtype=float)
    costs = np.array([t.marginal_cost for t in part])
    delays = np.array([t.delay for t in part])

    grids = np.meshgrid(*([pts] * len(part)), indexing="ij")
    sizes = np.stack([g.ravel() for g in grids], axis=-1)  # (M, J')
    rewards = costs * sizes + params.deploy_cost
    paid = (counts * rewards).sum(axis=1)
    feasible = paid <= params.budget + 1e-9
    if not feasible.any():
        menu = ContractMenu.zero(pop, t_max)
        return menu, gcs_utility(menu, pop, params)
    objective = (
        params.satisfaction * (counts / delays) * np.log1p(sizes)
        - counts * rewards
    ).sum(axis=1)
    objective[~feasible] = -np.inf
    idx = int(np.argmax(objective))
    best_obj = float(objective[idx])
    best = (sizes[idx], rewards[idx])
    menu = _menu(pop, t_max, originals, best[0], best[1])
    return menu, best_obj


def grid_search_partial(
    pop: Population,
    params: GcsParams,
    t_max: float,
    grid: GridSpec,
) -> tuple[ContractMenu, float]:
    """Exhaustive search over non-decreasing size tuples with recursion-priced
    rewards, retained only if the full IR/IC/budget enumeration passes."""
    part = participating_set(pop, t_max)
    if len(part) > MAX_ORACLE_TYPES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_TYPES} types, got {len(part)}")
    originals = [t for t in pop.types if t.delay <= t_max]
    if not part:
        menu = ContractMenu.zero(pop, t_max)
        return menu, gcs_utility(menu, pop, params)

    pts = grid.points
    counts = [t.count for t in part]
    costs = [t.marginal_cost for t in part]
    delays = [t.delay for t in part]
    n = len(part)

    best_obj = -math.inf
    best: tuple | None = None
    for combo in itertools.combinations_with_replacement(pts, n):
        sizes = list(combo)  # non-decreasing by construction
        rewards = [costs[0] * sizes[0] + params.deploy_cost]
        for j in range(1, n):
            rewards.append(rewards[-1] + costs[j] * (sizes[j] - sizes[j - 1]))
        paid = sum(c * r for c, r in zip(counts, rewards))
        if paid > params.budget + 1e-9:
            continue
        if not _enumerate_feasible(sizes, rewards, costs, params.deploy_cost):
            continue
        obj = sum(
            params.satisfaction * (counts[j] / delays[j]) * math.log1p(sizes[j])
            - counts[j] * rewards[j]
            for j in range(n)
        )
        if obj > best_obj:
            best_obj = obj
            best = (sizes, rewards)
    if best is None:
        menu = ContractMenu.zero(pop, t_max)
        return menu, gcs_utility(menu, pop, params)
    menu = _menu(pop, t_max, originals, best[0], best[1])
    return menu, best_obj


def _enumerate_feasible(sizes, rewards, costs, deploy_cost, tol=1e-9) -> bool:
    """Direct check of every IR and ordered-pair IC constraint."""
    n = len(sizes)
    for j in range(n):
        own = rewards[j] - costs[j] * sizes[j] - deploy_cost
        if own < -tol:
            return False
        for k in range(n):
            if k == j:
                continue
            other = rewards[k] - costs[j] * sizes[k] - deploy_cost
            if own < other - tol:
                return False
    return True
