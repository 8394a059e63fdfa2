"""Closed-form contract solvers.

Three regimes:

* complete information: the GCS pays each type exactly its cost, and the
  interior sizes follow a water-filling rule driven by a single budget scalar;
* partial information asymmetry: the same rule with marginal costs replaced
  by virtual costs that fold in the information rents of lower-cost types,
  followed by a pool-adjacent-violators (ironing) pass when the relaxed sizes
  break monotonicity, and a reward recursion that makes truth-telling binding;
* two baselines (linear price, single uniform item) used for comparison runs.

Budget handling: in ``budget-exact`` mode the scalar is solved so that total
payments hit the budget exactly even when some sizes clamp at the bounds
(piecewise-linear breakpoint scan, no iteration error); ``paper-literal``
applies the full-set closed form once and then clamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import (
    ContractItem,
    ContractMenu,
    GcsParams,
    Population,
    UavType,
    ZERO_ITEM,
    participating_set,
)

__all__ = [
    "SolverConfig",
    "RelaxedSolution",
    "solve_complete",
    "optimal_rewards",
    "solve_partial_relaxed",
    "iron",
    "solve_partial",
    "linear_contract",
    "uniform_contract",
]

BUDGET_EXACT = "budget-exact"
PAPER_LITERAL = "paper-literal"

_MONO_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    budget_mode: str = BUDGET_EXACT
    iron_tolerance: float = 1e-9
    max_iron_iters: int = 200

    def __post_init__(self) -> None:
        if self.budget_mode not in (BUDGET_EXACT, PAPER_LITERAL):
            raise ValueError(f"unknown budget_mode {self.budget_mode!r}")
        if self.iron_tolerance <= 0:
            raise ValueError("iron_tolerance must be > 0")


@dataclass(frozen=True)
class RelaxedSolution:
    """Relaxed (monotonicity-free) size solution for the asymmetric case.

    ``sizes`` align with the reindexed participating types.  ``scalar`` is
    the budget water-level; ``lambda_`` = satisfaction / scalar is the budget
    multiplier that prices a byte of type-j VDD at lambda_ * virtual_cost.
    """

    participants: tuple[UavType, ...]
    sizes: tuple[float, ...]
    lambda_: float
    scalar: float
    virtual_costs: tuple[float, ...]
    cost_gaps: tuple[float, ...]


def _virtual_costs(part: list[UavType]) -> tuple[list[float], list[float]]:
    """Per-type virtual cost A_j = N_j C_j + (C_j - C_{j+1}) * sum_{k>j} N_k
    (last type: its own cost only) and the adjacent cost gaps."""
    n = len(part)
    gaps = [
        part[j].marginal_cost - part[j + 1].marginal_cost if j < n - 1 else 0.0
        for j in range(n)
    ]
    tail = 0
    virtual = [0.0] * n
    for j in range(n - 1, -1, -1):
        virtual[j] = part[j].count * part[j].marginal_cost + gaps[j] * tail
        tail += part[j].count
    return virtual, gaps


def _solve_water_level(
    unit_costs: list[float],
    weights: list[float],
    fixed_cost: float,
    budget: float,
    s_max: float,
) -> tuple[float, list[float]]:
    """Find the scalar x and sizes S_j = clamp(x * w_j / a_j - 1, 0, s_max)
    such that fixed_cost + sum a_j S_j equals the budget.

    Total payment is piecewise linear and non-decreasing in x, so the
    crossing segment is located by a breakpoint scan and solved exactly.
    Types with zero unit cost are saturated for free.  If even full
    saturation under-spends the budget, the saturated solution is returned
    (payments then fall short of the budget; there is nothing left to buy).
    """
    n = len(unit_costs)
    free = [j for j in range(n) if unit_costs[j] <= 0.0]
    priced = [j for j in range(n) if unit_costs[j] > 0.0]

    def sizes_at(x: float) -> list[float]:
        out = [0.0] * n
        for j in free:
            out[j] = s_max
        for j in priced:
            out[j] = min(s_max, max(x * weights[j] / unit_costs[j] - 1.0, 0.0))
        return out

    def payment(x: float) -> float:
        return fixed_cost + sum(unit_costs[j] * s for j, s in enumerate(sizes_at(x)))

    if not priced:
        return 0.0, sizes_at(0.0)

    breakpoints = sorted(
        {unit_costs[j] / weights[j] for j in priced}
        | {unit_costs[j] * (1.0 + s_max) / weights[j] for j in priced}
    )
    if budget <= payment(0.0):
        return breakpoints[0], sizes_at(0.0)
    top = breakpoints[-1]
    if budget >= payment(top):
        return top, sizes_at(top)

    lo = 0.0
    for bp in breakpoints:
        if payment(bp) >= budget:
            hi = bp
            break
        lo = bp
    # On (lo, hi) the interior set is fixed; solve the linear equation there.
    mid = 0.5 * (lo + hi)
    interior = [
        j
        for j in priced
        if unit_costs[j] / weights[j] < mid < unit_costs[j] * (1.0 + s_max) / weights[j]
    ]
    base = payment(lo) - sum(
        unit_costs[j] * (lo * weights[j] / unit_costs[j] - 1.0) for j in interior
    )
    slope = sum(weights[j] for j in interior)
    if slope <= 0.0:  # flat segment already at the budget
        return lo, sizes_at(lo)
    x = (budget - base + sum(unit_costs[j] for j in interior)) / slope
    return x, sizes_at(x)


def _literal_water_level(
    unit_costs: list[float],
    weights: list[float],
    fixed_cost: float,
    budget: float,
    s_max: float,
) -> tuple[float, list[float]]:
    """One-shot closed form over the full set, then clamp."""
    x = (budget + sum(unit_costs) - fixed_cost) / sum(weights)
    sizes = [
        s_max if a <= 0.0 else min(s_max, max(x * w / a - 1.0, 0.0))
        for a, w in zip(unit_costs, weights)
    ]
    return x, sizes


def _menu_from(
    pop: Population,
    t_max: float,
    part: list[UavType],
    items: list[ContractItem],
) -> ContractMenu:
    originals = [t for t in pop.types if t.delay <= t_max]
    out = {t.index: ZERO_ITEM for t in pop.types}
    for orig, item in zip(originals, items):
        out[orig.index] = item
    return ContractMenu(t_max=t_max, items=out)


def solve_complete(
    pop: Population,
    params: GcsParams,
    t_max: float,
    cfg: SolverConfig | None = None,
) -> ContractMenu:
    """Optimal menu when the GCS observes every type: rewards equal costs
    (zero rent), sizes water-fill the budget."""
    cfg = cfg or SolverConfig()
    part = participating_set(pop, t_max)
    if not part:
        return ContractMenu.zero(pop, t_max)
    fixed = params.deploy_cost * sum(t.count for t in part)
    if params.budget < fixed:
        return ContractMenu.zero(pop, t_max)

    unit = [t.count * t.marginal_cost for t in part]
    weights = [t.count / t.delay for t in part]
    if cfg.budget_mode == BUDGET_EXACT:
        _, sizes = _solve_water_level(unit, weights, fixed, params.budget, params.s_max)
    else:
        _, sizes = _literal_water_level(unit, weights, fixed, params.budget, params.s_max)
    items = [
        ContractItem(s, t.marginal_cost * s + params.deploy_cost)
        for t, s in zip(part, sizes)
    ]
    return _menu_from(pop, t_max, part, items)


def optimal_rewards(
    sizes: list[float],
    part: list[UavType],
    params: GcsParams,
) -> list[float]:
    """Minimal feasible rewards for a monotone size schedule: the costliest
    type is paid exactly its cost, and each next reward adds that type's
    marginal cost of the size increment (binding local truth-telling)."""
    if len(sizes) != len(part):
        raise ValueError("sizes must align with participating types")
    for a, b in zip(sizes, sizes[1:]):
        if a > b + _MONO_TOL:
            raise ValueError("sizes must be non-decreasing; iron first")
    rewards: list[float] = []
    for j, (t, s) in enumerate(zip(part, sizes)):
        if j == 0:
            rewards.append(t.marginal_cost * s + params.deploy_cost)
        else:
            rewards.append(rewards[-1] + t.marginal_cost * (s - sizes[j - 1]))
    return rewards


def solve_partial_relaxed(
    pop: Population,
    params: GcsParams,
    t_max: float,
    cfg: SolverConfig | None = None,
) -> RelaxedSolution:
    """Water-filling over virtual costs, ignoring the monotonicity
    requirement.  Sizes may come out non-monotone; ``iron`` repairs that."""
    cfg = cfg or SolverConfig()
    part = participating_set(pop, t_max)
    if not part:
        return RelaxedSolution((), (), math.inf, 0.0, (), ())
    virtual, gaps = _virtual_costs(part)
    weights = [t.count / t.delay for t in part]
    fixed = params.deploy_cost * sum(t.count for t in part)
    if params.budget < fixed:
        sizes = [0.0] * len(part)
        scalar = 0.0
    elif cfg.budget_mode == BUDGET_EXACT:
        scalar, sizes = _solve_water_level(virtual, weights, fixed, params.budget, params.s_max)
    else:
        scalar, sizes = _literal_water_level(virtual, weights, fixed, params.budget, params.s_max)
    lam = params.satisfaction / scalar if scalar > 0 else math.inf
    return RelaxedSolution(
        participants=tuple(part),
        sizes=tuple(sizes),
        lambda_=lam,
        scalar=scalar,
        virtual_costs=tuple(virtual),
        cost_gaps=tuple(gaps),
    )


def _bunch_value(
    weights: list[float],
    virtual: list[float],
    lam: float,
    varpi: float,
    s_max: float,
    tol: float,
    max_iters: int,
) -> float:
    """Common size maximizing the pooled concave objective
    sum_l varpi * w_l * ln(1+S) - lam * a_l * S on [0, s_max], by ternary
    search to the configured tolerance."""
    w = sum(weights)
    a = sum(virtual)

    def objective(s: float) -> float:
        return varpi * w * math.log1p(s) - lam * a * s

    lo, hi = 0.0, s_max
    for _ in range(max_iters):
        if hi - lo <= tol:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if objective(m1) < objective(m2):
            lo = m1
        else:
            hi = m2
    return 0.5 * (lo + hi)


def _iron_blocks(
    sizes: list[float],
    sol: RelaxedSolution,
    params: GcsParams,
    cfg: SolverConfig,
) -> list[tuple[int, int, float]]:
    """Pool-adjacent-violators sweep; returns (start, end, value) blocks with
    non-decreasing values.  At most J'-1 merges occur."""
    weights = [t.count / t.delay for t in sol.participants]
    virtual = list(sol.virtual_costs)
    lam = sol.lambda_

    # each block: [start, end, value, w_list, a_list]
    blocks: list[list] = []
    for j, s in enumerate(sizes):
        blocks.append([j, j, s, [weights[j]], [virtual[j]]])
        while len(blocks) >= 2 and blocks[-2][2] > blocks[-1][2] + cfg.iron_tolerance:
            hi = blocks.pop()
            lo = blocks.pop()
            merged_w = lo[3] + hi[3]
            merged_a = lo[4] + hi[4]
            value = _bunch_value(
                merged_w, merged_a, lam, params.satisfaction, params.s_max,
                cfg.iron_tolerance, cfg.max_iron_iters,
            )
            blocks.append([lo[0], hi[1], value, merged_w, merged_a])
    return [(b[0], b[1], b[2]) for b in blocks]


def iron(
    sizes: list[float],
    sol: RelaxedSolution,
    pop: Population,
    params: GcsParams,
    cfg: SolverConfig | None = None,
) -> list[float]:
    """Replace decreasing runs with their pooled optimum until the size
    schedule is non-decreasing.  Already-monotone input is returned as is."""
    cfg = cfg or SolverConfig()
    blocks = _iron_blocks(list(sizes), sol, params, cfg)
    out = [0.0] * len(sizes)
    for start, end, value in blocks:
        for j in range(start, end + 1):
            out[j] = value
    return out


def solve_partial(
    pop: Population,
    params: GcsParams,
    t_max: float,
    cfg: SolverConfig | None = None,
) -> ContractMenu:
    """Optimal menu under partial information asymmetry: relaxed sizes,
    ironing if they are non-monotone, a budget re-solve over the bunched
    groups so the budget still binds, then the reward recursion."""
    cfg = cfg or SolverConfig()
    part = participating_set(pop, t_max)
    if not part:
        return ContractMenu.zero(pop, t_max)
    fixed = params.deploy_cost * sum(t.count for t in part)
    if params.budget < fixed:
        return ContractMenu.zero(pop, t_max)

    sol = solve_partial_relaxed(pop, params, t_max, cfg)
    sizes = list(sol.sizes)
    if any(a > b + cfg.iron_tolerance for a, b in zip(sizes, sizes[1:])):
        blocks = _iron_blocks(sizes, sol, params, cfg)
        if cfg.budget_mode == BUDGET_EXACT:
            # Bunched types share one size variable; re-solve the budget
            # scalar over the grouped super-types so payments stay exact.
            # If the re-solved group sizes break monotonicity at a clamp
            # boundary, merge the offending groups and re-solve (at most J'
            # passes, one merge each).
            weights = [t.count / t.delay for t in part]
            partition = [(s, e) for s, e, _ in blocks]
            group_sizes = [v for _, _, v in blocks]
            for _ in range(len(part)):
                group_w = [sum(weights[s : e + 1]) for s, e in partition]
                group_a = [sum(sol.virtual_costs[s : e + 1]) for s, e in partition]
                _, group_sizes = _solve_water_level(
                    group_a, group_w, fixed, params.budget, params.s_max
                )
                bad = [
                    i
                    for i in range(len(group_sizes) - 1)
                    if group_sizes[i] > group_sizes[i + 1] + cfg.iron_tolerance
                ]
                if not bad:
                    break
                merged: list[tuple[int, int]] = []
                skip = False
                for i, span in enumerate(partition):
                    if skip:
                        skip = False
                        continue
                    if i in bad:
                        merged.append((span[0], partition[i + 1][1]))
                        skip = True
                    else:
                        merged.append(span)
                partition = merged
            sizes = [0.0] * len(part)
            for (s, e), value in zip(partition, group_sizes):
                for j in range(s, e + 1):
                    sizes[j] = value
        else:
            sizes = iron(sizes, sol, pop, params, cfg)
        # clamp any residual drift from the ternary search
        sizes = _monotone_clip(sizes)

    rewards = optimal_rewards(sizes, part, params)
    items = [ContractItem(s, r) for s, r in zip(sizes, rewards)]
    return _menu_from(pop, t_max, part, items)


def _monotone_clip(sizes: list[float]) -> list[float]:
    out = list(sizes)
    for j in range(1, len(out)):
        if out[j] < out[j - 1]:
            out[j] = out[j - 1]
    return out


def linear_contract(
    pop: Population,
    params: GcsParams,
    t_max: float,
) -> ContractMenu:
    """Baseline: rewards proportional to size at the highest participating
    marginal cost.  Each type best-responds with a corner size (everything or
    nothing; indifferent types opt for nothing), and sizes scale down
    proportionally if the payments overshoot the budget."""
    part = participating_set(pop, t_max)
    if not part:
        return ContractMenu.zero(pop, t_max)
    price = max(t.marginal_cost for t in part)
    sizes = [params.s_max if t.marginal_cost < price else 0.0 for t in part]
    paid = sum(t.count * price * s for t, s in zip(part, sizes))
    if paid > params.budget and paid > 0:
        scale = params.budget / paid
        sizes = [s * scale for s in sizes]
    items = [ContractItem(s, price * s) for s in sizes]
    return _menu_from(pop, t_max, part, items)


def uniform_contract(
    pop: Population,
    params: GcsParams,
    t_max: float,
    cfg: SolverConfig | None = None,
) -> ContractMenu:
    """Baseline: every participating type gets the item designed for the
    costliest type in the asymmetric-information optimum."""
    cfg = cfg or SolverConfig()
    part = participating_set(pop, t_max)
    if not part:
        return ContractMenu.zero(pop, t_max)
    optimal = solve_partial(pop, params, t_max, cfg)
    originals = [t for t in pop.types if t.delay <= t_max]
    first = optimal.item(originals[0].index)
    items = [first for _ in part]
    return _menu_from(pop, t_max, part, items)
