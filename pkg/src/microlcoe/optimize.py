"""Bounded metaheuristic minimizers for the levelized-cost design search.

Two independent solvers are provided: a real-coded genetic algorithm (the
workhorse) and a simulated-annealing chain used to cross-check it. Both
work on raw (n, 5) design matrices in :data:`microlcoe.costs.DESIGN_FIELDS`
order and clamp every proposal to the design box, so the objective is never
asked to evaluate an out-of-bounds point.

Determinism: each run consumes a generator derived from ``(seed, path)``
via :mod:`microlcoe.rng` in a fixed serial order, so identical inputs give
bit-identical results no matter how scenarios or restarts are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .costs import (
    CostInputs,
    DESIGN_FIELDS,
    FinancialParams,
    LcoeBreakdown,
    ReactorDesign,
    bounds_arrays,
    effective_capacity_factor,
    lcoe_breakdown,
    lcoe_terms,
)
from .fuelcycle import burnup_residual
from .rng import STREAM_RESTART, SeedLike, make_rng, seed_path

DEFAULT_PENALTY_WEIGHT = 0.05  # $/MWh per (MWd/kgU)^2
STALL_IMPROVEMENT = 1e-6  # objective gain that resets the stall counter

__all__ = [
    "DEFAULT_PENALTY_WEIGHT",
    "GaConfig",
    "SaConfig",
    "MinimizeResult",
    "OptimizationResult",
    "EvaluationError",
    "penalized_objective",
    "make_design_objective",
    "ga_minimize",
    "sa_minimize",
    "multi_restart_best",
    "optimize_design",
]


class EvaluationError(RuntimeError):
    """The objective produced a non-finite value for some design."""

    def __init__(self, message: str, design=None):
        super().__init__(message)
        self.design = design


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    generations: int = 150
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    mutation_scale: float = 0.1  # fraction of each bound range
    elite_count: int = 10
    stall_generations: int = 50
    restarts: int = 20

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_scale < 0.0:
            raise ValueError("mutation_scale must be >= 0")
        if not 0 <= self.elite_count < self.population:
            raise ValueError("elite_count must be smaller than the population")
        if self.generations < 0 or self.stall_generations < 1:
            raise ValueError("generations must be >= 0 and stall_generations >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class SaConfig:
    initial_temp: float = 10.0  # objective units
    cooling_rate: float = 0.95  # per step
    steps: int = 200
    moves_per_step: int = 50
    step_scale: float = 0.1  # fraction of each bound range, at initial temperature
    restarts: int = 5

    def __post_init__(self):
        if self.initial_temp <= 0.0:
            raise ValueError("initial_temp must be positive")
        if not 0.0 < self.cooling_rate < 1.0:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.steps < 0 or self.moves_per_step < 1:
            raise ValueError("steps must be >= 0 and moves_per_step >= 1")
        if self.step_scale <= 0.0:
            raise ValueError("step_scale must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class MinimizeResult:
    """Raw outcome of one or more solver runs on a vector objective."""

    x: np.ndarray  # best design vector
    fun: float  # best objective value
    evaluations: int
    history: list = field(default_factory=list)  # best-so-far per generation/step
    restart_bests: list = field(default_factory=list)


@dataclass(frozen=True)
class OptimizationResult:
    """Best design of a levelized-cost search with its full cost context."""

    best_design: ReactorDesign
    lcoe: float  # $/MWh, equals breakdown.total
    breakdown: LcoeBreakdown
    burnup_residual: float  # MWd/kgU at the best design
    penalty_value: float  # $/MWh-equivalent added by the residual penalty
    evaluations: int
    restart_bests: tuple

    @property
    def objective(self) -> float:
        return self.lcoe + self.penalty_value


def penalized_objective(
    design: ReactorDesign,
    costs: CostInputs,
    fin: FinancialParams,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
):
    """Levelized cost plus a quadratic charge on the burnup-consistency residual.

    The cascade mass balance is an identity of the mass-flow construction, so
    only the burnup relation needs penalizing. With ``penalty_weight`` zero
    this is exactly the levelized cost.
    """
    if penalty_weight < 0.0:
        raise ValueError("penalty_weight must be >= 0")
    total = lcoe_breakdown(design, costs, fin).total
    cf = effective_capacity_factor(fin, design.t_refuel)
    residual = burnup_residual(design.x_p, design.db, design.t_refuel, cf)
    return total + penalty_weight * residual * residual


def make_design_objective(
    costs: CostInputs,
    fin: FinancialParams,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> Callable[[np.ndarray], np.ndarray]:
    """Objective over (n, 5) design matrices, suitable for both solvers.

    The matrix is checked against the design box once per call and then
    evaluated through the shared arithmetic core, which keeps population
    evaluation cheap without loosening the in-bounds contract.
    """
    if penalty_weight < 0.0:
        raise ValueError("penalty_weight must be >= 0")
    low, high = bounds_arrays()

    def objective(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != len(DESIGN_FIELDS):
            raise ValueError(f"expected an (n, {len(DESIGN_FIELDS)}) design matrix")
        if not np.all((x >= low) & (x <= high)):
            raise ValueError("design matrix leaves the search box")
        p_elec, x_p, x_t, t_refuel, db = (x[:, j] for j in range(len(DESIGN_FIELDS)))
        total = lcoe_terms(p_elec, x_p, x_t, t_refuel, db, costs, fin)[6]
        cf = effective_capacity_factor(fin, t_refuel)
        residual = burnup_residual(x_p, db, t_refuel, cf)
        return total + penalty_weight * residual * residual

    return objective


def _check_finite(values: np.ndarray, designs: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        offender = designs[np.argmax(bad)]
        raise EvaluationError(f"objective is not finite at design {offender}", design=offender)


def _selection_weights(values: np.ndarray) -> np.ndarray:
    # Shift so the worst individual gets (almost) zero weight; the epsilon
    # keeps at least one weight positive and breaks all-equal ties uniformly.
    spread = float(values.max() - values.min())
    eps = 1e-9 * spread if spread > 0.0 else 1.0
    return (values.max() - values) + eps


def ga_minimize(
    objective: Callable[[np.ndarray], np.ndarray],
    bounds: tuple[np.ndarray, np.ndarray],
    config: GaConfig,
    seed: SeedLike,
) -> MinimizeResult:
    """One genetic-algorithm run: roulette selection on shifted fitness,
    per-gene blend crossover, clamped Gaussian mutation, elitism.

    Stops after ``config.generations`` generations or once the best value has
    not improved by more than ``STALL_IMPROVEMENT`` for
    ``config.stall_generations`` generations in a row.
    """
    rng = make_rng(seed)
    low, high = (np.asarray(b, dtype=float) for b in bounds)
    span = high - low
    ndim = low.size
    pop = config.population

    x = low + rng.random((pop, ndim)) * span
    values = objective(x)
    _check_finite(values, x)
    evaluations = pop

    best_idx = int(np.argmin(values))
    best_x = x[best_idx].copy()
    best_fun = float(values[best_idx])
    history = [best_fun]
    stall = 0

    n_children = pop - config.elite_count
    for _ in range(config.generations):
        weights = _selection_weights(values)
        cumulative = np.cumsum(weights)
        draws = rng.random(2 * n_children) * cumulative[-1]
        parent_idx = np.minimum(
            np.searchsorted(cumulative, draws, side="right"), pop - 1
        )
        mothers = x[parent_idx[:n_children]]
        fathers = x[parent_idx[n_children:]]

        cross = rng.random((n_children, ndim)) < config.crossover_rate
        blend = rng.random((n_children, ndim))
        children = np.where(cross, blend * mothers + (1.0 - blend) * fathers, mothers)

        mutate = rng.random((n_children, ndim)) < config.mutation_rate
        noise = rng.normal(0.0, 1.0, (n_children, ndim)) * (config.mutation_scale * span)
        children = np.clip(children + mutate * noise, low, high)

        elite_idx = np.argsort(values, kind="stable")[: config.elite_count]
        x = np.concatenate([x[elite_idx], children])
        values = objective(x)
        _check_finite(values, x)
        evaluations += pop

        gen_best = int(np.argmin(values))
        if best_fun - values[gen_best] > STALL_IMPROVEMENT:
            best_fun = float(values[gen_best])
            best_x = x[gen_best].copy()
            stall = 0
        else:
            if values[gen_best] < best_fun:
                best_fun = float(values[gen_best])
                best_x = x[gen_best].copy()
            stall += 1
        history.append(best_fun)
        if stall >= config.stall_generations:
            break

    return MinimizeResult(
        x=best_x, fun=best_fun, evaluations=evaluations,
        history=history, restart_bests=[best_fun],
    )


def sa_minimize(
    objective: Callable[[np.ndarray], np.ndarray],
    bounds: tuple[np.ndarray, np.ndarray],
    config: SaConfig,
    seed: SeedLike,
) -> MinimizeResult:
    """One simulated-annealing chain with Metropolis acceptance and geometric
    cooling. The proposal width shrinks with the temperature so the late,
    cold phase refines instead of thrashing. ``steps == 0`` degenerates to
    scoring the random start point."""
    rng = make_rng(seed)
    low, high = (np.asarray(b, dtype=float) for b in bounds)
    span = high - low
    ndim = low.size

    current = low + rng.random(ndim) * span
    current_fun = float(objective(current[None, :])[0])
    if not np.isfinite(current_fun):
        raise EvaluationError(f"objective is not finite at design {current}", design=current)
    evaluations = 1
    best_x = current.copy()
    best_fun = current_fun
    history = [best_fun]

    temperature = config.initial_temp
    for _ in range(config.steps):
        # Width tracks the square root of the cooling ratio: wide enough to
        # travel mid-schedule, narrow enough to refine once the chain is cold.
        width = config.step_scale * span * np.sqrt(temperature / config.initial_temp)
        for _ in range(config.moves_per_step):
            proposal = np.clip(
                current + rng.normal(0.0, 1.0, ndim) * width,
                low, high,
            )
            proposal_fun = float(objective(proposal[None, :])[0])
            if not np.isfinite(proposal_fun):
                raise EvaluationError(
                    f"objective is not finite at design {proposal}", design=proposal
                )
            evaluations += 1
            delta = proposal_fun - current_fun
            if delta < 0.0 or rng.random() < np.exp(-delta / temperature):
                current = proposal
                current_fun = proposal_fun
                if current_fun < best_fun:
                    best_fun = current_fun
                    best_x = current.copy()
        temperature *= config.cooling_rate
        history.append(best_fun)

    return MinimizeResult(
        x=best_x, fun=best_fun, evaluations=evaluations,
        history=history, restart_bests=[best_fun],
    )


def multi_restart_best(
    minimizer: Callable[[tuple], MinimizeResult],
    restarts: int,
    seed: SeedLike,
) -> MinimizeResult:
    """Run ``minimizer`` with sub-seeds ``(seed, restart_index)`` and keep the
    best result; ties go to the lowest restart index."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best: Optional[MinimizeResult] = None
    bests = []
    evaluations = 0
    for index in range(restarts):
        result = minimizer(seed_path(seed, STREAM_RESTART, index))
        bests.append(result.fun)
        evaluations += result.evaluations
        if best is None or result.fun < best.fun:
            best = result
    assert best is not None
    return MinimizeResult(
        x=best.x, fun=best.fun, evaluations=evaluations,
        history=best.history, restart_bests=bests,
    )


def optimize_design(
    costs: CostInputs,
    fin: FinancialParams,
    *,
    method: str = "ga",
    ga_config: GaConfig | None = None,
    sa_config: SaConfig | None = None,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
    seed: SeedLike = 0,
) -> OptimizationResult:
    """Minimize the penalized levelized cost over the design box.

    ``method`` selects the solver ("ga" or "sa"); the number of restarts
    comes from the matching config. Returns the winning design with its cost
    breakdown, residual, and the best value of every restart.
    """
    objective = make_design_objective(costs, fin, penalty_weight)
    bounds = bounds_arrays()
    if method == "ga":
        config = ga_config if ga_config is not None else GaConfig()
        runner = lambda s: ga_minimize(objective, bounds, config, s)
        restarts = config.restarts
    elif method == "sa":
        config = sa_config if sa_config is not None else SaConfig()
        runner = lambda s: sa_minimize(objective, bounds, config, s)
        restarts = config.restarts
    else:
        raise ValueError("method must be 'ga' or 'sa'")

    raw = multi_restart_best(runner, restarts, seed)
    design = ReactorDesign.from_array(raw.x)
    breakdown = lcoe_breakdown(design, costs, fin)
    cf = effective_capacity_factor(fin, design.t_refuel)
    residual = float(burnup_residual(design.x_p, design.db, design.t_refuel, cf))
    return OptimizationResult(
        best_design=design,
        lcoe=float(breakdown.total),
        breakdown=breakdown,
        burnup_residual=residual,
        penalty_value=penalty_weight * residual * residual,
        evaluations=raw.evaluations,
        restart_bests=tuple(raw.restart_bests),
    )
