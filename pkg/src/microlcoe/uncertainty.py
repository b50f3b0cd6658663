"""Probability models for the uncertain unit costs, their discretized value
grids, and roulette-wheel scenario sampling.

Each uncertain parameter is discretized onto an equispaced grid (100 points
by default) and an index is drawn with probability proportional to the
probability density at each grid point. Scenario ``i`` of a study is a pure
function of ``(seed, i)``, so studies can be generated or re-generated in
any order, batch size, or process layout without changing a single draw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .costs import CostInputs, DEFAULT_COSTS
from .rng import STREAM_SCENARIO, SeedLike, make_rng

PDF_KINDS = ("uniform", "triangular")

# Which cost parameters vary in each study mode. "all" is the union; "none"
# pins everything at nominal.
MODE_GROUPS = {
    "none": (),
    "occ": ("occ",),
    "om": ("n_fte", "s_fte", "fom", "vom"),
    "fuel": ("c_yc", "c_conv", "c_swu", "c_fab"),
}
MODE_GROUPS["all"] = MODE_GROUPS["occ"] + MODE_GROUPS["om"] + MODE_GROUPS["fuel"]

STUDY_MODES = ("all", "occ", "om", "fuel", "none")

__all__ = [
    "PDF_KINDS",
    "MODE_GROUPS",
    "STUDY_MODES",
    "Pdf",
    "UncertainParameter",
    "Scenario",
    "pdf_density",
    "parameter_grid",
    "roulette_select",
    "sample_scenario",
    "generate_study",
    "default_uncertain_parameters",
]


@dataclass(frozen=True)
class Pdf:
    """Uniform or triangular density on [min, max], in the parameter's units."""

    kind: str
    min: float
    max: float
    mode: Optional[float] = None  # triangular only; defaults to the nominal

    def __post_init__(self):
        if self.kind not in PDF_KINDS:
            raise ValueError(f"pdf kind must be one of {PDF_KINDS}")
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or self.min >= self.max:
            raise ValueError("pdf requires min < max")
        if self.kind == "triangular":
            if self.mode is None or not self.min <= self.mode <= self.max:
                raise ValueError("triangular pdf requires min <= mode <= max")
        elif self.mode is not None:
            raise ValueError("uniform pdf takes no mode")


@dataclass(frozen=True)
class UncertainParameter:
    """One uncertain cost parameter with its density and value grid."""

    name: str
    pdf: Pdf
    nominal: float
    grid_points: int = 100

    def __post_init__(self):
        if not self.pdf.min <= self.nominal <= self.pdf.max:
            raise ValueError(f"nominal of {self.name} must lie within [min, max]")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")


@dataclass(frozen=True)
class Scenario:
    """One sampled cost realization plus the grid indices that produced it."""

    id: int
    mode: str
    costs: CostInputs
    grid_indices: dict

    def __post_init__(self):
        if self.mode not in STUDY_MODES:
            raise ValueError(f"mode must be one of {STUDY_MODES}")
        if self.id < 0:
            raise ValueError("scenario id must be >= 0")


def pdf_density(pdf: Pdf, x):
    """Probability density of ``pdf`` at ``x`` (scalar or array), 1/units."""
    x = np.asarray(x, dtype=float)
    span = pdf.max - pdf.min
    inside = (x >= pdf.min) & (x <= pdf.max)
    if pdf.kind == "uniform":
        return np.where(inside, 1.0 / span, 0.0)
    mode = pdf.mode
    if mode == pdf.min:
        density = 2.0 * (pdf.max - x) / (span * span)
    elif mode == pdf.max:
        density = 2.0 * (x - pdf.min) / (span * span)
    else:
        rising = 2.0 * (x - pdf.min) / (span * (mode - pdf.min))
        falling = 2.0 * (pdf.max - x) / (span * (pdf.max - mode))
        density = np.where(x < mode, rising, falling)
    return np.where(inside, density, 0.0)


def parameter_grid(param: UncertainParameter) -> np.ndarray:
    """The parameter's equispaced value lattice, min to max inclusive."""
    return np.linspace(param.pdf.min, param.pdf.max, param.grid_points)


def roulette_select(weights, rng: np.random.Generator) -> int:
    """Draw an index with probability proportional to its weight.

    One uniform variate is inverted through the cumulative weight sum, so
    the result is a deterministic function of the generator state.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise ValueError("weights must be non-empty")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
        raise ValueError("weights must be finite and >= 0")
    cumulative = np.cumsum(weights)
    total = cumulative[-1]
    if total <= 0.0:
        raise ValueError("at least one weight must be positive")
    u = rng.random() * total
    index = int(np.searchsorted(cumulative, u, side="right"))
    return min(index, weights.size - 1)


def sample_scenario(
    params: Sequence[UncertainParameter],
    mode: str,
    scenario_id: int,
    rng: np.random.Generator,
    base: CostInputs = DEFAULT_COSTS,
) -> Scenario:
    """Draw one scenario: grid values for the mode's group, nominals elsewhere.

    ``base`` supplies the fields that carry no uncertainty (spent fuel and
    decommissioning); uncertain fields outside the group are set to their
    nominal values exactly. The staff count is rounded to the nearest whole
    FTE after sampling.
    """
    if mode not in MODE_GROUPS:
        raise ValueError(f"mode must be one of {STUDY_MODES}")
    group = MODE_GROUPS[mode]
    values = {}
    indices = {}
    for param in params:
        if param.name in group:
            grid = parameter_grid(param)
            idx = roulette_select(pdf_density(param.pdf, grid), rng)
            indices[param.name] = idx
            values[param.name] = float(grid[idx])
        else:
            values[param.name] = param.nominal
    if "n_fte" in values:
        values["n_fte"] = float(round(values["n_fte"]))
    costs = CostInputs(c_spent=base.c_spent, c_dec=base.c_dec, **values)
    return Scenario(id=scenario_id, mode=mode, costs=costs, grid_indices=indices)


def generate_study(
    params: Sequence[UncertainParameter],
    mode: str,
    n: int = 100,
    seed: SeedLike = 0,
    base: CostInputs = DEFAULT_COSTS,
) -> list[Scenario]:
    """Generate ``n`` scenarios whose draws depend only on ``(seed, id)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [
        sample_scenario(params, mode, i, make_rng(seed, STREAM_SCENARIO, i), base=base)
        for i in range(n)
    ]


def default_uncertain_parameters(base: CostInputs = DEFAULT_COSTS) -> list[UncertainParameter]:
    """The nine uncertain cost parameters with their stock density models.

    Nominals follow ``base`` so a re-priced configuration stays internally
    consistent; uranium and fabrication are triangular with the mode at the
    nominal, everything else uniform.
    """
    uniform = {
        "occ": (2500.0, 4000.0),
        "n_fte": (3.0, 10.0),
        "s_fte": (120_000.0, 225_000.0),
        "fom": (400_000.0, 750_000.0),
        "vom": (2.0, 2.5),
        "c_conv": (4.0, 10.0),
        "c_swu": (125.0, 240.0),
    }
    triangular = {
        "c_yc": (84.0, 156.0),
        "c_fab": (400.0, 750.0),
    }
    params = []
    for name in ("occ", "n_fte", "s_fte", "fom", "vom", "c_yc", "c_conv", "c_swu", "c_fab"):
        nominal = float(getattr(base, name))
        if name in uniform:
            low, high = uniform[name]
            pdf = Pdf(kind="uniform", min=low, max=high)
        else:
            low, high = triangular[name]
            pdf = Pdf(kind="triangular", min=low, max=high, mode=nominal)
        params.append(UncertainParameter(name=name, pdf=pdf, nominal=nominal))
    return params
