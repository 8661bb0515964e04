"""Seeded microsimulation oracle for the closed-form cohort engine.

Each simulated individual replays the cohort accounting by sampling: at
every round they are screened (cost accrues), possibly diagnosed (stage
and remaining lifetime sampled, walk ends), or remain undiagnosed (die
within the interval or survive to the next round).  Life years are
credited with exactly the conventions of the closed-form expectation
(2 years on arrival at a round, 1 year for undiagnosed one-year
survivors, t years for diagnosed cases), so a discrepancy against the
analytic engine indicates an implementation bug rather than a modeling
difference.

Randomness is counter based: individual i consumes a dedicated block of
the Philox stream keyed by the seed, so results are a pure function of
(seed, individuals, dataset, policy), bit-identical for any batch size
or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Philox

from .model import (
    Cause,
    CostModel,
    DIAGNOSED_STAGES,
    EpidemiologyTable,
    Policy,
    SurvivalModel,
    ValidationError,
    build_mu,
    build_pi,
    per_case_cost,
)

_UNIFORMS_PER_ROUND = 3        # diagnosis, stage, outcome
_WORDS_PER_BLOCK = 4           # Philox counter granularity
_TO_UNIT = 2.0 ** -53


@dataclass(frozen=True)
class McConfig:
    seed: int
    individuals: int
    batch_size: int = 65536    # memory knob only; never changes results
    workers: int = 1

    def __post_init__(self):
        if self.individuals < 1:
            raise ValidationError(f"individuals must be >= 1, got {self.individuals}")
        if self.batch_size < 1 or self.workers < 1:
            raise ValidationError("batch_size and workers must be >= 1")


@dataclass(frozen=True)
class MetricEstimate:
    mean: float
    se: float


@dataclass(frozen=True)
class McEstimate:
    """Cohort-scaled sample means and standard errors."""

    seed: int
    individuals: int
    cohort_size: float
    life_years: MetricEstimate
    total_cost: MetricEstimate
    bc_deaths: MetricEstimate
    occupancy: np.ndarray      # (J,) raw attendance counts per round


class _Sampler:
    """Inverse-CDF tables shared by the scalar and vectorized walks."""

    def __init__(self, policy: Policy, epi: EpidemiologyTable, surv: SurvivalModel, costs: CostModel):
        policy.check_grid(epi.grid)
        build_mu(epi)          # validates the epidemiology table
        grid = epi.grid
        self.n_rounds = grid.size
        self.screen_cost = np.array([
            costs.screening_unit_cost if policy.screened[j] else 0.0 for j in range(grid.size)
        ])
        self.incidence = np.array(epi.incidence)
        self.stage_cdf = np.cumsum(epi.cond_stage, axis=1)
        split = np.array([surv.interval_split(j) for j in range(grid.size)])
        self.die_y0 = split[:, 0]
        self.die_within = split[:, 0] + split[:, 1]
        # flattened joint (t, d) cells per (round, stage), ascending (t, d)
        self.cells = []
        for j in range(grid.size):
            band = costs.band_index(grid.groups[j].start)
            per_stage = []
            for k in DIAGNOSED_STAGES:
                pi = build_pi(surv, j, k)
                probs, years, case_cost, is_bc = [], [], [], []
                for t in range(1, pi.shape[0]):
                    for d in (Cause.BREAST_CANCER, Cause.OTHER):
                        probs.append(pi[t, d])
                        years.append(float(t))
                        case_cost.append(per_case_cost(costs, band, k, t, d))
                        is_bc.append(d == Cause.BREAST_CANCER)
                per_stage.append((
                    np.cumsum(probs),
                    np.array(years),
                    np.array(case_cost),
                    np.array(is_bc, dtype=bool),
                ))
            self.cells.append(per_stage)


def _uniform_block(seed: int, n_rounds: int, first_individual: int, count: int) -> np.ndarray:
    """Uniforms of shape (count, n_rounds, 3) for a contiguous range of
    individuals, read from each individual's own counter blocks."""
    words = _UNIFORMS_PER_ROUND * n_rounds
    blocks = -(-words // _WORDS_PER_BLOCK)
    bg = Philox(key=seed, counter=first_individual * blocks)
    raw = bg.random_raw(count * blocks * _WORDS_PER_BLOCK).reshape(count, blocks * _WORDS_PER_BLOCK)
    u = (raw >> np.uint64(11)) * _TO_UNIT
    return u[:, :words].reshape(count, n_rounds, _UNIFORMS_PER_ROUND)


def _walk_batch(tab: _Sampler, u: np.ndarray):
    """Vectorized walk of one batch; returns per-individual outcomes."""
    n = u.shape[0]
    years = np.zeros(n)
    cost = np.zeros(n)
    bc_death = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    occupancy = np.zeros(tab.n_rounds, dtype=np.int64)
    for j in range(tab.n_rounds):
        if not active.any():
            break
        occupancy[j] = int(active.sum())
        cost[active] += tab.screen_cost[j]
        u_diag = u[:, j, 0]
        u_stage = u[:, j, 1]
        u_out = u[:, j, 2]
        diagnosed = active & (u_diag < tab.incidence[j])
        undiagnosed = active & ~diagnosed
        die_y0 = undiagnosed & (u_out < tab.die_y0[j])
        die_y1 = undiagnosed & ~die_y0 & (u_out < tab.die_within[j])
        survive = undiagnosed & ~die_y0 & ~die_y1
        years[die_y1] += 1.0
        if j < tab.n_rounds - 1:
            years[survive] += 2.0   # credited on arrival at the next round
        if diagnosed.any():
            rows = np.flatnonzero(diagnosed)
            stage = np.searchsorted(tab.stage_cdf[j], u_stage[rows], side="right")
            stage = np.minimum(stage, len(DIAGNOSED_STAGES) - 1)
            for k in range(len(DIAGNOSED_STAGES)):
                sel = rows[stage == k]
                if sel.size == 0:
                    continue
                cdf, cell_years, cell_cost, cell_bc = tab.cells[j][k]
                idx = np.searchsorted(cdf, u_out[sel], side="right")
                idx = np.minimum(idx, len(cdf) - 1)
                years[sel] += cell_years[idx]
                cost[sel] += cell_cost[idx]
                bc_death[sel] = cell_bc[idx]
        active = survive
    return years, cost, bc_death, occupancy


def simulate_individual(
    seed: int,
    index: int,
    policy: Policy,
    epi: EpidemiologyTable,
    surv: SurvivalModel,
    costs: CostModel,
) -> tuple[float, float, bool]:
    """Walk a single individual; returns (life_years, cost, bc_death).

    Reads exactly the uniforms of the individual's counter block, so the
    record is identical to the one produced inside any batch.
    """
    tab = _Sampler(policy, epi, surv, costs)
    u = _uniform_block(seed, tab.n_rounds, index, 1)
    years, cost, bc_death, _ = _walk_batch(tab, u)
    return float(years[0]), float(cost[0]), bool(bc_death[0])


def estimate(
    config: McConfig,
    policy: Policy,
    epi: EpidemiologyTable,
    surv: SurvivalModel,
    costs: CostModel,
    cohort_size: float,
) -> McEstimate:
    """Sample the cohort walk and scale the outcome means to the cohort.

    The per-individual records land in preallocated arrays at positions
    fixed by the individual index, and reductions run over the complete
    arrays, so neither batch size nor worker count can change any output
    bit.
    """
    tab = _Sampler(policy, epi, surv, costs)
    m = config.individuals
    years = np.empty(m)
    cost = np.empty(m)
    bc_death = np.empty(m, dtype=bool)
    bounds = [(s, min(s + config.batch_size, m)) for s in range(0, m, config.batch_size)]
    occ_parts: list[np.ndarray] = [None] * len(bounds)  # type: ignore[list-item]

    def run(batch: int) -> None:
        s, e = bounds[batch]
        u = _uniform_block(config.seed, tab.n_rounds, s, e - s)
        y, c, b, occ = _walk_batch(tab, u)
        years[s:e] = y
        cost[s:e] = c
        bc_death[s:e] = b
        occ_parts[batch] = occ

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(run, range(len(bounds))))
    else:
        for batch in range(len(bounds)):
            run(batch)

    occupancy = np.sum(occ_parts, axis=0, dtype=np.int64)
    scale = float(cohort_size)

    def metric(values: np.ndarray) -> MetricEstimate:
        mean = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
        return MetricEstimate(mean * scale, se * scale)

    return McEstimate(
        seed=config.seed,
        individuals=m,
        cohort_size=scale,
        life_years=metric(years),
        total_cost=metric(cost),
        bc_deaths=metric(bc_death.astype(float)),
        occupancy=occupancy,
    )
