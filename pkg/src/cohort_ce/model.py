"""Closed-form cohort model for biennial screening policies.

A cohort enters at the first screening age and is walked through 2-year
age groups.  At every round each invitee is either diagnosed (and leaves
the screening population with a stage-specific remaining-lifetime
distribution) or stays undiagnosed (and either dies within the 2-year
interval or survives to the next round).  The module computes, in closed
form, the expected remaining life years, the expected screening plus
treatment costs, and the expected number of breast cancer deaths for a
cohort under a given policy.

Conventions used throughout:

* age group index ``j`` is 0-based; the group spans 2 calendar years and
  nobody survives past age 100,
* stage ``k`` uses the registry coding -1 (no cancer), 0 (unknown),
  1 (localized), 2 (regional), 3 (distant), 4 (in situ); array columns
  are indexed by ``k + 1``,
* time to death ``t`` is counted in whole years from the screening
  round; diagnosed stages have support t >= 1 (the diagnosis year is
  year 1), the undiagnosed state also allows t = 0,
* expectation accumulators sum their terms in ascending (j, k, t, d)
  order with exact compensated summation (``math.fsum``), so totals are
  reproducible and independent of term grouping.

Life-year crediting follows the cohort accounting identity: survivors of
a 2-year interval are credited 2 years on arrival at the next round,
undiagnosed one-year survivors are credited exactly 1 year, undiagnosed
same-year decedents 0 years, and diagnosed individuals their expected
remaining years.  Survivors of the last round receive no further credit
(the horizon truncates at age 100).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

HORIZON_AGE = 100
GROUP_YEARS = 2
DEFAULT_COHORT_SIZE = 100_000.0
DEFAULT_SCREENING_UNIT_COST = 30.0

#: tolerances for table invariants
STAGE_SUM_TOL = 1e-9
PMF_SUM_TOL = 1e-6
LIFE_YEAR_DIFF_EPS = 1e-9


class Stage(IntEnum):
    NO_CANCER = -1
    UNKNOWN = 0
    LOCALIZED = 1
    REGIONAL = 2
    DISTANT = 3
    IN_SITU = 4


DIAGNOSED_STAGES = tuple(s for s in Stage if s >= 0)
N_DIAGNOSED = len(DIAGNOSED_STAGES)
N_STATES = N_DIAGNOSED + 1  # including NO_CANCER


class Cause(IntEnum):
    """Cause of death; also the column index of joint (t, d) arrays."""

    BREAST_CANCER = 0
    OTHER = 1


class ValidationError(ValueError):
    """An input table violates a structural invariant."""


class ComputationError(RuntimeError):
    """A result could not be produced from otherwise valid inputs."""


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgeGroup:
    start: int
    end: int

    @property
    def label(self) -> str:
        return f"{self.start}-{self.end}"


@dataclass(frozen=True)
class AgeGrid:
    """Contiguous 2-year age bands covering the screening horizon."""

    groups: tuple[AgeGroup, ...]

    def __post_init__(self):
        if not self.groups:
            raise ValidationError("age grid has no groups")
        for g in self.groups:
            if g.end - g.start != GROUP_YEARS - 1:
                raise ValidationError(f"age group {g.label} does not span {GROUP_YEARS} years")
        for a, b in zip(self.groups, self.groups[1:]):
            if b.start != a.end + 1:
                raise ValidationError(f"age groups {a.label} and {b.label} are not contiguous")
        if self.groups[-1].end >= HORIZON_AGE:
            raise ValidationError(f"last age group {self.groups[-1].label} reaches the age horizon {HORIZON_AGE}")

    @classmethod
    def from_range(cls, first_start: int, last_start: int) -> "AgeGrid":
        starts = range(first_start, last_start + 1, GROUP_YEARS)
        return cls(tuple(AgeGroup(s, s + GROUP_YEARS - 1) for s in starts))

    @classmethod
    def default(cls) -> "AgeGrid":
        """46-47 through 98-99, 27 groups."""
        return cls.from_range(46, 98)

    @property
    def size(self) -> int:
        return len(self.groups)

    def index_of(self, age_start: int) -> int:
        for j, g in enumerate(self.groups):
            if g.start == age_start:
                return j
        raise ValidationError(f"no age group starting at {age_start}")

    def max_years(self, j: int) -> int:
        """Largest possible remaining lifetime at round j (horizon at 100)."""
        return HORIZON_AGE - self.groups[j].start

    def scope_indices(self, lo: int, hi: int) -> tuple[int, ...]:
        """Indices of groups whose start age falls in [lo, hi].

        A group belongs to a target-age range when its invitation age
        (the band start) is inside the range, so "50-74" includes the
        74-75 band invited at age 74.
        """
        return tuple(j for j, g in enumerate(self.groups) if lo <= g.start <= hi)


@dataclass(frozen=True)
class Policy:
    """Per-age-group screen / no-screen choice."""

    name: str
    screened: tuple[bool, ...]

    @classmethod
    def from_age_range(cls, grid: AgeGrid, lo: int, hi: int, name: str | None = None) -> "Policy":
        """Screen every group whose invitation age falls in [lo, hi]."""
        scoped = set(grid.scope_indices(lo, hi))
        return cls(name or f"{lo}-{hi}", tuple(j in scoped for j in range(grid.size)))

    @classmethod
    def no_screening(cls, grid: AgeGrid, name: str = "none") -> "Policy":
        return cls(name, (False,) * grid.size)

    def check_grid(self, grid: AgeGrid) -> None:
        if len(self.screened) != grid.size:
            raise ValidationError(
                f"policy {self.name!r} has {len(self.screened)} entries for a grid of {grid.size} groups"
            )


@dataclass(frozen=True)
class EpidemiologyTable:
    """Incidence and conditional stage distribution per age group.

    ``incidence[j]`` is the probability of a first diagnosis within the
    2-year interval of group j; ``cond_stage[j, k]`` is the probability
    of stage k (0..4) given a diagnosis.
    """

    grid: AgeGrid
    incidence: np.ndarray          # (J,)
    cond_stage: np.ndarray         # (J, 5)

    def __post_init__(self):
        object.__setattr__(self, "incidence", _frozen(self.incidence))
        object.__setattr__(self, "cond_stage", _frozen(self.cond_stage))

    def validate(self) -> list[str]:
        errors = []
        J = self.grid.size
        if self.incidence.shape != (J,):
            return [f"incidence has shape {self.incidence.shape}, expected ({J},)"]
        if self.cond_stage.shape != (J, N_DIAGNOSED):
            return [f"cond_stage has shape {self.cond_stage.shape}, expected ({J}, {N_DIAGNOSED})"]
        for j, g in enumerate(self.grid.groups):
            inc = self.incidence[j]
            if not 0.0 <= inc <= 1.0:
                errors.append(f"group {g.label}: incidence {inc} outside [0, 1]")
            row = self.cond_stage[j]
            if (row < 0).any():
                errors.append(f"group {g.label}: negative conditional stage probability")
            if abs(row.sum() - 1.0) > STAGE_SUM_TOL:
                errors.append(f"group {g.label}: conditional stage probabilities sum to {row.sum()!r}, not 1")
        return errors

    def require_valid(self) -> "EpidemiologyTable":
        errors = self.validate()
        if errors:
            raise ValidationError("; ".join(errors))
        return self


@dataclass(frozen=True)
class StageDistribution:
    """Unconditional state distribution mu[j, k+1] over k in {-1, 0..4}."""

    grid: AgeGrid
    mu: np.ndarray                 # (J, 6); column 0 is NO_CANCER

    def __post_init__(self):
        object.__setattr__(self, "mu", _frozen(self.mu))

    def validate(self) -> list[str]:
        errors = []
        if self.mu.shape != (self.grid.size, N_STATES):
            return [f"mu has shape {self.mu.shape}, expected ({self.grid.size}, {N_STATES})"]
        for j, g in enumerate(self.grid.groups):
            row = self.mu[j]
            if (row < 0).any():
                errors.append(f"group {g.label}: negative state probability")
            if abs(row.sum() - 1.0) > STAGE_SUM_TOL:
                errors.append(f"group {g.label}: state probabilities sum to {row.sum()!r}, not 1")
        return errors

    def prob(self, j: int, stage: int) -> float:
        return float(self.mu[j, stage + 1])


@dataclass(frozen=True)
class SurvivalModel:
    """Remaining-lifetime PMFs and the breast-cancer share of deaths.

    ``death_pmf[j, k+1, t]`` is the probability that an individual of
    group j in state k lives exactly t more years; ``bc_given_death`` is
    the probability the death at (j, k, t) is due to breast cancer.  The
    t axis is padded to the longest horizon of the grid; mass outside a
    group's own horizon must be zero.  The undiagnosed 2-year interval
    split (die in year 0 / die in year 1 / survive the interval) is
    derived from the state -1 PMF.
    """

    grid: AgeGrid
    death_pmf: np.ndarray          # (J, 6, T+1)
    bc_given_death: np.ndarray     # (J, 6, T+1)

    def __post_init__(self):
        object.__setattr__(self, "death_pmf", _frozen(self.death_pmf))
        object.__setattr__(self, "bc_given_death", _frozen(self.bc_given_death))

    @property
    def t_axis_len(self) -> int:
        return self.death_pmf.shape[2]

    def lam(self, j: int, stage: int) -> np.ndarray:
        """Remaining-lifetime PMF for (group j, state k), t indexed from 0."""
        if not (0 <= j < self.grid.size) or not (Stage.NO_CANCER <= stage <= Stage.IN_SITU):
            raise ValidationError(f"no survival entry for group index {j}, stage {stage}")
        return self.death_pmf[j, stage + 1]

    def interval_split(self, j: int) -> tuple[float, float, float]:
        """(p_die_year0, p_die_year1, p_survive_interval) for undiagnosed."""
        lam = self.death_pmf[j, 0]
        p0 = float(lam[0])
        p1 = float(lam[1])
        return p0, p1, 1.0 - p0 - p1

    def expected_years(self, j: int, stage: int) -> float:
        """Expected remaining years sum_t t * lam(t) for a diagnosed state."""
        lam = self.lam(j, stage)
        return math.fsum(t * lam[t] for t in range(1, len(lam)))

    def validate(self) -> list[str]:
        errors = []
        J = self.grid.size
        T = max(self.grid.max_years(j) for j in range(J))
        shape = (J, N_STATES, T + 1)
        if self.death_pmf.shape != shape:
            return [f"death_pmf has shape {self.death_pmf.shape}, expected {shape}"]
        if self.bc_given_death.shape != shape:
            return [f"bc_given_death has shape {self.bc_given_death.shape}, expected {shape}"]
        if ((self.bc_given_death < 0) | (self.bc_given_death > 1)).any():
            errors.append("bc_given_death outside [0, 1]")
        if (self.bc_given_death[:, 0, :] != 0).any():
            errors.append("bc_given_death must be zero for the undiagnosed state")
        for j, g in enumerate(self.grid.groups):
            horizon = self.grid.max_years(j)
            for k in range(-1, N_DIAGNOSED):
                lam = self.death_pmf[j, k + 1]
                if (lam < 0).any():
                    errors.append(f"group {g.label} stage {k}: negative death probability")
                total = lam.sum()
                if abs(total - 1.0) > PMF_SUM_TOL:
                    errors.append(f"group {g.label} stage {k}: death PMF sums to {total!r}, not 1")
                if lam[horizon + 1:].any():
                    errors.append(f"group {g.label} stage {k}: death PMF has mass beyond the age-{HORIZON_AGE} horizon")
                if k >= 0 and lam[0] != 0:
                    errors.append(f"group {g.label} stage {k}: diagnosed death PMF has mass at t=0")
        return errors

    def require_valid(self) -> "SurvivalModel":
        errors = self.validate()
        if errors:
            raise ValidationError("; ".join(errors))
        return self


@dataclass(frozen=True)
class CostModel:
    """Screening unit cost and the age-band treatment cost schedule.

    ``c1[b, k]`` is the first treatment year, ``c2[b, k]`` each of the
    treatment years 2-5, and ``c3[b, k]`` the last year before a breast
    cancer death, for cost band b and stage k.  The band is fixed by the
    age at diagnosis.
    """

    screening_unit_cost: float
    band_starts: tuple[int, ...]
    band_ends: tuple[int, ...]
    c1: np.ndarray                 # (B, 5)
    c2: np.ndarray
    c3: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c1", _frozen(self.c1))
        object.__setattr__(self, "c2", _frozen(self.c2))
        object.__setattr__(self, "c3", _frozen(self.c3))

    @property
    def n_bands(self) -> int:
        return len(self.band_starts)

    def band_index(self, age: int) -> int:
        """Cost band containing the given age (groups map by start age)."""
        for b in range(self.n_bands):
            if self.band_starts[b] <= age <= self.band_ends[b]:
                return b
        raise ValidationError(f"no cost band covers age {age}")

    def band_label(self, b: int) -> str:
        return f"{self.band_starts[b]}-{self.band_ends[b]}"

    def validate(self, grid: AgeGrid | None = None) -> list[str]:
        errors = []
        B = self.n_bands
        if B == 0:
            return ["cost model has no bands"]
        for name, table in (("c1", self.c1), ("c2", self.c2), ("c3", self.c3)):
            if table.shape != (B, N_DIAGNOSED):
                errors.append(f"{name} has shape {table.shape}, expected ({B}, {N_DIAGNOSED})")
            elif (table < 0).any():
                errors.append(f"{name} contains negative costs")
        if self.screening_unit_cost < 0:
            errors.append(f"screening unit cost {self.screening_unit_cost} is negative")
        for a, b in zip(range(B), range(1, B)):
            if self.band_ends[a] + 1 != self.band_starts[b]:
                errors.append(f"cost bands {self.band_label(a)} and {self.band_label(b)} are not contiguous")
        if grid is not None:
            for g in grid.groups:
                try:
                    self.band_index(g.start)
                except ValidationError:
                    errors.append(f"age group {g.label} is not covered by any cost band")
        return errors

    def require_valid(self, grid: AgeGrid | None = None) -> "CostModel":
        errors = self.validate(grid)
        if errors:
            raise ValidationError("; ".join(errors))
        return self


@dataclass(frozen=True)
class ScenarioResult:
    """Aggregate outcomes of one evaluated scenario."""

    scenario_id: str
    policy: Policy
    trajectory: np.ndarray         # (J,) expected invitees per round
    life_years: float
    total_cost: float
    per_age_costs: np.ndarray      # (J,)
    bc_deaths: float

    def __post_init__(self):
        object.__setattr__(self, "trajectory", _frozen(self.trajectory))
        object.__setattr__(self, "per_age_costs", _frozen(self.per_age_costs))


# ---------------------------------------------------------------------------
# Model operations
# ---------------------------------------------------------------------------

def build_mu(epi: EpidemiologyTable) -> StageDistribution:
    """Combine incidence and conditional stage probabilities into mu.

    mu[j](k) = cond_stage[j](k) * incidence[j] for diagnosed stages and
    mu[j](-1) = 1 - incidence[j].
    """
    epi.require_valid()
    J = epi.grid.size
    mu = np.empty((J, N_STATES))
    mu[:, 0] = 1.0 - epi.incidence
    mu[:, 1:] = epi.cond_stage * epi.incidence[:, None]
    return StageDistribution(epi.grid, mu)


def build_pi(surv: SurvivalModel, j: int, stage: int) -> np.ndarray:
    """Joint PMF over (remaining years t, cause of death d).

    Returns an array of shape (T+1, 2); column Cause.BREAST_CANCER holds
    bc_given_death(t) * lam(t), column Cause.OTHER the complement share.
    """
    if stage not in DIAGNOSED_STAGES:
        raise ValidationError(f"joint death distribution is defined for diagnosed stages, got {stage}")
    lam = surv.lam(j, stage)
    bc = surv.bc_given_death[j, stage + 1]
    pi = np.empty((len(lam), 2))
    pi[:, Cause.BREAST_CANCER] = bc * lam
    pi[:, Cause.OTHER] = (1.0 - bc) * lam
    return pi


def death_time_distribution(j: int, mu: StageDistribution, surv: SurvivalModel) -> np.ndarray:
    """PMF of the time to death at round j, mixing over all states."""
    return mu.mu[j] @ surv.death_pmf[j]


def cohort_trajectory(mu: StageDistribution, surv: SurvivalModel, n0: float) -> np.ndarray:
    """Expected number of screening invitees per round, starting from n0.

    A person leaves the screening population by dying within the 2-year
    interval or by being diagnosed; the two removal components are kept
    explicit for auditability.
    """
    if n0 <= 0:
        raise ValidationError(f"cohort size must be positive, got {n0}")
    J = mu.grid.size
    traj = np.empty(J)
    traj[0] = float(n0)
    for j in range(J - 1):
        p0, p1, _ = surv.interval_split(j)
        lam1 = surv.death_pmf[j, 1:, 1]              # first-year deaths of diagnosed
        mass = surv.death_pmf[j, 1:, :].sum(axis=1)  # total diagnosed PMF mass (~1)
        p_interval_death = mu.mu[j, 0] * (p0 + p1) + float(mu.mu[j, 1:] @ lam1)
        p_survive_but_diagnosed = float(mu.mu[j, 1:] @ (mass - lam1))
        keep = 1.0 - p_interval_death - p_survive_but_diagnosed
        traj[j + 1] = traj[j] * max(keep, 0.0)
    return traj


def expected_life_years(mu: StageDistribution, surv: SurvivalModel, trajectory: np.ndarray) -> float:
    """Total expected remaining life years of the cohort.

    Accumulates 2 years per arrival at rounds 2..J, 1 year per
    undiagnosed one-year survivor, and t years per diagnosed individual
    with remaining lifetime t, as one exact compensated sum in ascending
    (j, k, t) term order.
    """
    J = mu.grid.size
    terms: list[float] = [2.0 * trajectory[j] for j in range(1, J)]
    for j in range(J):
        n_j = trajectory[j]
        lam_nc = surv.death_pmf[j, 0]
        terms.append(n_j * mu.mu[j, 0] * lam_nc[1])
        for k in DIAGNOSED_STAGES:
            w = n_j * mu.mu[j, k + 1]
            lam = surv.death_pmf[j, k + 1]
            terms.extend(w * t * lam[t] for t in range(1, len(lam)) if lam[t])
    return math.fsum(terms)


def per_case_cost(costs: CostModel, band: int, stage: int, years_lived: int, cause: Cause) -> float:
    """Total treatment cost of one case by stage, survival time and cause.

    For a death from another cause after n years the schedule accrues C1
    in year 1 and C2 in each of years 2..min(n, 5).  For a breast cancer
    death the last lived year is billed C3 instead of its scheduled cost.
    Undiagnosed individuals never reach this schedule (zero cost).
    """
    if years_lived < 1:
        raise ValueError(f"years lived after diagnosis must be >= 1, got {years_lived}")
    if stage not in DIAGNOSED_STAGES:
        raise ValueError(f"treatment cost is defined for diagnosed stages, got {stage}")
    n = int(years_lived)
    c1 = float(costs.c1[band, stage])
    c2 = float(costs.c2[band, stage])
    c3 = float(costs.c3[band, stage])
    if cause == Cause.OTHER:
        if n <= 5:
            return c1 + (n - 1) * c2
        return c1 + 4 * c2
    if n <= 2:
        return (n - 1) * c1 + c3
    if n <= 5:
        return c1 + (n - 2) * c2 + c3
    return c1 + 4 * c2 + c3


def expected_costs_age(
    j: int,
    policy: Policy,
    mu: StageDistribution,
    surv: SurvivalModel,
    costs: CostModel,
    trajectory: np.ndarray,
) -> float:
    """Expected screening plus treatment costs attributed to round j."""
    n_j = float(trajectory[j])
    screen = costs.screening_unit_cost if policy.screened[j] else 0.0
    band = costs.band_index(mu.grid.groups[j].start)
    terms: list[float] = [n_j * screen]
    for k in DIAGNOSED_STAGES:
        w = n_j * mu.mu[j, k + 1]
        if w == 0.0:
            continue
        pi = build_pi(surv, j, k)
        for t in range(1, pi.shape[0]):
            for d in (Cause.BREAST_CANCER, Cause.OTHER):
                p = pi[t, d]
                if p:
                    terms.append(w * per_case_cost(costs, band, k, t, d) * p)
    return math.fsum(terms)


def expected_costs_total(per_age_costs) -> float:
    """Total expected costs over the whole follow-up (exact sum)."""
    return math.fsum(per_age_costs)


def expected_bc_deaths(mu: StageDistribution, surv: SurvivalModel, trajectory: np.ndarray) -> float:
    """Expected number of breast cancer deaths in the cohort."""
    terms: list[float] = []
    for j in range(mu.grid.size):
        n_j = float(trajectory[j])
        for k in DIAGNOSED_STAGES:
            w = n_j * mu.mu[j, k + 1]
            if w == 0.0:
                continue
            lam = surv.death_pmf[j, k + 1]
            bc = surv.bc_given_death[j, k + 1]
            terms.extend(w * bc[t] * lam[t] for t in range(1, len(lam)) if lam[t])
    return math.fsum(terms)


def icer(baseline: ScenarioResult, alternative: ScenarioResult) -> float | None:
    """Incremental cost per life year gained of alternative vs baseline.

    Returns None when the life-year difference is smaller than
    LIFE_YEAR_DIFF_EPS (the ratio is then undefined).  The value is
    invariant under swapping the two scenarios.
    """
    d_cost = alternative.total_cost - baseline.total_cost
    d_years = alternative.life_years - baseline.life_years
    if abs(d_years) < LIFE_YEAR_DIFF_EPS:
        return None
    return d_cost / d_years


def icer_qualifier(d_cost: float, d_years: float) -> str:
    """Textual note for negative incremental ratios."""
    if d_cost < 0 and d_years > 0:
        return "dominant (saves money and life years)"
    if d_cost > 0 and d_years < 0:
        return "dominated (costs more and loses life years)"
    return ""


def cost_per_life_year(result: ScenarioResult) -> float | None:
    """Cost per expected life year; None when no life years remain."""
    if result.life_years <= 0:
        return None
    return result.total_cost / result.life_years


def evaluate(
    scenario_id: str,
    policy: Policy,
    epi: EpidemiologyTable,
    surv: SurvivalModel,
    costs: CostModel,
    n0: float = DEFAULT_COHORT_SIZE,
) -> ScenarioResult:
    """Run the full closed-form pipeline for one scenario."""
    policy.check_grid(epi.grid)
    mu = build_mu(epi)
    trajectory = cohort_trajectory(mu, surv, n0)
    per_age = np.array([
        expected_costs_age(j, policy, mu, surv, costs, trajectory) for j in range(epi.grid.size)
    ])
    return ScenarioResult(
        scenario_id=scenario_id,
        policy=policy,
        trajectory=trajectory,
        life_years=expected_life_years(mu, surv, trajectory),
        total_cost=expected_costs_total(per_age),
        per_age_costs=per_age,
        bc_deaths=expected_bc_deaths(mu, surv, trajectory),
    )
