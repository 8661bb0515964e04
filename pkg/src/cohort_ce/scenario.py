"""Policy scenarios: target-age extensions and sensitivity transforms.

A scenario starts from a frozen baseline epidemiology table and derives
a new table for the policy under study.  Extending screening to younger
ages borrows the stage distributions of the closest screened groups and
rescales the incidence of the newly screened groups; extending to older
ages imports an externally supplied incidence curve and shifts the
baseline stage distributions upward in age.  Sensitivity transforms
perturb incidence rates, treatment costs, or the localized/regional
stage split.

Every transform reads the table it is given and returns a new one; the
survival model is never touched.  Composite scenarios (both extensions)
source all reads from the same untransformed baseline, so the result
does not depend on application order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from enum import Enum
from typing import Mapping

import numpy as np

from .model import (
    AgeGrid,
    CostModel,
    EpidemiologyTable,
    Policy,
    Stage,
    ValidationError,
)

#: current nationwide target ages and the studied extensions
CURRENT_SCREEN_RANGE = (50, 69)
YOUNGER_SCREEN_RANGE = (46, 69)
OLDER_SCREEN_RANGE = (50, 74)
BOTH_SCREEN_RANGE = (46, 74)

#: first-screening effect on the incidence of the newly screened young
#: groups: +28% at 46-47, +24.7% at 48-49, and -11.9% at 50-51 (whose
#: first screen moves earlier)
YOUNGER_INCIDENCE_MULTIPLIERS = {46: 1.28, 48: 1.247, 50: 0.881}

#: stage rows borrowed from the closest screened baseline groups
YOUNGER_STAGE_SOURCES = {46: 50, 48: 52, 50: 52}

#: first age whose incidence and stage rows the older extension rewrites
OLDER_EXTENSION_START = 70
#: groups 70-71 and 72-73 copy the last currently screened group 68-69;
#: each group from 74-75 on copies the baseline row 4 years younger
OLDER_STAGE_ANCHOR = 68
OLDER_STAGE_SHIFT_YEARS = 4


class Extension(Enum):
    NONE = "none"
    YOUNGER = "younger"
    OLDER = "older"
    BOTH = "both"


class TransformKind(Enum):
    INCIDENCE_SCALE = "IncidenceScale"
    COST_SCALE = "CostScale"
    STAGE_SHIFT = "StageShift"


@dataclass(frozen=True)
class SensitivityTransform:
    """One perturbation applied to an epidemiology or cost table.

    ``magnitude`` is a signed fraction for the scale kinds and a signed
    absolute probability for stage shifts; ``age_scope`` holds resolved
    group indices (ignored by cost scaling, which is table-wide).
    """

    kind: TransformKind
    magnitude: float
    age_scope: tuple[int, ...] = ()


@dataclass(frozen=True)
class ScenarioSpec:
    """A named policy scenario built from the baseline dataset."""

    id: str
    extension: Extension = Extension.NONE
    older_incidence_variant: str | None = None
    screen_range: tuple[int, int] | None = None   # overrides the extension default
    screen_none: bool = False
    transforms: tuple[SensitivityTransform, ...] = ()


@dataclass(frozen=True)
class SuiteEntry:
    """One sensitivity-suite row: a transform whose scope follows each
    scenario's extension."""

    id: str
    kind: TransformKind
    magnitude: float


# ---------------------------------------------------------------------------
# Target-age extensions
# ---------------------------------------------------------------------------

def _younger_updates(base: EpidemiologyTable):
    grid = base.grid
    try:
        needed = {start: grid.index_of(start) for start in (46, 48, 50, 52)}
    except ValidationError as exc:
        raise ValidationError(f"younger extension needs age groups 46-47 through 52-53: {exc}") from exc
    inc_updates = {}
    for start, mult in YOUNGER_INCIDENCE_MULTIPLIERS.items():
        j = needed[start]
        rate = float(base.incidence[j]) * mult
        if rate > 1.0:
            raise ValidationError(f"younger extension pushes incidence of group {grid.groups[j].label} above 1")
        inc_updates[j] = rate
    stage_updates = {
        needed[start]: np.array(base.cond_stage[needed[source]])
        for start, source in YOUNGER_STAGE_SOURCES.items()
    }
    return inc_updates, stage_updates


def _older_updates(base: EpidemiologyTable, older_incidence: Mapping[int, float]):
    grid = base.grid
    targets = [j for j, g in enumerate(grid.groups) if g.start >= OLDER_EXTENSION_START]
    if not targets:
        raise ValidationError(f"older extension needs age groups from {OLDER_EXTENSION_START} on")
    anchor = grid.index_of(OLDER_STAGE_ANCHOR)
    missing = [grid.groups[j].label for j in targets if grid.groups[j].start not in older_incidence]
    if missing:
        raise ValidationError("older extension incidence rates missing for groups: " + ", ".join(missing))
    inc_updates = {}
    stage_updates = {}
    for j in targets:
        start = grid.groups[j].start
        rate = float(older_incidence[start])
        if not 0.0 <= rate <= 1.0:
            raise ValidationError(f"older extension incidence {rate} for group {grid.groups[j].label} outside [0, 1]")
        inc_updates[j] = rate
        if start < OLDER_EXTENSION_START + OLDER_STAGE_SHIFT_YEARS:  # 70-71 and 72-73
            source = anchor
        else:
            source = grid.index_of(start - OLDER_STAGE_SHIFT_YEARS)
        stage_updates[j] = np.array(base.cond_stage[source])
    return inc_updates, stage_updates


def _materialize(base: EpidemiologyTable, inc_updates, stage_updates) -> EpidemiologyTable:
    incidence = np.array(base.incidence)
    cond = np.array(base.cond_stage)
    for j, rate in inc_updates.items():
        incidence[j] = rate
    for j, row in stage_updates.items():
        cond[j] = row
    return EpidemiologyTable(base.grid, incidence, cond)


def apply_younger_extension(base: EpidemiologyTable) -> EpidemiologyTable:
    """Extend screening down to age 46, extrapolating from the baseline.

    All reads source the given table; applying the result again is not
    meaningful and scenario construction never does so.
    """
    inc_updates, stage_updates = _younger_updates(base)
    return _materialize(base, inc_updates, stage_updates)


def apply_older_extension(base: EpidemiologyTable, older_incidence: Mapping[int, float]) -> EpidemiologyTable:
    """Extend screening up to age 74 with an imported incidence curve.

    ``older_incidence`` maps group start ages (70 and up) to the rates
    observed under steady-state screening of the elderly.
    """
    inc_updates, stage_updates = _older_updates(base, older_incidence)
    return _materialize(base, inc_updates, stage_updates)


# ---------------------------------------------------------------------------
# Sensitivity transforms
# ---------------------------------------------------------------------------

def apply_incidence_scale(t: SensitivityTransform, epi: EpidemiologyTable) -> EpidemiologyTable:
    """Scale incidence by (1 + magnitude) on the scoped groups."""
    if t.kind is not TransformKind.INCIDENCE_SCALE:
        raise ValidationError(f"expected an incidence scale transform, got {t.kind.value}")
    incidence = np.array(epi.incidence)
    factor = 1.0 + t.magnitude
    for j in t.age_scope:
        incidence[j] *= factor
        if incidence[j] > 1.0:
            raise ValidationError(
                f"incidence scale pushes group {epi.grid.groups[j].label} above 1 ({incidence[j]!r})"
            )
        if incidence[j] < 0.0:
            raise ValidationError(f"incidence scale pushes group {epi.grid.groups[j].label} below 0")
    return EpidemiologyTable(epi.grid, incidence, np.array(epi.cond_stage))


def apply_cost_scale(t: SensitivityTransform, costs: CostModel) -> CostModel:
    """Scale every treatment cost cell; the screening cost is kept."""
    if t.kind is not TransformKind.COST_SCALE:
        raise ValidationError(f"expected a cost scale transform, got {t.kind.value}")
    factor = 1.0 + t.magnitude
    return replace(costs, c1=costs.c1 * factor, c2=costs.c2 * factor, c3=costs.c3 * factor)


def apply_stage_shift(t: SensitivityTransform, epi: EpidemiologyTable) -> EpidemiologyTable:
    """Move conditional probability between the localized and regional
    stages.

    A positive magnitude moves mass from stage 2 to stage 1.  The
    arithmetic runs in decimal on the shortest representation of each
    probability, so probabilities with short decimal forms (all shipped
    tables) shift and shift back to bit-identical values.
    """
    if t.kind is not TransformKind.STAGE_SHIFT:
        raise ValidationError(f"expected a stage shift transform, got {t.kind.value}")
    delta = Decimal(repr(t.magnitude))
    cond = np.array(epi.cond_stage)
    for j in t.age_scope:
        new_loc = Decimal(repr(cond[j, Stage.LOCALIZED])) + delta
        new_reg = Decimal(repr(cond[j, Stage.REGIONAL])) - delta
        if new_loc < 0 or new_reg < 0:
            raise ValidationError(
                f"stage shift of {t.magnitude} makes a probability negative in group {epi.grid.groups[j].label}"
            )
        cond[j, Stage.LOCALIZED] = float(new_loc)
        cond[j, Stage.REGIONAL] = float(new_reg)
    return EpidemiologyTable(epi.grid, np.array(epi.incidence), cond)


def apply_epi_transform(t: SensitivityTransform, epi: EpidemiologyTable) -> EpidemiologyTable:
    if t.kind is TransformKind.INCIDENCE_SCALE:
        return apply_incidence_scale(t, epi)
    if t.kind is TransformKind.STAGE_SHIFT:
        return apply_stage_shift(t, epi)
    raise ValidationError(f"transform {t.kind.value} does not apply to an epidemiology table")


# ---------------------------------------------------------------------------
# Scenario assembly
# ---------------------------------------------------------------------------

_EXTENSION_SCREEN_RANGE = {
    Extension.NONE: CURRENT_SCREEN_RANGE,
    Extension.YOUNGER: YOUNGER_SCREEN_RANGE,
    Extension.OLDER: OLDER_SCREEN_RANGE,
    Extension.BOTH: BOTH_SCREEN_RANGE,
}


def scenario_policy(grid: AgeGrid, spec: ScenarioSpec) -> Policy:
    if spec.screen_none:
        return Policy.no_screening(grid, name=spec.id)
    lo, hi = spec.screen_range or _EXTENSION_SCREEN_RANGE[spec.extension]
    return Policy.from_age_range(grid, lo, hi, name=spec.id)


def scenario_epidemiology(
    base: EpidemiologyTable,
    incidence_variants: Mapping[str, Mapping[int, float]],
    spec: ScenarioSpec,
) -> EpidemiologyTable:
    """Derive the scenario's epidemiology table from the frozen baseline."""
    inc_updates: dict[int, float] = {}
    stage_updates: dict[int, np.ndarray] = {}
    if spec.extension in (Extension.YOUNGER, Extension.BOTH):
        inc, stages = _younger_updates(base)
        inc_updates.update(inc)
        stage_updates.update(stages)
    if spec.extension in (Extension.OLDER, Extension.BOTH):
        if spec.older_incidence_variant is None:
            raise ValidationError(f"scenario {spec.id!r} extends to older ages but names no incidence variant")
        if spec.older_incidence_variant not in incidence_variants:
            raise ValidationError(
                f"scenario {spec.id!r} references unknown incidence variant {spec.older_incidence_variant!r}"
            )
        inc, stages = _older_updates(base, incidence_variants[spec.older_incidence_variant])
        inc_updates.update(inc)
        stage_updates.update(stages)
    epi = _materialize(base, inc_updates, stage_updates)
    for t in spec.transforms:
        if t.kind is TransformKind.COST_SCALE:
            raise ValidationError(f"scenario {spec.id!r} lists a cost transform among epidemiology transforms")
        epi = apply_epi_transform(t, epi)
    epi.require_valid()
    return epi


def sensitivity_scope(kind: TransformKind, extension: Extension, grid: AgeGrid) -> tuple[int, ...]:
    """Group scope of a suite transform under a given extension.

    Incidence perturbations cover the full modelled target range of the
    extension; stage shifts cover only the groups whose stage rows the
    extension rewrote.  Scenarios without an extension are left alone.
    """
    last = grid.groups[-1].start
    if extension is Extension.NONE or kind is TransformKind.COST_SCALE:
        return ()
    if kind is TransformKind.INCIDENCE_SCALE:
        if extension is Extension.YOUNGER:
            return grid.scope_indices(*YOUNGER_SCREEN_RANGE)
        if extension is Extension.OLDER:
            return grid.scope_indices(OLDER_EXTENSION_START, last)
        return tuple(range(grid.size))
    # stage shift
    scopes: tuple[int, ...] = ()
    if extension in (Extension.YOUNGER, Extension.BOTH):
        scopes += grid.scope_indices(46, 51)
    if extension in (Extension.OLDER, Extension.BOTH):
        scopes += grid.scope_indices(OLDER_EXTENSION_START, last)
    return scopes
