"""Data bundle loading, validation and serialization.

A bundle directory holds seven CSV files plus a scenario config:

* ``incidence.csv``            age_start,age_end,policy_variant,rate
* ``stage_dist.csv``           age_start,age_end,stage,prob
* ``survival.csv``             age_start,age_end,stage,t_years,prob_death,prob_bc_given_death
* ``population_interval.csv``  age_start,age_end,p_die_y0,p_die_y1,p_survive
* ``cost_c1.csv`` / ``cost_c2.csv`` / ``cost_c3.csv``
                               band_start,band_end,stage,euros
* ``scenarios.cfg``            flat key=value sections, one per scenario,
                               plus an optional [model] section with
                               screening_unit_cost and cohort_size

Loading is not fail-fast: the loader parses every file, runs all
structural checks, and raises a single BundleValidationError carrying
every failure with file and line context.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    AgeGrid,
    AgeGroup,
    CostModel,
    DEFAULT_COHORT_SIZE,
    DEFAULT_SCREENING_UNIT_COST,
    EpidemiologyTable,
    N_DIAGNOSED,
    N_STATES,
    SurvivalModel,
    ValidationError,
)
from .scenario import (
    Extension,
    ScenarioSpec,
    SensitivityTransform,
    SuiteEntry,
    TransformKind,
)

CURRENT_VARIANT = "current"
SCENARIO_FILE = "scenarios.cfg"
MODEL_SECTION = "model"

CSV_FILES = {
    "incidence": ("incidence.csv", ["age_start", "age_end", "policy_variant", "rate"]),
    "stage_dist": ("stage_dist.csv", ["age_start", "age_end", "stage", "prob"]),
    "survival": ("survival.csv", ["age_start", "age_end", "stage", "t_years", "prob_death", "prob_bc_given_death"]),
    "population_interval": ("population_interval.csv", ["age_start", "age_end", "p_die_y0", "p_die_y1", "p_survive"]),
    "cost_c1": ("cost_c1.csv", ["band_start", "band_end", "stage", "euros"]),
    "cost_c2": ("cost_c2.csv", ["band_start", "band_end", "stage", "euros"]),
    "cost_c3": ("cost_c3.csv", ["band_start", "band_end", "stage", "euros"]),
}

INTERVAL_MATCH_TOL = 1e-9


class BundleValidationError(ValueError):
    """Aggregated loading failures; ``errors`` lists every one."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class DataBundle:
    root: Path
    grid: AgeGrid
    epi: EpidemiologyTable
    incidence_variants: dict[str, dict[int, float]]
    surv: SurvivalModel
    costs: CostModel
    cohort_size: float
    scenarios: tuple[ScenarioSpec, ...]

    def scenario(self, scenario_id: str) -> ScenarioSpec:
        for spec in self.scenarios:
            if spec.id == scenario_id:
                return spec
        raise ValidationError(f"unknown scenario id {scenario_id!r}")


# ---------------------------------------------------------------------------
# low-level parsing
# ---------------------------------------------------------------------------

def _read_rows(path: Path, columns: list[str], errors: list[str]):
    """Typed rows of one CSV file; unparsable rows are reported and skipped."""
    name = path.name
    if not path.is_file():
        errors.append(f"{name}: file is missing")
        return []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            errors.append(f"{name}: file is empty")
            return []
        if header != columns:
            errors.append(f"{name}:1: header is {header!r}, expected {columns!r}")
            return []
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                errors.append(f"{name}:{lineno}: expected {len(columns)} fields, found {len(row)}")
                continue
            rows.append((lineno, dict(zip(columns, row))))
        return rows


def _to_int(name, lineno, field, value, errors):
    try:
        return int(value)
    except ValueError:
        errors.append(f"{name}:{lineno}: {field} {value!r} is not an integer")
        return None


def _to_float(name, lineno, field, value, errors):
    try:
        return float(value)
    except ValueError:
        errors.append(f"{name}:{lineno}: {field} {value!r} is not a number")
        return None


def _parse_sections(path: Path, errors: list[str]):
    """Sections of a flat key=value config file, in file order.

    Returns a list of (section_name, entries) where entries is a list of
    (lineno, key, value); keys may repeat within a section.
    """
    name = path.name
    if not path.is_file():
        errors.append(f"{name}: file is missing")
        return []
    sections: list[tuple[str, list[tuple[int, str, str]]]] = []
    current = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                errors.append(f"{name}:{lineno}: empty section name")
                continue
            if any(s == section for s, _ in sections):
                errors.append(f"{name}:{lineno}: duplicate section {section!r}")
            current = []
            sections.append((section, current))
            continue
        if "=" not in line:
            errors.append(f"{name}:{lineno}: expected key = value, got {line!r}")
            continue
        if current is None:
            errors.append(f"{name}:{lineno}: key outside any [section]")
            continue
        key, _, value = line.partition("=")
        current.append((lineno, key.strip(), value.strip()))
    return sections


def _parse_age_range(token: str) -> tuple[int, int]:
    lo, sep, hi = token.partition("-")
    if not sep:
        raise ValueError(f"age range {token!r} is not of the form lo-hi")
    return int(lo), int(hi)


def _parse_transform(value: str, grid: AgeGrid) -> SensitivityTransform:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise ValueError(f"transform {value!r} is not of the form kind,magnitude,scope")
    kind_token, magnitude_token, scope_token = parts
    try:
        kind = TransformKind(kind_token)
    except ValueError:
        raise ValueError(f"unknown transform kind {kind_token!r}") from None
    magnitude = float(magnitude_token)
    if scope_token == "all":
        scope = tuple(range(grid.size))
    else:
        lo, hi = _parse_age_range(scope_token)
        scope = grid.scope_indices(lo, hi)
    return SensitivityTransform(kind, magnitude, scope)


def _scope_token(t: SensitivityTransform, grid: AgeGrid) -> str:
    if t.age_scope == tuple(range(grid.size)):
        return "all"
    first = grid.groups[t.age_scope[0]]
    last = grid.groups[t.age_scope[-1]]
    return f"{first.start}-{last.end}"


# ---------------------------------------------------------------------------
# bundle assembly
# ---------------------------------------------------------------------------

def _build_grid(incidence_rows, errors):
    current = {}
    for lineno, row in incidence_rows:
        if row["policy_variant"] != CURRENT_VARIANT:
            continue
        start = _to_int("incidence.csv", lineno, "age_start", row["age_start"], errors)
        end = _to_int("incidence.csv", lineno, "age_end", row["age_end"], errors)
        if start is None or end is None:
            continue
        if start in current:
            errors.append(f"incidence.csv:{lineno}: duplicate {CURRENT_VARIANT} row for age group {start}-{end}")
            continue
        current[start] = (end, lineno)
    if not current:
        errors.append(f"incidence.csv: no rows for the {CURRENT_VARIANT!r} policy variant")
        return None
    groups = tuple(AgeGroup(s, current[s][0]) for s in sorted(current))
    try:
        return AgeGrid(groups)
    except ValidationError as exc:
        errors.append(f"incidence.csv: {exc}")
        return None


def _build_incidence(incidence_rows, grid, errors):
    variants: dict[str, dict[int, float]] = {}
    for lineno, row in incidence_rows:
        start = _to_int("incidence.csv", lineno, "age_start", row["age_start"], errors)
        rate = _to_float("incidence.csv", lineno, "rate", row["rate"], errors)
        if start is None or rate is None:
            continue
        variant = row["policy_variant"]
        if not 0.0 <= rate <= 1.0:
            errors.append(f"incidence.csv:{lineno}: rate {rate!r} outside [0, 1]")
            continue
        bucket = variants.setdefault(variant, {})
        if start in bucket and variant != CURRENT_VARIANT:
            errors.append(f"incidence.csv:{lineno}: duplicate {variant!r} row for age start {start}")
            continue
        bucket[start] = rate
    for variant, rates in variants.items():
        known = {g.start for g in grid.groups}
        for start in rates:
            if start not in known:
                errors.append(f"incidence.csv: variant {variant!r} references unknown age group start {start}")
    return variants


def _build_stage_dist(rows, grid, errors):
    cond = np.zeros((grid.size, N_DIAGNOSED))
    seen = set()
    for lineno, row in rows:
        start = _to_int("stage_dist.csv", lineno, "age_start", row["age_start"], errors)
        stage = _to_int("stage_dist.csv", lineno, "stage", row["stage"], errors)
        prob = _to_float("stage_dist.csv", lineno, "prob", row["prob"], errors)
        if start is None or stage is None or prob is None:
            continue
        try:
            j = grid.index_of(start)
        except ValidationError:
            errors.append(f"stage_dist.csv:{lineno}: unknown age group start {start}")
            continue
        if not 0 <= stage < N_DIAGNOSED:
            errors.append(f"stage_dist.csv:{lineno}: stage {stage} outside 0..{N_DIAGNOSED - 1}")
            continue
        if (j, stage) in seen:
            errors.append(f"stage_dist.csv:{lineno}: duplicate row for group {start}, stage {stage}")
            continue
        seen.add((j, stage))
        cond[j, stage] = prob
    for j, g in enumerate(grid.groups):
        missing = [k for k in range(N_DIAGNOSED) if (j, k) not in seen]
        if missing:
            errors.append(f"stage_dist.csv: group {g.label} is missing stages {missing}")
    return cond


def _build_survival(rows, grid, errors):
    t_len = grid.max_years(0) + 1
    pmf = np.zeros((grid.size, N_STATES, t_len))
    bc = np.zeros((grid.size, N_STATES, t_len))
    seen_state = set()
    seen_cell = set()
    for lineno, row in rows:
        start = _to_int("survival.csv", lineno, "age_start", row["age_start"], errors)
        stage = _to_int("survival.csv", lineno, "stage", row["stage"], errors)
        t = _to_int("survival.csv", lineno, "t_years", row["t_years"], errors)
        p = _to_float("survival.csv", lineno, "prob_death", row["prob_death"], errors)
        pbc = _to_float("survival.csv", lineno, "prob_bc_given_death", row["prob_bc_given_death"], errors)
        if None in (start, stage, t, p, pbc):
            continue
        try:
            j = grid.index_of(start)
        except ValidationError:
            errors.append(f"survival.csv:{lineno}: unknown age group start {start}")
            continue
        if not -1 <= stage < N_DIAGNOSED:
            errors.append(f"survival.csv:{lineno}: stage {stage} outside -1..{N_DIAGNOSED - 1}")
            continue
        low_t = 0 if stage == -1 else 1
        if not low_t <= t <= grid.max_years(j):
            errors.append(
                f"survival.csv:{lineno}: t_years {t} outside {low_t}..{grid.max_years(j)} for group {start}"
            )
            continue
        if (j, stage, t) in seen_cell:
            errors.append(f"survival.csv:{lineno}: duplicate row for group {start}, stage {stage}, t {t}")
            continue
        if stage == -1 and pbc != 0.0:
            errors.append(f"survival.csv:{lineno}: prob_bc_given_death must be 0 for the undiagnosed state")
            continue
        if not 0.0 <= pbc <= 1.0:
            errors.append(f"survival.csv:{lineno}: prob_bc_given_death {pbc!r} outside [0, 1]")
            continue
        seen_cell.add((j, stage, t))
        seen_state.add((j, stage))
        pmf[j, stage + 1, t] = p
        bc[j, stage + 1, t] = pbc
    for j, g in enumerate(grid.groups):
        missing = [k for k in range(-1, N_DIAGNOSED) if (j, k) not in seen_state]
        if missing:
            errors.append(f"survival.csv: group {g.label} has no rows for stages {missing}")
    return pmf, bc


def _check_interval(rows, grid, pmf, errors):
    seen = set()
    for lineno, row in rows:
        start = _to_int("population_interval.csv", lineno, "age_start", row["age_start"], errors)
        p0 = _to_float("population_interval.csv", lineno, "p_die_y0", row["p_die_y0"], errors)
        p1 = _to_float("population_interval.csv", lineno, "p_die_y1", row["p_die_y1"], errors)
        ps = _to_float("population_interval.csv", lineno, "p_survive", row["p_survive"], errors)
        if None in (start, p0, p1, ps):
            continue
        try:
            j = grid.index_of(start)
        except ValidationError:
            errors.append(f"population_interval.csv:{lineno}: unknown age group start {start}")
            continue
        if j in seen:
            errors.append(f"population_interval.csv:{lineno}: duplicate row for age group start {start}")
            continue
        seen.add(j)
        if abs(p0 + p1 + ps - 1.0) > INTERVAL_MATCH_TOL:
            errors.append(
                f"population_interval.csv:{lineno}: probabilities sum to {p0 + p1 + ps!r}, not 1"
            )
        if abs(pmf[j, 0, 0] - p0) > INTERVAL_MATCH_TOL or abs(pmf[j, 0, 1] - p1) > INTERVAL_MATCH_TOL:
            errors.append(
                f"population_interval.csv:{lineno}: interval split disagrees with survival.csv "
                f"stage -1 rows for group {grid.groups[j].label}"
            )
    for j, g in enumerate(grid.groups):
        if j not in seen:
            errors.append(f"population_interval.csv: no row for age group {g.label}")


def _build_costs(cost_rows, errors):
    tables = {}
    band_sets = {}
    for key in ("cost_c1", "cost_c2", "cost_c3"):
        name = CSV_FILES[key][0]
        cells = {}
        for lineno, row in cost_rows[key]:
            b_start = _to_int(name, lineno, "band_start", row["band_start"], errors)
            b_end = _to_int(name, lineno, "band_end", row["band_end"], errors)
            stage = _to_int(name, lineno, "stage", row["stage"], errors)
            euros = _to_float(name, lineno, "euros", row["euros"], errors)
            if None in (b_start, b_end, stage, euros):
                continue
            if not 0 <= stage < N_DIAGNOSED:
                errors.append(f"{name}:{lineno}: stage {stage} outside 0..{N_DIAGNOSED - 1}")
                continue
            if euros < 0:
                errors.append(f"{name}:{lineno}: negative cost {euros!r}")
                continue
            cell = ((b_start, b_end), stage)
            if cell in cells:
                errors.append(f"{name}:{lineno}: duplicate cell for band {b_start}-{b_end}, stage {stage}")
                continue
            cells[cell] = euros
        tables[key] = cells
        band_sets[key] = {band for band, _ in cells}
    bands = sorted(band_sets["cost_c1"] | band_sets["cost_c2"] | band_sets["cost_c3"])
    for key in ("cost_c1", "cost_c2", "cost_c3"):
        name = CSV_FILES[key][0]
        for band in bands:
            for stage in range(N_DIAGNOSED):
                if (band, stage) not in tables[key]:
                    errors.append(f"{name}: missing cell for band {band[0]}-{band[1]}, stage {stage}")
    if not bands:
        errors.append("cost_c1.csv: no cost bands defined")
        return None
    arrays = {}
    for key in ("cost_c1", "cost_c2", "cost_c3"):
        arr = np.zeros((len(bands), N_DIAGNOSED))
        for b, band in enumerate(bands):
            for stage in range(N_DIAGNOSED):
                arr[b, stage] = tables[key].get((band, stage), 0.0)
        arrays[key] = arr
    return (
        tuple(b[0] for b in bands),
        tuple(b[1] for b in bands),
        arrays["cost_c1"],
        arrays["cost_c2"],
        arrays["cost_c3"],
    )


def _build_scenarios(sections, grid, errors):
    settings = {"screening_unit_cost": DEFAULT_SCREENING_UNIT_COST, "cohort_size": DEFAULT_COHORT_SIZE}
    specs = []
    for section, entries in sections:
        if section == MODEL_SECTION:
            for lineno, key, value in entries:
                if key not in settings:
                    errors.append(f"{SCENARIO_FILE}:{lineno}: unknown model setting {key!r}")
                    continue
                try:
                    settings[key] = float(value)
                except ValueError:
                    errors.append(f"{SCENARIO_FILE}:{lineno}: {key} {value!r} is not a number")
            continue
        extension = Extension.NONE
        older_variant = None
        screen_range = None
        screen_none = False
        transforms = []
        ok = True
        for lineno, key, value in entries:
            if key == "extension":
                try:
                    extension = Extension(value)
                except ValueError:
                    errors.append(f"{SCENARIO_FILE}:{lineno}: unknown extension {value!r}")
                    ok = False
            elif key == "older_incidence_variant":
                older_variant = value
            elif key == "screen_ages":
                if value == "none":
                    screen_none = True
                else:
                    try:
                        screen_range = _parse_age_range(value)
                    except ValueError as exc:
                        errors.append(f"{SCENARIO_FILE}:{lineno}: {exc}")
                        ok = False
            elif key == "transform":
                try:
                    transforms.append(_parse_transform(value, grid))
                except ValueError as exc:
                    errors.append(f"{SCENARIO_FILE}:{lineno}: {exc}")
                    ok = False
            else:
                errors.append(f"{SCENARIO_FILE}:{lineno}: unknown scenario key {key!r}")
                ok = False
        if extension in (Extension.OLDER, Extension.BOTH) and older_variant is None:
            errors.append(f"{SCENARIO_FILE}: scenario {section!r} extends to older ages but names no incidence variant")
            ok = False
        if ok:
            specs.append(ScenarioSpec(
                id=section,
                extension=extension,
                older_incidence_variant=older_variant,
                screen_range=screen_range,
                screen_none=screen_none,
                transforms=tuple(transforms),
            ))
    return settings, tuple(specs)


def load_bundle(root: str | Path) -> DataBundle:
    """Parse and validate a bundle directory; raises BundleValidationError
    listing every failure when anything is wrong."""
    root = Path(root)
    errors: list[str] = []
    if not root.is_dir():
        raise BundleValidationError([f"data directory {root} does not exist"])
    raw = {key: _read_rows(root / fname, cols, errors) for key, (fname, cols) in CSV_FILES.items()}
    sections = _parse_sections(root / SCENARIO_FILE, errors)

    grid = _build_grid(raw["incidence"], errors)
    if grid is None:
        raise BundleValidationError(errors)

    variants = _build_incidence(raw["incidence"], grid, errors)
    cond = _build_stage_dist(raw["stage_dist"], grid, errors)
    pmf, bc = _build_survival(raw["survival"], grid, errors)
    _check_interval(raw["population_interval"], grid, pmf, errors)
    cost_parts = _build_costs(raw, errors)
    settings, specs = _build_scenarios(sections, grid, errors)

    incidence = np.array([variants.get(CURRENT_VARIANT, {}).get(g.start, 0.0) for g in grid.groups])
    epi = EpidemiologyTable(grid, incidence, cond)
    for msg in epi.validate():
        errors.append(f"stage_dist.csv/incidence.csv: {msg}")
    surv = SurvivalModel(grid, pmf, bc)
    for msg in surv.validate():
        errors.append(f"survival.csv: {msg}")
    costs = None
    if cost_parts is not None:
        starts, ends, c1, c2, c3 = cost_parts
        costs = CostModel(settings["screening_unit_cost"], starts, ends, c1, c2, c3)
        for msg in costs.validate(grid):
            errors.append(f"cost tables: {msg}")
    if settings["cohort_size"] <= 0:
        errors.append(f"{SCENARIO_FILE}: cohort_size must be positive")
    ids = [s.id for s in specs]
    for dup in {i for i in ids if ids.count(i) > 1}:
        errors.append(f"{SCENARIO_FILE}: duplicate scenario id {dup!r}")

    if errors:
        raise BundleValidationError(sorted(set(errors), key=errors.index))
    return DataBundle(
        root=root,
        grid=grid,
        epi=epi,
        incidence_variants=variants,
        surv=surv,
        costs=costs,
        cohort_size=settings["cohort_size"],
        scenarios=specs,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _write_csv(path: Path, columns, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def save_bundle(bundle: DataBundle, root: str | Path) -> None:
    """Write a bundle back to CSV files; floats keep full precision so a
    reload reproduces the in-memory bundle exactly."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    grid = bundle.grid

    rows = []
    for variant in sorted(bundle.incidence_variants, key=lambda v: (v != CURRENT_VARIANT, v)):
        rates = bundle.incidence_variants[variant]
        for start in sorted(rates):
            g = grid.groups[grid.index_of(start)]
            rows.append([g.start, g.end, variant, repr(rates[start])])
    _write_csv(root / "incidence.csv", CSV_FILES["incidence"][1], rows)

    rows = []
    for j, g in enumerate(grid.groups):
        for k in range(N_DIAGNOSED):
            rows.append([g.start, g.end, k, repr(float(bundle.epi.cond_stage[j, k]))])
    _write_csv(root / "stage_dist.csv", CSV_FILES["stage_dist"][1], rows)

    rows = []
    for j, g in enumerate(grid.groups):
        for k in range(-1, N_DIAGNOSED):
            lam = bundle.surv.death_pmf[j, k + 1]
            bc = bundle.surv.bc_given_death[j, k + 1]
            for t in range(len(lam)):
                if lam[t] or bc[t]:
                    rows.append([g.start, g.end, k, t, repr(float(lam[t])), repr(float(bc[t]))])
    _write_csv(root / "survival.csv", CSV_FILES["survival"][1], rows)

    rows = []
    for j, g in enumerate(grid.groups):
        p0, p1, ps = bundle.surv.interval_split(j)
        rows.append([g.start, g.end, repr(p0), repr(p1), repr(ps)])
    _write_csv(root / "population_interval.csv", CSV_FILES["population_interval"][1], rows)

    for key, table in (("cost_c1", bundle.costs.c1), ("cost_c2", bundle.costs.c2), ("cost_c3", bundle.costs.c3)):
        rows = []
        for b in range(bundle.costs.n_bands):
            for k in range(N_DIAGNOSED):
                rows.append([bundle.costs.band_starts[b], bundle.costs.band_ends[b], k, repr(float(table[b, k]))])
        _write_csv(root / CSV_FILES[key][0], CSV_FILES[key][1], rows)

    lines = [f"[{MODEL_SECTION}]"]
    lines.append(f"screening_unit_cost = {bundle.costs.screening_unit_cost!r}")
    lines.append(f"cohort_size = {bundle.cohort_size!r}")
    for spec in bundle.scenarios:
        lines.append("")
        lines.append(f"[{spec.id}]")
        lines.append(f"extension = {spec.extension.value}")
        if spec.older_incidence_variant is not None:
            lines.append(f"older_incidence_variant = {spec.older_incidence_variant}")
        if spec.screen_none:
            lines.append("screen_ages = none")
        elif spec.screen_range is not None:
            lines.append(f"screen_ages = {spec.screen_range[0]}-{spec.screen_range[1]}")
        for t in spec.transforms:
            lines.append(f"transform = {t.kind.value},{t.magnitude!r},{_scope_token(t, grid)}")
    (root / SCENARIO_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")


def bundles_equal(a: DataBundle, b: DataBundle) -> bool:
    """Field-wise exact equality, ignoring the root paths."""
    return (
        a.grid == b.grid
        and np.array_equal(a.epi.incidence, b.epi.incidence)
        and np.array_equal(a.epi.cond_stage, b.epi.cond_stage)
        and a.incidence_variants == b.incidence_variants
        and np.array_equal(a.surv.death_pmf, b.surv.death_pmf)
        and np.array_equal(a.surv.bc_given_death, b.surv.bc_given_death)
        and a.costs.screening_unit_cost == b.costs.screening_unit_cost
        and a.costs.band_starts == b.costs.band_starts
        and a.costs.band_ends == b.costs.band_ends
        and np.array_equal(a.costs.c1, b.costs.c1)
        and np.array_equal(a.costs.c2, b.costs.c2)
        and np.array_equal(a.costs.c3, b.costs.c3)
        and a.cohort_size == b.cohort_size
        and a.scenarios == b.scenarios
    )


def parse_suite(path: str | Path) -> tuple[SuiteEntry, ...]:
    """Sensitivity suite file: one section per entry with kind and
    magnitude; scopes are derived from each scenario's extension."""
    errors: list[str] = []
    sections = _parse_sections(Path(path), errors)
    entries = []
    for section, kv in sections:
        kind = None
        magnitude = None
        for lineno, key, value in kv:
            if key == "kind":
                try:
                    kind = TransformKind(value)
                except ValueError:
                    errors.append(f"{Path(path).name}:{lineno}: unknown transform kind {value!r}")
            elif key == "magnitude":
                try:
                    magnitude = float(value)
                except ValueError:
                    errors.append(f"{Path(path).name}:{lineno}: magnitude {value!r} is not a number")
            else:
                errors.append(f"{Path(path).name}:{lineno}: unknown suite key {key!r}")
        if kind is None or magnitude is None:
            errors.append(f"{Path(path).name}: entry {section!r} needs both kind and magnitude")
        else:
            entries.append(SuiteEntry(section, kind, magnitude))
    if errors:
        raise BundleValidationError(errors)
    return tuple(entries)
