"""Cost-normalized productivity indicators at four aggregation levels.

All indicators share one structure: sum the field-normalized, fractionally
credited output of a unit, then divide by what the unit cost. Labor cost is
the salary dimension: a researcher's yearly salary for the individual
indicator, total salary over the window for staff aggregates.

Individual (one researcher j, field s, window of t years):

    fss_r = (1 / w_j) * (1 / t_j) * sum_i impact_i * f_ij

where w_j is yearly salary, impact_i the publication's normalized citation
ratio and f_ij the author's fractional credit under field s's convention.

Staff (all researchers of one institution, or the whole census, in field s):

    fss_s = (1 / W) * sum_j sum_i impact_i * f_ij,   W = sum_j w_j * t_j

Department/institution roll-ups divide each member's (or each field
aggregate's) score by the national mean over productive peers of the same
field, so fields with different publication cultures become comparable:

    fss_d = (1 / RS) * sum_j fss_r_j / mean_s(j)
    fss_u = sum_s (fss_s_s / wmean_s) * (W_s / W_total)

Output volume indicators use the same pattern on publication counts per
year: whole counts per head for p_u, fractional counts for fp_u.

"Productive" always means a strictly positive score; national means are
taken over productive units only. Staff means are weighted by each
institution's labor cost in the field. Every reduction uses math.fsum over
a sorted iteration order, so results do not depend on thread count or dict
ordering.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Researcher, resolve_salary
from .credit import WeightingScheme, fractional_contribution
from .errors import ComputationError, InputError, LoadError, MissingFieldMeanError
from .normalize import BaselineTable, normalized_impact

LEVELS = ("researcher", "staff", "department", "university")
SCORE_COLUMNS = ("level", "unit_id", "indicator", "value")

STAFF_KEY_SEPARATOR = ":"
COUNTRY_UNIT = "@country"


@dataclass
class ScoreSet:
    """One indicator evaluated over the units of one level."""

    level: str
    indicator: str
    entries: dict[str, float]
    window: tuple[int, int]
    metadata: dict = field(default_factory=dict)

    def unit_ids(self) -> list[str]:
        return sorted(self.entries)

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "indicator": self.indicator,
            "window": list(self.window),
            "entries": {uid: self.entries[uid] for uid in self.unit_ids()},
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class FieldMeans:
    """National means per field over productive units, for standardization.

    score_R, whole and fractional output rates are plain means over
    productive researchers; the staff mean is weighted by each university's
    labor cost in the field.
    """

    fss_r: dict[str, float]
    fss_s: dict[str, float]
    q: dict[str, float]
    fq: dict[str, float]

    def require(self, table_name: str, sds_code: str) -> float:
        table = getattr(self, table_name)
        if sds_code not in table:
            raise MissingFieldMeanError(
                f"no national {table_name} mean for field {sds_code!r} "
                "(no productive unit in that field)"
            )
        return table[sds_code]


def staff_unit_id(institution_id: str | None, sds_code: str) -> str:
    inst = COUNTRY_UNIT if institution_id is None else institution_id
    return f"{inst}{STAFF_KEY_SEPARATOR}{sds_code}"


# ---------------------------------------------------------------------------
# Per-publication plumbing
# ---------------------------------------------------------------------------

def _weighted_output(corpus: Corpus, baselines: BaselineTable, scheme: WeightingScheme,
                     researcher: Researcher) -> float:
    """sum_i impact_i * f_i over one researcher's publications."""
    terms = []
    for pub, position in corpus.publications_of(researcher.id):
        impact = normalized_impact(pub, baselines)
        if impact == 0.0:
            continue
        terms.append(impact * fractional_contribution(pub.byline, position, scheme))
    return math.fsum(terms)


def _fractional_count(corpus: Corpus, scheme: WeightingScheme, researcher: Researcher) -> float:
    terms = [
        fractional_contribution(pub.byline, position, scheme)
        for pub, position in corpus.publications_of(researcher.id)
    ]
    return math.fsum(terms)


def _yearly_salary(corpus: Corpus, researcher: Researcher) -> float:
    w = resolve_salary(researcher, corpus.salaries)
    if w <= 0:
        raise ComputationError(f"researcher {researcher.id!r} has non-positive salary")
    return w


def _years(researcher: Researcher) -> float:
    if researcher.years_in_window <= 0:
        raise ComputationError(f"researcher {researcher.id!r} has non-positive years_in_window")
    return researcher.years_in_window


# ---------------------------------------------------------------------------
# Unit-level indicator values
# ---------------------------------------------------------------------------

def fss_r(corpus: Corpus, baselines: BaselineTable, schemes: dict[str, WeightingScheme],
          researcher_id: str) -> float:
    """Individual productivity: normalized fractional output per salary-year."""
    try:
        researcher = corpus.researchers[researcher_id]
    except KeyError:
        raise InputError(f"unknown researcher: {researcher_id!r}") from None
    output = _weighted_output(corpus, baselines, schemes[researcher.sds_code], researcher)
    return output / (_yearly_salary(corpus, researcher) * _years(researcher))


def fss_s(corpus: Corpus, baselines: BaselineTable, schemes: dict[str, WeightingScheme],
          sds_code: str, institution_id: str | None = None) -> float:
    """Staff productivity of one field at one institution (or nationally when
    institution_id is None): normalized fractional output per unit of total
    labor cost over the window."""
    staff = corpus.staff(institution_id=institution_id, sds_code=sds_code)
    if not staff:
        where = institution_id if institution_id is not None else "the census"
        raise ComputationError(f"no staff in field {sds_code!r} at {where}")
    scheme = schemes[sds_code]
    cost = math.fsum(_yearly_salary(corpus, r) * _years(r) for r in staff)
    if cost <= 0:
        raise ComputationError(f"staff of field {sds_code!r} has non-positive labor cost")
    output = math.fsum(_weighted_output(corpus, baselines, scheme, r) for r in staff)
    return output / cost


def fss_d(corpus: Corpus, baselines: BaselineTable, schemes: dict[str, WeightingScheme],
          means: FieldMeans, department_id: str) -> float:
    """Department productivity: average of members' field-standardized
    individual scores. Unproductive members pull the average down through
    the head count without contributing output."""
    staff = corpus.staff(department_id=department_id)
    if not staff:
        raise ComputationError(f"no staff in department {department_id!r}")
    terms = []
    for r in staff:
        value = fss_r(corpus, baselines, schemes, r.id)
        if value == 0.0:
            continue
        terms.append(value / means.require("fss_r", r.sds_code))
    return math.fsum(terms) / len(staff)


def fss_u(corpus: Corpus, baselines: BaselineTable, schemes: dict[str, WeightingScheme],
          means: FieldMeans, institution_id: str, uda_code: str | None = None) -> float:
    """Institution productivity: cost-share weighted average of the
    institution's field staff scores, each standardized by the national
    cost-weighted mean for that field. Restricting to one discipline ranks
    institutions within it."""
    staff = corpus.staff(institution_id=institution_id, uda_code=uda_code)
    if not staff:
        raise ComputationError(f"no staff at {institution_id!r}"
                               + (f" in discipline {uda_code!r}" if uda_code else ""))
    by_sds: dict[str, list[Researcher]] = {}
    for r in staff:
        by_sds.setdefault(r.sds_code, []).append(r)

    costs = {
        sds: math.fsum(_yearly_salary(corpus, r) * _years(r) for r in members)
        for sds, members in sorted(by_sds.items())
    }
    total_cost = math.fsum(costs[sds] for sds in sorted(costs))
    if total_cost <= 0:
        raise ComputationError(f"staff at {institution_id!r} has non-positive labor cost")

    terms = []
    for sds in sorted(by_sds):
        value = fss_s(corpus, baselines, schemes, sds, institution_id)
        if value == 0.0:
            continue
        terms.append((value / means.require("fss_s", sds)) * (costs[sds] / total_cost))
    return math.fsum(terms)


def _rate(corpus: Corpus, researcher: Researcher) -> float:
    return len(corpus.publications_of(researcher.id)) / _years(researcher)


def _fractional_rate(corpus: Corpus, schemes: dict[str, WeightingScheme],
                     researcher: Researcher) -> float:
    return _fractional_count(corpus, schemes[researcher.sds_code], researcher) / _years(researcher)


def _rate_rollup(corpus: Corpus, staff: list[Researcher], means_table: str,
                 means: FieldMeans, rate_of) -> float:
    terms = []
    for r in staff:
        value = rate_of(r)
        if value == 0.0:
            continue
        terms.append(value / means.require(means_table, r.sds_code))
    return math.fsum(terms) / len(staff)


def p_u(corpus: Corpus, means: FieldMeans, institution_id: str,
        uda_code: str | None = None) -> float:
    """Output volume per head: average of members' field-standardized
    publication rates (whole counts per year in post)."""
    staff = corpus.staff(institution_id=institution_id, uda_code=uda_code)
    if not staff:
        raise ComputationError(f"no staff at {institution_id!r}"
                               + (f" in discipline {uda_code!r}" if uda_code else ""))
    return _rate_rollup(corpus, staff, "q", means, lambda r: _rate(corpus, r))


def fp_u(corpus: Corpus, schemes: dict[str, WeightingScheme], means: FieldMeans,
         institution_id: str, uda_code: str | None = None) -> float:
    """Like p_u but on fractional publication counts, so multi-authored
    output is not double counted across institutions."""
    staff = corpus.staff(institution_id=institution_id, uda_code=uda_code)
    if not staff:
        raise ComputationError(f"no staff at {institution_id!r}"
                               + (f" in discipline {uda_code!r}" if uda_code else ""))
    return _rate_rollup(corpus, staff, "fq", means,
                        lambda r: _fractional_rate(corpus, schemes, r))


# ---------------------------------------------------------------------------
# National means
# ---------------------------------------------------------------------------

def compute_field_means(corpus: Corpus, baselines: BaselineTable,
                        schemes: dict[str, WeightingScheme],
                        researcher_values: dict[str, float] | None = None) -> FieldMeans:
    """National standardization means per field.

    ``researcher_values`` may carry precomputed individual scores to avoid
    recomputing them; otherwise they are derived here.
    """
    if researcher_values is None:
        researcher_values = {
            rid: fss_r(corpus, baselines, schemes, rid) for rid in sorted(corpus.researchers)
        }

    by_sds_r: dict[str, list[float]] = {}
    by_sds_q: dict[str, list[float]] = {}
    by_sds_fq: dict[str, list[float]] = {}
    for rid in sorted(corpus.researchers):
        r = corpus.researchers[rid]
        value = researcher_values[rid]
        if value > 0:
            by_sds_r.setdefault(r.sds_code, []).append(value)
        rate = _rate(corpus, r)
        if rate > 0:
            by_sds_q.setdefault(r.sds_code, []).append(rate)
        frac = _fractional_rate(corpus, schemes, r)
        if frac > 0:
            by_sds_fq.setdefault(r.sds_code, []).append(frac)

    staff_values: dict[str, list[tuple[float, float]]] = {}
    for inst in corpus.institutions():
        for sds in sorted({r.sds_code for r in corpus.staff(institution_id=inst)}):
            value = fss_s(corpus, baselines, schemes, sds, inst)
            if value <= 0:
                continue
            staff = corpus.staff(institution_id=inst, sds_code=sds)
            cost = math.fsum(_yearly_salary(corpus, r) * _years(r) for r in staff)
            staff_values.setdefault(sds, []).append((value, cost))

    fss_s_means = {}
    for sds in sorted(staff_values):
        pairs = staff_values[sds]
        weight = math.fsum(cost for _, cost in pairs)
        if weight > 0:
            fss_s_means[sds] = math.fsum(v * cost for v, cost in pairs) / weight

    return FieldMeans(
        fss_r={sds: math.fsum(vals) / len(vals) for sds, vals in sorted(by_sds_r.items())},
        fss_s=fss_s_means,
        q={sds: math.fsum(vals) / len(vals) for sds, vals in sorted(by_sds_q.items())},
        fq={sds: math.fsum(vals) / len(vals) for sds, vals in sorted(by_sds_fq.items())},
    )


# ---------------------------------------------------------------------------
# Batch evaluation
# ---------------------------------------------------------------------------

def researcher_scores(corpus: Corpus, baselines: BaselineTable,
                      schemes: dict[str, WeightingScheme], workers: int = 1) -> ScoreSet:
    """Individual scores for every census researcher.

    Researchers are independent, so the loop can fan out over threads; ids
    are processed in sorted order and results zipped back positionally, so
    any worker count yields the identical ScoreSet.
    """
    ids = sorted(corpus.researchers)
    if workers < 1:
        raise InputError("workers must be >= 1")
    if workers == 1 or len(ids) < 2:
        values = [fss_r(corpus, baselines, schemes, rid) for rid in ids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda rid: fss_r(corpus, baselines, schemes, rid), ids))
    return ScoreSet(
        level="researcher",
        indicator="fss_r",
        entries=dict(zip(ids, values)),
        window=corpus.window,
        metadata={"sds_of_unit": {rid: corpus.researchers[rid].sds_code for rid in ids}},
    )


def staff_scores(corpus: Corpus, baselines: BaselineTable,
                 schemes: dict[str, WeightingScheme]) -> ScoreSet:
    """Field staff scores for every (institution, field) pair with staff."""
    entries = {}
    sds_of_unit = {}
    for inst in corpus.institutions():
        for sds in sorted({r.sds_code for r in corpus.staff(institution_id=inst)}):
            uid = staff_unit_id(inst, sds)
            entries[uid] = fss_s(corpus, baselines, schemes, sds, inst)
            sds_of_unit[uid] = sds
    return ScoreSet(level="staff", indicator="fss_s", entries=entries,
                    window=corpus.window, metadata={"sds_of_unit": sds_of_unit})


def department_scores(corpus: Corpus, baselines: BaselineTable,
                      schemes: dict[str, WeightingScheme], means: FieldMeans) -> ScoreSet:
    entries = {
        dept: fss_d(corpus, baselines, schemes, means, dept)
        for dept in corpus.departments()
    }
    return ScoreSet(level="department", indicator="fss_d", entries=entries,
                    window=corpus.window)


def university_scores(corpus: Corpus, baselines: BaselineTable,
                      schemes: dict[str, WeightingScheme], means: FieldMeans,
                      indicator: str = "fss_u", uda_code: str | None = None) -> ScoreSet:
    """Institution-level scores; ``indicator`` picks fss_u, p_u or fp_u."""
    entries = {}
    for inst in corpus.institutions():
        if uda_code is not None and not corpus.staff(institution_id=inst, uda_code=uda_code):
            continue
        if indicator == "fss_u":
            entries[inst] = fss_u(corpus, baselines, schemes, means, inst, uda_code)
        elif indicator == "p_u":
            entries[inst] = p_u(corpus, means, inst, uda_code)
        elif indicator == "fp_u":
            entries[inst] = fp_u(corpus, schemes, means, inst, uda_code)
        else:
            raise InputError(f"unknown university indicator: {indicator!r}")
    metadata = {}
    if uda_code is not None:
        metadata["uda"] = uda_code
    return ScoreSet(level="university", indicator=indicator, entries=entries,
                    window=corpus.window, metadata=metadata)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_scores(score_sets, path) -> Path:
    """scores.csv: level,unit_id,indicator,value with full-precision floats."""
    if isinstance(score_sets, ScoreSet):
        score_sets = [score_sets]
    path = Path(path)
    rows = []
    for scores in score_sets:
        for uid in scores.unit_ids():
            rows.append((scores.level, uid, scores.indicator, repr(scores.entries[uid])))
    rows.sort(key=lambda row: (row[0], row[2], row[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORE_COLUMNS)
        writer.writerows(rows)
    return path


def read_scores(path, window: tuple[int, int] = (0, 0)) -> list[ScoreSet]:
    path = Path(path)
    if not path.exists():
        raise LoadError("file not found", file=path)
    grouped: dict[tuple[str, str], dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in SCORE_COLUMNS):
            raise LoadError(f"expected columns {', '.join(SCORE_COLUMNS)}", file=path, line=1)
        for row in reader:
            try:
                value = float(row["value"])
            except (TypeError, ValueError):
                raise LoadError(f"not a number: {row['value']!r}", file=path,
                                line=reader.line_num, column="value") from None
            level, uid, indicator = row["level"], row["unit_id"], row["indicator"]
            if not level or not uid or not indicator:
                raise LoadError("level, unit_id and indicator are required",
                                file=path, line=reader.line_num)
            bucket = grouped.setdefault((level, indicator), {})
            if uid in bucket:
                raise LoadError(f"duplicate unit {uid!r} for {level}/{indicator}",
                                file=path, line=reader.line_num, column="unit_id")
            bucket[uid] = value
    return [
        ScoreSet(level=level, indicator=indicator, entries=entries, window=window)
        for (level, indicator), entries in sorted(grouped.items())
    ]


def write_scores_json(score_sets, path) -> Path:
    if isinstance(score_sets, ScoreSet):
        score_sets = [score_sets]
    path = Path(path)
    payload = [s.to_json_dict() for s in score_sets]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
