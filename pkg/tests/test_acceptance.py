"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (visible with -v through the test name, or -s for the
summary lines). Tolerances are part of the contract and must not be
loosened here.
"""

import dataclasses
import itertools
import random
import time
from pathlib import Path

import pytest

from fsskit.cli import main
from fsskit.config import build_schemes
from fsskit.corpus import Authorship, SalarySchedule, export_corpus
from fsskit.credit import ALPHABETICAL, POSITION_WEIGHTED, WeightingScheme, byline_weights
from fsskit.dea import DMU, _envelopment_lp, dea_output_oriented, scale_efficiency
from fsskit.indicators import (compute_field_means, fss_d, fss_r, fss_s, fss_u,
                               fp_u, p_u, researcher_scores, staff_scores,
                               university_scores, write_scores)
from fsskit.normalize import compute_baselines, normalized_impact
from fsskit.rankings import percentile_rank, quartile_size, rank_scores, spearman_rho
from fsskit.synth import SynthParams, generate_synthetic_corpus
from oracles import ReferenceScores, reference_lp_maximum, reference_spearman_distinct


class criterion:
    """Context manager printing one '[acceptance] PASS/FAIL name' line."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        elapsed = time.perf_counter() - self.t0
        print(f"[acceptance] {verdict} {self.name} ({elapsed:.2f}s)")
        return False


def test_01_percentile_anchors():
    with criterion("percentile anchors: 3rd of 10 -> 70, 3rd of 100 -> 97"):
        assert percentile_rank(list(range(10, 0, -1)), 8) == 70.0
        assert percentile_rank(list(range(100, 0, -1)), 98) == 97.0


def test_02_byline_credit_fixtures():
    with criterion("byline credit: stated vectors exact, 10000 random sums = 1"):
        def byline(institutions):
            return tuple(Authorship(position=i + 1, institution_id=inst)
                         for i, inst in enumerate(institutions))

        weighted = WeightingScheme(kind=POSITION_WEIGHTED)
        alpha = WeightingScheme(kind=ALPHABETICAL)

        five = byline_weights(byline(["U1", "U2", "U3", "U4", "U1"]), weighted)
        assert five == pytest.approx([0.40, 0.20 / 3, 0.20 / 3, 0.20 / 3, 0.40],
                                     abs=1e-12)
        six = byline_weights(byline(["U1", "U2", "U3", "U4", "U5", "U6"]), weighted)
        assert six == pytest.approx([0.30, 0.15, 0.05, 0.05, 0.15, 0.30], abs=1e-12)

        rng = random.Random(20260819)
        pool = ["U1", "U2", "U3", "U4"]
        for _ in range(10000):
            n = rng.randint(1, 12)
            institutions = [rng.choice(pool) for _ in range(n)]
            scheme = weighted if rng.random() < 0.5 else alpha
            weights = byline_weights(byline(institutions), scheme)
            assert abs(sum(weights) - 1.0) <= 1e-12


def test_03_indicator_oracle_equivalence(synth):
    with criterion("independent naive recomputation of all six indicators (1e-9)"):
        corpus = synth.corpus
        baselines, schemes, means = synth.baselines, synth.schemes, synth.means
        oracle = ReferenceScores(corpus)

        for rid in corpus.researchers:
            assert fss_r(corpus, baselines, schemes, rid) == pytest.approx(
                oracle.fss_r(rid), rel=1e-9), rid

        for inst in corpus.institutions():
            fields = sorted({r.sds_code for r in corpus.staff(institution_id=inst)})
            for sds in fields:
                assert fss_s(corpus, baselines, schemes, sds, inst) == pytest.approx(
                    oracle.fss_s(sds, inst), rel=1e-9), (inst, sds)
            assert fss_u(corpus, baselines, schemes, means, inst) == pytest.approx(
                oracle.fss_u(inst), rel=1e-9), inst
            assert p_u(corpus, means, inst) == pytest.approx(
                oracle.p_u(inst), rel=1e-9), inst
            assert fp_u(corpus, schemes, means, inst) == pytest.approx(
                oracle.fp_u(inst), rel=1e-9), inst

        for sds in corpus.taxonomy.sds_codes():
            assert fss_s(corpus, baselines, schemes, sds, None) == pytest.approx(
                oracle.fss_s(sds, None), rel=1e-9), sds

        for dept in corpus.departments():
            assert fss_d(corpus, baselines, schemes, means, dept) == pytest.approx(
                oracle.fss_d(dept), rel=1e-9), dept


def test_04_normalization_cohort_mean():
    with criterion("cited single-category cohort mean impact = 1 (1e-12)"):
        corpus = generate_synthetic_corpus(
            1234, SynthParams(n_researchers=300, single_category=True))
        table = compute_baselines(corpus.publications)
        cohorts = 0
        for year, category in table.cohorts():
            impacts = [
                normalized_impact(pub, table)
                for pub in corpus.publications.values()
                if pub.year == year and pub.citations >= 1
                and pub.subject_categories == (category,)
            ]
            assert impacts
            mean = sum(impacts) / len(impacts)
            assert mean == pytest.approx(1.0, abs=1e-12), (year, category)
            cohorts += 1
        assert cohorts >= 10


def scale_salaries(corpus, k: float):
    researchers = {
        rid: (r if r.salary_per_year is None
              else dataclasses.replace(r, salary_per_year=r.salary_per_year * k))
        for rid, r in corpus.researchers.items()
    }
    schedule = SalarySchedule(entries={
        key: value * k for key, value in corpus.salaries.entries.items()
    })
    return dataclasses.replace(corpus, researchers=researchers, salaries=schedule)


def test_05_salary_scale_invariance(synth):
    with criterion("salary scaling by k in {0.5, 3}: orders fixed, FSS x 1/k"):
        corpus, baselines, schemes = synth.corpus, synth.baselines, synth.schemes
        base_r = synth.researcher_scores
        base_staff = staff_scores(corpus, baselines, schemes)
        base_uni = university_scores(corpus, baselines, schemes, synth.means)

        def order(scores):
            return [e.unit_id for e in rank_scores(scores).entries]

        for k in (0.5, 3.0):
            scaled = scale_salaries(corpus, k)
            scaled_r = researcher_scores(scaled, baselines, schemes)
            for rid, value in base_r.entries.items():
                assert scaled_r.entries[rid] * k == pytest.approx(value, rel=1e-12), rid
            scaled_staff = staff_scores(scaled, baselines, schemes)
            for uid, value in base_staff.entries.items():
                assert scaled_staff.entries[uid] * k == pytest.approx(value, rel=1e-12)
            scaled_means = compute_field_means(scaled, baselines, schemes,
                                               researcher_values=scaled_r.entries)
            scaled_uni = university_scores(scaled, baselines, schemes, scaled_means)
            assert order(scaled_r) == order(base_r)
            assert order(scaled_staff) == order(base_staff)
            assert order(scaled_uni) == order(base_uni)


def test_06_quartile_convention():
    with criterion("top-quartile sizes for n in {42,43,50,61} = {11,11,13,16}"):
        assert [quartile_size(n) for n in (42, 43, 50, 61)] == [11, 11, 13, 16]


def test_07_spearman_exhaustive():
    with criterion("spearman = closed form on every tie-free permutation, n <= 6"):
        for n in range(2, 7):
            x = [float(i) for i in range(1, n + 1)]
            for perm in itertools.permutations(x):
                expected = reference_spearman_distinct(x, list(perm))
                assert spearman_rho(x, list(perm)) == pytest.approx(
                    expected, abs=1e-12), perm


def test_08_dea_properties():
    with criterion("DEA on <=6-DMU fixtures: frontier, TE order, SE, LP oracle"):
        t0 = time.perf_counter()
        fixtures = [[
            DMU(id="A", inputs=(2.0,), outputs=(4.0,)),
            DMU(id="B", inputs=(4.0,), outputs=(8.0,)),
            DMU(id="C", inputs=(4.0,), outputs=(4.0,)),
            DMU(id="D", inputs=(1.0,), outputs=(1.0,)),
        ]]
        rng = random.Random(555)
        for _ in range(5):
            fixtures.append([
                DMU(id=f"d{i}",
                    inputs=tuple(float(rng.randint(1, 9)) for _ in range(2)),
                    outputs=tuple(float(rng.randint(1, 9)) for _ in range(2)))
                for i in range(rng.randint(3, 6))
            ])
        for dmus in fixtures:
            crs = {s.id: s for s in dea_output_oriented(dmus, "crs")}
            vrs = {s.id: s for s in dea_output_oriented(dmus, "vrs")}
            for model, scores in (("crs", crs), ("vrs", vrs)):
                for index, dmu in enumerate(dmus):
                    lp = _envelopment_lp(dmus, index, model)
                    expected, _ = reference_lp_maximum(lp.c, lp.a_ub, lp.b_ub,
                                                       lp.a_eq, lp.b_eq)
                    assert scores[dmu.id].phi == pytest.approx(
                        max(expected, 1.0), abs=1e-6), (model, dmu.id)
                    if abs(expected - 1.0) <= 1e-9:
                        assert scores[dmu.id].efficiency == pytest.approx(
                            1.0, abs=1e-6)
            for uid in crs:
                assert vrs[uid].efficiency >= crs[uid].efficiency - 1e-9
            se = scale_efficiency(crs.values(), vrs.values())
            assert all(v <= 1.0 + 1e-6 for v in se.values())
        assert time.perf_counter() - t0 < 1.0


def test_09_parallel_determinism(synth, tmp_path):
    with criterion("score with workers 1 vs 4: byte-identical artifacts"):
        data = tmp_path / "census"
        export_corpus(synth.corpus, data)
        outs = []
        for workers in ("1", "4"):
            out = tmp_path / f"w{workers}"
            code = main(["score", "--data", str(data),
                         "--workers", workers, "--output-dir", str(out)])
            assert code == 0
            outs.append(out)
        for artifact in ("scores.csv", "baselines.csv", "report.json"):
            a = (outs[0] / artifact).read_bytes()
            b = (outs[1] / artifact).read_bytes()
            assert a == b, artifact


def test_10_throughput(tmp_path):
    corpus = generate_synthetic_corpus(
        42, SynthParams(n_researchers=18000, n_institutions=40))
    assert len(corpus.publications) >= 100_000
    with criterion(f"score {len(corpus.publications)} publications in < 30s"):
        t0 = time.perf_counter()
        baselines = compute_baselines(corpus.publications)
        schemes = build_schemes(corpus.taxonomy)
        scores = researcher_scores(corpus, baselines, schemes)
        means = compute_field_means(corpus, baselines, schemes,
                                    researcher_values=scores.entries)
        sets = [scores]
        for indicator in ("fss_u", "p_u", "fp_u"):
            sets.append(university_scores(corpus, baselines, schemes, means, indicator))
        write_scores(sets, tmp_path / "scores.csv")
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0, f"scoring took {elapsed:.1f}s"
        assert Path(tmp_path / "scores.csv").stat().st_size > 0
