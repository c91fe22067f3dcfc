"""Acceptance gate: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pcaanon import (
    Dataset,
    StoppedReason,
    anonymize,
    column_stats,
    correlation,
    covariance,
    destandardize,
    eig_sym,
    evaluate,
    fit_sigmoid,
    gaussian_kl,
    gaussian_kl_from_moments,
    image_pca_remove,
    psnr,
    remove_top_components,
    ssim,
    standardize,
    write_csv,
)
from pcaanon.cli import main
from pcaanon.imaging import PSNR_INFINITE
from pcaanon.metrics import MetricRule, UtilityPolicy, always_pass_policy
from pcaanon.pca import _centered_covariance

from conftest import make_correlated_dataset
from oracles import remove_components_by_scores


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def test_sigmoid_fit_fixture():
    with criterion("sigmoid fit reproduces the eigenvalue-decay fixture"):
        points = [(1, 333320.0), (2, 197204.0), (3, 124780.0),
                  (4, 80285.0), (5, 67232.0)]
        start = time.perf_counter()
        fit = fit_sigmoid(points)
        elapsed = time.perf_counter() - start
        assert fit.b == pytest.approx(2.2111, abs=0.05)
        assert fit.c == pytest.approx(1.7664, abs=0.05)
        assert fit.d == pytest.approx(29624.0, rel=0.02)
        assert fit.a - fit.d == pytest.approx(389905.0, rel=0.02)
        assert fit.r_squared >= 0.999
        assert elapsed < 1.0


def test_image_quality_trend(natural_image):
    with criterion("SSIM and PSNR strictly decrease over k in {1,2,5}"):
        start = time.perf_counter()
        ssims, psnrs = [], []
        for k in (1, 2, 5):
            removed = image_pca_remove(natural_image, k)
            ssims.append(ssim(natural_image, removed))
            psnrs.append(psnr(natural_image, removed))
        elapsed = time.perf_counter() - start
        assert ssims[0] > ssims[1] > ssims[2]
        assert psnrs[0] > psnrs[1] > psnrs[2]
        assert all(0.0 <= v <= 1.0 for v in ssims)
        assert elapsed < 10.0


def test_pca_oracle_equivalence():
    with criterion("component removal matches the score-zeroing oracle "
                   "and both loop routes agree"):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 50:
            n = int(rng.integers(3, 7))
            p = int(rng.integers(2, 5))
            raw = rng.uniform(-5, 5, size=(n, p))
            if np.any(raw.std(axis=0) == 0):
                continue
            checked += 1
            d = Dataset(column_names=tuple(f"c{j}" for j in range(p)),
                        rows=raw)
            s = standardize(d, column_stats(d))
            es = eig_sym(covariance(s))

            literal = s
            for k in range(p):
                ours = remove_top_components(s, es, k).rows
                oracle = remove_components_by_scores(
                    s.rows, es.eigenvectors, k)
                assert np.max(np.abs(ours - oracle)) <= 1e-8
                assert np.max(np.abs(literal.rows - ours)) <= 1e-8
                if k < p - 1:
                    es_k = eig_sym(_centered_covariance(literal.rows))
                    literal = remove_top_components(literal, es_k, 1)


def test_identity_battery(natural_image):
    with criterion("identical inputs give zero norms, unit correlation, "
                   "zero KL, unit SSIM, infinite PSNR"):
        d = make_correlated_dataset(n=50, seed=3)
        policy = UtilityPolicy(rules={
            name: MetricRule(enabled=True, threshold=t)
            for name, t in (("norm_sum", 1.0), ("norm_l1", 1.0),
                            ("norm_frobenius", 1.0),
                            ("correlation", 0.5), ("kl", 1.0))})
        report = evaluate(d, d, policy)
        assert report.norm_sum <= 1e-12
        assert report.norm_l1_adapted <= 1e-12
        assert report.norm_frobenius <= 1e-12
        assert report.correlation == pytest.approx(1.0, abs=1e-12)
        assert report.kl_divergence <= 1e-9
        assert ssim(natural_image, natural_image) == pytest.approx(
            1.0, abs=1e-12)
        assert psnr(natural_image, natural_image) is PSNR_INFINITE


def test_collinear_degenerate_case():
    with criterion("rank-1 two-column data collapses after one removal "
                   "and the loop reports all_but_one_removed"):
        xs = np.arange(1.0, 9.0)
        d = Dataset(column_names=("x", "y"),
                    rows=np.column_stack([xs, 2.0 * xs + 3.0]))
        stats = column_stats(d)
        s = standardize(d, stats)
        es = eig_sym(covariance(s))
        reduced = remove_top_components(s, es, 1)
        assert np.max(np.abs(reduced.rows)) <= 1e-9

        result = anonymize(d, always_pass_policy())
        assert result.components_removed == d.n_cols - 1
        assert result.stopped_reason is StoppedReason.ALL_BUT_ONE_REMOVED


def test_gaussian_kl_closed_form():
    with criterion("analytic 1-D KL equals 0.5 and the divergence "
                   "is asymmetric"):
        value = gaussian_kl_from_moments([0.0], [[1.0]], [1.0], [[1.0]])
        assert value == pytest.approx(0.5, abs=1e-12)

        d = make_correlated_dataset(n=80, seed=5)
        s = standardize(d, column_stats(d))
        es = eig_sym(covariance(s))
        b = destandardize(remove_top_components(s, es, 1), d.column_names)
        forward = gaussian_kl(d, b)
        backward = gaussian_kl(b, d)
        assert math.isfinite(forward) and math.isfinite(backward)
        assert forward != backward


def test_cmd_anonymize_determinism(tmp_path):
    with criterion("cmd_anonymize is byte-identical across reruns"):
        d = make_correlated_dataset(n=12, seed=9)
        a_path = tmp_path / "a.csv"
        write_csv(d, a_path)
        policy_path = tmp_path / "policy.json"
        policy_path.write_text(json.dumps({
            "norm_frobenius": {"enabled": True, "threshold": 1e12},
            "correlation": {"enabled": True, "threshold": -1.0}}),
            encoding="utf-8")
        out = tmp_path / "b.csv"
        names = ("b.csv", "b.csv.report.json", "b.csv.history.csv")
        snapshots = []
        for _ in range(2):
            code = main(["anonymize", "--input", str(a_path),
                         "--output", str(out),
                         "--policy", str(policy_path), "--seed", "11",
                         "--emit", "report_json,history_csv"])
            assert code == 0
            snapshots.append({name: (tmp_path / name).read_bytes()
                              for name in names})
        assert snapshots[0] == snapshots[1]
