"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""

import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import brute_dtw
from segsyl import count_compositions, dtw_distance, stitch
from segsyl.cli import run_command
from segsyl.harness import SynthConfig, compare_strategies
from segsyl.stitching import build_linear_system, build_quadratic_system, solve_dense


@pytest.fixture
def criterion(request):
    """Yields a dict for notes; records PASS/FAIL from the test outcome."""
    notes = {}
    yield notes
    name = request.node.name.removeprefix("test_")
    failed = getattr(request.node, "_failed", False)
    detail = ", ".join(f"{k}={v}" for k, v in notes.items())
    ACCEPTANCE_LINES.append(f"{'FAIL' if failed else 'PASS'}  {name}  {detail}")


@pytest.fixture(scope="module")
def search_ensemble():
    """200 seeded instances over four (N, P) settings; p <= 12 since 1-3 syllables of 2-4 segments."""
    settings = [(20, 3, 0.3), (12, 2, 0.5), (5, 1, 0.2), (20, 1, 1.0)]
    t0 = time.perf_counter()
    records = []
    for k, (n, dim, noise) in enumerate(settings):
        cfg = SynthConfig(seed=1000 + k, syllable_count=n, parameter_dim=dim, noise_sigma=noise)
        report = compare_strategies(cfg, 50, check=False)
        assert not report.violations, report.violations[:5]
        records.extend(report.instances)
    return records, time.perf_counter() - t0


def test_ac01_path_enumeration(criterion, capsys, tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "enum.json"
    assert run_command(["enumerate", "--segments", "7", "--lengths", "2,3,4", "--out", str(out)]) == 0
    elapsed = time.perf_counter() - t0
    text = capsys.readouterr().out
    doc = json.loads(out.read_text())
    got = {"-".join(map(str, p["nodes"])) for p in doc["paths"]}
    assert got == {"0-2-4-7", "0-2-5-7", "0-3-5-7", "0-3-7", "0-4-7"}
    assert len(doc["paths"]) == 5 and "count 5" in text
    assert count_compositions(7, {2, 3, 4}) == 5
    assert elapsed < 1.0
    criterion.update(paths=len(got), seconds=f"{elapsed:.3f}")


def test_ac02_search_optimality_oracle(criterion, search_ensemble):
    records, elapsed = search_ensemble
    assert len(records) == 200
    assert max(r["segments"] for r in records) <= 12
    for r in records:
        s = r["strategies"]
        assert s["full"]["cost"] <= s["dfs"]["cost"]
        assert s["full"]["cost"] <= s["bfs"]["cost"]
    # full == oracle is checked inside compare_strategies; any mismatch is a violation
    assert elapsed < 30.0
    criterion.update(instances=len(records), seconds=f"{elapsed:.2f}")


def test_ac03_strategy_economy(criterion, search_ensemble):
    records, _ = search_ensemble
    multi = [r for r in records if r["complete_paths"] >= 2]
    assert multi
    ratios = {"dfs": [], "bfs": []}
    for r in multi:
        s = r["strategies"]
        for name in ratios:
            assert s[name]["arcs_evaluated"] < s["full"]["arcs_evaluated"]
            ratios[name].append(s[name]["arcs_evaluated"] / s["full"]["arcs_evaluated"])
    criterion.update(
        multi_path=len(multi),
        dfs_ratio=f"{np.mean(ratios['dfs']):.3f}",
        bfs_ratio=f"{np.mean(ratios['bfs']):.3f}",
    )


def test_ac04_bfs_hop_guarantee(criterion, search_ensemble):
    records, _ = search_ensemble
    for r in records:
        assert r["strategies"]["bfs"]["hops"] <= r["min_hops"]
    criterion.update(instances=len(records))


def test_ac05_dtw_oracle(criterion):
    rng = np.random.default_rng(55)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        dim = int(rng.integers(1, 3))
        a = rng.normal(size=(int(rng.integers(1, 7)), dim)) * 3
        b = rng.normal(size=(int(rng.integers(1, 7)), dim)) * 3
        err = abs(dtw_distance(a, b) - brute_dtw(a, b))
        worst = max(worst, err)
        assert err <= 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    criterion.update(pairs=500, max_err=f"{worst:.1e}", seconds=f"{elapsed:.2f}")


def test_ac06_stitching_hand_case(criterion):
    ys = [[0.0, 1.0], [2.0, 3.0]]
    system = build_linear_system(ys)
    independent = np.linalg.solve(system.matrix, system.rhs)
    np.testing.assert_allclose(independent, [1, 0, 3, -5], atol=1e-12)
    res = stitch(ys, "linear")
    np.testing.assert_allclose(res.coeffs.as_array()[:, 0, :].ravel(), [1, 0, 3, -5], atol=1e-9)
    np.testing.assert_allclose(res.stitched.frames.ravel(), [0, 1, 1, 4], atol=1e-9)
    assert abs(res.sigma2[0] - 2.0) <= 1e-9
    assert res.junction_residuals.max() <= 1e-9
    criterion.update(coeffs=res.coeffs.as_array()[:, 0, :].ravel().round(12).tolist())


def test_ac07_constraint_satisfaction(criterion):
    rng = np.random.default_rng(77)
    builders = {"linear": build_linear_system, "quadratic": build_quadratic_system}
    t0 = time.perf_counter()
    done = {"linear": 0, "quadratic": 0}
    worst = 0.0
    while min(done.values()) < 200:
        model = min(done, key=done.get)
        R = int(rng.integers(1, 7))
        ys = [rng.uniform(-3, 3, size=int(rng.integers(2 if model == "linear" else 3, 13))) for _ in range(R)]
        res = stitch(ys, model)
        if not res.ok:
            continue
        done[model] += 1
        tol = 1e-8 * (1 + max(np.abs(y).max() for y in ys))
        assert res.junction_residuals.max(initial=0.0) <= tol
        if model == "quadratic":
            assert res.slope_residuals.max(initial=0.0) <= tol
        system = builders[model](ys)
        x = solve_dense(system)
        assert system.residual(x) <= 1e-9 * (1 + np.abs(system.rhs).max())
        worst = max(worst, res.junction_residuals.max(initial=0.0) / tol)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    criterion.update(instances=sum(done.values()), worst_frac_of_tol=f"{worst:.1e}", seconds=f"{elapsed:.2f}")


def test_ac08_identity_recovery(criterion):
    rng = np.random.default_rng(88)
    worst = 0.0
    for case in range(50):
        R = int(rng.integers(1, 6))
        ys, last = [], float(rng.uniform(-2, 2))
        for _ in range(R):
            y = rng.uniform(-2, 2, size=int(rng.integers(4, 12)))
            y = y - y[0] + last  # continuous: starts where the previous syllable ended
            ys.append(y)
            last = float(y[-1])
        scale = max(np.abs(y).max() for y in ys)
        for model, ident in (("linear", (1.0, 0.0)), ("quadratic", (0.0, 1.0, 0.0))):
            res = stitch(ys, model)
            assert res.ok
            dev = np.abs(res.coeffs.as_array()[:, 0, :] - ident).max()
            worst = max(worst, dev)
            assert dev <= 1e-9
            assert res.sigma2[0] <= 1e-16 * scale ** 2
    criterion.update(cases=50, max_coeff_dev=f"{worst:.1e}")


def test_ac09_zero_noise_recognition(criterion):
    t0 = time.perf_counter()
    report = compare_strategies(SynthConfig(seed=909, syllable_count=15, parameter_dim=2), 50)
    rows = [r["strategies"]["full"] for r in report.instances]
    assert all(row["accuracy"] == 1.0 for row in rows)
    assert all(row["cost"] == 0.0 for row in rows)
    assert all(row["labels"] == r["truth"] for row, r in zip(rows, report.instances))
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    criterion.update(instances=50, seconds=f"{elapsed:.2f}")


def test_ac10_qualitative_reports(criterion, capsys, tmp_path):
    out = tmp_path / "cmp.json"
    argv = ["compare", "--seed", "10", "--instances", "100", "--syllables", "20", "--dim", "2", "--noise", "0.3", "--out", str(out)]
    assert run_command(argv) == 0
    text = capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert "bfs vs dfs" in text and "linear" in text and "quadratic" in text
    b = doc["bfs_vs_dfs"]
    q, lin = doc["models"]["quadratic"], doc["models"]["linear"]
    criterion.update(
        mean_d_bfs=f"{b['mean_cost_bfs']:.3f}",
        mean_d_dfs=f"{b['mean_cost_dfs']:.3f}",
        sigma2_lin=f"{lin['mean_sigma2']:.3g}",
        sigma2_quad=f"{q['mean_sigma2']:.3g}",
    )
