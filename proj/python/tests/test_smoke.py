import numpy as np
import pytest

import svarma

MODEL = {
    "n": 2,
    "p": 1,
    "q": 1,
    "densities": [{"family": "laplace"}, {"family": "laplace"}],
    "theta": {
        "pi2": [0.5, 0.2, 0.1, 0.3],
        "pi3": [0.3, 0.1, 0.0, 0.2],
        "B": [[1.0, 0.3], [-0.2, 1.0]],
        "sigma": [1.0, 0.5],
    },
}


def test_simulate_is_seeded():
    a = svarma.simulate(MODEL, 200, seed=4)
    b = svarma.simulate(MODEL, 200, seed=4)
    c = svarma.simulate(MODEL, 200, seed=5)
    assert a.shape == (200, 2)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_validate_reports_violations():
    assert svarma.validate(MODEL) == []
    bad = {**MODEL, "theta": {**MODEL["theta"], "sigma": [1.0, -0.5]}}
    assert "sigma_nonpositive" in [code for code, _ in svarma.validate(bad)]


def test_score_matches_finite_differences_of_loglik():
    spec = {"n": 1, "p": 1, "q": 0, "densities": [{"family": "student_t", "lambda": [6.0]}]}
    model = {**spec, "theta": {"pi2": [0.4], "sigma": [1.2]}}
    y = svarma.simulate(model, 300, seed=1)
    g = svarma.score(model, y)
    h = 1e-6
    up = {**spec, "theta": {"pi2": [0.4 + h], "sigma": [1.2]}}
    dn = {**spec, "theta": {"pi2": [0.4 - h], "sigma": [1.2]}}
    fd = (svarma.loglik(up, y) - svarma.loglik(dn, y)) / (2 * h)
    assert g[0] == pytest.approx(fd, rel=1e-5)


def test_fit_irf_and_diagnostics():
    y = svarma.simulate(MODEL, 1500, seed=11)
    est = svarma.fit(y, {k: MODEL[k] for k in ("n", "p", "q", "densities")})
    assert est["converged"]
    assert est["B"].shape == (2, 2)
    assert np.allclose(np.diag(est["B"]), 1.0)
    assert np.all(est["se_opg"] > 0)

    fitted = svarma.model_from_estimate(est)
    out = svarma.irf(fitted, horizon=8, shock_size="unit")
    assert out["phi"].shape == (9, 2, 2)
    assert np.array_equal(out["phi"][0], est["B"])
    assert np.allclose(out["fevd"].sum(axis=2), 1.0)

    _, z = svarma.structural_shocks(fitted, y)
    diag = svarma.diagnostics(z, lags=5)
    assert [c["name"] for c in diag["components"]] == ["shock1", "shock2"]


def test_bootstrap_bands_are_deterministic():
    y = svarma.simulate(MODEL, 400, seed=2)
    est = svarma.fit(y, {k: MODEL[k] for k in ("n", "p", "q", "densities")})
    fitted = svarma.model_from_estimate(est)
    a = svarma.irf(fitted, horizon=4, bootstrap=5, y=y, seed=9)
    b = svarma.irf(fitted, horizon=4, bootstrap=5, y=y, seed=9)
    assert np.array_equal(a["bands"]["lower"], b["bands"]["lower"])
    assert np.all(a["bands"]["lower"] <= a["bands"]["upper"])


def test_select_order_table():
    y = svarma.simulate(MODEL, 600, seed=3)
    sel = svarma.select_order(y, {"n": 2, "densities": MODEL["densities"]}, p_max=1, q_max=1)
    assert len(sel["table"]) == 4
    assert (sel["p"], sel["q"]) in {(r["p"], r["q"]) for r in sel["table"]}


def test_normalize_scheme_c_orders_columns():
    B, sigma, perm, d = svarma.normalize([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0], "C")
    assert np.array_equal(B, np.eye(2))
    assert list(sigma) == [3.0, 2.0]
    assert perm == [1, 0]


def test_errors_carry_their_kind():
    with pytest.raises(svarma.SvarmaError) as info:
        svarma.fit(np.ones((50, 2)), {k: MODEL[k] for k in ("n", "p", "q", "densities")})
    assert info.value.kind == "rank_deficient"
    with pytest.raises(svarma.SvarmaError) as info:
        svarma.simulate({"n": 2}, 10)
    assert info.value.kind == "parse"
