import numpy as np
import pytest

from weightsfem.errors import ConfigError, SolverNotConverged
from weightsfem.experiments import (
    ExperimentConfig,
    Table,
    cmd_conditioning_table,
    cmd_convergence,
    cmd_eigencurves,
    cmd_graded,
    cmd_nonconstant,
    cmd_robustness,
    cmd_xi_sweep,
    observed_rates,
    xi_grid,
)


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.xi_values == (0.29,)
    assert ExperimentConfig(degree=4).xi_values == (0.21,)
    assert cfg.element_counts[0] == 10 and cfg.element_counts[-1] == 1280
    assert ExperimentConfig(degree=4).element_counts == (2, 4, 8, 16, 32, 64, 128, 256)
    assert ExperimentConfig(xi=0.3).xi_values == (0.3,)


@pytest.mark.parametrize("kwargs", [
    {"degree": 0}, {"coeff": "x"}, {"mesh": "adaptive"}, {"theta": (1.0,)}, {"elements": (0, 4)},
    {"tol": 0.0}, {"maxit": 0}, {"xi": 0.6}, {"xi": 0.0}, {"degree": 5}, {"seeds": 0}, {"xi_range": (0.3, 0.1)},
])
def test_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_xi_grid_step():
    g = xi_grid(ExperimentConfig())
    assert g[0] == 0.05 and g[-1] == 0.45 and g.size == 81
    np.testing.assert_allclose(np.diff(g), 0.005)


def test_observed_rates():
    assert observed_rates([8.0, 1.0, 0.125]) == [None, 3.0, 3.0]


def test_table_csv(tmp_path):
    t = Table("demo", ["a", "b"], [[1, 0.5], [2, 0.25]], {"note": "x"})
    text = t.write_csv(tmp_path / "t.csv").read_text().splitlines()
    assert text[:3] == ["# experiment: demo", "# note: x", "a,b"]
    assert t.column("b") == [0.5, 0.25]
    assert "0.25" in t.to_text()


def test_eigencurves_separation(tmp_path):
    t28 = cmd_eigencurves(ExperimentConfig(xi=0.28, out=tmp_path / "e.csv"))
    assert t28.meta["gaps"][0] > 0
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert "theta,lambda_1,lambda_2,lambda_3" in lines
    t4 = [cmd_eigencurves(ExperimentConfig(degree=4, xi=x)) for x in (0.12, 0.22)]
    for t in t4:
        curves = np.array(t.rows)[:, 1:]
        assert curves.shape[1] == 4 and np.all(np.diff(curves, axis=1) >= -1e-12)


@pytest.mark.xfail(strict=True, reason="weak separation belongs to the r=4 figure; see decisions ledger")
def test_eigencurves_r3_gap_shrinks_literal():
    g28 = cmd_eigencurves(ExperimentConfig(xi=0.28)).meta["gaps"][0]
    g10 = cmd_eigencurves(ExperimentConfig(xi=0.10)).meta["gaps"][0]
    assert g10 < g28


def test_eigencurves_lagrangian():
    t = cmd_eigencurves(ExperimentConfig(lagrangian=True, degree=2))
    assert t.meta["points"] == (0.0, 0.5, 1.0)


def test_xi_sweep_determinant_optimum(tmp_path):
    t = cmd_xi_sweep(ExperimentConfig(out=tmp_path / "s.csv"))
    assert abs(t.meta["argmin_det_factor"] - (0.5 - 0.5 / np.sqrt(5))) <= 0.005
    assert min(t.column("kappa2_assembled")) < t.meta["lagrangian_kappa2"]
    ratio = np.array(t.column("kappa_symbol")) / np.array(t.column("kappa2_assembled"))
    assert np.all(np.abs(ratio / np.pi**2 - 1) < 0.01)
    with pytest.raises(ConfigError):
        cmd_xi_sweep(ExperimentConfig(degree=2))


def test_convergence_rates_and_agreement():
    t = cmd_convergence(ExperimentConfig(elements=(10, 20, 40, 80)))
    for col in ("rate_lagrangian", "rate_weights"):
        assert all(abs(v - 3) <= 0.1 for v in t.column(col)[1:])
    el, ew = np.array(t.column("error_lagrangian")), np.array(t.column("error_weights"))
    assert np.all(np.abs(el - ew) <= 0.01 * el)


def test_convergence_r4():
    t = cmd_convergence(ExperimentConfig(degree=4, elements=(2, 4, 8, 16, 32)))
    assert all(abs(v - 4) <= 0.1 for v in t.column("rate_weights")[2:])


def test_conditioning_table_small():
    t = cmd_conditioning_table(ExperimentConfig(elements=(10, 20, 40)))
    assert np.all(np.array(t.column("kappa2_weights")) < np.array(t.column("kappa2_lagrangian")))
    assert t.column("kappa1_lagrangian")[0] == pytest.approx(911.25, rel=1e-9)
    assert all(4 <= v <= 6 for v in t.column("iter_weights"))


def test_conditioning_table_r4_weights_optimum_reproduces_table():
    # the tabulated weights column matches xi = 0.12 in the 1-norm
    t = cmd_conditioning_table(ExperimentConfig(degree=4, xi=0.12, elements=(2, 4, 64)))
    np.testing.assert_allclose(t.column("kappa1_weights"), [90.6, 371.0, 9.50e4], rtol=0.01)


def test_nonconstant_with_comb():
    t = cmd_nonconstant(ExperimentConfig(elements=(10, 20, 40)), comb=True)
    assert all(10 <= v <= 16 for v in t.column("iter_weights"))
    assert t.column("glt_gap_weights")[-1] < 0.05
    assert t.meta["coefficient"] == "1+x^2"


def test_graded():
    t = cmd_graded(ExperimentConfig(elements=(10, 40, 160)))
    its, plain = np.array(t.column("iter_weights")), np.array(t.column("iter_weights_strang"))
    assert np.all(its <= plain)


def test_robustness_theta_zero_matches_uniform():
    cfg = ExperimentConfig(theta=(0.0,), elements=(10, 20, 40))
    rob = cmd_robustness(cfg)
    uni = cmd_conditioning_table(cfg)
    assert rob.column("iter_weights") == uni.column("iter_weights")
    assert rob.column("iter_lagrangian") == uni.column("iter_lagrangian")


def test_robustness_deterministic(tmp_path):
    cfg = ExperimentConfig(theta=(0.3,), seeds=2, elements=(10, 20))
    a, b = cmd_robustness(cfg), cmd_robustness(cfg)
    assert a.rows == b.rows
    assert len(a.rows) == 4


def test_solver_not_converged_surfaces():
    cfg = ExperimentConfig(elements=(40,), tol=1e-12, maxit=2)
    with pytest.raises(SolverNotConverged):
        cmd_conditioning_table(cfg)
