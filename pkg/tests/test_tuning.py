import numpy as np
import pytest

from liquidcard.fitting import FitContext
from liquidcard.scorecard import CharacteristicSpec, ModelSpec
from liquidcard.synth import SynthConfig, generate
from liquidcard.tuning import TuneReport, default_lambda2_grid, greedy_tune, marginal_contributions
from tests.conftest import three_char_spec


@pytest.fixture(scope="module")
def split():
    config = SynthConfig.from_dict(
        {
            "seed": 21,
            "n_rows": 20000,
            "noise_sd": 0.6,
            "characteristics": [
                {"name": "a", "range": [0, 1000], "curve": {"type": "pwl", "points": [[0, -0.9], [400, 0.1], [1000, 0.8]]}},
                {"name": "b", "range": [-200, 300], "curve": {"type": "pwl", "points": [[-200, 0.5], [50, 0.0], [300, -0.6]]}},
                {"name": "c", "range": [0, 10], "curve": {"type": "pwl", "points": [[0, 0.0], [10, 0.0]]}},
            ],
        }
    )
    data, _ = generate(config)
    return data.split(0.3, seed=9)


class TestDefaultGrid:
    def test_contains_case_study_values(self):
        grid = default_lambda2_grid()
        assert grid[0] == 0.0
        for value in (1.0, 10.0, 10**2.5, 100.0, 10**3.5, 1e5, 1e7, 10**7.5, 1e10):
            assert any(abs(g - value) <= 1e-9 * value for g in grid)
        assert len(grid) == 22


class TestMarginalContributions:
    def test_noise_characteristic_contributes_nothing(self, split):
        dev, val = split
        contributions = dict(marginal_contributions(three_char_spec(), dev, val))
        assert abs(contributions["c"]) < 0.02
        assert contributions["a"] > 0.05
        assert contributions["b"] > 0.05

    def test_sorted_descending(self, split):
        dev, val = split
        ordering = marginal_contributions(three_char_spec(), dev, val)
        values = [c for _, c in ordering]
        assert values == sorted(values, reverse=True)

    def test_single_characteristic_equals_full_divergence(self, split):
        dev, val = split
        spec = ModelSpec(
            characteristics=(
                CharacteristicSpec(name="a", column="a", liquid_knots=tuple(np.linspace(0, 1000, 8))),
            ),
            ridge_lambda=0.1,
        )
        ordering = marginal_contributions(spec, dev, val)
        fitted, _ = FitContext.build(spec, dev, val).fit(lambda2={"a": 0.0})
        assert ordering == [("a", pytest.approx(fitted.val_divergence, rel=1e-12))]

    def test_duplicated_characteristic_contributes_nothing(self, split):
        dev, val = split
        chars = (
            CharacteristicSpec(name="a", column="a", liquid_knots=tuple(np.linspace(0, 1000, 8))),
            CharacteristicSpec(name="a_twin", column="a", liquid_knots=tuple(np.linspace(0, 1000, 8))),
        )
        spec = ModelSpec(characteristics=chars, ridge_lambda=0.1)
        contributions = dict(marginal_contributions(spec, dev, val))
        assert abs(contributions["a_twin"]) < 0.02


class TestGreedyTune:
    def test_report_structure_and_freeze_discipline(self, split):
        dev, val = split
        report = greedy_tune(three_char_spec(), dev, val)
        assert report.chosen_lambda2["c"] is None
        tuned = [s.characteristic for s in report.trace]
        assert set(tuned) == {"a", "b"}
        # ordering respected within the trace
        order = [n for n, _ in report.ordering if n in tuned]
        assert tuned == order
        for step in report.trace:
            assert len(step.grid) == 22
            best = max(v for _, v in step.grid)
            chosen_rows = [v for g, v in step.grid if g == step.chosen]
            assert chosen_rows[0] == best
            # ties break to the larger value
            for g, v in step.grid:
                if v == best:
                    assert g <= step.chosen

    def test_final_equals_last_step_max(self, split):
        dev, val = split
        report = greedy_tune(three_char_spec(), dev, val)
        last = report.trace[-1]
        assert report.final_val_divergence == max(v for _, v in last.grid)

    def test_deterministic(self, split):
        dev, val = split
        a = greedy_tune(three_char_spec(), dev, val)
        b = greedy_tune(three_char_spec(), dev, val)
        assert a == b

    def test_replay_reproduces_final_divergence(self, split):
        dev, val = split
        spec = three_char_spec()
        report = greedy_tune(spec, dev, val)
        replay_map = {k: v for k, v in report.chosen_lambda2.items() if v is not None}
        fitted, _ = FitContext.build(spec, dev, val).fit(lambda2=replay_map)
        assert fitted.val_divergence == pytest.approx(report.final_val_divergence, abs=1e-9)

    def test_each_step_value_reproducible(self, split):
        dev, val = split
        spec = three_char_spec()
        report = greedy_tune(spec, dev, val)
        ctx = FitContext.build(spec, dev, val)
        frozen: dict[str, float] = {n: 0.0 for n in spec.names if spec[n].liquid_knots is not None}
        for step in report.trace:
            for lam2, recorded in step.grid:
                if lam2 in (0.0, step.chosen):
                    fitted, _ = ctx.fit(lambda2={**frozen, step.characteristic: lam2})
                    assert fitted.val_divergence == pytest.approx(recorded, abs=1e-9)
            frozen[step.characteristic] = step.chosen

    def test_two_point_grid(self, split):
        dev, val = split
        spec = ModelSpec(
            characteristics=(
                CharacteristicSpec(
                    name="a", column="a", liquid_knots=tuple(np.linspace(0, 1000, 8)), pattern="ascending"
                ),
            ),
            ridge_lambda=0.1,
        )
        report = greedy_tune(spec, dev, val, grid=(0.0, 1e10))
        step = report.trace[0]
        assert len(step.grid) == 2
        assert report.final_val_divergence == max(v for _, v in step.grid)
        assert step.chosen in (0.0, 1e10)

    def test_grid_validation(self, split):
        dev, val = split
        spec = three_char_spec()
        with pytest.raises(ValueError):
            greedy_tune(spec, dev, val, grid=())
        with pytest.raises(ValueError):
            greedy_tune(spec, dev, val, grid=(1.0, 10.0))
        with pytest.raises(ValueError):
            greedy_tune(spec, dev, val, grid=(0.0, -1.0))

    def test_report_round_trip(self, split):
        dev, val = split
        report = greedy_tune(three_char_spec(), dev, val, grid=(0.0, 100.0))
        doc = report.to_dict()
        assert doc["schema_version"] == 1
        assert TuneReport.from_dict(doc) == report
