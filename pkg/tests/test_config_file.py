import json
import os

import pytest

from lindleywalk.config_file import expand_n_grid, interval_parameter, load_experiment_config_from_json_file, \
    load_experiment_config_from_json_text, point_parameter, save_experiment_config_to_json_file
from lindleywalk.core.common import ConfigError, ExperimentId
from lindleywalk.core.distributions import FiniteSupport1D, ProductOfMarginals


CONFIGS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "resources", "configs")
PLUS_MINUS_ONE = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, "0.5"], [-1, "0.5"]]}


def _classify_config(**overrides):
    data = {
        "schema_version": 1,
        "experiment": "classify",
        "distribution": {"kind": "PRODUCT", "first": PLUS_MINUS_ONE, "second": PLUS_MINUS_ONE},
        "parameters": {"seed": 5}
    }
    data.update(overrides)
    return data


def _load(data, experiment_id=ExperimentId.CLASSIFY, seed_override=None):
    return load_experiment_config_from_json_text(json.dumps(data), experiment_id, seed_override)


def _error(data, experiment_id=ExperimentId.CLASSIFY, seed_override=None) -> ConfigError:
    with pytest.raises(ConfigError) as error:
        _load(data, experiment_id, seed_override)
    return error.value


class TestLoading:
    def test_defaults_are_filled_in(self):
        config = _load(_classify_config())
        assert config.seed == 5
        assert config.parameters["expected_verdict"] is None
        assert isinstance(config.distribution, ProductOfMarginals)
        assert config.marginal is None

    def test_fraction_probabilities(self):
        marginal = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, "2/3"], [-2, "1/3"]]}
        config = _load({"schema_version": 1, "marginal": marginal, "parameters": {}}, ExperimentId.LYAPUNOV)
        assert isinstance(config.marginal, FiniteSupport1D)
        assert config.law_marginal().mean() == pytest.approx(0, abs=1e-15)

    def test_malformed_json_reports_the_line(self):
        with pytest.raises(ConfigError) as error:
            load_experiment_config_from_json_text('{\n  "schema_version": 1,\n  oops\n}', ExperimentId.CLASSIFY)
        assert error.value.line == 3
        assert "line 3" in str(error.value)

    def test_probabilities_must_sum_to_one(self):
        first = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, 0.5], [-1, 0.4]]}
        error = _error(_classify_config(distribution={"kind": "PRODUCT", "first": first, "second": PLUS_MINUS_ONE}))
        assert error.field_path == "distribution.first.atoms"

    def test_negative_probability_names_the_atom(self):
        atoms = [[[1, 1], 1.5], [[-1, -1], -0.5]]
        error = _error(_classify_config(distribution={"kind": "FINITE_SUPPORT_2D", "atoms": atoms}))
        assert error.field_path == "distribution.atoms[0]"

    def test_unknown_kind(self):
        error = _error(_classify_config(distribution={"kind": "CAUCHY"}))
        assert error.field_path == "distribution.kind"

    def test_unknown_parameter(self):
        error = _error(_classify_config(parameters={"bogus": 1}))
        assert error.field_path == "parameters.bogus"

    def test_parameter_of_another_experiment_is_ignored(self):
        config = _load(_classify_config(parameters={"trials": 10}))
        assert "trials" not in config.parameters

    def test_parameter_type(self):
        error = _error(_classify_config(parameters={"seed": "five"}))
        assert error.field_path == "parameters.seed"

    def test_seed_override(self):
        assert _load(_classify_config(), seed_override=99).seed == 99
        error = _error(_classify_config(), seed_override=-1)
        assert error.field_path == "--seed"

    def test_seed_range(self):
        error = _error(_classify_config(parameters={"seed": 2 ** 64}))
        assert error.field_path == "parameters.seed"

    def test_schema_version(self):
        error = _error(_classify_config(schema_version=2))
        assert error.field_path == "schema_version"

    def test_unknown_experiment_name(self):
        error = _error(_classify_config(experiment="bogus"))
        assert error.field_path == "experiment"

    def test_experiment_field_does_not_pick_the_experiment(self):
        config = _load(_classify_config(experiment="tail"))
        assert config.experiment_id == ExperimentId.CLASSIFY

    def test_exactly_one_law(self):
        both = _classify_config(marginal=PLUS_MINUS_ONE)
        assert _error(both).field_path == "config"
        neither = _classify_config()
        del neither["distribution"]
        assert _error(neither).field_path == "config"

    def test_experiment_needs_its_kind_of_law(self):
        data = {"schema_version": 1, "marginal": PLUS_MINUS_ONE, "parameters": {}}
        assert _error(data, ExperimentId.CLASSIFY).field_path == "distribution"

    def test_invalid_law_is_a_config_error(self):
        gaussian = {"kind": "BIVARIATE_GAUSSIAN", "mean": [0, 0], "covariance": [[1, 2], [2, 1]]}
        assert _error(_classify_config(distribution=gaussian)).field_path == "distribution"


class TestParameterHelpers:
    def test_explicit_grid(self):
        assert expand_n_grid([1, 10, 100]) == [1, 10, 100]

    def test_geometric_grid(self):
        grid = expand_n_grid({"geometric": {"min": 1, "max": 1000, "per_decade": 5}})
        assert grid[0] == 1 and grid[-1] == 1000

    def test_bad_grid(self):
        with pytest.raises(ConfigError):
            expand_n_grid({"geometric": {"min": 10, "max": 1}})
        with pytest.raises(ConfigError):
            expand_n_grid("1..100")

    def test_point_and_interval(self):
        assert point_parameter({"start": [1, 2]}, "start") == (1.0, 2.0)
        assert interval_parameter({"window": None}, "window") is None
        with pytest.raises(ConfigError):
            interval_parameter({"window": [5, 1]}, "window")


def test_saved_config_loads_back(tmp_path):
    config = _load(_classify_config(name="independent walks", parameters={"seed": 8, "delta": 0.2}))
    file_path = str(tmp_path / "config.json")
    save_experiment_config_to_json_file(config, file_path)
    loaded = load_experiment_config_from_json_file(file_path, ExperimentId.CLASSIFY)
    assert loaded.parameters == config.parameters
    assert loaded.name == "independent walks"
    assert loaded.distribution_data == config.distribution_data


@pytest.mark.parametrize("file_name", sorted(os.listdir(CONFIGS_DIR)))
def test_shipped_configs_load(file_name):
    file_path = os.path.join(CONFIGS_DIR, file_name)
    with open(file_path) as config_file:
        experiment_name = json.load(config_file)["experiment"]
    config = load_experiment_config_from_json_file(file_path, ExperimentId[experiment_name.upper()])
    assert config.distribution is not None or config.marginal is not None
