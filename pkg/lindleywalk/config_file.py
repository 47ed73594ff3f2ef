import json
import logging
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from lindleywalk.core.common import ConfigError, DistributionKind, ExperimentId, InvalidDistributionError, \
    MarginalKind, PROBABILITY_SUM_TOLERANCE, SCHEMA_VERSION
from lindleywalk.core.distributions import BivariateGaussian, FiniteSupport1D, FiniteSupport2D, Gaussian1D, \
    IncrementDistribution, Marginal1D, PowerNegativeTail, ProductOfMarginals
from lindleywalk.core.experiment_data import COMMON_PARAMETERS, LawRequirement, all_parameter_names, \
    get_experiment_data
from lindleywalk.core.survival import geometric_grid

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"schema_version", "experiment", "name", "distribution", "marginal", "parameters"}


class ExperimentConfig:
    """A resolved experiment config: the law documents as given, the built laws and the full parameter set."""

    def __init__(self, experiment_id: ExperimentId, name: Optional[str], distribution_data: Optional[Dict],
                 marginal_data: Optional[Dict], parameters: Dict[str, Any]):
        self.experiment_id = experiment_id
        self.name = name
        self.distribution_data = distribution_data
        self.marginal_data = marginal_data
        self.parameters = parameters
        self.distribution: Optional[IncrementDistribution] = None
        self.marginal: Optional[Marginal1D] = None
        if distribution_data is not None:
            self.distribution = DistributionJson.deserialize(distribution_data, "distribution")
        if marginal_data is not None:
            self.marginal = MarginalJson.deserialize(marginal_data, "marginal")

    @property
    def seed(self) -> int:
        return self.parameters["seed"]

    # The 1-D law of a marginal experiment: the marginal itself, or one coordinate of the distribution
    def law_marginal(self) -> Marginal1D:
        if self.marginal is not None:
            return self.marginal
        if self.distribution is None:
            raise ConfigError("needs a marginal or a distribution", "marginal")
        coordinate = self.parameters.get("coordinate", 1)
        if coordinate not in (1, 2):
            raise ConfigError("coordinate must be 1 or 2, got " + str(coordinate), "parameters.coordinate")
        return self.distribution.marginal(coordinate - 1)

    def law_distribution(self) -> IncrementDistribution:
        if self.distribution is None:
            raise ConfigError("this experiment needs a 2-D distribution", "distribution")
        return self.distribution


def load_experiment_config_from_json_file(config_file_path: str, experiment_id: ExperimentId,
                                          seed_override: Optional[int] = None) -> ExperimentConfig:
    with open(config_file_path) as config_file:
        text = config_file.read()
    return load_experiment_config_from_json_text(text, experiment_id, seed_override)


def load_experiment_config_from_json_text(text: str, experiment_id: ExperimentId,
                                          seed_override: Optional[int] = None) -> ExperimentConfig:
    try:
        json_data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, line=e.lineno, column=e.colno)
    config = ExperimentConfigJson.deserialize(json_data, experiment_id)
    if seed_override is not None:
        if not 0 <= seed_override < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer, got " + str(seed_override), "--seed")
        config.parameters["seed"] = seed_override
    return config


def save_experiment_config_to_json_file(config: ExperimentConfig, config_file_path: str):
    json_data = ExperimentConfigJson.serialize(config)
    with open(config_file_path, 'w') as config_file:
        config_file.write(json.dumps(json_data, indent=2))


def _require(data: Dict, key: str, path: str):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", path)
    if key not in data:
        raise ConfigError("missing field '" + key + "'", path)
    return data[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number, got " + json.dumps(value), path)
    if not math.isfinite(value):
        raise ConfigError("expected a finite number, got " + str(value), path)
    return float(value)


def _probability(value, path: str):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError("malformed decimal probability '" + value + "'", path)
    return _number(value, path)


def _check_probability_sum(probabilities: List, path: str):
    for i, p in enumerate(probabilities):
        if not 0 < p <= 1:
            raise ConfigError("probability " + str(p) + " is outside (0, 1]", path + "[" + str(i) + "]")
    if all(isinstance(p, Fraction) for p in probabilities):
        total = sum(probabilities, Fraction(0))
        if total != 1:
            raise ConfigError("probabilities sum to " + str(total) + ", not 1", path)
    else:
        total = math.fsum(float(p) for p in probabilities)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ConfigError("probabilities sum to " + repr(total) + ", not 1", path)


def _kind(data, path: str, enum_type):
    kind_name = _require(data, "kind", path)
    if not isinstance(kind_name, str) or kind_name not in enum_type.__members__:
        raise ConfigError("unknown kind " + json.dumps(kind_name) + ". Known kinds: "
                          + str(list(enum_type.__members__.keys())), path + ".kind")
    return enum_type[kind_name]


def _check_keys(data: Dict, allowed: set, path: str):
    for key in data.keys():
        if key not in allowed:
            raise ConfigError("unknown field '" + key + "'", path)


class MarginalJson:
    @staticmethod
    def deserialize(data, path: str) -> Marginal1D:
        kind = _kind(data, path, MarginalKind)
        try:
            if kind == MarginalKind.FINITE_SUPPORT_1D:
                _check_keys(data, {"kind", "atoms"}, path)
                atoms_data = _require(data, "atoms", path)
                atoms_path = path + ".atoms"
                if not isinstance(atoms_data, list) or not atoms_data:
                    raise ConfigError("expected a non-empty list of [v, p] pairs", atoms_path)
                values, probabilities = [], []
                for i, atom in enumerate(atoms_data):
                    atom_path = atoms_path + "[" + str(i) + "]"
                    if not isinstance(atom, list) or len(atom) != 2:
                        raise ConfigError("expected a [v, p] pair", atom_path)
                    values.append(_number(atom[0], atom_path + "[0]"))
                    probabilities.append(_probability(atom[1], atom_path + "[1]"))
                _check_probability_sum(probabilities, atoms_path)
                return FiniteSupport1D([(v, float(p)) for v, p in zip(values, probabilities)])
            if kind == MarginalKind.GAUSSIAN:
                _check_keys(data, {"kind", "mean", "variance"}, path)
                return Gaussian1D(_number(_require(data, "mean", path), path + ".mean"),
                                  _number(_require(data, "variance", path), path + ".variance"))
            if kind == MarginalKind.POWER_NEGATIVE_TAIL:
                _check_keys(data, {"kind", "beta", "shift", "negative_mass"}, path)
                return PowerNegativeTail(_number(_require(data, "beta", path), path + ".beta"),
                                         _number(data.get("shift", 0.0), path + ".shift"),
                                         float(_probability(data.get("negative_mass", 0.5), path + ".negative_mass")))
        except InvalidDistributionError as e:
            raise ConfigError(str(e), path)
        raise Exception("Unhandled marginal kind: " + str(kind))

    @staticmethod
    def serialize(marginal: Marginal1D):
        if isinstance(marginal, FiniteSupport1D):
            return {"kind": marginal.kind.name, "atoms": [[v, p] for v, p in marginal.atoms()]}
        if isinstance(marginal, Gaussian1D):
            return {"kind": marginal.kind.name, "mean": marginal.mean(), "variance": marginal.variance()}
        if isinstance(marginal, PowerNegativeTail):
            return {"kind": marginal.kind.name, "beta": marginal.beta, "shift": marginal.shift,
                    "negative_mass": marginal.negative_mass}
        raise Exception("Unhandled marginal: " + str(marginal))


class DistributionJson:
    @staticmethod
    def deserialize(data, path: str) -> IncrementDistribution:
        kind = _kind(data, path, DistributionKind)
        try:
            if kind == DistributionKind.FINITE_SUPPORT_2D:
                _check_keys(data, {"kind", "atoms"}, path)
                atoms_data = _require(data, "atoms", path)
                atoms_path = path + ".atoms"
                if not isinstance(atoms_data, list) or not atoms_data:
                    raise ConfigError("expected a non-empty list of [[v1, v2], p] pairs", atoms_path)
                values, probabilities = [], []
                for i, atom in enumerate(atoms_data):
                    atom_path = atoms_path + "[" + str(i) + "]"
                    if not isinstance(atom, list) or len(atom) != 2 or not isinstance(atom[0], list) \
                            or len(atom[0]) != 2:
                        raise ConfigError("expected a [[v1, v2], p] pair", atom_path)
                    values.append((_number(atom[0][0], atom_path + "[0][0]"),
                                   _number(atom[0][1], atom_path + "[0][1]")))
                    probabilities.append(_probability(atom[1], atom_path + "[1]"))
                _check_probability_sum(probabilities, atoms_path)
                return FiniteSupport2D([(v, float(p)) for v, p in zip(values, probabilities)])
            if kind == DistributionKind.BIVARIATE_GAUSSIAN:
                _check_keys(data, {"kind", "mean", "covariance"}, path)
                mean_data = _require(data, "mean", path)
                if not isinstance(mean_data, list) or len(mean_data) != 2:
                    raise ConfigError("expected [m1, m2]", path + ".mean")
                mean = (_number(mean_data[0], path + ".mean[0]"), _number(mean_data[1], path + ".mean[1]"))
                covariance_data = _require(data, "covariance", path)
                if not isinstance(covariance_data, list) or len(covariance_data) != 2 \
                        or any(not isinstance(row, list) or len(row) != 2 for row in covariance_data):
                    raise ConfigError("expected a 2x2 matrix [[c11, c12], [c21, c22]]", path + ".covariance")
                covariance = [[_number(covariance_data[i][j], path + ".covariance[" + str(i) + "][" + str(j) + "]")
                               for j in range(2)] for i in range(2)]
                return BivariateGaussian(mean, covariance)
            if kind == DistributionKind.PRODUCT:
                _check_keys(data, {"kind", "first", "second"}, path)
                return ProductOfMarginals(MarginalJson.deserialize(_require(data, "first", path), path + ".first"),
                                          MarginalJson.deserialize(_require(data, "second", path), path + ".second"))
        except InvalidDistributionError as e:
            raise ConfigError(str(e), path)
        raise Exception("Unhandled distribution kind: " + str(kind))

    @staticmethod
    def serialize(dist: IncrementDistribution):
        if isinstance(dist, FiniteSupport2D):
            return {"kind": dist.kind.name, "atoms": [[list(v), p] for v, p in dist.atoms()]}
        if isinstance(dist, BivariateGaussian):
            return {"kind": dist.kind.name, "mean": list(dist.mean()), "covariance": dist.covariance().tolist()}
        if isinstance(dist, ProductOfMarginals):
            return {"kind": dist.kind.name, "first": MarginalJson.serialize(dist.marginal(0)),
                    "second": MarginalJson.serialize(dist.marginal(1))}
        raise Exception("Unhandled distribution: " + str(dist))


def _check_parameter_type(value, default, path: str):
    if default is None or value is None:
        return
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError("expected true or false, got " + json.dumps(value), path)
    elif isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("expected an integer, got " + json.dumps(value), path)
    elif isinstance(default, float):
        _number(value, path)
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError("expected a string, got " + json.dumps(value), path)


class ParametersJson:
    @staticmethod
    def deserialize(data, experiment_id: ExperimentId) -> Dict[str, Any]:
        if not isinstance(data, dict):
            raise ConfigError("expected an object", "parameters")
        defaults = dict(COMMON_PARAMETERS)
        defaults.update(get_experiment_data(experiment_id).default_parameters)
        known = all_parameter_names()
        resolved = dict(defaults)
        for key, value in data.items():
            if key not in known:
                raise ConfigError("unknown parameter '" + key + "'", "parameters." + key)
            if key not in defaults:
                logger.debug("ignoring parameter %s, it belongs to another experiment", key)
                continue
            _check_parameter_type(value, defaults[key], "parameters." + key)
            resolved[key] = value
        seed = resolved["seed"]
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer, got " + str(seed), "parameters.seed")
        return resolved


class ExperimentConfigJson:
    @staticmethod
    def serialize(config: ExperimentConfig):
        data = {"schema_version": SCHEMA_VERSION, "experiment": config.experiment_id.name.lower()}
        if config.name is not None:
            data["name"] = config.name
        if config.distribution_data is not None:
            data["distribution"] = config.distribution_data
        if config.marginal_data is not None:
            data["marginal"] = config.marginal_data
        data["parameters"] = config.parameters
        return data

    @staticmethod
    def deserialize(data, experiment_id: ExperimentId) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("expected a JSON object at the top level", "config")
        _check_keys(data, TOP_LEVEL_KEYS, "config")
        version = _require(data, "schema_version", "config")
        if version != SCHEMA_VERSION:
            raise ConfigError("unsupported schema version " + json.dumps(version) + ", expected "
                              + str(SCHEMA_VERSION), "schema_version")
        named_experiment = data.get("experiment")
        if named_experiment is not None:
            if not isinstance(named_experiment, str) or named_experiment.upper() not in ExperimentId.__members__:
                raise ConfigError("unknown experiment " + json.dumps(named_experiment) + ". Known experiments: "
                                  + str([e.name.lower() for e in ExperimentId]), "experiment")
            if named_experiment != experiment_id.name.lower():
                logger.info("config written for %s, running %s", named_experiment, experiment_id.name.lower())
        name = data.get("name")
        if name is not None and not isinstance(name, str):
            raise ConfigError("expected a string", "name")
        distribution_data = data.get("distribution")
        marginal_data = data.get("marginal")
        if (distribution_data is None) == (marginal_data is None):
            raise ConfigError("exactly one of 'distribution' and 'marginal' is required", "config")
        _check_law_requirement(experiment_id, distribution_data, marginal_data)
        parameters = ParametersJson.deserialize(data.get("parameters", {}), experiment_id)
        return ExperimentConfig(experiment_id, name, distribution_data, marginal_data, parameters)


def _check_law_requirement(experiment_id: ExperimentId, distribution_data, marginal_data):
    requirement = get_experiment_data(experiment_id).law_requirement
    if requirement == LawRequirement.DISTRIBUTION and distribution_data is None:
        raise ConfigError("experiment '" + experiment_id.name.lower() + "' needs a 2-D distribution", "distribution")
    if requirement == LawRequirement.MARGINAL and marginal_data is None:
        raise ConfigError("experiment '" + experiment_id.name.lower() + "' needs a marginal", "marginal")


# n grids are written either as an explicit list or as {"geometric": {"min": .., "max": .., "per_decade": ..}}
def expand_n_grid(value, path: str = "parameters.n_grid") -> List[int]:
    if isinstance(value, list):
        if not value or any(isinstance(n, bool) or not isinstance(n, int) for n in value):
            raise ConfigError("expected a non-empty list of integers", path)
        return list(value)
    if isinstance(value, dict) and "geometric" in value:
        geometric = value["geometric"]
        _check_keys(geometric, {"min", "max", "per_decade"}, path + ".geometric")
        n_min = _require(geometric, "min", path + ".geometric")
        n_max = _require(geometric, "max", path + ".geometric")
        per_decade = geometric.get("per_decade", 10)
        if not (isinstance(n_min, int) and isinstance(n_max, int) and 1 <= n_min < n_max):
            raise ConfigError("expected integers 1 <= min < max", path + ".geometric")
        return geometric_grid(n_min, n_max, per_decade)
    raise ConfigError("expected a list of integers or a {\"geometric\": ...} object", path)


def point_parameter(parameters: Dict[str, Any], key: str) -> Tuple[float, float]:
    value = parameters[key]
    path = "parameters." + key
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected a point [x1, x2]", path)
    return _number(value[0], path + "[0]"), _number(value[1], path + "[1]")


def points_parameter(parameters: Dict[str, Any], key: str) -> List[Tuple[float, float]]:
    value = parameters[key]
    path = "parameters." + key
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of points", path)
    points = []
    for i, p in enumerate(value):
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigError("expected a point [x1, x2]", path + "[" + str(i) + "]")
        points.append((_number(p[0], path + "[" + str(i) + "][0]"), _number(p[1], path + "[" + str(i) + "][1]")))
    return points


def interval_parameter(parameters: Dict[str, Any], key: str) -> Optional[Tuple[float, float]]:
    value = parameters[key]
    if value is None:
        return None
    path = "parameters." + key
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected an interval [low, high]", path)
    low, high = _number(value[0], path + "[0]"), _number(value[1], path + "[1]")
    if low > high:
        raise ConfigError("interval is empty", path)
    return low, high


def numbers_parameter(parameters: Dict[str, Any], key: str) -> List[float]:
    value = parameters[key]
    path = "parameters." + key
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of numbers", path)
    return [_number(v, path + "[" + str(i) + "]") for i, v in enumerate(value)]
