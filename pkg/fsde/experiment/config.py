import itertools
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Dict, Any, List, NamedTuple, Tuple, Optional

from fsde.process.fbm import SamplingMethod
from fsde.process.sde import ModelType
from fsde.result import EstimatorType
from fsde.utils.errors import ConfigError
from fsde.utils.io import read_config

SCHEMA_PATH = Path(__file__).parent.parent / 'configs' / 'schema.yaml'
SCHEMA_VERSION = 1

_SCALAR_TYPES = {'int': int, 'float': float, 'str': str}


def read_schema(path: Path = SCHEMA_PATH) -> Dict[str, Any]:
    return read_config(path)


def _convert_scalar(value: Any, type_name: str) -> Tuple[Any, Optional[str]]:
    """ Returns the converted value and an error message, or None if the value fits the type. """
    if type_name == 'int':
        if isinstance(value, bool) or not isinstance(value, int):
            return value, f'expected an integer, got {value!r}'
        return value, None
    if type_name == 'float':
        if isinstance(value, bool):
            return value, f'expected a number, got {value!r}'
        if isinstance(value, str):
            try:
                return float(value), None
            except ValueError:
                return value, f'expected a number, got {value!r}'
        if not isinstance(value, (int, float)):
            return value, f'expected a number, got {value!r}'
        return float(value), None
    if not isinstance(value, _SCALAR_TYPES[type_name]):
        return value, f'expected a string, got {value!r}'
    return value, None


def _check_bounds(value: Any, spec: Dict[str, Any]) -> Optional[str]:
    if 'choices' in spec and value not in spec['choices']:
        return f'{value!r} is not one of {spec["choices"]}'
    if isinstance(value, str):
        return None
    if 'minimum' in spec and value < spec['minimum']:
        return f'{value} is below the minimum {spec["minimum"]}'
    if 'maximum' in spec and value > spec['maximum']:
        return f'{value} is above the maximum {spec["maximum"]}'
    if 'exclusive_minimum' in spec and not value > spec['exclusive_minimum']:
        return f'{value} must be greater than {spec["exclusive_minimum"]}'
    if 'exclusive_maximum' in spec and not value < spec['exclusive_maximum']:
        return f'{value} must be less than {spec["exclusive_maximum"]}'
    if spec.get('nonzero') and value == 0:
        return 'value must be nonzero'
    return None


def _check_field(name: str, value: Any, spec: Dict[str, Any]) -> Tuple[Any, List[str]]:
    type_name = spec['type']
    if type_name.startswith('list['):
        item_type = type_name[len('list['):-1]
        if not isinstance(value, list):
            return value, [f'{name}: expected a list, got {value!r}']
        if len(value) < spec.get('min_items', 0):
            return value, [f'{name}: needs at least {spec["min_items"]} item(s), got {len(value)}']
        converted, errors = [], []
        for i, item in enumerate(value):
            item, error = _convert_scalar(item, item_type)
            error = error or _check_bounds(item, spec)
            if error:
                errors.append(f'{name}[{i}]: {error}')
            converted.append(item)
        return converted, errors
    value, error = _convert_scalar(value, type_name)
    error = error or _check_bounds(value, spec)
    return value, [f'{name}: {error}'] if error else []


def validate_config(config: Dict[str, Any],
                    command: str,
                    schema: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Validates a config document against the published schema for one command and
    fills in defaults. All violations are collected before raising.

    Args:
      config (Dict[str, Any]): Parsed config document.
      command (str): One of the commands of the schema (experiment, simulate, estimate, variances).
      schema (Optional[Dict[str, Any]]): Schema document, defaults to the packaged schema.

    Returns:
      Dict[str, Any]: The validated config with defaults for missing optional fields.
    """

    schema = schema or read_schema()
    fields, commands = schema['fields'], schema['commands']
    if command not in commands:
        raise ConfigError(f'Unknown command: {command}')
    required = ['schema_version'] + commands[command]['required']
    allowed = set(required) | set(commands[command]['optional'])

    errors = []
    for name in sorted(set(config) - allowed):
        errors.append(f'{name}: unknown field for command {command}')
    for name in required:
        if name not in config:
            errors.append(f'{name}: required field is missing')

    result = {}
    for name in required + commands[command]['optional']:
        spec = fields[name]
        if name in config:
            value, field_errors = _check_field(name, config[name], spec)
            errors.extend(field_errors)
            result[name] = value
        elif 'default' in spec:
            result[name] = spec['default']

    if not errors:
        errors.extend(_check_horizon(result))
    if errors:
        raise ConfigError('Invalid config:\n  ' + '\n  '.join(errors))
    return result


def _check_horizon(config: Dict[str, Any]) -> List[str]:
    T = config.get('T', 1.)
    errors = []
    for i, n in enumerate(config.get('n_values', [])):
        if not n > T:
            errors.append(f'n_values[{i}]: sample size {n} must exceed the horizon T={T}')
    if 'n' in config and not config['n'] > T:
        errors.append(f'n: sample size {config["n"]} must exceed the horizon T={T}')
    return errors


class Cell(NamedTuple):
    H: float
    c: float
    n: int


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Monte Carlo study over the grid H_values x c_values x n_values.

    Args:
        model (ModelType): SDE model of the sample paths.
        H_values (Tuple[float, ...]): Hurst indices in (1/2, 1).
        c_values (Tuple[float, ...]): Volatilities, nonzero.
        lambda_ (float): Linear drift coefficient.
        x0 (float): Initial value.
        T (float): Time horizon.
        n_values (Tuple[int, ...]): Sample sizes, each above T.
        replicates (int): Sample paths per cell.
        base_seed (int): Base seed of the replicate streams.
        estimators (Tuple[EstimatorType, ...]): Estimators to apply.
        ci_level (float): Confidence level of the intervals.
        refine (int): Quadrature refinement of the driver grid.
        method (SamplingMethod): fBm sampling method.
        h3_source (EstimatorType): Plug-in Hurst estimator of the volatility estimator.
        threads (int): Worker threads, -1 for all cores.
    """

    model: ModelType
    H_values: Tuple[float, ...]
    c_values: Tuple[float, ...]
    lambda_: float
    x0: float
    T: float
    n_values: Tuple[int, ...]
    replicates: int
    base_seed: int
    estimators: Tuple[EstimatorType, ...]
    ci_level: float = 0.95
    refine: int = 4
    method: SamplingMethod = SamplingMethod.SPECTRAL_CIRCULANT
    h3_source: EstimatorType = EstimatorType.H2
    threads: int = -1

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'ExperimentConfig':
        """
        Initializes an ExperimentConfig from a config document.

        Args:
          config (Dict[str, Any]): Config document, validated against the schema here.

        Returns:
          ExperimentConfig: Typed experiment config.
        """

        config = validate_config(config, 'experiment')
        return ExperimentConfig(
            model=ModelType(config['model']),
            H_values=tuple(config['H_values']),
            c_values=tuple(config['c_values']),
            lambda_=config['lambda'],
            x0=config['x0'],
            T=config['T'],
            n_values=tuple(config['n_values']),
            replicates=config['replicates'],
            base_seed=config['base_seed'],
            estimators=tuple(EstimatorType(e) for e in dict.fromkeys(config['estimators'])),
            ci_level=config['ci_level'],
            refine=config['refine'],
            method=SamplingMethod(config['method']),
            h3_source=EstimatorType(config['h3_source']),
            threads=config['threads'])

    def cells(self) -> List[Cell]:
        """ Cells in the order H x c x n, the position is the cell index of the seed streams. """
        return [Cell(H, c, n) for H, c, n in itertools.product(self.H_values, self.c_values, self.n_values)]

    def to_config(self) -> Dict[str, Any]:
        config = asdict(self)
        config['lambda'] = config.pop('lambda_')
        config['model'] = self.model.value
        config['method'] = self.method.value
        config['h3_source'] = self.h3_source.value
        config['estimators'] = [e.value for e in self.estimators]
        for key in ('H_values', 'c_values', 'n_values'):
            config[key] = list(config[key])
        return {'schema_version': SCHEMA_VERSION, **config}
