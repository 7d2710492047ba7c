from pathlib import Path
from typing import Dict, Any, Union, Tuple

import numpy as np
import pandas as pd
import yaml

from fsde.utils.errors import ConfigError

# 17 significant digits round-trip every double exactly
FLOAT_FORMAT = '%.17g'


def read_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Reads the config dictionary from a yaml (or json) file.

    Args:
        path (Union[str, Path]): Path to the .yaml or .json file.

    Returns:
        Dict[str, Any]: Configuration.

    """

    try:
        with open(path, 'r', encoding='utf-8') as stream:
            config = yaml.load(stream, Loader=yaml.FullLoader)
    except FileNotFoundError:
        raise ConfigError(f'Config file not found: {path}')
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        where = f' (line {mark.line + 1}, column {mark.column + 1})' if mark is not None else ''
        raise ConfigError(f'Could not parse config file {path}{where}: {e}')
    if not isinstance(config, dict):
        raise ConfigError(f'Config file {path} must contain a mapping at top level.')
    return config


def save_config(config: Dict[str, Any], path: Union[str, Path]) -> None:
    """
    Saves the config as a yaml file.

    Args:
        config (Dict[str, Any]): Configuration.
        path (Union[str, Path]): Path to save the dictionary to (.yaml).
    """

    with open(path, 'w+', encoding='utf-8') as stream:
        yaml.dump(config, stream, default_flow_style=False)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """
    Writes a data frame as csv with round-trip-exact float formatting.

    Args:
        frame (pd.DataFrame): Table to write.
        path (Union[str, Path]): Destination .csv file.
    """

    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_path_csv(times: np.ndarray, values: np.ndarray,
                   path: Union[str, Path], value_column: str = 'value') -> None:
    """
    Writes a sample path as csv with header k,t,<value_column>.

    Args:
        times (np.ndarray): Grid points t_k.
        values (np.ndarray): Path values at the grid points.
        path (Union[str, Path]): Destination .csv file.
        value_column (str): Name of the value column, 'value' for fBm and 'X' for SDE paths.
    """

    frame = pd.DataFrame({'k': np.arange(len(values)), 't': times, value_column: values})
    write_csv(frame, path)


def read_path_csv(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reads a sample path csv written by write_path_csv.

    Args:
        path (Union[str, Path]): Path to a .csv file with header k,t,value or k,t,X.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Grid points and path values.
    """

    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except FileNotFoundError:
        raise ConfigError(f'Path csv not found: {path}')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f'Malformed path csv {path}: {e}')
    columns = list(frame.columns)
    if columns not in (['k', 't', 'value'], ['k', 't', 'X']):
        raise ConfigError(f'Malformed path csv {path}: expected header k,t,value or k,t,X, got {",".join(map(str, columns))}')
    if frame.isnull().values.any():
        bad_row = int(frame.isnull().any(axis=1).values.argmax())
        raise ConfigError(f'Malformed path csv {path}: missing value in data row {bad_row + 1}')
    try:
        times = frame['t'].to_numpy(dtype=float)
        values = frame[columns[2]].to_numpy(dtype=float)
        k = frame['k'].to_numpy(dtype=float)
    except ValueError as e:
        raise ConfigError(f'Malformed path csv {path}: {e}')
    if not np.array_equal(k, np.arange(len(k))):
        raise ConfigError(f'Malformed path csv {path}: column k must enumerate 0..{len(k) - 1}')
    return times, values
