import logging.config
from logging import Logger, getLogger
from pathlib import Path
from typing import Union

import yaml

DEFAULT_LOGGING_CONFIG = Path(__file__).parent.parent / 'configs' / 'logging.yaml'


def get_logger(name: str) -> Logger:
    """
    Creates a logger object for a given name.

    Args:
        name (str): Name of the logger.

    Returns:
        Logger: Logger object with given name.
    """

    logger = getLogger(name)
    return logger


def configure_logging(path: Union[str, Path] = None) -> None:
    """
    Configures the logging module from a dictConfig yaml file. Falls back to the
    packaged logging.yaml if no path is given or the given file does not exist.

    Args:
        path (Union[str, Path], optional): Path to a logging .yaml file.
    """

    config_path = Path(path) if path is not None else DEFAULT_LOGGING_CONFIG
    if not config_path.is_file():
        config_path = DEFAULT_LOGGING_CONFIG
    with open(config_path, 'r', encoding='utf-8') as stream:
        config = yaml.load(stream, Loader=yaml.FullLoader)
    logging.config.dictConfig(config)
