"""
Utility functions for the PLP toolchain.
"""
import json
import os
import re
import logging
from dotenv import load_dotenv
from typing import Any, Dict
from .config import update_config

# Load environment variables from .env file at the very start
load_dotenv()

logger = logging.getLogger(__name__)


def load_config(config_file_path: str = "config.json", required: bool = False) -> Dict[str, Any]:
    """
    Loads configuration from a JSON file, replacing environment variable placeholders,
    and updates the shared toolchain config.

    A missing file keeps the built-in defaults unless ``required`` is set.
    """
    try:
        with open(config_file_path, 'r') as f:
            config_data = json.load(f)
        logger.debug(f"Successfully opened and loaded '{config_file_path}'.")
    except FileNotFoundError:
        if required:
            logger.error(f"Config file '{config_file_path}' not found.")
            raise
        logger.debug(f"Config file '{config_file_path}' not found, using defaults.")
        config_data = {}
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing config file '{config_file_path}': {e}.")
        raise

    processed_config = _replace_placeholders(config_data)
    update_config(processed_config)
    logger.debug("Shared toolchain configuration updated.")

    return processed_config


def _replace_placeholders(obj: Any) -> Any:
    """
    Recursively replaces placeholder strings like "${ENV_VAR_NAME}"
    with their actual environment variable values.
    Unset variables become None so the section default applies.
    """
    if isinstance(obj, dict):
        return {k: _replace_placeholders(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        return [_replace_placeholders(elem) for elem in obj]
    elif isinstance(obj, str):
        match = re.fullmatch(r'\$\{(\w+)\}', obj)
        if match:
            env_var_name = match.group(1)
            value = os.getenv(env_var_name)
            if value is None or value == "":
                logger.debug(
                    f"Environment variable '{env_var_name}' in config is not set. "
                    f"Using the built-in default.")
                return None
            logger.debug(f"Replaced placeholder for '{env_var_name}'.")
            return value
    return obj
