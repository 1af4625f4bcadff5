import os
import json

from typing import Optional
from urllib.parse import parse_qsl
from dotenv import load_dotenv

from ..errors import ValidationError
from ..settings import CAP_DIM_ENV, DENSE_DIM_CAP


_MISSING = object()


def get_env(key: str, default=_MISSING) -> Optional[str]:
    """
    Retrieves the value of an environment variable.

    If the environment variable is not set and no default is given, it raises
    an exception.

    :param key: str, the name of the environment variable.
    :param default: optional, value returned when the variable is not set.
    :return: str, the value of the environment variable (or the default).
    :raises ValidationError: If the environment variable is not set and no
        default was provided.
    """
    value = os.getenv(key)
    if not value:
        if default is _MISSING:
            raise ValidationError(f"Environment variable {key} is not set")
        return default
    return value


def dense_dim_cap() -> int:
    """
    Dense-matrix dimension cap, honouring the QPROC_CAP_DIM override.

    :return: int, the largest d^ℓ for which block density matrices are
        materialized.
    """
    load_dotenv()
    value = get_env(CAP_DIM_ENV, None)
    if value is None:
        return DENSE_DIM_CAP
    try:
        cap = int(value)
    except ValueError:
        raise ValidationError(f"{CAP_DIM_ENV} must be an integer, got {value!r}")
    if cap < 1:
        raise ValidationError(f"{CAP_DIM_ENV} must be positive, got {cap}")
    return cap


def read_json(file_path: str) -> dict:
    """
    Read a JSON document from disk.

    :param file_path: str, path to the JSON file
    :return: dict, the decoded document
    :raises ValidationError: when the file is missing or is not valid JSON;
        the message carries file, line and column.
    """
    if not os.path.isfile(file_path):
        raise ValidationError(f"File {file_path} does not exist")
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(
                f"{file_path}:{e.lineno}:{e.colno}: invalid JSON ({e.msg})")


def create_folder(folder_path: str) -> str:
    """
    Create a folder if it does not exist.

    :param folder_path: str, path to folder
    :return: str, path to folder
    """
    if folder_path and not os.path.exists(folder_path):
        os.makedirs(folder_path)
    return folder_path


def parse_ref(ref: str) -> tuple:
    """
    Split a reference such as ``preset:qgm?phi=1.57`` or ``repeated:M01``.

    :param ref: str, the reference
    :return: tuple, (scheme, name, params) where scheme is "" for bare names
        and params maps parameter names to their raw string values
    """
    scheme, sep, rest = ref.partition(":")
    if not sep:
        scheme, rest = "", ref
    name, _, query = rest.partition("?")
    params = dict(parse_qsl(query, keep_blank_values=True))
    return scheme, name, params


def float_param(params: dict, key: str, default: float) -> float:
    """
    Read a float parameter from a parsed reference query.

    :param params: dict, raw parameters from `parse_ref`
    :param key: str, parameter name
    :param default: float, value when the parameter is absent
    :return: float
    """
    if key not in params:
        return default
    try:
        return float(params[key])
    except ValueError:
        raise ValidationError(f"Parameter {key} must be a number, got {params[key]!r}")


def format_word(word: tuple) -> str:
    """
    Render a word (tuple of symbol labels) as a string.

    Single-character labels are concatenated, longer ones are joined by
    commas so the rendering stays unambiguous.

    :param word: tuple, symbol labels
    :return: str
    """
    if all(len(symbol) == 1 for symbol in word):
        return "".join(word)
    return ",".join(word)
