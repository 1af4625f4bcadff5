import inspect
import logging
import os

import numpy as np

from ..classical import HMC, Alphabet
from ..errors import ValidationError
from ..qcore import PureState
from ..utils import float_param, parse_ref, read_json
from .hmcqs import HMCQS, QuantumAlphabet, build_source
from .presets import presets

logger = logging.getLogger(__name__)

FLOAT_PARAMS = ("p", "phi")


def _amplitude(value, origin: str):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"{origin}: amplitudes must be numbers or [re, im] pairs, got {value!r}")


def parse_source_spec(doc: dict, origin: str = "<source>") -> HMCQS:
    """
    Build a source from its JSON description.

    Expected keys: ``dim``, ``states``, ``alphabet`` (name to list of
    [re, im] amplitudes) and ``transitions`` (symbol to row-major matrix).
    An optional ``name`` labels the source.

    :param doc: dict, decoded JSON document
    :param origin: str, file name used in error messages
    :return: HMCQS
    """
    missing = [key for key in ("dim", "states", "alphabet", "transitions") if key not in doc]
    if missing:
        raise ValidationError(f"{origin}: missing keys {missing}")
    dim = int(doc["dim"])
    kets = []
    for name, amplitudes in doc["alphabet"].items():
        vector = np.array([_amplitude(a, origin) for a in amplitudes])
        if vector.size != dim:
            raise ValidationError(f"{origin}: state {name!r} has {vector.size} amplitudes, expected {dim}")
        try:
            kets.append((name, PureState(vector)))
        except ValidationError as e:
            raise ValidationError(f"{origin}: state {name!r}: {e}")
    symbols = tuple(doc["transitions"])
    try:
        hmc = HMC(tuple(doc["states"]), Alphabet(symbols),
                  {symbol: np.array(matrix, dtype=float) for symbol, matrix in doc["transitions"].items()})
        return build_source(hmc, QuantumAlphabet(tuple(kets)), name=doc.get("name", os.path.basename(origin)))
    except ValidationError as e:
        raise type(e)(f"{origin}: {e}")


def load_preset(name: str, params: dict) -> HMCQS:
    """
    Instantiate a preset source from raw string parameters.

    :param name: str, registry name
    :param params: dict, raw parameter strings
    :return: HMCQS
    """
    registry = presets()
    if name not in registry:
        raise ValidationError(f"Unknown preset {name!r}; available: {', '.join(sorted(registry))}")
    factory = registry[name]
    accepted = inspect.signature(factory).parameters
    unknown = set(params) - set(accepted)
    if unknown:
        raise ValidationError(f"Preset {name!r} does not take parameters {sorted(unknown)}")
    kwargs = {}
    for key, raw in params.items():
        kwargs[key] = float_param(params, key, 0.0) if key in FLOAT_PARAMS else raw
    if name == "iid" and "state" not in kwargs and set(kwargs) & set(FLOAT_PARAMS):
        kwargs["state"] = None
    return factory(**kwargs)


def load_source(ref) -> HMCQS:
    """
    Resolve a source reference.

    :param ref: HMCQS, ``preset:<name>?k=v`` URI, or path to a JSON file
    :return: HMCQS
    """
    if isinstance(ref, HMCQS):
        return ref
    scheme, name, params = parse_ref(str(ref))
    if scheme == "preset":
        return load_preset(name, params)
    path = str(ref)
    logger.debug("Loading source from %s", path)
    return parse_source_spec(read_json(path), origin=path)
