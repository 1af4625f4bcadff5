import logging
import os

from typing import Mapping, Optional

from ..errors import ValidationError
from ..source import HMCQS
from ..utils import parse_ref, read_json
from .instruments import instrument
from .library import preset_protocols
from .protocols import DQMP

logger = logging.getLogger(__name__)


def parse_protocol_spec(doc: dict, origin: str = "<protocol>") -> DQMP:
    """
    Build a protocol from its JSON description.

    Expected keys: ``states``, ``start``, ``povm`` (state to instrument
    reference or inline element matrices) and ``delta`` (state to a mapping
    of outcome to next state). An optional ``name`` labels the protocol.

    :param doc: dict, decoded JSON document
    :param origin: str, file name used in error messages
    :return: DQMP
    """
    missing = [key for key in ("states", "start", "povm", "delta") if key not in doc]
    if missing:
        raise ValidationError(f"{origin}: missing keys {missing}")
    if not isinstance(doc["povm"], Mapping) or not isinstance(doc["delta"], Mapping):
        raise ValidationError(f"{origin}: 'povm' and 'delta' must be objects keyed by state")
    povms = {state: instrument(ref, origin=f"{origin}: state {state!r}") for state, ref in doc["povm"].items()}
    delta = {}
    for state, moves in doc["delta"].items():
        if not isinstance(moves, Mapping):
            raise ValidationError(f"{origin}: delta of state {state!r} must map outcomes to states")
        for outcome, target in moves.items():
            delta[(state, str(outcome))] = target
    try:
        return DQMP(tuple(doc["states"]), doc["start"], povms, delta,
                    name=doc.get("name", os.path.basename(origin)))
    except ValidationError as e:
        raise ValidationError(f"{origin}: {e}")


def load_protocol(ref, src: Optional[HMCQS] = None) -> DQMP:
    """
    Resolve a protocol reference.

    :param ref: DQMP, ``repeated:<instrument>``, ``preset:<name>`` (with
        ``preset:adaptive`` picking the adaptive protocol of `src`), a
        decoded JSON mapping, or a path to a JSON file
    :param src: HMCQS, optional, needed by source-dependent presets
    :return: DQMP
    """
    if isinstance(ref, DQMP):
        return ref
    if isinstance(ref, Mapping):
        return parse_protocol_spec(ref)
    ref = str(ref)
    scheme, name, _ = parse_ref(ref)
    if scheme == "repeated":
        return DQMP.repeated(instrument(ref.partition(":")[2]))
    if scheme == "preset":
        registry = preset_protocols(src)
        if name not in registry:
            hint = " (source-dependent presets need a source)" if src is None else ""
            raise ValidationError(f"Unknown protocol preset {name!r}{hint}; available: {', '.join(sorted(registry))}")
        return registry[name]()
    logger.debug("Loading protocol from %s", ref)
    return parse_protocol_spec(read_json(ref), origin=ref)
