import csv
import io
import json

import numpy as np

from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from ..errors import ValidationError
from ..settings import MARKOV_ORDER_TOL, OUTPUT_SCHEMA_VERSION

FORMATS = ("json", "csv")
MAX_LENGTH = 64


@dataclass
class RunConfig:
    """
    Parameters of one CLI invocation, echoed in every JSON output.

    :param command: str, subcommand name
    :param source: str, preset URI or path to a source JSON file
    :param protocol: str, optional, protocol reference
    :param L: int, largest block length
    :param seed: int, optional, sampling seed
    :param fmt: str, "json" or "csv"
    :param tol: float, Markov-order tolerance
    """
    command: str
    source: str
    protocol: Optional[str] = None
    L: int = 12
    seed: Optional[int] = None
    fmt: str = "json"
    tol: float = MARKOV_ORDER_TOL
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ValidationError(f"Unknown output format {self.fmt!r}; use one of {', '.join(FORMATS)}")
        if not isinstance(self.L, int) or isinstance(self.L, bool) or not 1 <= self.L <= MAX_LENGTH:
            raise ValidationError(f"L must be an integer in 1..{MAX_LENGTH}, got {self.L!r}")
        if self.tol <= 0:
            raise ValidationError(f"Tolerance must be positive, got {self.tol}")

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if key != "fmt"}


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def render_json(config: RunConfig, payload: dict) -> str:
    """Deterministic JSON document with the schema version and the run config."""
    document = {"schema_version": OUTPUT_SCHEMA_VERSION, "config": config.to_dict(), **payload}
    return json.dumps(_plain(document), sort_keys=True, indent=2)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue().rstrip("\n")


def render_curve(values: Sequence[float]) -> str:
    """CSV curve with header row ``ell,value``."""
    return render_csv(("ell", "value"), enumerate(values))
