__version__ = "0.1.0"

from . import classical, measurement, qcore, qmeasures, source, sync, tomography
from .errors import (
    QProcError,
    ValidationError,
    NonErgodicSourceError,
    ResourceCapError,
    UnrealizableObservationError,
)
