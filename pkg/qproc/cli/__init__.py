from .commands import QProcCLI
from .config import RunConfig, render_json, render_csv, render_curve, FORMATS
