import logging
import sys

import fire

from qproc.cli import QProcCLI
from qproc.errors import QProcError


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    verbose = "--verbose" in argv
    argv = [arg for arg in argv if arg != "--verbose"]
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        fire.Fire(QProcCLI(), command=argv)
    except QProcError as e:
        print(f"error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
