"""Entry point for ``python -m ridgeprec``."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
