"""Run the command line front end via ``python -m cohex``."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
