"""`python -m app ...` runs the lab CLI."""

import sys

from app.cli import cli_main

sys.exit(cli_main())
