"""Allow running the CLI as ``python -m folia``."""

import sys

from .cli import main

sys.exit(main())
