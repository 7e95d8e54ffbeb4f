"""Entry point for ``python3 -m subgraph_polytopes``."""

import sys

from .cli import main

sys.exit(main())
