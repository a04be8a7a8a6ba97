#!/usr/bin/env python
"""Run the jetaero command line from a source checkout."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from jetaero.main import main

if __name__ == "__main__":
    main()
