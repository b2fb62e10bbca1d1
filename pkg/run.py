#!/usr/bin/env python3
"""
Simple runner for symdyn.
This runs the command line from the src/ directory.
"""

import sys
from pathlib import Path

# Add src directory to Python path
src_dir = Path(__file__).parent / "src"
sys.path.insert(0, str(src_dir))

from cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
