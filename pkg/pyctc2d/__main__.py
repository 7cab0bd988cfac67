"""Main entry into the pyctc2d console script."""
import sys

from pyctc2d.cli import main

sys.exit(main())
