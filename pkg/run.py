"""
Run script for the plane Lie algebra toolkit.
This script provides a convenient way to call the command-line front end.
"""

import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
