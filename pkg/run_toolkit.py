"""
Entry point script for the transmission eigenvalue toolkit.
"""

import sys

from transmission_eigen_toolkit.main import main


if __name__ == "__main__":
    sys.exit(main())
