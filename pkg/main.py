# main.py
import sys

from unitdist.cli import main

if __name__ == "__main__":
    sys.exit(main())
