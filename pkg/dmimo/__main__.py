import sys

from dmimo.harness.cli import main

if __name__ == "__main__":
    sys.exit(main())
