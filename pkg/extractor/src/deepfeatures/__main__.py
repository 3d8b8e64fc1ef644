import sys

from .extract import main

if __name__ == "__main__":
    sys.exit(main())
