import sys

from src.cli import main

# Load settings, parse arguments and run the requested command
if __name__ == "__main__":
    sys.exit(main())
