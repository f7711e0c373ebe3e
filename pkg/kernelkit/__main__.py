"""`python -m kernelkit` runs the command-line front end."""
import sys

from kernelkit.cli import main

if __name__ == '__main__':
    sys.exit(main())
