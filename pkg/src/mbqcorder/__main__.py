import sys

from mbqcorder.cli import main

sys.exit(main())
