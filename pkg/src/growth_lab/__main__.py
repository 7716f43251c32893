import sys

from growth_lab.cli import main

sys.exit(main())
