import sys

from aucgap.cli import main

sys.exit(main())
