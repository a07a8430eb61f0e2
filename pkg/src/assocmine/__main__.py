import sys

from assocmine.cli import main

sys.exit(main())
