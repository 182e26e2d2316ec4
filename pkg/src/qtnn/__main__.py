import sys

from qtnn.cli import main

sys.exit(main())
