import sys

from qtop.cli import main

sys.exit(main())
