import sys

from groupcodes.cli import main

sys.exit(main())
