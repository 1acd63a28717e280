import sys

from spherejerk.cli import main

sys.exit(main())
