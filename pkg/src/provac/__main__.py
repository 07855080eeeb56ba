import sys

from provac.cli import main

sys.exit(main())
