import sys

from gamedecomp.cli import main

sys.exit(main())
