import sys

from coagent.cli import main

sys.exit(main())
