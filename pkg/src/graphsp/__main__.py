import sys

from graphsp.cli import main

sys.exit(main())
