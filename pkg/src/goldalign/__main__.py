import sys

from goldalign.cli import main

sys.exit(main())
