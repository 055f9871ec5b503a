import sys

from sheafnet.cli import main

sys.exit(main())
