import sys

from neurosim.main import main

sys.exit(main())
