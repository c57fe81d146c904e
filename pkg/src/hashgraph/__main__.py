import sys

from hashgraph.bench import main

sys.exit(main())
