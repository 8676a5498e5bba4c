import sys

from mesh_stego.cli.main import main

sys.exit(main())
