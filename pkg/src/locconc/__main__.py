from locconc.cli import main
import sys

sys.exit(main())
