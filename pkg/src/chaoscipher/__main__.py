from chaoscipher.cli import main
import sys
sys.exit(main())
