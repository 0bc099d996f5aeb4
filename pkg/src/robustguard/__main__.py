"""Allow python -m robustguard."""
import sys

from .cli import main

sys.exit(main())
