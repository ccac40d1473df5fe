"""Allow ``python -m nearly_hermitian``."""
from .cli import main

raise SystemExit(main())
