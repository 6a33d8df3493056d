from __future__ import annotations

from swiptcap._cli import main

raise SystemExit(main())
