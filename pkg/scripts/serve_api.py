#!/usr/bin/env python3
"""Start the path-controller HTTP API on the built-in scenario.

Usage:
    python3 scripts/serve_api.py [--port 8080] [--host 0.0.0.0]

Equivalent to `flexsim serve`; kept here as a runnable entry point next to
the other scripts.
"""

import sys

from flexsim.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["serve", *sys.argv[1:]]))
