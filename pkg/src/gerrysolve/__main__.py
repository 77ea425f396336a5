"""Module entry point so `python -m gerrysolve` behaves like the script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
