"""Entry point for python -m diffconcepts."""

from diffconcepts.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
