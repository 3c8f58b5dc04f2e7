"""Module entry point for python -m eulerlab."""

from .cli import main

main()
