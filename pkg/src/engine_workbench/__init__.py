"""Headless engine disassembly/assembly training workbench."""

__version__ = "0.1.0"
