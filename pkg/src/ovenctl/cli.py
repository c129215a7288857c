#!/usr/bin/env python3
"""
Command-line interface entry point for OvenCtl.

This module provides the main entry point for running OvenCtl from the command line.
"""

import sys

from ovenctl import OvenCtl


def main():
    """Main entry point for the CLI application."""
    app = OvenCtl()
    sys.exit(app.run(sys.argv[1:]))


if __name__ == "__main__":
    main()
