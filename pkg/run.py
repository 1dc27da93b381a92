#!/usr/bin/env python3
"""
Simple entry point to run the justinf command line.
"""
from src.cli import main_exit

if __name__ == "__main__":
    main_exit()
