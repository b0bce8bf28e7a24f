"""
Entry point for running as: python -m partial_omt
"""
from partial_omt.cli import main

if __name__ == "__main__":
    main()
