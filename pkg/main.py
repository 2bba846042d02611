#!/usr/bin/env python3
import logging
import sys
from pathlib import Path

from src.cli.interface import WeakValueCLI


def setup_logging(level: str = "WARNING", log_dir: str = None):
    """Log to stderr, and to weakvalue.log in the output directory when one is given"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(Path(log_dir) / "weakvalue.log"))

    logging.basicConfig(
        level=getattr(logging, level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


def main():
    cli = WeakValueCLI()
    args = cli.parse(sys.argv[1:])
    setup_logging(getattr(args, 'log_level', 'WARNING'), getattr(args, 'out_dir', None))
    sys.exit(cli.execute(args))


if __name__ == "__main__":
    main()
