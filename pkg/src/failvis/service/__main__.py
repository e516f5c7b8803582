"""Run the annotation service: ``python -m failvis.service --data-root DIR``."""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn

from .app import create_app


def main() -> None:
    parser = argparse.ArgumentParser(description="failvis annotation service")
    parser.add_argument("--data-root", required=True)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8600)
    parser.add_argument("--ui-dir", default=None)
    args = parser.parse_args()
    app = create_app(Path(args.data_root), ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
