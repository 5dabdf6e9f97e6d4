"""
Run with: python main.py {gen,compute,validate,compare} [options]
Requirements:
pip install -r requirements.txt

Examples:
  python main.py gen --generator tree_ball --param q=2 --param radius=4 --out tree.json
  python main.py compute --generator lattice_window --param radius=80 --pairs 0:0,0:3 --t 0.25,1,2
  python main.py validate --generator two_vertex
  python main.py compare --generator tree_ball --param q=2 --param radius=30 --routes dirac,closed_form
"""

from __future__ import annotations

import logging
import sys

from dotenv import load_dotenv

from cli.commands import run_command
from cli.config import build_parser, build_run_config
from cli.settings import load_settings
from graph_core.errors import HeatKernelError

# ---------------------------------------------------------------------
# Boot
# ---------------------------------------------------------------------
load_dotenv()  # loads HEATKERNEL_* defaults from .env

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_run_config(args, load_settings())
    except HeatKernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(level=cfg.log_level, format=LOG_FORMAT, stream=sys.stderr)
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
