#!/usr/bin/env python3
"""
hsolv - local solvability toolkit for left-invariant operators on H₁
Command line entry point
"""

import argparse
import sys
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cli.commands import COMMAND_NAMES, FORMATS, SIGNS, build_run_config, run_command
from utils.errors import HsolvError, OperatorSyntaxError
from utils.logger import setup_logger
from verdicts.verification import ROOT_ORDERS

# Setup logging
logger = setup_logger('main')
PACKAGE_LOGGERS = ('algebra', 'realization', 'asymptotics', 'kernel', 'verdicts', 'cli', 'config')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hsolv',
        description="Classify local solvability of generic left-invariant operators on the Heisenberg group",
    )
    parser.add_argument('command', choices=COMMAND_NAMES)
    parser.add_argument('--op', required=True, help="operator, e.g. '-X^2 - Y^2' or 'i*X^3 + 2*X^2*Y'")
    parser.add_argument('--gamma', help="γ as 're[,im]' or 'inf' (default 2)")
    parser.add_argument('--gamma-range', help="scan interval 'lo:hi:steps'")
    parser.add_argument('--sign', choices=tuple(SIGNS), default='both')
    parser.add_argument('--window', help="integration window 't0:T' (env HSOLV_WINDOW)")
    parser.add_argument('--tol', type=float, help="σ_min tolerance (env HSOLV_TOL)")
    parser.add_argument('--format', choices=FORMATS, default='report')
    parser.add_argument('--out', help="write output to this path instead of stdout")
    parser.add_argument('--root-order', choices=ROOT_ORDERS, default='canonical',
                        help="debugging: inject a root order into the verify suite")
    return parser


def main(argv=None) -> int:
    """Main entry point"""
    for name in PACKAGE_LOGGERS:
        setup_logger(name)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return int(e.code or 0)

    try:
        run = build_run_config(args)
        logger.info(f"🚀 hsolv {run.command} on '{run.operator_text}'")
        code = run_command(run)
        logger.info(f"🏁 {run.command} finished with exit code {code}")
        return code
    except OperatorSyntaxError as e:
        logger.error(f"❌ Cannot parse operator: {e}")
        print(e.pointer(), file=sys.stderr)
        return e.exit_code
    except HsolvError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"❌ Invalid input: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
