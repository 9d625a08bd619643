"""
Command implementations behind main.py

Each cmd_* takes a RunConfig, writes its output and returns the process exit code.
Library errors propagate; main.py maps them to exit codes.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd

from algebra.ncpoly import NCPolynomial
from algebra.parser import parse_operator
from algebra.roots import GenericityReport, characteristic_roots, check_generic
from asymptotics.frame import build_frame
from asymptotics.gauge import exponents
from config import config as default_config, HsolvConfig, parse_window
from kernel.basis import canonical_basis
from kernel.matching import gamma_scan
from realization.coefficients import coefficient_table
from realization.ode_realization import realize
from utils.errors import NonGenericError, ValidationError
from utils.helpers import (build_report, format_check_lines, render_report, render_table,
                           write_output)
from verdicts.classifier import classify, root_counts
from verdicts.verification import ROOT_ORDERS, run_suite

logger = logging.getLogger(__name__)

COMMAND_NAMES = ('classify', 'roots', 'exponents', 'basis', 'scan', 'verify')
SIGNS = {'plus': (1,), 'minus': (-1,), 'both': (1, -1)}
FORMATS = ('report', 'tabular')


def parse_gamma(text: str) -> Optional[complex]:
    """'re[,im]' -> complex; 'inf' selects the γ = ∞ limit operator"""
    text = text.strip()
    if text.lower() in ('inf', 'infinity', '∞'):
        return None
    parts = text.split(',')
    if len(parts) > 2:
        raise ValidationError(f"gamma must look like 're[,im]', got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise ValidationError(f"gamma must look like 're[,im]', got {text!r}") from e
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"gamma must be finite, got {text!r}")
    value = complex(values[0], values[1] if len(values) == 2 else 0.0)
    if value == 0:
        raise ValidationError("gamma must be nonzero")
    return value


def parse_gamma_range(text: str) -> Tuple[float, float, int]:
    """'lo:hi:steps' with 0 < lo < hi and steps >= 2"""
    parts = text.split(':')
    if len(parts) != 3:
        raise ValidationError(f"gamma range must look like 'lo:hi:steps', got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ValidationError(f"gamma range must look like 'lo:hi:steps', got {text!r}") from e
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise ValidationError(f"gamma range needs 0 < lo < hi, got {text!r}")
    if steps < 2:
        raise ValidationError(f"gamma range needs at least 2 steps, got {steps}")
    return lo, hi, steps


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, validated"""
    command: str
    operator_text: str
    gamma: Optional[complex] = 2.0
    gamma_range: Optional[Tuple[float, float, int]] = None
    sign: str = 'both'
    window: Optional[Tuple[float, float]] = None
    tol: Optional[float] = None
    output_path: Optional[str] = None
    format: str = 'report'
    root_order: str = 'canonical'

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.command not in COMMAND_NAMES:
            raise ValidationError(f"unknown command {self.command!r}")
        if not self.operator_text or not self.operator_text.strip():
            raise ValidationError("an operator is required (--op)")
        if self.sign not in SIGNS:
            raise ValidationError(f"sign must be one of {tuple(SIGNS)}, got {self.sign!r}")
        if self.format not in FORMATS:
            raise ValidationError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.root_order not in ROOT_ORDERS:
            raise ValidationError(f"root order must be one of {ROOT_ORDERS}, got {self.root_order!r}")
        if self.window is not None:
            t0, t1 = self.window
            if not (0 < t0 < t1):
                raise ValidationError(f"window needs 0 < t0 < T, got {self.window}")
        if self.tol is not None and not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValidationError(f"tolerance must be positive, got {self.tol}")
        if self.gamma_range is not None:
            lo, hi, steps = self.gamma_range
            if not (0 < lo < hi) or steps < 2:
                raise ValidationError(f"invalid gamma range {self.gamma_range}")

    @property
    def signs(self) -> Tuple[int, ...]:
        return SIGNS[self.sign]

    def to_hsolv_config(self, base: HsolvConfig = None) -> HsolvConfig:
        """Flags layered over environment and defaults"""
        base = base or default_config
        overrides: Dict[str, Any] = {}
        if self.window is not None:
            overrides['WINDOW'] = tuple(self.window)
        if self.tol is not None:
            overrides['SIGMA_TOL'] = self.tol
            overrides['SIGMA_CONFIRM_TOL'] = min(base.SIGMA_CONFIRM_TOL, self.tol)
        if self.gamma_range is not None:
            lo, hi, steps = self.gamma_range
            overrides['SCAN'] = {**base.SCAN, 'interval': (lo, hi), 'grid_size': steps}
        if not overrides:
            return base
        try:
            return base.with_overrides(**overrides)
        except ValueError as e:
            raise ValidationError(str(e)) from e


def build_run_config(args) -> RunConfig:
    """RunConfig from parsed argparse flags"""
    window = None
    if args.window:
        try:
            window = parse_window(args.window)
        except ValueError as e:
            raise ValidationError(str(e)) from e
    return RunConfig(
        command=args.command,
        operator_text=args.op,
        gamma=parse_gamma(args.gamma) if args.gamma is not None else 2.0,
        gamma_range=parse_gamma_range(args.gamma_range) if args.gamma_range else None,
        sign=args.sign,
        window=window,
        tol=args.tol,
        output_path=args.out,
        format=args.format,
        root_order=args.root_order,
    )


def _sign_label(sign: int) -> str:
    return 'plus' if sign == 1 else 'minus'


def _emit(run: RunConfig, cfg: HsolvConfig, payload: Dict[str, Any], table: pd.DataFrame,
          summary: Optional[Dict[str, Any]] = None):
    if run.format == 'tabular':
        text = render_table(table, summary)
    else:
        report = build_report(run.command, run.operator_text, payload, cfg.export_config(),
                              cfg.SCHEMA_VERSION)
        text = render_report(report)
    write_output(text, run.output_path)


def _generic_operator(run: RunConfig, cfg: HsolvConfig) -> Tuple[NCPolynomial, GenericityReport]:
    P = parse_operator(run.operator_text)
    generic = check_generic(P, cfg=cfg)
    return P, generic


def _non_generic(run: RunConfig, cfg: HsolvConfig, generic: GenericityReport) -> int:
    logger.warning(f"⚠️ {run.command}: operator is not generic, nothing further to compute")
    payload = {'genericity': generic.to_record(), 'verdict': None}
    table = pd.DataFrame([{'reason': r} for r in generic.reasons], columns=['reason'])
    _emit(run, cfg, payload, table, {'generic': False})
    return NonGenericError.exit_code


def cmd_classify(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P, generic = _generic_operator(run, cfg)
    if not generic.is_generic:
        return _non_generic(run, cfg, generic)
    verdict = classify(P, cfg)
    record = verdict.to_record()
    payload = {
        'genericity': generic.to_record(),
        'roots': record['roots'],
        'counts': record['counts'],
        'verdict': record['status'],
        'reasons': record['reasons'],
        'unverified_hypothesis': record['unverified_hypothesis'],
        'diagnostics': record['diagnostics'],
    }
    table = pd.DataFrame([{'j': j, 'gamma': z} for j, z in enumerate(verdict.roots)],
                         columns=['j', 'gamma'])
    p_pos, p_neg, n = verdict.root_counts
    _emit(run, cfg, payload, table, {'verdict': record['status'], 'p_pos': p_pos,
                                     'p_neg': p_neg, 'n': n})
    logger.info(f"⚖️ Verdict: {record['status']}")
    return 0


def cmd_roots(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P, generic = _generic_operator(run, cfg)
    if not generic.is_generic:
        return _non_generic(run, cfg, generic)
    roots = characteristic_roots(P, cfg)
    p_pos, p_neg, n = root_counts(roots, cfg.DECAY_RE_THRESHOLD)
    payload = {
        'genericity': generic.to_record(),
        'roots': list(roots),
        'counts': {'p_pos': p_pos, 'p_neg': p_neg, 'n': n},
    }
    table = pd.DataFrame([{'j': j, 'gamma': z} for j, z in enumerate(roots)], columns=['j', 'gamma'])
    _emit(run, cfg, payload, table, {'p_pos': p_pos, 'p_neg': p_neg, 'n': n})
    return 0


def cmd_exponents(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P, generic = _generic_operator(run, cfg)
    if not generic.is_generic:
        return _non_generic(run, cfg, generic)
    per_sign: Dict[str, List[Dict[str, Any]]] = {}
    rows: List[Dict[str, Any]] = []
    for sign in run.signs:
        table = coefficient_table(realize(P, sign), cfg)
        frame = build_frame(table.roots, cfg.ROOT_GAP_TOL)
        records = exponents(table, frame, run.gamma, cfg).to_records()
        per_sign[_sign_label(sign)] = records
        rows.extend({'sign': _sign_label(sign), **{k: v for k, v in r.items() if k != 'gamma_param'}}
                    for r in records)
    payload = {'gamma_param': run.gamma, 'exponents': per_sign}
    _emit(run, cfg, payload, pd.DataFrame(rows), {'gamma_param': 'inf' if run.gamma is None else run.gamma})
    return 0


def cmd_basis(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P, generic = _generic_operator(run, cfg)
    if not generic.is_generic:
        return _non_generic(run, cfg, generic)
    per_sign: Dict[str, Any] = {}
    rows: List[Dict[str, Any]] = []
    for sign in run.signs:
        basis = canonical_basis(P, sign, run.gamma, cfg.WINDOW, cfg)
        records = basis.to_records()
        per_sign[_sign_label(sign)] = {
            'indices': list(basis.indices),
            'g_bound_ratio': {str(k): v for k, v in basis.g_bound_ratio.items()},
            'w_bound_ratio': basis.w_bound_ratio,
            'jets': records,
        }
        rows.extend({'sign': _sign_label(sign), **r} for r in records)
        logger.info(f"🧬 Basis sign {sign:+d}: {len(basis.indices)} solutions on {len(basis.t_grid)} points")
    payload = {'gamma_param': run.gamma, 'window': list(cfg.WINDOW), 'basis': per_sign}
    frame = pd.DataFrame(rows, columns=['sign', 't', 'k', 'j', 'log_abs', 'phase'])
    _emit(run, cfg, payload, frame)
    return 0


def cmd_scan(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P, generic = _generic_operator(run, cfg)
    if not generic.is_generic:
        return _non_generic(run, cfg, generic)
    scan = cfg.get_scan_config()
    lo, hi = scan['interval']
    frames, scans, summary = [], {}, {}
    for sign in run.signs:
        result = gamma_scan(P, sign, (lo, hi), scan['grid_size'], cfg.SIGMA_TOL, cfg, cfg.WINDOW)
        label = _sign_label(sign)
        scans[label] = result.to_record()
        frames.append(result.to_frame().assign(sign=label))
        summary[f'limit_point_{label}'] = result.limit_point
    summary['limit_point'] = any(v for v in summary.values())
    table = pd.concat(frames, ignore_index=True)[['sign', 'gamma', 'sigma_min', 'p', 'q']]
    _emit(run, cfg, {'interval': [lo, hi], 'scans': scans, 'limit_point': summary['limit_point']},
          table, summary)
    return 0


def cmd_verify(run: RunConfig) -> int:
    cfg = run.to_hsolv_config()
    P = parse_operator(run.operator_text)
    gamma = 2.0 if run.gamma is None else run.gamma
    results: Dict[str, Dict[str, Dict[str, Any]]] = {}
    for sign in run.signs:
        results[_sign_label(sign)] = run_suite(P, sign, gamma, cfg.WINDOW, cfg, run.root_order)
    all_passed = all(r['passed'] for suite in results.values() for r in suite.values())

    if run.format == 'tabular':
        blocks = []
        for label, suite in results.items():
            blocks.append(f"# sign={label}")
            blocks.append(format_check_lines(suite))
            bounds = suite.get('integral_bounds', {}).get('detail')
            if isinstance(bounds, dict) and bounds.get('table'):
                sweep_free = [{k: v for k, v in row.items() if k != 'sweep'} for row in bounds['table']]
                blocks.append(render_table(pd.DataFrame(sweep_free)).rstrip('\n'))
        write_output("\n".join(blocks), run.output_path)
    else:
        report = build_report(run.command, run.operator_text,
                              {'gamma_param': gamma, 'root_order': run.root_order,
                               'passed': all_passed, 'checks': results},
                              cfg.export_config(), cfg.SCHEMA_VERSION)
        write_output(render_report(report), run.output_path)

    failed = [f"{label}:{name}" for label, suite in results.items()
              for name, r in suite.items() if not r['passed']]
    if failed:
        logger.error(f"❌ Verification failed: {', '.join(failed)}")
        return 4
    logger.info("✅ All invariant checks passed")
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'classify': cmd_classify,
    'roots': cmd_roots,
    'exponents': cmd_exponents,
    'basis': cmd_basis,
    'scan': cmd_scan,
    'verify': cmd_verify,
}


def run_command(run: RunConfig) -> int:
    return COMMANDS[run.command](run)
