"""
Invariant checks behind the `verify` command

Each check returns {'passed', 'margin', 'detail'}; margin > 0 means slack left
below the tolerance.  A check that raises is recorded as failed, the others
still run.
"""
import logging
import math
from functools import cached_property
from typing import Any, Callable, Dict, Optional

import numpy as np
import sympy

from algebra.ncpoly import NCPolynomial
from algebra.roots import root_mismatch, aberth_roots, companion_roots, roots_of_symbol
from asymptotics.frame import build_frame
from asymptotics.gauge import check_ordering, exponents, gauge_residuals, reduced_system, rotate
from config import config as default_config, HsolvConfig
from kernel.basis import canonical_basis, jet_residuals
from kernel.wronskian import adjoint_kernel_basis, wronskians
from realization.coefficients import CompanionMatrix, coefficient_table
from realization.ode_realization import realize
from verdicts.estimates import estimate_report, integral_bound_harness, ray_estimate_report

logger = logging.getLogger(__name__)

ROOT_ORDERS = ('canonical', 'reversed')


def _record(passed: bool, margin: float, detail: Any) -> Dict[str, Any]:
    return {'passed': bool(passed), 'margin': float(margin), 'detail': detail}


class VerificationSuite:
    """Named invariant checks for one operator, sign and γ"""

    def __init__(self, P: NCPolynomial, sign: int = 1, gamma: complex = 2.0, window=None,
                 cfg: HsolvConfig = None, root_order: str = 'canonical'):
        if root_order not in ROOT_ORDERS:
            raise ValueError(f"root order must be one of {ROOT_ORDERS}, got {root_order!r}")
        self.P = P
        self.sign = sign
        self.gamma = gamma
        self.cfg = cfg or default_config
        self.window = window or self.cfg.WINDOW
        self.root_order = root_order
        self.checks: Dict[str, Callable[[], Dict[str, Any]]] = {
            'root_cross_validation': self.root_cross_validation,
            'root_ordering': self.root_ordering,
            'frame_identities': self.frame_identities,
            'gauge_residuals': self.gauge_residuals,
            'vieta_trace': self.vieta_trace,
            'exponent_sum': self.exponent_sum,
            'residual_decay': self.residual_decay,
            'rotation': self.rotation,
            'parity': self.parity,
            'abel_identity': self.abel_identity,
            'jet_residuals': self.jet_residuals,
            'adjoint_residuals': self.adjoint_residuals,
            'envelope': self.envelope,
            'ray_envelope': self.ray_envelope,
            'integral_bounds': self.integral_bounds,
        }
        logger.info(f"🧪 Verification suite ready: {len(self.checks)} checks, root order {root_order}")

    def run(self, names=None) -> Dict[str, Dict[str, Any]]:
        results = {}
        for name in names or self.checks:
            check = self.checks[name]
            try:
                results[name] = check()
                status = 'pass' if results[name]['passed'] else 'FAIL'
                logger.debug(f"🧪 {name}: {status} (margin {results[name]['margin']:.3g})")
            except Exception as e:
                logger.error(f"Check {name} failed: {e}")
                results[name] = {'passed': False, 'margin': float('-inf'),
                                 'detail': f'Error: {type(e).__name__}: {e}'}
        return results

    # ---- shared stages -------------------------------------------------

    @cached_property
    def table(self):
        return coefficient_table(realize(self.P, self.sign), self.cfg)

    @cached_property
    def roots(self):
        roots = tuple(self.table.roots)
        return roots[::-1] if self.root_order == 'reversed' else roots

    @cached_property
    def frame(self):
        return build_frame(self.roots, self.cfg.ROOT_GAP_TOL)

    @cached_property
    def expo(self):
        return exponents(self.table, self.frame, self.gamma, self.cfg)

    @cached_property
    def basis(self):
        return canonical_basis(self.P, self.sign, self.gamma, self.window, self.cfg)

    @cached_property
    def wronskian(self):
        return wronskians(self.basis, self.cfg)

    # ---- checks ----------------------------------------------------------

    def root_cross_validation(self) -> Dict[str, Any]:
        coeffs = self.table.symbol_coefficients()
        mismatch = root_mismatch(aberth_roots(coeffs, max_iter=self.cfg.ROOT_MAX_ITER),
                                 companion_roots(coeffs))
        tol = self.cfg.ROOT_AGREEMENT_TOL
        return _record(mismatch <= tol, tol - mismatch, {'mismatch': mismatch})

    def root_ordering(self) -> Dict[str, Any]:
        grid = np.linspace(*self.window, 64)
        check_ordering(self.expo, grid, cfg=self.cfg)
        gaps = [(self.roots[j] - self.roots[j + 1]).real for j in range(len(self.roots) - 1)]
        return _record(True, min(gaps, default=0.0), {'roots': [[z.real, z.imag] for z in self.roots]})

    def frame_identities(self) -> Dict[str, Any]:
        frame = self.frame
        companion = CompanionMatrix(self.table)
        worst = 0.0
        for t in (0.5, 1.0, 2.0, 10.0):
            S0 = frame.S0(t)
            lhs = companion.A0(t) @ S0
            diag = lhs - S0 @ frame.Lambda0(t)
            worst = max(worst, np.linalg.norm(diag) / max(np.linalg.norm(lhs), 1.0))
            det = frame.det_S0(t)
            worst = max(worst, abs(det - np.linalg.det(S0)) / max(abs(det), 1e-300))
            inv = np.linalg.inv(S0)
            worst = max(worst, np.linalg.norm(frame.S0_inv(t) - inv) / np.linalg.norm(inv))
        tol = self.cfg.FRAME_TOL
        return _record(worst <= tol, tol - worst, {'max_relative_defect': worst})

    def gauge_residuals(self) -> Dict[str, Any]:
        res = gauge_residuals(self.expo.gauge, self.frame)
        worst = max(res.values())
        tol = self.cfg.GAUGE_TOL
        return _record(worst <= tol, tol - worst, res)

    def vieta_trace(self) -> Dict[str, Any]:
        vieta = abs(self.table.vieta_defect())
        a = self.table.a_coefficients(self.gamma)
        trace_defect = abs(np.trace(self.expo.gauge.D1) - a[-1])
        worst = max(vieta, trace_defect)
        tol = self.cfg.TABLE_TOL * (1.0 + max(abs(z) for z in self.roots))
        return _record(worst <= tol, tol - worst, {'vieta_defect': vieta, 'trace_defect': trace_defect})

    def exponent_sum(self) -> Dict[str, Any]:
        a_n = self.table.a_coefficients(self.gamma)[-1]
        defect = abs(np.sum(self.expo.beta) - a_n)
        limit = float(np.max(np.abs(self.expo.beta_limit)))
        worst = max(defect, limit)
        tol = self.cfg.TABLE_TOL
        return _record(worst <= tol, tol - worst, {'sum_defect': defect, 'beta_limit_max': limit})

    def residual_decay(self) -> Dict[str, Any]:
        system = reduced_system(self.expo, cfg=self.cfg)
        ts = np.geomspace(10.0, 100.0, 24)
        scaled = np.array([np.linalg.norm(system.residual(t)) * t ** 2 for t in ts])
        head, tail = float(np.max(scaled[:12])), float(np.max(scaled[12:]))
        bound = 2.0 * head + 1e-12
        passed = all(math.isfinite(v) for v in scaled) and tail <= bound
        return _record(passed, bound - tail, {'sup_t2_norm_head': head, 'sup_t2_norm_tail': tail})

    def rotation(self) -> Dict[str, Any]:
        angle = self.cfg.SECTOR_HALF_ANGLE
        roots, rotated = rotate(self.table, angle)
        recomputed = roots_of_symbol(rotated.symbol_coefficients(), self.cfg)
        mismatch = root_mismatch(np.asarray(roots), np.asarray(recomputed))
        tol = self.cfg.ROOT_AGREEMENT_TOL
        return _record(mismatch <= tol, tol - mismatch, {'angle': angle, 'mismatch': mismatch})

    def parity(self) -> Dict[str, Any]:
        plus = self.table if self.sign == 1 else coefficient_table(realize(self.P, 1), self.cfg)
        minus = coefficient_table(realize(self.P, -1), self.cfg)
        exact = all(sympy.expand(minus.d.get(key, 0) - (-1) ** (key[0] - key[1]) * value) == 0
                    for key, value in plus.d.items())
        exact = exact and all(sympy.expand(minus.e.get(key, 0) - (-1) ** (key[0] - key[1] - key[2]) * value) == 0
                              for key, value in plus.e.items())
        exact = exact and len(minus.d) == len(plus.d) and len(minus.e) == len(plus.e)
        expo_plus = exponents(plus, build_frame(plus.roots), self.gamma, self.cfg)
        expo_minus = exponents(minus, build_frame(minus.roots), self.gamma, self.cfg)
        worst = 0.0
        for j, z in enumerate(expo_plus.roots):
            k = int(np.argmin(np.abs(expo_minus.roots + z)))
            worst = max(worst, abs(expo_minus.roots[k] + z),
                        abs(expo_minus.beta[k] - expo_plus.beta[j]))
        tol = 1e-8
        return _record(exact and worst <= tol, tol - worst, {'exact_table_law': exact, 'exponent_defect': worst})

    def abel_identity(self) -> Dict[str, Any]:
        data = self.wronskian
        tol = self.cfg.ABEL_TOL
        return _record(data.max_abel_defect <= tol, tol - data.max_abel_defect, data.to_record())

    def jet_residuals(self) -> Dict[str, Any]:
        report = jet_residuals(self.basis, self.cfg)
        return _record(report.passed, report.tol - report.max_defect, {'max_defect': report.max_defect})

    def adjoint_residuals(self) -> Dict[str, Any]:
        adj = adjoint_kernel_basis(self.basis, self.wronskian, self.cfg)
        tol = self.cfg.ADJOINT_RESIDUAL_TOL
        return _record(adj.max_residual <= tol, tol - adj.max_residual, {'max_residual': adj.max_residual})

    def envelope(self) -> Dict[str, Any]:
        report = estimate_report(self.basis, self.cfg)
        worst = max((e['sup'] / max(e['half_window_sup'], 1e-300) for e in report.entries), default=1.0)
        factor = self.cfg.ESTIMATES['extension_factor']
        return _record(report.passed, factor - worst, report.to_record())

    def ray_envelope(self) -> Dict[str, Any]:
        reports = ray_estimate_report(self.P, self.sign, self.gamma, self.cfg.SECTOR_HALF_ANGLE,
                                      self.window, self.cfg)
        worst = max((e['sup'] / max(e['half_window_sup'], 1e-300)
                     for r in reports for e in r.entries), default=1.0)
        factor = self.cfg.ESTIMATES['extension_factor']
        return _record(all(r.passed for r in reports), factor - worst,
                       {'reports': [r.to_record() for r in reports]})

    def integral_bounds(self) -> Dict[str, Any]:
        rows = []
        for gamma in (0.5, 1.0, 2.0):
            for a in (0.0, 1.0, 2.0):
                rows.append(integral_bound_harness(gamma, 0.0, a, cfg=self.cfg).to_record())
        worst = max(row['cauchy_defect'] for row in rows)
        finite = all(math.isfinite(row['growth_sup']) and math.isfinite(row['decay_sup'])
                     and math.isfinite(row['sweep_sup']) for row in rows)
        return _record(finite and worst <= 0.01, 0.01 - worst, {'table': rows})


def run_suite(P: NCPolynomial, sign: int = 1, gamma: complex = 2.0, window=None,
              cfg: HsolvConfig = None, root_order: str = 'canonical') -> Dict[str, Dict[str, Any]]:
    return VerificationSuite(P, sign, gamma, window, cfg, root_order).run()
