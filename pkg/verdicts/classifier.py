"""
Solvability verdicts from root counts, Schwartz matching at γ = ∞ and γ-scans
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from algebra.ncpoly import NCPolynomial
from algebra.roots import check_generic
from config import config as default_config, HsolvConfig
from kernel.matching import gamma_scan, schwartz_match
from utils.errors import HsolvError

logger = logging.getLogger(__name__)


class VerdictStatus(str, Enum):
    NOT_SOLVABLE_PROVEN = 'NOT_SOLVABLE_PROVEN'
    SOLVABLE_CONDITIONAL = 'SOLVABLE_CONDITIONAL'
    NOT_SOLVABLE_EVIDENCE = 'NOT_SOLVABLE_EVIDENCE'
    INCONCLUSIVE = 'INCONCLUSIVE'


UNVERIFIED_HYPOTHESIS = ("local solvability of the top-grade operator P_n, inferred only from "
                         "numerically empty Schwartz kernels of the adjoint γ = ∞ operators")


@dataclass
class Verdict:
    status: VerdictStatus
    reasons: List[Dict[str, Any]] = field(default_factory=list)
    root_counts: Tuple[int, int, int] = (0, 0, 0)
    roots: Tuple[complex, ...] = ()
    unverified_hypothesis: Optional[str] = None
    diagnostics: List[str] = field(default_factory=list)

    def to_record(self) -> Dict[str, Any]:
        p_pos, p_neg, n = self.root_counts
        return {
            'status': self.status.value,
            'counts': {'p_pos': p_pos, 'p_neg': p_neg, 'n': n},
            'roots': [[z.real, z.imag] for z in self.roots],
            'reasons': self.reasons,
            'unverified_hypothesis': self.unverified_hypothesis,
            'diagnostics': self.diagnostics,
        }


def root_counts(roots, threshold: float) -> Tuple[int, int, int]:
    p_pos = sum(1 for z in roots if z.real > threshold)
    p_neg = sum(1 for z in roots if z.real < -threshold)
    return p_pos, p_neg, len(roots)


def classify(P: NCPolynomial, cfg: HsolvConfig = None) -> Verdict:
    """Decision ladder: count criterion, empty kernels at γ = ∞, scan evidence, otherwise inconclusive"""
    cfg = cfg or default_config
    threshold = cfg.DECAY_RE_THRESHOLD
    try:
        generic = check_generic(P, cfg=cfg)
    except HsolvError as e:
        return Verdict(VerdictStatus.INCONCLUSIVE, diagnostics=[f"genericity check failed: {e}"])
    if not generic.is_generic:
        return Verdict(VerdictStatus.INCONCLUSIVE, reasons=[{
            'criterion': 'genericity',
            'inputs': {'monic_defect': [generic.monic_defect.real, generic.monic_defect.imag]},
            'numbers': {'min_root_gap': generic.min_root_gap},
            'detail': list(generic.reasons),
        }], roots=generic.roots)

    roots = generic.roots
    p_pos, p_neg, n = root_counts(roots, threshold)
    verdict = Verdict(VerdictStatus.INCONCLUSIVE, root_counts=(p_pos, p_neg, n), roots=roots)
    all_off_axis = p_pos + p_neg == n
    half = Fraction(n, 2)

    count_fired = all_off_axis and max(p_pos, p_neg) > half
    verdict.reasons.append({
        'criterion': 'root_count',
        'inputs': {'threshold': threshold, 'nonzero_real_parts': all_off_axis},
        'numbers': {'p_pos': p_pos, 'p_neg': p_neg, 'half_n': str(half)},
        'fired': count_fired,
    })
    if count_fired:
        verdict.status = VerdictStatus.NOT_SOLVABLE_PROVEN
        logger.info(f"⛔ Count criterion fired: max({p_pos}, {p_neg}) > {half}")
        return verdict
    if not all_off_axis:
        verdict.diagnostics.append("characteristic roots with zero real part; the ladder stops here")
        logger.info("❔ Roots on the imaginary axis, verdict inconclusive")
        return verdict

    try:
        matches = {sign: schwartz_match(P, sign, None, cfg.SIGMA_TOL, cfg) for sign in (1, -1)}
        empty = all(m.sigma_min >= cfg.SIGMA_TOL for m in matches.values())
        verdict.reasons.append({
            'criterion': 'schwartz_kernel_at_infinity',
            'inputs': {'tol': cfg.SIGMA_TOL},
            'numbers': {('plus' if s == 1 else 'minus'): m.to_record() for s, m in matches.items()},
            'fired': empty,
        })
        if empty:
            verdict.status = VerdictStatus.SOLVABLE_CONDITIONAL
            verdict.unverified_hypothesis = UNVERIFIED_HYPOTHESIS
            logger.info("✅ Both adjoint kernels at γ = ∞ are numerically empty")
            return verdict

        scans = {sign: gamma_scan(P, sign, cfg=cfg) for sign in (1, -1)}
        flagged = any(s.limit_point for s in scans.values())
        verdict.reasons.append({
            'criterion': 'gamma_scan',
            'inputs': cfg.get_scan_config() | {'interval': list(cfg.SCAN['interval'])},
            'numbers': {('plus' if s == 1 else 'minus'): {'dip_counts': r.dip_counts,
                                                           'limit_point': r.limit_point}
                        for s, r in scans.items()},
            'fired': flagged,
        })
        if flagged:
            verdict.status = VerdictStatus.NOT_SOLVABLE_EVIDENCE
            logger.info("🔻 γ-scan suggests an accumulating set of kernel candidates")
    except HsolvError as e:
        logger.error(f"❌ Numerical stage failed, verdict inconclusive: {e}")
        verdict.diagnostics.append(f"{type(e).__name__}: {e}")
    return verdict
