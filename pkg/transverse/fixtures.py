#!/usr/bin/env python3
"""
Fixture Suite
Reference computations from the literature, rerun and checked against their recorded values
"""

import logging
import time
from datetime import datetime
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .braid import BraidWord, component_count, parse_braid
from .config import TransverseConfig
from .errors import ResourceLimitExceeded
from .exactalg import CoefficientRing
from .fdtc import FdtcAnalyzer
from .homfly import (LaurentPoly2, ObstructionVerdict, a_degree, homfly, msl_upper_bound,
                     pretzel_support_formula, top_a_coefficients, torus_homfly, whole_link_psi_obstruction)
from .khovanov import PsiStatus, load_certificate, psi_prime_vanishes, psi_vanishes, verify_certificate
from .report import MIRROR_11N33_WORD, PRETZEL_WORDS, pretzel_word
from .skeinstab import stability_threshold

CERTIFICATE_DIR = Path(__file__).parent / 'data' / 'certificates'
CERTIFICATE_NAMES = ('positive-writhe-b4', 'positive-writhe-b5', 'positive-writhe-b6')

# HOMFLY-PT polynomial of P(2, -5, -5) as (a exponent, z exponent, coefficient)
PRETZEL_2_5_5_HOMFLY = (
    (10, 0, 10), (12, 0, -13), (14, 0, 4),
    (10, 2, 39), (12, 2, -32), (14, 2, 4),
    (10, 4, 57), (12, 4, -27), (14, 4, 1),
    (10, 6, 36), (12, 6, -9),
    (10, 8, 10), (12, 8, -1),
    (10, 10, 1),
)


class FixtureSuite:
    """Runs the reference fixtures and reports per-fixture status"""

    def __init__(self, config: Optional[TransverseConfig] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()

    def _setup_logging(self) -> logging.Logger:
        """Setup logging configuration"""
        logger = logging.getLogger(__name__)
        logger.setLevel(getattr(logging, self.config.LOG_LEVEL.upper()))

        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter(self.config.LOG_FORMAT)
            handler.setFormatter(formatter)
            logger.addHandler(handler)

        return logger

    def get_fixtures(self) -> List[Dict[str, Any]]:
        """Catalog of fixtures; slow ones only run on request"""
        return [
            {'name': 'pretzel words close to knots', 'check': self.check_pretzel_knots, 'slow': False},
            {'name': 'mirror 11n33 letter bounds', 'check': self.check_mirror_bounds, 'slow': False},
            *[{'name': f'certificate {name}', 'check': partial(self.check_certificate, name), 'slow': False}
              for name in CERTIFICATE_NAMES],
            {'name': 'psi zero for twisted 3-braid', 'check': self.check_twisted_three_braid, 'slow': False},
            {'name': 'psi zero for palindromic 4-braid', 'check': self.check_palindrome_four_braid, 'slow': False},
            {'name': 'pretzel HOMFLY-PT polynomial', 'check': self.check_pretzel_homfly, 'slow': False},
            {'name': 'torus HOMFLY-PT recursion', 'check': self.check_torus_homfly, 'slow': False},
            {'name': 'sub-full-twist threshold', 'check': self.check_stability_threshold, 'slow': False},
            {'name': 'FDTC patterns', 'check': self.check_fdtc_patterns, 'slow': False},
            {'name': 'pretzel whole-link obstruction', 'check': self.check_whole_link, 'slow': True},
            {'name': 'non-vanishing 3-braid family', 'check': self.check_nonvanishing_family, 'slow': True},
            {'name': 'reduced psi of twisted 4-braid', 'check': self.check_four_braid_base_case, 'slow': True},
        ]

    # -- individual checks -------------------------------------------------

    def check_pretzel_knots(self) -> Dict[str, Any]:
        counts = {r: component_count(pretzel_word(r)) for r in PRETZEL_WORDS}
        return {'passed': all(c == 1 for c in counts.values()), 'components': counts}

    def check_mirror_bounds(self) -> Dict[str, Any]:
        strands, text = MIRROR_11N33_WORD
        bounds = FdtcAnalyzer(self.config).letter_bounds(parse_braid(text, strands))
        return {'passed': bounds.lower == 0 and bounds.upper == 0, 'bounds': bounds.to_dict()}

    def check_certificate(self, name: str) -> Dict[str, Any]:
        word, phi = load_certificate(CERTIFICATE_DIR / f"{name}.json")
        verified = verify_certificate(word, phi, self.config)
        return {'passed': verified, 'terms': len(phi.terms), 'word': str(word)}

    def _expect_psi(self, w: BraidWord, ring: CoefficientRing, expected: PsiStatus) -> Dict[str, Any]:
        verdict = psi_vanishes(w, ring, self.config)
        return {'passed': verdict.status is expected, 'status': verdict.status.value,
                'source_dim': verdict.source_dim, 'target_dim': verdict.target_dim}

    def check_twisted_three_braid(self) -> Dict[str, Any]:
        return self._expect_psi(parse_braid('1 2 2 1 (-2)^3', 3), CoefficientRing.INTEGER, PsiStatus.ZERO)

    def check_palindrome_four_braid(self) -> Dict[str, Any]:
        return self._expect_psi(parse_braid('1 2 3 3 2 1 (-3)^3', 4), CoefficientRing.INTEGER, PsiStatus.ZERO)

    def check_pretzel_homfly(self) -> Dict[str, Any]:
        P = homfly(pretzel_word(2), self.config)
        expected = LaurentPoly2.from_terms(PRETZEL_2_5_5_HOMFLY)
        return {'passed': P == expected and a_degree(P) == 14 and msl_upper_bound(P) == -15,
                'polynomial': str(P), 'deg_a': a_degree(P)}

    def check_torus_homfly(self) -> Dict[str, Any]:
        mismatches = []
        for q in range(2, 10):
            P = torus_homfly(q, self.config)
            direct = homfly(BraidWord(2, (-1,) * q), self.config)
            top = top_a_coefficients(P)
            signs_ok = all(c > 0 for c in top) or all(c < 0 for c in top)
            if P != direct or a_degree(P) != q + 1 or not signs_ok:
                mismatches.append(q)
        return {'passed': not mismatches, 'mismatches': mismatches}

    def check_stability_threshold(self) -> Dict[str, Any]:
        report = stability_threshold(parse_braid('FT', 4), 2, 2, -1)
        return {'passed': report.threshold == 6, 'threshold': report.threshold}

    def check_fdtc_patterns(self) -> Dict[str, Any]:
        analyzer = FdtcAnalyzer(self.config)
        words = ['FT (-2)^5', 'FT (-3)^5', 'FT (-3 -2)^5']
        values = {text: analyzer.pattern(parse_braid(text, 4)) for text in words}
        return {'passed': all(v == Fraction(1) for v in values.values()),
                'patterns': {k: str(v) for k, v in values.items()}}

    def check_whole_link(self) -> Dict[str, Any]:
        obstruction = whole_link_psi_obstruction(pretzel_word(2), config=self.config)
        support, _ = pretzel_support_formula(2, 5)
        passed = (obstruction.verdict is ObstructionVerdict.ALL_REPRESENTATIVES_VANISH
                  and tuple(obstruction.support) == support)
        return {'passed': passed, **obstruction.to_dict()}

    def check_nonvanishing_family(self) -> Dict[str, Any]:
        failures = []
        for k in range(0, 9):
            w = parse_braid(f"FT 1 (-2)^{k}", 3) if k else parse_braid('FT 1', 3)
            for ring in CoefficientRing:
                if psi_vanishes(w, ring, self.config).vanishes:
                    failures.append(f"k={k} ring={ring.value}")
            if psi_prime_vanishes(w, config=self.config).vanishes:
                failures.append(f"k={k} reduced")
        return {'passed': not failures, 'failures': failures}

    def check_four_braid_base_case(self) -> Dict[str, Any]:
        verdict = psi_prime_vanishes(parse_braid('FT (-3)^9', 4), config=self.config)
        return {'passed': not verdict.vanishes, 'status': verdict.status.value,
                'source_dim': verdict.source_dim, 'target_dim': verdict.target_dim}

    # -- runner ------------------------------------------------------------

    def run_fixture(self, fixture: Dict[str, Any]) -> Dict[str, Any]:
        start_time = time.time()
        check: Callable[[], Dict[str, Any]] = fixture['check']
        try:
            outcome = check()
            status = 'passed' if outcome.pop('passed') else 'failed'
        except ResourceLimitExceeded as e:
            outcome, status = {'error': str(e)}, 'undecided'
        except Exception as e:
            outcome, status = {'error': str(e)}, 'error'
        result = {'name': fixture['name'], 'status': status, 'duration': time.time() - start_time, **outcome}

        if status == 'passed':
            self.logger.info(f"    ✅ {fixture['name']}")
        elif status == 'undecided':
            self.logger.warning(f"    ⚠️ {fixture['name']}: {outcome['error']}")
        else:
            self.logger.error(f"    ❌ {fixture['name']}: {outcome.get('error', 'check failed')}")
        return result

    def run_all(self, include_slow: bool = False) -> Dict[str, Any]:
        """
        Run every fixture of the catalog

        Args:
            include_slow: Also run the fixtures marked slow

        Returns:
            Summary with an overall status and per-fixture results
        """
        suite_start_time = time.time()
        fixtures = [f for f in self.get_fixtures() if include_slow or not f['slow']]
        self.logger.info(f"🧪 Running {len(fixtures)} fixtures")

        results = []
        for i, fixture in enumerate(fixtures, 1):
            self.logger.info(f"  Fixture {i}/{len(fixtures)}: {fixture['name']}")
            results.append(self.run_fixture(fixture))

        counts = {status: sum(1 for r in results if r['status'] == status)
                  for status in ('passed', 'failed', 'undecided', 'error')}
        if counts['failed'] or counts['error']:
            overall = 'failed'
        elif counts['undecided']:
            overall = 'undecided'
        else:
            overall = 'passed'

        duration = time.time() - suite_start_time
        self.logger.info(f"📊 Fixtures: {counts['passed']}/{len(results)} passed in {duration:.2f}s")
        return {
            'overall_status': overall,
            'counts': counts,
            'skipped_slow': not include_slow,
            'individual_results': results,
            'duration': duration,
            'timestamp': datetime.now().isoformat(),
        }


def verify_reference_fixtures(include_slow: bool = False, config: Optional[TransverseConfig] = None) -> Dict[str, Any]:
    return FixtureSuite(config).run_all(include_slow)
