#!/usr/bin/env python3
"""
Transverse Report Pipeline
Runs the engines on a braid, derives the obstruction ledger and sweeps braid families
"""

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from joblib import Parallel, delayed

from .braid import BraidWord, FamilyTemplate, format_braid, parse_braid, parse_family, self_linking, word_key, writhe
from .cache import ResultCache
from .config import TransverseConfig
from .errors import DiagramError, GradingMismatchError, ResourceLimitExceeded
from .exactalg import CoefficientRing
from .fdtc import FdtcAnalyzer
from .homfly import (LaurentPoly2, ObstructionVerdict, a_degree, homfly, msl_upper_bound,
                     whole_link_psi_obstruction)
from .khovanov import PsiStatus, element_from_json, verify_certificate
from .skeinstab import peeled_psi_verdict, stability_threshold, sub_twist_shape
from .tangle import from_braid

UNDECIDED = 'undecided'
STABLE_METHOD = 'stable (sub-full-twist)'
COMPUTED_METHOD = 'computed'


@dataclass(frozen=True)
class LedgerRule:
    id: str
    premises: Tuple[str, ...]
    conclusion: str
    citation: str


LEDGER_RULES: Tuple[LedgerRule, ...] = (
    LedgerRule('R1', ('psi nonzero over some ring', 'psi-prime nonzero'), 'right_veering',
               'a braid that is not right-veering has vanishing psi and psi-prime'),
    LedgerRule('R2', ('psi zero over some ring', 'psi-prime zero'), 'not_quasipositive',
               'a quasipositive braid has non-vanishing psi and psi-prime'),
    LedgerRule('R3', ('writhe < 0',), 'not_quasipositive',
               'a braid of negative writhe cannot be quasipositive'),
    LedgerRule('R4', ('FDTC >= 1',), 'right_veering',
               'a fractional Dehn twist coefficient of at least one implies right-veering'),
    LedgerRule('R5', ('psi vanishes on every representative',), 'no_quasipositive_representative',
               'a link with no transverse representative of non-vanishing psi has no quasipositive braid'),
)

RULES_BY_ID = {rule.id: rule for rule in LEDGER_RULES}
NOT_QUASIPOSITIVE = ('not_quasipositive', 'no_quasipositive_representative')


@dataclass(frozen=True)
class LedgerFact:
    rule: str
    conclusion: str
    premises: Tuple[str, ...]
    citation: str

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.rule, 'conclusion': self.conclusion,
                'premises': list(self.premises), 'citation': self.citation}


@dataclass
class ReportOptions:
    rings: Tuple[CoefficientRing, ...] = (CoefficientRing.INTEGER,)
    psi_prime: bool = True
    homfly: bool = False
    whole_link: bool = False
    fdtc: bool = True
    fdtc_k_max: int = 2
    msl_bound: Optional[int] = None
    marked: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rings': [r.value for r in self.rings],
            'psi_prime': self.psi_prime,
            'homfly': self.homfly,
            'whole_link': self.whole_link,
            'fdtc': self.fdtc,
            'fdtc_k_max': self.fdtc_k_max,
            'msl_bound': self.msl_bound,
            'marked': self.marked,
        }


@dataclass
class TransverseReport:
    word: str
    strands: int
    writhe: int
    self_linking: int
    psi: Dict[str, str] = field(default_factory=dict)
    psi_prime: Optional[str] = None
    homfly: Optional[Dict[str, Any]] = None
    whole_link: Optional[Dict[str, Any]] = None
    fdtc: Optional[Dict[str, Any]] = None
    facts: List[str] = field(default_factory=list)
    ledger: List[LedgerFact] = field(default_factory=list)
    undecided: List[str] = field(default_factory=list)
    divergence: bool = False
    method: str = COMPUTED_METHOD
    duration: float = 0.0
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    @property
    def conclusions(self) -> List[str]:
        return sorted({fact.conclusion for fact in self.ledger})

    @property
    def quasipositive(self) -> str:
        """'no' when some rule rules quasipositivity out, otherwise 'undetermined'"""
        return 'no' if any(c in NOT_QUASIPOSITIVE for c in self.conclusions) else 'undetermined'

    @property
    def right_veering(self) -> str:
        return 'yes' if 'right_veering' in self.conclusions else '?'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'word': self.word,
            'strands': self.strands,
            'writhe': self.writhe,
            'self_linking': self.self_linking,
            'psi': dict(self.psi),
            'psi_prime': self.psi_prime,
            'homfly': self.homfly,
            'whole_link': self.whole_link,
            'fdtc': self.fdtc,
            'facts': list(self.facts),
            'ledger': [fact.to_dict() for fact in self.ledger],
            'quasipositive': self.quasipositive,
            'right_veering': self.right_veering,
            'undecided': list(self.undecided),
            'divergence': self.divergence,
            'method': self.method,
            'duration': self.duration,
            'timestamp': self.timestamp,
        }


def derive_ledger(report: TransverseReport) -> List[LedgerFact]:
    """Fire every rule whose premise facts are present in the report"""
    ledger: List[LedgerFact] = []

    def fire(rule_id: str, premises: Sequence[str]):
        rule = RULES_BY_ID[rule_id]
        ledger.append(LedgerFact(rule.id, rule.conclusion, tuple(premises), rule.citation))

    nonzero = [f for f in report.facts if f.startswith('psi') and f.endswith('=nonzero')]
    if nonzero:
        fire('R1', nonzero)
    zero = [f for f in report.facts if f.startswith('psi') and f.endswith('=zero')]
    if zero:
        fire('R2', zero)
    negative = [f for f in report.facts if f.startswith('writhe=') and f.endswith('<0')]
    if negative:
        fire('R3', negative)
    twisting = [f for f in report.facts if f.startswith('fdtc') and f.endswith('>=1')]
    if twisting:
        fire('R4', twisting)
    if 'whole_link=all_representatives_vanish' in report.facts:
        fire('R5', ['whole_link=all_representatives_vanish'])
    return ledger


class ReportPipeline:
    """Assembles transverse reports and family sweeps"""

    def __init__(self, config: Optional[TransverseConfig] = None, cache: Optional[ResultCache] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()
        if cache is None and self.config.CACHE_DIR:
            cache = ResultCache(self.config.CACHE_DIR, self.config)
        self.cache = cache

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

    # -- cached engine calls -----------------------------------------------

    def _cached_verdict(self, w: BraidWord, key: Dict[str, Any], reduced: bool,
                        marked: Optional[int]) -> Optional[Dict[str, Any]]:
        """Cached psi verdict, re-verifying zero certificates before reuse"""
        if self.cache is None:
            return None
        entry = self.cache.get(key)
        if entry is None:
            return None
        payload = entry.value
        if payload.get('status') != PsiStatus.ZERO.value:
            return payload
        try:
            ring = CoefficientRing(payload['ring'])
            phi = element_from_json(from_braid(w), ring, payload['certificate'] or [], reduced, marked)
            if verify_certificate(w, phi, self.config):
                return payload
        except (DiagramError, GradingMismatchError, KeyError) as e:
            self.logger.warning(f"⚠️ Cached certificate unreadable: {e}")
        self.logger.warning(f"⚠️ Cached certificate for {format_braid(w)} rejected, recomputing")
        self.cache.delete(key)
        return None

    def psi_verdict(self, w: BraidWord, ring: CoefficientRing) -> Dict[str, Any]:
        """psi verdict as a dictionary, served from the cache when a valid entry exists"""
        key = None
        if self.cache is not None:
            key = self.cache.make_key('psi', strands=w.strands, word=format_braid(w), ring=ring.value)
            cached = self._cached_verdict(w, key, False, None)
            if cached is not None:
                return cached
        verdict = peeled_psi_verdict(w, ring, self.config).to_dict()
        if key is not None:
            self.cache.put(key, verdict)
        return verdict

    def psi_prime_verdict(self, w: BraidWord, marked: Optional[int] = None) -> Dict[str, Any]:
        marked = marked or self.config.MARKED_STRAND
        key = None
        if self.cache is not None:
            key = self.cache.make_key('psiprime', strands=w.strands, word=format_braid(w), marked=marked)
            cached = self._cached_verdict(w, key, True, marked)
            if cached is not None:
                return cached
        verdict = peeled_psi_verdict(w, CoefficientRing.GF2, self.config, reduced=True, marked=marked).to_dict()
        if key is not None:
            self.cache.put(key, verdict)
        return verdict

    def psi_status(self, w: BraidWord, ring: CoefficientRing) -> str:
        return self.psi_verdict(w, ring)['status']

    def psi_prime_status(self, w: BraidWord, marked: Optional[int] = None) -> str:
        return self.psi_prime_verdict(w, marked)['status']

    def homfly_data(self, w: BraidWord) -> Dict[str, Any]:
        key = None
        if self.cache is not None:
            key = self.cache.make_key('homfly', word=word_key(w))
            entry = self.cache.get(key)
            if entry is not None:
                P = LaurentPoly2.from_json(entry.value)
                return self._homfly_payload(P)
        P = homfly(w, self.config)
        if key is not None:
            self.cache.put(key, P.to_json())
        return self._homfly_payload(P)

    @staticmethod
    def _homfly_payload(P: LaurentPoly2) -> Dict[str, Any]:
        return {'polynomial': str(P), 'terms': P.to_json(), 'deg_a': a_degree(P),
                'msl_bound': msl_upper_bound(P)}

    # -- reports -----------------------------------------------------------

    def run(self, w: BraidWord, options: Optional[ReportOptions] = None,
            known: Optional[Dict[str, str]] = None, method: str = COMPUTED_METHOD) -> TransverseReport:
        """
        Build the report of one braid

        Args:
            w: Braid word
            options: Engines to run
            known: Verdicts taken from elsewhere instead of computed, keyed by
                ring value for psi and 'prime' for psi-prime
            method: Provenance label of the psi verdicts

        Returns:
            TransverseReport with its ledger derived from the observed facts
        """
        options = options or ReportOptions()
        known = known or {}
        start_time = time.time()
        text = format_braid(w) or '(empty)'
        self.logger.info(f"🔄 Building transverse report for {text} on {w.strands} strands")

        report = TransverseReport(format_braid(w), w.strands, writhe(w), self_linking(w), method=method)
        if report.writhe < 0:
            report.facts.append(f"writhe={report.writhe}<0")

        for ring in options.rings:
            if ring.value in known:
                report.psi[ring.value] = known[ring.value]
                if known[ring.value] == UNDECIDED:
                    report.undecided.append(f"psi[{ring.value}]")
            else:
                try:
                    report.psi[ring.value] = self.psi_status(w, ring)
                except ResourceLimitExceeded as e:
                    self.logger.warning(f"⚠️ psi over {ring.value} undecided: {e}")
                    report.psi[ring.value] = UNDECIDED
                    report.undecided.append(f"psi[{ring.value}]")
            if report.psi[ring.value] != UNDECIDED:
                report.facts.append(f"psi[{ring.value}]={report.psi[ring.value]}")

        if options.psi_prime:
            if 'prime' in known:
                report.psi_prime = known['prime']
                if known['prime'] == UNDECIDED:
                    report.undecided.append('psi_prime')
            else:
                try:
                    report.psi_prime = self.psi_prime_status(w, options.marked)
                except ResourceLimitExceeded as e:
                    self.logger.warning(f"⚠️ psi-prime undecided: {e}")
                    report.psi_prime = UNDECIDED
                    report.undecided.append('psi_prime')
            if report.psi_prime != UNDECIDED:
                report.facts.append(f"psi_prime={report.psi_prime}")

        decided = {v for v in report.psi.values() if v != UNDECIDED}
        if report.psi_prime not in (None, UNDECIDED) and decided and decided != {report.psi_prime}:
            report.divergence = True
            self.logger.warning(f"⚠️ psi and psi-prime disagree on {text}: {report.psi} vs {report.psi_prime}")

        if options.fdtc:
            report.fdtc = FdtcAnalyzer(self.config).summary(w, options.fdtc_k_max)
            report.facts.extend(self._fdtc_facts(report.fdtc))

        if options.homfly:
            try:
                report.homfly = self.homfly_data(w)
            except ResourceLimitExceeded as e:
                self.logger.warning(f"⚠️ HOMFLY-PT undecided: {e}")
                report.homfly = {'status': UNDECIDED}
                report.undecided.append('homfly')

        if options.whole_link:
            try:
                obstruction = whole_link_psi_obstruction(w, options.msl_bound, config=self.config)
                report.whole_link = obstruction.to_dict()
                if obstruction.verdict is ObstructionVerdict.ALL_REPRESENTATIVES_VANISH:
                    report.facts.append('whole_link=all_representatives_vanish')
            except ResourceLimitExceeded as e:
                self.logger.warning(f"⚠️ Whole-link obstruction undecided: {e}")
                report.whole_link = {'verdict': UNDECIDED}
                report.undecided.append('whole_link')

        report.ledger = derive_ledger(report)
        report.duration = time.time() - start_time
        self.logger.info(f"🎯 Quasipositive: {report.quasipositive}, right-veering: {report.right_veering}")
        self.logger.info(f"✅ Report completed in {report.duration:.2f} seconds")
        return report

    @staticmethod
    def _fdtc_facts(summary: Dict[str, Any]) -> List[str]:
        facts = []
        pattern = summary.get('pattern')
        if pattern is not None and _fraction(pattern) >= 1:
            facts.append(f"fdtc_pattern={pattern}>=1")
        # floor(beta^k) / k never exceeds the FDTC
        sequence = summary.get('floor_sequence')
        if isinstance(sequence, list) and sequence:
            best = max(_fraction(x) for x in sequence)
            if best >= 1:
                facts.append(f"fdtc_floor_bound={best}>=1")
        return facts

    # -- family sweeps -----------------------------------------------------

    def family_sweep(self, template: FamilyTemplate, options: Optional[ReportOptions] = None,
                     use_stability: bool = False) -> 'FamilySweepResult':
        """
        Report on every member of a family, fanning cells out over the worker budget

        With use_stability, members far enough past the sub-full-twist
        threshold reuse the psi verdicts of the last computed member.
        """
        options = options or ReportOptions()
        params = template.parameters()
        self.logger.info(f"🔄 Sweeping family {template.name or format_braid(template.base)} "
                         f"over k = {params[0]}..{params[-1]}")

        stability = None
        cutoff = None
        if use_stability:
            stability = self.stability_info(template)
            if stability is None:
                self.logger.warning("⚠️ Insert is not a sub-full twist, computing every cell")
            else:
                cutoff = stability['first_stable_parameter'] + self.config.STABILITY_MARGIN

        computed = params if cutoff is None else [k for k in params if k <= cutoff] or params[:1]
        n_jobs = min(self.config.WORKERS, len(computed))
        reports = Parallel(n_jobs=n_jobs)(
            delayed(_sweep_cell)(template.instantiate(k), options, self.config) for k in computed
        )
        by_k = dict(zip(computed, reports))

        if len(computed) < len(params):
            reference = by_k[computed[-1]]
            known = dict(reference.psi)
            if reference.psi_prime is not None:
                known['prime'] = reference.psi_prime
            for k in params:
                if k not in by_k:
                    by_k[k] = self.run(template.instantiate(k), options, known, STABLE_METHOD)

        result = FamilySweepResult(template.name, format_braid(template.base), format_braid(template.insert),
                                   template.strands, stability)
        for k in params:
            result.add(k, by_k[k])
        self.logger.info(f"✅ Sweep finished: {len(computed)} computed, {len(params) - len(computed)} stable")
        return result

    def stability_info(self, template: FamilyTemplate) -> Optional[Dict[str, Any]]:
        shape = sub_twist_shape(template.insert)
        if shape is None:
            return None
        a, i, sign, rows = shape
        try:
            report = stability_threshold(template.base, a, i, sign)
        except ValueError as e:
            self.logger.warning(f"⚠️ No stability threshold for this family: {e}")
            return None
        info = report.to_dict()
        info['rows_per_insert'] = rows
        info['first_stable_parameter'] = report.first_stable_parameter(rows)
        return info


def _fraction(text: Any) -> Fraction:
    return Fraction(str(text))


def _sweep_cell(w: BraidWord, options: ReportOptions, config: TransverseConfig) -> TransverseReport:
    return ReportPipeline(config).run(w, options)


@dataclass
class FamilySweepResult:
    name: str
    base: str
    insert: str
    strands: int
    stability: Optional[Dict[str, Any]] = None
    rows: List[Dict[str, Any]] = field(default_factory=list)
    reports: Dict[int, TransverseReport] = field(default_factory=dict)

    def add(self, k: int, report: TransverseReport):
        self.reports[k] = report
        row: Dict[str, Any] = {'k': k, 'word': report.word, 'writhe': report.writhe,
                               'self_linking': report.self_linking}
        for ring, status in report.psi.items():
            row[f"psi_{ring}"] = status
        if report.psi_prime is not None:
            row['psi_prime'] = report.psi_prime
        row['quasipositive'] = report.quasipositive
        row['right_veering'] = report.right_veering
        row['method'] = report.method
        if self.stability is not None:
            row['past_threshold'] = k >= self.stability['first_stable_parameter']
        self.rows.append(row)

    def undecided(self) -> bool:
        return any(report.undecided for report in self.reports.values())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows).set_index('k')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'base': self.base,
            'insert': self.insert,
            'strands': self.strands,
            'stability': self.stability,
            'rows': self.rows,
            'reports': {str(k): report.to_dict() for k, report in self.reports.items()},
        }


def transverse_report(w: BraidWord, options: Optional[ReportOptions] = None,
                      config: Optional[TransverseConfig] = None) -> TransverseReport:
    return ReportPipeline(config).run(w, options)


def family_sweep(template: FamilyTemplate, options: Optional[ReportOptions] = None,
                 use_stability: bool = False, config: Optional[TransverseConfig] = None) -> FamilySweepResult:
    return ReportPipeline(config).family_sweep(template, options, use_stability)


# -- catalogs ----------------------------------------------------------------

@dataclass(frozen=True)
class TableFamily:
    """A braid family of the obstruction table with its recorded columns"""

    name: str
    template: FamilyTemplate
    writhe_base: int
    writhe_slope: int
    psi: Optional[str]
    psi_prime: Optional[str]
    quasipositive: str
    right_veering: str

    def writhe(self, k: int) -> int:
        return self.writhe_base + self.writhe_slope * k


def _family(name: str, base: str, insert: str, strands: int, k_min: int, k_max: int,
            writhe_base: int, writhe_slope: int, psi: Optional[str], psi_prime: Optional[str],
            quasipositive: str, right_veering: str) -> TableFamily:
    template = parse_family(base, insert, strands, k_min, k_max, name)
    return TableFamily(name, template, writhe_base, writhe_slope, psi, psi_prime, quasipositive, right_veering)


TABLE_FAMILIES: Tuple[TableFamily, ...] = (
    _family('b3-twist-s2', 'FT', '-2', 3, 5, 8, 6, -1, 'zero', 'zero', 'no for k > 6', 'yes'),
    _family('b3-twist-s1-s2', 'FT 1', '-2', 3, 0, 8, 7, -1, 'nonzero', 'nonzero', 'no for k > 7', 'yes'),
    _family('b4-twist-s2', 'FT', '-2', 4, 1, 13, 12, -1, 'nonzero', 'nonzero', 'no for k > 12', 'yes'),
    _family('b4-twist-s3', 'FT', '-3', 4, 1, 9, 12, -1, None, 'nonzero', 'no for k > 12', 'yes'),
    _family('b4-palindrome-s3', '1 2 3 3 2 1', '-3', 4, 3, 6, 6, -1, 'zero', 'zero', 'no for k > 6', 'yes'),
    _family('b4-twist-s2s3', 'FT', '-3 -2', 4, 6, 9, 12, -2, 'zero', 'zero', 'no for k > 6', 'yes'),
    _family('b4-positive-writhe', '1 1 -2 3 -2 -1 2 3 3', '2 3', 4, 1, 3, 3, 2, 'zero', 'zero', 'no', '?'),
    _family('b5-positive-writhe', '1 -2 3 -4 -2 -1 2 2 3 4 4', '2 3', 5, 1, 3, 3, 2, 'zero', 'zero', 'no', '?'),
    _family('b6-positive-writhe', '4 1 2 4 -5 -4 3 5 -1 2', '2 3', 6, 1, 3, 4, 2, 'zero', 'zero', 'no', '?'),
)

PRETZEL_WORDS: Dict[int, Tuple[int, str]] = {
    2: (3, '-1 (-2)^5 -1 (-2)^5'),
    4: (5, '-1 (-2)^5 -3 (-2)^5 1 2 -3 4 (-3)^3 -2 -3 -4'),
    6: (7, '-1 2 -3 -4 -3 -2 -3 4 5 6 1 -2 -3 4 5 (-4)^5 -3 (4)^5 -5 -6 2 -3 -4 -5'),
    8: (9, '-1 -2 3 -4 -5 -6 -7 -4 (-5)^5 -6 -3 -4 -5 -4 2 -3 -4 5 6 7 8 (-5)^5 '
           '6 7 5 6 1 2 -3 -4 -5 -4 3 -4 5 -6 -7 -8 -2 3'),
}

MIRROR_11N33_WORD: Tuple[int, str] = (5, '1 1 1 -2 -1 -1 3 2 2 -4 3 -4')
MIRROR_11N33_MSL = -7


def table_family(name: str) -> TableFamily:
    for family in TABLE_FAMILIES:
        if family.name == name:
            return family
    raise KeyError(f"unknown table family {name!r}; known: {', '.join(f.name for f in TABLE_FAMILIES)}")


def pretzel_word(r: int) -> BraidWord:
    if r not in PRETZEL_WORDS:
        raise KeyError(f"no braid representative stored for P({r}, -5, -5)")
    strands, text = PRETZEL_WORDS[r]
    return parse_braid(text, strands)
