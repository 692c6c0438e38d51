#!/usr/bin/env python3
"""
Transverse Invariant CLI
Subcommands for psi verdicts, HOMFLY-PT bounds, FDTC estimates, reports, family sweeps and fixtures
"""

import argparse
import json
import sys
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

from .braid import BraidWord, format_braid, parse_braid, parse_family
from .config import TransverseConfig
from .errors import ResourceLimitExceeded, TransverseError
from .exactalg import CoefficientRing
from .fdtc import FdtcAnalyzer
from .fixtures import FixtureSuite
from .khovanov import KhovanovEngine
from .report import ReportOptions, ReportPipeline, table_family
from .skeinstab import grading_support_bounds, stability_threshold, sub_twist_shape
from .tangle import TangleDiagram, from_braid, khovanov_resolution, parse_orientations

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2

Handler = Callable[[argparse.Namespace, TransverseConfig], Tuple[Dict[str, Any], bool]]


def _word(args: argparse.Namespace) -> BraidWord:
    if args.word is None or args.strands is None:
        raise TransverseError("--word and --strands are required for this subcommand")
    return parse_braid(args.word, args.strands)


def _ring(args: argparse.Namespace) -> CoefficientRing:
    return CoefficientRing(args.ring or 'z')


def cmd_psi(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    w = _word(args)
    verdict = ReportPipeline(config).psi_verdict(w, _ring(args))
    return {'word': format_braid(w), 'strands': w.strands, 'psi': verdict}, False


def cmd_psiprime(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    w = _word(args)
    verdict = ReportPipeline(config).psi_prime_verdict(w, args.marked)
    return {'word': format_braid(w), 'strands': w.strands, 'psi_prime': verdict}, False


def cmd_homfly(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    w = _word(args)
    return {'word': format_braid(w), 'strands': w.strands, 'homfly': ReportPipeline(config).homfly_data(w)}, False


def cmd_fdtc(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    summary = FdtcAnalyzer(config).summary(_word(args), args.kmax)
    undecided = summary.get('sign') == 'undecided' or summary.get('floor') == 'undecided'
    return summary, undecided


def cmd_stability(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    beta = _word(args)
    rows = 1
    if args.insert:
        shape = sub_twist_shape(parse_braid(args.insert, beta.strands))
        if shape is None:
            raise TransverseError(f"insert {args.insert!r} is not made of sub-full-twist rows")
        a, first, sign, rows = shape
    else:
        if args.a is None or args.first is None:
            raise TransverseError("give --insert or both --a and --first")
        a, first, sign = args.a, args.first, -1 if args.sign == 'negative' else 1
    report = stability_threshold(beta, a, first, sign)
    result = {'word': format_braid(beta), 'strands': beta.strands, **report.to_dict()}
    result['rows_per_insert'] = rows
    result['first_stable_parameter'] = report.first_stable_parameter(rows)
    return result, False


def _report_options(args: argparse.Namespace) -> ReportOptions:
    rings = tuple(CoefficientRing(r) for r in (args.rings or [args.ring or 'z']))
    return ReportOptions(
        rings=rings,
        psi_prime=not args.no_psiprime,
        homfly=args.homfly,
        whole_link=args.whole_link,
        fdtc=True,
        fdtc_k_max=args.kmax,
        msl_bound=args.msl_bound,
        marked=args.marked,
    )


def cmd_report(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    report = ReportPipeline(config).run(_word(args), _report_options(args))
    return report.to_dict(), bool(report.undecided)


def cmd_family(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    if args.family:
        template = table_family(args.family).template
        if args.kmin is not None or args.kmax_family is not None:
            template = template.with_range(args.kmin if args.kmin is not None else template.k_min,
                                           args.kmax_family if args.kmax_family is not None else template.k_max)
    else:
        if args.base is None or args.insert is None or args.strands is None:
            raise TransverseError("give --family or all of --base, --insert and --strands")
        template = parse_family(args.base, args.insert, args.strands,
                                args.kmin or 0, args.kmax_family if args.kmax_family is not None else 0)
    if args.workers:
        config.WORKERS = args.workers
    result = ReportPipeline(config).family_sweep(template, _report_options(args), args.use_stability)
    if not args.json:
        print(result.to_frame().to_string())
    return result.to_dict(), result.undecided()


def cmd_fixtures(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    summary = FixtureSuite(config).run_all(args.include_slow)
    return summary, summary['overall_status'] == 'undecided'


def _resolved_diagram(args: argparse.Namespace) -> TangleDiagram:
    D = from_braid(_word(args))
    choices: List[Tuple[int, int]] = []
    for item in args.resolve or []:
        try:
            position, choice = (int(x) for x in item.split(':'))
        except ValueError:
            raise TransverseError(f"--resolve expects POS:CHOICE, got {item!r}")
        choices.append((position, choice))
    # later crossings first so earlier positions keep their numbering
    for position, choice in sorted(choices, reverse=True):
        D = khovanov_resolution(D, position, choice)
    if args.orient:
        D = D.with_orientations(parse_orientations(args.orient, len(D.components)))
    return D


def cmd_homology(args: argparse.Namespace, config: TransverseConfig) -> Tuple[Dict[str, Any], bool]:
    D = _resolved_diagram(args)
    ring = CoefficientRing.GF2 if args.reduced else _ring(args)
    engine = KhovanovEngine(D, config, reduced=args.reduced, marked=args.marked)
    box = grading_support_bounds(D, reduced=args.reduced)
    table = engine.homology_table(ring, box)
    return {'diagram': D.to_json(), 'bounds': box.to_dict(), 'homology': table.to_dict()}, False


COMMANDS: Dict[str, Handler] = {
    'psi': cmd_psi,
    'psiprime': cmd_psiprime,
    'homfly': cmd_homfly,
    'fdtc': cmd_fdtc,
    'stability': cmd_stability,
    'report': cmd_report,
    'family': cmd_family,
    'fixtures': cmd_fixtures,
    'homology': cmd_homology,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--strands', type=int, help='Number of braid strands')
    common.add_argument('--word', help='Braid word, e.g. "FT (-2)^5"')
    common.add_argument('--ring', choices=[r.value for r in CoefficientRing], help='Coefficient ring')
    common.add_argument('--orient', help='Component orientations, e.g. "1:down,2:up"')
    common.add_argument('--marked', type=int, help='Marked strand for the reduced theory')
    common.add_argument('--cache-dir', help='Directory of the persistent result cache')
    common.add_argument('--max-dim', type=int, help='Override the graded-piece dimension cap')
    common.add_argument('--json', action='store_true', help='Print JSON instead of a summary')
    common.add_argument('--output-file', help='Write the JSON result to a file')
    common.add_argument('--verbose', action='store_true', help='Enable verbose logging')

    parser = argparse.ArgumentParser(description='Transverse invariants of braid closures')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('psi', parents=[common], help='Decide whether psi vanishes')
    sub.add_parser('psiprime', parents=[common], help='Decide whether reduced psi vanishes')
    sub.add_parser('homfly', parents=[common], help='HOMFLY-PT polynomial and self-linking bound')

    fdtc = sub.add_parser('fdtc', parents=[common], help='FDTC sign, floor, bounds and pattern')
    fdtc.add_argument('--kmax', type=int, default=4, help='Powers used for the floor sequence')

    stability = sub.add_parser('stability', parents=[common], help='Sub-full-twist stability threshold')
    stability.add_argument('--insert', help='Inserted word made of sub-full-twist rows')
    stability.add_argument('--a', type=int, help='Strands twisted by the sub-full twist')
    stability.add_argument('--first', type=int, help='First generator of the sub-full twist')
    stability.add_argument('--sign', choices=['negative', 'positive'], default='negative')

    for name, text in (('report', 'Transverse report with obstruction ledger'),
                       ('family', 'Sweep a braid family')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--rings', nargs='+', choices=[r.value for r in CoefficientRing],
                       help='Rings for psi (defaults to --ring or z)')
        p.add_argument('--no-psiprime', action='store_true', help='Skip reduced psi')
        p.add_argument('--homfly', action='store_true', help='Include HOMFLY-PT data')
        p.add_argument('--whole-link', action='store_true', help='Run the whole-link obstruction')
        p.add_argument('--msl-bound', type=int, help='Known maximal self-linking number')
        p.add_argument('--kmax', type=int, default=2, help='Powers used for the FDTC floor sequence')
        if name == 'family':
            p.add_argument('--family', help='Name of a catalog family')
            p.add_argument('--base', help='Base word of a custom family')
            p.add_argument('--insert', help='Inserted word of a custom family')
            p.add_argument('--kmin', type=int, help='First family parameter')
            p.add_argument('--kmax-family', type=int, help='Last family parameter')
            p.add_argument('--workers', type=int, help='Parallel sweep workers')
            p.add_argument('--use-stability', action='store_true',
                           help='Reuse verdicts past the sub-full-twist threshold')

    fixtures = sub.add_parser('fixtures', parents=[common], help='Run the reference fixtures')
    fixtures.add_argument('--include-slow', action='store_true', help='Also run slow fixtures')

    homology = sub.add_parser('homology', parents=[common], help='Khovanov homology table')
    homology.add_argument('--resolve', action='append', help='Resolve a crossing, POS:CHOICE (repeatable)')
    homology.add_argument('--reduced', action='store_true', help='Reduced homology over GF2')

    return parser


def _configure(args: argparse.Namespace) -> TransverseConfig:
    config = TransverseConfig()
    if args.max_dim:
        config.MAX_DIM = args.max_dim
    if args.cache_dir:
        config.CACHE_DIR = args.cache_dir
    if args.verbose:
        config.LOG_LEVEL = 'DEBUG'
    return config


def _print_summary(command: str, result: Dict[str, Any]):
    if command in ('psi', 'psiprime'):
        verdict = result['psi' if command == 'psi' else 'psi_prime']
        print(f"🎯 {command}: {verdict['status']} over {verdict['ring']} "
              f"at ({verdict['grading']['i']}, {verdict['grading']['j']})")
    elif command == 'homfly':
        print(f"📊 P = {result['homfly']['polynomial']}")
        print(f"   deg_a: {result['homfly']['deg_a']}, self-linking bound: {result['homfly']['msl_bound']}")
    elif command == 'fdtc':
        print(f"📊 Sign: {result['sign']}, floor: {result['floor']}")
        print(f"   Bounds: [{result['bounds']['lower']}, {result['bounds']['upper']}], pattern: {result['pattern']}")
    elif command == 'stability':
        print(f"📊 Threshold N = {result['threshold']}, first stable parameter {result['first_stable_parameter']}")
    elif command == 'report':
        print(f"🎯 psi: {result['psi']}, psi': {result['psi_prime']}")
        print(f"   Quasipositive: {result['quasipositive']}, right-veering: {result['right_veering']}")
        for fact in result['ledger']:
            print(f"   {fact['rule']}: {fact['conclusion']} <- {', '.join(fact['premises'])}")
    elif command == 'fixtures':
        for item in result['individual_results']:
            mark = '✅' if item['status'] == 'passed' else '⚠️' if item['status'] == 'undecided' else '❌'
            print(f"   {mark} {item['name']}")
    elif command == 'homology':
        for entry in result['homology']['entries']:
            torsion = f" torsion {entry['torsion']}" if entry['torsion'] else ''
            print(f"   Kh^{entry['i']}_{entry['j']}: rank {entry['rank']}{torsion}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _configure(args)

    try:
        config.validate()
    except ValueError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_ERROR

    if not args.json:
        print(f"🚀 transverse {args.command}")
        print("=" * 60)
        if args.word is not None:
            print(f"Word: {args.word} on {args.strands} strands")
        print(f"Max dimension: {config.MAX_DIM}")
        print("=" * 60)

    start_time = time.time()
    try:
        result, undecided = COMMANDS[args.command](args, config)
        code = EXIT_OK
    except ResourceLimitExceeded as e:
        result, undecided = {'status': 'undecided', 'error': str(e), 'resource': e.resource,
                             'limit': e.limit, 'observed': e.observed}, True
        code = EXIT_UNDECIDED
    except (TransverseError, ValueError, KeyError, OSError) as e:
        result = {'status': 'failed', 'error': str(e)}
        if args.output_file:
            with open(args.output_file, 'w') as f:
                json.dump(result, f, indent=2, default=str)
        if args.json:
            print(json.dumps(result, indent=2, default=str))
        else:
            print(f"❌ {args.command} failed: {e}")
        return EXIT_ERROR

    if undecided:
        code = EXIT_UNDECIDED
    if result.get('overall_status') == 'failed':
        code = EXIT_ERROR
    result.setdefault('summary', {
        'command': args.command,
        'duration': time.time() - start_time,
        'timestamp': datetime.now().isoformat(),
        'config': config.to_dict(),
    })

    if args.json:
        print(json.dumps(result, indent=2, default=str))
    else:
        if result.get('status') == 'undecided':
            print(f"⚠️ {result['error']}")
        else:
            _print_summary(args.command, result)
        print("=" * 60)
        if code == EXIT_UNDECIDED:
            print("⚠️ UNDECIDED (resource limit)")
        elif code == EXIT_ERROR:
            print("❌ FIXTURES FAILED")
        else:
            print("✅ DONE")

    if args.output_file:
        with open(args.output_file, 'w') as f:
            json.dump(result, f, indent=2, default=str)
        if not args.json:
            print(f"\n📄 Results saved to: {args.output_file}")

    return code


if __name__ == '__main__':
    sys.exit(main())
