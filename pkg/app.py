"""
コマンドラインインターフェース - twisted KLV多項式ツールキット

折り畳みコクセター系、Hecke環のKL多項式、パラメータデータの検証、
bar作用素と標準基底、有限体モデルからの導出、セルフテストを提供します。
"""
from typing import List, Optional, Sequence
import argparse
import json
import logging
import sys

import pandas as pd

from config.settings import ensure_directories, settings
from klv.barcanon import bar_matrix, bar_matrix_oracle, canonical_basis, check_bar_matrix, check_canonical
from klv.coxeter import folded_system
from klv.errors import KlvError, UnknownName
from klv.fqmodel import build_scene, derive, trace_check, verify_counts
from klv.hecke import check_hecke_kl, hecke_kl
from klv.matrix import MElt
from klv.modact import act_word
from klv.paramdata import builtin_datum, datum_to_json, resolve_datum, save_datum, validate_datum
from klv.selftest import CHECKS, run_selftest
from models.reports import CheckResult

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def _int_list(text: str) -> List[int]:
    """"3,5,7" 形式の整数リストを解析"""
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _write(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _fail(report_json: str) -> int:
    sys.stderr.write(report_json if report_json.endswith("\n") else report_json + "\n")
    return EXIT_FAILURE


def _checked(results: Sequence[CheckResult]) -> Optional[int]:
    """失敗したチェックがあればレポートを標準エラーに出力して終了コードを返す"""
    failed = [r for r in results if not r.passed]
    if not failed:
        return None
    return _fail("\n".join(r.model_dump_json(indent=2) for r in failed))


# ============ Commands ============

def cmd_fold(args: argparse.Namespace) -> int:
    """折り畳み系の生成元と型を表示"""
    F = folded_system(args.type, args.sigma)
    frame = pd.DataFrame(
        {"m": [F.m[g] for g in F.generators], "w_omega": [F.name(F.w_omega[g]) for g in F.generators]},
        index=pd.Index(F.generators, name="generator"),
    )
    _write(frame.to_csv(sep="\t", lineterminator="\n"))
    return EXIT_OK


def cmd_hecke_kl(args: argparse.Namespace) -> int:
    """P^sigma_{y,w} の表をTSVで出力"""
    F = folded_system(args.type, args.sigma)
    table = hecke_kl(F)
    if args.check:
        status = _checked([check_hecke_kl(F, table)])
        if status is not None:
            return status
    _write(table.to_tsv())
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """パラメータデータを検証してレポートを出力"""
    report = validate_datum(resolve_datum(args.datum))
    text = report.model_dump_json(indent=2)
    if not report.passed:
        return _fail(text)
    _write(text)
    return EXIT_OK


def cmd_act(args: argparse.Namespace) -> int:
    """生成元の語をパラメータに作用させる"""
    d = resolve_datum(args.datum)
    if args.on not in d.param_ids():
        raise UnknownName(f"{d.name} has no parameter {args.on!r}")
    word = [g for g in args.word.split(",") if g]
    unknown = [g for g in word if g not in d.gen_ids()]
    if unknown:
        raise UnknownName(f"{d.name} has no generators {unknown}")
    result = act_word(d, word, MElt.basis(args.on))
    _write("\n".join(result.lines(d.param_ids())))
    return EXIT_OK


def cmd_bar(args: argparse.Namespace) -> int:
    """bar作用素の行列 R を出力"""
    d = resolve_datum(args.datum)
    R = bar_matrix_oracle(d) if args.oracle else bar_matrix(d)
    if args.check:
        status = _checked([check_bar_matrix(d, R)])
        if status is not None:
            return status
    _write(R.to_tsv())
    return EXIT_OK


def cmd_klv(args: argparse.Namespace) -> int:
    """twisted KLV多項式の表を出力"""
    d = resolve_datum(args.datum)
    R = bar_matrix(d)
    P = canonical_basis(R, d.lengths())
    if args.check:
        status = _checked([check_bar_matrix(d, R), check_canonical(R, P, d.lengths())])
        if status is not None:
            return status
    _write(P.to_tsv())
    return EXIT_OK


def cmd_builtin(args: argparse.Namespace) -> int:
    """組み込みデータをJSONで出力"""
    d = builtin_datum(args.name)
    if args.out:
        path = save_datum(d, args.out)
        _write(str(path))
    else:
        sys.stdout.write(datum_to_json(d))
    return EXIT_OK


def cmd_fq_derive(args: argparse.Namespace) -> int:
    """有限体モデルからデータを導出して保存"""
    if not args.out:
        ensure_directories()
    report = derive(args.family, args.q or settings.fq.default_samples, args.out)
    text = report.model_dump_json(indent=2)
    if not report.passed:
        return _fail(text)
    _write(text)
    return EXIT_OK


def cmd_fq_verify(args: argparse.Namespace) -> int:
    """点と軌道の個数を閉じた式と比較"""
    rows = []
    reports = [verify_counts(build_scene(args.family, q)) for q in args.q or settings.fq.default_samples]
    for report in reports:
        for check in report.checks:
            rows.append({
                "family": report.family, "q": report.q, "formula": check.formula,
                "expected": ",".join(map(str, check.expected)), "actual": ",".join(map(str, check.actual)),
                "passed": "pass" if check.passed else "FAIL",
            })
    text = pd.DataFrame(rows).to_csv(sep="\t", index=False, lineterminator="\n")
    if not all(r.passed for r in reports):
        return _fail(text)
    _write(text)
    return EXIT_OK


def cmd_fq_trace(args: argparse.Namespace) -> int:
    """パラメータから軌道関数へのトレース写像を探索"""
    report = trace_check(resolve_datum(args.datum), args.family, args.q)
    text = report.model_dump_json(indent=2)
    if not report.passed:
        return _fail(text)
    _write(text)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    """受け入れ基準をすべて実行"""
    names = [n for n in args.only.split(",") if n] if args.only else None
    report = run_selftest(names)
    text = report.model_dump_json(indent=2)
    if not report.passed:
        return _fail(text)
    _write(text)
    return EXIT_OK


# ============ Parser ============

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klv", description="Twisted KLV polynomials for quasisplit symmetric pairs")
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.log_level})")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("fold", help="folded generators and their types")
    p.add_argument("--type", required=True, help="Cartan type, e.g. A3 or A1xA1")
    p.add_argument("--sigma", default=None, help='diagram involution in cycle notation, e.g. "(1 3)"')
    p.set_defaults(handler=cmd_fold)

    p = commands.add_parser("hecke-kl", help="twisted Kazhdan-Lusztig table of W^sigma")
    p.add_argument("--type", required=True)
    p.add_argument("--sigma", default=None)
    p.add_argument("--check", action="store_true", help="verify the table before printing")
    p.set_defaults(handler=cmd_hecke_kl)

    p = commands.add_parser("validate", help="validate a datum")
    p.add_argument("--datum", required=True, help="datum file or built-in name")
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("act", help="apply a generator word to a parameter")
    p.add_argument("--datum", required=True)
    p.add_argument("--word", required=True, help="comma-separated generator ids; the last acts first")
    p.add_argument("--on", required=True, help="parameter id")
    p.set_defaults(handler=cmd_act)

    p = commands.add_parser("bar", help="matrix of the bar operator")
    p.add_argument("--datum", required=True)
    p.add_argument("--oracle", action="store_true", help="use the interpolation oracle")
    p.add_argument("--check", action="store_true")
    p.set_defaults(handler=cmd_bar)

    p = commands.add_parser("klv", help="twisted KLV polynomials of a datum")
    p.add_argument("--datum", required=True)
    p.add_argument("--check", action="store_true")
    p.set_defaults(handler=cmd_klv)

    p = commands.add_parser("builtin", help="emit a built-in datum")
    p.add_argument("--name", required=True)
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    p.set_defaults(handler=cmd_builtin)

    fq = commands.add_parser("fq", help="finite-field models").add_subparsers(dest="fq_command", required=True)
    p = fq.add_parser("derive", help="interpolate a datum from the convolution action")
    p.add_argument("--family", required=True)
    p.add_argument("--q", type=_int_list, default=None, help="sample values, e.g. 3,5,7,9")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_fq_derive)
    p = fq.add_parser("verify", help="point and orbit counts")
    p.add_argument("--family", required=True)
    p.add_argument("--q", type=_int_list, default=None)
    p.set_defaults(handler=cmd_fq_verify)
    p = fq.add_parser("trace", help="map parameters to orbit functions")
    p.add_argument("--family", required=True)
    p.add_argument("--datum", required=True)
    p.add_argument("--q", type=_int_list, default=None)
    p.set_defaults(handler=cmd_fq_trace)

    p = commands.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", default=None, help=f"comma-separated subset of {[name for name, _ in CHECKS]}")
    p.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """エントリーポイント: 終了コード 0 成功 / 1 検証・計算失敗 / 2 使用法エラー"""
    args = build_parser().parse_args(argv)
    level = (args.log_level or settings.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except KlvError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return _fail(json.dumps({"error": type(e).__name__, "detail": str(e)}, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    sys.exit(main())
