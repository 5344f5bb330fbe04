#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
stratscope - 主入口脚本 / command-line entry point

Exit codes: 0 success, 1 dataset problems (malformed rows or validation violations),
2 usage, I/O and analysis errors. Results go to standard output, diagnostics to
standard error.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Mapping, Optional, TextIO

# 添加项目根目录到Python路径，确保可以正确导入模块
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from dotenv import load_dotenv

from config_manager import VALID_LOG_LEVELS, build_run_config
from opentelemetry_integration import StageTracer
from src.tools.pipeline import STAGE_ORDER, SUBCOMMANDS, pending_errata, run_stage, stage_text
from src.utils.common_tools import dumps_json
from src.utils.ingest import DatasetError, MissingFileError
from src.utils.input_validation import STD_MODES, ValidationError
from src.utils.language_resources import get_available_languages, get_text, set_language
from src.utils.logging_utils import attach_stderr_handler, get_logger, set_log_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_DATASET = 1
EXIT_ERROR = 2

_EXIT_CODES = {
    "dataset": EXIT_DATASET,
    "missing_file": EXIT_ERROR,
    "io": EXIT_ERROR,
    "usage": EXIT_ERROR,
    "analysis": EXIT_ERROR,
}

SUBCOMMAND_HELP = {
    "validate": "校验数据集 / validate the dataset",
    "prevalence": "指标普及度分类 / frequencies, statistics and prevalence labels",
    "standout": "突出战略检测 / standout strategy detection",
    "stratify": "国家分层 / country strata",
    "consolidate": "整合指标集 / consolidated indicator set",
    "align": "对应矩阵与频率表 / extended matrix and frequency table",
    "patterns": "盲点与覆盖缺口 / blind spot, overflow ratios, coverage flags",
    "report": "生成报告文件 / write the report files",
    "all": "运行全部阶段并生成报告 / run every stage and write the report",
}


def build_parser() -> argparse.ArgumentParser:
    """命令行解析器 / Argument parser; flag names mirror config.json keys"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", dest="data_dir", help="数据目录 (或 STRATSCOPE_DATA_DIR) / dataset directory")
    common.add_argument("--out-dir", dest="out_dir", help="输出目录 (默认: out) / output directory")
    common.add_argument("--partial-weight", dest="partial_weight", type=float, help="部分匹配权重 [0,1]")
    common.add_argument("--std-mode", dest="std_mode", choices=list(STD_MODES), help="标准差模式 / std mode")
    common.add_argument(
        "--standout-threshold", dest="standout_threshold", help="整数或 auto / integer or 'auto'"
    )
    common.add_argument("--min-axis-coverage", dest="min_axis_coverage", type=int, help="每轴最少指标数")
    common.add_argument("--json", dest="json_output", action="store_true", help="输出JSON / machine output")
    common.add_argument("--log-level", dest="log_level", choices=VALID_LOG_LEVELS, help="日志级别 / log level")
    common.add_argument(
        "--language", dest="language", choices=get_available_languages(), help="消息语言 / message language"
    )

    parser = argparse.ArgumentParser(prog="stratscope", description="National AI strategy indicator monitoring")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subparsers.required = True
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=SUBCOMMAND_HELP[name])
    return parser


def _print_diagnostics(result: Mapping[str, Any], stderr: TextIO) -> None:
    diagnostics: List[Dict[str, Any]] = result.get("diagnostics") or []
    if result["error_type"] == "dataset":
        print(get_text("dataset_invalid", len(diagnostics)), file=stderr)
    elif result["error_type"] == "missing_file":
        for diagnostic in diagnostics:
            print(get_text("missing_file", diagnostic["file"]), file=stderr)
        return
    for diagnostic in diagnostics:
        where = diagnostic["file"]
        if diagnostic.get("line") is not None:
            where += f":{diagnostic['line']}"
        if diagnostic.get("column"):
            where += f" [{diagnostic['column']}]"
        print(f"  {where}: {diagnostic['message']}", file=stderr)
    if not diagnostics:
        key = {"io": "io_error", "usage": "usage_error"}.get(result["error_type"], "analysis_error")
        print(get_text(key, result["error"]), file=stderr)


def _emit_success(args: argparse.Namespace, result: Mapping[str, Any], out_dir: str, stdout: TextIO) -> None:
    subcommand = args.subcommand
    if subcommand == "validate":
        summary = result["summary"]
        if args.json_output:
            stdout.write(dumps_json({"valid": True, **summary}))
        else:
            print(
                get_text(
                    "dataset_valid",
                    summary["indicators"], summary["countries"], summary["matches"],
                    summary["axes"], summary["correspondences"],
                ),
                file=stdout,
            )
        return

    results = result["results"]
    if subcommand in STAGE_ORDER:
        if args.json_output:
            stdout.write(dumps_json(result["payload"]))
        else:
            print(stage_text(subcommand, results), file=stdout)
        return

    manifest = result["manifest"]
    if args.json_output:
        stdout.write(dumps_json({"stages": result["payload"], "manifest": manifest.to_dict()}))
        return
    if subcommand == "all":
        for stage in STAGE_ORDER:
            print(get_text("stage_header", stage), file=stdout)
            print(stage_text(stage, results), file=stdout)
            print("", file=stdout)
    print(get_text("report_written", len(manifest.paths), out_dir), file=stdout)


def main(
    argv: Optional[List[str]] = None,
    environ: Optional[Mapping[str, str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """主函数 / Run one subcommand and return its exit code"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    load_dotenv()
    attach_stderr_handler()

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR

    try:
        config = build_run_config(args, environ)
    except DatasetError as exc:
        code = EXIT_ERROR if isinstance(exc, MissingFileError) else EXIT_DATASET
        print(get_text("dataset_invalid", len(exc.diagnostics)), file=stderr)
        for diagnostic in exc.diagnostics:
            print(f"  {diagnostic}", file=stderr)
        return code
    except ValidationError as exc:
        print(get_text("usage_error", exc), file=stderr)
        return EXIT_ERROR

    set_language(config.language)
    set_log_level(config.log_level)

    tracer = StageTracer(dict(config.opentelemetry))
    tracer.init()
    try:
        result = run_stage(
            args.subcommand, config.data_dir, config.out_dir, config.analysis_settings(), tracer
        )
    finally:
        tracer.shutdown()

    if result["status"] != "success":
        _print_diagnostics(result, stderr)
        return _EXIT_CODES.get(result.get("error_type"), EXIT_ERROR)

    _emit_success(args, result, str(config.out_dir), stdout)
    if "results" in result:
        for quantity, published, derived in pending_errata(result["results"]):
            print(get_text("erratum_detected", quantity, json.dumps(published), json.dumps(derived)), file=stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
