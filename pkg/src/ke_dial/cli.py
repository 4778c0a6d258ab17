"""
命令行入口
==========

子命令：delex, generate, query, score, memlm {train, eval}, synth

约定：
- stdout 只输出机器可读的 JSON（键排序、浮点 6 位小数、LF 换行）
- 日志全部写到 stderr
- 退出码：0 成功；2 输入校验失败；1 内部错误

每个子命令的参数和执行逻辑在 ``ke_dial.scripts.<命令>`` 中，
模块需提供 ``HELP``、``add_arguments(parser, common)``、``input_args(args)`` 和
``run(args, cfg, run_cfg)``；run 返回的 dict 作为 JSON 报告输出。
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from types import ModuleType

import yaml
from pydantic import ValidationError as PydanticValidationError

from ke_dial.config.settings import AppConfig, EnvSettings, RunConfig, load_config, resolve_seed
from ke_dial.domain.errors import ValidationError
from ke_dial.report.summary import emit
from ke_dial.scripts import delex, generate, memlm, query, score, synth

logger = logging.getLogger(__name__)

PACKAGE_ROOT = Path(__file__).resolve().parent
DEFAULT_CONFIG = PACKAGE_ROOT / "configs" / "default.yaml"

COMMANDS: dict[str, ModuleType] = {
    "delex": delex,
    "generate": generate,
    "query": query,
    "score": score,
    "memlm": memlm,
    "synth": synth,
}

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(DEFAULT_CONFIG), help="配置文件路径")
    common.add_argument("--seed", type=int, default=None, help="随机种子（覆盖 KEDIAL_SEED）")
    common.add_argument("--log-level", default=None, help="日志级别（默认 KEDIAL_LOG_LEVEL）")
    common.add_argument("--jobs", type=int, default=None, help="并行 worker 上限")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="ke-dial", description="知识嵌入对话工具集")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, module in COMMANDS.items():
        # 带二级子命令的模块由二级解析器挂载公共参数
        parents = [] if getattr(module, "NESTED", False) else [common]
        p = sub.add_parser(name, parents=parents, help=module.HELP, description=module.HELP)
        module.add_arguments(p, common)
        p.set_defaults(handler=module)
    return ap


def _load_app_config(path: str) -> AppConfig:
    try:
        return load_config(path)
    except FileNotFoundError:
        raise ValidationError("config file not found", path=path) from None
    except yaml.YAMLError as e:
        raise ValidationError(f"invalid YAML: {e}", path=path) from None
    except PydanticValidationError as e:
        raise ValidationError(f"invalid configuration: {e.errors()[0]['msg']}", path=path) from None


def _run_config(args: argparse.Namespace, cfg: AppConfig, log_level: str) -> RunConfig:
    module = args.handler
    inputs = []
    for name in module.input_args(args):
        value = getattr(args, name, None)
        if value is None:
            continue
        inputs.extend(Path(v) for v in (value if isinstance(value, list) else [value]))
    output = getattr(args, "out", None)
    metrics = getattr(args, "metrics", None)
    try:
        return RunConfig(
            command=args.command,
            inputs=inputs,
            output=Path(output) if output else None,
            seed=args.seed,
            mode=getattr(args, "mode", None),
            metrics=metrics.split(",") if isinstance(metrics, str) else [],
            log_level=log_level,
            jobs=args.jobs if args.jobs is not None else cfg.jobs,
        )
    except PydanticValidationError as e:
        raise ValidationError(e.errors()[0]["msg"].removeprefix("Value error, ")) from None


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)

    env = EnvSettings()
    log_level = (args.log_level or env.log_level).upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )

    try:
        cfg = _load_app_config(args.config)
        args.seed = resolve_seed(args.seed, cfg, env)
        run_cfg = _run_config(args, cfg, log_level)
        logger.debug(f"run config: {run_cfg.model_dump_json()}")
        result = args.handler.run(args, cfg, run_cfg)
        if result is not None:
            emit(result)
        return EXIT_OK
    except ValidationError as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except Exception as e:
        logger.exception(f"internal error: {e}")
        return EXIT_INTERNAL


def run_command(command: str, argv: Sequence[str] | None = None) -> int:
    """Entry point used by the per-command scripts."""
    return main([command, *(sys.argv[1:] if argv is None else argv)])
