"""
报告输出
========

CLI 的所有 stdout 报告都经由本模块渲染：键排序、浮点数固定 6 位小数、LF 换行，
同样的输入总是得到字节相同的输出。
"""

from __future__ import annotations

import json
import math
import sys
from collections.abc import Mapping
from typing import IO, Any

import numpy as np

FLOAT_DIGITS = 6


def _scalar(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(float(value)):
            return "null"
        return f"{float(value):.{FLOAT_DIGITS}f}"
    return json.dumps(str(value), ensure_ascii=False)


def render_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Render ``obj`` as JSON with sorted keys and fixed-precision floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [
            f"{pad}{_scalar(str(k))}: {render_json(obj[k], indent, _level + 1)}"
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{render_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def emit(obj: Any, stream: IO[str] | None = None) -> None:
    """Write a report to stdout (or ``stream``) followed by a single LF."""
    stream = stream if stream is not None else sys.stdout
    stream.write(render_json(obj) + "\n")
    stream.flush()

