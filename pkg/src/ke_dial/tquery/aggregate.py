"""
数值解析与聚合
==============

KB 中的数值通常带单位（"3 miles"）。解析规则：前导十进制数 + 剩余部分作为单位后缀。
比较或聚合时单位必须一致。

- MIN / MAX 原样返回输入中的某个元素（并列取第一个）
- SUM / AVG 返回格式化数字 + 共享单位；AVG 按输入的最大小数位四舍五入（half-up）
"""

from __future__ import annotations

import re
from decimal import ROUND_HALF_UP, Decimal

from ke_dial.domain.errors import AggregateError, QueryTypeError

AGGREGATES = ("MIN", "MAX", "SUM", "AVG")

_QUANTITY = re.compile(r"\s*([-+]?\d+(?:\.\d+)?)\s*(.*?)\s*")


def parse_quantity(value: str) -> tuple[Decimal, str]:
    """
    "3 miles" -> (Decimal("3"), "miles")

    Raises:
        QueryTypeError: value has no leading number
    """
    m = _QUANTITY.fullmatch(value)
    if m is None:
        raise QueryTypeError(f"value {value!r} is not numeric")
    return Decimal(m.group(1)), " ".join(m.group(2).lower().split())


def _places(number: Decimal) -> int:
    exponent = number.as_tuple().exponent
    return -exponent if isinstance(exponent, int) and exponent < 0 else 0


def _format(number: Decimal, places: int, unit: str) -> str:
    quantized = number.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    if quantized == 0:
        quantized = abs(quantized)
    text = f"{quantized:f}"
    return f"{text} {unit}" if unit else text


def shared_unit(parsed: list[tuple[Decimal, str]]) -> str:
    units = {u for _, u in parsed}
    if len(units) > 1:
        raise AggregateError(f"mixed units: {sorted(units)}")
    return units.pop()


def aggregate(values: list[str], func: str) -> str:
    """Apply MIN/MAX/SUM/AVG to numeric-with-unit strings."""
    func = func.upper()
    if func not in AGGREGATES:
        raise AggregateError(f"unknown aggregate {func!r}")
    if not values:
        raise AggregateError(f"{func} over an empty list")

    parsed = [parse_quantity(v) for v in values]
    unit = shared_unit(parsed)
    numbers = [n for n, _ in parsed]

    if func == "MIN":
        return values[numbers.index(min(numbers))]
    if func == "MAX":
        return values[numbers.index(max(numbers))]

    places = max(_places(n) for n in numbers)
    total = sum(numbers, Decimal(0))
    if func == "SUM":
        return _format(total, places, unit)
    return _format(total / len(numbers), places, unit)
