"""
实体字符串匹配
==============

在原始字符串上做最长匹配：

1. 在每个词边界起点，尝试词表中出现过的所有长度，收集候选
2. 候选按 (长度降序, 起点升序) 排序，贪心选取互不重叠的片段
3. 结果按起点排序返回

词边界：相邻字符不是字母数字或下划线。``allow_suffix=True`` 时只要求起点在词边界，
用于 "[price_0]ly" 这类词内替换。
"""

from __future__ import annotations

from dataclasses import dataclass

from ke_dial.domain.lexicon import EntityLexicon


@dataclass(frozen=True)
class EntityMatch:
    start: int
    end: int
    surface: str  # text as it appears in the input
    key: str  # canonical lexicon entry
    tag: str


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _boundary_before(text: str, i: int) -> bool:
    return i == 0 or not _is_word_char(text[i - 1]) or not _is_word_char(text[i])


def _boundary_after(text: str, j: int) -> bool:
    return j == len(text) or not _is_word_char(text[j]) or not _is_word_char(text[j - 1])


def resolve_overlaps(candidates: list[EntityMatch]) -> list[EntityMatch]:
    """Greedy longest-then-leftmost selection of non-overlapping spans."""
    chosen: list[EntityMatch] = []
    taken: set[int] = set()
    for m in sorted(candidates, key=lambda m: (-(m.end - m.start), m.start)):
        span = range(m.start, m.end)
        if any(i in taken for i in span):
            continue
        chosen.append(m)
        taken.update(span)
    return sorted(chosen, key=lambda m: m.start)


def match_entities(
    text: str,
    lexicon: EntityLexicon,
    allow_suffix: bool = False,
    blocked: list[tuple[int, int]] | None = None,
) -> list[EntityMatch]:
    """
    在文本中查找词表实体

    Args:
        text: 原始文本
        lexicon: 实体词表
        allow_suffix: 是否允许匹配结束在词内部
        blocked: 不允许与之重叠的区间（例如已有的占位符）

    Returns:
        互不重叠的匹配，按起点排序
    """
    if not lexicon or not text:
        return []
    haystack = text if lexicon.case_sensitive else text.lower()
    if len(haystack) != len(text):
        haystack = text
    lengths = lexicon.lengths
    blocked_pos = {i for a, b in blocked or () for i in range(a, b)}

    candidates: list[EntityMatch] = []
    for i in range(len(text)):
        if not _boundary_before(text, i):
            continue
        for length in lengths:
            j = i + length
            if j > len(text):
                continue
            canonical = lexicon.lookup(haystack[i:j])
            if canonical is None:
                continue
            if not allow_suffix and not _boundary_after(text, j):
                continue
            if blocked_pos and any(p in blocked_pos for p in range(i, j)):
                continue
            candidates.append(EntityMatch(i, j, text[i:j], canonical, lexicon.entries[canonical]))
    return resolve_overlaps(candidates)
