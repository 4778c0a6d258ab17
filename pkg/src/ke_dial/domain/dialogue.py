"""
对话数据模型
============

核心概念：
---------
1. Turn：一轮发言（说话人 + 文本），文本按空白切分、单空格连接
2. Dialogue：有序的 Turn 列表，说话人顺序满足
   USR, (SYS-API, API)?, SYS 的交替模式，末尾允许一个未回复的 USR

使用示例：
---------
>>> d = Dialogue("d1", (Turn(Speaker.USR, "hi"), Turn(Speaker.SYS, "hello")))
>>> [t.text for t in d.system_turns()]
['hello']
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from ke_dial.domain.errors import ValidationError


class Speaker(str, Enum):
    USR = "USR"
    SYS = "SYS"
    SYS_API = "SYS-API"
    API = "API"


# 说话人序列编码：U=USR, S=SYS, P=SYS-API, A=API
_SPEAKER_CODE = {Speaker.USR: "U", Speaker.SYS: "S", Speaker.SYS_API: "P", Speaker.API: "A"}
_PATTERN = re.compile(r"(?:U(?:PA)?S)*U?")


def normalize_text(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends."""
    return " ".join(text.split())


def tokenize(text: str) -> list[str]:
    return text.split()


@dataclass(frozen=True)
class Turn:
    speaker: Speaker
    text: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "speaker", Speaker(self.speaker))
        normalized = normalize_text(self.text)
        if not normalized:
            raise ValidationError(f"empty {self.speaker.value} turn")
        object.__setattr__(self, "text", normalized)

    @property
    def tokens(self) -> list[str]:
        return tokenize(self.text)

    @property
    def is_api(self) -> bool:
        return self.speaker in (Speaker.SYS_API, Speaker.API)


@dataclass(frozen=True)
class Dialogue:
    """
    一段对话

    Args:
        id: 对话唯一标识
        turns: 有序轮次
        domain: 可选领域标签（用于分领域评测）
    """

    id: str
    turns: tuple[Turn, ...]
    domain: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        turns = tuple(self.turns)
        object.__setattr__(self, "turns", turns)
        if not turns:
            raise ValidationError(f"dialogue {self.id!r} has no turns")
        codes = "".join(_SPEAKER_CODE[t.speaker] for t in turns)
        if not _PATTERN.fullmatch(codes):
            raise ValidationError(
                f"dialogue {self.id!r} breaks the USR/(SYS-API, API)/SYS pattern: {codes}"
            )

    def user_turns(self) -> list[Turn]:
        return [t for t in self.turns if t.speaker is Speaker.USR]

    def system_turns(self) -> list[Turn]:
        return [t for t in self.turns if t.speaker is Speaker.SYS]

    def exchanges(self) -> list[tuple[tuple[Turn, ...], Turn]]:
        """Return (history, response) for every SYS turn; history is every earlier turn."""
        return [
            (self.turns[:i], turn)
            for i, turn in enumerate(self.turns)
            if turn.speaker is Speaker.SYS
        ]

    def with_turns(self, turns: list[Turn] | tuple[Turn, ...], id: str | None = None) -> Dialogue:
        return Dialogue(id=self.id if id is None else id, turns=tuple(turns), domain=self.domain)


def strip_api_turns(dialogue: Dialogue) -> Dialogue:
    """Drop SYS-API and API turns, keeping the USR/SYS exchange."""
    return dialogue.with_turns([t for t in dialogue.turns if not t.is_api])
