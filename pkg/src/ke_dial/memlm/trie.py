"""
前缀树记忆生成器
================

用确定性的计数前缀树代替因果语言模型，用来验证 KE 对话是否把 KB 嵌入了训练数据：
模型只能回答它在训练对话中"见过"的上下文。

核心概念：
---------
1. 历史展平：``<bos>`` + 每轮 ``<usr>``/``<sys>``/``<api>`` 标记及其 token，
   末尾追加 ``<sys>`` 作为回复提示；只保留最后 window 个 token
2. 上下文键：展平历史**倒序**插入（最近的 token 在前），
   于是"最长历史后缀"就是树上最深的匹配节点
3. 节点计数：路径上每个节点记录 {回复: 次数}
4. 解码：在最深匹配节点的回复集合中逐 token 投票，票数最多者胜，
   平票取字典序最小的 token；``<eos>`` 胜出或达到 max_length 时停止

使用示例：
---------
>>> m = train(corpus.base, window=50)
>>> result = evaluate(m, corpus.oov_test)
>>> result.response_acc
0.333333...
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import EmptyCorpus, ValidationError
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.ke.matcher import match_entities
from ke_dial.score.metrics import babi_accuracy

logger = logging.getLogger(__name__)

BOS = "<bos>"
EOS = "<eos>"
# 没有任何匹配上下文时返回的标记回复
EMPTY_GENERATION = "<empty>"

DEFAULT_WINDOW = 50
DEFAULT_MAX_LENGTH = 150

SPEAKER_TAGS = {
    Speaker.USR: "<usr>",
    Speaker.SYS: "<sys>",
    Speaker.SYS_API: "<api>",
    Speaker.API: "<api>",
}


def flatten_history(turns: Iterable[Turn], window: int | None = None) -> list[str]:
    """Flatten turns into tagged tokens ending with the ``<sys>`` prompt; keep the last ``window``."""
    tokens = [BOS]
    for t in turns:
        tokens.append(SPEAKER_TAGS[t.speaker])
        tokens.extend(t.tokens)
    tokens.append(SPEAKER_TAGS[Speaker.SYS])
    if window is not None:
        tokens = tokens[-window:]
    return tokens


@dataclass
class TrieNode:
    children: dict[str, TrieNode] = field(default_factory=dict)
    counts: Counter[tuple[str, ...]] = field(default_factory=Counter)


class PrefixTrie:
    """
    倒序上下文前缀树

    Args:
        window: 历史窗口（token 数）
        max_length: 解码长度上限
    """

    def __init__(self, window: int = DEFAULT_WINDOW, max_length: int = DEFAULT_MAX_LENGTH):
        if window < 1:
            raise ValidationError(f"window must be >= 1, got {window}")
        if max_length < 1:
            raise ValidationError(f"max_length must be >= 1, got {max_length}")
        self.window = window
        self.max_length = max_length
        self.root = TrieNode()
        self._responses: dict[tuple[str, ...], tuple[str, ...]] = {}

    def _intern(self, response: Sequence[str]) -> tuple[str, ...]:
        key = tuple(response)
        return self._responses.setdefault(key, key)

    @property
    def responses(self) -> list[tuple[str, ...]]:
        return sorted(self._responses)

    def insert(self, history: Sequence[str], response: Sequence[str], count: int = 1) -> None:
        resp = self._intern(response)
        node = self.root
        for token in reversed(history[-self.window :]):
            node = node.children.setdefault(token, TrieNode())
            node.counts[resp] += count

    def longest_match(self, history: Sequence[str]) -> tuple[TrieNode | None, int]:
        """Deepest node reached by the reversed history, with its depth (0 = nothing matched)."""
        node, depth = self.root, 0
        for token in reversed(history[-self.window :]):
            child = node.children.get(token)
            if child is None:
                break
            node, depth = child, depth + 1
        return (node, depth) if depth > 0 else (None, 0)

    def decode(self, node: TrieNode) -> list[str]:
        candidates = list(node.counts.items())
        out: list[str] = []
        while len(out) < self.max_length:
            i = len(out)
            votes: Counter[str] = Counter()
            for resp, c in candidates:
                votes[resp[i] if i < len(resp) else EOS] += c
            token = min(votes, key=lambda t: (-votes[t], t))
            if token == EOS:
                break
            out.append(token)
            candidates = [(r, c) for r, c in candidates if i < len(r) and r[i] == token]
        return out

    def iter_nodes(self) -> Iterable[TrieNode]:
        """BFS order, children visited in token order."""
        queue = [self.root]
        while queue:
            node = queue.pop(0)
            yield node
            queue.extend(node.children[k] for k in sorted(node.children))

    def __len__(self) -> int:
        return sum(1 for _ in self.iter_nodes())


def train(
    dialogues: Sequence[Dialogue],
    window: int = DEFAULT_WINDOW,
    max_length: int = DEFAULT_MAX_LENGTH,
) -> PrefixTrie:
    """
    用对话语料构建前缀树

    每个 SYS 轮次插入一条 (窗口化历史, 回复 token) 路径；重复插入只累加计数。

    Raises:
        EmptyCorpus: 语料为空
    """
    if not dialogues:
        raise EmptyCorpus("cannot train on an empty corpus")
    m = PrefixTrie(window, max_length)
    pairs = 0
    for d in dialogues:
        for history, response in d.exchanges():
            m.insert(flatten_history(history), response.tokens)
            pairs += 1
    logger.info(
        f"memlm trained on {len(dialogues)} dialogues: {pairs} pairs, "
        f"{len(m.responses)} distinct responses"
    )
    return m


def generate(m: PrefixTrie, history: Sequence[str]) -> list[str]:
    """
    对已展平的历史生成回复 token

    Returns:
        回复 token；没有任何后缀匹配时返回 ``[EMPTY_GENERATION]``
    """
    if not history:
        raise ValidationError("history must be non-empty")
    node, _ = m.longest_match(history)
    if node is None:
        return [EMPTY_GENERATION]
    return m.decode(node)


def respond(m: PrefixTrie, turns: Sequence[Turn]) -> str:
    return " ".join(generate(m, flatten_history(turns, m.window)))


@dataclass
class MemLMEvaluation:
    """memlm 评测结果"""

    response_acc: float
    dialogue_acc: float
    n_responses: int
    # 仅统计标准回复中含 KB 实体的轮次
    entity_acc: float | None = None
    n_entity_responses: int = 0


def evaluate(
    m: PrefixTrie,
    dialogues: Sequence[Dialogue],
    lexicon: EntityLexicon | None = None,
) -> MemLMEvaluation:
    """
    在测试对话上评测回复准确率与对话准确率

    Args:
        m: 训练好的前缀树
        dialogues: 测试对话
        lexicon: 可选，用于统计含实体回复的准确率
    """
    pred: list[str] = []
    gold: list[str] = []
    boundaries: list[int] = []
    for d in dialogues:
        exchanges = d.exchanges()
        boundaries.append(len(exchanges))
        for history, response in exchanges:
            pred.append(respond(m, history))
            gold.append(response.text)

    response_acc, dialogue_acc = babi_accuracy(pred, gold, boundaries)

    result = MemLMEvaluation(response_acc, dialogue_acc, len(gold))
    if lexicon is not None:
        bearing = [(p, g) for p, g in zip(pred, gold) if match_entities(g, lexicon)]
        result.n_entity_responses = len(bearing)
        if bearing:
            result.entity_acc = sum(p == g for p, g in bearing) / len(bearing)
    logger.info(
        f"memlm eval: response_acc={response_acc:.4f} dialogue_acc={dialogue_acc:.4f} "
        f"over {len(gold)} responses"
    )
    return result
