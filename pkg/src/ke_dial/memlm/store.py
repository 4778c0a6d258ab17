"""
前缀树模型文件
==============

二进制格式（全部整数为 little-endian uint32）：

    magic "KEMLM\\0" | version | window | max_length
    token 表：     n_tokens, 然后每个 token: 字节长度 + UTF-8 字节（按字典序）
    response 表：  n_responses, 然后每条回复: token 数 + token id 数组（按字典序）
    节点数组：     n_nodes, BFS 顺序；每个节点:
                   n_children, (token id, 子节点下标)*, n_counts, (response id, 次数)*

同一语料和窗口总是得到字节相同的文件。
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from ke_dial.domain.errors import ValidationError
from ke_dial.memlm.trie import PrefixTrie, TrieNode

logger = logging.getLogger(__name__)

MAGIC = b"KEMLM\x00"
VERSION = 1
_U4 = np.dtype("<u4")


def _u4(*values: int) -> bytes:
    return np.asarray(values, dtype=_U4).tobytes()


def dumps(m: PrefixTrie) -> bytes:
    nodes = list(m.iter_nodes())
    node_index = {id(n): i for i, n in enumerate(nodes)}
    responses = m.responses
    response_index = {r: i for i, r in enumerate(responses)}
    tokens = sorted({t for r in responses for t in r} | {k for n in nodes for k in n.children})
    token_index = {t: i for i, t in enumerate(tokens)}

    parts = [MAGIC, _u4(VERSION, m.window, m.max_length, len(tokens))]
    for t in tokens:
        raw = t.encode("utf-8")
        parts += [_u4(len(raw)), raw]

    parts.append(_u4(len(responses)))
    for r in responses:
        parts.append(_u4(len(r), *(token_index[t] for t in r)))

    parts.append(_u4(len(nodes)))
    for n in nodes:
        children = sorted(n.children.items())
        flat_children = [x for k, child in children for x in (token_index[k], node_index[id(child)])]
        counts = sorted((response_index[r], c) for r, c in n.counts.items())
        flat_counts = [x for pair in counts for x in pair]
        parts.append(_u4(len(children), *flat_children, len(counts), *flat_counts))
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValidationError(f"truncated model file at byte {self.pos}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u4(self, count: int = 1) -> np.ndarray:
        if count == 0:
            return np.empty(0, dtype=_U4)
        return np.frombuffer(self.take(4 * count), dtype=_U4)

    def one(self) -> int:
        return int(self.u4()[0])


def loads(data: bytes) -> PrefixTrie:
    """
    从字节串恢复前缀树

    Raises:
        ValidationError: magic/版本不符或文件被截断
    """
    reader = _Reader(data)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ValidationError("not a memlm model file")
    version, window, max_length, n_tokens = (int(x) for x in reader.u4(4))
    if version != VERSION:
        raise ValidationError(f"unsupported memlm model version {version}")

    tokens = [reader.take(reader.one()).decode("utf-8") for _ in range(n_tokens)]
    responses = []
    for _ in range(reader.one()):
        ids = reader.u4(reader.one())
        responses.append(tuple(tokens[i] for i in ids))

    m = PrefixTrie(window, max_length)
    interned = [m._intern(r) for r in responses]
    n_nodes = reader.one()
    nodes = [m.root] + [TrieNode() for _ in range(max(0, n_nodes - 1))]
    for node in nodes:
        pairs = reader.u4(2 * reader.one()).reshape(-1, 2)
        for token_id, child in pairs:
            node.children[tokens[token_id]] = nodes[child]
        pairs = reader.u4(2 * reader.one()).reshape(-1, 2)
        for response_id, count in pairs:
            node.counts[interned[response_id]] = int(count)
    if reader.pos != len(data):
        raise ValidationError(f"{len(data) - reader.pos} trailing bytes in model file")
    return m


def save_model(m: PrefixTrie, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(dumps(m))
    logger.info(f"memlm model saved to {p}")
    return p


def load_model(path: str | Path) -> PrefixTrie:
    return loads(Path(path).read_bytes())
