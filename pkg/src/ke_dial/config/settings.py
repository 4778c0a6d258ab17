"""
配置管理模块
============

本模块负责加载和管理运行配置，包括：
- 环境变量（默认种子、日志级别）
- YAML 配置文件（词表、生成、memlm、评测参数）
- 每次 CLI 调用的 RunConfig

配置结构：
---------
- EnvSettings: 从 .env / 环境变量加载
- AppConfig: 从 YAML 加载的应用配置
- RunConfig: 由命令行参数 + AppConfig 组装，执行前校验输入输出路径

种子优先级：--seed > KEDIAL_SEED > YAML seed > 13
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SEED = 13


# =============================================================================
# 环境变量配置
# =============================================================================


class EnvSettings(BaseSettings):
    """
    环境变量配置

    KEDIAL_SEED 覆盖 YAML 中的默认种子；KEDIAL_LOG_LEVEL 控制日志级别。
    """

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    seed: int | None = Field(default=None, alias="KEDIAL_SEED")
    log_level: str = Field(default="INFO", alias="KEDIAL_LOG_LEVEL")


# =============================================================================
# YAML 配置类定义
# =============================================================================


class LexiconRule(BaseModel):
    """单类 KB 的字符串匹配规则"""

    min_length: int = Field(default=1, ge=0)
    case_sensitive: bool = False


class LexiconCfg(BaseModel):
    """
    实体词表配置

    图 KB 默认最短 5 个字符、区分大小写；表格 KB 默认不限长度、不区分大小写
    """

    graph: LexiconRule = LexiconRule(min_length=5, case_sensitive=True)
    table: LexiconRule = LexiconRule()


class GenerationConfig(BaseModel):
    """
    KE 对话生成配置

    - TABLE_BATCH: 每个模板执行一次查询，每个结果行生成一段对话
    - TABLE_PER_KB: 每个测试样本独立的 KB（SMD 协议）
    - GRAPH_ITERATIVE: 按迭代采样模板，Z 账本控制节点使用次数
    """

    seed: int = DEFAULT_SEED
    templates_per_iteration: int = Field(default=200, gt=0)
    iterations: int = Field(default=1, gt=0)
    # 每个模板最多使用的结果行数，None 表示不限
    result_cap: int | None = Field(default=None, gt=0)
    mode: Literal["TABLE_BATCH", "TABLE_PER_KB", "GRAPH_ITERATIVE"] = "TABLE_BATCH"
    jobs: int = Field(default=1, gt=0)

    # 子图选择（图模式）
    subgraph_hop: int = Field(default=2, gt=0)
    subgraph_max_edges: int = Field(default=40_000, gt=0)

    @field_validator("seed")
    @classmethod
    def _seed_64bit(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        return v


class SyntheticSpec(BaseModel):
    """合成语料规格（模拟 bAbI 的 Test / Test OOV 划分）"""

    n_rows: int = Field(default=40, ge=2)
    n_attributes: int = Field(default=5, ge=2, le=8)
    n_templates: int = Field(default=20, ge=1)
    oov_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    seed: int = DEFAULT_SEED


class MemLMCfg(BaseModel):
    """前缀树生成器配置"""

    window: int = Field(default=50, ge=1)
    max_length: int = Field(default=150, ge=1)


class ScoreCfg(BaseModel):
    """评测配置"""

    # Inform 使用的名称属性（SMD 用 poi）
    name_attribute: str = "name"
    metrics: list[str] = ["f1", "bleu"]


# =============================================================================
# 主配置类
# =============================================================================


class AppConfig(BaseModel):
    """
    应用主配置

    从 YAML 文件加载的完整配置
    """

    seed: int = DEFAULT_SEED
    lexicon: LexiconCfg = LexiconCfg()
    generation: GenerationConfig = GenerationConfig()
    memlm: MemLMCfg = MemLMCfg()
    score: ScoreCfg = ScoreCfg()
    jobs: int = Field(default=1, gt=0)


def load_config(path: str | Path) -> AppConfig:
    """
    加载配置文件

    Args:
        path: YAML 配置文件路径

    Returns:
        AppConfig: 解析后的配置对象
    """
    p = Path(path)
    data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    return AppConfig.model_validate(data)


def resolve_seed(cli_seed: int | None, cfg: AppConfig, env: EnvSettings | None = None) -> int:
    if cli_seed is not None:
        return cli_seed
    env = env if env is not None else EnvSettings()
    if env.seed is not None:
        return env.seed
    return cfg.seed


# =============================================================================
# 单次运行配置
# =============================================================================


class RunConfig(BaseModel):
    """
    一次 CLI 调用的运行配置

    校验规则：所有输入文件在执行前必须存在；输出目录必须可写（不存在时创建）。
    """

    command: str
    inputs: list[Path] = []
    output: Path | None = None
    seed: int = DEFAULT_SEED
    mode: str | None = None
    metrics: list[str] = []
    log_level: str = "INFO"
    jobs: int = Field(default=1, gt=0)

    @field_validator("inputs")
    @classmethod
    def _inputs_exist(cls, paths: list[Path]) -> list[Path]:
        missing = [str(p) for p in paths if not p.exists()]
        if missing:
            raise ValueError(f"input files not found: {missing}")
        return paths

    @model_validator(mode="after")
    def _output_writable(self) -> RunConfig:
        if self.output is None:
            return self
        parent = self.output if self.output.suffix == "" else self.output.parent
        parent = parent if str(parent) else Path(".")
        parent.mkdir(parents=True, exist_ok=True)
        if not os.access(parent, os.W_OK):
            raise ValueError(f"output directory {parent} is not writable")
        return self
