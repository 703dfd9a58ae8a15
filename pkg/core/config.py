"""
core/config.py
功能：运行配置。环境变量 (可写入项目根目录 .env) -> Settings -> RunConfig。
"""
import os
from dataclasses import dataclass, asdict, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from core.exceptions import InputError

SLICE_MODES = ("comparable", "verbatim")
TIE_POLICIES = ("diagonal-first",)


def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"环境变量 {key}={raw!r} 不是整数")


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    max_workers: int = 4
    pair_cap: int = 64
    total_cap: int = 1024
    seed: int = 0
    slice_mode: str = "comparable"
    output_dir: str = "outputs"

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        settings = cls(
            log_level=os.getenv("EEDAG_LOG_LEVEL", "INFO").upper(),
            max_workers=_env_int("EEDAG_MAX_WORKERS", 4),
            pair_cap=_env_int("EEDAG_PAIR_CAP", 64),
            total_cap=_env_int("EEDAG_TOTAL_CAP", 1024),
            seed=_env_int("EEDAG_SEED", 0),
            slice_mode=os.getenv("EEDAG_SLICE_MODE", "comparable"),
            output_dir=os.getenv("EEDAG_OUTPUT_DIR", "outputs"),
        )
        if settings.slice_mode not in SLICE_MODES:
            raise InputError(f"EEDAG_SLICE_MODE 必须是 {SLICE_MODES} 之一")
        if settings.max_workers < 1 or settings.pair_cap < 1 or settings.total_cap < 1:
            raise InputError("EEDAG_MAX_WORKERS / EEDAG_PAIR_CAP / EEDAG_TOTAL_CAP 必须 >= 1")
        return settings


@dataclass(frozen=True)
class RunConfig:
    """单次运行的参数；固定 seed 时结果逐位可复现"""
    seed: int = 0
    samples: int = 10
    pair_cap: int = 64
    total_cap: int = 1024
    tie_policy: str = "diagonal-first"
    permute: bool = True
    shift: bool = True
    max_workers: int = 4
    # 给定时做随机子集成对基线
    subset_size: Optional[int] = None

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("samples 必须 >= 1")
        if self.pair_cap < 1 or self.total_cap < 1:
            raise InputError("对齐上限 cap 必须 >= 1")
        if self.tie_policy not in TIE_POLICIES:
            raise InputError(f"未知平局策略: {self.tie_policy}")
        if self.subset_size is not None and self.subset_size < 1:
            raise InputError("subset_size 必须 >= 1")
        if self.max_workers < 1:
            raise InputError("max_workers 必须 >= 1")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "RunConfig":
        base = cls(
            seed=settings.seed,
            pair_cap=settings.pair_cap,
            total_cap=settings.total_cap,
            max_workers=settings.max_workers,
        )
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(base, **clean)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
