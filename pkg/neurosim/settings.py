import os
from typing import Literal

from typing_extensions import Self

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# 环境变量配置

# NEUROSIM_THREADS 批量运行（扫描、蒙特卡洛）的并行上限，0 表示自动（CPU 核数）
# NEUROSIM_LOG_LEVEL 日志级别
# 也可以写在当前目录的 .env 文件里

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix='NEUROSIM_', env_file='.env', extra='ignore')

    threads: int = Field(default=0, ge=0)
    log_level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR'] = 'INFO'

    @model_validator(mode='after')
    def check_threads(self) -> Self:
        if self.threads > 1024:
            raise ValueError('Invalid thread setting')
        return self

    def worker_count(self, override: int | None = None) -> int:
        threads = self.threads if override is None else override
        if threads == 0:
            return os.cpu_count() or 1
        return threads


# 实例化Settings对象
settings = Settings()
