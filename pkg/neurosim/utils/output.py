import csv
import json
import os
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from neurosim import __version__
from neurosim.models.config_model import RunManifest

MANIFEST_NAME = 'manifest.json'


def fmt(value: Any) -> str:
    # 浮点统一 9 位有效数字
    if isinstance(value, float):
        return f'{value:.9g}'
    return str(value)


def _round(value: Any) -> Any:
    if isinstance(value, float):
        return float(f'{value:.9g}')
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


class OutputWriter:
    """--out 目录下的唯一写入者，记录写过的文件供 manifest 使用"""

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []

    def path(self, name: str) -> Path:
        if name not in self.outputs:
            self.outputs.append(name)
        return self.out_dir / name

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.path(name)
        with path.open('w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
        return path

    def json(self, name: str, data: dict[str, Any]) -> Path:
        path = self.path(name)
        path.write_text(json.dumps(_round(data), indent=2, sort_keys=True) + '\n', encoding='utf-8')
        return path

    def text(self, name: str, lines: Iterable[str]) -> Path:
        path = self.path(name)
        path.write_text(''.join(f'{line}\n' for line in lines), encoding='utf-8')
        return path

    def manifest(self, command: str, config: str, seed: int, wall_clock_s: float) -> Path:
        """先写临时文件再 os.replace，读者看不到写了一半的 manifest"""
        path = self.path(MANIFEST_NAME)
        manifest = RunManifest(command=command, config=config, seed=seed, tool_version=__version__,
                               outputs=list(self.outputs), wall_clock_s=wall_clock_s)
        tmp = self.out_dir / f'.{MANIFEST_NAME}.tmp'
        tmp.write_text(manifest.model_dump_json(indent=2) + '\n', encoding='utf-8')
        os.replace(tmp, path)
        return path
