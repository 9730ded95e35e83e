from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Awaitable, Callable

from src.l2gd.loader.utils import ensure_dir_exists


@dataclass(frozen=True)
class DatasetFileSpec:
    """Where one raw dataset file lives on disk and where it can be downloaded from."""

    name: str
    data_dir: str
    url: str

    @property
    def path(self) -> str:
        return os.path.join(self.data_dir, self.name)


class DatasetFileStore:
    """Persist a raw dataset file once; later reads never touch the network."""

    def __init__(self, spec: DatasetFileSpec):
        self._spec = spec

    @property
    def path(self) -> str:
        return self._spec.path

    def exists(self) -> bool:
        return os.path.isfile(self.path)

    def read(self) -> str:
        with open(self.path, 'r', encoding='utf-8') as fh:
            return fh.read()

    def write(self, body: str) -> str:
        ensure_dir_exists(self.path)
        tmp_path = self.path + '.part'
        with open(tmp_path, 'w', encoding='utf-8', newline='') as fh:
            fh.write(body)
        os.replace(tmp_path, self.path)
        return self.path

    async def get_or_fetch(self, fetch_fn: Callable[[str], Awaitable[str]]) -> str:
        if self.exists():
            return self.read()
        body = await fetch_fn(self._spec.url)
        self.write(body)
        logging.info(f"Saved {self._spec.name} to {self.path}")
        return body
