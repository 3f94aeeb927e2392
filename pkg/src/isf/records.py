"""Append-only page record stores (the crawl DB and relevant-page RDB).

One JSON object per line, keys always in the order
url, status, fetched_at, title, text, outlinks.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterator


@dataclass
class PageRecord:
    url: str
    status: int
    fetched_at: float
    title: str = ""
    text: str = ""
    outlinks: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "url": self.url,
                "status": self.status,
                "fetched_at": self.fetched_at,
                "title": self.title,
                "text": self.text,
                "outlinks": self.outlinks,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "PageRecord":
        obj = json.loads(line)
        return cls(
            url=obj["url"],
            status=int(obj["status"]),
            fetched_at=float(obj["fetched_at"]),
            title=obj.get("title", ""),
            text=obj.get("text", ""),
            outlinks=list(obj.get("outlinks", [])),
        )


class RecordStore:
    """Line-delimited page records on disk, append-only."""

    def __init__(self, path):
        self.path = os.fspath(path)

    def append(self, record: PageRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(record.to_json() + "\n")

    def __iter__(self) -> Iterator[PageRecord]:
        if not os.path.exists(self.path):
            return
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield PageRecord.from_json(line)

    def read_all(self) -> list[PageRecord]:
        return list(self)
