"""Per-article sentiment probability triples and firm-mention lists.

Sentiment is consumed as data: each article arrives with positive, neutral,
and negative probabilities already attached, one file row per mentioned firm.
Triples must sit on the probability simplex within a small tolerance and are
stored renormalized so they sum to exactly 1.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import LoadError, RowRejection

NEWS_HEADER = ("news_id", "date", "firm_id", "p_pos", "p_neu", "p_neg")

SIMPLEX_TOL = 1e-3
# rows of one article must repeat the same triple; tolerance covers reformatting
REPEAT_TOL = 1e-9


@dataclass(frozen=True)
class NewsEvent:
    """One dated article with its mentioned firms and sentiment triple."""

    news_id: str
    date: dt.date
    mentions: frozenset[str]
    p_pos: float
    p_neu: float
    p_neg: float


@dataclass(frozen=True)
class MentionHistogram:
    mentions_per_article: dict[int, int]
    articles_per_firm: dict[str, int]


class NewsStore:
    """Validated events keyed by news_id, with a per-firm dated index."""

    def __init__(self, events: dict[str, NewsEvent]):
        self._events = dict(events)
        by_firm: dict[str, list[NewsEvent]] = {}
        for event in self._events.values():
            for firm in event.mentions:
                by_firm.setdefault(firm, []).append(event)
        for firm_events in by_firm.values():
            firm_events.sort(key=lambda e: (e.date, e.news_id))
        self._by_firm = by_firm

    def __len__(self) -> int:
        return len(self._events)

    @property
    def events(self) -> dict[str, NewsEvent]:
        return self._events

    def get(self, news_id: str) -> Optional[NewsEvent]:
        return self._events.get(news_id)

    def events_for_firm(self, firm_id: str) -> list[NewsEvent]:
        return list(self._by_firm.get(firm_id, []))


def _validate_triple(p_pos: float, p_neu: float, p_neg: float) -> Optional[str]:
    triple = (p_pos, p_neu, p_neg)
    if any(not math.isfinite(p) for p in triple):
        return "non-finite probability"
    if any(p < 0.0 or p > 1.0 for p in triple):
        return "probability outside [0, 1]"
    total = sum(triple)
    if abs(total - 1.0) > SIMPLEX_TOL:
        return f"probabilities sum to {total:.6g}"
    return None


def load_news(path, strict: bool = False) -> tuple[NewsStore, list[RowRejection]]:
    """Load a news file (header ``news_id,date,firm_id,p_pos,p_neu,p_neg``).

    One row per (article, mentioned firm); rows of the same news_id must
    carry the same date and the same probability triple. Invalid rows are
    collected and reported, not fatal, unless ``strict`` is set.
    """
    rejections: list[RowRejection] = []
    pending: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        head = next(reader, None)
        if head is None or tuple(h.strip() for h in head) != NEWS_HEADER:
            raise LoadError(f"{path}: expected header {','.join(NEWS_HEADER)}")
        for i, row in enumerate(reader, start=1):
            if len(row) != 6:
                rejections.append(RowRejection(i, "wrong column count"))
                continue
            news_id, date_text, firm_id, *prob_text = (field.strip() for field in row)
            if not news_id or not firm_id:
                rejections.append(RowRejection(i, "empty news_id or firm_id"))
                continue
            try:
                date = dt.date.fromisoformat(date_text[:10])
            except ValueError:
                rejections.append(RowRejection(i, f"malformed date {date_text!r}"))
                continue
            try:
                p_pos, p_neu, p_neg = (float(t) for t in prob_text)
            except ValueError:
                rejections.append(RowRejection(i, "malformed probability"))
                continue
            problem = _validate_triple(p_pos, p_neu, p_neg)
            if problem is not None:
                rejections.append(RowRejection(i, problem))
                continue
            entry = pending.get(news_id)
            if entry is None:
                pending[news_id] = {
                    "date": date,
                    "triple": (p_pos, p_neu, p_neg),
                    "mentions": {firm_id},
                }
                continue
            if date != entry["date"]:
                rejections.append(RowRejection(i, f"inconsistent date for news_id {news_id}"))
                continue
            if any(abs(a - b) > REPEAT_TOL for a, b in zip((p_pos, p_neu, p_neg), entry["triple"])):
                rejections.append(
                    RowRejection(i, f"inconsistent probabilities for news_id {news_id}")
                )
                continue
            if firm_id in entry["mentions"]:
                rejections.append(RowRejection(i, f"duplicate mention of {firm_id}"))
                continue
            entry["mentions"].add(firm_id)
    if strict and rejections:
        raise LoadError(f"{path}: {len(rejections)} rejected rows; first: {rejections[0]}")
    events = {}
    for news_id, entry in pending.items():
        p_pos, p_neu, p_neg = entry["triple"]
        total = p_pos + p_neu + p_neg
        events[news_id] = NewsEvent(
            news_id=news_id,
            date=entry["date"],
            mentions=frozenset(entry["mentions"]),
            p_pos=p_pos / total,
            p_neu=p_neu / total,
            p_neg=p_neg / total,
        )
    return NewsStore(events), rejections


def mention_histogram(
    store: NewsStore, registry_firms: Optional[Iterable[str]] = None
) -> MentionHistogram:
    """Counts of mentions per article and of articles per firm.

    When ``registry_firms`` is supplied, firms never mentioned appear with a
    zero count in ``articles_per_firm``.
    """
    mentions_per_article: dict[int, int] = {}
    articles_per_firm: dict[str, int] = {}
    if registry_firms is not None:
        for firm in registry_firms:
            articles_per_firm[firm] = 0
    for event in store.events.values():
        n = len(event.mentions)
        mentions_per_article[n] = mentions_per_article.get(n, 0) + 1
        for firm in event.mentions:
            articles_per_firm[firm] = articles_per_firm.get(firm, 0) + 1
    return MentionHistogram(
        mentions_per_article=dict(sorted(mentions_per_article.items())),
        articles_per_firm=dict(sorted(articles_per_firm.items())),
    )
