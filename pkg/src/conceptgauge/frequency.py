"""Frequency-of-occurrence factor: PubMed hit counts, normalized.

Raw counts come from the NCBI esearch endpoint (db=pubmed) or from a
file-backed cache (``TERM<TAB>COUNT``, one per line).  Because literature
frequency is heavy-tailed, the factor is a log-scaled ratio:

    score = log(1 + count) / log(1 + max_count)

which maps 0 hits to 0.0 and the corpus maximum to 1.0.
"""

from __future__ import annotations

import logging
import math
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from .errors import CacheMissError, ConceptGaugeError, ProviderError

logger = logging.getLogger(__name__)

ESEARCH_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi"
API_KEY_ENV_VAR = "NCBI_API_KEY"


@dataclass(frozen=True)
class FrequencyRecord:
    term: str
    count: int
    source: str  # "live" | "cache"


@dataclass(frozen=True)
class RateLimitPolicy:
    """NCBI allows 3 requests/second anonymously, 10 with an API key."""

    max_requests_per_second: float
    api_key_present: bool

    @classmethod
    def for_key(cls, api_key: str | None) -> "RateLimitPolicy":
        if api_key:
            return cls(max_requests_per_second=10.0, api_key_present=True)
        return cls(max_requests_per_second=3.0, api_key_present=False)


class CountProvider(Protocol):
    def get_count(self, term: str) -> FrequencyRecord: ...


class RateLimiter:
    """Thread-safe limiter enforcing a minimum interval between requests.

    ``clock`` and ``sleep`` are injectable so tests can run on a fake clock.
    """

    def __init__(
        self,
        policy: RateLimitPolicy,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if policy.max_requests_per_second <= 0:
            raise ConceptGaugeError("rate limit must be positive")
        self._interval = 1.0 / policy.max_requests_per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_allowed = 0.0

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                if now >= self._next_allowed:
                    self._next_allowed = now + self._interval
                    return
                wait = self._next_allowed - now
            self._sleep(wait)


class FrequencyCache:
    """Single-writer append store of TERM<TAB>COUNT lines.

    Reads see the snapshot loaded at open time plus anything appended through
    this instance.
    """

    def __init__(self, path: str | Path, create: bool = False):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._counts: dict[str, int] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as f:
                for line in f:
                    line = line.rstrip("\n")
                    if not line.strip():
                        continue
                    term, _, count = line.partition("\t")
                    self._counts[term] = int(count)
        elif not create:
            raise ConceptGaugeError(f"frequency cache not found: {self.path}")

    def __contains__(self, term: str) -> bool:
        return term in self._counts

    def get(self, term: str) -> int | None:
        return self._counts.get(term)

    def append(self, term: str, count: int) -> None:
        with self._lock:
            self._counts[term] = count
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(f"{term}\t{count}\n")


def _default_transport(url: str, params: dict[str, str], timeout: float) -> str:
    import requests

    resp = requests.get(url, params=params, timeout=timeout)
    resp.raise_for_status()
    return resp.text


class PubMedClient:
    """esearch client returning the total hit count for a quoted-phrase query.

    The term is searched over all fields (titles, abstracts and MeSH terms all
    participate); pass ``field`` to restrict.  ``transport`` is injectable for
    tests and alternative HTTP stacks.
    """

    def __init__(
        self,
        api_key: str | None = None,
        field: str | None = None,
        transport: Callable[[str, dict[str, str], float], str] | None = None,
        rate_limiter: RateLimiter | None = None,
        max_retries: int = 3,
        timeout: float = 10.0,
        retry_sleep: Callable[[float], None] = time.sleep,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV_VAR)
        self.field = field
        self.policy = RateLimitPolicy.for_key(self.api_key)
        self._transport = transport or _default_transport
        self._limiter = rate_limiter or RateLimiter(self.policy)
        self._max_retries = max_retries
        self._timeout = timeout
        self._retry_sleep = retry_sleep

    def build_query(self, term: str) -> str:
        quoted = f'"{term}"'
        if self.field:
            return f"{quoted}[{self.field}]"
        return quoted

    def get_count(self, term: str) -> FrequencyRecord:
        params = {
            "db": "pubmed",
            "term": self.build_query(term),
            "retmode": "json",
            "retmax": "0",
        }
        if self.api_key:
            params["api_key"] = self.api_key
        last_error: Exception | None = None
        for attempt in range(self._max_retries):
            self._limiter.acquire()
            try:
                body = self._transport(ESEARCH_URL, params, self._timeout)
                return FrequencyRecord(term=term, count=_parse_count(body), source="live")
            except Exception as exc:  # noqa: BLE001 - any transport failure retries
                last_error = exc
                logger.warning("esearch attempt %d for %r failed: %s",
                               attempt + 1, term, exc)
                if attempt + 1 < self._max_retries:
                    self._retry_sleep(0.5 * (attempt + 1))
        raise ProviderError(f"esearch failed for {term!r}: {last_error}")


def _parse_count(body: str) -> int:
    """Read the total result count from a JSON or XML esearch response."""
    import json

    stripped = body.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(body)
        return int(payload["esearchresult"]["count"])
    import xml.etree.ElementTree as ET

    root = ET.fromstring(body)
    count_el = root.find("Count")
    if count_el is None or count_el.text is None:
        raise ProviderError("esearch response has no Count element")
    return int(count_el.text)


class CachedCountProvider:
    """Serve counts from a cache, optionally falling back to a live client.

    Offline (no client): a missing term raises CacheMissError rather than
    returning 0.  Live responses are written back to the cache.
    """

    def __init__(self, cache: FrequencyCache, client: PubMedClient | None = None):
        self.cache = cache
        self.client = client

    def get_count(self, term: str) -> FrequencyRecord:
        if not term.strip():
            raise ConceptGaugeError("empty term")
        cached = self.cache.get(term)
        if cached is not None:
            return FrequencyRecord(term=term, count=cached, source="cache")
        if self.client is None:
            raise CacheMissError(term)
        record = self.client.get_count(term)
        self.cache.append(term, record.count)
        return record


def fetch_count(term: str, provider: CountProvider) -> FrequencyRecord:
    if not term.strip():
        raise ConceptGaugeError("empty term")
    return provider.get_count(term)


def fetch_counts(
    terms: list[str], provider: CountProvider, max_in_flight: int = 4
) -> dict[str, int]:
    """Fetch counts for many terms with bounded parallelism.

    In-flight requests never exceed ``max_in_flight``; the provider's rate
    limiter still caps the global request rate.
    """
    from concurrent.futures import ThreadPoolExecutor

    results: dict[str, int] = {}
    missing: list[str] = []

    def one(term: str) -> tuple[str, int | None]:
        try:
            return term, provider.get_count(term).count
        except CacheMissError:
            return term, None

    unique = list(dict.fromkeys(terms))
    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        for term, count in pool.map(one, unique):
            if count is None:
                missing.append(term)
            else:
                results[term] = count
    if missing:
        raise CacheMissError(missing)
    return results


def frequency_score(count: int, max_count: int) -> float:
    """Log-scaled ratio in [0, 1]; 0 when the corpus has no hits at all."""
    if count < 0:
        raise ConceptGaugeError(f"count must be >= 0, got {count}")
    if max_count == 0:
        if count > 0:
            raise ConceptGaugeError(f"count {count} exceeds max_count 0")
        return 0.0
    if count > max_count:
        raise ConceptGaugeError(f"count {count} exceeds max_count {max_count}")
    return math.log1p(count) / math.log1p(max_count)
