"""Description sources: local model texts and a remote encyclopedia client.

The remote client speaks the common extract-API dialect: a GET against
``<endpoint>?action=query&prop=extracts&exintro=1&explaintext=1&...`` that
answers with the plain-text intro paragraph of the page titled like the
queried structure.  Extracts are cached on disk, one UTF-8 text file per
(language, normalized name), so that later runs (including fully offline
ones) replay identical text.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote, urlencode

from .errors import TransportFailure
from .model import StructureType
from .story import Description, SourceKind, TypeNode

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT_TEMPLATE = "https://{language}.wikipedia.org/w/api.php"

# Fixed parameter order keeps request URLs (and therefore Hit urls) stable.
_EXTRACT_PARAMS = (
    ("action", "query"),
    ("prop", "extracts"),
    ("exintro", "1"),
    ("explaintext", "1"),
    ("redirects", "1"),
    ("format", "json"),
)


@dataclass
class RemoteConfig:
    endpoint_template: str = DEFAULT_ENDPOINT_TEMPLATE
    language: str = "en"
    timeout: float = 10.0
    cache_dir: Path | str = ".modeltour-cache"
    offline: bool = False
    request_delay: float = 0.0

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        self.cache_dir = Path(self.cache_dir)


@dataclass(frozen=True)
class FetchResult:
    """Outcome of one remote lookup."""

    outcome: str  # "hit" | "miss" | "error"
    text: str = ""
    url: str = ""
    detail: str = ""

    @classmethod
    def hit(cls, text: str, url: str) -> "FetchResult":
        return cls(outcome="hit", text=text, url=url)

    @classmethod
    def miss(cls) -> "FetchResult":
        return cls(outcome="miss")

    @classmethod
    def transport_error(cls, detail: str) -> "FetchResult":
        return cls(outcome="error", detail=detail)


class UrlTransport:
    """Default HTTP transport; any network problem surfaces as TransportFailure."""

    def get(self, url: str, timeout: float) -> str:
        import requests

        try:
            response = requests.get(url, timeout=timeout)
        except requests.RequestException as exc:
            raise TransportFailure(str(exc)) from exc
        if response.status_code != 200:
            raise TransportFailure(f"HTTP {response.status_code} for {url}")
        return response.text


class DiskCache:
    """One text file per (language, name); writes are atomic (tmp + rename)."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def _path(self, language: str, key: str) -> Path:
        return self.root / language / (quote(key, safe="") + ".txt")

    def read(self, language: str, key: str) -> str | None:
        path = self._path(language, key)
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    def write(self, language: str, key: str, text: str) -> None:
        path = self._path(language, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


def _first_paragraph(extract: str) -> str:
    return extract.strip().split("\n\n", 1)[0].strip()


def _parse_extract_response(body: str) -> str | None:
    """Extract text from the API response; None means the page is absent."""
    payload = json.loads(body)
    pages = payload.get("query", {}).get("pages", {})
    for page in pages.values():
        if "missing" in page:
            return None
        extract = page.get("extract", "")
        if extract:
            return extract
    return None


def request_url(name: str, config: RemoteConfig) -> str:
    endpoint = config.endpoint_template.format(language=config.language)
    return endpoint + "?" + urlencode(_EXTRACT_PARAMS + (("titles", name),))


def remote_fetch(
    name: str,
    config: RemoteConfig,
    transport=None,
    cache: DiskCache | None = None,
) -> FetchResult:
    """Look up the intro extract for a structure name.

    The cache is consulted first; offline mode never touches the transport.
    Transport failures are reported (never cached) so callers can fall back.
    """
    if not name.strip():
        raise ValueError("name must be non-blank")
    cache = cache or DiskCache(config.cache_dir)
    key = normalize_name(name)
    url = request_url(name, config)

    cached = cache.read(config.language, key)
    if cached is not None:
        return FetchResult.hit(cached, url)
    if config.offline:
        return FetchResult.miss()

    transport = transport or UrlTransport()
    if config.request_delay > 0:
        time.sleep(config.request_delay)
    try:
        body = transport.get(url, config.timeout)
        extract = _parse_extract_response(body)
    except TransportFailure as exc:
        logger.warning("remote lookup for %r failed: %s", name, exc)
        return FetchResult.transport_error(str(exc))
    except (json.JSONDecodeError, AttributeError, TypeError) as exc:
        logger.warning("unusable response for %r: %s", name, exc)
        return FetchResult.transport_error(f"unusable response: {exc}")

    if extract is None:
        return FetchResult.miss()
    paragraph = _first_paragraph(extract)
    if not paragraph:
        return FetchResult.miss()
    cache.write(config.language, key, paragraph)
    return FetchResult.hit(paragraph, url)


def local_lookup(structure_type: StructureType) -> list[str]:
    """Model-supplied descriptions, trimmed, blanks dropped, order kept."""
    return [text.strip() for text in structure_type.local_descriptions if text.strip()]


class LocalProvider:
    """Serves the texts shipped with the structural model."""

    name = "local"

    def __init__(self, types: dict[str, StructureType]):
        self._types = types

    def describe(self, node: TypeNode) -> list[Description]:
        structure_type = self._types.get(node.id)
        if structure_type is None:
            return []
        return [Description(source=SourceKind.LOCAL, text=t) for t in local_lookup(structure_type)]


@dataclass
class ProviderStats:
    hits: int = 0
    misses: int = 0
    errors: int = 0


class RemoteProvider:
    """Queries the extract API with each of the node's names until one hits."""

    name = "remote"

    def __init__(self, config: RemoteConfig, transport=None, repository: str = "wikipedia"):
        self.config = config
        self.transport = transport
        self.repository = repository
        self.cache = DiskCache(config.cache_dir)
        self.stats = ProviderStats()
        self._lock = threading.Lock()

    def describe(self, node: TypeNode) -> list[Description]:
        saw_error = False
        for name in node.names:
            result = remote_fetch(name, self.config, transport=self.transport, cache=self.cache)
            if result.outcome == "hit":
                with self._lock:
                    self.stats.hits += 1
                return [
                    Description(
                        source=SourceKind.REMOTE,
                        text=result.text,
                        repository=self.repository,
                        url=result.url,
                        language=self.config.language,
                    )
                ]
            if result.outcome == "error":
                saw_error = True
        with self._lock:
            if saw_error:
                self.stats.errors += 1
            else:
                self.stats.misses += 1
        return []
