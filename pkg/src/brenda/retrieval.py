"""Web evidence retrieval: search, article extraction, snippet filtering.

A claim is turned into evidence in three steps: query a search backend
for the top-10 pages, extract readable article text from each page, and
keep the sentences whose cosine similarity to the claim (mean-of-embedding
vectors) exceeds 0.75, merging adjacent survivors into snippets.

Two search backends implement the same interface: a live HTTP JSON search
API (key from the environment) and a deterministic offline fixture index
over a directory of HTML files, so the whole pipeline runs hermetically
in tests.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date, datetime
from html.parser import HTMLParser
from pathlib import Path
from urllib.parse import urlparse

import numpy as np

from .textproc import Claim, EmbeddingTable, Sentence, content_tokens, segment_sentences, tokenize

DEFAULT_SNIPPET_THRESHOLD = 0.75
REQUEST_TIMEOUT = 10.0


class RetrievalError(Exception):
    """Search backend failure; carries the backend status when known."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class ExtractionError(Exception):
    """Unusable page: no parseable body text."""


@dataclass
class SearchResult:
    """One ranked hit from a search backend (rank is 1-based)."""

    url: str
    title: str
    raw_html: str
    rank: int


@dataclass(frozen=True)
class Article:
    """Extracted web document with sentence-segmented body text."""

    url: str
    title: str
    sentences: tuple[Sentence, ...]
    publication_date: str | None = None
    authors: tuple[str, ...] | None = None
    domain: str = ""


@dataclass
class Snippet:
    """A maximal run of adjacent claim-relevant sentences of one article.

    ``start``/``end`` are inclusive sentence indices; ``similarity`` is
    the maximum per-sentence cosine over the run.
    """

    url: str
    start: int
    end: int
    text: str
    similarity: float


# ---------------------------------------------------------------------------
# Search backends
# ---------------------------------------------------------------------------

class FixtureSearchBackend:
    """Deterministic offline index over a directory of .html files.

    Ranking is keyword overlap: the number of distinct content tokens of
    the query that occur in the document, ties broken by filename.  Pages
    with zero overlap are never returned.  An optional ``manifest.json``
    maps filenames to ``{"url": ..., "title": ...}``.
    """

    mode = "fixture"

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)
        if not self.fixture_dir.is_dir():
            raise RetrievalError(f"fixture directory not found: {fixture_dir}")
        manifest_path = self.fixture_dir / "manifest.json"
        self.manifest: dict[str, dict] = {}
        if manifest_path.exists():
            self.manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        self._entries: list[tuple[str, str, set[str]]] = []  # (filename, html, tokens)
        for path in sorted(self.fixture_dir.glob("*.html")):
            html = path.read_text(encoding="utf-8")
            self._entries.append((path.name, html, set(content_tokens(_strip_tags(html)))))

    def _url_of(self, filename: str) -> str:
        meta = self.manifest.get(filename, {})
        return meta.get("url", f"fixture://{filename}")

    def _title_of(self, filename: str) -> str:
        meta = self.manifest.get(filename, {})
        return meta.get("title", Path(filename).stem)

    def search(self, claim_text: str, k: int = 10) -> list[SearchResult]:
        if not claim_text.strip():
            raise ValueError("claim text is empty")
        if k < 1:
            raise ValueError("k must be >= 1")
        query = set(content_tokens(claim_text))
        scored = []
        for filename, html, doc_tokens in self._entries:
            overlap = len(query & doc_tokens)
            if overlap > 0:
                scored.append((-overlap, filename, html))
        scored.sort()
        return [
            SearchResult(url=self._url_of(fn), title=self._title_of(fn),
                         raw_html=html, rank=i + 1)
            for i, (_, fn, html) in enumerate(scored[:k])
        ]

    def fetch_page(self, url: str) -> SearchResult:
        """Resolve a single URL against the fixture corpus."""
        for filename, html, _ in self._entries:
            if self._url_of(filename) == url or filename == url:
                return SearchResult(url=self._url_of(filename),
                                    title=self._title_of(filename),
                                    raw_html=html, rank=1)
        raise RetrievalError(f"url not in fixture corpus: {url}", status=404)


class LiveSearchBackend:
    """HTTP JSON search API client plus page fetcher.

    The search endpoint is queried with the claim text passed verbatim as
    the ``q`` parameter (no added quoting); the JSON response is expected
    to carry an ``items`` list of ``{url|link, title}`` objects.  Each
    request uses a 10-second timeout with one retry; page fetches that
    still fail are dropped rather than failing the batch.
    """

    mode = "live"

    def __init__(self, endpoint: str, api_key: str | None = None, session=None):
        import requests

        self.endpoint = endpoint
        self.api_key = api_key
        self.session = session or requests.Session()

    def _get(self, url: str, params=None):
        last_exc = None
        for _ in range(2):  # one retry
            try:
                resp = self.session.get(url, params=params, timeout=REQUEST_TIMEOUT)
                if 200 <= resp.status_code < 300:
                    return resp
                last_exc = RetrievalError(
                    f"GET {url} returned {resp.status_code}", status=resp.status_code)
            except RetrievalError:
                raise
            except Exception as exc:  # connection errors, timeouts
                last_exc = RetrievalError(f"GET {url} failed: {exc}")
        raise last_exc

    def search(self, claim_text: str, k: int = 10) -> list[SearchResult]:
        if not claim_text.strip():
            raise ValueError("claim text is empty")
        params = {"q": claim_text, "num": k}
        if self.api_key:
            params["key"] = self.api_key
        resp = self._get(self.endpoint, params=params)
        try:
            items = resp.json().get("items", [])
        except ValueError as exc:
            raise RetrievalError(f"search response is not JSON: {exc}") from exc
        hits = []
        for item in items[:k]:
            url = item.get("url") or item.get("link")
            if url:
                hits.append((url, item.get("title", "")))

        def fetch(indexed):
            rank, (url, title) = indexed
            try:
                page = self._get(url)
            except RetrievalError:
                return None
            return SearchResult(url=url, title=title, raw_html=page.text, rank=rank)

        with ThreadPoolExecutor(max_workers=10) as pool:
            fetched = list(pool.map(fetch, enumerate(hits, start=1)))
        return [r for r in fetched if r is not None]

    def fetch_page(self, url: str) -> SearchResult:
        resp = self._get(url)
        return SearchResult(url=url, title="", raw_html=resp.text, rank=1)


def make_backend(mode: str, *, fixture_dir: str | None = None,
                 endpoint: str | None = None, api_key: str | None = None):
    """Build the backend selected by SEARCH_BACKEND."""
    if mode == "fixture":
        if not fixture_dir:
            raise RetrievalError("fixture backend requires FIXTURE_DIR")
        return FixtureSearchBackend(fixture_dir)
    if mode == "live":
        if not endpoint:
            raise RetrievalError("live backend requires SEARCH_ENDPOINT")
        return LiveSearchBackend(endpoint, api_key)
    raise RetrievalError(f"unknown search backend {mode!r}")


def search(backend, claim_text: str, k: int = 10) -> list[SearchResult]:
    """Query the backend for at most k results, ordered by backend rank."""
    return backend.search(claim_text, k)


# ---------------------------------------------------------------------------
# Article extraction
# ---------------------------------------------------------------------------

_BLOCK_TAGS = {"p", "h1", "h2", "h3", "h4", "h5", "h6", "li", "blockquote", "pre"}
_SKIP_TAGS = {"script", "style", "noscript"}
_DATE_META_KEYS = {
    "article:published_time", "date", "pubdate", "publishdate",
    "datepublished", "dc.date", "og:published_time",
}


class _ArticleParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.title_parts: list[str] = []
        self.blocks: list[str] = []
        self.authors: list[str] = []
        self.dates: list[str] = []
        self._in_title = False
        self._skip_depth = 0
        self._block_depth = 0
        self._current: list[str] = []
        self._first_heading: str | None = None
        self._heading_tag: str | None = None

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if tag == "title":
            self._in_title = True
            return
        if tag == "meta":
            d = dict(attrs)
            key = (d.get("name") or d.get("property") or d.get("itemprop") or "").lower()
            content = d.get("content", "").strip()
            if not content:
                return
            if key == "author":
                self.authors.append(content)
            elif key in _DATE_META_KEYS:
                self.dates.append(content)
            return
        if tag in _BLOCK_TAGS:
            self._flush()
            self._block_depth += 1
            if tag in ("h1", "h2") and self._first_heading is None:
                self._heading_tag = tag

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if tag == "title":
            self._in_title = False
            return
        if tag in _BLOCK_TAGS:
            text = self._flush()
            self._block_depth = max(0, self._block_depth - 1)
            if self._heading_tag == tag and text:
                self._first_heading = text
                self._heading_tag = None

    def handle_data(self, data):
        if self._skip_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
        elif self._block_depth:
            self._current.append(data)

    def _flush(self) -> str:
        text = re.sub(r"\s+", " ", "".join(self._current)).strip()
        self._current = []
        if text:
            self.blocks.append(text)
        return text


def _strip_tags(html: str) -> str:
    """Plain text of an HTML document (fixture indexing helper)."""
    parser = _ArticleParser()
    parser.feed(html)
    return " ".join(parser.blocks + parser.title_parts)


def _normalize_date(raw: str) -> str | None:
    raw = raw.strip()
    for candidate in (raw[:10], raw):
        try:
            return date.fromisoformat(candidate).isoformat()
        except ValueError:
            pass
    try:
        return datetime.fromisoformat(raw.replace("Z", "+00:00")).date().isoformat()
    except ValueError:
        return None


def registrable_domain(url: str) -> str:
    """Lowercased host without port or leading 'www.'."""
    host = urlparse(url).netloc.lower()
    host = host.split(":", 1)[0]
    return host.removeprefix("www.")


def extract_article(result: SearchResult) -> Article:
    """Strip tags/scripts from a page and sentence-segment its block text.

    The title comes from <title> or the first heading; publication date
    and authors come from common meta tags when present.  Raises
    :class:`ExtractionError` on pages with no usable body text.
    """
    if not result.raw_html or not result.raw_html.strip():
        raise ExtractionError(f"empty page body: {result.url}")
    parser = _ArticleParser()
    try:
        parser.feed(result.raw_html)
        parser.close()
    except Exception as exc:
        raise ExtractionError(f"unparseable page {result.url}: {exc}") from exc

    body = " ".join(parser.blocks)
    sentences = segment_sentences(body)
    if not sentences:
        raise ExtractionError(f"no body text extracted: {result.url}")

    title = re.sub(r"\s+", " ", "".join(parser.title_parts)).strip()
    if not title:
        title = parser._first_heading or result.title
    pub_date = None
    for raw in parser.dates:
        pub_date = _normalize_date(raw)
        if pub_date:
            break
    return Article(
        url=result.url,
        title=title,
        sentences=tuple(sentences),
        publication_date=pub_date,
        authors=tuple(parser.authors) or None,
        domain=registrable_domain(result.url),
    )


# ---------------------------------------------------------------------------
# Similarity filtering
# ---------------------------------------------------------------------------

def sentence_vector(tokens: list[str], table: EmbeddingTable) -> np.ndarray:
    """Arithmetic mean of token embedding rows; zero vector when empty."""
    if not tokens:
        return np.zeros(table.dim)
    rows = table.matrix[[table.vocab.id_of(t) for t in tokens]]
    return rows.mean(axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, 0.0 when either vector has zero norm.

    The result is clipped to [-1, 1] to absorb float rounding.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def filter_snippets(claim: Claim, article: Article,
                    threshold: float = DEFAULT_SNIPPET_THRESHOLD, *,
                    table: EmbeddingTable) -> list[Snippet]:
    """Keep sentences strictly above the similarity threshold, merged.

    Every sentence is scored by the cosine between the claim's and the
    sentence's mean embedding vectors; survivors are merged into maximal
    runs of adjacent sentences, each run one Snippet whose similarity is
    the maximum over the run.  Order is preserved.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    claim_vec = sentence_vector(list(claim.tokens), table)
    sims = [cosine(claim_vec, sentence_vector(tokenize(s.text), table))
            for s in article.sentences]
    snippets: list[Snippet] = []
    run: list[int] = []
    for i, sim in enumerate(sims):
        if sim > threshold:
            run.append(i)
        elif run:
            snippets.append(_make_snippet(article, run, sims))
            run = []
    if run:
        snippets.append(_make_snippet(article, run, sims))
    return snippets


def _make_snippet(article: Article, run: list[int], sims: list[float]) -> Snippet:
    return Snippet(
        url=article.url,
        start=run[0],
        end=run[-1],
        text=" ".join(article.sentences[i].text for i in run),
        similarity=max(sims[i] for i in run),
    )


def article_from_text(text: str, url: str = "inline://article",
                      title: str = "") -> Article:
    """Wrap raw text (no HTML) as an Article for whole-article analysis."""
    sentences = segment_sentences(text)
    if not sentences:
        raise ExtractionError("no sentences in provided text")
    return Article(url=url, title=title, sentences=tuple(sentences),
                   domain=registrable_domain(url))
