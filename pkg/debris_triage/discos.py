"""Thin DISCOSweb-style API adapter; every page goes through parse_structured_document."""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Dict, List, Optional, Tuple
from urllib.parse import urljoin

import requests

from .config import DEFAULT_ENDPOINT, DiscosEndpoint
from .errors import IoFailure
from .ingest import Diagnostic, StructuredPage, StructuredRecord, parse_structured_document

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscosClient:
    endpoint: DiscosEndpoint = DEFAULT_ENDPOINT
    timeout: float = 10.0
    page_size: int = 100
    # Upper bound on followed `links.next`; protects against cycling servers.
    max_pages: int = 1000

    def _get(self, url: str, params: Optional[Dict[str, str]] = None) -> bytes:
        try:
            response = requests.get(url, params=params, headers=self.endpoint.headers(), timeout=self.timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            logger.error("DISCOSweb request to %s failed: %s", url, exc)
            raise IoFailure(url, f"request failed: {exc}") from exc
        return response.content

    def fetch_page(self, url: str, params: Optional[Dict[str, str]] = None) -> StructuredPage:
        logger.debug("fetching %s params=%s", url, params)
        return parse_structured_document(self._get(url, params))

    def fetch_objects(self, query: Optional[str] = None) -> Tuple[List[StructuredRecord], List[Diagnostic]]:
        """Follow pagination until ``links.next`` runs out, collecting records and diagnostics."""
        url = self.endpoint.url("objects")
        params: Optional[Dict[str, str]] = {"page[size]": str(self.page_size)}
        if query:
            params["filter"] = query

        records: List[StructuredRecord] = []
        diagnostics: List[Diagnostic] = []
        for page_no in range(1, self.max_pages + 1):
            page = self.fetch_page(url, params)
            records.extend(page.records)
            diagnostics.extend(page.diagnostics)
            logger.info("page %d: %d record(s), %d skipped", page_no, len(page.records), len(page.diagnostics))
            if not page.next_link:
                break
            # The next link already carries the query string.
            url, params = urljoin(url, page.next_link), None
        else:
            logger.warning("stopped after %d pages with more pages still linked", self.max_pages)
        return records, diagnostics


def fetch_objects(
    query: Optional[str] = None, endpoint: DiscosEndpoint = DEFAULT_ENDPOINT
) -> Tuple[List[StructuredRecord], List[Diagnostic]]:
    return DiscosClient(endpoint=endpoint).fetch_objects(query)


__all__ = ["DiscosClient", "fetch_objects"]
