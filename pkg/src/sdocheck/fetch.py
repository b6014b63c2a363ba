"""Bounded, polite page retrieval.

A thin wrapper over requests that enforces the redirect and body-size caps
and maps transport failures onto the package's exception types.  No cookie
persistence, no JavaScript: the served HTML is what gets audited.
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

DEFAULT_USER_AGENT = "sdocheck/0.1 (annotation verification tool)"


class FetchError(Exception):
    pass


class NetworkError(FetchError):
    """Timeout, DNS failure, TLS failure or refused connection."""


class TooLarge(FetchError):
    """The response body exceeded the configured maximum."""


class TooManyRedirects(FetchError):
    """The redirect chain exceeded the configured maximum."""


@dataclass(frozen=True)
class FetchConfig:
    timeout: float = 10.0
    max_redirects: int = 5
    max_body: int = 8 * 1024 * 1024
    user_agent: str = DEFAULT_USER_AGENT


@dataclass(frozen=True)
class FetchResult:
    final_url: str
    body: bytes
    status: int
    content_type: str


def fetch(url: str, config: FetchConfig | None = None) -> FetchResult:
    """Retrieve one absolute http(s) URL.

    Redirects are followed up to the cap and the final URL is reported (it
    becomes the base URL downstream).  A non-2xx final status is returned,
    not raised; transport failures raise NetworkError / TooLarge /
    TooManyRedirects.
    """
    config = config or FetchConfig()
    if not url.startswith(("http://", "https://")):
        raise ValueError(f"not an absolute http(s) URL: {url!r}")
    session = requests.Session()
    session.max_redirects = config.max_redirects
    try:
        response = session.get(
            url, timeout=config.timeout, stream=True,
            headers={"User-Agent": config.user_agent})
        try:
            body = b""
            for chunk in response.iter_content(chunk_size=65536):
                body += chunk
                if len(body) > config.max_body:
                    raise TooLarge(
                        f"body exceeds {config.max_body} bytes: {url}")
            return FetchResult(
                final_url=response.url,
                body=body,
                status=response.status_code,
                content_type=response.headers.get("Content-Type", ""),
            )
        finally:
            response.close()
    except requests.TooManyRedirects as exc:
        raise TooManyRedirects(str(exc)) from exc
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    finally:
        session.close()
