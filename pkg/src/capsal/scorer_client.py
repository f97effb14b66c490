"""HTTP client for the masked-language-model scoring service.

Wire protocol (POST <endpoint>/v1/score):

  request   {"template": "a {SLOT} in a field", "candidates": ["horse", ...]}
  response  {"scores": [-2.31, ...], "model_id": "..."}

Scores align with candidate order; the template must contain exactly one
{SLOT} marker. Multi-token candidates are the service's responsibility
(mean log-probability per token).
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

from .extraction import DisambiguationRequest


class ScorerUnavailable(Exception):
    pass


@dataclass
class RemoteScorer:
    endpoint: str
    timeout: float = 30.0
    session: object = None

    name = "remote"

    def __post_init__(self):
        if self.session is None:
            self.session = requests.Session()
        self.endpoint = self.endpoint.rstrip("/")

    def score(self, request: DisambiguationRequest) -> list[float]:
        payload = {
            "template": request.template,
            "candidates": [c.representative for c in request.candidates],
        }
        try:
            response = self.session.post(
                f"{self.endpoint}/v1/score", json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"scorer request failed: {exc}") from exc
        if response.status_code != 200:
            raise ScorerUnavailable(
                f"scorer returned HTTP {response.status_code}: {response.text[:200]}"
            )
        body = response.json()
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(request.candidates):
            raise ScorerUnavailable("scorer response malformed: scores misaligned")
        return [float(s) for s in scores]
