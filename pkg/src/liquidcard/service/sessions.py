"""In-memory tuning sessions: cached fits plus greedy-lock bookkeeping.

Every response is reproducible from (dataset, spec, lambda2 map,
patterns) alone; sessions only cache results and remember which
characteristics the analyst has frozen.  Mutation of one session is
serialized by its own lock; expired sessions are purged lazily.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..data import Dataset
from ..fitting import FitContext
from ..scorecard import ModelSpec, characteristic_curve
from ..tuning import default_lambda2_grid, marginal_contributions

DEFAULT_MAX_ROWS = 1_000_000
DEFAULT_TTL_SECONDS = 3600.0


class SessionNotFound(KeyError):
    pass


@dataclass
class FitOutcome:
    dev_divergence: float
    val_divergence: float
    curves: list[dict[str, Any]]


@dataclass
class Session:
    session_id: str
    context: FitContext
    grid: tuple[float, ...]
    contributions: list[tuple[str, float]]
    baseline_dev: float
    baseline_val: float
    lambda2: dict[str, float]
    patterns: dict[str, str]
    locked: list[str] = field(default_factory=list)
    locks_log: list[dict[str, Any]] = field(default_factory=list)
    cache: dict[str, FitOutcome] = field(default_factory=dict)
    created: float = field(default_factory=time.monotonic)
    last_used: float = field(default_factory=time.monotonic)
    mutex: threading.Lock = field(default_factory=threading.Lock)

    @property
    def spec(self) -> ModelSpec:
        return self.context.spec

    def cache_key(self) -> str:
        return json.dumps([sorted(self.lambda2.items()), sorted(self.patterns.items())])

    def tunable(self) -> list[str]:
        return [
            name
            for name, _ in self.contributions
            if self.spec[name].liquid_knots is not None
        ]

    def next_suggestion(self) -> str | None:
        for name in self.tunable():
            if name not in self.locked:
                return name
        return None

    def run_fit(self) -> FitOutcome:
        """Fit at the session's current parameter state, cached by state."""
        key = self.cache_key()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        fitted, _ = self.context.fit(lambda2=self.lambda2, patterns=self.patterns)
        assert fitted.val_divergence is not None
        curves = []
        for char in self.spec:
            if char.liquid_knots is None:
                continue
            xs, cs = characteristic_curve(fitted, char.name, n=200)
            curves.append(
                {
                    "characteristic": char.name,
                    "lambda2": self.lambda2.get(char.name, 0.0),
                    "xs": xs.tolist(),
                    "xs_log1p": np.log1p(xs).tolist() if char.xscale == "log1p" else None,
                    "cs": cs.tolist(),
                    "dev_divergence": fitted.dev_divergence,
                    "val_divergence": fitted.val_divergence,
                }
            )
        outcome = FitOutcome(
            dev_divergence=fitted.dev_divergence,
            val_divergence=fitted.val_divergence,
            curves=curves,
        )
        self.cache[key] = outcome
        return outcome


def build_session(spec: ModelSpec, data: Dataset, val_fraction: float, seed: int) -> Session:
    dev, val = data.split(val_fraction, seed)
    context = FitContext.build(spec, dev, val)
    contributions = marginal_contributions(spec, dev, val, context=context)
    lambda2 = {name: 0.0 for name in spec.names if spec[name].liquid_knots is not None}
    patterns = {c.name: c.pattern for c in spec}
    session = Session(
        session_id=uuid.uuid4().hex,
        context=context,
        grid=default_lambda2_grid(),
        contributions=contributions,
        baseline_dev=0.0,
        baseline_val=0.0,
        lambda2=lambda2,
        patterns=patterns,
    )
    baseline = session.run_fit()
    session.baseline_dev = baseline.dev_divergence
    session.baseline_val = baseline.val_divergence
    return session


class SessionStore:
    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS) -> None:
        self._ttl = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._mutex = threading.Lock()

    def _purge(self) -> None:
        now = time.monotonic()
        stale = [k for k, s in self._sessions.items() if now - s.last_used > self._ttl]
        for k in stale:
            del self._sessions[k]

    def add(self, session: Session) -> None:
        with self._mutex:
            self._purge()
            self._sessions[session.session_id] = session

    def get(self, session_id: str) -> Session:
        with self._mutex:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionNotFound(session_id)
            session.last_used = time.monotonic()
            return session
