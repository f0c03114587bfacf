"""Uniform client for the translator under test.

Backends are either a remote HTTP service speaking a minimal JSON
contract, or a deterministic mock driven by a rule file.  The client adds
a persistent JSONL response cache, a sliding-window rate limiter and
retry-with-backoff, so a warm cache makes whole pipeline runs
byte-reproducible and free of network calls.

Mock rule file syntax, one rule per line ('#' comments allowed):

    src -> tgt tokens            rewrite: translate token src as tgt tokens
    word -> repl WHEN trigger    injection: mistranslate word when trigger
                                 occurs anywhere in the input sentence
    PATTERN = p                  probability: first rule whose PATTERN is a
                                 substring of the OUTPUT wins; '*' matches
                                 everything
"""

from __future__ import annotations

import json
import os
import threading
import time
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import (
    ConfigError,
    InvalidInputError,
    MalformedResponseError,
    PermanentTranslationError,
    TransientTranslationError,
)
from .tokenization import word_tokenize

API_KEY_ENV = "TRANSCHECK_API_KEY"

MAX_ATTEMPTS = 4  # one call plus three retries
BACKOFF_BASE = 0.5


@dataclass(frozen=True)
class RewriteRule:
    source: str
    image: tuple[str, ...]


@dataclass(frozen=True)
class InjectionRule:
    source: str
    image: tuple[str, ...]
    trigger: str


@dataclass(frozen=True)
class ProbabilityRule:
    pattern: str  # substring of the output; '*' matches everything
    value: float


@dataclass
class MockRules:
    rewrites: dict[str, tuple[str, ...]] = field(default_factory=dict)
    injections: list[InjectionRule] = field(default_factory=list)
    probabilities: list[ProbabilityRule] = field(default_factory=list)

    @classmethod
    def parse(cls, text: str) -> "MockRules":
        rules = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip().replace("→", "->")
            if not line:
                continue
            if "->" in line and " WHEN " in line:
                head, trigger = line.rsplit(" WHEN ", 1)
                source, image = head.split("->", 1)
                rules.injections.append(
                    InjectionRule(source.strip(), tuple(image.split()), trigger.strip())
                )
            elif "->" in line:
                source, image = line.split("->", 1)
                rules.rewrites[source.strip()] = tuple(image.split())
            elif "=" in line:
                pattern, value = line.rsplit("=", 1)
                rules.probabilities.append(
                    ProbabilityRule(pattern.strip(), float(value))
                )
            else:
                raise ConfigError(f"unparseable mock rule at line {lineno}: {raw!r}")
        return rules

    @classmethod
    def load(cls, path) -> "MockRules":
        return cls.parse(Path(path).read_text(encoding="utf-8"))


@dataclass
class TranslatorProfile:
    """How to reach and interpret one translator backend."""

    kind: str  # "remote" | "mock"
    source_lang: str = "en"
    target_lang: str = "xx"
    backend_id: str = ""
    grey_box: bool = False
    rate_limit: float = 10.0  # requests per second
    timeout: float = 10.0
    endpoint: str | None = None
    mock_rules: MockRules | None = None
    on_missing: str = "identity"  # or "error"
    target_tokenization: str = "word"  # or "char"

    def __post_init__(self) -> None:
        if self.kind not in ("remote", "mock"):
            raise ConfigError(f"unknown translator kind {self.kind!r}")
        if self.rate_limit <= 0:
            raise ConfigError("rate limit must be positive")
        if not self.backend_id:
            self.backend_id = self.kind if self.kind == "mock" else f"remote:{self.endpoint}"

    @property
    def capabilities(self) -> set[str]:
        caps = {"black-box"}
        if self.grey_box:
            caps.add("grey-box")
        return caps

    @property
    def language_pair(self) -> str:
        return f"{self.source_lang}-{self.target_lang}"

    @classmethod
    def from_file(cls, path) -> "TranslatorProfile":
        """Read a key=value profile; relative paths resolve next to it."""
        base = Path(path).parent
        fields: dict[str, str] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"profile line needs key=value: {raw!r}")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip()
        kind = fields.get("kind", "mock")
        rules = None
        if kind == "mock":
            rules_path = fields.get("rules")
            if not rules_path:
                raise ConfigError("mock profile needs a rules= path")
            rules = MockRules.load(base / rules_path)
        return cls(
            kind=kind,
            source_lang=fields.get("source", "en"),
            target_lang=fields.get("target", "xx"),
            backend_id=fields.get("backend_id", ""),
            grey_box=fields.get("greybox", "false").lower() in ("1", "true", "yes"),
            rate_limit=float(fields.get("rate_limit", "10")),
            timeout=float(fields.get("timeout", "10")),
            endpoint=fields.get("endpoint"),
            mock_rules=rules,
            on_missing=fields.get("on_missing", "identity"),
            target_tokenization=fields.get("target_tokenization", "word"),
        )


@dataclass(frozen=True)
class TranslationRecord:
    input_text: str
    output_text: str
    probability: float | None
    timestamp: float
    backend_id: str

    def to_json(self) -> dict:
        return {
            "input": self.input_text,
            "output": self.output_text,
            "probability": self.probability,
            "timestamp": self.timestamp,
            "backend": self.backend_id,
        }


class MockBackend:
    """Deterministic dictionary translator with optional fault injection."""

    def __init__(self, profile: TranslatorProfile):
        if profile.mock_rules is None:
            raise ConfigError("mock profile carries no rules")
        self.rules = profile.mock_rules
        self.on_missing = profile.on_missing
        self.grey_box = profile.grey_box

    def translate(self, text: str) -> tuple[str, float | None]:
        tokens = word_tokenize(text)
        token_set = set(tokens)
        images: list[str] = []
        for token in tokens:
            image = None
            for rule in self.rules.injections:
                if rule.source == token and rule.trigger in token_set:
                    image = rule.image
                    break
            if image is None:
                image = self.rules.rewrites.get(token)
            if image is None:
                if self.on_missing == "error":
                    raise PermanentTranslationError(f"no rule for token {token!r}")
                image = (token,)
            images.extend(image)
        output = " ".join(images)
        return output, self._probability(output) if self.grey_box else None

    def _probability(self, output: str) -> float:
        for rule in self.rules.probabilities:
            if rule.pattern == "*" or rule.pattern in output:
                return rule.value
        return 1.0


class RemoteBackend:
    """POST {text, source, target} to an HTTP endpoint, expect JSON back."""

    def __init__(self, profile: TranslatorProfile, session=None):
        if not profile.endpoint:
            raise ConfigError("remote profile needs an endpoint")
        self.profile = profile
        self.session = session or requests.Session()

    def translate(self, text: str) -> tuple[str, float | None]:
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = self.session.post(
                self.profile.endpoint,
                json={
                    "text": text,
                    "source": self.profile.source_lang,
                    "target": self.profile.target_lang,
                },
                headers=headers,
                timeout=self.profile.timeout,
            )
        except requests.RequestException as exc:
            raise TransientTranslationError(str(exc)) from exc
        if response.status_code >= 500 or response.status_code == 429:
            raise TransientTranslationError(f"backend status {response.status_code}")
        if response.status_code >= 400:
            raise PermanentTranslationError(f"backend status {response.status_code}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise MalformedResponseError("response is not JSON") from exc
        if "translation" not in payload:
            raise MalformedResponseError("response lacks 'translation'")
        return payload["translation"], payload.get("probability")


class RateLimiter:
    """Allow at most `rate` calls inside any sliding one-second window."""

    def __init__(self, rate: float, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if rate <= 0:
            raise ConfigError("rate limit must be positive")
        self.rate = rate
        self.clock = clock
        self.sleep = sleep
        self._recent: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        with self._lock:
            while True:
                now = self.clock()
                while self._recent and now - self._recent[0] >= 1.0:
                    self._recent.popleft()
                if len(self._recent) < self.rate:
                    self._recent.append(now)
                    return now
                self.sleep(self._recent[0] + 1.0 - now)


class TranslationCache:
    """Append-only JSONL store keyed by (backend, language pair, input)."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._records: dict[tuple[str, str, str], TranslationRecord] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                record = TranslationRecord(
                    input_text=row["input"],
                    output_text=row["output"],
                    probability=row.get("probability"),
                    timestamp=row.get("timestamp", 0.0),
                    backend_id=row["backend"],
                )
                self._records[(record.backend_id, row.get("pair", ""), record.input_text)] = record

    def get(self, backend_id: str, pair: str, text: str) -> TranslationRecord | None:
        return self._records.get((backend_id, pair, text))

    def put(self, pair: str, record: TranslationRecord) -> None:
        with self._lock:
            self._records[(record.backend_id, pair, record.input_text)] = record
            if self.path is not None:
                row = record.to_json()
                row["pair"] = pair
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(row, sort_keys=True) + "\n")

    def __len__(self) -> int:
        return len(self._records)


class TranslatorClient:
    """Cache-first, rate-limited, retrying front end over a backend."""

    def __init__(
        self,
        profile: TranslatorProfile,
        cache: TranslationCache | None = None,
        backend=None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.profile = profile
        self.cache = cache if cache is not None else TranslationCache()
        self.backend = backend or self._default_backend(profile)
        self.limiter = RateLimiter(profile.rate_limit, clock, sleep)
        self.sleep = sleep
        self.backend_calls = 0
        self._lock = threading.Lock()

    @staticmethod
    def _default_backend(profile: TranslatorProfile):
        if profile.kind == "mock":
            return MockBackend(profile)
        return RemoteBackend(profile)

    def translate(self, text: str) -> TranslationRecord:
        if not text:
            raise InvalidInputError("cannot translate empty text")
        cached = self.cache.get(self.profile.backend_id, self.profile.language_pair, text)
        if cached is not None:
            return cached
        last_error: TransientTranslationError | None = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self.sleep(BACKOFF_BASE * 2 ** (attempt - 1))
            self.limiter.acquire()
            with self._lock:
                self.backend_calls += 1
            try:
                output, probability = self.backend.translate(text)
            except TransientTranslationError as exc:
                last_error = exc
                continue
            if not output:
                raise MalformedResponseError(f"empty translation for {text!r}")
            if self.profile.grey_box and probability is None:
                raise MalformedResponseError("grey-box backend returned no probability")
            record = TranslationRecord(
                input_text=text,
                output_text=output,
                probability=probability,
                timestamp=time.time(),
                backend_id=self.profile.backend_id,
            )
            self.cache.put(self.profile.language_pair, record)
            return record
        raise TransientTranslationError(
            f"backend still failing after {MAX_ATTEMPTS - 1} retries: {last_error}"
        )

    def target_tokens(self, record: TranslationRecord) -> list[str]:
        from .tokenization import tokenizer_for

        return tokenizer_for(self.profile.target_tokenization)(record.output_text)


def translate(
    profile: TranslatorProfile, text: str, cache: TranslationCache | None = None
) -> TranslationRecord:
    """One-shot translation through a transient client."""
    return TranslatorClient(profile, cache=cache).translate(text)


def mock_translator(
    rules: MockRules | str,
    source_lang: str = "en",
    target_lang: str = "xx",
    grey_box: bool | None = None,
    on_missing: str = "identity",
    rate_limit: float = 1000.0,
    target_tokenization: str = "word",
) -> TranslatorProfile:
    """Build a mock profile from rules text, a path or a parsed rule set."""
    if isinstance(rules, MockRules):
        parsed = rules
    elif isinstance(rules, str) and "\n" not in rules and Path(rules).exists():
        parsed = MockRules.load(rules)
    else:
        parsed = MockRules.parse(rules)
    if grey_box is None:
        grey_box = bool(parsed.probabilities)
    return TranslatorProfile(
        kind="mock",
        source_lang=source_lang,
        target_lang=target_lang,
        grey_box=grey_box,
        rate_limit=rate_limit,
        mock_rules=parsed,
        on_missing=on_missing,
        target_tokenization=target_tokenization,
    )
