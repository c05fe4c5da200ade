import os
from dataclasses import dataclass, field
from typing import Optional

from dotenv import load_dotenv


load_dotenv()


class Config:
    # Logging
    LOG_LEVEL: str = os.getenv("IGACT_LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("IGACT_LOG_FILE", "igact.log")

    # Resource guardrails
    MONOID_CAP: int = int(os.getenv("IGACT_MONOID_CAP", "10000000"))
    SYMMETRIC_CAP: int = int(os.getenv("IGACT_SYMMETRIC_CAP", "5040"))
    GENERIC_GREEN_CAP: int = int(os.getenv("IGACT_GENERIC_GREEN_CAP", "6000"))
    GROUP_ORDER_CAP: int = int(os.getenv("IGACT_GROUP_ORDER_CAP", "1000"))
    ASSOC_EXHAUSTIVE_LIMIT: int = int(os.getenv("IGACT_ASSOC_EXHAUSTIVE_LIMIT", "3000"))

    # Derivation search bounds
    MAX_STATES: int = int(os.getenv("IGACT_MAX_STATES", "100000"))
    WORD_LEN_SLACK: int = int(os.getenv("IGACT_WORD_LEN_SLACK", "4"))

    # Sampling (all randomness is seeded)
    SEED: int = int(os.getenv("IGACT_SEED", "0"))
    SAMPLE_WORDS: int = int(os.getenv("IGACT_SAMPLE_WORDS", "1000"))
    PERTURBATIONS: int = int(os.getenv("IGACT_PERTURBATIONS", "100"))
    MAX_SAMPLE_LEN: int = int(os.getenv("IGACT_MAX_SAMPLE_LEN", "6"))

    # Lemma replay: families larger than the limit are replayed on a sample
    LEMMA_SAMPLE: int = int(os.getenv("IGACT_LEMMA_SAMPLE", "500"))
    LEMMA_EXHAUSTIVE_LIMIT: int = int(os.getenv("IGACT_LEMMA_EXHAUSTIVE_LIMIT", "5000"))
    REPLAY_CACHE_SIZE: int = int(os.getenv("IGACT_REPLAY_CACHE_SIZE", "50000"))

    # Square classification: list every singular witness, not just the first
    ALL_WITNESSES: bool = os.getenv("IGACT_ALL_WITNESSES", "false").lower() == "true"


@dataclass
class RunConfig:
    """Settings for one command; unset fields fall back to Config."""

    group: str = "cyclic:2"
    rank: int = 3
    seed: int = field(default_factory=lambda: Config.SEED)
    cap: int = field(default_factory=lambda: Config.MONOID_CAP)
    symmetric_cap: int = field(default_factory=lambda: Config.SYMMETRIC_CAP)
    generic_cap: int = field(default_factory=lambda: Config.GENERIC_GREEN_CAP)
    max_states: int = field(default_factory=lambda: Config.MAX_STATES)
    max_word_len: Optional[int] = None
    sample_words: int = field(default_factory=lambda: Config.SAMPLE_WORDS)
    perturbations: int = field(default_factory=lambda: Config.PERTURBATIONS)
    max_sample_len: int = field(default_factory=lambda: Config.MAX_SAMPLE_LEN)
    lemma_sample: int = field(default_factory=lambda: Config.LEMMA_SAMPLE)
    lemma_limit: int = field(default_factory=lambda: Config.LEMMA_EXHAUSTIVE_LIMIT)
    all_witnesses: bool = field(default_factory=lambda: Config.ALL_WITNESSES)
    out: Optional[str] = None
    dump: Optional[str] = None

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        for name in ("cap", "symmetric_cap", "generic_cap", "max_states", "max_sample_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("sample_words", "perturbations", "lemma_sample", "lemma_limit"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.max_word_len is not None and self.max_word_len < 1:
            raise ValueError("max_word_len must be positive")
