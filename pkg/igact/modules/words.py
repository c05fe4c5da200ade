import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..config.config import Config
from .biorder import BiorderedSet
from .endomorphism import Endomorphism, compose
from .logger import get_logger


IdemWord = Tuple[int, ...]

CONTRACT = "contract"
EXPAND = "expand"


@dataclass(frozen=True)
class RewriteStep:
    """One use of the relation e f = (ef) for a basic pair (e, f).

    contract: the letters e, f at pos, pos+1 become the single letter ef.
    expand:   the letter ef at pos becomes e, f.
    """

    pos: int
    direction: str
    e: int
    f: int

    def inverse(self) -> "RewriteStep":
        return RewriteStep(self.pos, EXPAND if self.direction == CONTRACT else CONTRACT, self.e, self.f)

    def shifted(self, offset: int) -> "RewriteStep":
        return RewriteStep(self.pos + offset, self.direction, self.e, self.f)

    def to_document(self) -> Dict[str, Any]:
        return {"pos": self.pos, "dir": self.direction, "e": self.e, "f": self.f}


@dataclass(frozen=True)
class DerivationCertificate:
    start: IdemWord
    steps: Tuple[RewriteStep, ...]
    end: IdemWord

    def reversed(self) -> "DerivationCertificate":
        return DerivationCertificate(self.end, tuple(s.inverse() for s in reversed(self.steps)), self.start)

    def to_document(self) -> Dict[str, Any]:
        return {
            "start": list(self.start),
            "steps": [s.to_document() for s in self.steps],
            "end": list(self.end),
        }

    @classmethod
    def from_document(cls, data: Mapping[str, Any]) -> "DerivationCertificate":
        try:
            steps = tuple(
                RewriteStep(int(s["pos"]), str(s["dir"]), int(s["e"]), int(s["f"])) for s in data["steps"]
            )
            return cls(tuple(int(x) for x in data["start"]), steps, tuple(int(x) for x in data["end"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed certificate: {exc}") from exc


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    failed_step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


EQUAL = "equal"
UNEQUAL = "unequal"
NOT_FOUND = "not-found"


@dataclass
class SearchResult:
    verdict: str
    certificate: Optional[DerivationCertificate] = None
    states: int = 0
    detail: str = ""


class RewriteEngine:
    def __init__(self, biorder: BiorderedSet, logger: Optional[logging.Logger] = None) -> None:
        self.biorder = biorder
        self.monoid = biorder.monoid
        self.logger = get_logger(logger)

    def check_word(self, word: Sequence[int]) -> IdemWord:
        word = tuple(int(x) for x in word)
        if not word:
            raise ValueError("words must be nonempty")
        for x in word:
            if x not in self.biorder:
                raise ValueError(f"letter {x} is not an idempotent")
        return word

    def phi_eval(self, word: Sequence[int]) -> Endomorphism:
        word = self.check_word(word)
        value = self.monoid.element(word[0])
        for x in word[1:]:
            value = compose(value, self.monoid.element(x))
        return value

    def phi_id(self, word: Sequence[int]) -> int:
        return self.monoid.id_of(self.phi_eval(word))

    def apply_step(self, word: Sequence[int], step: RewriteStep) -> IdemWord:
        word = tuple(word)
        e, f = step.e, step.f
        if not self.biorder.is_basic(e, f):
            raise ValueError(f"pair ({e}, {f}) is not basic")
        ef = self.biorder.product(e, f)
        if step.direction == CONTRACT:
            if not (0 <= step.pos < len(word) - 1):
                raise ValueError(f"contract position {step.pos} out of range for word of length {len(word)}")
            if word[step.pos] != e or word[step.pos + 1] != f:
                raise ValueError(f"letters at {step.pos} are {word[step.pos:step.pos + 2]}, not ({e}, {f})")
            return word[:step.pos] + (ef,) + word[step.pos + 2:]
        if step.direction == EXPAND:
            if not (0 <= step.pos < len(word)):
                raise ValueError(f"expand position {step.pos} out of range for word of length {len(word)}")
            if word[step.pos] != ef:
                raise ValueError(f"letter at {step.pos} is {word[step.pos]}, but {e}*{f} = {ef}")
            return word[:step.pos] + (e, f) + word[step.pos + 1:]
        raise ValueError(f"unknown direction {step.direction!r}")

    def verify_certificate(self, cert: DerivationCertificate) -> CertificateCheck:
        try:
            word = self.check_word(cert.start)
        except ValueError as exc:
            return CertificateCheck(False, None, f"bad start word: {exc}")
        for idx, step in enumerate(cert.steps):
            try:
                word = self.apply_step(word, step)
            except ValueError as exc:
                return CertificateCheck(False, idx, str(exc))
        if word != tuple(cert.end):
            return CertificateCheck(False, len(cert.steps), f"replay ends at {list(word)}, certificate claims {list(cert.end)}")
        return CertificateCheck(True)

    def neighbors(self, word: IdemWord, max_len: int) -> Iterator[Tuple[RewriteStep, IdemWord]]:
        biorder = self.biorder
        for pos in range(len(word) - 1):
            e, f = word[pos], word[pos + 1]
            if biorder.is_basic(e, f):
                yield RewriteStep(pos, CONTRACT, e, f), word[:pos] + (biorder.product(e, f),) + word[pos + 2:]
        if len(word) < max_len:
            for pos, x in enumerate(word):
                for e, f in biorder.factorizations[x]:
                    yield RewriteStep(pos, EXPAND, e, f), word[:pos] + (e, f) + word[pos + 1:]

    def derive_equal(
        self,
        w1: Sequence[int],
        w2: Sequence[int],
        max_len: Optional[int] = None,
        max_states: Optional[int] = None,
    ) -> SearchResult:
        """Bounded bidirectional breadth-first search for a derivation w1 ~ w2.

        A different phi-image is a definite "unequal"; running out of bounds
        is "not-found", which says nothing about equality in IG(E).
        """
        w1, w2 = self.check_word(w1), self.check_word(w2)
        if self.phi_id(w1) != self.phi_id(w2):
            return SearchResult(UNEQUAL, detail="phi-images differ")
        if w1 == w2:
            return SearchResult(EQUAL, DerivationCertificate(w1, (), w2), states=1)
        max_len = max(len(w1), len(w2)) + Config.WORD_LEN_SLACK if max_len is None else max_len
        max_states = Config.MAX_STATES if max_states is None else max_states

        # parent maps: word -> (previous word, step taking previous to word)
        fwd: Dict[IdemWord, Optional[Tuple[IdemWord, RewriteStep]]] = {w1: None}
        bwd: Dict[IdemWord, Optional[Tuple[IdemWord, RewriteStep]]] = {w2: None}
        fwd_layer: List[IdemWord] = [w1]
        bwd_layer: List[IdemWord] = [w2]

        while fwd_layer and bwd_layer:
            forward = len(fwd_layer) <= len(bwd_layer)
            seen, other = (fwd, bwd) if forward else (bwd, fwd)
            layer = fwd_layer if forward else bwd_layer
            nxt: List[IdemWord] = []
            for word in layer:
                for step, new in self.neighbors(word, max_len):
                    if new in seen:
                        continue
                    seen[new] = (word, step)
                    if new in other:
                        cert = self._join(new, fwd, bwd, w1, w2)
                        return SearchResult(EQUAL, cert, states=len(fwd) + len(bwd))
                    nxt.append(new)
                    if len(fwd) + len(bwd) > max_states:
                        return SearchResult(NOT_FOUND, states=len(fwd) + len(bwd), detail=f"state bound {max_states} reached")
            if forward:
                fwd_layer = nxt
            else:
                bwd_layer = nxt
        return SearchResult(NOT_FOUND, states=len(fwd) + len(bwd), detail=f"search space exhausted at length {max_len}")

    @staticmethod
    def _join(meet, fwd, bwd, w1: IdemWord, w2: IdemWord) -> DerivationCertificate:
        head: List[RewriteStep] = []
        word = meet
        while fwd[word] is not None:
            prev, step = fwd[word]
            head.append(step)
            word = prev
        head.reverse()
        tail: List[RewriteStep] = []
        word = meet
        while bwd[word] is not None:
            prev, step = bwd[word]
            tail.append(step.inverse())
            word = prev
        return DerivationCertificate(w1, tuple(head + tail), w2)


class CertificateBuilder:
    def __init__(self, engine: RewriteEngine, start: Sequence[int]) -> None:
        self.engine = engine
        self.start: IdemWord = engine.check_word(start)
        self.word: IdemWord = self.start
        self.steps: List[RewriteStep] = []

    def apply(self, step: RewriteStep) -> "CertificateBuilder":
        self.word = self.engine.apply_step(self.word, step)
        self.steps.append(step)
        return self

    def contract(self, pos: int) -> "CertificateBuilder":
        if not (0 <= pos < len(self.word) - 1):
            raise ValueError(f"contract position {pos} out of range for word of length {len(self.word)}")
        return self.apply(RewriteStep(pos, CONTRACT, self.word[pos], self.word[pos + 1]))

    def expand(self, pos: int, e: int, f: int) -> "CertificateBuilder":
        return self.apply(RewriteStep(pos, EXPAND, e, f))

    def splice(self, pos: int, cert: DerivationCertificate) -> "CertificateBuilder":
        span = self.word[pos:pos + len(cert.start)]
        if span != cert.start:
            raise ValueError(f"subword at {pos} is {list(span)}, certificate starts from {list(cert.start)}")
        for step in cert.steps:
            self.apply(step.shifted(pos))
        return self

    def finish(self) -> DerivationCertificate:
        return DerivationCertificate(self.start, tuple(self.steps), self.word)
