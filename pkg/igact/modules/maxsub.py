"""The maximal subgroup of IG(E) containing e_11, and its identification with G."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import VerificationError
from .logger import get_logger
from .rees import ReesDecomposition
from .scripts import LemmaReplayer
from .words import CertificateBuilder, DerivationCertificate, IdemWord, RewriteEngine


@dataclass(frozen=True)
class WGenerator:
    """The generator w_a = e11 e_{row,2} e11 of the subgroup, a in G."""

    a: int
    row: int
    word: IdemWord

    def to_document(self) -> Dict[str, object]:
        return {"a": self.a, "row": self.row, "word": list(self.word)}


@dataclass
class ReductionTrace:
    word: IdemWord
    factors: List[Tuple[int, int]]
    result: int
    certificate: Optional[DerivationCertificate] = None

    def to_document(self) -> Dict[str, object]:
        return {
            "word": list(self.word),
            "factors": [list(f) for f in self.factors],
            "result": self.result,
            "certificate": self.certificate.to_document() if self.certificate else None,
        }


@dataclass
class EvalCheck:
    words: int = 0
    agreed: int = 0
    mismatches: List[str] = field(default_factory=list)


class MaximalSubgroup:
    """Canonical words, generators and the word reduction for H-bar_{e11}."""

    def __init__(
        self,
        rees: ReesDecomposition,
        engine: RewriteEngine,
        replayer: LemmaReplayer,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        if rees.n < 3:
            raise ValueError(f"the subgroup presentation requires n >= 3, got n = {rees.n}")
        self.rees = rees
        self.group = rees.group
        self.engine = engine
        self.replayer = replayer
        self.logger = get_logger(logger)
        self.e11 = rees.e(1, 1)

    def canonical_word(self, a: int) -> IdemWord:
        return self.replayer.canonical_word(a)

    def generator(self, a: int) -> WGenerator:
        return WGenerator(a=a, row=self.replayer.canonical_row(a), word=self.canonical_word(a))

    def element_of(self, i: int, j: int) -> int:
        """The element a with e11 eij e11 = w_a, namely p_ji^{-1}."""
        return self.group.inv(self.rees.p(j, i))

    def g_of(self, i: int, j: int) -> WGenerator:
        return self.generator(self.element_of(i, j))

    def _letters(self, word: Sequence[int]) -> List[Tuple[int, int]]:
        coords = []
        for x in word:
            if not self.rees.is_d_idempotent(x):
                raise ValueError(f"letter {x} is not an idempotent of the rank-1 D-class")
            coords.append(self.rees.coords_of_idempotent(x))
        return coords

    def reduce_to_w(self, word: Sequence[int], certify: bool = True) -> ReductionTrace:
        """Rewrite a word whose phi-image lies in H_11 to the canonical word W(a).

        The word is sandwiched between e11 letters and cut into factors
        e11 e_{1,j_{t-1}} e_{i_t j_t} e11; each factor becomes a generator and the
        generators are multiplied out. With certify=False only a is computed.
        """
        word = self.engine.check_word(word)
        coords = self._letters(word)
        try:
            expected = self.rees.iso.psi(self.engine.phi_id(word))
        except ValueError:
            raise ValueError(f"word {list(word)} does not evaluate into H_11")

        inner = list(coords)
        if inner and inner[0] == (1, 1):
            inner = inner[1:]
        if inner and inner[-1] == (1, 1):
            inner = inner[:-1]
        # a single e11 letter trims away completely
        if len(word) == 1:
            inner = []

        group = self.group
        result = 0
        prev_col = 1
        for i, j in inner:
            result = group.mul(result, group.mul(group.inv(self.element_of(i, prev_col)), self.element_of(i, j)))
            prev_col = j
        if result != expected:
            raise VerificationError(f"reduction of {list(word)} gives {result}, phi-image gives {expected}")

        trace = ReductionTrace(word=word, factors=inner, result=result)
        if certify:
            trace.certificate = self._certify(word, inner)
        return trace

    def _certify(self, word: IdemWord, inner: List[Tuple[int, int]]) -> DerivationCertificate:
        e11, e = self.e11, self.rees.e
        b = CertificateBuilder(self.engine, word)
        if b.word[0] != e11:
            b.expand(0, e11, b.word[0])
        if b.word[-1] != e11:
            last = len(b.word) - 1
            b.expand(last, b.word[last], e11)
        if len(b.word) == 2:
            b.contract(0)
        if len(b.word) == 1:
            return b.finish()

        b.expand(0, e11, e11)
        pos = 2
        for i, j in inner[:-1]:
            y = b.word[pos]
            b.expand(pos, y, e(1, j))
            b.expand(pos + 1, e11, e(1, j))
            b.expand(pos + 1, e11, e11)
            pos += 4

        acc = None
        offset = 0
        prev_col = 1
        for i, j in inner:
            a_t = self._reduce_factor(b, offset, prev_col, i, j)
            if acc is None:
                acc = a_t
            else:
                b.splice(0, self.replayer.replay("homomorphism", acc, a_t))
                acc = self.group.mul(acc, a_t)
            offset = len(self.canonical_word(acc))
            prev_col = j

        cert = b.finish()
        if cert.end != self.canonical_word(acc):
            raise VerificationError(f"reduction of {list(word)} ended at {list(cert.end)}")
        return cert

    def _reduce_factor(self, b: CertificateBuilder, off: int, t: int, i: int, j: int) -> int:
        """[e11, e1t, eij, e11] at off becomes W(g_of(i,t)^{-1} g_of(i,j))."""
        group, replay = self.group, self.replayer.replay
        e11 = self.e11
        g_t = self.element_of(i, t)
        g_j = self.element_of(i, j)
        g_t_inv = group.inv(g_t)
        b.expand(off, e11, e11)
        b.splice(off, replay("homomorphism", g_t_inv, g_t).reversed())
        left = len(self.canonical_word(g_t_inv))
        b.splice(off + left, replay("canonical", g_t, i, t))
        b.splice(off + left, replay("factor", t, i, j))
        b.splice(off + left, replay("canonical", g_j, i, j).reversed())
        b.splice(off, replay("homomorphism", g_t_inv, g_j))
        return group.mul(g_t_inv, g_j)

    def eval_word(self, word: Sequence[int]) -> int:
        return self.reduce_to_w(word, certify=False).result

    def eval_is_phi(self, words: Sequence[Sequence[int]]) -> EvalCheck:
        check = EvalCheck()
        for word in words:
            check.words += 1
            try:
                value = self.eval_word(word)
            except (ValueError, VerificationError) as exc:
                check.mismatches.append(f"{list(word)}: {exc}")
                continue
            if value == self.rees.iso.psi(self.engine.phi_id(word)):
                check.agreed += 1
            else:
                check.mismatches.append(f"{list(word)}: eval {value}")
        return check
