"""End-to-end machine check that the maximal subgroup of IG(E) at e11 is G.

Structural audits come first (monoid, Green's relations, Rees form, squares),
then every relation family is replayed as certificates, and finally the map
H-bar -> G is tested for surjectivity, for being a homomorphism and for
being injective on seeded random words, which are also perturbed by random
rewriting to check that evaluation ignores the chosen representative.
"""

import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..config.config import Config, RunConfig
from .errors import ResourceBoundError, VerificationError
from .group import FiniteGroup, check_group_axioms
from .logger import get_logger, log_audit
from .maxsub import MaximalSubgroup
from .monoid import check_associativity, greens_generic, greens_structural, rank_one_shape
from .pipeline import Pipeline
from .reports import write_certificate
from .rees import ReesCoords
from .scripts import RULE_ORDER
from .words import IdemWord


VERIFIED = "VERIFIED"
FALSIFIED = "FALSIFIED"


@dataclass
class AuditResult:
    name: str
    passed: bool
    detail: Any = None

    def to_document(self) -> Dict[str, Any]:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass
class TheoremReport:
    group: str
    n: int
    counts: Dict[str, int] = field(default_factory=dict)
    audits: List[AuditResult] = field(default_factory=list)
    certificates: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return VERIFIED if all(a.passed for a in self.audits) else FALSIFIED

    def failed(self) -> List[AuditResult]:
        return [a for a in self.audits if not a.passed]

    def to_document(self) -> Dict[str, Any]:
        return {
            "group": self.group,
            "n": self.n,
            "counts": dict(self.counts),
            "audits": [a.to_document() for a in sorted(self.audits, key=lambda a: a.name)],
            "certificates": sorted(self.certificates),
            "verdict": self.verdict,
        }


def sample_hbar_words(pipeline: Pipeline, rng: random.Random, count: int, max_len: int) -> List[IdemWord]:
    """Random words over D-idempotents starting in row 1 and ending in column 1."""
    rees = pipeline.rees
    letters = sorted(rees.e_ids.values())
    e11 = rees.e(1, 1)
    words = []
    for _ in range(count):
        length = rng.randint(1, max_len)
        if length == 1:
            words.append((e11,))
            continue
        middle = tuple(rng.choice(letters) for _ in range(length - 2))
        first = rees.e(1, rng.choice(rees.col_ids))
        last = rees.e(rng.choice(rees.row_ids), 1)
        words.append((first,) + middle + (last,))
    return words


class Perturber:
    """Random rewriting walk restricted to basic pairs of D-idempotents."""

    def __init__(self, pipeline: Pipeline) -> None:
        rees, biorder = pipeline.rees, pipeline.biorder
        self.biorder = biorder
        self.in_d = rees.is_d_idempotent
        self.splits: Dict[int, List[Tuple[int, int]]] = {
            x: [(e, f) for e, f in biorder.factorizations[x] if self.in_d(e) and self.in_d(f)]
            for x in rees.e_ids.values()
        }

    def step(self, word: IdemWord, rng: random.Random, max_len: int) -> IdemWord:
        contractions = [
            pos for pos in range(len(word) - 1) if self.biorder.is_basic(word[pos], word[pos + 1])
        ]
        if contractions and (len(word) >= max_len or rng.random() < 0.5):
            pos = rng.choice(contractions)
            return word[:pos] + (self.biorder.product(word[pos], word[pos + 1]),) + word[pos + 2:]
        if len(word) >= max_len:
            return word
        pos = rng.randrange(len(word))
        e, f = rng.choice(self.splits[word[pos]])
        return word[:pos] + (e, f) + word[pos + 1:]


class TheoremVerifier:
    def __init__(
        self,
        pipeline: Pipeline,
        out_dir: Optional[Union[str, Path]] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        if pipeline.n < 3:
            raise ValueError(f"verification requires n >= 3, got n = {pipeline.n}")
        self.pipeline = pipeline
        self.config: RunConfig = pipeline.config
        self.out_dir = Path(out_dir) if out_dir else None
        self.logger = get_logger(logger or pipeline.logger)
        self.report = TheoremReport(group=pipeline.group.name, n=pipeline.n)
        self.certificates_verified = 0

    def _audit(self, name: str, check: Callable[[], Any]) -> AuditResult:
        try:
            result = AuditResult(name, True, check())
        except VerificationError as exc:
            result = AuditResult(name, False, str(exc))
        log_audit(self.logger, name, result.passed, result.detail)
        self.report.audits.append(result)
        return result

    def run(self) -> TheoremReport:
        p = self.pipeline
        self.logger.info(f"Verifying the maximal subgroup theorem for {p.group.name}, n = {p.n}")
        self._structural_audits()
        self._lemma_audits()
        sub = p.subgroup
        self._audit("surjectivity", lambda: self._check_surjective(sub))
        self._audit("homomorphism-table", lambda: self._check_homomorphism(sub))
        words = sample_hbar_words(p, random.Random(self.config.seed), self.config.sample_words, self.config.max_sample_len)
        self._audit("injectivity", lambda: self._check_injective(sub, words))
        self._audit("rewrite-invariance", lambda: self._check_perturbations(sub, words))

        squares = self._squares
        self.report.counts.update({
            "group_order": p.group.order,
            "monoid": p.monoid.size,
            "idempotents": len(p.monoid.idempotents),
            "d_class": len(p.monoid.rank_one),
            "rows": len(p.rees.rows),
            "columns": p.n,
            "squares": squares.total if squares else 0,
            "rect_band": squares.rect_band if squares else 0,
            "singular": squares.singular if squares else 0,
            "sampled_words": len(words),
            "certificates_verified": self.certificates_verified,
        })
        self.logger.info(f"Verdict for {p.group.name}, n = {p.n}: {self.report.verdict}")
        return self.report

    # --- structural audits
    _squares = None

    def _structural_audits(self) -> None:
        p = self.pipeline
        monoid = p.monoid

        def group_axioms():
            err = check_group_axioms(p.group.table)
            if err:
                raise VerificationError(err)
            return f"order {p.group.order}"

        def size():
            expected = (p.group.order * p.n) ** p.n
            if monoid.size != expected:
                raise VerificationError(f"{monoid.size} elements, expected {expected}")
            return monoid.size

        def associativity():
            triple = check_associativity(monoid, seed=self.config.seed)
            if triple is not None:
                raise VerificationError(f"associativity fails at {triple}")
            return "ok"

        structural = greens_structural(monoid)

        def greens():
            try:
                generic = greens_generic(monoid, cap=self.config.generic_cap)
            except ResourceBoundError as exc:
                return f"skipped: {exc}"
            diff = structural.discrepancies(generic)
            if any(diff.values()):
                raise VerificationError(f"structural and generic Green's relations differ: {diff}")
            return {rel: structural.count(rel) for rel in ("r", "l", "h", "d")}

        def shape():
            found = rank_one_shape(monoid, structural)
            m, n = p.group.order, p.n
            expected = {
                "size": n * m ** n, "r_classes": m ** (n - 1), "l_classes": n,
                "h_classes": n * m ** (n - 1), "h_size": m, "one_idempotent_per_h": 1,
            }
            if found != expected:
                raise VerificationError(f"rank-1 D-class shape {found}, expected {expected}")
            return found

        def h11_iso():
            p.rees.iso.verify()
            return "psi: H_11 -> G is an isomorphism"

        def h_classes():
            return self._check_h_classes()

        self._audit("group-axioms", group_axioms)
        self._audit("monoid-size", size)
        self._audit("associativity", associativity)
        self._audit("greens-relations", greens)
        self._audit("rank-one-shape", shape)
        self._audit("h11-isomorphism", h11_iso)
        self._audit("rank-one-h-classes", h_classes)
        self._audit("rees-decomposition", lambda: p.rees.audit(seed=self.config.seed))
        self._audit("basic-closure", p.biorder.check_basic_closure)

        def squares():
            self._squares = p.squares()
            return self._squares.counts()

        self._audit("e-squares", squares)

    def _check_h_classes(self) -> str:
        """Every H-class (i, *, j) of the rank-1 D-class is a group via g -> g p_ji."""
        rees, monoid, group = self.pipeline.rees, self.pipeline.monoid, self.pipeline.group
        for i in rees.row_ids:
            for j in rees.col_ids:
                p_ji = rees.p(j, i)
                ids = [monoid.id_of(rees.from_coords(ReesCoords(i, g, j))) for g in group.elements()]
                for g in group.elements():
                    for h in group.elements():
                        got = rees.to_coords(monoid.compose_ids(ids[g], ids[h]))
                        theta = group.mul(got.g, p_ji)
                        if (got.i, got.j) != (i, j) or theta != group.mul(group.mul(g, p_ji), group.mul(h, p_ji)):
                            raise VerificationError(f"H-class ({i}, {j}) is not isomorphic to G at ({g}, {h})")
        return f"{len(rees.rows) * rees.n} H-classes"

    # --- relation families
    def _lemma_audits(self) -> None:
        replayer = self.pipeline.replayer
        for rule in RULE_ORDER:
            def family(rule=rule):
                result = replayer.replay_family(
                    rule,
                    seed=self.config.seed,
                    sample=self.config.lemma_sample,
                    exhaustive_limit=self.config.lemma_limit,
                )
                self.certificates_verified += result.verified
                if not result.passed:
                    raise VerificationError(f"{rule}: {len(result.failures)} failures, first {result.failures[:1]}")
                return result.to_document()

            self._audit(f"lemma:{rule}", family)

    # --- the isomorphism
    def _check_surjective(self, sub: MaximalSubgroup) -> str:
        psi, phi = self.pipeline.rees.iso.psi, self.pipeline.engine.phi_id
        for a in self.pipeline.group.elements():
            word = sub.canonical_word(a)
            if psi(phi(word)) != a:
                raise VerificationError(f"canonical word of {a} evaluates to {psi(phi(word))}")
            if sub.eval_word(word) != a:
                raise VerificationError(f"canonical word of {a} reduces to {sub.eval_word(word)}")
        return f"{self.pipeline.group.order} generators hit"

    def _check_homomorphism(self, sub: MaximalSubgroup) -> str:
        group, engine, replay = self.pipeline.group, self.pipeline.engine, self.pipeline.replayer.replay
        for u in group.elements():
            for v in group.elements():
                cert = replay("homomorphism", u, v)
                check = engine.verify_certificate(cert)
                if not check:
                    raise VerificationError(f"w_{u} w_{v}: step {check.failed_step}: {check.reason}")
                if cert.end != sub.canonical_word(group.mul(u, v)):
                    raise VerificationError(f"w_{u} w_{v} does not end at w_{group.mul(u, v)}")
                if sub.eval_word(cert.start) != group.mul(u, v):
                    raise VerificationError(f"eval(w_{u} w_{v}) != {group.mul(u, v)}")
                self.certificates_verified += 1
                if self.out_dir is not None:
                    path = write_certificate(
                        self.out_dir / "certificates" / f"homomorphism_{u}_{v}.json", cert, f"w_{u} w_{v} = w_{group.mul(u, v)}"
                    )
                    self.report.certificates.append(str(path))
        # inverses: w_{a^-1} w_a = e11
        e11 = (self.pipeline.rees.e(1, 1),)
        for a in group.elements():
            if replay("homomorphism", group.inv(a), a).end != e11:
                raise VerificationError(f"w_{group.inv(a)} w_{a} is not e11")
        return f"{group.order ** 2} products certified, {group.order} inverses"

    def _check_injective(self, sub: MaximalSubgroup, words: Sequence[IdemWord]) -> Dict[str, int]:
        """Words with equal phi-image reduce, by verified certificates, to the same canonical word."""
        engine, psi = self.pipeline.engine, self.pipeline.rees.iso.psi
        classes: Dict[int, IdemWord] = {}
        for word in words:
            image = psi(engine.phi_id(word))
            trace = sub.reduce_to_w(word)
            check = engine.verify_certificate(trace.certificate)
            if not check:
                raise VerificationError(f"reduction of {list(word)} fails at step {check.failed_step}: {check.reason}")
            if trace.result != image:
                raise VerificationError(f"eval({list(word)}) = {trace.result} but phi gives {image}")
            end = classes.setdefault(image, trace.certificate.end)
            if trace.certificate.end != end:
                raise VerificationError(f"words with image {image} reach different canonical words")
            self.certificates_verified += 1
        return {"words": len(words), "classes": len(classes)}

    def _check_perturbations(self, sub: MaximalSubgroup, words: Sequence[IdemWord]) -> Dict[str, int]:
        rng = random.Random(f"{self.config.seed}:perturb")
        walker = Perturber(self.pipeline)
        max_len = self.config.max_word_len or self.config.max_sample_len + Config.WORD_LEN_SLACK
        checked = 0
        for word in words:
            expected = sub.eval_word(word)
            current = word
            for _ in range(self.config.perturbations):
                current = walker.step(current, rng, max_len)
                if sub.eval_word(current) != expected:
                    raise VerificationError(f"eval changed from {expected} along a rewrite of {list(word)} to {list(current)}")
                checked += 1
        return {"words": len(words), "steps": checked}


def verify_theorem(
    group: Union[FiniteGroup, str],
    n: int,
    config: Optional[RunConfig] = None,
    out_dir: Optional[Union[str, Path]] = None,
    logger: Optional[logging.Logger] = None,
) -> TheoremReport:
    config = config or RunConfig()
    if isinstance(group, str):
        pipeline = Pipeline(replace(config, group=group, rank=n), logger=logger)
    else:
        pipeline = Pipeline(replace(config, group=group.name, rank=n), group=group, logger=logger)
    return TheoremVerifier(pipeline, out_dir=out_dir, logger=logger).run()
