"""Proof scripts for relations in IG(E), and the interpreter that replays them.

A script is data: a start word, an end word and a list of moves over symbolic
letters. Symbols are small expressions over the rule's parameters:

    e(i,j)            the idempotent e_ij of the rank-1 D-class
    W(a)              the canonical word of the generator w_a (one or three letters)
    updown(i,j,k,l)   first up-down singularizer of the square with rows i,k and columns j,l
    p(j,i)            sandwich entry; id is the identity of G
    inv(x), mul(x,y)  group operations
    row(x,y)          row whose kernel tuple is (x, y, id, ..., id)
    const_row(x)      row whose kernel tuple is (x, ..., x)
    canon_row(a)      row of the canonical word of w_a, tuple (a^-1, id, ..., id)
    eprod(i,j,k,l)    the product e_ij e_kl

Moves are Contract(pos), Expand(pos, left, right) and Use(rule, pos, args),
which splices in the certificate of another rule (optionally reversed).
"""

import logging
import random
import re
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from ..config.config import Config
from .biorder import UP_DOWN, BiorderedSet, ESquare, find_singularizer
from .errors import HypothesisError, VerificationError
from .logger import get_logger, log_certificate
from .rees import ReesDecomposition
from .words import EQUAL, CertificateBuilder, DerivationCertificate, IdemWord, RewriteEngine


@dataclass(frozen=True)
class Contract:
    pos: int


@dataclass(frozen=True)
class Expand:
    pos: int
    left: str
    right: str


@dataclass(frozen=True)
class Use:
    rule: str
    pos: int
    args: Tuple[str, ...]
    reverse: bool = False


Move = Union[Contract, Expand, Use]


@dataclass(frozen=True)
class Case:
    steps: Tuple[Move, ...]
    when: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Rule:
    name: str
    params: Tuple[str, ...]  # "name:kind", kind in row | col | elem
    start: Tuple[str, ...]
    end: Tuple[str, ...]
    cases: Tuple[Case, ...]
    requires: Tuple[Tuple[str, str], ...] = ()
    derive: Tuple[Tuple[str, str], ...] = ()
    min_rank: int = 1
    summary: str = ""


RULES: Dict[str, Rule] = {r.name: r for r in (
    Rule(
        "product",
        params=("i:row", "j:col", "k:row", "l:col"),
        requires=(("eprod(i,j,k,l)", "e(i,l)"),),
        start=("e(i,j)", "e(k,l)"),
        end=("e(i,l)",),
        cases=(Case((Expand(1, "updown(i,j,k,l)", "e(i,l)"), Contract(0), Contract(0))),),
        summary="ef = g for idempotents of D gives e f = g in IG(E)",
    ),
    Rule(
        "inverse",
        params=("i:row", "j:col"),
        start=("e(1,1)", "e(i,j)", "e(1,1)", "e(1,j)", "e(i,1)"),
        end=("e(1,1)",),
        cases=(Case((Contract(2), Contract(1), Contract(1), Contract(0))),),
        summary="e1j ei1 is inverse to e11 eij e11",
    ),
    Rule(
        "trivial-generator",
        params=("i:row", "j:col"),
        requires=(("p(j,i)", "id"),),
        start=("e(1,1)", "e(i,j)", "e(1,1)"),
        end=("e(1,1)",),
        cases=(Case((Use("product", 2, ("1", "j", "i", "1"), reverse=True), Contract(1), Contract(1), Contract(0))),),
        summary="p_ji = 1 gives e11 eij e11 = e11",
    ),
    Rule(
        "row-equality",
        params=("i:row", "l:row", "j:col"),
        requires=(("p(j,i)", "p(j,l)"),),
        start=("e(1,1)", "e(i,j)", "e(1,1)"),
        end=("e(1,1)", "e(l,j)", "e(1,1)"),
        cases=(Case((Use("product", 1, ("i", "1", "l", "j"), reverse=True), Contract(0))),),
        summary="p_ji = p_jl gives e11 eij e11 = e11 elj e11",
    ),
    Rule(
        "column-equality",
        params=("i:row", "j:col", "k:col"),
        requires=(("p(j,i)", "p(k,i)"),),
        start=("e(1,1)", "e(i,j)", "e(1,1)"),
        end=("e(1,1)", "e(i,k)", "e(1,1)"),
        cases=(Case((Use("product", 1, ("i", "k", "1", "j"), reverse=True), Contract(2))),),
        summary="p_ji = p_ki gives e11 eij e11 = e11 eik e11",
    ),
    Rule(
        "generator-equality",
        params=("i:row", "j:col", "i2:row", "j2:col"),
        requires=(("p(j,i)", "p(j2,i2)"),),
        derive=(("c", "const_row(p(j,i))"),),
        start=("e(1,1)", "e(i,j)", "e(1,1)"),
        end=("e(1,1)", "e(i2,j2)", "e(1,1)"),
        cases=(Case((
            Use("row-equality", 0, ("i", "c", "j")),
            Use("column-equality", 0, ("c", "j", "j2")),
            Use("row-equality", 0, ("c", "i2", "j2")),
        )),),
        summary="equal sandwich entries give equal generators",
    ),
    Rule(
        "factor",
        params=("t:col", "i:row", "j:col"),
        start=("e(1,1)", "e(i,t)", "e(1,1)", "e(1,1)", "e(1,t)", "e(i,j)", "e(1,1)"),
        end=("e(1,1)", "e(i,j)", "e(1,1)"),
        cases=(Case((Contract(2), Contract(2), Contract(1), Contract(1))),),
        summary="(e11 eit e11)(e11 e1t eij e11) = e11 eij e11",
    ),
    Rule(
        "canonical",
        params=("a:elem", "i:row", "j:col"),
        requires=(("p(j,i)", "inv(a)"),),
        start=("W(a)",),
        end=("e(1,1)", "e(i,j)", "e(1,1)"),
        cases=(
            Case((Use("trivial-generator", 0, ("i", "j"), reverse=True),), when=(("a", "id"),)),
            Case((Use("generator-equality", 0, ("canon_row(a)", "2", "i", "j")),)),
        ),
        min_rank=2,
        summary="canonical word of w_a equals e11 eij e11 whenever p_ji = a^-1",
    ),
    Rule(
        "homomorphism",
        params=("u:elem", "v:elem"),
        derive=(("i", "row(inv(u),inv(mul(u,v)))"), ("l", "row(id,inv(v))")),
        start=("W(u)", "W(v)"),
        end=("W(mul(u,v))",),
        cases=(Case((
            Use("canonical", 0, ("u", "i", "2")),
            Use("canonical", 3, ("v", "l", "3")),
            Contract(2),
            Use("product", 2, ("1", "2", "l", "1"), reverse=True),
            Contract(1),
            Contract(2),
            Use("product", 1, ("i", "2", "l", "3")),
            Use("canonical", 0, ("mul(u,v)", "i", "3"), reverse=True),
        )),),
        min_rank=3,
        summary="w_u w_v = w_uv",
    ),
)}

# replay order used by reports
RULE_ORDER = (
    "product", "inverse", "trivial-generator", "row-equality", "column-equality",
    "generator-equality", "factor", "canonical", "homomorphism",
)

# numbered aliases accepted on the command line
RULE_ALIASES = {
    "3.2": "product",
    "3.3": "product",
    "3.5": "inverse",
    "3.6": "trivial-generator",
    "3.7i": "row-equality",
    "3.7(i)": "row-equality",
    "3.7ii": "column-equality",
    "3.7(ii)": "column-equality",
    "3.8": "generator-equality",
    "3.9": "homomorphism",
}


def resolve_rule(name: str) -> str:
    name = name.strip()
    rule = RULE_ALIASES.get(name.lower(), name)
    if rule not in RULES:
        known = ", ".join(RULE_ORDER + tuple(RULE_ALIASES))
        raise ValueError(f"unknown rule {name!r}; known: {known}")
    return rule


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+|[(),])")


def parse_expr(text: str):
    """Parse an expression into nested tuples: ("call", name, args) | ("name", x) | ("int", n)."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise ValueError(f"cannot parse expression {text!r}")
    pos = 0

    def parse():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok.isdigit():
            return ("int", int(tok))
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            args = []
            while tokens[pos] != ")":
                args.append(parse())
                if tokens[pos] == ",":
                    pos += 1
            pos += 1
            return ("call", tok, tuple(args))
        return ("name", tok)

    tree = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing input in expression {text!r}")
    return tree


@dataclass
class FamilyResult:
    rule: str
    instances: int
    replayed: int = 0
    verified: int = 0
    failures: List[str] = field(default_factory=list)
    certificates: List[Tuple[Tuple[int, ...], DerivationCertificate]] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return not self.failures and self.verified == self.replayed

    def to_document(self) -> Dict[str, object]:
        return {
            "rule": self.rule,
            "instances": self.instances,
            "replayed": self.replayed,
            "verified": self.verified,
            "failures": self.failures[:20],
            "pass": self.passed,
        }


class LemmaReplayer:
    def __init__(
        self,
        engine: RewriteEngine,
        rees: ReesDecomposition,
        max_states: Optional[int] = None,
        logger: Optional[logging.Logger] = None,
        cache_size: Optional[int] = None,
    ) -> None:
        self.engine = engine
        self.rees = rees
        self.biorder: BiorderedSet = engine.biorder
        self.group = rees.group
        self.max_states = max_states
        self.logger = get_logger(logger)
        self.cache_size = Config.REPLAY_CACHE_SIZE if cache_size is None else cache_size
        self._cache: Dict[Tuple[str, Tuple[int, ...]], DerivationCertificate] = OrderedDict()
        self._parsed: Dict[str, tuple] = {}

    # --- expression evaluation
    def _tree(self, text: str):
        tree = self._parsed.get(text)
        if tree is None:
            tree = self._parsed[text] = parse_expr(text)
        return tree

    def canonical_row(self, a: int) -> int:
        n = self.rees.n
        return self.rees.column_for_tuple((self.group.inv(a),) + (0,) * (n - 2))

    def canonical_word(self, a: int) -> IdemWord:
        e11 = self.rees.e(1, 1)
        if a == 0:
            return (e11,)
        return (e11, self.rees.e(self.canonical_row(a), 2), e11)

    def _padded_row(self, values: Sequence[int]) -> int:
        n = self.rees.n
        if len(values) > n - 1:
            raise HypothesisError(f"row tuple {tuple(values)} needs rank >= {len(values) + 1}")
        return self.rees.column_for_tuple(tuple(values) + (0,) * (n - 1 - len(values)))

    def evaluate(self, text: str, env: Dict[str, int]) -> Union[int, IdemWord]:
        return self._eval(self._tree(text), env)

    def _eval(self, tree, env: Dict[str, int]):
        kind = tree[0]
        if kind == "int":
            return tree[1]
        if kind == "name":
            if tree[1] == "id":
                return 0
            try:
                return env[tree[1]]
            except KeyError:
                raise ValueError(f"unbound symbol {tree[1]!r}")
        _, name, args = tree
        vals = [self._eval(a, env) for a in args]
        rees, group = self.rees, self.group
        if name == "e":
            return rees.e(*vals)
        if name == "p":
            return rees.p(*vals)
        if name == "inv":
            return group.inv(*vals)
        if name == "mul":
            return group.mul(*vals)
        if name == "row":
            return self._padded_row(vals)
        if name == "const_row":
            return rees.column_for_tuple((vals[0],) * (rees.n - 1))
        if name == "canon_row":
            return self.canonical_row(vals[0])
        if name == "W":
            return self.canonical_word(vals[0])
        if name == "eprod":
            i, j, k, l = vals
            return self.biorder.product(rees.e(i, j), rees.e(k, l))
        if name == "updown":
            i, j, k, l = vals
            sq = ESquare(rows=(i, k), cols=(j, l), e=rees.e(i, j), f=rees.e(i, l), g=rees.e(k, l), h=rees.e(k, j))
            witness = find_singularizer(sq, self.biorder, UP_DOWN)
            if witness is None:
                raise ValueError(f"no up-down singularizer for square rows {(i, k)} cols {(j, l)}")
            return witness.k
        raise ValueError(f"unknown function {name!r}")

    def _word(self, template: Sequence[str], env: Dict[str, int]) -> IdemWord:
        out: List[int] = []
        for sym in template:
            value = self.evaluate(sym, env)
            if isinstance(value, tuple):
                out.extend(value)
            else:
                out.append(value)
        return tuple(out)

    def bind(self, rule: Rule, values: Sequence[int]) -> Dict[str, int]:
        if len(values) != len(rule.params):
            raise ValueError(f"rule {rule.name} takes {len(rule.params)} parameters, got {len(values)}")
        if self.rees.n < rule.min_rank:
            raise HypothesisError(f"rule {rule.name} requires n >= {rule.min_rank}")
        limits = {"row": (1, len(self.rees.rows)), "col": (1, self.rees.n), "elem": (0, self.group.order - 1)}
        env: Dict[str, int] = {}
        for spec, value in zip(rule.params, values):
            name, kind = spec.split(":")
            lo, hi = limits[kind]
            if not (lo <= int(value) <= hi):
                raise ValueError(f"parameter {name}={value} of {rule.name} outside [{lo}, {hi}]")
            env[name] = int(value)
        for name, expr in rule.derive:
            env[name] = self.evaluate(expr, env)
        return env

    def check_hypotheses(self, rule: Rule, env: Dict[str, int]) -> None:
        for lhs, rhs in rule.requires:
            if self.evaluate(lhs, env) != self.evaluate(rhs, env):
                raise HypothesisError(f"{rule.name}{tuple(env.values())}: hypothesis {lhs} = {rhs} fails")

    # --- replay
    def replay(self, rule_name: str, *values: int) -> DerivationCertificate:
        key = (rule_name, tuple(int(v) for v in values))
        cert = self._cache.get(key)
        if cert is not None:
            self._cache.move_to_end(key)
            return cert
        cert = self._replay(rule_name, key[1])
        if self.cache_size > 0:
            self._cache[key] = cert
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return cert

    def _replay(self, rule_name: str, values: Tuple[int, ...]) -> DerivationCertificate:
        try:
            rule = RULES[rule_name]
        except KeyError:
            raise ValueError(f"unknown rule {rule_name!r}; known: {', '.join(RULE_ORDER)}")
        env = self.bind(rule, values)
        self.check_hypotheses(rule, env)
        start = self._word(rule.start, env)
        end = self._word(rule.end, env)
        if start == end:
            return DerivationCertificate(start, (), end)

        case = next(c for c in rule.cases if all(self.evaluate(a, env) == self.evaluate(b, env) for a, b in c.when))
        builder = CertificateBuilder(self.engine, start)
        try:
            for move in case.steps:
                self._run(builder, move, env)
            if builder.word != end:
                raise ValueError(f"script ends at {list(builder.word)}, expected {list(end)}")
            cert = builder.finish()
        except ValueError as exc:
            self.logger.warning(f"Script for {rule_name}{values} stalled ({exc}); searching instead")
            result = self.engine.derive_equal(start, end, max_states=self.max_states)
            if result.verdict != EQUAL:
                raise VerificationError(f"{rule_name}{values}: script failed and search gave {result.verdict}")
            cert = result.certificate
        log_certificate(self.logger, f"{rule_name}{values}", cert)
        return cert

    def _run(self, builder: CertificateBuilder, move: Move, env: Dict[str, int]) -> None:
        if isinstance(move, Contract):
            builder.contract(move.pos)
        elif isinstance(move, Expand):
            builder.expand(move.pos, self.evaluate(move.left, env), self.evaluate(move.right, env))
        else:
            args = [self.evaluate(a, env) for a in move.args]
            sub = self.replay(move.rule, *args)
            builder.splice(move.pos, sub.reversed() if move.reverse else sub)

    # --- instance families
    def instances(self, rule_name: str) -> Iterator[Tuple[int, ...]]:
        rule = RULES[rule_name]
        if self.rees.n < rule.min_rank:
            raise HypothesisError(f"rule {rule_name} requires n >= {rule.min_rank}")
        rows, cols, elems = self.rees.row_ids, self.rees.col_ids, self.group.elements()
        p, crit = self.rees.p, self.rees.rect_band_criterion
        if rule_name == "product":
            yield from ((i, j, k, l) for i in rows for j in cols for k in rows for l in cols if crit(i, k, j, l))
        elif rule_name in ("inverse",):
            yield from ((i, j) for i in rows for j in cols)
        elif rule_name == "trivial-generator":
            yield from ((i, j) for i in rows for j in cols if p(j, i) == 0)
        elif rule_name == "row-equality":
            yield from ((i, l, j) for i in rows for l in rows for j in cols if p(j, i) == p(j, l))
        elif rule_name == "column-equality":
            yield from ((i, j, k) for i in rows for j in cols for k in cols if p(j, i) == p(k, i))
        elif rule_name == "generator-equality":
            cells = [(i, j) for i in rows for j in cols]
            yield from ((i, j, i2, j2) for i, j in cells for i2, j2 in cells if p(j, i) == p(j2, i2))
        elif rule_name == "factor":
            yield from ((t, i, j) for t in cols for i in rows for j in cols)
        elif rule_name == "canonical":
            yield from ((self.group.inv(p(j, i)), i, j) for i in rows for j in cols)
        elif rule_name == "homomorphism":
            yield from ((u, v) for u in elems for v in elems)
        else:
            raise ValueError(f"unknown rule {rule_name!r}")

    def replay_family(
        self,
        rule_name: str,
        seed: Optional[int] = None,
        sample: Optional[int] = None,
        exhaustive_limit: Optional[int] = None,
        keep: bool = False,
    ) -> FamilyResult:
        seed = Config.SEED if seed is None else seed
        sample = Config.LEMMA_SAMPLE if sample is None else sample
        exhaustive_limit = Config.LEMMA_EXHAUSTIVE_LIMIT if exhaustive_limit is None else exhaustive_limit
        todo = list(self.instances(rule_name))
        result = FamilyResult(rule=rule_name, instances=len(todo))
        if len(todo) > exhaustive_limit:
            todo = sorted(random.Random(f"{seed}:{rule_name}").sample(todo, min(sample, len(todo))))
        for values in todo:
            result.replayed += 1
            try:
                cert = self.replay(rule_name, *values)
            except (VerificationError, ValueError) as exc:
                result.failures.append(f"{values}: {exc}")
                continue
            check = self.engine.verify_certificate(cert)
            if check:
                result.verified += 1
                if keep:
                    result.certificates.append((values, cert))
            else:
                result.failures.append(f"{values}: step {check.failed_step}: {check.reason}")
        self.logger.info(
            f"Replayed {rule_name}: {result.verified}/{result.replayed} verified ({result.instances} instances)"
        )
        return result
