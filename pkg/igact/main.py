import argparse
import re
import sys
from typing import List, Optional, Sequence

from .config.config import Config, RunConfig
from .modules.errors import HypothesisError, ResourceBoundError, VerificationError
from .modules.logger import log_error, setup_logger
from .modules.monoid import greens_structural, rank_one_shape
from .modules.pipeline import Pipeline
from .modules.reports import build_summary, dumps, monoid_dump, write_certificate, write_json
from .modules.rees import ReesDecomposition
from .modules.scripts import RULE_ORDER, resolve_rule
from .modules.theorem import VERIFIED, TheoremVerifier
from .modules.words import EQUAL, NOT_FOUND, UNEQUAL, IdemWord


EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

_LETTER = re.compile(r"e\[\s*(\d+)\s*,\s*(\d+)\s*\]|(\d+)")


def parse_word(text: str, rees: ReesDecomposition) -> IdemWord:
    """Letters are e[i,j] for the idempotent e_ij of the rank-1 D-class, or raw canonical ids."""
    stripped = _LETTER.sub("", text)
    if stripped.replace(",", "").strip():
        raise ValueError(f"cannot parse word {text!r}; use letters like e[1,2] or canonical ids")
    letters: List[int] = []
    for i, j, raw in _LETTER.findall(text):
        if raw:
            letters.append(int(raw))
            continue
        i, j = int(i), int(j)
        if not (1 <= i <= len(rees.rows) and 1 <= j <= rees.n):
            raise ValueError(f"e[{i},{j}] outside rows 1..{len(rees.rows)} and columns 1..{rees.n}")
        letters.append(rees.e(i, j))
    if not letters:
        raise ValueError("empty word")
    return tuple(letters)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="igact",
        description="Free idempotent generated semigroups over End F_n(G): build, rewrite, verify",
    )
    p.add_argument("--group", default="cyclic:2", help="cyclic:m | sym:k | dihedral:k | file:path, '*' for products")
    p.add_argument("--rank", "-n", type=int, default=3, help="rank n of the free G-act (default 3)")
    p.add_argument("--seed", type=int, default=Config.SEED, help="seed for every sampled check")
    p.add_argument("--cap", type=int, default=Config.MONOID_CAP, help="largest monoid to enumerate")
    p.add_argument("--max-states", type=int, default=Config.MAX_STATES, help="state bound for derivation search")
    p.add_argument("--max-word-len", type=int, default=None, help="word length bound for search and perturbation")
    p.add_argument("--out", default=None, help="write the command's JSON result here (a directory for verify)")
    p.add_argument("--dump", default=None, help="build: write every element with its classes to this JSON file")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    p.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    sub = p.add_subparsers(dest="command", required=True)
    build = sub.add_parser("build", help="enumerate End F_n(G) and its rank-1 Rees form")

    squares = sub.add_parser("squares", help="classify the E-squares of the rank-1 D-class")
    squares.add_argument("--all-witnesses", action="store_true", default=Config.ALL_WITNESSES)

    derive = sub.add_parser("derive", help="search for a derivation between two idempotent words")
    derive.add_argument("lhs")
    derive.add_argument("rhs")

    reduce = sub.add_parser("reduce", help="rewrite a word of the subgroup at e11 to a canonical generator")
    reduce.add_argument("word")

    verify = sub.add_parser("verify", help="verify the theorem, or replay one relation family")
    verify.add_argument(
        "target", help=f"theorem | lemma:<rule> with rule in {', '.join(RULE_ORDER)} or a number such as 3.9"
    )
    return p


def run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        group=args.group,
        rank=args.rank,
        seed=args.seed,
        cap=args.cap,
        max_states=args.max_states,
        max_word_len=args.max_word_len,
        all_witnesses=getattr(args, "all_witnesses", Config.ALL_WITNESSES),
        out=args.out,
        dump=args.dump,
    )


def cmd_build(pipeline: Pipeline) -> int:
    monoid = pipeline.monoid
    shape = rank_one_shape(monoid, greens_structural(monoid))
    summary = build_summary(monoid, pipeline.rees.to_document(), shape)
    print(f"End F_{pipeline.n}({pipeline.group.name}): {monoid.size} elements, {len(monoid.idempotents)} idempotents")
    print(f"rank-1 D-class: {shape['size']} elements, |I| = {shape['r_classes']}, |J| = {shape['l_classes']}")
    for j, row in enumerate(summary["rees"]["P"], start=1):
        print(f"P[{j}] = {row}")
    if pipeline.config.dump:
        write_json(pipeline.config.dump, monoid_dump(monoid, greens_structural(monoid)))
    if pipeline.config.out:
        write_json(pipeline.config.out, summary)
    return EXIT_OK


def cmd_squares(pipeline: Pipeline) -> int:
    report = pipeline.squares()
    counts = report.counts()
    print(" ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    if pipeline.config.out:
        write_json(pipeline.config.out, report.to_document())
    return EXIT_OK


def cmd_derive(pipeline: Pipeline, lhs: str, rhs: str) -> int:
    w1 = parse_word(lhs, pipeline.rees)
    w2 = parse_word(rhs, pipeline.rees)
    result = pipeline.engine.derive_equal(w1, w2, max_len=pipeline.config.max_word_len, max_states=pipeline.config.max_states)
    print(f"{result.verdict} ({result.states} states) {result.detail}".rstrip())
    if result.verdict == NOT_FOUND:
        print("inconclusive (bounds reached; no inequality asserted)")
    if result.verdict == EQUAL:
        if pipeline.config.out:
            write_certificate(pipeline.config.out, result.certificate, f"{lhs} = {rhs}")
        else:
            print(dumps(result.certificate.to_document()), end="")
    return EXIT_FALSIFIED if result.verdict == UNEQUAL else EXIT_OK


def cmd_reduce(pipeline: Pipeline, word: str) -> int:
    trace = pipeline.subgroup.reduce_to_w(parse_word(word, pipeline.rees))
    group = pipeline.group
    print(f"w_{group.label(trace.result)}: factors {trace.factors}, {len(trace.certificate.steps)} steps")
    if pipeline.config.out:
        write_json(pipeline.config.out, trace.to_document())
    return EXIT_OK


def cmd_verify(pipeline: Pipeline, target: str) -> int:
    if target == "theorem":
        report = TheoremVerifier(pipeline, out_dir=pipeline.config.out).run()
        for audit in report.failed():
            print(f"FAILED {audit.name}: {audit.detail}")
        print(f"{report.verdict}: {pipeline.group.name}, n = {pipeline.n}")
        if pipeline.config.out:
            write_json(f"{pipeline.config.out.rstrip('/')}/report.json", report.to_document())
        return EXIT_OK if report.verdict == VERIFIED else EXIT_FALSIFIED

    kind, sep, name = target.partition(":")
    if kind != "lemma" or not sep:
        raise ValueError(f"unknown target {target!r}; use theorem or lemma:<rule> with rule in {', '.join(RULE_ORDER)}")
    rule = resolve_rule(name)
    cfg = pipeline.config
    result = pipeline.replayer.replay_family(rule, seed=cfg.seed, sample=cfg.lemma_sample, exhaustive_limit=cfg.lemma_limit)
    print(f"{rule}: {result.verified}/{result.replayed} certificates verified of {result.instances} instances")
    for failure in result.failures[:10]:
        print(f"  {failure}")
    if cfg.out:
        write_json(cfg.out, result.to_document())
    return EXIT_OK if result.passed else EXIT_FALSIFIED


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else Config.LOG_LEVEL
    logger = setup_logger(level=level, log_file=Config.LOG_FILE)

    try:
        pipeline = Pipeline(run_config(args), logger=logger)
        if args.command == "build":
            return cmd_build(pipeline)
        if args.command == "squares":
            return cmd_squares(pipeline)
        if args.command == "derive":
            return cmd_derive(pipeline, args.lhs, args.rhs)
        if args.command == "reduce":
            return cmd_reduce(pipeline, args.word)
        return cmd_verify(pipeline, args.target)
    except ResourceBoundError as exc:
        log_error(logger, f"Resource bound: {exc}")
        return EXIT_RESOURCE
    except (HypothesisError, ValueError) as exc:
        log_error(logger, f"Invalid input: {exc}")
        return EXIT_INPUT
    except VerificationError as exc:
        log_error(logger, f"Verification failed: {exc}")
        return EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
