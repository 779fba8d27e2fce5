"""Command-line front end.

Exit codes: 0 success, 1 property failure, 2 usage error, 3 unsupported case.
Word-consuming commands take the word as a trailing argument or, when omitted,
read one word per line from standard input with line-aligned output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import amalgam as am
from . import hnn as hn
from . import oracle as orc
from .errors import (InvariantFailure, ResourceLimitError, UnsupportedCaseError,
                     UsageError)
from .presets import load_presentation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="palinwidth",
        description="Palindromic-length lower bounds in HNN extensions and "
                    "amalgamated free products")
    parser.add_argument("--group", help="built-in name (bs:M,N | zz | z3z | z4z2z4) "
                                        "or a JSON presentation file")
    parser.add_argument("--json", action="store_true", help="emit JSON output")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in [
            ("reduce", "reduce a word to normal form"),
            ("sqn", "stable-letter signature of a word"),
            ("delta", "segment-counting quasimorphism value"),
            ("palcheck", "is the word a group palindrome"),
            ("symmetrize", "mirrored normal form of a group palindrome"),
            ("lowerbound", "certified lower bound on palindromic length"),
            ("decompose2", "index-two decomposition into at most 3 palindromes")]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("word", nargs="?", default=None)

    p = sub.add_parser("eq", help="do two words represent the same element")
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("witness", help="unbounded-delta witness word")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--filler", help="HNN base filler letter (default: the generator)")
    p.add_argument("--letter-a", help="amalgam letter a (default: marked element)")
    p.add_argument("--letter-b", help="amalgam letter b (default: the B generator)")

    p = sub.add_parser("verify", help="randomized and exhaustive property suites")
    p.add_argument("property", choices=["quasimorphism", "signature",
                                        "palindrome-delta", "inverse-dk"])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--max-len", type=int, default=40)
    p.add_argument("--max-sig", type=int, default=7)
    p.add_argument("--exp-bound", type=int, default=3)

    p = sub.add_parser("oracle", help="brute-force consistency oracle")
    p.add_argument("action", choices=["cross-check"])
    p.add_argument("--max-len", type=int, default=5)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--exp-bound", type=int, default=3)
    p.add_argument("--out", help="write the JSONL report to a file")
    return parser


def _require_group(args):
    if not args.group:
        raise UsageError("this command needs --group")
    return load_presentation(args.group)


def _words_in(args) -> List[str]:
    if args.word is not None:
        return [args.word]
    return [line.rstrip("\n") for line in sys.stdin]


def _emit(args, text_value, json_value):
    if args.json:
        print(json.dumps(json_value))
    else:
        print(text_value)


def _sig_text(sig) -> str:
    return "".join("+" if e == 1 else "-" for e in sig)


def _run_word_command(args, pres) -> int:
    is_hnn = isinstance(pres, hn.HnnPresentation)
    for text in _words_in(args):
        if is_hnn:
            word = hn.parse_word(text, pres)
        else:
            word = am.parse_word(text, pres)
        if args.command == "reduce":
            if is_hnn:
                out = hn.serialize_word(hn.britton_reduce(word, pres), pres)
            else:
                out = am.serialize_word(am.normal_reduce(word, pres), pres)
            _emit(args, out, {"word": out})
        elif args.command == "sqn":
            if not is_hnn:
                raise UsageError("sqn applies to HNN presentations")
            sig = hn.signature(word, pres)
            _emit(args, _sig_text(sig), {"signature": list(sig)})
        elif args.command == "delta":
            value = hn.delta(word, pres) if is_hnn else am.delta(word, pres)
            _emit(args, str(value), {"delta": value})
        elif args.command == "palcheck":
            value = (hn.is_group_palindrome(word, pres) if is_hnn
                     else am.is_group_palindrome(word, pres))
            _emit(args, "true" if value else "false", {"palindrome": value})
        elif args.command == "symmetrize":
            if is_hnn:
                form = hn.symmetrize_palindrome(word, pres)
                out = hn.serialize_word(form.word, pres)
                correction = pres.base.format_element(form.correction) or "1"
            else:
                form = am.symmetrize_palindrome(word, pres)
                out = am.serialize_word(form.word, pres)
                tag, _ = form.middle
                correction = pres.factor(tag).format_element(form.correction) or "1"
            _emit(args, out, {"word": out, "correction": correction})
        elif args.command == "lowerbound":
            cert = (hn.pal_lower_bound(word, pres) if is_hnn
                    else am.pal_lower_bound(word, pres))
            _emit(args,
                  f"delta={cert.delta} bound={cert.bound} ({cert.inequality})",
                  cert.as_dict())
        elif args.command == "decompose2":
            if is_hnn:
                raise UsageError("decompose2 applies to amalgamated products")
            pieces = am.index_two_decompose(word, pres)
            texts = [am.serialize_word(p, pres) for p in pieces]
            _emit(args, " | ".join(texts), {"pieces": texts})
        else:
            raise UsageError(f"unhandled command {args.command!r}")
    return 0


def _run_witness(args, pres) -> int:
    if isinstance(pres, hn.HnnPresentation):
        if args.filler is not None:
            filler_word = hn.parse_word(args.filler, pres)
            if filler_word.exponents:
                raise UsageError("filler must be a base-group letter")
            filler = filler_word.letters[0]
        else:
            filler = pres.base.generator(pres.base.generators[0])
        word = hn.witness(args.n, pres, filler)
        out = hn.serialize_word(word, pres)
        _emit(args, out, {"word": out, "n": args.n})
    else:
        a = b = None
        if args.letter_a is not None:
            a = pres.factor_a.parse_literal(args.letter_a)
        if args.letter_b is not None:
            b = pres.factor_b.parse_literal(args.letter_b)
        word = am.witness(args.n, pres, a, b)
        out = am.serialize_word(word, pres)
        _emit(args, out, {"word": out, "n": args.n})
    return 0


def _run_verify(args, pres) -> int:
    is_hnn = isinstance(pres, hn.HnnPresentation)
    if args.property == "quasimorphism":
        if is_hnn:
            report = hn.verify_quasimorphism(pres, args.trials, args.max_len, args.seed)
        else:
            report = am.verify_quasimorphism(pres, args.trials, args.max_len, args.seed)
        payload = report.as_dict()
    elif args.property == "signature":
        if is_hnn:
            report = hn.verify_signature_welldefined(pres, args.trials, seed=args.seed)
        else:
            report = am.verify_length_welldefined(pres, args.trials, seed=args.seed)
        payload = report.as_dict()
    elif args.property == "inverse-dk":
        if is_hnn:
            report = hn.verify_inverse_antisymmetry(pres, args.trials, seed=args.seed)
        else:
            report = am.verify_inverse_antisymmetry(pres, args.trials, seed=args.seed)
        payload = report.as_dict()
    else:  # palindrome-delta
        if is_hnn:
            oracle_report = orc.hnn_palindrome_delta_check(pres, args.max_sig, args.exp_bound)
        else:
            oracle_report = orc.amalgam_palindrome_delta_check(pres, args.max_sig, args.exp_bound)
        payload = {"name": "palindrome-delta", "ok": oracle_report.ok,
                   **oracle_report.counters}
        if args.json:
            print(json.dumps(payload))
        else:
            print(" ".join(f"{k}={v}" for k, v in payload.items()))
        for line in oracle_report.violations:
            print(line, file=sys.stderr)
        return 0 if oracle_report.ok else 1
    if args.json:
        print(json.dumps(payload))
    else:
        print(" ".join(f"{k}={v}" for k, v in payload.items()))
    return 0 if report.ok else 1


def _run_oracle(args, pres) -> int:
    config = orc.EnumerationConfig(max_len=args.max_len, depth=args.depth,
                                   exp_bound=args.exp_bound, seed=args.seed)
    report = orc.cross_check(pres, config)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(report.to_jsonl() + "\n")
    if args.json:
        print(report.to_jsonl())
        print(json.dumps({"summary": report.counters, "ok": report.ok}))
    else:
        print(" ".join(f"{k}={v}" for k, v in report.counters.items()))
    for line in report.violations:
        print(line, file=sys.stderr)
    return 0 if report.ok else 1


def run(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    pres = _require_group(args)
    if args.command == "witness":
        return _run_witness(args, pres)
    if args.command == "verify":
        return _run_verify(args, pres)
    if args.command == "oracle":
        return _run_oracle(args, pres)
    if args.command == "eq":
        if isinstance(pres, hn.HnnPresentation):
            value = hn.word_equal(hn.parse_word(args.word1, pres),
                                  hn.parse_word(args.word2, pres), pres)
        else:
            value = am.word_equal(am.parse_word(args.word1, pres),
                                  am.parse_word(args.word2, pres), pres)
        _emit(args, "true" if value else "false", {"equal": value})
        return 0
    return _run_word_command(args, pres)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedCaseError as exc:
        print(f"unsupported case: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
