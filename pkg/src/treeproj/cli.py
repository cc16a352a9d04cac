"""Command line interface: ``treeproj <subcommand> ...``.

Data goes to stdout (or ``--output``), diagnostics to stderr.  Exit status
is 0 on success, 1 on data errors and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from typing import IO, Iterator

from . import __version__
from .alignment import AlignmentError, parse_alignment_line
from .constituency import NonProjectiveError, TreeTransformError, dep_to_const, write_bracketed
from .conllu import ConlluError, Treebank, open_input, read_conllu, validate, write_conllu
from .evaluation import EvaluationError, corpus_stats, sample_corpus, score
from .overlay import OverlayError, concat_treebanks, delexicalize, overlay_tags
from .projection import (ProjectionConfig, ProjectionError, collapse_dummy_rewrite,
                         project_corpus, remove_dummy_sentences)

log = logging.getLogger("treeproj")

DATA_ERRORS = (ConlluError, AlignmentError, ProjectionError, OverlayError, EvaluationError,
               TreeTransformError, OSError, UnicodeDecodeError)

# attribute names holding input paths, per subcommand (used by the pipeline runner)
INPUT_ATTRS = {
    "project": ("source", "target", "align"),
    "collapse": ("input",),
    "overlay": ("projected", "tagged"),
    "delex": ("input",),
    "concat": ("inputs",),
    "dep2const": ("input",),
    "eval": ("system", "gold"),
    "sample": ("inputs",),
    "stats": ("input",),
    "validate": ("input",),
}


class CommandError(Exception):
    """Data-level failure already explained to the user."""


def _diag(args, msg: str) -> None:
    if not getattr(args, "quiet", False):
        print(msg, file=sys.stderr)


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _read_lines(path: str) -> list[str]:
    with open_input(path) as fh:
        return [line.rstrip("\r\n") for line in fh]


# -- subcommands ------------------------------------------------------------

def cmd_project(args) -> int:
    src = read_conllu(args.source)
    tgt = [line.split() for line in _read_lines(args.target)]
    raw_align = _read_lines(args.align)
    if not (len(src) == len(tgt) == len(raw_align)):
        raise ProjectionError(f"stream length mismatch: {len(src)} source sentences, "
                              f"{len(tgt)} target lines, {len(raw_align)} alignment lines")
    align = []
    for k, (s, t, line) in enumerate(zip(src, tgt, raw_align), 1):
        try:
            align.append(parse_alignment_line(line, len(s), len(t)))
        except AlignmentError as exc:
            raise AlignmentError(f"alignment line {k}: {exc}") from None
    mode = {"raw": "raw", "collapse": "collapse_dummy", "nodummy": "no_dummy"}[args.mode]
    policy = {"nearest": "attach_nearest", "root": "attach_root"}[args.unaligned]
    cfg = ProjectionConfig(mode, args.dummy_deprel, policy)
    tb, stats = project_corpus(src, tgt, align, cfg, threads=args.threads)
    with _output(args.output) as out:
        write_conllu(tb, out)
    if args.stats:
        _diag(args, stats.summary())
    return 0


def cmd_collapse(args) -> int:
    tb = read_conllu(args.input)
    if args.no_dummy:
        out_tb, dropped = remove_dummy_sentences(tb)
        _diag(args, f"discarded {dropped} of {len(tb)} sentences with remaining dummies")
    else:
        out_tb = Treebank([collapse_dummy_rewrite(s) for s in tb])
    with _output(args.output) as out:
        write_conllu(out_tb, out)
    return 0


def cmd_overlay(args) -> int:
    projected = read_conllu(args.projected)
    tagged = read_conllu(args.tagged, check_tree=False)
    tb, skipped = overlay_tags(projected, tagged, args.mode, lenient=args.lenient)
    with _output(args.output) as out:
        write_conllu(tb, out)
    if skipped:
        _diag(args, f"overlay skipped {skipped} mismatching sentences")
    return 0


def cmd_delex(args) -> int:
    tb = delexicalize(read_conllu(args.input))
    with _output(args.output) as out:
        write_conllu(tb, out)
    return 0


def cmd_concat(args) -> int:
    parts = [read_conllu(p) for p in args.inputs]
    labels = args.labels.split(",") if args.labels else None
    if labels is not None and len(labels) != len(parts):
        raise CommandError(f"--labels has {len(labels)} entries for {len(parts)} inputs")
    tb = concat_treebanks(parts, labels)
    with _output(args.output) as out:
        write_conllu(tb, out)
    return 0


def cmd_dep2const(args) -> int:
    tb = read_conllu(args.input)
    skipped = 0
    with _output(args.output) as out:
        for k, sent in enumerate(tb, 1):
            try:
                node = dep_to_const(sent)
            except NonProjectiveError as exc:
                if not args.skip_nonprojective:
                    raise TreeTransformError(f"sentence {k} ({sent.sent_id}): {exc}") from None
                skipped += 1
                _diag(args, f"skipping non-projective sentence {k} ({sent.sent_id}): {exc}")
                continue
            out.write(write_bracketed(node) + "\n")
    if skipped:
        _diag(args, f"skipped {skipped} non-projective sentences")
    return 0


def cmd_eval(args) -> int:
    system = read_conllu(args.system)
    gold = read_conllu(args.gold)
    rep = score(system, gold, include_punct=not args.no_punct,
                universal_deprels=args.universal_deprels, match=args.match)
    with _output(args.output) as out:
        if args.json:
            out.write(rep.to_json() + "\n")
        elif args.per_deprel:
            out.write(rep.table() + "\n")
        else:
            out.write(rep.summary() + "\n")
    return 0


def _sample_outputs(args) -> list[str]:
    if len(args.inputs) == 1:
        return [args.output or "-"]
    return [os.path.join(args.output_dir, os.path.basename(p)) for p in args.inputs]


def cmd_sample(args) -> int:
    if len(args.inputs) > 1 and not args.output_dir:
        raise CommandError("several inputs need --output-dir")
    streams = []
    for path in args.inputs:
        if path.endswith(".conllu"):
            streams.append(read_conllu(path))
        else:
            streams.append(_read_lines(path))
    picked = sample_corpus(tuple(streams), args.n, args.strategy, args.seed)
    for data, dest in zip(picked, _sample_outputs(args)):
        with _output(dest) as out:
            if isinstance(data, Treebank):
                write_conllu(data, out)
            else:
                out.writelines(line + "\n" for line in data)
    return 0


def cmd_stats(args) -> int:
    rep = corpus_stats(read_conllu(args.input))
    with _output(args.output) as out:
        if args.json:
            out.write(json.dumps(rep.to_dict(), sort_keys=True) + "\n")
        else:
            d = rep.to_dict()
            for key in ("sentences", "tokens", "dummies", "nonprojective"):
                out.write(f"{key}\t{d[key]}\n")
            for key in ("deprels", "upos"):
                for label, count in d[key].items():
                    out.write(f"{key}\t{label}\t{count}\n")
    return 0


def cmd_validate(args) -> int:
    tb = read_conllu(args.input, check_tree=False)
    total = 0
    with _output(args.output) as out:
        for k, sent in enumerate(tb, 1):
            for v in validate(sent):
                total += 1
                out.write(f"sentence {k} ({sent.sent_id}): token {v.token_id}: {v.kind}: {v.message}\n")
        out.write(f"{total} violations\n")
    return 1 if total else 0


def cmd_pipeline(args) -> int:
    from .pipeline import run_pipeline
    return run_pipeline(args.manifest, quiet=args.quiet)


# -- parser -----------------------------------------------------------------

def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress diagnostics")
    common.add_argument("--threads", type=_count, default=1, help="worker processes (0 = auto)")

    parser = argparse.ArgumentParser(prog="treeproj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("project", parents=[common], help="project source trees through alignments")
    p.add_argument("-s", "--source", required=True, help="source CoNLL-U")
    p.add_argument("-t", "--target", required=True, help="target text, one tokenized sentence per line")
    p.add_argument("-a", "--align", required=True, help="Pharaoh alignments, one line per sentence")
    p.add_argument("--mode", choices=("raw", "collapse", "nodummy"), default="collapse")
    p.add_argument("--unaligned", choices=("nearest", "root"), default="nearest",
                   help="attachment of unaligned target tokens")
    p.add_argument("--dummy-deprel", default="dummy")
    p.add_argument("--stats", action="store_true", help="print projection counts to stderr")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("collapse", parents=[common], help="collapse dummy nodes")
    p.add_argument("input")
    p.add_argument("--no-dummy", action="store_true", help="drop sentences that keep dummies")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("overlay", parents=[common], help="overlay target tagger output")
    p.add_argument("projected")
    p.add_argument("tagged")
    p.add_argument("--mode", choices=("morph", "pos+morph"), default="morph")
    p.add_argument("--lenient", action="store_true", help="skip mismatching sentences")
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("delex", parents=[common], help="blank forms and lemmas")
    p.add_argument("input")
    p.set_defaults(func=cmd_delex)

    p = sub.add_parser("concat", parents=[common], help="concatenate treebanks")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--labels", help="comma-separated part labels for clashing sent_ids")
    p.set_defaults(func=cmd_concat)

    p = sub.add_parser("dep2const", parents=[common], help="dependency to bracketed constituency trees")
    p.add_argument("input")
    p.add_argument("--skip-nonprojective", action="store_true")
    p.set_defaults(func=cmd_dep2const)

    p = sub.add_parser("eval", parents=[common], help="labeled/unlabeled attachment scores")
    p.add_argument("system")
    p.add_argument("gold")
    p.add_argument("--no-punct", action="store_true", help="exclude gold PUNCT tokens")
    p.add_argument("--universal-deprels", action="store_true", help="ignore relation subtypes")
    p.add_argument("--match", choices=("order", "sent_id"), default="order")
    p.add_argument("--json", action="store_true", help="one JSON line instead of text")
    p.add_argument("--per-deprel", action="store_true", help="add a per-relation table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", parents=[common], help="slice a corpus (parallel files sliced alike)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-n", type=_count, required=True)
    p.add_argument("--strategy", choices=("first_n", "random_seeded"), default="first_n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", parents=[common], help="check tree well-formedness")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pipeline", parents=[common], help="run a stage manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_pipeline)
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def dispatch(args: argparse.Namespace) -> int:
    try:
        return args.func(args)
    except (CommandError, *DATA_ERRORS) as exc:
        print(f"treeproj {args.command}: error: {exc}", file=sys.stderr)
        return 1


def run_subcommand(argv: list[str]) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    return dispatch(args)


def main(argv: list[str] | None = None) -> int:
    return run_subcommand(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
