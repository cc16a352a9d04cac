"""Line-oriented stage manifests.

A manifest starts with a ``treeproj-pipeline <version>`` header; every
further non-blank, non-``#`` line is one subcommand invocation written as on
the shell, e.g.::

    treeproj-pipeline 1
    project -s src.conllu -t tgt.txt -a align.txt --mode raw -o work/raw.conllu
    collapse work/raw.conllu -o work/collapsed.conllu

Relative paths are resolved against the manifest's directory.  Every input
must exist or be the ``--output`` of an earlier stage; this is checked for
all stages before anything runs.
"""
from __future__ import annotations

import os
import shlex
import sys
from dataclasses import dataclass, field

FORMAT_VERSION = 1
HEADER = "treeproj-pipeline"


class ManifestError(ValueError):
    pass


@dataclass
class Stage:
    argv: list[str]
    lineno: int

    @property
    def name(self) -> str:
        return self.argv[0]


@dataclass
class PipelineManifest:
    stages: list[Stage] = field(default_factory=list)
    format_version: int = FORMAT_VERSION
    base_dir: str = "."

    def to_text(self) -> str:
        lines = [f"{HEADER} {self.format_version}"]
        lines += [shlex.join(s.argv) for s in self.stages]
        return "\n".join(lines) + "\n"


def parse_manifest(text: str, base_dir: str = ".") -> PipelineManifest:
    manifest = PipelineManifest(base_dir=base_dir)
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            parts = line.split()
            if len(parts) != 2 or parts[0] != HEADER or not parts[1].isdigit():
                raise ManifestError(f"line {lineno}: expected header '{HEADER} {FORMAT_VERSION}'")
            manifest.format_version = int(parts[1])
            if manifest.format_version != FORMAT_VERSION:
                raise ManifestError(f"unsupported manifest version {manifest.format_version}")
            header_seen = True
            continue
        try:
            argv = shlex.split(line, comments=True)
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: {exc}") from None
        if argv[0] == "pipeline":
            raise ManifestError(f"line {lineno}: nested pipelines are not allowed")
        manifest.stages.append(Stage(argv, lineno))
    return manifest


def read_manifest(path: str) -> PipelineManifest:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read(), os.path.dirname(os.path.abspath(path)))


def _resolve(path: str, base: str) -> str:
    if path == "-" or os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(base, path))


def _outputs(ns) -> list[str]:
    from .cli import _sample_outputs
    if ns.command == "sample":
        return [p for p in _sample_outputs(ns) if p != "-"]
    return [ns.output] if ns.output not in (None, "-") else []


def prepare(manifest: PipelineManifest):
    """Parse every stage and check the path chain; returns parsed namespaces."""
    from .cli import INPUT_ATTRS, build_parser

    parser = build_parser()
    produced: set[str] = set()
    parsed = []
    for k, stage in enumerate(manifest.stages, 1):
        label = f"stage {k} ({stage.name}, line {stage.lineno})"
        if stage.name not in INPUT_ATTRS:
            raise ManifestError(f"{label}: unknown subcommand {stage.name!r}")
        try:
            ns = parser.parse_args(stage.argv)
        except SystemExit:
            raise ManifestError(f"{label}: invalid arguments") from None
        for attr in INPUT_ATTRS[stage.name]:
            value = getattr(ns, attr)
            paths = value if isinstance(value, list) else [value]
            resolved = []
            for p in paths:
                if p == "-":
                    raise ManifestError(f"{label}: stdin input is not allowed in a pipeline")
                rp = _resolve(p, manifest.base_dir)
                if rp not in produced and not os.path.exists(rp):
                    raise ManifestError(f"{label}: missing input {p}")
                resolved.append(rp)
            setattr(ns, attr, resolved if isinstance(value, list) else resolved[0])
        if ns.output not in (None, "-"):
            ns.output = _resolve(ns.output, manifest.base_dir)
        if getattr(ns, "output_dir", None):
            ns.output_dir = _resolve(ns.output_dir, manifest.base_dir)
        produced.update(_outputs(ns))
        parsed.append((label, ns))
    return parsed


def run_pipeline(manifest: PipelineManifest | str, quiet: bool = False) -> int:
    """Run all stages in order; the first failing stage aborts the run."""
    from .cli import dispatch

    try:
        if isinstance(manifest, str):
            manifest = read_manifest(manifest)
        stages = prepare(manifest)
    except (ManifestError, OSError) as exc:
        print(f"treeproj pipeline: error: {exc}", file=sys.stderr)
        return 1
    for label, ns in stages:
        if quiet:
            ns.quiet = True
        status = dispatch(ns)
        if status != 0:
            print(f"treeproj pipeline: {label} failed with status {status}", file=sys.stderr)
            return status
    return 0
