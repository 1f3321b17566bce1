"""Command line front end: init-backbone and extract."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from embed_extractor.backbone import BackboneError, init_backbone, save_backbone
from embed_extractor.config import ExtractionConfig
from embed_extractor.extract import run_extraction


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-extractor",
        description="Embed tagged audio folders into JSON-lines manifests",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init-backbone", help="write a randomly initialised backbone checkpoint")
    p_init.add_argument("--output", type=Path, required=True)
    p_init.add_argument("--mel-bands", type=int, default=128)
    p_init.add_argument("--channels", type=int, nargs="+", default=[8, 16])
    p_init.add_argument("--embed-dim", type=int, default=32)
    p_init.add_argument("--classes", type=int, default=10)
    p_init.add_argument("--seed", type=int, default=0)

    p_extract = sub.add_parser("extract", help="embed annotated recordings into a manifest")
    p_extract.add_argument("--audio-root", type=Path, required=True)
    p_extract.add_argument("--annotations", type=Path, required=True)
    p_extract.add_argument("--backbone", type=Path, required=True)
    p_extract.add_argument("--output", type=Path, required=True)
    p_extract.add_argument("--sample-rate", type=int, default=16000)
    p_extract.add_argument("--n-fft", type=int, default=512)
    p_extract.add_argument("--hop-length", type=int, default=256)
    p_extract.add_argument("--mel-bands", type=int, default=128)
    p_extract.add_argument("--chunk-seconds", type=float, default=3.0)
    return parser


def cmd_init_backbone(args: argparse.Namespace) -> int:
    model = init_backbone(
        mel_bands=args.mel_bands,
        channels=tuple(args.channels),
        embed_dim=args.embed_dim,
        n_classes=args.classes,
        seed=args.seed,
    )
    save_backbone(model, args.output)
    print(f"wrote backbone ({args.mel_bands} mel bands, embed dim {args.embed_dim}) to {args.output}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    config = ExtractionConfig(
        audio_root=args.audio_root,
        annotation_file=args.annotations,
        backbone_path=args.backbone,
        output_path=args.output,
        sample_rate=args.sample_rate,
        n_fft=args.n_fft,
        hop_length=args.hop_length,
        mel_bands=args.mel_bands,
        chunk_seconds=args.chunk_seconds,
    )
    result = run_extraction(config)
    print(
        f"wrote {result.written} records ({result.skipped} skipped, "
        f"{len(result.vocabulary)} labels) to {result.output_path}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s", level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "init-backbone":
            return cmd_init_backbone(args)
        return cmd_extract(args)
    except (BackboneError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
