"""`awe-dump`: extract SSL frame features for a word-instance manifest."""

import argparse
import sys
from pathlib import Path

from .dumper import MODES, DumpError, DumpJob, dump


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awe-dump",
        description="Dump self-supervised speech features to AWEF files")
    parser.add_argument("--model", required=True,
                        choices=("wav2vec2-base", "hubert-base", "wavlm-base"))
    parser.add_argument("--mode", choices=MODES, default="with-context")
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out", required=True, metavar="DIR")
    parser.add_argument("--layer", type=int, default=12,
                        help="transformer layer to read (1..12)")
    parser.add_argument("--model-path", metavar="DIR",
                        help="local checkpoint directory (defaults to the "
                             "locally cached published checkpoint)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = DumpJob(model_id=args.model, manifest=Path(args.manifest),
                      out_dir=Path(args.out), mode=args.mode,
                      layer=args.layer,
                      model_path=Path(args.model_path) if args.model_path
                      else None)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        written = dump(job)
    except DumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(written)} feature files to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
