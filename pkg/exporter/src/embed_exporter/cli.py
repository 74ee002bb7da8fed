"""Command line entry point: `embed-exporter export ...`."""

import argparse
import logging
import sys

from .exporter import ExportConfig, export


def build_parser():
    parser = argparse.ArgumentParser(prog="embed-exporter")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("export", help="embed a corpus file with a transformer checkpoint")
    run.add_argument("--model", required=True, help="checkpoint name or local path")
    run.add_argument("--pooling", choices=("cls", "mean"), default="cls")
    run.add_argument("--max-tokens", type=int, default=512)
    run.add_argument("--padding-side", choices=("left", "right"), default=None,
                     help="override the tokenizer's padding side")
    run.add_argument("--batch-size", type=int, default=8)
    run.add_argument("--in", dest="corpus", required=True, help="JSONL corpus file")
    run.add_argument("--out", required=True, help="embedding file to write")
    run.add_argument("--log", default=None,
                     help="truncation sidecar path (default: <out>.log)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command != "export":
        build_parser().print_usage(sys.stderr)
        return 2
    try:
        config = ExportConfig(
            model=args.model,
            pooling=args.pooling,
            max_tokens=args.max_tokens,
            padding_side=args.padding_side,
            batch_size=args.batch_size,
        )
        result = export(args.corpus, config, args.out, log_path=args.log)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, EnvironmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"exported {result.exported} vectors (dim {result.dim}), "
          f"{len(result.truncated)} truncated")
    return 0


if __name__ == "__main__":
    sys.exit(main())
