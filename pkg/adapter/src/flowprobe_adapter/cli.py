"""Adapter command line: render manifests through a checkpoint."""

from __future__ import annotations

import argparse
import sys

from .flows import flow_for_bars
from .model import FlowEncoderDecoder, save_checkpoint
from .rendering import AdapterConfig
from .respond import render_and_respond


def _config_from_args(args) -> AdapterConfig:
    w, h = (int(v) for v in args.input_size.lower().split("x"))
    return AdapterConfig(
        checkpoint=args.checkpoint, layer=args.layer, input_size=(w, h),
        input_mean=args.input_mean, input_scale=args.input_scale,
        contrast=args.contrast, batch_size=args.batch_size, device=args.device)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flowprobe-adapter",
        description="Evaluate wave-stimulus manifests through a flow network")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--checkpoint", required=True)
    common.add_argument("--layer", default="conv6_1")
    common.add_argument("--input-size", default="512x384")
    common.add_argument("--input-mean", type=float, default=0.5)
    common.add_argument("--input-scale", type=float, default=1.0)
    common.add_argument("--contrast", type=float, default=1.0)
    common.add_argument("--batch-size", type=int, default=8)
    common.add_argument("--device", default="cpu")

    p_resp = sub.add_parser("respond", parents=[common],
                            help="manifest in, response table CSV out (resumable)")
    p_resp.add_argument("--manifest", required=True)
    p_resp.add_argument("--out", required=True)
    p_resp.add_argument("--limit", type=int)

    p_flow = sub.add_parser("flows", parents=[common],
                            help="bar STVL volumes in, per-level .flo files out")
    p_flow.add_argument("--bars", required=True)
    p_flow.add_argument("--out", required=True)

    p_init = sub.add_parser("init-checkpoint",
                            help="write a freshly initialized checkpoint (for testing)")
    p_init.add_argument("--out", required=True)
    p_init.add_argument("--width", type=float, default=1.0)
    p_init.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command == "respond":
            rows = render_and_respond(args.manifest, args.out,
                                      _config_from_args(args), limit=args.limit)
            print(f"wrote {rows} response rows to {args.out}")
        elif args.command == "flows":
            emitted = flow_for_bars(args.bars, args.out, _config_from_args(args))
            print(f"wrote {len(emitted)} flow maps to {args.out}")
        else:
            import torch
            torch.manual_seed(args.seed)
            model = FlowEncoderDecoder(width=args.width)
            save_checkpoint(model, args.out)
            print(f"initialized checkpoint at {args.out}")
        return 0
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
