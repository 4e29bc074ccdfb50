"""Command line: train a model from a labels CSV, or serve one over HTTP."""

from __future__ import annotations

import argparse
import sys

from .train import InsufficientData, TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psc2code-sidecar",
        description="train and serve the frame-validity classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit the head on a labels CSV")
    p_train.add_argument("--labels", required=True, help="CSV of path,label rows")
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.add_argument("--epochs", type=int, default=200)
    p_train.add_argument("--lr", type=float, default=1e-3)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--test-frac", type=float, default=0.1)
    p_train.add_argument("--arch", choices=("vgg11", "vgg16"), default="vgg16")
    p_train.add_argument("--pretrained", choices=("auto", "never", "require"),
                         default="auto",
                         help="conv weights: fetch with fallback, skip, or insist")
    p_train.set_defaults(func=cmd_train)

    p_serve = sub.add_parser("serve", help="serve a trained model")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--port", type=int, default=8600)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def cmd_train(args: argparse.Namespace) -> int:
    cfg = TrainConfig(epochs=args.epochs, lr=args.lr, seed=args.seed,
                      test_frac=args.test_frac, arch=args.arch,
                      pretrained=args.pretrained)
    try:
        summary = train(args.labels, args.out, cfg)
    except InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    source = "pretrained" if summary["pretrained"] else "random frozen"
    print(f"model: {summary['model']}  test accuracy {summary['test_accuracy']:.3f}  "
          f"({summary['n_train']} train / {summary['n_test']} test, {source} features)")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(args.model), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
