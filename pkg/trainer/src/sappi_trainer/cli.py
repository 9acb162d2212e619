import argparse
import sys

from .export import ExportError, train_and_export
from .idx import DatasetError
from .mlp import TrainingConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sappi-train",
        description="Train the 784-128-10 MNIST network and export SAPW weights",
    )
    parser.add_argument("--data-dir", required=True,
                        help="directory holding the four MNIST IDX files (optionally .gz)")
    parser.add_argument("--out", default="mnist.sapw", help="weights file to write")
    parser.add_argument("--report", default="mnist_reference.json",
                        help="reference report to write")
    parser.add_argument("--epochs", type=int, default=TrainingConfig.epochs)
    parser.add_argument("--batch-size", type=int, default=TrainingConfig.batch_size)
    parser.add_argument("--learning-rate", type=float, default=TrainingConfig.learning_rate)
    parser.add_argument("--seed", type=int, default=TrainingConfig.seed)
    args = parser.parse_args(argv)

    config = TrainingConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    try:
        train_and_export(args.data_dir, args.out, args.report, config)
    except (DatasetError, ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
