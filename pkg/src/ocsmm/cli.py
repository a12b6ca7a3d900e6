"""Command-line interface: generate, train, score, evaluate, inspect.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import datagen, io, metrics
from .density import DensityQuery, vkde_sparse
from .errors import NumericalError
from .groups import GaussianGroup
from .kernels import KernelConfig, gram_matrix
from .model import anomaly_scores, fit
from .qp import SolverSettings

log = logging.getLogger("ocsmm")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage errors to 1
        raise UsageError(message)


def _add_kernel_flags(p: argparse.ArgumentParser):
    p.add_argument("--sigma-sq", type=float, default=None,
                   help="squared RBF bandwidth; default: median heuristic over the data")
    p.add_argument("--level2-gamma", type=float, default=None,
                   help="gamma of the level-2 kernel on embedding distances")
    p.add_argument("--level2", action="store_true",
                   help="enable the level-2 kernel with gamma = sigma")
    p.add_argument("--normalize", action="store_true",
                   help="spherically normalize embeddings to unit norm")
    p.add_argument("--jitter", type=float, default=1e-10)


def _kernel_config(args) -> KernelConfig:
    if args.level2 and args.level2_gamma is not None:
        raise UsageError("--level2 and --level2-gamma are mutually exclusive")
    if args.sigma_sq is not None and not args.sigma_sq > 0:
        raise UsageError("--sigma-sq must be positive")
    if args.level2_gamma is not None and not args.level2_gamma > 0:
        raise UsageError("--level2-gamma must be positive")
    return KernelConfig(sigma_sq=args.sigma_sq, level2_gamma=args.level2_gamma,
                        spherical_normalize=args.normalize, jitter=args.jitter)


def _resolve_level2(config: KernelConfig, use_level2: bool) -> KernelConfig:
    if use_level2:
        from dataclasses import replace
        if config.sigma_sq is None:
            raise UsageError("--level2 needs sigma_sq (give --sigma-sq or train on data)")
        return replace(config, level2_gamma=float(np.sqrt(config.sigma_sq)))
    return config


def build_parser() -> _Parser:
    parser = _Parser(prog="ocsmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth",
                       help="generate a labeled synthetic dataset")
    p.add_argument("--recipe", required=True,
                   choices=["rotated", "mixture", "circle", "flower"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=None,
                   help="points per draw (circle/flower only)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="fit a model on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kkt-tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=None)
    _add_kernel_flags(p)

    p = sub.add_parser("score",
                       help="score a dataset with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval",
                       help="compute AP/AUC from a scores file with true labels")
    p.add_argument("--scores", required=True)
    p.add_argument("--roc-out", default=None, help="write ROC points as CSV")

    p = sub.add_parser("density",
                       help="evaluate the model's density surface on a grid")
    p.add_argument("--model", required=True)
    p.add_argument("--grid-min", type=float, required=True)
    p.add_argument("--grid-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--variance", type=float, default=0.0,
                   help="isotropic variance of the test distribution")
    p.add_argument("--out", required=True)

    p = sub.add_parser("gram",
                       help="write the group-kernel Gram matrix as CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _add_kernel_flags(p)

    return parser


def _cmd_synth(args) -> int:
    if args.recipe in ("rotated", "mixture"):
        gen = datagen.gen_rotated_gaussians if args.recipe == "rotated" else datagen.gen_mixture_groups
        ds = gen(args.seed)
        io.write_groups(args.out, ds.groups, labels=ds.labels)
        log.info("wrote %d groups (%s) to %s", len(ds.groups), ds.descriptor, args.out)
    else:
        n = args.points if args.points is not None else 500
        pairs = datagen.gen_noisy_circle(args.seed, shape=args.recipe, n_points=n)
        groups = [GaussianGroup(pt, omega * np.eye(2)) for pt, omega in pairs]
        io.write_groups(args.out, groups)
        log.info("wrote %d noisy observations (%s) to %s", len(groups), args.recipe, args.out)
    return EXIT_OK


def _cmd_train(args) -> int:
    if not 0.0 < args.nu <= 1.0:
        raise UsageError(f"--nu must be in (0, 1], got {args.nu}")
    data = io.read_groups(args.data)
    config = _kernel_config(args)
    settings = SolverSettings(kkt_tol=args.kkt_tol, max_iter=args.max_iter)
    if args.level2 and config.sigma_sq is None:
        # resolve sigma first so gamma = sigma is well defined
        from .kernels import median_heuristic
        from dataclasses import replace
        sigma_sq = median_heuristic(list(data.groups))
        log.info("sigma_sq unset; median heuristic gives %r", sigma_sq)
        config = replace(config, sigma_sq=sigma_sq)
    config = _resolve_level2(config, args.level2)
    model = fit(data.groups, config, nu=args.nu, settings=settings)
    io.save_model(args.out, model)
    log.info("trained on %d groups (sigma_sq=%r, nu=%r); model written to %s",
             len(data.groups), model.config.sigma_sq, args.nu, args.out)
    return EXIT_OK


def _cmd_score(args) -> int:
    model = io.load_model(args.model)
    data = io.read_groups(args.data)
    reports = anomaly_scores(model, data.groups)
    io.write_scores_csv(args.out, data.ids, reports, true_labels=data.labels)
    log.info("scored %d groups; results written to %s", len(data.groups), args.out)
    return EXIT_OK


def _cmd_eval(args) -> int:
    ids, scores, true_labels = io.read_scores_csv(args.scores)
    if true_labels is None:
        raise ValueError(f"{args.scores}: no true_label column; cannot evaluate")
    data = metrics.scored_labels(scores, true_labels)
    ap = metrics.average_precision(data)
    area = metrics.auc(data)
    print(f"AP {ap!r}")
    print(f"AUC {area!r}")
    if args.roc_out:
        pts = metrics.roc_curve(data)
        io.write_matrix_csv(args.roc_out, ["fpr", "tpr"], pts)
        log.info("ROC written to %s", args.roc_out)
    return EXIT_OK


def _cmd_density(args) -> int:
    model = io.load_model(args.model)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.variance < 0:
        raise UsageError("--variance must be nonnegative")
    axes = [np.linspace(args.grid_min, args.grid_max, args.steps)] * model.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    rows = []
    for pt in points:
        value = vkde_sparse(model, DensityQuery(pt, args.variance))
        rows.append(list(pt) + [value])
    header = [f"x{i + 1}" for i in range(model.dim)] + ["density"]
    io.write_matrix_csv(args.out, header, rows)
    log.info("density on %d grid points written to %s", len(points), args.out)
    return EXIT_OK


def _cmd_gram(args) -> int:
    data = io.read_groups(args.data)
    config = _kernel_config(args)
    if config.sigma_sq is None:
        from .kernels import median_heuristic
        from dataclasses import replace
        sigma_sq = median_heuristic(list(data.groups))
        log.info("sigma_sq unset; median heuristic gives %r", sigma_sq)
        config = replace(config, sigma_sq=sigma_sq)
    config = _resolve_level2(config, args.level2)
    gram = gram_matrix(data.groups, config)
    rows = [[data.ids[i]] + list(gram.entries[i]) for i in range(gram.ell)]
    io.write_matrix_csv(args.out, ["group_id"] + list(data.ids), rows)
    log.info("%dx%d Gram written to %s", gram.ell, gram.ell, args.out)
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "train": _cmd_train,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "density": _cmd_density,
    "gram": _cmd_gram,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
