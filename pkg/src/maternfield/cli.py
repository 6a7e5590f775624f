"""Command-line interface ``maternfield``.

Exit codes: 0 success or valid, 1 usage or input error, 2 invalid model or
violated constraint, 3 numerical failure, 4 undetermined verdict. Set
``MATERNFIELD_LOG`` to a logging level name (default ``WARNING``).
"""

import argparse
import contextlib
import csv
import json
import logging
import os
import sys

import numpy as np

from . import acceptance, kernels, multivariate, simulate, so3
from .config import ConfigError, model_from_dict, read_json, spec_from_dict
from .models import ConstraintViolation, Rank0, Rank1, Rank2Simplex, Rank2Triangle, check_constraints
from .spectral import ConfigurationError
from .tensor_bases import MANDEL_PAIRS

__all__ = ["main", "run", "EXIT_OK", "EXIT_USAGE", "EXIT_INVALID", "EXIT_NUMERIC", "EXIT_UNDETERMINED"]

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC, EXIT_UNDETERMINED = 0, 1, 2, 3, 4

logger = logging.getLogger("maternfield")

PAIR_COLUMNS = ("x_-1", "x_0", "x_1", "y_-1", "y_0", "y_1")
POINT_COLUMNS = ("x_-1", "x_0", "x_1")
_IDX = (-1, 0, 1)
_MANDEL_W = np.array([1.0 if i == j else np.sqrt(2.0) for i, j in MANDEL_PAIRS])


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v):
    return f"{float(v):.17g}"


def _pair_name(i, j):
    i, j = sorted((i, j))
    return f"{i}{j}"


def kernel_columns(model):
    """CSV column names of the kernel entries of ``model``."""
    if isinstance(model, Rank0):
        return ["B"]
    if isinstance(model, Rank1):
        return [f"B_{{{i},{j}}}" for i in _IDX for j in _IDX]
    if isinstance(model, Rank2Triangle):
        return [f"B_{{{m},{n}}}" for m in (1, 2) for n in (1, 2)]
    names = [_pair_name(*p) for p in MANDEL_PAIRS]
    return [f"B_{{{names[a]},{names[b]}}}" for a, b in zip(*np.triu_indices(6))]


def kernel_rows(model, K):
    """Flatten covariance blocks ``(n, d, d)`` into CSV rows."""
    if isinstance(model, Rank2Simplex):
        # undo the Mandel weights: entries are E[T_ij(x) T_kl(y)]
        T = K / np.multiply.outer(_MANDEL_W, _MANDEL_W)
        a, b = np.triu_indices(6)
        return T[:, a, b]
    return K.reshape(K.shape[0], -1)


def field_columns(model):
    """CSV column names of one field value of ``model``."""
    if isinstance(model, Rank0):
        return ["T"]
    if isinstance(model, Rank1):
        return [f"T_{{{i}}}" for i in _IDX]
    if isinstance(model, Rank2Triangle):
        return ["T_1", "T_2"]
    return [f"T_{{{_pair_name(*p)}}}" for p in MANDEL_PAIRS]


def _read_table(path, columns):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ConfigError(f"{path}: empty file") from None
        if tuple(header) != columns:
            raise ConfigError(f"{path}: expected header {','.join(columns)}, got {','.join(header)}")
        rows = []
        for k, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise ConfigError(f"{path}:{k}: expected {len(columns)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ConfigError(f"{path}:{k}: non-numeric field") from None
    arr = np.array(rows, dtype=float).reshape(-1, len(columns))
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{path}: non-finite coordinates")
    if arr.shape[0] == 0:
        raise ConfigError(f"{path}: no data rows")
    return arr


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write_csv(path, header, rows):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load_model(args):
    model = model_from_dict(read_json(args.model), n_nodes=args.nodes, rho_max=args.rho_max)
    check_constraints(model).raise_if_violated()
    return model


def cmd_validate(args):
    spec = spec_from_dict(read_json(args.spec))
    verdict = multivariate.validate(spec, n_lambda=args.n_lambda)
    with _output(args.output) as fh:
        fh.write(json.dumps(verdict.to_dict()) + "\n")
    return {"valid": EXIT_OK, "invalid": EXIT_INVALID, "undetermined": EXIT_UNDETERMINED}[verdict.status]


def cmd_kernel_eval(args):
    model = _load_model(args)
    pairs = _read_table(args.pairs, PAIR_COLUMNS)
    K = kernels.covariance_batch(model, pairs[:, :3], pairs[:, 3:], workers=args.threads)
    K = np.asarray(K).reshape(pairs.shape[0], *np.shape(K)[-2:])
    _write_csv(args.output, kernel_columns(model), ([_fmt(v) for v in r] for r in kernel_rows(model, K)))
    return EXIT_OK


def cmd_simulate(args):
    model = _load_model(args)
    pts = _read_table(args.points, POINT_COLUMNS)
    cfg = simulate.SimConfig(model, pts, n_samples=args.samples, n_modes=args.modes, seed=args.seed)
    real = simulate.simulate(cfg, workers=args.threads)
    if isinstance(model, Rank2Simplex):
        real = real / _MANDEL_W
    rows = ([str(s), str(p)] + [_fmt(v) for v in real[s, p]] for s in range(real.shape[0]) for p in range(real.shape[1]))
    _write_csv(args.output, ["sample_id", "point_id"] + field_columns(model), rows)
    return EXIT_OK


def cmd_gg_coeffs(args):
    rows = []
    for (l1, l2, ell), arr in sorted(so3.gg_table(args.ell_max).items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
        for m in range(-ell, ell + 1):
            for m1 in range(-l1, l1 + 1):
                for m2 in range(-l2, l2 + 1):
                    rows.append([ell, l1, l2, m, m1, m2, _fmt(arr[m1 + l1, m2 + l2, m + ell])])
    _write_csv(args.output, ["ell", "ell1", "ell2", "m", "m1", "m2", "value"], rows)
    return EXIT_OK


def cmd_selftest(args):
    results = acceptance.run_all(skip=set(args.skip))
    for r in results:
        print(r.line(), flush=True)
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} checks passed")
    return EXIT_OK if n_ok == len(results) else EXIT_NUMERIC


def build_parser():
    p = _Parser(prog="maternfield", description="Isotropic random-field kernels, validation and simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True):
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        if model:
            sp.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")
            sp.add_argument("--nodes", type=int, default=None, help="radial quadrature nodes per measure")
            sp.add_argument("--rho-max", type=float, default=None, help="largest separation resolved by the grid")

    sp = sub.add_parser("validate", help="check a multivariate Matern specification")
    sp.add_argument("spec")
    sp.add_argument("--n-lambda", type=int, default=200, help="sampled wavenumbers for the numeric fallback")
    common(sp, model=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("kernel-eval", help="evaluate the covariance at point pairs")
    sp.add_argument("model")
    sp.add_argument("pairs")
    common(sp)
    sp.set_defaults(func=cmd_kernel_eval)

    sp = sub.add_parser("simulate", help="draw field realisations at points")
    sp.add_argument("model")
    sp.add_argument("points")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--modes", type=int, default=512)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gg-coeffs", help="dump real Clebsch-Gordan coefficients")
    sp.add_argument("--ell-max", type=int, default=4)
    common(sp, model=False)
    sp.set_defaults(func=cmd_gg_coeffs)

    sp = sub.add_parser("selftest", help="run the acceptance checks")
    sp.add_argument("--skip", type=int, nargs="*", default=[], metavar="N", help="check numbers to skip")
    sp.set_defaults(func=cmd_selftest)
    return p


def _check_ranges(args):
    for name, lo in (("threads", 1), ("nodes", 16), ("samples", 1), ("modes", 1), ("ell_max", 0), ("n_lambda", 1)):
        v = getattr(args, name, None)
        if v is not None and v < lo:
            raise UsageError(f"--{name.replace('_', '-')} must be at least {lo}")
    if getattr(args, "rho_max", None) is not None and not args.rho_max > 0:
        raise UsageError("--rho-max must be positive")
    if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a non-negative 64-bit integer")


def _configure_logging():
    level = os.environ.get("MATERNFIELD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="maternfield: %(levelname)s: %(message)s")
    logging.captureWarnings(True)


def main(argv=None):
    """Run the command line and return the exit code."""
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        _check_ranges(args)
        return args.func(args)
    except UsageError as exc:
        code, msg = EXIT_USAGE, f"usage error: {exc}"
    except (ConfigError, simulate.UnsupportedModelError, OSError) as exc:
        code, msg = EXIT_USAGE, f"input error: {exc}"
    except ConstraintViolation as exc:
        code, msg = EXIT_INVALID, f"constraint violation: {exc}"
    except (ConfigurationError, ArithmeticError) as exc:
        code, msg = EXIT_NUMERIC, f"numerical failure: {exc}"
    except ValueError as exc:
        code, msg = EXIT_USAGE, f"input error: {exc}"
    print(f"maternfield: {' '.join(str(msg).split())}", file=sys.stderr)
    return code


run = main


if __name__ == "__main__":
    sys.exit(main())
