#!/usr/bin/env python3

import argparse
import configparser
import dataclasses
import functools
import logging
import sys
import time

import numpy as np

import galerkin
import kernels
import norms
import spectra
from airy_core import ZeroKind, airy_zero
from errors import ConfigError, SpectralError
from galerkin import GridSpec
from kernels import Regime, SpectralProblem
from results import EMITTERS, GridResult, write_results
from spectra import Branch
from workers import parallel_map

TABLE1_LENGTHS = (4.0, 6.0, 8.0, 10.0)
TABLE1_KAPPAS = (0.0, 1.0)
TABLE1_TOL = 1e-4
# (kappa, L): (lambda_1, lambda_3, lambda_5) to four decimals
TABLE1_REFERENCE = {
    (0.0, 4.0): (0.5161 - 0.8918j, 1.2938 - 2.1938j, 3.7675 - 1.9790j),
    (0.0, 6.0): (0.5094 - 0.8823j, 1.1755 - 3.9759j, 1.6066 - 2.7134j),
    (0.0, 8.0): (0.5094 - 0.8823j, 1.1691 - 5.9752j, 1.6233 - 2.8122j),
    (0.0, 10.0): (0.5094 - 0.8823j, 1.1691 - 7.9751j, 1.6241 - 2.8130j),
    (0.0, np.inf): (0.5094 - 0.8823j, None, 1.6241 - 2.8130j),
    (1.0, 4.0): (1.0516 - 1.0591j, 1.3441 - 2.0460j, 4.1035 - 1.7639j),
    (1.0, 6.0): (1.0032 - 1.0364j, 1.1725 - 3.9739j, 1.7783 - 2.7043j),
    (1.0, 8.0): (1.0029 - 1.0363j, 1.1691 - 5.9751j, 1.8364 - 2.8672j),
    (1.0, 10.0): (1.0029 - 1.0363j, 1.1691 - 7.9751j, 1.8390 - 2.8685j),
    (1.0, np.inf): (1.0029 - 1.0363j, None, 1.8390 - 2.8685j),
}
TABLE1_COLUMNS = (1, 3, 5)

DEFAULTS = {
    "regime": "transmission",
    "kappa": 1.0,
    "n": 1,
    "n_max": 5,
    "branch": "plus",
    "L": 6.0,
    "trunc": 100,
    "grid": (0.0, 3.0, -8.0, 8.0, 200, 400),
    "lam": (1 + 1j,),
    "y": 1.0,
    "x_range": (-4.0, 4.0, 81),
    "t_max": 2.0,
    "steps": 21,
}

# flags accepted by each subcommand, besides --out, --format and --config
SUBCOMMAND_OPTIONS = {
    "spectrum": ("regime", "kappa", "n_max", "branch"),
    "kernel": ("regime", "kappa", "lam", "y", "x_range"),
    "hsnorm": ("regime", "kappa", "lam"),
    "galerkin": ("kappa", "L", "trunc", "n_max"),
    "pseudospectrum": ("kappa", "L", "trunc", "grid"),
    "semigroup": ("kappa", "L", "trunc", "t_max", "steps"),
    "table1": ("trunc",),
    "delta": ("kappa", "n_max"),
    "zeros": ("n_max",),
    "projector": ("kappa", "n", "branch"),
}

DEFAULT_FORMAT = {
    "spectrum": "json",
    "kernel": "csv",
    "hsnorm": "json",
    "galerkin": "csv",
    "pseudospectrum": "csv",
    "semigroup": "csv",
    "table1": "json",
    "delta": "json",
    "zeros": "csv",
    "projector": "json",
}

SUBCOMMAND_DEFAULTS = {
    "spectrum": {"branch": "both"},
    "galerkin": {"kappa": 0.0, "n_max": 10},
    "pseudospectrum": {"L": galerkin.PSEUDOSPECTRUM_L},
    "delta": {"n_max": 30},
}


@dataclasses.dataclass
class RunConfig:
    subcommand: str
    regime: Regime = Regime.TRANSMISSION
    kappa: float = 1.0
    n: int = 1
    n_max: int = 5
    branch: str = "plus"
    L: float = 6.0
    n_trunc: int = 100
    grid: GridSpec = None
    lam: tuple = (1 + 1j,)
    y: float = 1.0
    x_range: tuple = (-4.0, 4.0, 81)
    t_max: float = 2.0
    steps: int = 21
    output_path: str = None
    format: str = "json"

    def __post_init__(self):
        if self.subcommand not in SUBCOMMAND_OPTIONS:
            raise ConfigError(f"unknown subcommand '{self.subcommand}'")
        if isinstance(self.regime, str):
            self.regime = Regime.from_name(self.regime)
        if self.kappa < 0.0 and self.regime != Regime.FREE_LAPLACIAN_BARRIER:
            raise ConfigError(f"{self.subcommand}: kappa must be >= 0, got {self.kappa}")
        for name in ("n", "n_max", "steps"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{self.subcommand}: {name} must be >= 1")
        if self.branch not in ("plus", "minus", "both"):
            raise ConfigError(f"{self.subcommand}: unknown branch '{self.branch}'")
        if self.L <= 0.0 or self.t_max <= 0.0:
            raise ConfigError(f"{self.subcommand}: L and t_max must be > 0")
        if self.n_trunc < 4 or self.n_trunc % 2:
            raise ConfigError(f"{self.subcommand}: trunc must be even and >= 4")
        if self.format not in EMITTERS:
            raise ConfigError(f"{self.subcommand}: unknown format '{self.format}'")
        x_min, x_max, count = self.x_range
        if x_min > x_max or count < 1 or count != int(count):
            raise ConfigError(f"{self.subcommand}: invalid x range {self.x_range}")
        if self.output_path is None:
            self.output_path = f"{self.subcommand}.{self.format}"

    @classmethod
    def from_options(cls, subcommand, options):
        """RunConfig from a flag-name -> value dict (argparse dests)"""
        grid = options.get("grid", DEFAULTS["grid"])
        if any(count != int(count) for count in grid[4:]):
            raise ConfigError(f"{subcommand}: grid sizes must be integers, got {grid[4:]}")
        fmt = options.get("format", DEFAULT_FORMAT[subcommand])
        return cls(
            subcommand,
            regime=options.get("regime", DEFAULTS["regime"]),
            kappa=options.get("kappa", DEFAULTS["kappa"]),
            n=options.get("n", DEFAULTS["n"]),
            n_max=options.get("n_max", DEFAULTS["n_max"]),
            branch=options.get("branch", DEFAULTS["branch"]),
            L=options.get("L", DEFAULTS["L"]),
            n_trunc=options.get("trunc", DEFAULTS["trunc"]),
            grid=GridSpec(*grid[:4], int(grid[4]), int(grid[5])),
            lam=tuple(options.get("lam", DEFAULTS["lam"])),
            y=options.get("y", DEFAULTS["y"]),
            x_range=tuple(options.get("x_range", DEFAULTS["x_range"])),
            t_max=options.get("t_max", DEFAULTS["t_max"]),
            steps=options.get("steps", DEFAULTS["steps"]),
            output_path=options.get("out"),
            format=fmt,
        )

    @property
    def problem(self):
        return SpectralProblem(self.regime, self.kappa)

    @property
    def branches(self):
        if self.branch == "both":
            return (Branch.PLUS, Branch.MINUS)
        return (Branch.from_name(self.branch),)

    def params(self):
        """Echo of the parameters the subcommand reads"""
        echo = {}
        for name in SUBCOMMAND_OPTIONS[self.subcommand]:
            value = getattr(self, "n_trunc" if name == "trunc" else name)
            if isinstance(value, GridSpec):
                value = dataclasses.astuple(value)
            echo[name] = str(value) if isinstance(value, Regime) else value
        return echo


def _attempt(func, item):
    """(result, None) or (None, exception name) for one sweep item"""
    try:
        return func(*item), None
    except SpectralError as exc:
        logging.error("  %s", exc)
        return None, type(exc).__name__


def _sweep(func, items):
    return parallel_map(functools.partial(_attempt, func), items)


def _failures(outcomes):
    return sum(error is not None for _, error in outcomes)


def spectrum(config):
    items = [
        (config.problem, n, branch)
        for n in range(1, config.n_max + 1)
        for branch in config.branches
    ]
    outcomes = _sweep(spectra.solve_eigenvalue, items)
    columns = ("n", "branch", "re", "im", "residual", "method", "error")
    rows = []
    for (_, n, branch), (rec, error) in zip(items, outcomes):
        if rec is None:
            rows.append((n, str(branch), np.nan, np.nan, np.nan, "", error))
        else:
            rows.append(
                (n, str(branch), rec.lam.real, rec.lam.imag, rec.residual, str(rec.method), "")
            )
    return columns, rows, {"failed": _failures(outcomes)}


def kernel(config):
    x_min, x_max, count = config.x_range
    xs = np.linspace(x_min, x_max, int(count))
    problem = config.problem
    columns = ("lam_re", "lam_im", "x", "re", "im")
    rows = []
    summary = {}
    for k, lam in enumerate(config.lam):
        values = kernels.kernel(problem, xs, config.y, lam)
        rows += [(lam.real, lam.imag, x, v.real, v.imag) for x, v in zip(xs, values)]
        jump = kernels.derivative_jump(problem, config.y, lam)
        summary[f"jump_{k}"] = abs(jump + 1.0)
        if config.regime == Regime.TRANSMISSION:
            fun = lambda t, lam=lam: kernels.kernel(problem, t, config.y, lam)
            summary[f"interface_{k}"] = max(kernels.interface_residuals(fun, config.kappa))
    return columns, rows, summary


def hsnorm(config):
    items = [(config.problem, lam) for lam in config.lam]
    outcomes = _sweep(norms.hs_norm, items)
    columns = ("re", "im", "hs_norm", "quadrature_error", "log_scaled", "error")
    rows = []
    for (_, lam), (res, error) in zip(items, outcomes):
        if res is None:
            rows.append((lam.real, lam.imag, np.nan, np.nan, False, error))
        else:
            rows.append(
                (lam.real, lam.imag, res.hs_norm, res.quadrature_error, res.log_scaled, "")
            )
    return columns, rows, {"failed": _failures(outcomes)}


def galerkin_spectrum(config):
    model = galerkin.build_model(config.L, config.kappa, config.n_trunc)
    records = galerkin.eigenvalues(model)[: config.n_max]
    columns = ("n", "re", "im", "residual")
    rows = [(rec.n, rec.lam.real, rec.lam.imag, rec.residual) for rec in records]
    return columns, rows, {}


def pseudospectrum(config):
    model = galerkin.build_model(config.L, config.kappa, config.n_trunc)
    psg = galerkin.pseudospectrum(model, config.grid)
    grid = GridResult(config.grid.re_values, config.grid.im_values, psg.values)
    return GridResult.columns, grid.to_rows(), {"sigma_min": float(psg.values.min())}


def semigroup(config):
    model = galerkin.build_model(config.L, config.kappa, config.n_trunc)
    times = np.linspace(0.0, config.t_max, config.steps)
    decay = galerkin.semigroup_decay(model, times)
    columns = ("t", "norm", "symbol_bound")
    rows = [
        (t, norm, norms.semigroup_symbol_norm(t) if t > 0.0 else 1.0)
        for t, norm in zip(decay.times, decay.norms)
    ]
    return columns, rows, {"rate": decay.rate}


def _table1_row(kappa, length, n_trunc):
    model = galerkin.build_model(length, kappa, n_trunc)
    return galerkin.eigenvalues(model)


def _table1_limit(kappa):
    problem = SpectralProblem(Regime.TRANSMISSION, kappa)
    return [spectra.solve_eigenvalue(problem, n, Branch.PLUS) for n in (1, 2)]


def _mismatch(key, computed):
    """Columns whose value differs from the printed one by more than TABLE1_TOL"""
    bad = []
    for column, value, printed in zip(TABLE1_COLUMNS, computed, TABLE1_REFERENCE[key]):
        if printed is None or value is None:
            continue
        if max(abs(value.real - printed.real), abs(value.imag - printed.imag)) > TABLE1_TOL:
            logging.warning(
                "  Table cell kappa=%g L=%g lambda_%d: %s, printed %s",
                key[0], key[1], column, value, printed,
            )
            bad.append(column)
    return bad


def table1(config):
    items = [
        (kappa, length, config.n_trunc)
        for kappa in TABLE1_KAPPAS
        for length in TABLE1_LENGTHS
    ]
    runs = parallel_map(functools.partial(_attempt, _table1_row), items)
    columns = ("kappa", "L", "re1", "im1", "re3", "im3", "re5", "im5", "spurious3", "error")
    rows = []
    mismatches = 0
    for kappa in TABLE1_KAPPAS:
        previous = None
        for (kap, length, _), (records, error) in zip(items, runs):
            if kap != kappa:
                continue
            if records is None:
                rows.append((kappa, length) + (np.nan,) * 6 + ("", error))
                previous = None
                continue
            cells = [records[col - 1].lam for col in TABLE1_COLUMNS]
            spurious = ""
            if previous is not None:
                kept = galerkin.filter_spurious(previous[1], records, previous[0], length)
                spurious = "no" if any(rec is records[2] for rec in kept) else "yes"
            previous = (length, records)
            mismatches += len(_mismatch((kappa, length), cells))
            rows.append(
                (kappa, length)
                + tuple(part for lam in cells for part in (lam.real, lam.imag))
                + (spurious, "")
            )
        limit = [rec.lam for rec in _table1_limit(kappa)]
        mismatches += len(_mismatch((kappa, np.inf), (limit[0], None, limit[1])))
        rows.append(
            (kappa, np.inf, limit[0].real, limit[0].imag, np.nan, np.nan)
            + (limit[1].real, limit[1].imag, "", "")
        )
    return columns, rows, {"mismatches": mismatches, "failed": _failures(runs)}


def delta(config):
    summary = {}
    if config.n_max >= spectra.DELTA_MIN_N:
        slope, deltas = spectra.delta_fit(config.kappa, config.n_max)
        summary["c"] = slope
    else:
        deltas = spectra.delta_table(config.kappa, config.n_max)
    columns = ("n", "delta")
    rows = [(n, value) for n, value in enumerate(deltas, start=1)]
    return columns, rows, summary


def zeros(config):
    columns = ("n", "ai_zero", "ai_residual", "aip_zero", "aip_residual")
    rows = []
    for n in range(1, config.n_max + 1):
        a = airy_zero(n, ZeroKind.OF_AI)
        ap = airy_zero(n, ZeroKind.OF_AI_PRIME)
        rows.append((n, a.location, a.residual, ap.location, ap.residual))
    return columns, rows, {}


def projector(config):
    rows = []
    columns = ("n", "branch", "re", "im", "norm", "sq_re", "sq_im", "idempotence")
    for branch in config.branches:
        record = spectra.solve_eigenvalue(config.problem, config.n, branch)
        res = spectra.projector(record)
        rows.append(
            (
                record.n,
                str(branch),
                record.lam.real,
                record.lam.imag,
                res.norm,
                res.eigfun_sq_integral.real,
                res.eigfun_sq_integral.imag,
                res.idempotence,
            )
        )
    return columns, rows, {}


COMMANDS = {
    "spectrum": spectrum,
    "kernel": kernel,
    "hsnorm": hsnorm,
    "galerkin": galerkin_spectrum,
    "pseudospectrum": pseudospectrum,
    "semigroup": semigroup,
    "table1": table1,
    "delta": delta,
    "zeros": zeros,
    "projector": projector,
}


def run(config):
    """Run one subcommand and write its result file, returns the exit status"""
    logging.info("Running %s...", config.subcommand)
    start = time.time()
    try:
        columns, rows, summary = COMMANDS[config.subcommand](config)
    except ConfigError as exc:
        logging.error("  %s: %s", config.subcommand, exc)
        return 2
    except SpectralError as exc:
        logging.error("  %s aborted: %s: %s", config.subcommand, type(exc).__name__, exc)
        return 3
    elapsed = time.time() - start
    write_results(
        config.output_path, config.format, columns, rows, config.params(), summary, elapsed
    )
    logging.info("  Done in %.3fs, results in %s", elapsed, config.output_path)
    return 0


def _add_options(subparser, names):
    if "regime" in names:
        subparser.add_argument(
            "-r",
            "--regime",
            help="Boundary regime",
            choices=[str(regime) for regime in Regime],
        )
    if "kappa" in names:
        subparser.add_argument(
            "-k", "--kappa", help="Transmission/Robin coefficient", type=float
        )
    if "n" in names:
        subparser.add_argument("-n", "--n", help="Eigenvalue index", type=int)
    if "n_max" in names:
        subparser.add_argument("-N", "--n-max", help="Number of indices", type=int)
    if "branch" in names:
        subparser.add_argument("-b", "--branch", choices=["plus", "minus", "both"])
    if "L" in names:
        subparser.add_argument("-L", "--L", help="Half-length of the interval", type=float)
    if "trunc" in names:
        subparser.add_argument("-t", "--trunc", help="Galerkin truncation", type=int)
    if "grid" in names:
        subparser.add_argument(
            "-g",
            "--grid",
            help="re_min re_max im_min im_max nx ny",
            type=float,
            nargs=6,
        )
    if "lam" in names:
        subparser.add_argument(
            "-l", "--lam", help="Spectral parameters", type=complex, nargs="+"
        )
    if "y" in names:
        subparser.add_argument("-y", "--y", help="Source point", type=float)
    if "x_range" in names:
        subparser.add_argument(
            "-x", "--x-range", help="x_min x_max count", type=float, nargs=3
        )
    if "t_max" in names:
        subparser.add_argument("-T", "--t-max", help="Final time", type=float)
    if "steps" in names:
        subparser.add_argument("-s", "--steps", help="Number of times", type=int)
    subparser.add_argument("-o", "--out", help="Output file")
    subparser.add_argument("-f", "--format", choices=sorted(EMITTERS))
    subparser.add_argument("-c", "--config", help="INI file, one section per subcommand")


def _file_options(subparser, subcommand, path):
    """Options of the subcommand section of an INI file, parsed as flags"""
    ini = configparser.ConfigParser()
    ini.optionxform = str
    if not ini.read(path):
        raise ConfigError(f"cannot read config file {path}")
    unknown = set(ini.sections()) - set(SUBCOMMAND_OPTIONS)
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    if not ini.has_section(subcommand):
        return {}
    allowed = set(SUBCOMMAND_OPTIONS[subcommand]) | {"out", "format"}
    tokens = []
    for key, value in ini.items(subcommand):
        name = key.replace("-", "_")
        if name not in allowed:
            raise ConfigError(f"{path}: unknown key '{key}' in [{subcommand}]")
        tokens += [f"--{name.replace('_', '-')}"] + value.split()
    return vars(subparser.parse_args(tokens))


def main(argv=None):
    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(message)s", level=logging.INFO
    )
    parser = argparse.ArgumentParser(
        description=(
            "Spectra, resolvent kernels and pseudospectra of the complex Airy "
            "operator with a transmission barrier"
        )
    )
    subparsers = parser.add_subparsers()
    commands = {}
    for name, options in SUBCOMMAND_OPTIONS.items():
        sub = subparsers.add_parser(name, argument_default=argparse.SUPPRESS)
        _add_options(sub, options)
        sub.set_defaults(func=name)
        commands[name] = sub

    cli_args = parser.parse_args(argv)

    # force use of subcommand, display help without one
    if "func" not in cli_args.__dict__:
        parser.parse_args(["--help"])

    name = cli_args.func
    options = {key: val for key, val in DEFAULTS.items() if key in SUBCOMMAND_OPTIONS[name]}
    options.update(SUBCOMMAND_DEFAULTS.get(name, {}))
    try:
        if "config" in cli_args.__dict__:
            options.update(_file_options(commands[name], name, cli_args.config))
        options.update(
            {key: val for key, val in vars(cli_args).items() if key not in ("func", "config")}
        )
        config = RunConfig.from_options(name, options)
    except ConfigError as exc:
        logging.error("  %s: %s", name, exc)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
