"""Command-line front end: graph stats, figure data, and experiment CSVs.

Every command writes CSV with '#'-prefixed metadata lines (schema name,
library version, resolved parameters) followed by a header row. Outputs are
deterministic given the command line, including row order.

Datasets are referenced through a JSON manifest mapping names to local
edge-list paths; nothing is ever downloaded. A dataset argument of the form
``regular:<n>,<k>`` sidesteps the manifest and generates a random regular
graph instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .accountant import (
    LocalPrivacyParams,
    amplify_all_stationary,
    amplify_all_symmetric,
    amplify_single,
    single_simplified_epsilon,
)
from .graphs import (
    DATASET_NAMES,
    Graph,
    graph_summary,
    load_dataset,
    load_manifest,
    stationary_distribution,
)
from .ldp import mean_estimation_experiment
from .spectral import spectral_summary, sum_p_squared_bound
from .walks import (
    allocation_l2_bound,
    delta_distribution,
    evolve_distribution,
    exact_symmetric_distribution,
    random_regular_graph,
    rho_star,
    simulate_allocation,
    simulate_walks,
)

__all__ = ["main", "build_parser"]

FIG3_DATASETS = ("facebook", "twitch", "deezer")
FIG5_DATASETS = DATASET_NAMES
FIG4_DEFAULT_SPECS = ("regular:4096,4", "regular:4096,8", "regular:4096,16")
FIG5_EPS0 = [round(0.1 + 0.05 * i, 10) for i in range(23)]  # 0.1 .. 1.2
FIG7_EPS0 = [round(0.2 + 0.1 * i, 10) for i in range(19)]  # 0.2 .. 2.0
FIG8_EPS0 = [0.2, 0.4, 0.6, 0.8, 1.0]
FIG7_POPULATIONS = (10_000, 1_000_000)
FIG7_GAMMAS = (1.0, 10.0)
L2_QUANTILES = (0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0)


def write_csv(out, schema: str, metadata: dict, header: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    buf.write(f"# library=walkshuffle {__version__}\n")
    for key in sorted(metadata):
        buf.write(f"# {key}={metadata[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) for v in row])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _format(value) -> str:
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment parameters shared by the data-producing commands.

    ``datasets`` entries are manifest names or ``regular:<n>,<k>`` generator
    specs; ``eps0`` is the local-budget grid (None = command default);
    ``steps`` is a round count or "mixing".
    """

    datasets: tuple[str, ...] | None = None
    scenario: str = "stationary"
    protocol: str = "both"
    eps0: tuple[float, ...] | None = None
    delta: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    steps: str = "mixing"
    trials: int | None = None
    seed: int | None = None
    d: int = 200
    manifest: str | None = None

    def __post_init__(self):
        if self.datasets is not None and len(self.datasets) == 0:
            raise ValueError("dataset list must be non-empty")
        if self.eps0 is not None and len(self.eps0) == 0:
            raise ValueError("eps0 grid must be non-empty")
        for name in ("delta", "delta1", "delta2"):
            value = getattr(self, name)
            if value is not None and not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.trials is not None and self.trials < 0:
            raise ValueError("trials must be >= 0")

    @classmethod
    def from_args(cls, args) -> "ExperimentSpec":
        datasets = getattr(args, "dataset", None)
        if isinstance(datasets, str):
            datasets = (datasets,)
        elif datasets is not None:
            datasets = tuple(datasets)
        eps0 = getattr(args, "eps0", None)
        if isinstance(eps0, str):
            eps0 = tuple(_parse_float_list(eps0))
        return cls(
            datasets=datasets,
            scenario=getattr(args, "scenario", "stationary"),
            protocol=getattr(args, "protocol", "both"),
            eps0=eps0,
            delta=args.delta if hasattr(args, "delta") else None,
            delta1=args.delta1 if hasattr(args, "delta1") else None,
            delta2=args.delta2 if hasattr(args, "delta2") else None,
            steps=str(getattr(args, "steps", "mixing")),
            trials=getattr(args, "trials", None),
            seed=args.seed,
            d=getattr(args, "d", 200),
            manifest=args.manifest,
        )


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _delta_defaults(n: int, delta, delta1, delta2) -> tuple[float, float, float]:
    # documented defaults: delta = delta2 = 1/n^2, delta1 = 1/n^3
    d = 1.0 / n**2 if delta is None else delta
    d2 = 1.0 / n**2 if delta2 is None else delta2
    d1 = 1.0 / n**3 if delta1 is None else delta1
    return d, d1, d2


def _resolve_graph(name: str, manifest_path, seed: int | None) -> tuple[str, Graph]:
    if name.startswith("regular:"):
        spec = name.split(":", 1)[1]
        n_str, k_str = spec.split(",")
        return name, random_regular_graph(int(n_str), int(k_str), seed=seed)
    if manifest_path is None:
        raise SystemExit(f"dataset {name!r} requires --manifest")
    manifest = load_manifest(manifest_path)
    return name, load_dataset(name, manifest)


def _steps_for(steps_arg: str, summary) -> int:
    if steps_arg == "mixing":
        if summary.mixing_time is None:
            raise SystemExit("graph does not mix (zero spectral gap)")
        return summary.mixing_time
    return int(steps_arg)


# ---------------------------------------------------------------------------
# graph-stats
# ---------------------------------------------------------------------------

def cmd_graph_stats(args) -> None:
    label, g = _resolve_graph(args.dataset, args.manifest, args.seed)
    summary = graph_summary(g)
    header = ["dataset", "n", "m", "gamma", "sum_pi_squared", "is_connected", "is_bipartite"]
    row = [
        label, summary.n, summary.m, summary.gamma, summary.sum_pi_squared,
        summary.is_connected, summary.is_bipartite,
    ]
    if args.spectral:
        spec = spectral_summary(g)
        header += ["alpha2", "alpha_n", "gap", "mixing_time"]
        row += [spec.alpha2, spec.alpha_n, spec.gap, spec.mixing_time]
    header.append("version")
    row.append(__version__)
    write_csv(args.out, "graph_stats.v1", {"dataset": label}, header, [row])


# ---------------------------------------------------------------------------
# amplify
# ---------------------------------------------------------------------------

def _amplified(scenario, protocol, lp, n, sum_p2, rho, delta, delta1, delta2, t):
    if protocol == "all":
        if scenario == "symmetric":
            return amplify_all_symmetric(
                lp, n, sum_p2, rho, delta, delta1=delta1, delta2=delta2, t=t
            )
        return amplify_all_stationary(lp, n, sum_p2, delta, delta1=delta1, delta2=delta2, t=t)
    return amplify_single(
        lp, n, sum_p2, delta, delta1=delta1, delta2=delta2, t=t, scenario=scenario
    )


def cmd_amplify(args) -> None:
    eps0 = _parse_float_list(args.eps0)
    if len(eps0) != 1:
        raise SystemExit("amplify takes a single --eps0 value")
    lp = LocalPrivacyParams(epsilon0=eps0[0], delta0=args.delta0)

    steps = None
    rho = args.rho_star
    if args.sum_p2 is not None:
        n = args.n
        if n is None:
            raise SystemExit("--sum-p2 requires --n")
        sum_p2 = args.sum_p2
    elif args.dataset is not None:
        label, g = _resolve_graph(args.dataset, args.manifest, args.seed)
        n = g.n
        spec = spectral_summary(g)
        steps = _steps_for(args.steps, spec)
        if args.scenario == "symmetric":
            p_t = exact_symmetric_distribution(g, steps)
            sum_p2 = p_t.sum_squared()
            rho = rho_star(p_t)
        else:
            pi = stationary_distribution(g)
            sum_p2 = sum_p_squared_bound(pi, spec.gap, steps)
    else:
        raise SystemExit("amplify needs either --sum-p2 with --n, or --dataset")

    delta, delta1, delta2 = _delta_defaults(n, args.delta, args.delta1, args.delta2)
    result = _amplified(
        args.scenario, args.protocol, lp, n, sum_p2, rho, delta,
        delta1 if lp.delta0 > 0 else None, delta2, steps,
    )
    header = [
        "scenario", "protocol", "eps0", "delta0", "n", "sum_p2", "rho_star",
        "delta", "delta1", "delta2", "steps", "epsilon1", "epsilon", "delta_out", "version",
    ]
    row = [
        args.scenario, args.protocol, lp.epsilon0, lp.delta0, n, sum_p2, rho,
        delta, delta1, delta2, steps, result.epsilon1, result.epsilon, result.delta,
        __version__,
    ]
    write_csv(args.out, "amplify.v1", {"scenario_tag": result.scenario}, header, [row])


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> None:
    exp = ExperimentSpec.from_args(args)
    label, g = _resolve_graph(exp.datasets[0], exp.manifest, exp.seed)
    if exp.steps == "mixing":
        steps = _steps_for(exp.steps, spectral_summary(g))
    else:
        steps = int(exp.steps)
    echo = [label, steps, exp.trials, exp.seed, __version__]
    header = ["record", "key", "value", "dataset", "steps", "trials", "seed", "version"]
    rows = []
    if exp.trials > 0:
        histogram: dict[int, int] = {}
        l2 = []
        for alloc in simulate_allocation(g, steps, exp.trials, exp.seed):
            l2.append(alloc.l2_norm)
            for count, freq in enumerate(np.bincount(alloc.counts)):
                if freq:
                    histogram[count] = histogram.get(count, 0) + int(freq)
        for count in sorted(histogram):
            rows.append(["histogram", count, histogram[count]] + echo)
        for q in L2_QUANTILES:
            rows.append(["l2_quantile", q, float(np.quantile(l2, q))] + echo)
        pi = stationary_distribution(g)
        for delta in (0.1, 0.01):
            rows.append(["l2_bound", delta, allocation_l2_bound(pi, g.n, delta)] + echo)
    write_csv(
        args.out, "simulate.v1",
        {"dataset": label, "steps": steps, "trials": exp.trials, "seed": exp.seed},
        header, rows,
    )


# ---------------------------------------------------------------------------
# utility
# ---------------------------------------------------------------------------

def _utility_central(protocol: str, eps0: float, n: int, sum_p2: float,
                     delta: float, delta2: float) -> float:
    """Central epsilon for the error-vs-epsilon comparison.

    The all protocol uses its headline pure-randomizer form; the single
    protocol uses its printed eps0 <= 1 simplified bound (falling back to
    the pure form above 1). The mixed accounting is what makes the
    all-protocol's utility advantage at matched central epsilon
    reproducible; under pure-vs-pure accounting the comparison reverses.
    """
    lp = LocalPrivacyParams(epsilon0=eps0)
    if protocol == "all":
        return amplify_all_stationary(lp, n, sum_p2, delta, delta2=delta2).epsilon
    if eps0 <= 1.0:
        return single_simplified_epsilon(eps0, sum_p2, delta)
    return amplify_single(lp, n, sum_p2, delta).epsilon


def cmd_utility(args) -> None:
    exp = ExperimentSpec.from_args(args)
    label, g = _resolve_graph(exp.datasets[0], exp.manifest, exp.seed)
    spec = spectral_summary(g)
    steps = _steps_for(exp.steps, spec)
    delta, delta1, delta2 = _delta_defaults(g.n, exp.delta, exp.delta1, exp.delta2)
    eps0_grid = list(exp.eps0) if exp.eps0 else FIG8_EPS0
    protocols = ("all", "single") if exp.protocol == "both" else (exp.protocol,)
    pi = stationary_distribution(g)
    sum_p2 = sum_p_squared_bound(pi, spec.gap, steps)
    traces = list(simulate_walks(g, steps, exp.trials, exp.seed))

    header = [
        "epsilon0", "central_epsilon", "protocol", "squared_error", "seed",
        "dataset", "steps", "d", "version",
    ]
    rows = []
    for eps0 in eps0_grid:
        for protocol in protocols:
            central = _utility_central(protocol, eps0, g.n, sum_p2, delta, delta2)
            for i, trace in enumerate(traces):
                err = mean_estimation_experiment(
                    trace, exp.d, eps0, protocol, seed=(exp.seed or 0) + i
                )
                rows.append([
                    eps0, central, protocol, err, (exp.seed or 0) + i,
                    label, steps, exp.d, __version__,
                ])
    write_csv(
        args.out, "utility.v1",
        {
            "dataset": label, "steps": steps, "delta": delta, "delta2": delta2,
            "d": exp.d, "single_accounting": "simplified(eps0<=1)",
        },
        header, rows,
    )


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def _fig3_rows(exp: ExperimentSpec):
    datasets = exp.datasets or FIG3_DATASETS
    eps0 = exp.eps0[0] if exp.eps0 else 1.0
    rows = []
    meta = {"eps0": eps0, "x": "t", "y": "epsilon"}
    for name in datasets:
        label, g = _resolve_graph(name, exp.manifest, exp.seed)
        spec = spectral_summary(g)
        pi = stationary_distribution(g)
        delta, _, delta2 = _delta_defaults(g.n, exp.delta, exp.delta1, exp.delta2)
        lp = LocalPrivacyParams(epsilon0=eps0)
        tmix = spec.mixing_time
        grid = sorted(set(
            int(round(v)) for v in np.geomspace(1, 2 * tmix, 40)
        ) | {tmix, 2 * tmix})
        for t in grid:
            s2 = sum_p_squared_bound(pi, spec.gap, t)
            eps = amplify_all_stationary(lp, g.n, s2, delta, delta2=delta2, t=t).epsilon
            rows.append([t, eps, label])
        meta[f"{label}.gap"] = spec.gap
        meta[f"{label}.mixing_time"] = tmix
    return rows, meta


def _fig4_rows(exp: ExperimentSpec):
    specs = exp.datasets or FIG4_DEFAULT_SPECS
    eps0 = exp.eps0[0] if exp.eps0 else 1.0
    seeds = exp.trials if exp.trials else 5
    base_seed = exp.seed or 0
    rows = []
    meta = {"eps0": eps0, "seeds": seeds, "x": "t", "y": "epsilon"}
    for spec_name in specs:
        graphs = []
        for s in range(seeds):
            _, g = _resolve_graph(spec_name, exp.manifest, base_seed + s)
            graphs.append(g)
        n = graphs[0].n
        delta, _, delta2 = _delta_defaults(n, exp.delta, exp.delta1, exp.delta2)
        lp = LocalPrivacyParams(epsilon0=eps0)
        t_max = max(2 * spectral_summary(g).mixing_time for g in graphs)
        eps_by_t = np.zeros(t_max)
        for g in graphs:
            p = delta_distribution(g, 0)
            for t in range(1, t_max + 1):
                p = evolve_distribution(g, p, 1)
                eps = amplify_all_symmetric(
                    lp, g.n, p.sum_squared(), rho_star(p), delta, delta2=delta2, t=t
                ).epsilon
                eps_by_t[t - 1] += eps / len(graphs)
        series = spec_name.split(":", 1)[1] if ":" in spec_name else spec_name
        series = "k=" + series.split(",")[1] if "," in series else series
        for t in range(1, t_max + 1):
            rows.append([t, eps_by_t[t - 1], series])
    return rows, meta


def _fig5_rows(exp: ExperimentSpec):
    datasets = exp.datasets or FIG5_DATASETS
    eps_grid = list(exp.eps0) if exp.eps0 else FIG5_EPS0
    rows = []
    meta = {"x": "epsilon0", "y": "epsilon", "protocol": "all", "t": "mixing"}
    for name in datasets:
        label, g = _resolve_graph(name, exp.manifest, exp.seed)
        spec = spectral_summary(g)
        pi = stationary_distribution(g)
        delta, _, delta2 = _delta_defaults(g.n, exp.delta, exp.delta1, exp.delta2)
        s2 = sum_p_squared_bound(pi, spec.gap, spec.mixing_time)
        for eps0 in eps_grid:
            lp = LocalPrivacyParams(epsilon0=eps0)
            eps = amplify_all_stationary(
                lp, g.n, s2, delta, delta2=delta2, t=spec.mixing_time
            ).epsilon
            rows.append([eps0, eps, label])
    return rows, meta


def _fig7_rows(exp: ExperimentSpec):
    eps_grid = list(exp.eps0) if exp.eps0 else FIG7_EPS0
    rows = []
    meta = {"x": "epsilon0", "y": "epsilon", "limit": "stationary"}
    for eps0 in eps_grid:
        rows.append([eps0, eps0, "identity"])
    for n in FIG7_POPULATIONS:
        delta, _, delta2 = _delta_defaults(n, exp.delta, exp.delta1, exp.delta2)
        for gamma in FIG7_GAMMAS:
            s2 = gamma / n
            for protocol in ("all", "single"):
                series = f"{protocol},n={n},gamma={int(gamma)}"
                for eps0 in eps_grid:
                    lp = LocalPrivacyParams(epsilon0=eps0)
                    eps = _amplified(
                        "stationary", protocol, lp, n, s2, 1.0, delta, None, delta2, None
                    ).epsilon
                    rows.append([eps0, eps, series])
    return rows, meta


def _fig8_rows(exp: ExperimentSpec):
    name = exp.datasets[0] if exp.datasets else "twitch"
    label, g = _resolve_graph(name, exp.manifest, exp.seed)
    spec = spectral_summary(g)
    steps = spec.mixing_time
    delta, _, delta2 = _delta_defaults(g.n, exp.delta, exp.delta1, exp.delta2)
    eps_grid = list(exp.eps0) if exp.eps0 else FIG8_EPS0
    seeds = exp.trials if exp.trials else 20
    base_seed = exp.seed or 0
    pi = stationary_distribution(g)
    s2 = sum_p_squared_bound(pi, spec.gap, steps)
    traces = list(simulate_walks(g, steps, seeds, base_seed))
    rows = []
    meta = {
        "dataset": label, "steps": steps, "seeds": seeds, "d": exp.d,
        "x": "central_epsilon", "y": "squared_error", "yscale": "log",
        "single_accounting": "simplified(eps0<=1)",
    }
    for protocol in ("all", "single"):
        for eps0 in eps_grid:
            central = _utility_central(protocol, eps0, g.n, s2, delta, delta2)
            errs = [
                mean_estimation_experiment(trace, exp.d, eps0, protocol, seed=base_seed + i)
                for i, trace in enumerate(traces)
            ]
            rows.append([central, float(np.mean(errs)), protocol])
    return rows, meta


FIGURES = {
    "fig3": _fig3_rows,
    "fig4": _fig4_rows,
    "fig5": _fig5_rows,
    "fig7": _fig7_rows,
    "fig8": _fig8_rows,
}


def cmd_figure(args) -> None:
    builder = FIGURES[args.which]
    rows, meta = builder(ExperimentSpec.from_args(args))
    write_csv(args.out, f"figure-{args.which}.v1", meta, ["x", "y", "series"], rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", default=None, help="JSON manifest of dataset paths")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkshuffle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph-stats", help="LCC size, irregularity, spectra of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--spectral", action="store_true", help="include eigenvalue columns")
    _add_common(p)
    p.set_defaults(func=cmd_graph_stats)

    p = sub.add_parser("amplify", help="evaluate one central (epsilon, delta) guarantee")
    p.add_argument("--scenario", choices=("stationary", "symmetric"), default="stationary")
    p.add_argument("--protocol", choices=("all", "single"), default="all")
    p.add_argument("--eps0", required=True)
    p.add_argument("--delta0", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta1", type=float, default=None)
    p.add_argument("--delta2", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--sum-p2", type=float, default=None)
    p.add_argument("--rho-star", type=float, default=1.0)
    p.add_argument("--dataset", default=None)
    p.add_argument("--steps", default="mixing")
    _add_common(p)
    p.set_defaults(func=cmd_amplify)

    p = sub.add_parser("simulate", help="Monte-Carlo report allocations")
    p.add_argument("--dataset", required=True, help="manifest name or regular:<n>,<k>")
    p.add_argument("--steps", default="mixing")
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("utility", help="private mean-estimation squared error")
    p.add_argument("--dataset", default="twitch", help="manifest name or regular:<n>,<k>")
    p.add_argument("--protocol", choices=("all", "single", "both"), default="both")
    p.add_argument("--eps0", default=None, help="comma-separated grid")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta1", type=float, default=None)
    p.add_argument("--delta2", type=float, default=None)
    p.add_argument("--steps", default="mixing")
    p.add_argument("--trials", type=int, default=20, help="number of seeds")
    p.add_argument("--d", type=int, default=200, help="report dimensionality")
    _add_common(p)
    p.set_defaults(func=cmd_utility)

    p = sub.add_parser("figure", help="emit the (x, y, series) data behind a figure")
    p.add_argument("which", choices=sorted(FIGURES))
    p.add_argument("--dataset", action="append", default=None,
                   help="repeatable; manifest name or regular:<n>,<k>")
    p.add_argument("--eps0", default=None, help="comma-separated grid or single value")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta1", type=float, default=None)
    p.add_argument("--delta2", type=float, default=None)
    p.add_argument("--protocol", choices=("all", "single", "both"), default="both")
    p.add_argument("--scenario", choices=("stationary", "symmetric"), default="stationary")
    p.add_argument("--steps", default="mixing")
    p.add_argument("--trials", type=int, default=None, help="seeds for fig4/fig8")
    p.add_argument("--d", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
