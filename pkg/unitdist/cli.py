"""
Command line interface.

    unitdist [--format text|csv|json] [--out PATH] [--budget SEC] [--registry PATH] COMMAND

Exit codes: 0 all assertions met, 1 usage or input error, 2 a numeric
target was missed (or a certification failed).
"""

from __future__ import annotations

import math
from pathlib import Path

import click
from dotenv import load_dotenv

from . import asymptotics, tables
from ._version import __version__
from .config import config, reload_env
from .errors import InvalidUsage, TargetMissed
from .euclid_bound import (
    BoundProblem,
    constraint_from_profile,
    solve_theta_g,
    theta_infinity,
    verify_feasible,
)
from .geometry import GraphSpec, build_graph, graph_profile
from .homog_theta import (
    AbelianCayleyGraph,
    SubgraphSpec,
    cayley_theta_lp,
    ratio_inequality_check,
    subgraph_alpha,
)
from .independence import (
    frankl_wilson_bound,
    load_registry,
    max_independent_set,
    registry_lookup,
)
from .logger import log, set_console_level
from .scheme_theta import theta_equality_condition, theta_johnson, theta_prime_johnson
from .utility import render_rows


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError as e:
        raise InvalidUsage(f"expected a comma separated list of integers, got {text!r}") from e


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError as e:
        raise InvalidUsage(f"expected a comma separated list of numbers, got {text!r}") from e


class Output:
    """Where and how results are written; lives on the click context."""

    def __init__(self, fmt: str, out: Path | None, digits: int):
        self.fmt = fmt
        self.out = out
        self.digits = digits

    def emit(self, rows: list[dict]) -> None:
        text = render_rows(rows, self.fmt, self.digits)
        if self.out is not None:
            self.out.parent.mkdir(parents=True, exist_ok=True)
            self.out.write_text(text + "\n")
            log.info(f"wrote {len(rows)} rows to {self.out}")
        else:
            click.echo(text)


@click.group()
@click.version_option(__version__, prog_name="unitdist")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default=None, help="Output format.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write results to a file.")
@click.option("--budget", type=float, default=None, help="Seconds per independence search.")
@click.option("--registry", type=click.Path(exists=True, dir_okay=False), default=None, help="Bounds registry file.")
@click.option("-v", "--verbose", is_flag=True, help="Debug output on stderr.")
@click.pass_context
def cli(ctx, fmt, out, budget, registry, verbose):
    """Density bounds for sets avoiding unit distances."""
    if verbose:
        set_console_level("DEBUG")
    alpha = tables.alpha_settings()
    if budget is not None:
        if budget <= 0:
            raise InvalidUsage("--budget must be positive")
        alpha["budget"] = budget
    ctx.obj = {
        "output": Output(
            fmt or config["output"]["format"].as_choice(["text", "csv", "json"]),
            out,
            config["output"]["digits"].get(int),
        ),
        "alpha": alpha,
        "registry": load_registry(Path(registry)) if registry else None,
    }


# ------------------------------------------------------------------------------------ #
#                                   single problems                                    #
# ------------------------------------------------------------------------------------ #


def _alpha_for(spec: GraphSpec, ctx_obj: dict, choice: str = "auto") -> int:
    """
    alpha for a --graph: a literal value, the registry bound (`registry`), or
    the registry bound when there is one and an exact search otherwise (`auto`).
    """
    if choice == "registry":
        return tables.resolve_alpha(spec, "registry", ctx_obj["registry"], ctx_obj["alpha"]).value
    if choice != "auto":
        try:
            return int(choice)
        except ValueError as e:
            raise InvalidUsage(f"--alpha takes an integer, auto or registry, got {choice!r}") from e
    found = registry_lookup(spec, ctx_obj["registry"])
    if found is not None:
        return found.value
    searched = max_independent_set(build_graph(spec), **ctx_obj["alpha"])
    if not searched.complete:
        raise TargetMissed(f"alpha({spec}) is not settled, pass --alpha")
    return searched.value


@cli.command()
@click.argument("n", type=int)
@click.option("--graph", "graphs", multiple=True, help="Graph spec of a subgraph constraint, repeatable.")
@click.option("--alpha", "alphas", multiple=True, help="alpha per --graph, in order: a value, auto or registry.")
@click.option("--tmax", "t_max", type=float, default=None, help="Sampling horizon (config bound.t_max).")
@click.option("--samples", type=int, default=None, help="Grid size on [0, tmax] (config bound.samples).")
@click.option("--verify", "point", default=None, help="Only certify the given z0,z1,... instead of solving.")
@click.pass_obj
def bound(obj, n, graphs, alphas, t_max, samples, point):
    """Certified upper bound on the density of sets avoiding distance 1 in R^N."""
    if alphas and len(alphas) != len(graphs):
        raise InvalidUsage("give either no --alpha or one per --graph")
    constraints = []
    for k, text in enumerate(graphs):
        spec = GraphSpec.parse(text)
        alpha = _alpha_for(spec, obj, alphas[k] if alphas else "auto")
        constraints.append(constraint_from_profile(graph_profile(spec), alpha, str(spec)))
    settings = tables.bound_settings()
    if t_max is not None:
        if t_max <= 0:
            raise InvalidUsage("--tmax must be positive")
        settings["t_max"] = t_max
    if samples is not None:
        settings["samples"] = samples
    problem = BoundProblem(n, tuple(constraints), **settings)

    if point is not None:
        report = verify_feasible(_float_list(point), problem)
        obj["output"].emit([{"n": n, **report.to_dict()}])
        if not report.feasible:
            raise TargetMissed(f"the point is not feasible for n={n}")
        return

    cert = solve_theta_g(problem, **tables.lp_settings())
    row = {"n": n, "theta_infinity": theta_infinity(n)}
    row.update({f"z{k}": float(v) for k, v in enumerate(cert.z)})
    row.update({
        "objective": cert.objective,
        "chromatic_lower": cert.chromatic_lower,
        "grid_min": cert.report.grid_min,
        "tail_horizon": cert.report.tail_horizon,
        "bump": cert.report.bump,
    })
    obj["output"].emit([row])


@cli.command()
@click.argument("spec")
@click.option("--engine", type=click.Choice(["auto", "bnb", "cpsat"]), default=None)
@click.option("--exact/--any", "exact", default=False, help="Fail unless the search finishes.")
@click.pass_obj
def alpha(obj, spec, engine, exact):
    """Independence number of a graph spec, with the known bounds next to it."""
    spec = GraphSpec.parse(spec)
    options = dict(obj["alpha"])
    if engine:
        options["engine"] = engine
    found = max_independent_set(build_graph(spec), **options)
    rows = [found.to_dict()]
    for extra in (frankl_wilson_bound(spec), registry_lookup(spec, obj["registry"])):
        if extra is not None:
            rows.append(extra.to_dict())
    obj["output"].emit(rows)
    if exact and not found.complete:
        raise TargetMissed(f"alpha({spec}) >= {found.value}, the search did not finish")


@cli.command("johnson-bounds")
@click.argument("n", type=int)
@click.argument("w", type=int)
@click.argument("i", type=int)
@click.pass_obj
def johnson_bounds(obj, n, w, i):
    """theta, theta' and the Frankl-Wilson and registry bounds for J(N,W,I)."""
    spec = GraphSpec.parse(f"johnson:{n},{w},{i}")
    fw = frankl_wilson_bound(spec)
    sdp = registry_lookup(spec, obj["registry"])
    obj["output"].emit([{
        "graph": str(spec),
        "vertices": math.comb(n, w),
        "theta": theta_johnson(n, w, i),
        "theta_prime": theta_prime_johnson(n, w, i),
        "equality": theta_equality_condition(n, w, i),
        "fw": fw.value if fw else None,
        "sdp": sdp.value if sdp else None,
    }])


@cli.command("cayley-theta")
@click.option("--order", "orders", required=True, help="Group orders, e.g. 5 or 4x4.")
@click.option("--connection", required=True, help="Connection set, e.g. 1,5 (cyclic) or 0.1;1.0 (products).")
@click.option("--subgraph", default=None, help="Vertices V of the strengthening subgraph.")
@click.option("--alpha", "alpha_value", type=int, default=None, help="alpha of the subgraph on V; computed if omitted.")
@click.pass_obj
def cayley_theta(obj, orders, connection, subgraph, alpha_value):
    """Theta of a Cayley graph on a finite abelian group, optionally strengthened."""
    sizes = _int_list(orders.replace("x", ","))

    def parse_elements(text):
        if len(sizes) == 1:
            return [(v,) for v in _int_list(text)]
        return [tuple(_int_list(e.replace(".", ","))) for e in text.split(";") if e.strip()]

    g = AbelianCayleyGraph(tuple(sizes), tuple(parse_elements(connection)))
    plain = cayley_theta_lp(g)
    row = {"graph": g.label, "vertices": g.size, "theta": plain.value, "density": plain.density}
    if subgraph:
        V = parse_elements(subgraph)
        if alpha_value is None:
            alpha_value = subgraph_alpha(g, V, budget=obj["alpha"]["budget"])
        strong = cayley_theta_lp(g, SubgraphSpec(tuple(V), alpha_value))
        row.update({
            "subgraph": len(set(V)),
            "alpha_subgraph": alpha_value,
            "theta_strengthened": strong.value,
        })
        if g.size <= 64:
            row["ratio_inequality"] = ratio_inequality_check(g, V, budget=obj["alpha"]["budget"])
    obj["output"].emit([row])


@cli.command("asymptotics")
@click.argument("which", type=click.Choice(["fw", "raigo", "lemma", "limit", "all"]), default="all")
@click.option("--x1", type=float, default=0.22, show_default=True)
@click.option("--x2", type=float, default=0.20, show_default=True)
@click.option("--r", "radius", type=float, default=0.74, show_default=True)
@click.option("--n-to", type=int, default=400, show_default=True)
@click.option(
    "--certify",
    type=(int, float, float, float),
    default=None,
    metavar="N R GAMMA M",
    help="Certify the lemma inequality for one dimension instead of running WHICH.",
)
@click.pass_obj
def asymptotics_cmd(obj, which, x1, x2, radius, n_to, certify):
    """Exponential-rate checks: Frankl-Wilson, Raigorodskii-type and limit bases."""
    if certify is not None:
        cert = asymptotics.lemma_certificate(*certify)
        obj["output"].emit([{"check": "lemma", **cert.to_dict()}])
        if not cert.passed:
            raise TargetMissed(f"lemma certificate failed for n={cert.n}")
        return
    rows: list[dict] = []
    failed = []
    if which in ("fw", "all"):
        report = asymptotics.fw_exponent_report()
        rows += [{"check": "fw", **r} for r in report.to_rows()]
    if which in ("raigo", "all"):
        report = asymptotics.raigo_report(x1, x2)
        rows += [{"check": "raigo", **r} for r in report.to_rows()]
        if not (report.b_below_sqrt_2e and report.f_below_target):
            failed.append("raigo")
    if which in ("limit", "all"):
        report = asymptotics.limit_base_check()
        rows += [{"check": "limit", "quantity": k, "value": v} for k, v in vars(report).items()]
        if not report.passed:
            failed.append("limit")
    if which == "lemma":
        gamma = math.sqrt(asymptotics.c_of(radius)) + 0.05
        m = gamma * asymptotics.SQRT_2_OVER_E + 0.05
        fixed = asymptotics.phi_fixed_point(radius, gamma)
        sweep = asymptotics.lemma_n_star(radius, gamma, m, n_to=n_to)
        rows += [
            {"check": "lemma", "quantity": "gamma", "value": gamma},
            {"check": "lemma", "quantity": "m", "value": m},
            {"check": "lemma", "quantity": "phi_fixed_point", "value": fixed},
            {"check": "lemma", "quantity": "n_star", "value": sweep.n_star},
            {"check": "lemma", "quantity": "span", "value": sweep.span},
        ]
        if sweep.n_star is None:
            failed.append("lemma")
    obj["output"].emit(rows)
    if failed:
        raise TargetMissed(f"checks failed: {', '.join(failed)}")


# ------------------------------------------------------------------------------------ #
#                                        tables                                        #
# ------------------------------------------------------------------------------------ #


@cli.command()
@click.option("--compute", is_flag=True, help="Search alpha exactly for n <= 10.")
@click.pass_obj
def table1(obj, compute):
    """Generalized Johnson graphs: alpha, Frankl-Wilson, theta, theta' and SDP bounds."""
    rows = tables.run_table1(compute=compute, alpha_options=obj["alpha"], registry=obj["registry"])
    obj["output"].emit(rows)
    tables.require_targets(rows, "table 1")


@cli.command()
@click.option("--rows", "only", default=None, help="Dimensions to run, e.g. 4,7,12.")
@click.option("--workers", type=int, default=None, help="Worker processes (config tables.workers).")
@click.pass_obj
def table2(obj, only, workers):
    """Certified bounds for n = 4..24, one subgraph constraint each."""
    rows = tables.run_table2(
        only=_int_list(only) or None, workers=workers, alpha_options=obj["alpha"], registry=obj["registry"]
    )
    obj["output"].emit(rows)
    tables.require_targets(rows, "table 2")


@cli.command()
@click.option("--rows", "only", default=None, help="Dimensions to run, e.g. 4,7,12.")
@click.option("--workers", type=int, default=None)
@click.pass_obj
def table3(obj, only, workers):
    """Lower bounds for the measurable chromatic number from table 2."""
    rows = tables.run_table3(
        only=_int_list(only) or None, workers=workers, alpha_options=obj["alpha"], registry=obj["registry"]
    )
    obj["output"].emit(rows)
    tables.require_targets(rows, "table 3")


@cli.command("plot-data")
@click.argument("which", type=click.Choice(list(tables.PLOTS)))
@click.option("--n", type=int, default=4, show_default=True, help="Dimension for the omega plot.")
@click.option("--points", type=int, default=2001, show_default=True)
@click.pass_obj
def plot_data(obj, which, n, points):
    """Two-column samples of the kernel, c(r) or the Frankl-Wilson rate."""
    obj["output"].emit(tables.run_plot_data(which, n=n, points=points))


# ------------------------------------------------------------------------------------ #
#                                      entry point                                     #
# ------------------------------------------------------------------------------------ #


def main(args=None) -> int:
    """Run the CLI and map errors onto the exit code contract."""
    load_dotenv()
    reload_env()
    try:
        cli.main(args=args, prog_name="unitdist", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except InvalidUsage as e:
        log.error(e.message)
        click.echo(render_rows([e.to_dict()], "text"), err=True)
        return e.exit_code
    return 0
