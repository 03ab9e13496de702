"""Command-line surface.

Subcommands: gen, eig, check, solve, perturb, certify, probe.  Exit codes:
0 success, 1 solver failure (no convergence, boundary contact, coinciding
pair, lost positivity), 2 invalid inputs.  Errors go to stderr as one JSON
object so driving scripts can dispatch on them.  Randomized components read
their default seed from GRAPHPASS_SEED; --seed overrides.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .certify import certify
from .errors import GraphpassError, SolverFailure
from .fileio import (
    read_solution_csv,
    sha256_of_file,
    write_ray_csv,
    write_rim_csv,
    write_solution_csv,
)
from .graph import generate_graph, load_graph, save_graph
from .model import PerturbationSource, ProblemSpec, check_hypotheses
from .solvers import SolverConfig, mountain_pass_solve, solve_perturbed_pair
from .spectral import lambda1
from .variational import ray_scan, rim_probe


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphpass",
        description="Positive solutions of -Laplace(u) + h u = f(x,u) [+ eps g] "
                    "on finite weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph family instance")
    p.add_argument("--family", required=True,
                   choices=["path", "cycle", "lattice_ball", "tree"])
    p.add_argument("--n", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--branching", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--w", type=float, default=1.0, help="edge weight constant")
    p.add_argument("--mu", type=float, default=1.0, help="vertex measure constant")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eig", help="smallest eigenvalue of the energy form")
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--eig-out", help="write the eigenfunction as CSV")

    p = sub.add_parser("check", help="run the hypothesis checkers")
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--mode", choices=["H2", "H2prime"], default="H2")
    p.add_argument("--x0", help="base vertex for distance shells")
    p.add_argument("--infinite-family", action="store_true",
                   help="treat the graph as a truncation of an infinite family")
    p.add_argument("--s-max", type=float, default=1.0)

    for name in ("solve", "perturb"):
        p = sub.add_parser(
            name,
            help="mountain-pass solve" if name == "solve"
            else "two-solution perturbation pipeline",
        )
        p.add_argument("--graph", required=True)
        p.add_argument("--problem", required=True)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--gtol", type=float, default=1e-5)
        p.add_argument("--path-nodes", type=int, default=21)
        p.add_argument("--max-iter", type=int, default=10000)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", required=True, help="output file prefix")
        if name == "perturb":
            p.add_argument("--eps", type=float,
                           help="override eps from the problem file")

    p = sub.add_parser("certify", help="certify a solution CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--out")

    p = sub.add_parser("probe", help="ray or rim geometry probe")
    p.add_argument("--kind", choices=["ray", "rim"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--n-points", type=int, default=201)
    p.add_argument("--direction-vertex", help="ray direction (default: base vertex)")
    p.add_argument("--radius", type=float)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--perturbed", action="store_true",
                   help="probe J_eps using the problem's perturbation")
    p.add_argument("--out", required=True)
    return parser


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("GRAPHPASS_SEED")
    return int(env) if env else 42


def _load_problem(path) -> ProblemSpec:
    with open(path) as fh:
        return ProblemSpec.from_dict(json.load(fh))


def _provenance(args, cfg: SolverConfig | None = None) -> dict:
    prov = {
        "package": f"graphpass {__version__}",
        "graph_sha256": sha256_of_file(args.graph),
        "problem_sha256": sha256_of_file(args.problem),
    }
    if cfg is not None:
        prov["config"] = asdict(cfg)
    return prov


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


def _cmd_gen(args) -> int:
    G = generate_graph(
        args.family, n=args.n, dim=args.dim, radius=args.radius,
        branching=args.branching, depth=args.depth,
        weight=args.w, measure=args.mu,
    )
    save_graph(G, args.out)
    print(_dump({"vertices": G.n_vertices, "edges": G.n_edges, "out": args.out}))
    return 0


def _cmd_eig(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    result = lambda1(G, problem.potential.on_graph(G),
                     tol=args.tol, max_iter=args.max_iter)
    if args.eig_out:
        write_solution_csv(args.eig_out, G, result.eigenfunction)
    print(_dump({
        "lambda1": result.lambda1,
        "residual": result.residual,
        "iterations": result.iterations,
    }))
    return 0


def _cmd_check(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    lam = lambda1(G, problem.potential.on_graph(G)).lambda1
    report = check_hypotheses(
        G, problem.potential, problem.nonlinearity, args.mode,
        lambda1=lam, x0=args.x0, infinite_family=args.infinite_family,
        s_max=args.s_max,
    )
    print(_dump(report.to_dict()))
    return 0


def _cmd_solve(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    cfg = SolverConfig(tol=args.tol, gtol=args.gtol, path_nodes=args.path_nodes,
                       max_iter=args.max_iter, seed=_seed(args))
    outcome = mountain_pass_solve(G, problem.potential, problem.nonlinearity,
                                  None, cfg)
    cert = certify(G, problem.potential, problem.nonlinearity, outcome.solution,
                   provenance=_provenance(args, cfg))
    write_solution_csv(f"{args.out}.solution.csv", G, outcome.solution)
    with open(f"{args.out}.certificate.json", "w") as fh:
        fh.write(_dump(cert.to_dict()) + "\n")
    print(_dump({
        "classification": outcome.classification,
        "energy": outcome.energy,
        "residual_inf": outcome.residual_inf,
        "min_value": outcome.min_value,
        "iterations": outcome.iterations,
        "out": [f"{args.out}.solution.csv", f"{args.out}.certificate.json"],
    }))
    return 0


def _cmd_perturb(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    if problem.perturbation is None:
        raise GraphpassError("perturb needs a 'perturbation' block in the problem file")
    eps = args.eps if args.eps is not None else problem.perturbation.eps
    cfg = SolverConfig(tol=args.tol, gtol=args.gtol, path_nodes=args.path_nodes,
                       max_iter=args.max_iter, seed=_seed(args))
    out_min, out_mp = solve_perturbed_pair(
        G, problem.potential, problem.nonlinearity, problem.perturbation.g,
        eps, cfg,
    )
    pert = PerturbationSource(problem.perturbation.g, eps)
    prov = _provenance(args, cfg)
    cert0 = certify(G, problem.potential, problem.nonlinearity,
                    out_min.solution, pert, provenance=prov)
    certM = certify(G, problem.potential, problem.nonlinearity,
                    out_mp.solution, pert, provenance=prov)
    write_solution_csv(f"{args.out}.u0.solution.csv", G, out_min.solution)
    write_solution_csv(f"{args.out}.uM.solution.csv", G, out_mp.solution)
    gap = float(np.max(np.abs(out_mp.solution - out_min.solution)))
    with open(f"{args.out}.certificate.json", "w") as fh:
        fh.write(_dump({
            "eps": eps,
            "u0": cert0.to_dict(),
            "uM": certM.to_dict(),
            "pair": {
                "distinct_inf": gap,
                "energies": [out_min.energy, out_mp.energy],
            },
        }) + "\n")
    print(_dump({
        "eps": eps,
        "energies": [out_min.energy, out_mp.energy],
        "distinct_inf": gap,
        "out": [f"{args.out}.u0.solution.csv", f"{args.out}.uM.solution.csv",
                f"{args.out}.certificate.json"],
    }))
    return 0


def _cmd_certify(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    u = read_solution_csv(args.solution, G)
    prov = _provenance(args)
    prov["solution_sha256"] = sha256_of_file(args.solution)
    cert = certify(G, problem.potential, problem.nonlinearity, u,
                   problem.perturbation, provenance=prov)
    text = _dump(cert.to_dict())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_probe(args) -> int:
    G = load_graph(args.graph)
    problem = _load_problem(args.problem)
    hv = problem.potential.on_graph(G)
    pert = problem.perturbation if args.perturbed else None
    if args.kind == "ray":
        base = args.direction_vertex or problem.potential.base_vertex() \
            or G.vertex_ids[0]
        if base not in G.index:
            raise GraphpassError(f"direction vertex {base!r} not in graph")
        direction = [0.0] * G.n_vertices
        direction[G.index[base]] = 1.0
        probe = ray_scan(G, hv, problem.nonlinearity, direction,
                         args.t_max, args.n_points, pert)
        write_ray_csv(args.out, probe)
        print(_dump({"diverging": probe.diverging, "out": args.out}))
    else:
        if args.radius is None:
            raise GraphpassError("rim probe needs --radius")
        probe = rim_probe(G, hv, problem.nonlinearity, args.radius,
                          args.n_samples, _seed(args), pert)
        write_rim_csv(args.out, probe)
        print(_dump({
            "min_energy": probe.min_energy,
            "delta": probe.delta,
            "tau": probe.tau,
            "rho": probe.rho,
            "out": args.out,
        }))
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "eig": _cmd_eig,
    "check": _cmd_check,
    "solve": _cmd_solve,
    "perturb": _cmd_perturb,
    "certify": _cmd_certify,
    "probe": _cmd_probe,
}


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed its message; fold its exit into our codes
        return 0 if exc.code in (0, None) else 2
    try:
        return _COMMANDS[args.command](args)
    except SolverFailure as exc:
        _emit_error(exc)
        return 1
    except GraphpassError as exc:
        _emit_error(exc)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _emit_error(exc)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
