"""Experiment runner: one subcommand per experiment kind.

Every run writes a CSV with the experiment data plus a JSON metadata sidecar
holding the fully resolved parameters, so the run can be repeated
bit-identically from the sidecar alone. Invalid configurations exit nonzero
with a machine-readable error object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, model
from .entangler import default_schedule, entangler_chain, run_protocol
from .hamiltonian import build_sector
from .hilbert import StateVector
from .montecarlo import InitialState, detector_signal, run_ensemble
from .propagate import EvolutionPlan, evolve


def _chain_from_args(args, n_required=True):
    """Resolve ChainParams + DisorderSpec from --config and/or flags."""
    if getattr(args, "config", None):
        params, disorder = model.load_chain(args.config)
    else:
        if n_required and args.n is None:
            raise ValueError("either --config or --n is required")
        doc = {
            "n": args.n,
            "eps0": args.eps0,
            "t0": args.t0,
            "coupling_profile": args.profile,
            "v": getattr(args, "v", 0.0),
            "u": getattr(args, "u", None),
            "gamma": getattr(args, "gamma", 0.0),
        }
        if getattr(args, "delta_eps", 0.0) or getattr(args, "delta_t", 0.0):
            seed = getattr(args, "seed", None)
            doc["disorder"] = {
                "delta_eps": args.delta_eps,
                "delta_t": args.delta_t,
                "seed": 1 if seed is None else seed,
            }
        params, disorder = model.chain_from_dict(doc)
    return params, disorder


def _write_metadata(path, kind, params, extra):
    meta = {
        "kind": kind,
        "version": __version__,
        "chain": {
            "n": params.n,
            "eps": list(params.eps),
            "couplings": list(params.couplings),
            "v": params.v,
            "u": params.u,
            "gamma": params.gamma,
        },
    }
    meta.update(extra)
    path.write_text(json.dumps(meta, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _parse_start(text, sector):
    dots = tuple(int(x) for x in text.split(","))
    return InitialState(sector, dots)


def _out_paths(args, stem):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / f"{stem}.csv", out / f"{stem}.meta.json"


def cmd_transport(args, sector):
    params, _ = _chain_from_args(args)
    initial = _parse_start(args.start, sector)
    psi0 = initial.to_state(params.n)
    ham = build_sector(params, sector, psi0.basis.spins)
    grid = np.linspace(0.0, args.tau_max, args.samples)
    samples = evolve(ham, psi0, EvolutionPlan(grid, method=args.method))
    csv_path, meta_path = _out_paths(args, f"transport-{sector}")
    samples.to_csv(csv_path)
    _write_metadata(meta_path, f"transport-{sector}", params, {
        "start": list(initial.dots),
        "tau_max": args.tau_max,
        "samples": args.samples,
        "method": args.method,
        "warnings": model.validate_regime(params, args.tau_max),
    })
    print(csv_path)
    return 0


def cmd_mc(args, sector):
    params, disorder = _chain_from_args(args)
    initial = _parse_start(args.start, sector)
    seed = args.seed
    if seed is None:
        seed = disorder.seed if disorder is not None else 1
    records = run_ensemble(
        params, disorder, initial, args.trajectories, args.tau_max, seed,
        threads=args.threads,
    )
    edges = np.linspace(0.0, args.tau_max, args.bins + 1)
    signal = detector_signal(records, edges)
    csv_path, meta_path = _out_paths(args, f"mc-{sector}")
    signal.to_csv(csv_path)
    _write_metadata(meta_path, f"mc-{sector}", params, {
        "disorder": disorder,
        "start": list(initial.dots),
        "tau_max": args.tau_max,
        "trajectories": args.trajectories,
        "bins": args.bins,
        "seed": seed,
        "threads": args.threads,
        "total_clicks": float(np.sum([len(r.jump_times) for r in records])),
    })
    print(csv_path)
    return 0


def cmd_entangle(args):
    params = entangler_chain(args.n, t0=args.t0, eps0=args.eps0, v=args.v,
                             u=args.u, gamma=args.gamma)
    disorder = None
    if args.delta_eps or args.delta_t:
        disorder = model.DisorderSpec(args.delta_eps, args.delta_t, args.seed)
    schedule = default_schedule(params, args.t_e_max, theta=args.theta, t0=args.t0)
    result = run_protocol(
        params, schedule, disorder=disorder, n_trajectories=args.trajectories,
        seed=args.seed, sample_dt=args.sample_dt, threads=args.threads,
    )
    csv_path, meta_path = _out_paths(args, "entangle")
    result.to_csv(csv_path)
    _write_metadata(meta_path, "entangle", params, {
        "disorder": disorder,
        "pulse": schedule.pulse,
        "entangler_pair": list(schedule.entangler_pair),
        "theta": args.theta,
        "trajectories": args.trajectories,
        "seed": args.seed,
        "threads": args.threads,
        "sample_dt": args.sample_dt,
        "fidelity_mean": result.fidelity_mean,
        "fidelity_mean_surviving": result.fidelity_mean_surviving,
        "n_jumped": result.n_jumped,
        "warnings": result.trap_warnings + schedule.pulse.adiabaticity_warnings(),
    })
    print(csv_path)
    print(f"fidelity (all trajectories):      {result.fidelity_mean:.6f}")
    print(f"fidelity (surviving trajectories): {result.fidelity_mean_surviving:.6f}")
    return 0


def cmd_oracle_check(args):
    n, t0 = args.n, args.t0
    grid = np.linspace(0.0, args.tau_max, args.samples)
    report = {"n": n, "t0": t0, "tau_max": args.tau_max}

    for profile, amplitude in (
        ("uniform", analytic.uniform_1e_amplitude),
        ("optimal", analytic.optimal_1e_amplitude),
    ):
        params = getattr(model.ChainParams, profile)(n, t0=t0)
        ham = build_sector(params, "1e")
        psi0 = StateVector.basis_state(ham.basis, 1)
        samples = evolve(ham, psi0, EvolutionPlan(grid))
        exact = np.column_stack([amplitude(n, t0, grid, j) for j in range(1, n + 1)])
        report[f"{profile}_1e_max_deviation"] = float(np.max(np.abs(samples.amps - exact)))

    params = model.ChainParams.optimal(n, t0=t0)
    ham = build_sector(params, "2e")
    psi0 = StateVector.basis_state(ham.basis, (1, 2))
    samples = evolve(ham, psi0, EvolutionPlan(grid))
    exact = np.column_stack([
        analytic.optimal_2e_amplitude(n, t0, grid, i, j) for (i, j) in ham.basis.pairs()
    ])
    report["optimal_2e_max_deviation"] = float(np.max(np.abs(samples.amps - exact)))

    text = json.dumps(report, indent=2)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle-check.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_spectra(args):
    spec = analytic.SpectrumSpec(args.kind, args.n, args.t0)
    values = analytic.spectrum(spec)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"spectrum-{args.kind}.csv"
        np.savetxt(path, values, delimiter=",", header="eigenvalue", comments="")
        print(path)
    print(f"{len(values)} eigenvalues")
    for v in values:
        print(f"{v:.12g}")
    return 0


def _add_chain_flags(p, with_v=False, with_gamma=True, with_disorder=False):
    p.add_argument("--config", help="JSON chain configuration file")
    p.add_argument("--n", type=int, default=None, help="dot count")
    p.add_argument("--eps0", type=float, default=0.0, help="mean on-site energy")
    p.add_argument("--t0", type=float, default=1.0, help="coupling scale")
    p.add_argument("--profile", default="uniform", choices=["uniform", "optimal"],
                   help="coupling profile")
    if with_v:
        p.add_argument("--v", type=float, default=0.0, help="nearest-neighbor repulsion")
    if with_gamma:
        p.add_argument("--gamma", type=float, default=0.0, help="detector coupling")
    if with_disorder:
        p.add_argument("--delta-eps", type=float, default=0.0, dest="delta_eps")
        p.add_argument("--delta-t", type=float, default=0.0, dest="delta_t")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qdchain",
        description="Electron transport and entanglement in a quantum-dot chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for sector in ("1e", "2e"):
        p = sub.add_parser(f"transport-{sector}",
                           help=f"deterministic {sector} transport run")
        _add_chain_flags(p, with_v=(sector == "2e"))
        p.add_argument("--start", default="1" if sector == "1e" else "1,2",
                       help="initially occupied dot(s), comma separated")
        p.add_argument("--tau-max", type=float, default=10.0, dest="tau_max")
        p.add_argument("--samples", type=int, default=501)
        p.add_argument("--method", default="spectral", choices=["spectral", "stepping"])
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=1)
        p.set_defaults(func=lambda a, s=sector: cmd_transport(a, s))

    for sector in ("1e", "2e"):
        p = sub.add_parser(f"mc-{sector}",
                           help=f"Monte Carlo detector signal, {sector} start")
        _add_chain_flags(p, with_v=(sector == "2e"), with_disorder=True)
        p.add_argument("--start", default="1" if sector == "1e" else "1,2")
        p.add_argument("--tau-max", type=float, default=100.0, dest="tau_max")
        p.add_argument("--trajectories", type=int, default=5000)
        p.add_argument("--bins", type=int, default=100)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=".")
        p.set_defaults(func=lambda a, s=sector: cmd_mc(a, s))

    p = sub.add_parser("entangle", help="three-step entangling protocol")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--eps0", type=float, default=0.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--v", type=float, default=0.0)
    p.add_argument("--u", type=float, default=100.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--t-e-max", type=float, default=6.0, dest="t_e_max")
    p.add_argument("--theta", type=float, default=np.pi / 2)
    p.add_argument("--delta-eps", type=float, default=0.0, dest="delta_eps")
    p.add_argument("--delta-t", type=float, default=0.0, dest="delta_t")
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--sample-dt", type=float, default=0.02, dest="sample_dt")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("oracle-check", help="closed form vs numerics deviation report")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--tau-max", type=float, default=30.0, dest="tau_max")
    p.add_argument("--samples", type=int, default=601)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("spectra", help="closed-form spectra")
    p.add_argument("--kind", required=True,
                   choices=["uniform-1e", "optimal-1e", "optimal-2e"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectra)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
