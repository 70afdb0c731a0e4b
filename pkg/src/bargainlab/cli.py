"""Command-line entry point wiring presets, solver, optimizer, simulator, and
the analysis pipeline into reproducible file-producing runs.

Exit status: 0 success, 1 configuration error, 2 acceptance-criterion failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from . import acceptance
from . import beliefs as bl
from . import empirics as emp
from .game import (
    GameSpec,
    game_spec_to_config,
    load_game_config,
    write_match_logs,
    read_match_logs,
)
from .presets import REFERENCE_LOGIT_MODELS, REFERENCE_MRP, TREATMENTS, treatment
from .simulate import (
    BeliefOptProposer,
    EmpiricalOptProposer,
    EquilibriumProposer,
    EquilibriumVoter,
    FixedOfferProposer,
    LogitModel,
    LogitVoter,
    ThresholdVoter,
    run_batch,
)
from .solver import (
    Condition,
    ConditionNotApplicableError,
    predicted_first_share,
    predicted_share_table,
    solve,
)

OUTPUT_DIR_ENV = "BARGAINLAB_OUT"


class CliError(ValueError):
    pass


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bargainlab-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _header(digest: str) -> str:
    return f"# bargainlab {__version__} config={digest}\n"


def _write_csv(path: str, digest: str, fieldnames: list[str], rows: list[dict]) -> None:
    import csv as _csv

    buf = io.StringIO()
    buf.write(_header(digest))
    writer = _csv.DictWriter(buf, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())


def _write_json(path: str, digest: str, obj: dict) -> None:
    payload = {"meta": {"tool": "bargainlab", "version": __version__, "config": digest}}
    payload.update(obj)
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def _out_dir(args) -> str:
    out = args.out or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _resolve_spec(args) -> GameSpec:
    if getattr(args, "config", None):
        return load_game_config(args.config)
    if getattr(args, "preset", None):
        if args.preset not in TREATMENTS:
            raise CliError(
                f"unknown preset {args.preset!r}; known: {', '.join(sorted(TREATMENTS))}"
            )
        return treatment(args.preset)
    raise CliError("provide --preset or --config")


def _resolve_logit(args) -> LogitModel:
    if getattr(args, "coeffs", None):
        parts = [float(v) for v in args.coeffs.split(",")]
        if len(parts) != 4:
            raise CliError("--coeffs needs four comma-separated values")
        return LogitModel(*parts)
    name = getattr(args, "logit_preset", None)
    if not name:
        raise CliError("provide --logit-preset or --coeffs")
    if name not in REFERENCE_LOGIT_MODELS:
        raise CliError(f"unknown coefficient set {name!r}")
    return REFERENCE_LOGIT_MODELS[name]


def _resolve_mrp(args) -> float:
    if getattr(args, "mrp", None) is not None:
        return args.mrp
    name = getattr(args, "mrp_preset", None)
    if not name:
        raise CliError("provide --mrp or --mrp-preset")
    if name not in REFERENCE_MRP:
        raise CliError(f"unknown rejection-payoff row {name!r}")
    return REFERENCE_MRP[name][1]


def _resolve_belief(args) -> bl.ThresholdBelief:
    family_name = args.family
    if family_name == "independent_uniform":
        family = bl.IndependentUniform(args.tau_bar)
    elif family_name == "comonotone":
        family = bl.Comonotone(args.tau_bar)
    elif family_name == "antithetic":
        family = bl.Antithetic(args.tau_bar)
    elif family_name == "gaussian_copula":
        family = bl.GaussianCopulaUniform(args.tau_bar, rho=args.rho)
    elif family_name == "discrete":
        if not args.atoms_csv:
            raise CliError("discrete beliefs need --atoms-csv (columns tau_b, tau_c, weight)")
        family = _load_discrete(args.atoms_csv)
    else:
        raise CliError(f"unknown belief family {family_name!r}")
    belief = bl.ThresholdBelief(family, d=args.d)
    try:
        bl.validate_belief(belief)
    except bl.BeliefError as exc:
        raise CliError(str(exc)) from exc
    return belief


def _load_discrete(path: str) -> bl.DiscreteThresholds:
    import csv as _csv

    points = []
    weights = []
    with open(path, newline="") as handle:
        for row in _csv.DictReader(handle):
            points.append((float(row["tau_b"]), float(row["tau_c"])))
            weights.append(float(row["weight"]))
    return bl.DiscreteThresholds(tuple(points), tuple(weights))


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value)


# --------------------------------------------------------------------------
# Commands


def cmd_solve(args) -> int:
    spec = _resolve_spec(args)
    out = _out_dir(args)
    digest = _digest({"command": "solve", "spec": game_spec_to_config(spec)})
    solution = solve(spec)

    state_rows = []
    policy_rows = []
    class_rows = []
    for state in solution.states():
        cont = solution.continuation[state]
        state_rows.append(
            {
                "state": state.label(),
                "probability": _fraction_str(solution.state_probs[state]),
                "v_A": _fraction_str(cont[0]),
                "v_B": _fraction_str(cont[1]),
                "v_C": _fraction_str(cont[2]),
                "v_A_dec": float(cont[0]),
                "v_B_dec": float(cont[1]),
                "v_C_dec": float(cont[2]),
            }
        )
        for shares, weight in solution.policy[state]:
            policy_rows.append(
                {
                    "state": state.label(),
                    "probability": _fraction_str(weight),
                    "offer_A": float(shares[0]),
                    "offer_B": float(shares[1]),
                    "offer_C": float(shares[2]),
                }
            )
        for player, cls in sorted(solution.partner_class[state].items()):
            class_rows.append(
                {"state": state.label(), "player": "ABC"[player], "class": cls.value}
            )

    share_rows = []
    for row in predicted_share_table(solution):
        share_rows.append(
            {
                "round": row.round,
                "condition": row.condition.value if row.condition else "unconditional",
                "share_exact": _fraction_str(row.share),
                "share_decimal": float(row.share),
            }
        )
    for condition in (Condition.INCL, Condition.EXCL, Condition.UNCONDITIONAL):
        try:
            value = predicted_first_share(solution, condition)
        except ConditionNotApplicableError:
            continue
        share_rows.append(
            {
                "round": 1,
                "condition": f"first-share-{condition.value}",
                "share_exact": _fraction_str(value),
                "share_decimal": float(value),
            }
        )

    _write_csv(os.path.join(out, "continuation.csv"), digest, list(state_rows[0]), state_rows)
    _write_csv(os.path.join(out, "policy.csv"), digest, list(policy_rows[0]), policy_rows)
    _write_csv(os.path.join(out, "partner_classes.csv"), digest, list(class_rows[0]), class_rows)
    _write_csv(os.path.join(out, "predicted_shares.csv"), digest, list(share_rows[0]), share_rows)

    print(f"solved {spec.spec_id or 'custom spec'}: first share {solution.first_share} "
          f"({float(solution.first_share):.4f})")
    for row in share_rows:
        print(f"  round {row['round']} {row['condition']}: {row['share_exact']} "
              f"({row['share_decimal']:.4f})")
    return 0


def cmd_optimize(args) -> int:
    belief = _resolve_belief(args)
    out = _out_dir(args)
    digest = _digest(
        {
            "command": "optimize",
            "family": args.family,
            "tau_bar": args.tau_bar,
            "rho": args.rho,
            "d": args.d,
            "grid_step": args.grid_step,
            "refine_depth": args.refine_depth,
            "study_n": args.study_n,
        }
    )
    optimum = bl.optimize_offer(belief, step=args.grid_step, refine_depth=args.refine_depth)
    report = {
        "offer": list(optimum.offer),
        "expected_payoff": optimum.expected_payoff,
        "accept_prob": optimum.accept_prob,
        "is_mwc": optimum.is_mwc,
        "degenerate": optimum.degenerate,
        "min_gini_offer": None if optimum.min_gini_offer is None else list(optimum.min_gini_offer),
        "grid_step": optimum.grid_step,
        "refinement_iterations": optimum.refinement_iterations,
    }
    _write_json(os.path.join(out, "optimum.json"), digest, {"optimum": report})
    print(
        f"optimum offer {tuple(round(v, 4) for v in optimum.offer)} "
        f"payoff {optimum.expected_payoff:.4f} accept {optimum.accept_prob:.4f}"
        + (" [degenerate locus]" if optimum.degenerate else "")
    )
    if args.study_n:
        target = bl.ThresholdBelief(bl.IndependentUniform(args.tau_bar), d=0.0)
        sequence = [
            bl.ThresholdBelief(
                bl.GaussianCopulaUniform(args.tau_bar, rho=args.rho / n), d=args.d / n
            )
            for n in range(1, args.study_n + 1)
        ]
        study = bl.convergence_study(target, sequence, step=args.grid_step,
                                     refine_depth=args.refine_depth)
        rows = [
            {
                "n": i + 1,
                "offer_a": entry.optimum.offer[0],
                "offer_b": entry.optimum.offer[1],
                "offer_c": entry.optimum.offer[2],
                "expected_payoff": entry.optimum.expected_payoff,
                "distance_to_limit": entry.distance,
            }
            for i, entry in enumerate(study.entries)
        ]
        _write_csv(os.path.join(out, "convergence.csv"), digest, list(rows[0]), rows)
        print(f"convergence study: final distance {rows[-1]['distance_to_limit']:.5f} "
              f"(non-increasing: {study.distances_non_increasing})")
    return 0


def _build_agents(args, spec: GameSpec):
    needs_solution = (
        args.proposer in ("equilibrium", "empirical") or args.voter in ("equilibrium", "logit")
    )
    solution = solve(spec) if needs_solution else None

    if args.proposer == "equilibrium":
        proposer = EquilibriumProposer(solution)
    elif args.proposer == "beliefopt":
        proposer = BeliefOptProposer(_resolve_belief(args), step=args.grid_step)
    elif args.proposer == "fixed":
        if not args.fixed_offer:
            raise CliError("--proposer fixed needs --fixed-offer a,b,c")
        proposer = FixedOfferProposer([float(v) for v in args.fixed_offer.split(",")])
    elif args.proposer == "empirical":
        surface = emp.payoff_surface(_resolve_logit(args), _resolve_mrp(args),
                                     step=args.grid_step)
        proposer = EmpiricalOptProposer(surface, solution)
    else:
        raise CliError(f"unknown proposer kind {args.proposer!r}")

    if args.voter == "equilibrium":
        voter = EquilibriumVoter(solution)
    elif args.voter == "threshold":
        voter = ThresholdVoter(_resolve_belief(args))
    elif args.voter == "logit":
        voter = LogitVoter(_resolve_logit(args), solution)
    else:
        raise CliError(f"unknown voter kind {args.voter!r}")
    return [proposer] * 3, [voter] * 3


def cmd_simulate(args) -> int:
    spec = _resolve_spec(args)
    if args.seed is None:
        raise CliError("simulate requires --seed")
    out = _out_dir(args)
    digest = _digest(
        {
            "command": "simulate",
            "spec": game_spec_to_config(spec),
            "proposer": args.proposer,
            "voter": args.voter,
            "fixed_offer": args.fixed_offer,
            "logit_preset": args.logit_preset,
            "n": args.n,
            "seed": args.seed,
        }
    )
    proposers, voters = _build_agents(args, spec)
    logs, summary = run_batch(spec, proposers, voters, args.n, args.seed)
    log_path = os.path.join(out, "matchlogs.jsonl")
    write_match_logs(log_path, logs)
    _write_json(os.path.join(out, "summary.json"), digest, {"summary": summary.to_obj()})
    print(
        f"simulated {summary.n_matches} matches of {spec.spec_id or 'custom spec'}: "
        f"first-round rejection rate {summary.first_round_rejection_rate:.4f}, "
        f"mean first-proposer payoff {summary.mean_first_proposer_payoff:.4f}"
    )
    print(f"wrote {log_path}")
    return 0


def cmd_analyze(args) -> int:
    spec = _resolve_spec(args)
    if not os.path.exists(args.logs):
        raise CliError(f"log file not found: {args.logs}")
    logs = read_match_logs(args.logs)
    if not logs:
        raise CliError(f"log file {args.logs} holds no matches")
    out = _out_dir(args)
    digest = _digest(
        {
            "command": "analyze",
            "spec": game_spec_to_config(spec),
            "logs": os.path.abspath(args.logs),
            "experienced": args.experienced,
            "measure": args.measure,
            "grid_step": args.grid_step,
        }
    )
    solution = solve(spec)
    logs = emp.experienced_filter(logs, enabled=args.experienced)

    summary = emp.summary_tables(logs, spec, solution)
    coalition_rows = [
        {"coalition": label, "percent": pct} for label, pct in summary.coalition_freq.items()
    ]
    _write_csv(
        os.path.join(out, "coalition_types.csv"),
        digest,
        ["coalition", "percent"],
        coalition_rows,
    )
    gini_rows = [{"gini": g} for g in sorted(summary.gini_samples)]
    _write_csv(os.path.join(out, "gini_samples.csv"), digest, ["gini"], gini_rows)

    mrp = emp.mean_rejection_payoff(logs)
    _write_csv(
        os.path.join(out, "mrp.csv"),
        digest,
        ["rejection_rate", "mean_rejection_payoff", "n_rejected", "n_matches"],
        [
            {
                "rejection_rate": mrp.rejection_rate,
                "mean_rejection_payoff": "" if mrp.mrp is None else mrp.mrp,
                "n_rejected": mrp.n_rejected,
                "n_matches": mrp.n_matches,
            }
        ],
    )

    records = emp.vote_records_from_logs(logs, spec, solution)
    logit_rows = []
    fitted_model = None
    try:
        fit = emp.fit_logit(records)
        fitted_model = fit.model
        for name, coef, se in zip(
            ("constant", "strong_partner", "own_share", "gini"),
            fit.model.coefficients(),
            fit.std_errors,
        ):
            logit_rows.append(
                {
                    "coefficient": name,
                    "estimate": coef,
                    "std_error": se,
                    "unidentified": name in fit.unidentified,
                }
            )
        logit_rows.append(
            {
                "coefficient": "pseudo_r2",
                "estimate": fit.pseudo_r2,
                "std_error": "",
                "unidentified": "",
            }
        )
    except (emp.SeparationError, emp.CollinearError, emp.EmptySampleError) as exc:
        logit_rows.append(
            {"coefficient": "error", "estimate": str(exc), "std_error": "", "unidentified": ""}
        )
    _write_csv(
        os.path.join(out, "logit_fit.csv"),
        digest,
        ["coefficient", "estimate", "std_error", "unidentified"],
        logit_rows,
    )

    surface_model = None
    surface_mrp = None
    if args.logit_preset or args.coeffs:
        surface_model = _resolve_logit(args)
        surface_mrp = _resolve_mrp(args) if (args.mrp is not None or args.mrp_preset) else mrp.mrp
    elif fitted_model is not None and mrp.mrp is not None:
        surface_model = fitted_model
        surface_mrp = mrp.mrp
    rate_rows = []
    if surface_model is not None and surface_mrp is not None:
        from .solver import PartnerClass

        has_weak = any(
            cls is PartnerClass.WEAK
            for state in solution.states(1)
            for cls in solution.partner_class[state].values()
        )
        surface = emp.payoff_surface(
            surface_model, surface_mrp, strong_flags=(0, 1) if has_weak else (0, 0),
            step=args.grid_step,
        )
        rates = emp.optimization_rates(logs, surface, spec, solution, measure=args.measure)
        for row in rates.rows:
            rate_rows.append(
                {
                    "coalition": row.label,
                    "count": row.count,
                    "frequency": row.frequency,
                    "rate_percent": row.rate,
                }
            )
        rate_rows.append(
            {
                "coalition": "aggregate",
                "count": len(logs),
                "frequency": 1.0,
                "rate_percent": rates.aggregate,
            }
        )
    _write_csv(
        os.path.join(out, "optimization_rates.csv"),
        digest,
        ["coalition", "count", "frequency", "rate_percent"],
        rate_rows,
    )

    _write_json(
        os.path.join(out, "analysis.json"),
        digest,
        {
            "n_matches": summary.n_matches,
            "mean_accepted_first_share": summary.mean_accepted_first_share,
            "coalition_freq": summary.coalition_freq,
            "egalitarian_split": summary.egalitarian_split,
            "mwc_weak_egalitarian_pct": summary.mwc_weak_egalitarian_pct,
            "mwc_weak_mean_proposer_share": summary.mwc_weak_mean_proposer_share,
            "rejection_rate": mrp.rejection_rate,
            "mean_rejection_payoff": mrp.mrp,
        },
    )
    print(f"analyzed {summary.n_matches} matches; wrote tables to {out}")
    return 0


def cmd_surface(args) -> int:
    model = _resolve_logit(args)
    mrp = _resolve_mrp(args)
    out = _out_dir(args)
    flags = tuple(int(v) for v in args.strong_flags.split(","))
    if len(flags) != 2 or any(f not in (0, 1) for f in flags):
        raise CliError("--strong-flags needs two 0/1 values, e.g. 0,1")
    digest = _digest(
        {
            "command": "surface",
            "coeffs": model.coefficients(),
            "mrp": mrp,
            "strong_flags": flags,
            "grid_step": args.grid_step,
        }
    )
    surface = emp.payoff_surface(model, mrp, strong_flags=flags, step=args.grid_step)
    rows = [
        {
            "s_A": float(surface.s_a[i]),
            "s_weak": float(surface.s_weak[i]),
            "s_strong": float(surface.s_strong[i]),
            "pass_prob": float(surface.pass_prob[i]),
            "expected_payoff": float(surface.expected[i]),
        }
        for i in range(surface.s_a.size)
    ]
    _write_csv(
        os.path.join(out, "surface.csv"),
        digest,
        ["s_A", "s_weak", "s_strong", "pass_prob", "expected_payoff"],
        rows,
    )
    opt = surface.optimum
    _write_json(
        os.path.join(out, "surface_optimum.json"),
        digest,
        {
            "optimum": {
                "offer": list(opt.offer),
                "expected_payoff": opt.expected_payoff,
                "pass_prob": opt.accept_prob,
                "is_mwc": opt.is_mwc,
            }
        },
    )
    print(
        f"surface optimum: proposer {opt.offer[0]:.3f}, weak {opt.offer[1]:.3f}, "
        f"strong {opt.offer[2]:.3f}; expected payoff {opt.expected_payoff:.4f}"
    )
    return 0


def cmd_reproduce(args) -> int:
    results = acceptance.run_all(echo=True)
    if args.out:
        out = _out_dir(args)
        digest = _digest({"command": "reproduce"})
        rows = [
            {
                "criterion": r.name,
                "passed": r.passed,
                "elapsed_seconds": round(r.elapsed, 3),
                "detail": r.detail,
            }
            for r in results
        ]
        _write_csv(
            os.path.join(out, "reproduce_report.csv"),
            digest,
            ["criterion", "passed", "elapsed_seconds", "detail"],
            rows,
        )
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} criterion(s) failed")
        return 2
    print(f"all {len(results)} criteria passed")
    return 0


# --------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # config errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _add_common_spec_args(parser):
    parser.add_argument("--preset", help="named treatment preset")
    parser.add_argument("--config", help="treatment config file (JSON)")
    parser.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")


def _add_belief_args(parser):
    parser.add_argument("--family", default="independent_uniform",
                        choices=["independent_uniform", "comonotone", "antithetic",
                                 "gaussian_copula", "discrete"])
    parser.add_argument("--tau-bar", type=float, default=1.0, dest="tau_bar")
    parser.add_argument("--rho", type=float, default=0.0)
    parser.add_argument("--d", type=float, default=0.0)
    parser.add_argument("--atoms-csv", dest="atoms_csv",
                        help="CSV of discrete atoms (tau_b, tau_c, weight)")


def _add_logit_args(parser):
    parser.add_argument("--logit-preset", dest="logit_preset",
                        help="named coefficient set, e.g. caltech-1perfect or col3")
    parser.add_argument("--coeffs", help="constant,strong,own_share,gini")
    parser.add_argument("--mrp", type=float, help="mean rejection payoff (fraction of prize)")
    parser.add_argument("--mrp-preset", dest="mrp_preset",
                        help="named rejection-payoff row, e.g. caltech-3perfect-excl")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bargainlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a treatment and export the equilibrium")
    _add_common_spec_args(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_opt = sub.add_parser("optimize", help="optimal offer under a threshold belief")
    p_opt.add_argument("--out")
    _add_belief_args(p_opt)
    p_opt.add_argument("--grid-step", type=float, default=0.005, dest="grid_step")
    p_opt.add_argument("--refine-depth", type=int, default=3, dest="refine_depth")
    p_opt.add_argument("--study-n", type=int, default=0, dest="study_n",
                       help="also run an n-element convergence study (rho/n, d/n)")
    p_opt.set_defaults(func=cmd_optimize)

    p_sim = sub.add_parser("simulate", help="run seeded matches and write logs")
    _add_common_spec_args(p_sim)
    p_sim.add_argument("--proposer", default="equilibrium",
                       choices=["equilibrium", "beliefopt", "fixed", "empirical"])
    p_sim.add_argument("--voter", default="equilibrium",
                       choices=["equilibrium", "threshold", "logit"])
    p_sim.add_argument("--fixed-offer", dest="fixed_offer",
                       help="self,other1,other2 shares for --proposer fixed")
    _add_belief_args(p_sim)
    _add_logit_args(p_sim)
    p_sim.add_argument("--grid-step", type=float, default=0.005, dest="grid_step")
    p_sim.add_argument("--n", type=int, default=100)
    p_sim.add_argument("--seed", type=int)
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="run the analysis pipeline over match logs")
    _add_common_spec_args(p_an)
    p_an.add_argument("--logs", required=True, help="match-log JSONL file")
    _add_logit_args(p_an)
    p_an.add_argument("--grid-step", type=float, default=0.005, dest="grid_step")
    p_an.add_argument("--measure", choices=["one", "two"], default="one")
    exp = p_an.add_mutually_exclusive_group()
    exp.add_argument("--experienced", dest="experienced", action="store_true", default=True,
                     help="keep only the second half of matches (default)")
    exp.add_argument("--all-matches", dest="experienced", action="store_false")
    p_an.set_defaults(func=cmd_analyze)

    p_surf = sub.add_parser("surface", help="expected-payoff surface for an acceptance model")
    p_surf.add_argument("--out")
    _add_logit_args(p_surf)
    p_surf.add_argument("--grid-step", type=float, default=0.005, dest="grid_step")
    p_surf.add_argument("--strong-flags", dest="strong_flags", default="0,1")
    p_surf.set_defaults(func=cmd_surface)

    p_rep = sub.add_parser("reproduce", help="run the acceptance checklist")
    p_rep.add_argument("--out")
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
