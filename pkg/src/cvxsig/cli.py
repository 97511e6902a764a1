"""Command-line interface.

Every command is deterministic given its inputs and ``--seed`` (default
from ``$CVXSIG_SEED``, else 0), writes its files only after all computation
has finished, and records a ``manifest.json`` next to its outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .aenmf import aenmf_fit
from .cnmf import cnmf_fit
from .core import FitConfig, Method, NonNegScheme
from .io import (FEATURES_BY_SAMPLES, SAMPLES_BY_FEATURES, align_rows, format_number,
                 load_catalog, load_cosmic, load_signatures, read_table, sha256_file,
                 write_catalog, write_table)
from .metrics import exposure_distance, match_signatures, pam_consensus
from .nmf import nmf_fit
from .select import BootstrapErrors, bootstrap_test_errors, choose_all
from .sim import SimSpec, paper_example_spec, simulate_poisson

FITTERS = {"nmf": nmf_fit, "cnmf": cnmf_fit, "aenmf": aenmf_fit}
SEED_ENV = "CVXSIG_SEED"


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _manifest(command: str, config: dict, seed: int, inputs, fits, outputs) -> dict:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "version": __version__,
        "fits": fits,
        "outputs": sorted(outputs),
    }


def _fit_summary(model, k: int) -> dict:
    return {"method": model.method.value, "k": k, "final_loss": float(model.final_loss),
            "iterations": int(model.iters_run), "converged": bool(model.converged)}


def normalize_signatures(h, w):
    """L1-normalize signature columns and fold the scale into the exposures."""
    scale = h.sum(axis=0)
    scale[scale == 0] = 1.0
    return h / scale, w * scale[:, None]


def _fit_config(args, k: int, seed: int) -> FitConfig:
    return FitConfig(k=k, max_iters=args.max_iters, rel_tol=args.rel_tol, seed=seed,
                     learning_rate=args.lr, nonneg_scheme=NonNegScheme(args.scheme))


def cmd_simulate(args) -> None:
    if args.paper_example:
        spec = paper_example_spec(args.seed)
        config = {"paper_example": True}
        inputs = []
    else:
        spec_path = Path(args.spec)
        if not spec_path.exists():
            raise CliError(f"spec file not found: {spec_path}")
        raw = json.loads(spec_path.read_text())
        w = np.asarray(raw["exposures"], dtype=np.float64)
        labels = raw.get("feature_labels")
        if "cosmic" in raw:
            cosmic_path = spec_path.parent / raw["cosmic"]
            cosmic = load_cosmic(cosmic_path)
            h = cosmic.select(raw["signatures"])
            labels = list(cosmic.feature_labels)
            inputs = [spec_path, cosmic_path]
        else:
            h = np.asarray(raw["signatures"], dtype=np.float64)
            inputs = [spec_path]
        h = h / h.sum(axis=0)
        spec = SimSpec(h, w, args.seed, labels)
        config = {"spec": str(spec_path)}
    catalog = simulate_poisson(spec)
    out = Path(args.out)
    write_catalog(catalog, out)
    _write_json(out.with_name(out.stem + ".manifest.json"),
                _manifest("simulate", config, args.seed, inputs, [], [out.name]))


def cmd_fit(args) -> None:
    catalog = load_catalog(args.input, args.orientation)
    m, n = catalog.shape
    if not 1 <= args.k <= min(m, n):
        raise CliError(f"--k {args.k} out of range 1..{min(m, n)}")
    config = _fit_config(args, args.k, args.seed)
    model = FITTERS[args.method](catalog.matrix, config)
    h, w = (model.h, model.w) if args.raw else normalize_signatures(model.h, model.w)
    names = [f"S{i + 1}" for i in range(args.k)]

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(out / "signatures.tsv", "Type", names, catalog.feature_labels, h)
    write_table(out / "exposures.tsv", "Signature", catalog.sample_ids, names, w)
    with open(out / "loss_trace.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["iteration", "loss"])
        for i, loss in enumerate(model.loss_trace):
            wr.writerow([i, repr(float(loss))])
    cfg = {k: (v.value if hasattr(v, "value") else v) for k, v in asdict(config).items()}
    cfg.update(method=args.method, orientation=args.orientation, raw=args.raw)
    _write_json(out / "manifest.json", _manifest(
        "fit", cfg, args.seed, [args.input], [_fit_summary(model, args.k)],
        ["signatures.tsv", "exposures.tsv", "loss_trace.csv"]))


def cmd_select_k(args) -> None:
    catalog = load_catalog(args.input, args.orientation)
    if args.k_max < 2 or args.k_max > min(catalog.shape):
        raise CliError(f"--k-max {args.k_max} out of range 2..{min(catalog.shape)}")
    template = _fit_config(args, 2, args.seed)
    boot = bootstrap_test_errors(catalog, args.k_max, args.nsims, template, args.seed,
                                 threads=args.threads)
    chosen = choose_all(boot, args.p_val)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    boot.to_csv(out / "boot_errors.csv")
    _write_json(out / "chosen_k.json", {**chosen, "p_val": args.p_val})
    cfg = {k: (v.value if hasattr(v, "value") else v) for k, v in asdict(template).items()}
    del cfg["k"]
    cfg.update(k_max=args.k_max, nsims=args.nsims, p_val=args.p_val, orientation=args.orientation)
    _write_json(out / "manifest.json", _manifest(
        "select-k", cfg, args.seed, [args.input], [], ["boot_errors.csv", "chosen_k.json"]))


def _load_run(run_dir: Path):
    sig = run_dir / "signatures.tsv"
    if not sig.exists():
        raise CliError(f"no signatures.tsv in {run_dir}")
    labels, names, h = load_signatures(sig)
    w = None
    expo = run_dir / "exposures.tsv"
    if expo.exists():
        w = read_table(expo)[3]
    return labels, names, h, w


def cmd_compare(args) -> None:
    runs = [Path(r) for r in args.runs]
    if len(runs) < 2:
        raise CliError("compare needs at least two run directories")
    loaded = [_load_run(r) for r in runs]
    rows = []
    for (ia, a), (ib, b) in combinations(enumerate(loaded), 2):
        ha = a[2]
        hb = align_rows(b[0], b[2], a[0])
        flip = ha.shape[1] > hb.shape[1]
        match = match_signatures(hb, ha) if flip else match_signatures(ha, hb)
        dist = ""
        if a[3] is not None and b[3] is not None and not flip and a[3].shape == b[3].shape:
            dist = format_number(exposure_distance(a[3], b[3], match))
        rows.append([str(runs[ia]), str(runs[ib]), ha.shape[1], hb.shape[1],
                     repr(match.acs), dist])
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["run_a", "run_b", "k_a", "k_b", "acs", "exposure_distance"])
        wr.writerows(rows)
    if len(rows) > 0:
        mean = float(np.mean([float(r[4]) for r in rows]))
        print(f"{len(rows)} comparisons, mean ACS {mean:.4f}")


def cmd_consensus(args) -> None:
    runs = [Path(r) for r in args.runs]
    loaded = [_load_run(r) for r in runs]
    ref_labels = loaded[0][0]
    sigs, origin = [], []
    for run, (labels, names, h, _) in zip(runs, loaded):
        h = align_rows(labels, h, ref_labels)
        for j, name in enumerate(names):
            col = h[:, j]
            sigs.append(col / col.sum())
            origin.append((str(run), name))
    if not 1 <= args.k <= len(sigs):
        raise CliError(f"--k {args.k} out of range 1..{len(sigs)}")
    medoids, labels = pam_consensus(sigs, args.k, args.seed)
    out = Path(args.out)
    names = [f"C{i + 1}" for i in range(args.k)]
    write_table(out, "Type", names, ref_labels, np.column_stack([sigs[i] for i in medoids]))
    with open(out.with_name(out.stem + "_assignments.csv"), "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["run", "signature", "cluster", "is_medoid"])
        for idx, ((run, name), lab) in enumerate(zip(origin, labels)):
            wr.writerow([run, name, names[lab], int(idx in set(medoids.tolist()))])


def cmd_cosmic_match(args) -> None:
    labels, names, h = load_signatures(args.signatures)
    cosmic = load_cosmic(args.cosmic)
    h = align_rows(labels, h, cosmic.feature_labels)
    if h.shape[1] > cosmic.signatures.shape[1]:
        raise CliError("more input signatures than reference signatures")
    match = match_signatures(h, cosmic.signatures)
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["signature", "cosmic_signature", "cosine"])
        for (i, j), c in zip(match.pairs, match.per_pair_cosine):
            wr.writerow([names[i], cosmic.names[j], repr(c)])
        wr.writerow(["ACS", "", repr(match.acs)])
    for (i, j), c in zip(match.pairs, match.per_pair_cosine):
        print(f"{names[i]}\t{cosmic.names[j]}\t{c:.4f}")


def _add_fit_options(p) -> None:
    p.add_argument("--max-iters", type=int, default=500_000)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--lr", type=float, default=1e-4, help="Adam learning rate (aenmf)")
    p.add_argument("--scheme", choices=[s.value for s in NonNegScheme], default="FP_ABS",
                   help="non-negativity scheme (aenmf)")
    p.add_argument("--orientation", choices=[FEATURES_BY_SAMPLES, SAMPLES_BY_FEATURES],
                   default=FEATURES_BY_SAMPLES)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvxsig", description="NMF, convex NMF and AE-NMF signature extraction")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    seed = dict(type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")

    p = sub.add_parser("simulate", help="simulate a Poisson catalog")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="JSON simulation spec")
    src.add_argument("--paper-example", action="store_true", help="two-signature 6x30 example")
    p.add_argument("--seed", **seed)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="extract signatures with one method")
    p.add_argument("--method", choices=sorted(FITTERS), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", **seed)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--raw", action="store_true", help="write unnormalized factors")
    _add_fit_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select-k", help="bootstrap selection of the number of signatures")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--nsims", type=int, default=10)
    p.add_argument("--seed", **seed)
    p.add_argument("--p-val", type=float, default=0.05)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    _add_fit_options(p)
    p.set_defaults(func=cmd_select_k)

    p = sub.add_parser("compare", help="pairwise ACS and exposure distance between runs")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", default="comparison.csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("consensus", help="PAM consensus signatures across runs")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", **seed)
    p.add_argument("--out", default="consensus_signatures.tsv")
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("cosmic-match", help="match signatures to a COSMIC reference")
    p.add_argument("--signatures", required=True)
    p.add_argument("--cosmic", required=True)
    p.add_argument("--out", default="cosmic_match.csv")
    p.set_defaults(func=cmd_cosmic_match)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "threads", 1) < 1:
            raise CliError("--threads must be >= 1")
        args.func(args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"cvxsig: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
