"""Command-line pipeline: synth -> embed -> eval-classify / eval-cluster / diagnose.

Every subcommand resolves its configuration (defaults < --config JSON file <
explicit flags), echoes the resolved values to <out>/config.json and exits
0 on success, 1 on configuration/input errors, 2 on numerical failure.
COLES_LOG={error|info|debug} controls verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import io
from .coles_solver import ColesConfig, hash_features, solve_projection
from .diagnostics import (expected_negative_homophily, homophily, js_divergence,
                          pair_scores, parzen_density, shared_grid,
                          silverman_bandwidth, wasserstein1)
from .evaluation import SplitSpec, kmeans, logreg_fit, logreg_predict, random_split, score
from .graph_core import laplacian, load_edge_list, normalized_adjacency, save_edge_list
from .negative_sampling import (NegSampleConfig, build_delta_w, psd_margin,
                                sample_negative_graph)
from .rng import stream_key
from .spectral_filters import FilterConfig, apply_filter
from .synthetic import SbmSpec, generate_sbm

log = logging.getLogger("coles")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class ConfigError(Exception):
    pass


class NumericalError(Exception):
    pass


def _setup_logging() -> None:
    level = os.environ.get("COLES_LOG", "info").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise ConfigError(f"COLES_LOG must be one of {sorted(levels)}, got {level!r}")
    logging.basicConfig(level=levels[level], format="[coles] %(message)s", stream=sys.stderr)


def _require_file(path, key: str) -> str:
    if path is None:
        raise ConfigError(f"missing required option: {key}")
    if not os.path.isfile(path):
        raise ConfigError(f"{key}: file not found: {path}")
    return path


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    _require_file(path, "--config")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config {path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"--config {path}: expected a JSON object")
    return cfg


META_KEYS = ("subcommand", "out")


def _resolve(defaults: dict, file_cfg: dict, args: argparse.Namespace) -> dict:
    """defaults < config file < explicit CLI flags (argparse None = unset)."""
    resolved = dict(defaults)
    for key, value in file_cfg.items():
        if key in META_KEYS:
            continue  # echoed metadata, handled separately
        if key not in defaults:
            raise ConfigError(f"unknown config key: {key!r}")
        resolved[key] = value
    for key in defaults:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            resolved[key] = value
    return resolved


def _resolve_out(args, file_cfg: dict, subcommand: str) -> str:
    found = file_cfg.get("subcommand")
    if found is not None and found != subcommand:
        raise ConfigError(f"config file was echoed by {found!r}, not {subcommand!r}")
    return _prepare_out(args.out if args.out is not None else file_cfg.get("out"))


def _write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out(out) -> str:
    if out is None:
        raise ConfigError("missing required option: --out")
    os.makedirs(out, exist_ok=True)
    return out


def _echo_config(cfg: dict, out: str) -> None:
    _write_json(cfg, os.path.join(out, "config.json"))


# -- synth --------------------------------------------------------------------

SYNTH_DEFAULTS = {
    "classes": 3, "per_block": 100, "p_in": 0.1, "p_out": 0.01,
    "feat_dim": 16, "mean_sep": 1.0, "noise_sigma": 1.0, "seed": 0,
    "edges": "edges.txt", "features": "features.csv", "labels": "labels.txt",
}


def cmd_synth(args) -> int:
    file_cfg = _load_config_file(args.config)
    out = _resolve_out(args, file_cfg, "synth")
    cfg = _resolve(SYNTH_DEFAULTS, file_cfg, args)
    spec = SbmSpec(n_classes=cfg["classes"], per_block=cfg["per_block"],
                   p_in=cfg["p_in"], p_out=cfg["p_out"], feature_dim=cfg["feat_dim"],
                   mean_sep=cfg["mean_sep"], noise_sigma=cfg["noise_sigma"],
                   seed=cfg["seed"])
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    graph = generate_sbm(spec)
    if graph.adjacency.nnz == 0:
        raise NumericalError("generated graph has no edges; raise p_in/p_out")
    save_edge_list(graph.adjacency, os.path.join(out, cfg["edges"]))
    io.write_csv(graph.features, os.path.join(out, cfg["features"]))
    io.write_labels(graph.labels, os.path.join(out, cfg["labels"]))
    _echo_config({**cfg, "subcommand": "synth", "out": out}, out)
    log.info("wrote %s nodes / %s edges under %s", graph.adjacency.n,
             len(graph.adjacency.edge_list()), out)
    return EXIT_OK


# -- embed ---------------------------------------------------------------------

EMBED_DEFAULTS = {
    "edges": None, "features": None, "seed": 0,
    "filter": "s2gc", "k_steps": 8, "alpha": 0.05, "dim": 16,
    "kappa": 10, "per_node": 5, "mode": "per-node-k", "p_prime": 0.05,
    "eta_prime": 1.0, "beta": 0.0, "tau": 1.0,
    "self_loops": True, "hash_dim": 0, "write_csv": False, "threads": 1,
}


def _coles_config(cfg: dict, d: int) -> ColesConfig:
    conf = ColesConfig(
        d_prime=min(cfg["dim"], d),
        filter=FilterConfig(kind=cfg["filter"], k_steps=cfg["k_steps"], alpha=cfg["alpha"]),
        negatives=NegSampleConfig(kappa=cfg["kappa"], per_node=cfg["per_node"],
                                  mode=cfg["mode"], p_prime=cfg["p_prime"],
                                  eta_prime=cfg["eta_prime"], seed=cfg["seed"]),
        beta=cfg["beta"], tau=cfg["tau"], self_loops=cfg["self_loops"],
    )
    try:
        conf.validate(d=d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return conf


def cmd_embed(args) -> int:
    file_cfg = _load_config_file(args.config)
    out = _resolve_out(args, file_cfg, "embed")
    cfg = _resolve(EMBED_DEFAULTS, file_cfg, args)
    if args.no_self_loops:
        cfg["self_loops"] = False
    t0 = time.perf_counter()
    features = io.read_dense(_require_file(cfg["features"], "--features"))
    if cfg["hash_dim"]:
        features = hash_features(features, cfg["hash_dim"], seed=cfg["seed"])
    try:
        adjacency = load_edge_list(_require_file(cfg["edges"], "--edges"),
                                   n=features.shape[0])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    conf = _coles_config(cfg, features.shape[1])
    try:
        # same pipeline as solve_linear_coles, composed here so the sampled
        # negatives can also feed the psd diagnostic
        w_pos = normalized_adjacency(adjacency, self_loops=conf.self_loops)
        negs = [sample_negative_graph(adjacency.n, conf.negatives, k)
                for k in range(conf.negatives.kappa)]
        delta_w = build_delta_w(w_pos, negs, conf.negatives.eta_prime)
        fx = apply_filter(w_pos, features, conf.filter)
        result = solve_projection(fx, delta_w, conf.d_prime)
        margin = psd_margin(laplacian(w_pos), [laplacian(w) for w in negs],
                            conf.negatives.eta_prime)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not result.converged:
        raise NumericalError("eigensolver did not converge within the sweep cap")

    io.write_clsm(result.Y, os.path.join(out, "embeddings.clsm"))
    if cfg["write_csv"]:
        io.write_csv(result.Y, os.path.join(out, "embeddings.csv"))
    resolved = {**cfg, "subcommand": "embed", "out": out, "dim": int(result.Y.shape[1])}
    _echo_config(resolved, out)
    sidecar = {
        "config": resolved,
        "eigenvalues": [float(v) for v in result.eigenvalues],
        "objective": result.objective,
        "psd_margin": {"value": margin.value, "converged": margin.converged},
        "rank_warning": result.rank_warning,
        "wall_clock_sec": time.perf_counter() - t0,
    }
    _write_json(sidecar, os.path.join(out, "embedding_meta.json"))
    if margin.value < -1e-9:
        log.info("psd margin is negative (%.3g): eta_prime may be too large", margin.value)
    log.info("embedded %d nodes into %d dims, objective %.6g",
             result.Y.shape[0], result.Y.shape[1], result.objective)
    return EXIT_OK


# -- eval ------------------------------------------------------------------------

EVAL_CLASSIFY_DEFAULTS = {
    "embeddings": None, "labels": None, "seed": 0,
    "per_class": 20, "n_splits": 50, "val_size": 500,
    "lr": 0.1, "epochs": 500, "l2": 1e-4,
}


def _summary(records: list[dict]) -> tuple[dict, dict]:
    keys = ("accuracy", "macro_f1", "micro_f1", "nmi")
    mean = {k: float(np.mean([r[k] for r in records])) for k in keys}
    std = {k: float(np.std([r[k] for r in records], ddof=1)) if len(records) > 1 else 0.0
           for k in keys}
    return mean, std


def cmd_eval_classify(args) -> int:
    file_cfg = _load_config_file(args.config)
    out = _resolve_out(args, file_cfg, "eval-classify")
    cfg = _resolve(EVAL_CLASSIFY_DEFAULTS, file_cfg, args)
    y = io.read_dense(_require_file(cfg["embeddings"], "--embeddings"))
    labels = io.read_labels(_require_file(cfg["labels"], "--labels"))
    if labels.shape[0] != y.shape[0]:
        raise ConfigError(f"--labels: {labels.shape[0]} labels for {y.shape[0]} embeddings")
    if cfg["n_splits"] < 1:
        raise ConfigError("n_splits must be >= 1")
    records = []
    for s in range(cfg["n_splits"]):
        spec = SplitSpec(per_class=cfg["per_class"], val_size=cfg["val_size"],
                         seed=stream_key(cfg["seed"], s))
        try:
            train, _val, test = random_split(labels, spec)
            if test.size == 0:
                raise ValueError("test set is empty; lower --val-size or --per-class")
            weights = logreg_fit(y[train], labels[train], l2=cfg["l2"],
                                 lr=cfg["lr"], epochs=cfg["epochs"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        pred = logreg_predict(weights, y[test])
        metrics = score(pred, labels[test], mode="classification")
        records.append({"split": s, **metrics.as_dict()})
    mean, std = _summary(records)
    resolved = {**cfg, "subcommand": "eval-classify", "out": out}
    _echo_config(resolved, out)
    _write_json({"config": resolved, "n_splits": cfg["n_splits"],
                 "per_split": records, "mean": mean, "std": std},
                os.path.join(out, "metrics.json"))
    log.info("classification over %d splits: acc %.4f +- %.4f",
             cfg["n_splits"], mean["accuracy"], std["accuracy"])
    return EXIT_OK


EVAL_CLUSTER_DEFAULTS = {
    "embeddings": None, "labels": None, "seed": 0, "k": 0, "n_runs": 10,
}


def cmd_eval_cluster(args) -> int:
    file_cfg = _load_config_file(args.config)
    out = _resolve_out(args, file_cfg, "eval-cluster")
    cfg = _resolve(EVAL_CLUSTER_DEFAULTS, file_cfg, args)
    y = io.read_dense(_require_file(cfg["embeddings"], "--embeddings"))
    labels = io.read_labels(_require_file(cfg["labels"], "--labels"))
    if labels.shape[0] != y.shape[0]:
        raise ConfigError(f"--labels: {labels.shape[0]} labels for {y.shape[0]} embeddings")
    k = cfg["k"] or int(labels.max()) + 1
    if cfg["n_runs"] < 1:
        raise ConfigError("n_runs must be >= 1")
    records = []
    for r in range(cfg["n_runs"]):
        try:
            assign = kmeans(y, k, seed=stream_key(cfg["seed"], r))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        metrics = score(assign, labels, mode="clustering")
        records.append({"run": r, **metrics.as_dict()})
    mean, std = _summary(records)
    resolved = {**cfg, "subcommand": "eval-cluster", "out": out, "k": k}
    _echo_config(resolved, out)
    _write_json({"config": resolved, "n_runs": cfg["n_runs"],
                 "per_run": records, "mean": mean, "std": std},
                os.path.join(out, "metrics.json"))
    log.info("clustering over %d runs: acc %.4f, nmi %.4f",
             cfg["n_runs"], mean["accuracy"], mean["nmi"])
    return EXIT_OK


# -- diagnose --------------------------------------------------------------------

DIAGNOSE_DEFAULTS = {
    "embeddings": None, "edges": None, "labels": None, "seed": 0,
    "kappa": 1, "per_node": 5, "mode": "per-node-k", "p_prime": 0.05,
    "bandwidth": 0.0, "grid_points": 512, "normalize": True, "tau": 1.0,
}


def cmd_diagnose(args) -> int:
    file_cfg = _load_config_file(args.config)
    out = _resolve_out(args, file_cfg, "diagnose")
    cfg = _resolve(DIAGNOSE_DEFAULTS, file_cfg, args)
    if args.no_normalize:
        cfg["normalize"] = False
    y = io.read_dense(_require_file(cfg["embeddings"], "--embeddings"))
    labels = io.read_labels(_require_file(cfg["labels"], "--labels"))
    try:
        adjacency = load_edge_list(_require_file(cfg["edges"], "--edges"), n=y.shape[0])
        neg_cfg = NegSampleConfig(kappa=max(cfg["kappa"], 1), per_node=cfg["per_node"],
                                  mode=cfg["mode"], p_prime=cfg["p_prime"], seed=cfg["seed"])
        negative = sample_negative_graph(y.shape[0], neg_cfg, 0)
        pos_scores = pair_scores(y, adjacency, normalize=cfg["normalize"], tau=cfg["tau"])
        neg_scores = pair_scores(y, negative, normalize=cfg["normalize"], tau=cfg["tau"])
        bw = cfg["bandwidth"] if cfg["bandwidth"] > 0 else None
        h_pos = bw if bw else silverman_bandwidth(pos_scores)
        h_neg = bw if bw else silverman_bandwidth(neg_scores)
        grid = shared_grid(pos_scores, neg_scores, h_pos, h_neg, cfg["grid_points"])
        dens_pos = parzen_density(pos_scores, h_pos, grid)
        dens_neg = parzen_density(neg_scores, h_neg, grid)
        js = js_divergence(pos_scores, neg_scores, bandwidth=bw,
                           grid_points=cfg["grid_points"])
        w1 = wasserstein1(pos_scores, neg_scores)
        h_graph = homophily(adjacency, labels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    counts = np.bincount(labels, minlength=int(labels.max()) + 1)
    h_neg_expected = expected_negative_homophily(counts / counts.sum())

    with open(os.path.join(out, "densities.csv"), "w", encoding="utf-8") as fh:
        fh.write("grid,density_pos,density_neg\n")
        for g, dp, dn in zip(grid, dens_pos, dens_neg):
            fh.write(f"{g!r},{dp!r},{dn!r}\n")
    resolved = {**cfg, "subcommand": "diagnose", "out": out}
    _echo_config(resolved, out)
    _write_json({"config": resolved, "js": js, "w1": w1,
                 "homophily_pos": h_graph, "homophily_neg_expected": h_neg_expected},
                os.path.join(out, "diagnostics.json"))
    log.info("diagnose: js %.4f (log2=%.4f), w1 %.4f", js, np.log(2.0), w1)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--seed", type=int, help="64-bit master seed")
    p.add_argument("--threads", type=int, help="worker cap (outputs never depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coles",
        description="Contrastive Laplacian eigenmap embeddings: generate, embed, evaluate, diagnose.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate an SBM fixture (edges/features/labels)")
    _add_common(p)
    p.add_argument("--classes", type=int)
    p.add_argument("--per-block", dest="per_block", type=int)
    p.add_argument("--p-in", dest="p_in", type=float)
    p.add_argument("--p-out", dest="p_out", type=float)
    p.add_argument("--feat-dim", dest="feat_dim", type=int)
    p.add_argument("--mean-sep", dest="mean_sep", type=float)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("embed", help="compute embeddings in closed form")
    _add_common(p)
    p.add_argument("--edges")
    p.add_argument("--features")
    p.add_argument("--filter", choices=("sgc", "s2gc", "identity"))
    p.add_argument("--k-steps", dest="k_steps", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--kappa", type=int)
    p.add_argument("--per-node", dest="per_node", type=int)
    p.add_argument("--mode", choices=("per-node-k", "erdos-renyi"))
    p.add_argument("--p-prime", dest="p_prime", type=float)
    p.add_argument("--eta-prime", dest="eta_prime", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--no-self-loops", action="store_true",
                   help="skip the W+I renormalization convention")
    p.add_argument("--hash-dim", dest="hash_dim", type=int,
                   help="fold features into this many signed hash buckets first")
    p.add_argument("--write-csv", dest="write_csv", action="store_const", const=True,
                   help="also write embeddings.csv")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("eval-classify", help="logistic regression over random splits")
    _add_common(p)
    p.add_argument("--embeddings")
    p.add_argument("--labels")
    p.add_argument("--per-class", dest="per_class", type=int, choices=(5, 20))
    p.add_argument("--n-splits", dest="n_splits", type=int)
    p.add_argument("--val-size", dest="val_size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--l2", type=float)
    p.set_defaults(func=cmd_eval_classify)

    p = sub.add_parser("eval-cluster", help="k-means clustering metrics")
    _add_common(p)
    p.add_argument("--embeddings")
    p.add_argument("--labels")
    p.add_argument("--k", type=int)
    p.add_argument("--n-runs", dest="n_runs", type=int)
    p.set_defaults(func=cmd_eval_cluster)

    p = sub.add_parser("diagnose", help="score densities, JS/W1 and homophily")
    _add_common(p)
    p.add_argument("--embeddings")
    p.add_argument("--edges")
    p.add_argument("--labels")
    p.add_argument("--kappa", type=int)
    p.add_argument("--per-node", dest="per_node", type=int)
    p.add_argument("--mode", choices=("per-node-k", "erdos-renyi"))
    p.add_argument("--p-prime", dest="p_prime", type=float)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--no-normalize", action="store_true",
                   help="score raw embeddings instead of tau-normalized rows")
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    try:
        _setup_logging()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"coles: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"coles: file error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"coles: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
