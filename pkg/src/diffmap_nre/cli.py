"""Command line interface.

One subcommand per pipeline stage, each driven by a JSON config file and
an output directory::

    diffmap-nre embed --config experiment.json --out results/

Every command first writes ``config.echo.json``: the input config with
all defaults filled in.  Re-running the same subcommand on the echo file
reproduces every output byte for byte (pass ``--threads 1`` to also pin
the BLAS thread count).

Exit codes: 0 success, 2 bad parameters or config, 3 disconnected graph
or isolated points, 4 training divergence, 5 I/O failure.
"""

import argparse
import contextlib
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datasets as ds
from . import pca as pca_mod
from . import spectral
from .nre import (
    DecoderConfig,
    NREEntry,
    PlateauSchedule,
    StepSchedule,
    derive_seed,
    greedy_search,
    nre as nre_score,
    nre_curve_consecutive,
)
from .csvio import write_table
from .errors import (
    DisconnectedGraphError,
    DivergenceError,
    IsolatedPointError,
    ParameterError,
)
from .graph import KernelParams

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_DISCONNECTED = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5

_TOP_KEYS = {"seed", "dataset", "kernel", "embedding", "pca", "nre",
             "distance_check", "spectrum"}


# ---------------------------------------------------------------------------
# config resolution


def _require(cfg, key, section):
    if key not in cfg:
        raise ParameterError(f"config section {section!r} is missing key {key!r}")
    return cfg[key]


def _check_keys(cfg, allowed, section):
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ParameterError(
            f"unknown keys {sorted(unknown)} in config section {section!r}; "
            f"allowed: {sorted(allowed)}"
        )


def _as_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, float) and not value.is_integer():
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_float(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    return float(value)


def _resolve_transform(cfg, default_seed):
    cfg = dict(cfg)
    op = _require(cfg, "op", "dataset.transforms[]")
    if op == "standardize" or op == "minmax_normalize":
        _check_keys(cfg, {"op"}, f"transform {op}")
        return {"op": op}
    if op == "scale_column":
        _check_keys(cfg, {"op", "column", "factor"}, "transform scale_column")
        return {"op": op, "column": _require(cfg, "column", op),
                "factor": _as_float(_require(cfg, "factor", op), "factor")}
    if op == "duplicate_column":
        _check_keys(cfg, {"op", "column", "copies", "noise_sigma", "seed"},
                    "transform duplicate_column")
        return {"op": op, "column": _require(cfg, "column", op),
                "copies": _as_int(_require(cfg, "copies", op), "copies"),
                "noise_sigma": _as_float(cfg.get("noise_sigma", 0.0), "noise_sigma"),
                "seed": _as_int(cfg.get("seed", default_seed), "seed")}
    if op == "discretize_column":
        _check_keys(cfg, {"op", "column", "levels"}, "transform discretize_column")
        levels = _require(cfg, "levels", op)
        if not isinstance(levels, list):
            raise ParameterError(f"levels must be a list, got {levels!r}")
        return {"op": op, "column": _require(cfg, "column", op),
                "levels": [_as_float(v, "level") for v in levels]}
    raise ParameterError(
        f"unknown transform op {op!r}; choose from standardize, "
        "minmax_normalize, scale_column, duplicate_column, discretize_column"
    )


def _resolve_dataset(cfg, default_seed):
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'dataset' must be an object")
    cfg = dict(cfg)
    generator = _require(cfg, "generator", "dataset")
    out = {"generator": generator}
    if generator == "swiss_roll":
        _check_keys(cfg, {"generator", "n", "noise_sigma", "width", "seed",
                          "transforms"}, "dataset")
        out["n"] = _as_int(_require(cfg, "n", "dataset"), "n")
        out["noise_sigma"] = _as_float(cfg.get("noise_sigma", 0.0), "noise_sigma")
        out["width"] = _as_float(cfg.get("width", 21.0), "width")
        out["seed"] = _as_int(cfg.get("seed", default_seed), "seed")
    elif generator == "curve":
        _check_keys(cfg, {"generator", "kind", "n", "noise_sigma", "seed",
                          "transforms"}, "dataset")
        out["kind"] = _require(cfg, "kind", "dataset")
        out["n"] = _as_int(_require(cfg, "n", "dataset"), "n")
        out["noise_sigma"] = _as_float(cfg.get("noise_sigma", 0.0), "noise_sigma")
        out["seed"] = _as_int(cfg.get("seed", default_seed), "seed")
    elif generator == "csv":
        _check_keys(cfg, {"generator", "path", "transforms"}, "dataset")
        out["path"] = str(_require(cfg, "path", "dataset"))
    else:
        raise ParameterError(
            f"unknown dataset generator {generator!r}; choose from "
            "swiss_roll, curve, csv"
        )
    transforms = cfg.get("transforms", [])
    if not isinstance(transforms, list):
        raise ParameterError("dataset.transforms must be a list")
    out["transforms"] = [_resolve_transform(t, default_seed) for t in transforms]
    return out


def _resolve_kernel(cfg):
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'kernel' must be an object")
    _check_keys(cfg, {"epsilon", "n_neighbors", "alpha"}, "kernel")
    n_neighbors = cfg.get("n_neighbors", "all")
    if n_neighbors != "all":
        n_neighbors = _as_int(n_neighbors, "n_neighbors")
    return {
        "epsilon": _as_float(_require(cfg, "epsilon", "kernel"), "epsilon"),
        "n_neighbors": n_neighbors,
        "alpha": _as_float(cfg.get("alpha", 0.0), "alpha"),
    }


def _resolve_embedding(cfg):
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'embedding' must be an object")
    _check_keys(cfg, {"k_max", "t", "components"}, "embedding")
    components = cfg.get("components")
    if components is not None:
        if not isinstance(components, list):
            raise ParameterError("embedding.components must be a list or null")
        components = [_as_int(c, "component") for c in components]
    return {
        "k_max": _as_int(cfg.get("k_max", 10), "k_max"),
        "t": _as_int(cfg.get("t", 1), "t"),
        "components": components,
    }


def _resolve_schedule(cfg):
    cfg = dict(cfg)
    kind = _require(cfg, "kind", "nre.schedule")
    if kind == "reduce_on_plateau":
        _check_keys(cfg, {"kind", "threshold", "factor", "patience"}, "nre.schedule")
        return {"kind": kind,
                "threshold": _as_float(cfg.get("threshold", 0.01), "threshold"),
                "factor": _as_float(cfg.get("factor", 0.1), "factor"),
                "patience": _as_int(cfg.get("patience", 10), "patience")}
    if kind == "step":
        _check_keys(cfg, {"kind", "step_size", "factor"}, "nre.schedule")
        return {"kind": kind,
                "step_size": _as_int(_require(cfg, "step_size", "nre.schedule"),
                                     "step_size"),
                "factor": _as_float(_require(cfg, "factor", "nre.schedule"),
                                    "factor")}
    raise ParameterError(
        f"unknown schedule kind {kind!r}; choose reduce_on_plateau or step"
    )


def _resolve_nre(cfg, default_seed, command):
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'nre' must be an object")
    _check_keys(cfg, {"hidden_layers", "epochs", "batch_size", "l2_beta",
                      "initial_lr", "schedule", "train_fraction", "seed",
                      "components", "k_max", "t_max"}, "nre")
    hidden = cfg.get("hidden_layers", [50, 50, 50])
    if not isinstance(hidden, list):
        raise ParameterError("nre.hidden_layers must be a list")
    out = {
        "hidden_layers": [_as_int(h, "hidden layer size") for h in hidden],
        "epochs": _as_int(cfg.get("epochs", 100), "epochs"),
        "batch_size": _as_int(cfg.get("batch_size", 32), "batch_size"),
        "l2_beta": _as_float(cfg.get("l2_beta", 1e-6), "l2_beta"),
        "initial_lr": _as_float(cfg.get("initial_lr", 0.05), "initial_lr"),
        "schedule": _resolve_schedule(cfg.get("schedule",
                                              {"kind": "reduce_on_plateau"})),
        "train_fraction": _as_float(cfg.get("train_fraction", 2500 / 3000),
                                    "train_fraction"),
        "seed": _as_int(cfg.get("seed", default_seed), "seed"),
    }
    components = cfg.get("components")
    if components is not None:
        if not isinstance(components, list):
            raise ParameterError("nre.components must be a list or null")
        components = [_as_int(c, "component") for c in components]
    k_max = cfg.get("k_max")
    if k_max is not None:
        k_max = _as_int(k_max, "nre.k_max")
    if command == "nre":
        if (components is None) == (k_max is None):
            raise ParameterError(
                "the nre command needs exactly one of nre.components "
                "(one explicit set) or nre.k_max (consecutive curve)"
            )
        out["components"] = components
        out["k_max"] = k_max
    elif command == "search":
        if k_max is None:
            raise ParameterError("the search command requires nre.k_max")
        t_max = cfg.get("t_max")
        out["k_max"] = k_max
        out["t_max"] = k_max if t_max is None else _as_int(t_max, "nre.t_max")
    return out


def _resolve_pca(cfg):
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'pca' must be an object")
    _check_keys(cfg, {"k"}, "pca")
    return {"k": _as_int(_require(cfg, "k", "pca"), "k")}


def _resolve_distance_check(cfg, default_seed, pairs_flag):
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'distance_check' must be an object")
    _check_keys(cfg, {"t_values", "pairs", "truncate_k", "seed"}, "distance_check")
    t_values = cfg.get("t_values", [1, 2, 3])
    if not isinstance(t_values, list) or not t_values:
        raise ParameterError("distance_check.t_values must be a nonempty list")
    pairs = cfg.get("pairs", 50) if pairs_flag is None else pairs_flag
    truncate_k = cfg.get("truncate_k")
    return {
        "t_values": [_as_int(t, "t") for t in t_values],
        "pairs": _as_int(pairs, "pairs"),
        "truncate_k": None if truncate_k is None else _as_int(truncate_k, "truncate_k"),
        "seed": _as_int(cfg.get("seed", default_seed), "seed"),
    }


def _resolve_spectrum(cfg):
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise ParameterError("config section 'spectrum' must be an object")
    _check_keys(cfg, {"t_values"}, "spectrum")
    t_values = cfg.get("t_values", [1])
    if not isinstance(t_values, list) or not t_values:
        raise ParameterError("spectrum.t_values must be a nonempty list")
    return {"t_values": [_as_int(t, "t") for t in t_values]}


_SECTIONS_BY_COMMAND = {
    "generate": ("dataset",),
    "embed": ("dataset", "kernel", "embedding"),
    "pca": ("dataset", "pca"),
    "nre": ("dataset", "kernel", "embedding", "nre"),
    "search": ("dataset", "kernel", "embedding", "nre"),
    "distance-check": ("dataset", "kernel", "embedding", "distance_check"),
    "spectrum": ("dataset", "kernel", "embedding", "spectrum"),
}


def resolve_config(command, raw, pairs_flag=None):
    """Fill in all defaults for one command; returns the echo-ready dict."""
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ParameterError(
            f"unknown top-level config keys {sorted(unknown)}; "
            f"allowed: {sorted(_TOP_KEYS)}"
        )
    seed = _as_int(raw.get("seed", 0), "seed")
    resolved = {"seed": seed}
    sections = _SECTIONS_BY_COMMAND[command]
    if "dataset" in sections:
        resolved["dataset"] = _resolve_dataset(_require(raw, "dataset", "config"),
                                               seed)
    if "kernel" in sections:
        resolved["kernel"] = _resolve_kernel(_require(raw, "kernel", "config"))
    if "embedding" in sections:
        resolved["embedding"] = _resolve_embedding(raw.get("embedding"))
    if "pca" in sections:
        resolved["pca"] = _resolve_pca(_require(raw, "pca", "config"))
    if "nre" in sections:
        resolved["nre"] = _resolve_nre(raw.get("nre"), seed, command)
    if "distance_check" in sections:
        resolved["distance_check"] = _resolve_distance_check(
            raw.get("distance_check"), seed, pairs_flag)
    if "spectrum" in sections:
        resolved["spectrum"] = _resolve_spectrum(raw.get("spectrum"))
    return resolved


# ---------------------------------------------------------------------------
# builders


def build_dataset(resolved):
    """Generate the dataset described by a resolved config and apply transforms."""
    cfg = resolved["dataset"]
    gen = cfg["generator"]
    if gen == "swiss_roll":
        data = ds.make_swiss_roll(ds.SwissRollParams(
            n=cfg["n"], noise_sigma=cfg["noise_sigma"], width=cfg["width"],
            seed=cfg["seed"]))
    elif gen == "curve":
        data = ds.make_curve_1d(cfg["kind"], cfg["n"],
                                noise_sigma=cfg["noise_sigma"], seed=cfg["seed"])
    else:
        data = ds.dataset_from_csv(cfg["path"])
    for t in cfg["transforms"]:
        op = t["op"]
        if op == "standardize":
            data = ds.standardize(data)
        elif op == "minmax_normalize":
            data = ds.minmax_normalize(data)
        elif op == "scale_column":
            data = ds.scale_column(data, t["column"], t["factor"])
        elif op == "duplicate_column":
            data = ds.duplicate_column(data, t["column"], t["copies"],
                                       noise_sigma=t["noise_sigma"], seed=t["seed"])
        elif op == "discretize_column":
            data = ds.discretize_column(data, t["column"], t["levels"])
    return data


def _kernel_params(resolved):
    cfg = resolved["kernel"]
    n_neighbors = None if cfg["n_neighbors"] == "all" else cfg["n_neighbors"]
    return KernelParams(epsilon=cfg["epsilon"], n_neighbors=n_neighbors,
                        alpha=cfg["alpha"])


def _decoder_config(resolved):
    cfg = resolved["nre"]
    sched = cfg["schedule"]
    if sched["kind"] == "step":
        schedule = StepSchedule(step_size=sched["step_size"],
                                        factor=sched["factor"])
    else:
        schedule = PlateauSchedule(threshold=sched["threshold"],
                                           factor=sched["factor"],
                                           patience=sched["patience"])
    return DecoderConfig(
        hidden_layers=tuple(cfg["hidden_layers"]),
        epochs=cfg["epochs"],
        batch_size=cfg["batch_size"],
        l2_beta=cfg["l2_beta"],
        initial_lr=cfg["initial_lr"],
        schedule=schedule,
        train_fraction=cfg["train_fraction"],
        seed=cfg["seed"],
    )


def _fit(resolved, data, allow_disconnected):
    params = _kernel_params(resolved)
    k_max = resolved["embedding"]["k_max"]
    return spectral.fit_diffusion_map(data, params, k_max,
                                      allow_disconnected=allow_disconnected)


# ---------------------------------------------------------------------------
# output helpers


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


def _write_csv(path, header, columns):
    write_table(path, header, columns)
    print(f"wrote {path}")


def _prepare_out(args, resolved):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "config.echo.json", resolved)
    return out


def _report_payload(report):
    return {
        "final_train_loss": report.final_train_loss,
        "final_test_loss": report.final_test_loss,
        "epsilon_k_normalized": report.epsilon_k_normalized,
        "epsilon_0": report.epsilon_0,
        "n_train": report.n_train,
        "n_test": report.n_test,
        "loss_history": [list(pair) for pair in report.loss_history],
        "lr_history": list(report.lr_history),
    }


def _curve_csv_columns(entries):
    sizes = np.array([len(e.components) for e in entries])
    labels = np.array([";".join(str(c) for c in e.components) for e in entries])
    values = np.array([e.nre for e in entries])
    return ["set_size", "components", "nre"], [sizes, labels, values]


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args):
    resolved = resolve_config("generate", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    ds.dataset_to_csv(data, out / "dataset.csv")
    print(f"wrote {out / 'dataset.csv'} ({data.n_samples} rows, "
          f"{data.n_features} columns)")
    return EXIT_OK


def cmd_embed(args):
    resolved = resolve_config("embed", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    model, graph = _fit(resolved, data, args.allow_disconnected)
    t = resolved["embedding"]["t"]
    components = resolved["embedding"]["components"]
    if components is None:
        components = list(range(1, model.n_components + 1))
    embedding = spectral.embed(model, t, components)
    spectral.embedding_to_csv(embedding, out / "embedding.csv", data)
    print(f"wrote {out / 'embedding.csv'}")
    header, columns = spectral.export_spectrum(model, [t])
    _write_csv(out / "spectrum.csv", header, columns)

    p_model = pca_mod.pca_fit(data, data.n_features)
    scores = pca_mod.pca_transform(p_model, data).coords
    psi1 = model.psi[:, 1]
    sims = []
    for j in range(scores.shape[1]):
        col = scores[:, j]
        if col.std() == 0 or psi1.std() == 0:
            sims.append(0.0)
        else:
            sims.append(abs(float(np.corrcoef(psi1, col)[0, 1])))
    summary = {
        "n_samples": data.n_samples,
        "n_features": data.n_features,
        "kernel": resolved["kernel"],
        "t": t,
        "components": components,
        "n_components": model.n_components,
        "connected_components": graph.components,
        "eigenvalues": model.eigenvalues,
        "negative_eigenvalue_indices": list(model.negative_indices),
        "pca_similarity_psi1": max(sims),
    }
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def cmd_pca(args):
    resolved = resolve_config("pca", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    k = resolved["pca"]["k"]
    model = pca_mod.pca_fit(data, k)
    embedding = pca_mod.pca_transform(model, data)
    spectral.embedding_to_csv(embedding, out / "pca_embedding.csv", data)
    print(f"wrote {out / 'pca_embedding.csv'}")
    ks = np.arange(1, k + 1)
    errors = np.array([pca_mod.pca_reconstruction_error(model, int(j)) for j in ks])
    ratios = model.explained_variance / model.total_variance
    _write_csv(out / "pca_variance.csv",
               ["component", "explained_variance", "explained_ratio",
                "reconstruction_error"],
               [ks, model.explained_variance, ratios, errors])
    return EXIT_OK


def cmd_nre(args):
    resolved = resolve_config("nre", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    model, _ = _fit(resolved, data, args.allow_disconnected)
    config = _decoder_config(resolved)
    if resolved["nre"]["components"] is not None:
        comps = tuple(resolved["nre"]["components"])
        cfg = replace(config, seed=derive_seed(config.seed, comps))
        report = nre_score(model, data, comps, cfg)
        entries = [NREEntry(comps, report.epsilon_k_normalized, report)]
    else:
        curve = nre_curve_consecutive(model, data,
                                              resolved["nre"]["k_max"], config)
        entries = list(curve.entries)
    header, columns = _curve_csv_columns(entries)
    _write_csv(out / "nre_curve.csv", header, columns)
    payload = {
        "config": resolved,
        "entries": [dict(components=list(e.components), nre=e.nre,
                         **_report_payload(e.report)) for e in entries],
    }
    _write_json(out / "nre_report.json", payload)
    return EXIT_OK


def cmd_search(args):
    resolved = resolve_config("search", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    model, _ = _fit(resolved, data, args.allow_disconnected)
    config = _decoder_config(resolved)
    selected, curve = greedy_search(
        model, data, resolved["nre"]["k_max"], resolved["nre"]["t_max"], config)
    header, columns = _curve_csv_columns(list(curve.entries))
    _write_csv(out / "search_result.csv", header, columns)
    round_idx, candidates, scores = [], [], []
    for r, table in enumerate(curve.rounds):
        for candidate, value in table:
            round_idx.append(r)
            candidates.append(candidate)
            scores.append(value)
    _write_csv(out / "search_rounds.csv",
               ["round", "candidate", "nre"],
               [np.array(round_idx), np.array(candidates), np.array(scores)])
    payload = {
        "config": resolved,
        "selected": selected,
        "entries": [dict(components=list(e.components), nre=e.nre,
                         **_report_payload(e.report)) for e in curve.entries],
        "rounds": [[{"candidate": c, "nre": v} for c, v in table]
                   for table in curve.rounds],
    }
    _write_json(out / "nre_report.json", payload)
    print("selected components: " + ", ".join(str(c) for c in selected))
    return EXIT_OK


def cmd_distance_check(args):
    resolved = resolve_config("distance-check", _load_json(args.config),
                              pairs_flag=args.pairs)
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    model, graph = _fit(resolved, data, args.allow_disconnected)
    cfg = resolved["distance_check"]
    n = data.n_samples
    rng = np.random.default_rng(cfg["seed"])
    pairs = []
    for _ in range(cfg["pairs"]):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        pairs.append((i, j))
    phi0 = model.phi[:, 0]
    lam = model.eigenvalues
    psi = model.psi
    truncate_k = cfg["truncate_k"]
    per_t = {}
    max_rel = 0.0
    max_gap = 0.0
    for t in cfg["t_values"]:
        worst = 0.0
        for i, j in pairs:
            direct = spectral.diffusion_distance(graph.M, t, i, j, phi0)
            dpsi2 = (psi[i, 1:] - psi[j, 1:]) ** 2
            weights = lam[1:] ** (2 * t)
            embedded = float(np.sum(weights * dpsi2))
            scale = max(direct, np.finfo(float).tiny)
            worst = max(worst, abs(direct - embedded) / scale)
            if truncate_k is not None:
                head = float(np.sum(weights[:truncate_k] * dpsi2[:truncate_k]))
                tail = float(np.sum(weights[truncate_k:] * dpsi2[truncate_k:]))
                gap = abs((direct - head) - tail) / scale
                max_gap = max(max_gap, gap)
        per_t[str(t)] = worst
        max_rel = max(max_rel, worst)
    payload = {
        "n_pairs": cfg["pairs"],
        "t_values": cfg["t_values"],
        "n_components": model.n_components,
        "max_rel_error": max_rel,
        "max_rel_error_per_t": per_t,
    }
    if truncate_k is not None:
        payload["truncate_k"] = truncate_k
        payload["max_truncation_gap"] = max_gap
    _write_json(out / "distance_check.json", payload)
    return EXIT_OK


def cmd_spectrum(args):
    resolved = resolve_config("spectrum", _load_json(args.config))
    out = _prepare_out(args, resolved)
    data = build_dataset(resolved)
    model, _ = _fit(resolved, data, args.allow_disconnected)
    header, columns = spectral.export_spectrum(model,
                                               resolved["spectrum"]["t_values"])
    _write_csv(out / "spectrum.csv", header, columns)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path} is not valid JSON: {exc}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diffmap-nre",
        description="Diffusion map embeddings and neural reconstruction "
                    "error analysis.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help="path to the experiment JSON config")
    common.add_argument("--out", required=True,
                        help="output directory (created if missing)")
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS threads (1 for bit-reproducible runs)")
    graph_flag = argparse.ArgumentParser(add_help=False)
    graph_flag.add_argument("--allow-disconnected", action="store_true",
                            help="proceed with a warning on a disconnected "
                                 "kernel graph instead of failing")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common],
                   help="generate a dataset and write it to CSV"
                   ).set_defaults(func=cmd_generate)
    sub.add_parser("embed", parents=[common, graph_flag],
                   help="compute a diffusion map embedding"
                   ).set_defaults(func=cmd_embed)
    sub.add_parser("pca", parents=[common],
                   help="fit PCA and export scores and variance"
                   ).set_defaults(func=cmd_pca)
    sub.add_parser("nre", parents=[common, graph_flag],
                   help="score component sets by reconstruction error"
                   ).set_defaults(func=cmd_nre)
    sub.add_parser("search", parents=[common, graph_flag],
                   help="greedy component selection by reconstruction error"
                   ).set_defaults(func=cmd_search)
    dc = sub.add_parser("distance-check", parents=[common, graph_flag],
                        help="verify diffusion distances against the embedding")
    dc.add_argument("--pairs", type=int, default=None,
                    help="number of random point pairs (overrides config)")
    dc.set_defaults(func=cmd_distance_check)
    sub.add_parser("spectrum", parents=[common, graph_flag],
                   help="tabulate eigenvalues and their powers"
                   ).set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_PARAMETER
    if args.threads is not None:
        from threadpoolctl import threadpool_limits
        limits = threadpool_limits(limits=args.threads)
    else:
        limits = contextlib.nullcontext()
    try:
        with limits:
            return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except (DisconnectedGraphError, IsolatedPointError) as exc:
        message = str(exc).replace(
            "pass allow_disconnected=True", "pass --allow-disconnected"
        )
        print(f"error: {message}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
