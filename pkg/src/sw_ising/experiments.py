"""
Config-driven experiment runners.

Each runner takes a resolved configuration dictionary, derives every random
stream from the root seed, and returns pandas DataFrames; the CLI writes
them as CSV files behind a provenance header. Parallel sweeps use a
multiprocessing pool with ordered ``imap``, so rows come out in the same
order as in a serial run and carry the same values.
"""

import logging
import multiprocessing as mp
import time
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .analysis.diagnostics import coalescence_time, phase
from .analysis.learning import CDConfig, cd_learn, generate_dataset
from .analysis.simplified_sw import phase_diagram
from .config.settings import format_provenance_header
from .dynamics.model import (
    IsingModel,
    constant_spins,
    load_model,
    random_spins,
    sample_model,
    theorem2_beta,
)
from .dynamics.samplers import ChainKind, run_chain
from .graph.generators import complete_bipartite, gen_partitioned, spec_from_dict
from .graph.loaders import load_edge_list
from .graph.partitioned import PartitionedGraph

logger = logging.getLogger(__name__)

MIX_COLUMNS = ["n", "k", "B", "chain", "seed", "steps", "censored"]
LEARN_COLUMNS = ["iteration", "field_error", "coupling_error", "chain", "seed", "work"]
REPRODUCE_POINT_COLUMNS = [
    "x",
    "n",
    "model_index",
    "chain",
    "field_error",
    "coupling_error",
    "status",
]
REPRODUCE_SUMMARY_COLUMNS = [
    "x",
    "chain",
    "field_error_mean",
    "field_error_std",
    "coupling_error_mean",
    "coupling_error_std",
    "num_models",
    "num_failed",
]
FIELD_DISTRIBUTIONS = {
    "positive": {"dist": "uniform", "lo": 0.0, "hi": 0.1},
    "mixed": {"dist": "uniform", "lo": -0.1, "hi": 0.1},
}


def child_seed(root: int, *index: int) -> np.random.SeedSequence:
    """Seed stream for a task, keyed by its position in the experiment."""
    return np.random.SeedSequence(root, spawn_key=tuple(int(i) for i in index))


def child_rng(root: int, *index: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(root, *index))


def map_ordered(
    func: Callable,
    tasks: Sequence,
    jobs: int = 1,
    desc: Optional[str] = None,
    quiet: bool = False,
) -> List:
    """Apply ``func`` to every task, in a pool when ``jobs > 1``; results keep task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [func(task) for task in tqdm(tasks, desc=desc, disable=quiet)]
    with mp.Pool(processes=min(jobs, len(tasks))) as pool:
        return list(
            tqdm(pool.imap(func, tasks), total=len(tasks), desc=desc, disable=quiet)
        )


def write_result_csv(
    df: pd.DataFrame,
    path: Union[str, Path],
    command: str,
    config: Dict[str, Any],
) -> Path:
    """Write ``df`` as CSV behind the provenance comment block."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write("\n".join(format_provenance_header(command, config)) + "\n")
        df.to_csv(f, index=False)
    logger.info(f"Wrote {len(df)} rows to: {path}")
    return path


def read_result_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Read a result file written by :func:`write_result_csv`."""
    return pd.read_csv(path, comment="#")


def output_path(config: Dict[str, Any], filename: str) -> Path:
    return Path(config["paths"]["output_dir"]) / filename


def build_graph(
    config: Dict[str, Any], seed, n: Optional[int] = None
) -> PartitionedGraph:
    """Graph described by the ``graph`` section: a file, K_{n,m}, or a random partitioned graph."""
    graph_config = config["graph"]
    if graph_config.get("file"):
        return load_edge_list(graph_config["file"])
    if graph_config.get("complete_bipartite"):
        left, right = graph_config["complete_bipartite"]
        return complete_bipartite(int(left), int(right))
    return gen_partitioned(spec_from_dict(graph_config, n), seed)


def build_model(
    config: Dict[str, Any],
    graph: Optional[PartitionedGraph],
    rng: np.random.Generator,
    beta=None,
    gamma=None,
) -> IsingModel:
    """Model described by the ``model`` section (a file, or drawn over ``graph``)."""
    model_config = config["model"]
    if model_config.get("file"):
        return load_model(model_config["file"])
    return sample_model(
        graph,
        model_config["beta"] if beta is None else beta,
        model_config["gamma"] if gamma is None else gamma,
        rng,
    )


def run_generate(config: Dict[str, Any]) -> PartitionedGraph:
    """Generate the configured graph."""
    return build_graph(config, child_seed(config["seed"], 0))


def _initial_state(start: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if start == "plus":
        return constant_spins(n, 1)
    if start == "minus":
        return constant_spins(n, -1)
    return random_spins(n, rng)


def run_sample(config: Dict[str, Any]) -> Tuple[np.ndarray, pd.DataFrame]:
    """Run one chain and record states every ``record_every`` steps.

    Returns:
        (recorded states, summary) where the summary has columns step,
        magnetization and phase_<i> per partition; step 0 is the initial state
    """
    root = config["seed"]
    sample_config = config["sample"]
    if config["model"].get("file"):
        model = load_model(config["model"]["file"])
    else:
        graph = build_graph(config, child_seed(root, 0))
        model = build_model(config, graph, child_rng(root, 1))

    rng = child_rng(root, 2)
    sigma0 = _initial_state(sample_config["start"], model.num_vertices, rng)
    every = int(sample_config["record_every"])
    states = [sigma0.copy()]
    steps = [0]

    def observer(t: int, state: np.ndarray):
        if t % every == 0:
            states.append(state.copy())
            steps.append(t)

    start = time.perf_counter()
    run_chain(model, sigma0, int(sample_config["steps"]), sample_config["chain"], rng, observer)
    logger.info(f"Sampled {sample_config['steps']} steps in {time.perf_counter() - start:.2f}s")

    recorded = np.stack(states)
    phases = phase(recorded, model.graph)
    summary = pd.DataFrame({"step": steps, "magnetization": recorded.mean(axis=1)})
    for i in range(phases.shape[1]):
        summary[f"phase_{i}"] = phases[:, i]
    return recorded, summary


def _mix_task(task: Tuple, starts: str) -> Dict[str, Any]:
    n, k, B, chain, seed, max_steps = task
    graph = complete_bipartite(n, int(round(k * n)))
    model = IsingModel.uniform(graph, theorem2_beta(B, n, k))
    pair = None
    if starts == "random":
        start_rng = np.random.default_rng([seed, 1])
        pair = (random_spins(graph.num_vertices, start_rng), random_spins(graph.num_vertices, start_rng))
    report = coalescence_time(model, seed, max_steps, chain, starts=pair)
    return {
        "n": n,
        "k": k,
        "B": B,
        "chain": chain,
        "seed": seed,
        "steps": report.steps,
        "censored": report.censored,
    }


def run_mix(config: Dict[str, Any], quiet: bool = False) -> pd.DataFrame:
    """Coalescence sweep on complete bipartite graphs K_{n, kn} at the scaled coupling.

    Returns:
        DataFrame with one row per (n, chain, seed) and columns n, k, B,
        chain, seed, steps, censored
    """
    mix = config["mix"]
    root = config["seed"]
    tasks = []
    for size_index, n in enumerate(mix["sizes"]):
        for chain_index, chain in enumerate(mix["chains"]):
            for seed_index in range(mix["num_seeds"]):
                seed = int(child_seed(root, size_index, chain_index, seed_index).generate_state(1)[0])
                tasks.append(
                    (int(n), float(mix["k"]), float(mix["B"]), ChainKind.parse(chain).value, seed, int(mix["max_steps"]))
                )

    rows = map_ordered(
        partial(_mix_task, starts=mix["starts"]), tasks, config["jobs"], "mix", quiet
    )
    df = pd.DataFrame(rows, columns=MIX_COLUMNS)
    for (n, chain), group in df.groupby(["n", "chain"], sort=False):
        logger.info(
            f"n={n} {chain}: median coalescence {group['steps'].median():.1f} steps, "
            f"{int(group['censored'].sum())} censored"
        )
    return df


def run_fixedpoint(config: Dict[str, Any]) -> pd.DataFrame:
    """Phase diagram of the simplified SW map over the configured (B, k) grid."""
    fixed = config["fixedpoint"]
    return phase_diagram(fixed["B"], fixed["k"], float(fixed["tol"]))


def _cd_config(learn: Dict[str, Any], chain: str, num_vertices: int) -> CDConfig:
    if ChainKind.parse(chain) is ChainKind.SWENDSEN_WANG:
        k = int(learn["k_sw"])
    else:
        k = int(learn["k_gibbs"]) if learn.get("k_gibbs") else num_vertices
    return CDConfig(
        n_i=int(learn["n_i"]),
        eta=float(learn["eta"]),
        k=k,
        n_s=int(learn["n_s"]),
        clamp_beta=bool(learn["clamp_beta"]),
    )


def run_learn(config: Dict[str, Any], quiet: bool = False) -> pd.DataFrame:
    """Learn one model with every configured chain from the same dataset.

    Returns:
        Error traces stacked by chain, with columns iteration, field_error,
        coupling_error, chain, seed, work
    """
    root = config["seed"]
    learn = config["learn"]
    if config["model"].get("file"):
        truth = load_model(config["model"]["file"])
    else:
        graph = build_graph(config, child_seed(root, 0))
        truth = build_model(config, graph, child_rng(root, 1))

    dataset = generate_dataset(
        truth, int(learn["n_samples"]), int(learn["burn_in"]), int(learn["thin"]), child_rng(root, 2)
    )

    traces = []
    for chain_index, chain in enumerate(learn["chains"]):
        cd_config = _cd_config(learn, chain, truth.num_vertices)
        _, trace = cd_learn(
            dataset,
            truth.graph,
            cd_config,
            chain,
            child_rng(root, 3, chain_index),
            truth=truth,
            progress=not quiet,
        )
        trace["chain"] = ChainKind.parse(chain).value
        trace["seed"] = root
        traces.append(trace)
    return pd.concat(traces, ignore_index=True)[LEARN_COLUMNS]


def _reproduce_task(task: Tuple, config: Dict[str, Any]) -> List[Dict[str, Any]]:
    x_index, x, n, model_index = task
    root = config["seed"]
    learn = config["learn"]
    reproduce = config["reproduce"]
    beta_hi = x if reproduce["sweep"] == "beta_range" else 1.0
    chains = [ChainKind.parse(chain).value for chain in learn["chains"]]

    start = time.perf_counter()
    try:
        graph = gen_partitioned(spec_from_dict(config["graph"], n), child_seed(root, x_index, model_index, 0))
        truth = sample_model(
            graph,
            {"dist": "uniform", "lo": 0.0, "hi": beta_hi},
            FIELD_DISTRIBUTIONS[reproduce["fields"]],
            child_rng(root, x_index, model_index, 1),
        )
        dataset = generate_dataset(
            truth,
            int(learn["n_samples"]),
            int(learn["burn_in"]),
            int(learn["thin"]),
            child_rng(root, x_index, model_index, 2),
        )
        rows = []
        for chain_index, chain in enumerate(chains):
            _, trace = cd_learn(
                dataset,
                graph,
                _cd_config(learn, chain, graph.num_vertices),
                chain,
                child_rng(root, x_index, model_index, 3, chain_index),
                truth=truth,
            )
            final = trace.iloc[-1]
            rows.append(
                {
                    "x": x,
                    "n": n,
                    "model_index": model_index,
                    "chain": chain,
                    "field_error": float(final["field_error"]),
                    "coupling_error": float(final["coupling_error"]),
                    "status": "ok",
                }
            )
    except Exception as e:
        logger.error(f"Point x={x}, model {model_index} failed: {e}")
        rows = [
            {
                "x": x,
                "n": n,
                "model_index": model_index,
                "chain": chain,
                "field_error": np.nan,
                "coupling_error": np.nan,
                "status": f"failed: {e}",
            }
            for chain in chains
        ]

    elapsed = time.perf_counter() - start
    if elapsed > float(reproduce["time_budget_s"]):
        logger.warning(
            f"Point x={x}, model {model_index} took {elapsed:.1f}s, "
            f"over the {reproduce['time_budget_s']}s budget"
        )
    return rows


def summarize_reproduce(points: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of the final errors per (x, chain)."""
    rows = []
    for (x, chain), group in points.groupby(["x", "chain"], sort=False):
        ok = group[group["status"] == "ok"]
        rows.append(
            {
                "x": x,
                "chain": chain,
                "field_error_mean": ok["field_error"].mean(),
                "field_error_std": ok["field_error"].std(ddof=0),
                "coupling_error_mean": ok["coupling_error"].mean(),
                "coupling_error_std": ok["coupling_error"].std(ddof=0),
                "num_models": len(ok),
                "num_failed": len(group) - len(ok),
            }
        )
    return pd.DataFrame(rows, columns=REPRODUCE_SUMMARY_COLUMNS)


def run_reproduce(config: Dict[str, Any], quiet: bool = False) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Generate graphs, sample datasets and learn with every chain, per sweep point.

    The ``beta_range`` sweep varies the upper bound x of beta ~ Unif(0, x)
    on graphs of ``graph.n`` vertices; the ``graph_size`` sweep varies the
    number of vertices with beta ~ Unif(0, 1). Failures are recorded per
    point in the ``status`` column and the sweep continues.

    Returns:
        (per-model points, per-(x, chain) summary)
    """
    reproduce = config["reproduce"]
    max_n = int(reproduce["max_n"])
    if reproduce["sweep"] == "beta_range":
        n = min(int(config["graph"]["n"]), max_n)
        if n < int(config["graph"]["n"]):
            logger.warning(f"graph.n={config['graph']['n']} capped at max_n={max_n}")
        xs = [(float(x), n) for x in reproduce["x_values"]]
    else:
        xs = []
        for size in reproduce["sizes"]:
            if int(size) > max_n:
                logger.warning(f"Skipping graph size {size} above max_n={max_n}")
                continue
            xs.append((int(size), int(size)))

    tasks = [
        (x_index, x, n, model_index)
        for x_index, (x, n) in enumerate(xs)
        for model_index in range(int(reproduce["num_models"]))
    ]
    results = map_ordered(
        partial(_reproduce_task, config=config), tasks, config["jobs"], "reproduce", quiet
    )
    points = pd.DataFrame(
        [row for rows in results for row in rows], columns=REPRODUCE_POINT_COLUMNS
    )
    return points, summarize_reproduce(points)
