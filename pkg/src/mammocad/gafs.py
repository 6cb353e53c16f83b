"""Feature subset selection by a genetic algorithm wrapped around the classifier.

Chromosomes are fixed-length tuples of distinct 1-based feature ids. For every
subset size L an independent GA runs with roulette selection, elitism,
alternating-gene crossover (L - 1 cut points, so parents swap every other
gene) and a two-mode mutation: duplicate genes left by crossover are repaired
with unused ids, otherwise genes reset with a small per-gene probability.
Fitness is the classifier's accuracy on a held-out fold, memoized per subset,
and the global winner is the highest-fitness subset over all L (ties go to
the smaller L).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import PipelineError
from .fsio import atomic_write_text
from .neural import NetworkShape, TrainConfig, accuracy, hidden_size, train

Chromosome = tuple[int, ...]

FITNESS_SPLITS = ("validation", "paper-test")


def default_population(length: int) -> int:
    """Population shrinks with subset length; always a multiple of 4."""
    return 4 * int(np.clip(round(64 / math.sqrt(length)), 6, 32))


def default_generation_cap(length: int) -> int:
    return int(np.clip(round(256 / math.sqrt(length)), 24, 160))


@dataclass
class GaConfig:
    seed: int = 0
    n_features: int = 130
    l_range: tuple[int, int] = (1, 130)
    elite_count: int = 2
    crossover_prob: float = 1.0
    mutation_prob: float = 0.01
    stagnation_window: int = 10
    population_size: int | None = None  # None: default_population(L)
    generation_cap: int | None = None  # None: default_generation_cap(L)
    fitness_split: str = "validation"
    validation_fraction: float = 0.25
    fitness_train: TrainConfig = field(
        default_factory=lambda: TrainConfig(max_epochs=150, patience=25)
    )
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_features < 2:
            raise ValueError("need at least 2 features")
        lo, hi = self.l_range
        if not (1 <= lo <= hi <= self.n_features):
            raise ValueError(f"l_range {self.l_range} outside 1..{self.n_features}")
        if self.fitness_split not in FITNESS_SPLITS:
            raise ValueError(f"fitness_split must be one of {FITNESS_SPLITS}")
        if self.population_size is not None and (
            self.population_size < 4 or self.population_size % 4
        ):
            raise ValueError("population_size must be a positive multiple of 4")
        if not (0 <= self.mutation_prob <= 1 and 0 <= self.crossover_prob <= 1):
            raise ValueError("probabilities must be in [0, 1]")
        if not (0 < self.validation_fraction < 1):
            raise ValueError("validation_fraction must be in (0, 1)")

    def population_for(self, length: int) -> int:
        return self.population_size or default_population(length)

    def generations_for(self, length: int) -> int:
        return self.generation_cap or default_generation_cap(length)


@dataclass
class LengthRecord:
    """Outcome of the search at one subset length."""

    length: int
    best: Chromosome  # sorted
    fitness: float
    generations: int
    history: list[float] = field(default_factory=list, repr=False)


@dataclass
class SearchResult:
    per_length: list[LengthRecord]
    best: LengthRecord
    n_features: int
    seed: int
    fitness_split: str
    evaluations: int


# --- GA operators -----------------------------------------------------------

def roulette_select(
    population: list[Chromosome], fitnesses, rng: np.random.Generator
) -> Chromosome:
    """Draw one chromosome with probability fitness / total fitness; a
    zero-fitness population falls back to a uniform draw."""
    if len(population) != len(fitnesses):
        raise PipelineError("length-mismatch", "population and fitness counts differ")
    f = np.asarray(fitnesses, dtype=float)
    if f.min() < 0:
        raise ValueError("fitness must be non-negative")
    total = f.sum()
    if total > 0:
        idx = int(rng.choice(len(population), p=f / total))
    else:
        idx = int(rng.integers(len(population)))
    return population[idx]


def kpoint_crossover(p1: Chromosome, p2: Chromosome) -> tuple[Chromosome, Chromosome]:
    """Cut at all L - 1 internal points, so children alternate parents per
    gene: child1 = (p1[0], p2[1], p1[2], ...), child2 mirrored."""
    if len(p1) != len(p2):
        raise PipelineError("length-mismatch", f"{len(p1)} vs {len(p2)} genes")
    c1 = tuple(p1[i] if i % 2 == 0 else p2[i] for i in range(len(p1)))
    c2 = tuple(p2[i] if i % 2 == 0 else p1[i] for i in range(len(p1)))
    return c1, c2


def mutate(
    chrom: Chromosome,
    rng: np.random.Generator,
    mutation_prob: float = 0.01,
    n_features: int = 130,
) -> Chromosome:
    """Repair duplicates if any (keep first occurrences, redraw the rest from
    unused ids); otherwise reset each gene with ``mutation_prob`` to an
    unused id."""
    genes = list(chrom)
    used = set(genes)

    def draw_unused() -> int:
        pool = sorted(set(range(1, n_features + 1)) - used)
        if not pool:
            raise PipelineError("id-pool-exhausted", "no unused feature ids left")
        return pool[int(rng.integers(len(pool)))]

    seen: set[int] = set()
    dup_positions = []
    for i, g in enumerate(genes):
        if g in seen:
            dup_positions.append(i)
        else:
            seen.add(g)
    if dup_positions:
        for i in dup_positions:
            z = draw_unused()
            genes[i] = z
            used.add(z)
        return tuple(genes)

    for i in range(len(genes)):
        if rng.random() < mutation_prob:
            z = draw_unused()
            used.discard(genes[i])
            genes[i] = z
            used.add(z)
    return tuple(genes)


# --- fitness ----------------------------------------------------------------

def subset_seed(master_seed: int, genes: Chromosome) -> int:
    """Stable training seed per subset, independent of evaluation order."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(sorted(genes)))
    return int(ss.generate_state(1)[0])


def evaluate_fitness(
    fit_x: np.ndarray,
    fit_y: np.ndarray,
    eval_x: np.ndarray,
    eval_y: np.ndarray,
    genes: Chromosome,
    train_cfg: TrainConfig,
    master_seed: int,
) -> float:
    """Train on the subset's columns and score accuracy on the fitness fold."""
    cols = [g - 1 for g in sorted(genes)]
    if len(set(cols)) != len(cols):
        raise ValueError("chromosome has duplicate genes")
    shape = NetworkShape(len(cols), hidden_size(len(cols)))
    cfg = replace(train_cfg, seed=subset_seed(master_seed, genes))
    model = train(fit_x[:, cols], fit_y, shape, cfg)
    return accuracy(model, eval_x[:, cols], eval_y)


def carve_validation(
    x: np.ndarray, y: np.ndarray, fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Stratified held-out fold from the training rows; every class keeps at
    least one training sample."""
    y = np.asarray(y, dtype=int)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0, 1)))
    val_idx: list[int] = []
    for cls in np.unique(y):
        members = np.nonzero(y == cls)[0]
        if len(members) < 2:
            continue
        take = min(max(1, round(fraction * len(members))), len(members) - 1)
        val_idx.extend(members[rng.permutation(len(members))[:take]])
    if not val_idx:
        raise PipelineError(
            "empty-validation",
            "no class has enough training rows to carve a validation fold",
        )
    val_mask = np.zeros(len(y), dtype=bool)
    val_mask[val_idx] = True
    return x[~val_mask], y[~val_mask], x[val_mask], y[val_mask]


_WORKER_STATE: dict = {}


def _pool_init(fit_x, fit_y, eval_x, eval_y, train_cfg, master_seed):
    _WORKER_STATE.update(
        fit_x=fit_x, fit_y=fit_y, eval_x=eval_x, eval_y=eval_y,
        train_cfg=train_cfg, master_seed=master_seed,
    )


def _pool_eval(genes: Chromosome) -> float:
    s = _WORKER_STATE
    return evaluate_fitness(
        s["fit_x"], s["fit_y"], s["eval_x"], s["eval_y"],
        genes, s["train_cfg"], s["master_seed"],
    )


class FitnessEvaluator:
    """Memoizing fitness oracle; results depend only on the sorted gene set,
    so parallel evaluation order cannot change them."""

    def __init__(self, fit_x, fit_y, eval_x, eval_y, train_cfg, master_seed, n_jobs=1):
        self.fit_x = np.asarray(fit_x, dtype=float)
        self.fit_y = np.asarray(fit_y, dtype=int)
        self.eval_x = np.asarray(eval_x, dtype=float)
        self.eval_y = np.asarray(eval_y, dtype=int)
        self.train_cfg = train_cfg
        self.master_seed = master_seed
        self.n_jobs = max(1, n_jobs)
        self.memo: dict[Chromosome, float] = {}
        self._pool = None

    def _ensure_pool(self):
        if self._pool is None:
            self._pool = ProcessPoolExecutor(
                max_workers=self.n_jobs,
                initializer=_pool_init,
                initargs=(
                    self.fit_x, self.fit_y, self.eval_x, self.eval_y,
                    self.train_cfg, self.master_seed,
                ),
            )
        return self._pool

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    @property
    def evaluations(self) -> int:
        return len(self.memo)

    def evaluate_many(self, chromosomes: list[Chromosome]) -> list[float]:
        keys = [tuple(sorted(c)) for c in chromosomes]
        todo = sorted({k for k in keys if k not in self.memo})
        if todo:
            if self.n_jobs == 1:
                results = [
                    evaluate_fitness(
                        self.fit_x, self.fit_y, self.eval_x, self.eval_y,
                        k, self.train_cfg, self.master_seed,
                    )
                    for k in todo
                ]
            else:
                results = list(self._ensure_pool().map(_pool_eval, todo, chunksize=4))
            self.memo.update(zip(todo, results))
        return [self.memo[k] for k in keys]


# --- search -----------------------------------------------------------------

def _initial_population(rng, n_features: int, length: int, size: int) -> list[Chromosome]:
    return [
        tuple(int(g) + 1 for g in rng.permutation(n_features)[:length])
        for _ in range(size)
    ]


def run_ga_for_length(length: int, evaluator: FitnessEvaluator, cfg: GaConfig) -> LengthRecord:
    """One GA run at a fixed subset length; stops on the generation cap or
    after ``stagnation_window`` generations without a new best."""
    n = cfg.n_features
    if not (2 <= length <= n - 1):
        raise ValueError(f"GA runs for 2 <= L <= {n - 1}, got {length}")
    size = cfg.population_for(length)
    cap = cfg.generations_for(length)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0, length))
    )
    population = _initial_population(rng, n, length, size)
    best_genes: Chromosome | None = None
    best_fit = -1.0
    since_improve = 0
    history: list[float] = []
    generations = 0

    for gen in range(cap):
        fits = evaluator.evaluate_many(population)
        generations = gen + 1
        history.append(max(fits))
        top = int(np.argmax(fits))
        if fits[top] > best_fit:
            best_fit = fits[top]
            best_genes = tuple(sorted(population[top]))
            since_improve = 0
        else:
            since_improve += 1
        if since_improve >= cfg.stagnation_window or gen == cap - 1:
            break

        elite_idx = sorted(range(size), key=lambda i: (-fits[i], i))[: cfg.elite_count]
        nxt: list[Chromosome] = [population[i] for i in elite_idx]
        while len(nxt) < size:
            pa = roulette_select(population, fits, rng)
            pb = roulette_select(population, fits, rng)
            if rng.random() < cfg.crossover_prob:
                ca, cb = kpoint_crossover(pa, pb)
            else:
                ca, cb = pa, pb
            nxt.append(mutate(ca, rng, cfg.mutation_prob, n))
            if len(nxt) < size:
                nxt.append(mutate(cb, rng, cfg.mutation_prob, n))
        population = nxt

    assert best_genes is not None
    return LengthRecord(length, best_genes, best_fit, generations, history)


def make_evaluator(
    train_x: np.ndarray,
    train_y: np.ndarray,
    cfg: GaConfig,
    test_x: np.ndarray | None = None,
    test_y: np.ndarray | None = None,
) -> FitnessEvaluator:
    """Build the fitness oracle for the configured split mode.

    "validation" carves a stratified fold out of the training rows;
    "paper-test" scores fitness directly on the test rows, which leaks the
    test split into the search and exists for comparison runs only.
    """
    if cfg.fitness_split == "paper-test":
        if test_x is None or test_y is None:
            raise ValueError("paper-test fitness needs the test split")
        fit_x, fit_y, eval_x, eval_y = train_x, train_y, test_x, test_y
    else:
        fit_x, fit_y, eval_x, eval_y = carve_validation(
            train_x, train_y, cfg.validation_fraction, cfg.seed
        )
    return FitnessEvaluator(
        fit_x, fit_y, eval_x, eval_y, cfg.fitness_train, cfg.seed, cfg.n_jobs
    )


def full_search(
    train_x: np.ndarray,
    train_y: np.ndarray,
    cfg: GaConfig,
    test_x: np.ndarray | None = None,
    test_y: np.ndarray | None = None,
) -> SearchResult:
    """Run the per-length searches over the configured range and pick the
    global best subset (ties resolved toward fewer features).

    L = 1 is solved by enumerating all single features and L = n_features by
    a single evaluation; everything in between gets a GA run.
    """
    n = cfg.n_features
    if np.asarray(train_x).shape[1] != n:
        raise PipelineError(
            "dimension-mismatch", f"data has {np.asarray(train_x).shape[1]} columns, config says {n}"
        )
    evaluator = make_evaluator(train_x, train_y, cfg, test_x, test_y)
    lo, hi = cfg.l_range
    records: list[LengthRecord] = []
    try:
        for length in range(lo, hi + 1):
            if length == 1:
                singles = [(i,) for i in range(1, n + 1)]
                fits = evaluator.evaluate_many(singles)
                top = int(np.argmax(fits))
                records.append(LengthRecord(1, singles[top], fits[top], 1, [fits[top]]))
            elif length == n:
                full = tuple(range(1, n + 1))
                fit = evaluator.evaluate_many([full])[0]
                records.append(LengthRecord(n, full, fit, 1, [fit]))
            else:
                records.append(run_ga_for_length(length, evaluator, cfg))
    finally:
        evaluator.close()

    best = records[0]
    for rec in records[1:]:
        if rec.fitness > best.fitness:
            best = rec
    return SearchResult(records, best, n, cfg.seed, cfg.fitness_split, evaluator.evaluations)


# --- reports ----------------------------------------------------------------

def write_curve_csv(result: SearchResult, path: str | Path) -> None:
    lines = ["L,best_fitness"]
    lines += [f"{rec.length},{rec.fitness!r}" for rec in result.per_length]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_search_report(
    result: SearchResult, path: str | Path, feature_names: list[str] | None = None
) -> None:
    lines = [
        "mammocad-search v1",
        f"seed\t{result.seed}",
        f"fitness-split\t{result.fitness_split}",
        f"n-features\t{result.n_features}",
        f"evaluations\t{result.evaluations}",
        "per-length\tL\tbest_fitness\tgenerations\tsubset",
    ]
    for rec in result.per_length:
        subset = ",".join(str(g) for g in rec.best)
        lines.append(f"l\t{rec.length}\t{rec.fitness!r}\t{rec.generations}\t{subset}")
    lines.append(f"best-length\t{result.best.length}")
    lines.append(f"best-fitness\t{result.best.fitness!r}")
    lines.append("best-subset\t" + ",".join(str(g) for g in result.best.best))
    if feature_names is not None:
        names = [feature_names[g - 1] for g in result.best.best]
        lines.append("best-names\t" + ",".join(names))
    atomic_write_text(path, "\n".join(lines) + "\n")
