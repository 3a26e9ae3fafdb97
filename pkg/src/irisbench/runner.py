"""Experiment orchestration: population, calibration, sweep, artifacts.

A sweep is a Cartesian product of gallery sizes, set types, strategies,
rotation policies, accuracy targets and gallery permutations.  Pair scores
depend only on (gallery, probes, policy), so each cell's score matrices are
computed once and replayed across thresholds, strategies and permutations;
results are byte-identical for any worker count because every derived
quantity is a pure function of the config seed.

Artifacts written under the configured output directory:

- results.csv        one row per sweep cell and permutation
- calibration.csv    thresholds per (policy, accuracy target)
- scenarios.csv      scenario descriptors pointing at gallery/probe manifests
- distributions.csv  score-distribution samples backing the figure package
- population.csv     population manifest plus IRTB template files
- transactions/      optional per-cell transaction logs (one CSV per cell)
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import engine
from .calibration import Threshold, collect_impostor_scores, threshold_for_target
from .metrics import MetricsReport, aggregate_metrics
from .scenario import (
    Gallery,
    PoolExhaustedError,
    ProbeSet,
    build_closed_probeset,
    build_gallery,
    build_open_probeset,
)
from .search import ONE_TO_FIRST, ONE_TO_N, Stage, Transaction, batch_transactions
from .synth import Population, PopulationParams, generate_population
from .templates import (
    Polarity,
    RotationPolicy,
    Score,
    Template,
    fractional_hamming,
    write_irtb,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "run_experiment",
    "report_from_artifacts",
    "write_results_csv",
    "RESULT_COLUMNS",
]

SET_TYPES = ("closed", "open")
STRATEGIES = (ONE_TO_N, ONE_TO_FIRST)

RESULT_COLUMNS = [
    "gallery_size",
    "set_type",
    "strategy",
    "accuracy_target",
    "rotation_policy",
    "permutation_index",
    "scenario_id",
    "threshold",
    "threshold_unattainable",
    "n_enrolled_probes",
    "n_unenrolled_probes",
    "tpir",
    "fnir",
    "e_fpir",
    "fpir",
    "tnir",
    "e_fpir_all_probes",
    "fpir_all_probes",
    "mean_normalized_comparisons",
    "std_normalized_comparisons",
    "mean_normalized_rotations",
]

CALIBRATION_COLUMNS = [
    "matcher_polarity",
    "rotation_policy",
    "target",
    "threshold",
    "achieved_fraction",
    "n_impostor_scores",
    "unattainable",
]

SCENARIO_COLUMNS = [
    "scenario_id",
    "gallery_size",
    "set_type",
    "permutation_index",
    "seed",
    "gallery_manifest",
    "probe_manifest",
]

TRANSACTION_COLUMNS = [
    "scenario_id",
    "strategy",
    "probe_subject",
    "decision",
    "identified_subject",
    "score",
    "gallery_index",
    "pairs_examined",
    "rotations_evaluated",
    "stage_reached",
]


@dataclass
class ExperimentConfig:
    population: PopulationParams
    n_subjects: int
    samples_per_subject: int
    gallery_sizes: tuple[int, ...]
    set_types: tuple[str, ...]
    strategies: tuple[str, ...]
    rotation_policies: tuple[RotationPolicy, ...]
    accuracy_targets: tuple[float, ...]
    n_permutations: int
    probe_cap_factor: int
    seed: int
    output_dir: Path
    emit_transaction_log: bool = False

    def __post_init__(self) -> None:
        for name in ("gallery_sizes", "set_types", "strategies",
                     "rotation_policies", "accuracy_targets"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if list(self.gallery_sizes) != sorted(self.gallery_sizes):
            raise ValueError("gallery_sizes must be ascending")
        if any(s not in SET_TYPES for s in self.set_types):
            raise ValueError(f"set_types must be drawn from {SET_TYPES}")
        if any(s not in STRATEGIES for s in self.strategies):
            raise ValueError(f"strategies must be drawn from {STRATEGIES}")
        if any(not 0.0 < t < 1.0 for t in self.accuracy_targets):
            raise ValueError("accuracy targets must lie in (0, 1)")
        if self.n_permutations < 1:
            raise ValueError("n_permutations must be >= 1")
        if self.n_subjects < max(self.gallery_sizes):
            raise ValueError("n_subjects smaller than the largest gallery size")
        self.output_dir = Path(self.output_dir)

    @classmethod
    def desk_default(cls, output_dir="out") -> "ExperimentConfig":
        """The in-repo desk-scale sweep: 20 sizes to 2,000, five targets."""
        seed = 20260810
        return cls(
            population=PopulationParams(
                degrees_of_freedom=250,
                genuine_flip_prob=0.065,
                max_rotation_offset=7,
                occlusion_fraction_range=(0.0, 0.25),
                geometry=(20, 240, 2),
                seed=seed,
                flip_tail_fraction=0.10,
                flip_tail_max=0.48,
            ),
            n_subjects=2700,
            samples_per_subject=3,
            gallery_sizes=tuple(range(100, 2001, 100)),
            set_types=("closed", "open"),
            strategies=(ONE_TO_N, ONE_TO_FIRST),
            rotation_policies=(RotationPolicy(narrow=7, wide=21, two_stage=True),),
            accuracy_targets=(1e-6, 1e-5, 1e-4, 1e-3, 1e-2),
            n_permutations=5,
            probe_cap_factor=4,
            seed=seed,
            output_dir=Path(output_dir),
        )


def _parse_policy(spec: str) -> RotationPolicy:
    spec = spec.strip()
    if ":" in spec:
        narrow, wide = spec.split(":", 1)
        return RotationPolicy(narrow=int(narrow), wide=int(wide), two_stage=True)
    return RotationPolicy(narrow=int(spec))


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse the flat key-value config format (see docs/config.md)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        raw[key.strip()] = value.strip()

    def take(key: str, default: str | None = None) -> str:
        if key in raw:
            return raw.pop(key)
        if default is None:
            raise ValueError(f"config is missing required key {key!r}")
        return default

    def ints(text: str) -> tuple[int, ...]:
        return tuple(int(x) for x in text.split(",") if x.strip())

    def floats(text: str) -> tuple[float, ...]:
        return tuple(float(x) for x in text.split(",") if x.strip())

    def names(text: str) -> tuple[str, ...]:
        return tuple(x.strip() for x in text.split(",") if x.strip())

    seed = int(take("seed", "20260810"))
    rows, cols, bpc = (int(x) for x in take("geometry", "20x240x2").split("x"))
    occ_lo, occ_hi = (float(x) for x in take("occlusion_range", "0:0.25").split(":"))
    params = PopulationParams(
        degrees_of_freedom=int(take("dof", "250")),
        genuine_flip_prob=float(take("genuine_flip_prob", "0.065")),
        max_rotation_offset=int(take("max_rotation_offset", "7")),
        occlusion_fraction_range=(occ_lo, occ_hi),
        geometry=(rows, cols, bpc),
        seed=seed,
        flip_tail_fraction=float(take("flip_tail_fraction", "0.10")),
        flip_tail_max=float(take("flip_tail_max", "0.48")),
    )
    sizes = ints(take("gallery_sizes"))
    config = ExperimentConfig(
        population=params,
        n_subjects=int(take("n_subjects", str(max(sizes) + max(500, max(sizes) // 3)))),
        samples_per_subject=int(take("samples_per_subject", "3")),
        gallery_sizes=sizes,
        set_types=names(take("set_types", "closed,open")),
        strategies=names(take("strategies", "one_to_n,one_to_first")),
        rotation_policies=tuple(_parse_policy(p) for p in names(take("rotation_policies", "7:21"))),
        accuracy_targets=floats(take("accuracy_targets", "1e-6,1e-5,1e-4,1e-3,1e-2")),
        n_permutations=int(take("n_permutations", "5")),
        probe_cap_factor=int(take("probe_cap_factor", "4")),
        seed=seed,
        output_dir=Path(take("output_dir", "out")),
        emit_transaction_log=_parse_bool(take("emit_transaction_log", "false")),
    )
    if raw:
        raise ValueError(f"unknown config keys: {', '.join(sorted(raw))}")
    if base_dir is not None and not config.output_dir.is_absolute():
        config.output_dir = base_dir / config.output_dir
    return config


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    path = Path(path)
    config = parse_config(path.read_text(), base_dir=path.parent)
    if seed_override is not None:
        config.seed = seed_override
        config.population = replace(config.population, seed=seed_override)
    return config


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Deterministic independent stream for a namespaced purpose."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns: list[str], rows: Iterable[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def _result_sort_key(row: dict):
    return (
        row["gallery_size"],
        row["set_type"],
        row["strategy"],
        row["accuracy_target"],
        row["rotation_policy"],
        row["permutation_index"],
    )


def write_results_csv(path: Path, rows: list[dict]) -> None:
    _write_csv(path, RESULT_COLUMNS, sorted(rows, key=_result_sort_key))


def _result_row(
    scenario_id: str,
    size: int,
    set_type: str,
    strategy: str,
    target: float,
    policy: RotationPolicy,
    perm: int,
    threshold: Threshold,
    report: MetricsReport,
) -> dict:
    row = {
        "gallery_size": size,
        "set_type": set_type,
        "strategy": strategy,
        "accuracy_target": target,
        "rotation_policy": policy.label,
        "permutation_index": perm,
        "scenario_id": scenario_id,
        "threshold": threshold.value,
        "threshold_unattainable": threshold.unattainable,
        "n_enrolled_probes": report.n_enrolled_probes,
        "n_unenrolled_probes": report.n_unenrolled_probes,
        "tpir": report.tpir,
        "fnir": report.fnir,
        "e_fpir": report.e_fpir,
        "fpir": report.fpir,
        "tnir": report.tnir,
        "e_fpir_all_probes": report.e_fpir_all_probes,
        "fpir_all_probes": report.fpir_all_probes,
        "mean_normalized_comparisons": report.mean_normalized_comparisons,
        "std_normalized_comparisons": report.std_normalized_comparisons,
        "mean_normalized_rotations": report.mean_normalized_rotations,
    }
    return row


def _scenario_id(size: int, set_type: str, perm: int) -> str:
    return f"g{size:05d}-{set_type}-p{perm:02d}"


def _target_tag(target: float) -> str:
    return repr(float(target))


def _tx_filename(scenario_id: str, strategy: str, policy: RotationPolicy, target: float) -> str:
    return f"{scenario_id}__{strategy}__{policy.label}__{_target_tag(target)}.csv"


def _sample_relpath(subject_id: str, sample_index: int) -> str:
    return f"population/{subject_id}/{sample_index}.irtb"


def write_population(pop: Population, out_dir: Path) -> dict[int, tuple[str, int]]:
    """Write the population manifest and IRTB files; map template id -> (subject, index)."""
    rows = []
    locator: dict[int, tuple[str, int]] = {}
    for record in pop.subjects:
        subject_dir = out_dir / "population" / record.subject_id
        subject_dir.mkdir(parents=True, exist_ok=True)
        for k, sample in enumerate(record.samples):
            rel = _sample_relpath(record.subject_id, k)
            write_irtb(sample, out_dir / rel)
            locator[id(sample)] = (record.subject_id, k)
            rows.append(
                {
                    "subject_id": record.subject_id,
                    "origin": record.origin,
                    "sample_index": k,
                    "path": rel,
                }
            )
    _write_csv(out_dir / "population.csv", ["subject_id", "origin", "sample_index", "path"], rows)
    return locator


class _SweepState:
    """Per-run caches: scenarios and score matrices, evicted cell by cell."""

    def __init__(self, config: ExperimentConfig, pop: Population):
        self.config = config
        self.pop = pop
        self.scenarios: dict[tuple[int, str], tuple[Gallery, ProbeSet]] = {}
        self.matrices: dict[tuple[int, str, str], tuple[np.ndarray, np.ndarray]] = {}

    def scenario(self, size: int, set_type: str) -> tuple[Gallery, ProbeSet]:
        key = (size, set_type)
        if key not in self.scenarios:
            seed = self.config.seed
            st_code = SET_TYPES.index(set_type)
            try:
                gallery = build_gallery(
                    self.pop.subjects, size, rng_for(seed, 1, size, st_code)
                )
                if set_type == "closed":
                    probes = build_closed_probeset(
                        self.pop.subjects,
                        gallery,
                        self.config.probe_cap_factor * size,
                        rng_for(seed, 2, size, st_code),
                    )
                else:
                    probes = build_open_probeset(
                        self.pop.subjects, gallery, rng_for(seed, 2, size, st_code)
                    )
            except PoolExhaustedError as exc:
                raise PoolExhaustedError(
                    f"cell (size={size}, {set_type}): {exc}"
                ) from exc
            self.scenarios[key] = (gallery, probes)
        return self.scenarios[key]

    def cell_matrices(
        self, size: int, set_type: str, policy: RotationPolicy
    ) -> tuple[np.ndarray, np.ndarray]:
        key = (size, set_type, policy.label)
        if key not in self.matrices:
            gallery, probes = self.scenario(size, set_type)
            t0 = time.time()
            narrow, wide = engine.score_matrices(
                [p.template for p in probes.probes], gallery.templates, policy
            )
            print(
                f"[irisbench] scored {len(probes)}x{size} ({set_type}, {policy.label}) "
                f"in {time.time() - t0:.1f}s",
                file=sys.stderr,
            )
            self.matrices[key] = (narrow, wide)
        return self.matrices[key]

    def evict(self, size: int, set_type: str) -> None:
        self.scenarios.pop((size, set_type), None)
        for key in [k for k in self.matrices if k[:2] == (size, set_type)]:
            self.matrices.pop(key)


def _calibrate(
    state: _SweepState, out_dir: Path
) -> dict[tuple[str, float], Threshold]:
    """Thresholds per (policy, target) from the largest gallery's closed cell."""
    config = state.config
    calib_size = max(config.gallery_sizes)
    thresholds: dict[tuple[str, float], Threshold] = {}
    rows = []
    for policy in config.rotation_policies:
        gallery, probes = state.scenario(calib_size, "closed")
        narrow, wide = state.cell_matrices(calib_size, "closed", policy)
        eff = wide if policy.two_stage else narrow
        impostor = collect_impostor_scores(gallery, probes, policy, scores=eff)
        for target in config.accuracy_targets:
            th = threshold_for_target(impostor, target, Polarity.DISSIMILARITY)
            thresholds[(policy.label, target)] = th
            rows.append(
                {
                    "matcher_polarity": th.polarity.value,
                    "rotation_policy": policy.label,
                    "target": target,
                    "threshold": th.value,
                    "achieved_fraction": th.achieved_fraction,
                    "n_impostor_scores": impostor.size,
                    "unattainable": th.unattainable,
                }
            )
    _write_csv(out_dir / "calibration.csv", CALIBRATION_COLUMNS, rows)
    return thresholds


def _full_mask_template(master) -> Template:
    return Template(*master.geometry, master.master_code, np.ones(master.master_code.size, bool))


def _write_distributions(state: _SweepState, out_dir: Path, max_rows: int = 50_000) -> None:
    """Score-distribution samples: sample-level genuine/impostor plus
    master-level impostor and augmented-vs-source pairs."""
    config = state.config
    calib_size = max(config.gallery_sizes)
    policy = config.rotation_policies[0]
    gallery, probes = state.scenario(calib_size, "closed")
    narrow, wide = state.cell_matrices(calib_size, "closed", policy)
    eff = wide if policy.two_stage else narrow
    subjects = np.asarray(gallery.subjects)
    probe_ids = np.asarray([p.subject_id for p in probes.probes])
    mated = probe_ids[:, None] == subjects[None, :]
    genuine = eff[mated]
    impostor = eff[~mated]
    rng = rng_for(config.seed, 4)
    if impostor.size > max_rows:
        impostor = impostor[rng.choice(impostor.size, size=max_rows, replace=False)]
    rows = [{"kind": "genuine", "score": float(v)} for v in genuine]
    rows += [{"kind": "impostor", "score": float(v)} for v in impostor]

    base = [s for s in state.pop.subjects if s.origin == "original"]
    derived = {s.subject_id: s for s in state.pop.subjects if s.origin != "original"}
    for record in base:
        for tag in ("rot180", "fliph"):
            twin = derived.get(f"{record.subject_id}-{tag}")
            if twin is None:
                continue
            score = fractional_hamming(
                _full_mask_template(record.master), _full_mask_template(twin.master)
            )
            rows.append({"kind": "master_augmented", "score": score.value})
    n_pairs = min(3 * len(base), 3000)
    for _ in range(n_pairs):
        i, j = rng.choice(len(base), size=2, replace=False)
        score = fractional_hamming(
            _full_mask_template(base[i].master), _full_mask_template(base[j].master)
        )
        rows.append({"kind": "master_impostor", "score": score.value})
    _write_csv(out_dir / "distributions.csv", ["kind", "score"], rows)


def run_experiment(config: ExperimentConfig, jobs: int | None = None) -> list[dict]:
    """Run the full sweep; returns the result rows after writing all artifacts."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    engine.set_jobs(jobs)

    t0 = time.time()
    pop = generate_population(
        config.population,
        config.n_subjects,
        config.samples_per_subject,
        rng_for(config.seed, 0),
    )
    locator = write_population(pop, out_dir)
    print(
        f"[irisbench] population: {pop.n_subjects} subjects x "
        f"{config.samples_per_subject} samples in {time.time() - t0:.1f}s",
        file=sys.stderr,
    )

    state = _SweepState(config, pop)
    thresholds = _calibrate(state, out_dir)
    _write_distributions(state, out_dir)

    results: list[dict] = []
    scenario_rows: list[dict] = []
    # largest size first so the calibration cell's matrices are reused, then evicted
    order = sorted(
        ((s, st) for s in config.gallery_sizes for st in config.set_types),
        key=lambda cell: (-cell[0], cell[1]),
    )
    for size, set_type in order:
        gallery, probes = state.scenario(size, set_type)
        probe_subjects = [p.subject_id for p in probes.probes]
        enrolled = [p.enrolled for p in probes.probes]
        probes_rel = f"scenarios/g{size:05d}-{set_type}.probes.csv"
        _write_csv(
            out_dir / probes_rel,
            ["position", "subject_id", "enrolled", "path"],
            (
                {
                    "position": i,
                    "subject_id": p.subject_id,
                    "enrolled": p.enrolled,
                    "path": _sample_relpath(*locator[id(p.template)]),
                }
                for i, p in enumerate(probes.probes)
            ),
        )
        st_code = SET_TYPES.index(set_type)
        for perm in range(config.n_permutations):
            if perm == 0:
                perm_order = np.arange(size)
            else:
                perm_order = rng_for(config.seed, 3, size, st_code, perm).permutation(size)
            scenario_id = _scenario_id(size, set_type, perm)
            gallery_rel = f"scenarios/{scenario_id}.gallery.csv"
            _write_csv(
                out_dir / gallery_rel,
                ["position", "subject_id", "path"],
                (
                    {
                        "position": i,
                        "subject_id": gallery.subjects[j],
                        "path": _sample_relpath(*locator[id(gallery.templates[j])]),
                    }
                    for i, j in enumerate(perm_order)
                ),
            )
            scenario_rows.append(
                {
                    "scenario_id": scenario_id,
                    "gallery_size": size,
                    "set_type": set_type,
                    "permutation_index": perm,
                    "seed": config.seed,
                    "gallery_manifest": gallery_rel,
                    "probe_manifest": probes_rel,
                }
            )
            for policy in config.rotation_policies:
                narrow, wide = state.cell_matrices(size, set_type, policy)
                for strategy in config.strategies:
                    for target in config.accuracy_targets:
                        th = thresholds[(policy.label, target)]
                        txs = batch_transactions(
                            narrow,
                            wide,
                            probe_subjects,
                            list(gallery.subjects),
                            th.value,
                            policy,
                            strategy,
                            order=perm_order,
                        )
                        report = aggregate_metrics(
                            txs, enrolled, size, policy.effective_shift_count
                        )
                        results.append(
                            _result_row(
                                scenario_id, size, set_type, strategy, target,
                                policy, perm, th, report,
                            )
                        )
                        if config.emit_transaction_log:
                            _write_transactions(
                                out_dir / "transactions"
                                / _tx_filename(scenario_id, strategy, policy, target),
                                scenario_id,
                                strategy,
                                txs,
                            )
        state.evict(size, set_type)

    _write_csv(out_dir / "scenarios.csv", SCENARIO_COLUMNS, scenario_rows)
    write_results_csv(out_dir / "results.csv", results)
    print(
        f"[irisbench] sweep complete: {len(results)} result rows in "
        f"{time.time() - t0:.1f}s",
        file=sys.stderr,
    )
    return sorted(results, key=_result_sort_key)


def _write_transactions(
    path: Path, scenario_id: str, strategy: str, txs: Sequence[Transaction]
) -> None:
    _write_csv(
        path,
        TRANSACTION_COLUMNS,
        (
            {
                "scenario_id": scenario_id,
                "strategy": strategy,
                "probe_subject": tx.probe_subject,
                "decision": "match" if tx.matched else "nonmatch",
                "identified_subject": tx.identified_subject,
                "score": None if tx.score is None else tx.score.value,
                "gallery_index": tx.gallery_index,
                "pairs_examined": tx.pairs_examined,
                "rotations_evaluated": tx.rotations_evaluated,
                "stage_reached": tx.stage_reached.value,
            }
            for tx in txs
        ),
    )


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def report_from_artifacts(out_dir) -> list[dict]:
    """Rebuild the results table from saved transaction logs.

    Requires a sweep run with ``emit_transaction_log`` enabled; reproduces
    results.csv exactly because the same aggregation path runs over the
    logged transactions.
    """
    out_dir = Path(out_dir)
    tx_dir = out_dir / "transactions"
    if not tx_dir.is_dir():
        raise FileNotFoundError(
            f"{tx_dir} not found; run the sweep with emit_transaction_log = true"
        )
    scenarios = {row["scenario_id"]: row for row in _read_csv(out_dir / "scenarios.csv")}
    calibration = {
        (row["rotation_policy"], row["target"]): row
        for row in _read_csv(out_dir / "calibration.csv")
    }
    enrolled_cache: dict[str, list[bool]] = {}
    rows = []
    for tx_path in sorted(tx_dir.glob("*.csv")):
        scenario_id, strategy, policy_label, target_tag = tx_path.stem.split("__")
        scenario = scenarios[scenario_id]
        policy = RotationPolicy.from_label(policy_label)
        target = float(target_tag)
        manifest = scenario["probe_manifest"]
        if manifest not in enrolled_cache:
            enrolled_cache[manifest] = [
                row["enrolled"] == "true" or row["enrolled"] == "True"
                for row in _read_csv(out_dir / manifest)
            ]
        enrolled = enrolled_cache[manifest]
        txs = [
            Transaction(
                probe_subject=row["probe_subject"],
                identified_subject=row["identified_subject"] or None,
                score=(
                    Score(float(row["score"]), Polarity.DISSIMILARITY)
                    if row["score"]
                    else None
                ),
                gallery_index=int(row["gallery_index"]) if row["gallery_index"] else None,
                pairs_examined=int(row["pairs_examined"]),
                rotations_evaluated=int(row["rotations_evaluated"]),
                stage_reached=Stage(row["stage_reached"]),
            )
            for row in _read_csv(tx_path)
        ]
        size = int(scenario["gallery_size"])
        calib = calibration[(policy_label, target_tag)]
        threshold = Threshold(
            value=float(calib["threshold"]),
            polarity=Polarity(calib["matcher_polarity"]),
            target=target,
            achieved_fraction=float(calib["achieved_fraction"]),
            unattainable=calib["unattainable"] == "true",
        )
        report = aggregate_metrics(txs, enrolled, size, policy.effective_shift_count)
        rows.append(
            _result_row(
                scenario_id,
                size,
                scenario["set_type"],
                strategy,
                target,
                policy,
                int(scenario["permutation_index"]),
                threshold,
                report,
            )
        )
    return sorted(rows, key=_result_sort_key)
